//! Checks of realized runs against the theorems and the set structure.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::bounds::{bound_value, BoundSpec, TheoremId};
use crate::algorithms::Trajectory;
use crate::error::{Error, Result};
use crate::instances::{
    build_permuted_family, compute_nu, rho_polynomial, Permutation, WeightedBallSet,
};
use crate::lmo::{self, contains, eval_constraint};
use crate::oracle::{CompletionResult, ResistingOracle};
use crate::vector::{self, distance, dot, norm, support_end};

/// One-sided slack on bound checks, relative to the bound.
pub const BOUND_SLACK: f64 = 1e-12;
/// Relative residual allowed on span and hull certificates.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-10;
/// Equality tolerance for smoothed tail coordinates and the δ bound.
pub const TAIL_TOLERANCE: f64 = 1e-12;
/// Membership tolerance of the ball-intersection equivalence.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-12;
/// Relative feasibility slack used outside the resisting-oracle dichotomy.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub theorem: TheoremId,
    pub bound_value: f64,
    pub realized_gap: f64,
    /// `realized_gap − bound_value` at the tightest checked iteration.
    pub margin: f64,
    pub passed: bool,
    pub zero_chain_ok: Option<bool>,
    pub certificates_ok: bool,
    pub feasible: Option<bool>,
    pub notes: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CertificateReport {
    pub max_convex_residual: f64,
    pub max_span_residual: f64,
    /// Residual of projecting `p_k` onto the generating set, independent of
    /// the emitted coefficients.
    pub max_projection_residual: f64,
    pub coefficients_valid: bool,
    pub ok: bool,
}

/// Hull and span certificates of every record; residuals are relative to
/// `diam` and `‖p_k‖` respectively.
pub fn check_certificates(trajectory: &Trajectory, diam: f64) -> CertificateReport {
    let mut conv: f64 = 0.0;
    let mut span: f64 = 0.0;
    let mut proj: f64 = 0.0;
    let mut coeffs_ok = true;
    for rec in &trajectory.records {
        let c = &rec.convex_coeffs;
        coeffs_ok &= c.len() == rec.k + 1
            && c.iter().all(|&v| v >= -1e-14)
            && (c.iter().sum::<f64>() - 1.0).abs() <= 1e-12;
        conv = conv.max(trajectory.convex_residual(rec.k) / diam);
        if let Some(p) = &rec.p {
            let scale = norm(p).max(f64::MIN_POSITIVE);
            match trajectory.span_residual(rec.k) {
                Some(r) => span = span.max(r / scale),
                None => coeffs_ok = false,
            }
            proj = proj.max(projection_residual(&trajectory.span_generators(rec.k), p) / scale);
        }
    }
    let ok = coeffs_ok
        && conv <= CERTIFICATE_TOLERANCE
        && span <= CERTIFICATE_TOLERANCE
        && proj <= CERTIFICATE_TOLERANCE;
    CertificateReport {
        max_convex_residual: conv,
        max_span_residual: span,
        max_projection_residual: proj,
        coefficients_valid: coeffs_ok,
        ok,
    }
}

/// Distance from `p` to the span of `generators`, by modified Gram-Schmidt
/// with one reorthogonalization pass.
pub fn projection_residual(generators: &[Vec<f64>], p: &[f64]) -> f64 {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for g in generators {
        let mut v = g.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &v);
                vector::axpy(-c, q, &mut v);
            }
        }
        let n = norm(&v);
        if n > 1e-12 * norm(g).max(f64::MIN_POSITIVE) && n > 0.0 {
            basis.push(vector::scale(1.0 / n, &v));
        }
    }
    let mut r = p.to_vec();
    for _ in 0..2 {
        for q in &basis {
            let c = dot(q, &r);
            vector::axpy(-c, q, &mut r);
        }
    }
    norm(&r)
}

/// Compare a trajectory against a bound.
///
/// Per-iteration bounds are checked at every `t ≤ min(T, d − 1)`; final
/// bounds at `x_T`. The resisting-oracle bound needs the oracle's
/// completion, and passes whenever the final point is infeasible for the
/// completed instance.
pub fn verify_lower_bound(
    trajectory: &Trajectory,
    spec: &BoundSpec,
    completion: Option<&CompletionResult>,
) -> Result<VerificationReport> {
    let d = spec.dimension()?;
    if trajectory.dim != d {
        return Err(Error::InstanceMismatch(format!(
            "{} is stated in dimension {d}, trajectory has {}",
            spec.theorem, trajectory.dim
        )));
    }
    let diam = spec.diameter()?;
    let certificates = check_certificates(trajectory, diam);
    let budget = trajectory.iterations();

    let mut notes = Vec::new();
    let (bound, gap, margin, passed, feasible) = if spec.theorem.is_per_iteration() {
        let last = budget.min(d - 1);
        let mut worst: Option<(f64, f64, f64)> = None;
        let mut ok = true;
        for t in 0..=last {
            let b = bound_value(&spec.at(t))?;
            let g = trajectory.records[t].gap;
            let m = g - b;
            ok &= m >= -BOUND_SLACK * b;
            if worst.is_none_or(|(_, _, wm)| m < wm) {
                worst = Some((b, g, m));
            }
        }
        notes.push(format!("checked t = 0..={last}"));
        let (b, g, m) = worst.expect("at least t = 0");
        (b, g, m, ok, None)
    } else {
        let spec_budget = spec.t.expect("dimension() checked t");
        if spec_budget != budget {
            return Err(Error::InstanceMismatch(format!(
                "bound is for T = {spec_budget}, trajectory ran {budget} iterations"
            )));
        }
        let b = bound_value(spec)?;
        if spec.theorem == TheoremId::T1 {
            let c = completion
                .ok_or_else(|| Error::InstanceMismatch("the resisting-oracle bound needs a completion".into()))?;
            if (c.certified_floor - b).abs() > 1e-12 * b {
                notes.push(format!("oracle floor {:.6e} differs from bound", c.certified_floor));
            }
            if c.feasible {
                let m = c.gap - b;
                (b, c.gap, m, m >= -BOUND_SLACK * b, Some(true))
            } else {
                notes.push("final point infeasible for the completed instance".into());
                (b, c.gap, c.gap - b, true, Some(false))
            }
        } else {
            let g = trajectory.final_gap;
            let m = g - b;
            (b, g, m, m >= -BOUND_SLACK * b, None)
        }
    };
    if !certificates.ok {
        notes.push("certificate check failed".into());
    }
    Ok(VerificationReport {
        theorem: spec.theorem,
        bound_value: bound,
        realized_gap: gap,
        margin,
        passed,
        zero_chain_ok: None,
        certificates_ok: certificates.ok,
        feasible,
        notes: notes.join("; "),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ZeroChainKind {
    /// Literal zeros past the revealed prefix.
    Exact,
    /// Equal tail entries bounded by `1/(β√(d−t))`.
    Approximate { beta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ZeroChainReport {
    pub ok: bool,
    /// Common tail value `δ_{t+1}` of each `z_{t+1}` (approximate kind).
    pub deltas: Vec<f64>,
    /// Largest `|δ_{t+1}|·β√(d−t)`; at most 1 when the bound holds.
    pub max_delta_ratio: f64,
    /// Largest spread among tail entries of any `z_{t+1}` or `x_t`.
    pub max_tail_spread: f64,
    pub violations: Vec<String>,
}

pub fn verify_zero_chain(trajectory: &Trajectory, kind: ZeroChainKind) -> ZeroChainReport {
    let d = trajectory.dim;
    let mut violations = Vec::new();
    let mut deltas = Vec::new();
    let mut ratio: f64 = 0.0;
    let mut spread: f64 = 0.0;
    for rec in &trajectory.records {
        let t = rec.k;
        match kind {
            ZeroChainKind::Exact => {
                if support_end(&rec.x) > t {
                    violations.push(format!("x_{t} has support past coordinate {t}"));
                }
                if let Some(z) = &rec.z {
                    if support_end(z) > t + 1 {
                        violations.push(format!("z_{} has support past coordinate {}", t + 1, t + 1));
                    }
                }
            }
            ZeroChainKind::Approximate { beta } => {
                if t < d {
                    let s = tail_spread(&rec.x[t..]);
                    spread = spread.max(s);
                    if s > TAIL_TOLERANCE {
                        violations.push(format!("x_{t} tail entries differ by {s:e}"));
                    }
                }
                if let Some(z) = &rec.z {
                    if t + 1 < d {
                        let tail = &z[t + 1..];
                        let s = tail_spread(tail);
                        spread = spread.max(s);
                        if s > TAIL_TOLERANCE {
                            violations.push(format!("z_{} tail entries differ by {s:e}", t + 1));
                        }
                        let delta = tail[0];
                        deltas.push(delta);
                        let limit = 1.0 / (beta * ((d - t) as f64).sqrt());
                        ratio = ratio.max(delta.abs() / limit);
                        if delta.abs() > limit + TAIL_TOLERANCE {
                            violations.push(format!("|δ_{}| = {:e} exceeds {limit:e}", t + 1, delta.abs()));
                        }
                    }
                }
            }
        }
    }
    ZeroChainReport { ok: violations.is_empty(), deltas, max_delta_ratio: ratio, max_tail_spread: spread, violations }
}

fn tail_spread(tail: &[f64]) -> f64 {
    let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if tail.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResistingReport {
    pub ok: bool,
    /// Largest deviation of a logged answer from the full LMO after completion.
    pub replay_deviation: f64,
    pub violations: Vec<String>,
}

/// Zeros on coordinates unassigned at query time, prefix ranks, and replay
/// agreement under the completed permutation.
pub fn verify_resisting_oracle(oracle: &ResistingOracle, completed: &Permutation) -> Result<ResistingReport> {
    let mut violations = Vec::new();
    let mut assigned = vec![false; oracle.dim()];
    let mut count = 0;
    for (q, rec) in oracle.log().iter().enumerate() {
        if let (Some(i), Some(r)) = (rec.assigned_index, rec.assigned_rank) {
            if r != count {
                violations.push(format!("query {q} handed out rank {} out of order", r + 1));
            }
            assigned[i] = true;
            count += 1;
        }
        for (j, &v) in rec.z.iter().enumerate() {
            if !assigned[j] && v != 0.0 {
                violations.push(format!("query {q} answered {v:e} on unassigned coordinate {j}"));
            }
        }
    }
    let replay = oracle.replay(completed)?;
    if replay > 1e-12 {
        violations.push(format!("replay deviates by {replay:e}"));
    }
    Ok(ResistingReport { ok: violations.is_empty(), replay_deviation: replay, violations })
}

/// Exhaustive search over completions of the oracle's partial permutation,
/// maximizing the tail distance `Σ_{j∈U} ((x_T)_j − ρ(w_d − w_{π(j)}))²`.
/// Returns the best completion and its tail sum.
pub fn brute_force_completion(oracle: &ResistingOracle, x_final: &[f64]) -> (Permutation, f64) {
    let family = oracle.family();
    let d = family.dim();
    let w = family.base_set().weights();
    let wd = w[d - 1];
    let rho = family.rho();
    let unassigned: Vec<usize> = (0..d).filter(|i| !oracle.is_assigned(*i)).collect();
    let free_ranks: Vec<usize> = (oracle.assigned().len()..d).collect();

    let mut best_sum = f64::NEG_INFINITY;
    let mut best_ranks = Vec::new();
    let mut order = free_ranks.clone();
    permute(&mut order, 0, &mut |ranks| {
        let s: f64 = unassigned
            .iter()
            .zip(ranks)
            .map(|(&j, &r)| (x_final[j] - rho * (wd - w[r])).powi(2))
            .sum();
        if s > best_sum {
            best_sum = s;
            best_ranks = ranks.to_vec();
        }
    });

    let mut full = vec![0; d];
    for (&i, &r) in oracle.assigned() {
        full[i] = r;
    }
    for (&j, &r) in unassigned.iter().zip(&best_ranks) {
        full[j] = r;
    }
    let best_sum = if unassigned.is_empty() { 0.0 } else { best_sum };
    (Permutation::new(full).expect("a bijection by construction"), best_sum)
}

fn permute(items: &mut [usize], start: usize, visit: &mut dyn FnMut(&[usize])) {
    if start + 1 >= items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StructureReport {
    pub d: usize,
    pub samples: usize,
    pub membership_disagreements: usize,
    pub diameter_ok: bool,
    pub weight_identities_ok: bool,
    pub weight_sum_bound_ok: bool,
    pub ok: bool,
    pub notes: Vec<String>,
}

/// Ball-intersection equivalence on `samples` random points with `‖x‖ ≤ 3C`,
/// diameter attainment, the weight identities and the weight-sum bound.
pub fn verify_set_structure<R: Rng>(d: usize, samples: usize, rng: &mut R) -> Result<StructureReport> {
    if d > 12 {
        return Err(Error::InvalidDimension { d, reason: "the 2^d ball enumeration is limited to d <= 12" });
    }
    let set = WeightedBallSet::new(d)?;
    let c = set.c();
    let c2 = set.c_squared();
    let w = set.coordinate_weights();
    let radius2 = set.ball_radius().powi(2);
    let mut notes = Vec::new();

    let mut disagreements = 0;
    for _ in 0..samples {
        let dir: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let n = norm(&dir);
        if n == 0.0 {
            continue;
        }
        let r = 3.0 * c * rng.random::<f64>();
        let x = vector::scale(r / n, &dir);
        let in_s = eval_constraint(&set, &x)? <= c2 * (1.0 + MEMBERSHIP_TOLERANCE);
        let in_balls = (0u32..(1u32 << d)).all(|mask| {
            let sq: f64 = (0..d)
                .map(|i| {
                    let s = if mask >> i & 1 == 1 { 1.0 } else { -1.0 };
                    (x[i] + s * w[i]).powi(2)
                })
                .sum();
            sq <= radius2 * (1.0 + MEMBERSHIP_TOLERANCE)
        });
        if in_s != in_balls {
            disagreements += 1;
        }
    }
    if disagreements > 0 {
        notes.push(format!("{disagreements} membership disagreements"));
    }

    let diam = set.diameter();
    let [a, b] = set.diameter_attaining_points();
    let mut diameter_ok = contains(&set, &a, FEASIBILITY_TOLERANCE)?
        && contains(&set, &b, FEASIBILITY_TOLERANCE)?
        && (distance(&a, &b) - diam).abs() <= 1e-12 * diam.max(1.0);
    // No pair of opposite LMO answers is farther apart than the diameter.
    for _ in 0..64 {
        let p: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        if vector::is_zero(&p) {
            continue;
        }
        let z1 = lmo::lmo_weighted_ball(&set, &p)?.z;
        let z2 = lmo::lmo_weighted_ball(&set, &vector::scale(-1.0, &p))?.z;
        if distance(&z1, &z2) > diam * (1.0 + 1e-12) {
            diameter_ok = false;
            notes.push("an antipodal LMO pair exceeds the diameter".into());
            break;
        }
    }
    if d == 1 {
        let wsum = set.weights()[0];
        let endpoint = -wsum + (wsum * wsum + 2.0 * c2).sqrt();
        if (2.0 * endpoint - diam).abs() > 1e-12 {
            diameter_ok = false;
            notes.push("one-dimensional endpoints disagree with the diameter formula".into());
        }
    }

    let ws = set.weights();
    let mut identities = ws.windows(2).all(|p| ((p[1] * p[1] - p[0] * p[0]) - 2.0 * c2).abs() <= 1e-12 * 2.0 * c2);
    identities &= (2.0 * c2 + ws.iter().map(|v| v * v).sum::<f64>() - radius2).abs() <= 1e-12 * radius2;
    let sum_bound = 2.0 * std::f64::consts::SQRT_2 / 3.0 * c * ((d + 1) as f64).powf(1.5);
    let weight_sum_bound_ok = set.weight_sum() <= sum_bound;

    let ok = disagreements == 0 && diameter_ok && identities && weight_sum_bound_ok;
    Ok(StructureReport {
        d,
        samples,
        membership_disagreements: disagreements,
        diameter_ok,
        weight_identities_ok: identities,
        weight_sum_bound_ok,
        ok,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScalarReport {
    pub d: usize,
    pub nu_residual: f64,
    pub nu_bound_ok: bool,
    pub rho_residual: Option<f64>,
    pub rho_bound_ok: Option<bool>,
    /// Worst boundary and stationarity residuals of `x⋆^{(π)}` over the
    /// sampled permutations.
    pub optimum_residual: Option<f64>,
    pub ok: bool,
}

/// ν and ρ root residuals and lower bounds, and `permutations` random optima.
pub fn verify_structural_scalars<R: Rng>(d: usize, permutations: usize, rng: &mut R) -> Result<ScalarReport> {
    let set = WeightedBallSet::new(d)?;
    let c2 = set.c_squared();
    let nu = compute_nu(&set);
    let df = d as f64;
    let nu_residual = (0.5 * df * nu * nu + set.weight_sum() * nu - c2).abs();
    let nu_bound_ok = nu * nu >= 9.0 * c2 / (8.0 * (df + 2.0).powi(3));
    let mut ok = nu_residual <= 1e-12 * c2 && nu_bound_ok;

    let (mut rho_residual, mut rho_bound_ok, mut optimum_residual) = (None, None, None);
    if d >= 3 {
        let family = build_permuted_family(d)?;
        let rho = family.rho();
        let res = (rho_polynomial(&set, rho) - c2).abs();
        let bound_ok = rho >= 2.0 / (df * df);
        ok &= res <= 1e-12 * c2 && bound_ok;
        rho_residual = Some(res);
        rho_bound_ok = Some(bound_ok);

        let mut worst: f64 = 0.0;
        for _ in 0..permutations {
            let mut ranks: Vec<usize> = (0..d).collect();
            for i in (1..d).rev() {
                ranks.swap(i, rng.random_range(0..=i));
            }
            let perm = Permutation::new(ranks)?;
            let x = family.optimum_for_permutation(&perm)?;
            let s = family.permuted_set(&perm)?;
            let boundary = (eval_constraint(&s, &x)? - c2).abs() / c2;
            worst = worst.max(boundary).max(family.stationarity_residual(&perm, &x));
        }
        ok &= worst <= 1e-10;
        optimum_residual = Some(worst);
    }
    Ok(ScalarReport { d, nu_residual, nu_bound_ok, rho_residual, rho_bound_ok, optimum_residual, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{run_method, Method};
    use crate::instances::{build_hard_instance, build_permuted_family, build_smoothed_instance, BaseKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projection_residual_of_members_and_outsiders() {
        let gens = vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 1.0, 0.0]];
        assert!(projection_residual(&gens, &[3.0, -1.0, 0.0]) <= 1e-15);
        assert!((projection_residual(&gens, &[0.0, 0.0, 2.0]) - 2.0).abs() <= 1e-15);
        assert_eq!(projection_residual(&[], &[3.0, 4.0]), 5.0);
    }

    #[test]
    fn line_search_meets_the_final_bound() {
        let inst = build_hard_instance(10, 1.0, 1.0).unwrap();
        let mut set = inst.set.clone();
        let tr = run_method(&inst.objective, &mut set, Method::LineSearch, 4, 0.0).unwrap();
        let rep = verify_lower_bound(&tr, &BoundSpec::t2_final(4, 1.0, 1.0), None).unwrap();
        assert!(rep.passed && rep.margin > 0.0 && rep.certificates_ok);
        assert!(rep.realized_gap >= 1.70e-5);

        let per = verify_lower_bound(&tr, &BoundSpec::t2_per_iter(10, 0, 1.0, 1.0), None).unwrap();
        assert!(per.passed);
        // at t = 0 the gap is (d/2)ν²
        assert!((tr.records[0].gap - 5.0 * inst.nu * inst.nu).abs() <= 1e-18);

        assert!(verify_lower_bound(&tr, &BoundSpec::t2_final(5, 1.0, 1.0), None).is_err());
    }

    #[test]
    fn resisting_bound_requires_a_completion_and_accepts_infeasibility() {
        let family = build_permuted_family(8).unwrap();
        let mut oracle = ResistingOracle::new(family.clone());
        let tr = run_method(&family.objective(), &mut oracle, Method::OpenLoop { offset: 2.0 }, 3, family.optimal_value())
            .unwrap();
        let spec = BoundSpec::t1(3, 1.0, 1.0);
        assert!(verify_lower_bound(&tr, &spec, None).is_err());
        let done = oracle.complete_permutation(tr.final_point()).unwrap();
        let rep = verify_lower_bound(&tr, &spec, Some(&done)).unwrap();
        assert!(rep.passed);

        let jump = oracle.complete_permutation(&[family.shift(); 8]).unwrap();
        assert!(!jump.feasible);
        let rep = verify_lower_bound(&tr, &spec, Some(&jump)).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.feasible, Some(false));
    }

    #[test]
    fn brute_force_agrees_with_the_sorting_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in [4, 6, 8] {
            for _ in 0..20 {
                let mut oracle = ResistingOracle::new(build_permuted_family(d).unwrap());
                for _ in 0..rng.random_range(0..3) {
                    let p: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                    oracle.query(&p).unwrap();
                }
                let x: Vec<f64> = (0..d).map(|_| rng.random_range(-0.1..0.2)).collect();
                let (_, best) = brute_force_completion(&oracle, &x);
                let done = oracle.complete_permutation(&x).unwrap();
                let l = oracle.family().smoothness();
                assert!((0.5 * l * best - done.tail_bound).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn exact_and_approximate_chains() {
        let inst = build_hard_instance(12, 1.0, 1.0).unwrap();
        let mut set = inst.set.clone();
        let tr = run_method(&inst.objective, &mut set, Method::Pairwise, 6, 0.0).unwrap();
        assert!(verify_zero_chain(&tr, ZeroChainKind::Exact).ok);

        let mut sm = build_smoothed_instance(BaseKind::WeightedBall, 16, 10.0).unwrap();
        let obj = sm.objective.clone();
        let tr = run_method(&obj, &mut sm, Method::LineSearch, 8, 0.0).unwrap();
        let rep = verify_zero_chain(&tr, ZeroChainKind::Approximate { beta: 10.0 });
        assert!(rep.ok, "{:?}", rep.violations);
        assert!(rep.max_delta_ratio <= 1.0 + 1e-12);
        assert_eq!(rep.deltas.len(), 8);
    }

    #[test]
    fn structure_and_scalars_hold_for_small_dimensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for d in 1..=5 {
            let r = verify_set_structure(d, 500, &mut rng).unwrap();
            assert!(r.ok, "{r:?}");
            let s = verify_structural_scalars(d, 5, &mut rng).unwrap();
            assert!(s.ok, "{s:?}");
        }
        assert!(verify_set_structure(13, 1, &mut rng).is_err());
    }

    #[test]
    fn resisting_oracle_report() {
        let family = build_permuted_family(6).unwrap();
        let mut oracle = ResistingOracle::new(family.clone());
        let tr = run_method(&family.objective(), &mut oracle, Method::AwayStep, 2, family.optimal_value()).unwrap();
        let done = oracle.complete_permutation(tr.final_point()).unwrap();
        let rep = verify_resisting_oracle(&oracle, &done.pi_star).unwrap();
        assert!(rep.ok, "{:?}", rep.violations);
    }
}
