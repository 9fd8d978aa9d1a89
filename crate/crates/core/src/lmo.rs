//! Exact linear minimization oracles and supporting geometry.
//!
//! Over the weighted ball the minimizer of `⟨p, x⟩` is the soft-threshold
//!
//! ```text
//! z_i = −sign(p_i)·max(0, |p_i|/λ − w_{π(i)})
//! ```
//!
//! with `λ > 0` the multiplier that puts `z` on the boundary. With active set
//! `A = {i : |p_i|/λ > w_i}` the constraint collapses to
//! `½ Σ_{i∈A} (p_i²/λ² − w_i²)`, so `1/λ` has a closed form on each piece
//! between consecutive breakpoints `w_i/|p_i|`. Sorting the breakpoints gives
//! the piece directly. Coordinates outside the active set come out as literal
//! zeros: when the root lands exactly on the next breakpoint, the smaller
//! active set is kept and `λ` is rounded up until those coordinates
//! threshold to `0.0` in floating point.

use crate::error::{Error, Result};
use crate::instances::{check_dim, SmoothedBase, SmoothedInstance, WeightedBallSet};
use crate::roots::{bisect, MAX_BISECTION_ITERATIONS};
use crate::vector;

/// Relative slack under which a root sitting on the next breakpoint keeps the
/// smaller active set.
const BREAKPOINT_SLACK: f64 = 64.0 * f64::EPSILON;
const MAX_SETTLE_STEPS: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq)]
pub struct LmoResult {
    pub z: Vec<f64>,
    /// KKT multiplier of the boundary constraint.
    pub lambda: f64,
    /// `|h(z) − C²|`
    pub constraint_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub y: Vec<f64>,
    /// Multiplier of the projection problem; zero iff the input was feasible.
    pub gamma: f64,
    pub distance: f64,
}

fn weighted_constraint(weights: &[f64], x: &[f64]) -> f64 {
    x.iter()
        .zip(weights)
        .map(|(&xi, &wi)| 0.5 * xi * xi + wi * xi.abs())
        .sum()
}

/// `h(x) = ½‖x‖² + Σ_i w_{π(i)}|x_i|`
pub fn eval_constraint(set: &WeightedBallSet, x: &[f64]) -> Result<f64> {
    check_dim(set.dim(), x)?;
    Ok(weighted_constraint(&set.coordinate_weights(), x))
}

/// `h(x) ≤ C²(1 + tol)`
pub fn contains(set: &WeightedBallSet, x: &[f64], tol: f64) -> Result<bool> {
    Ok(eval_constraint(set, x)? <= set.c_squared() * (1.0 + tol))
}

/// Elementwise soft-threshold of `−p/λ` at levels `weights`.
pub fn soft_threshold(p: &[f64], weights: &[f64], lambda: f64) -> Vec<f64> {
    p.iter()
        .zip(weights)
        .map(|(&pi, &wi)| {
            let v = pi.abs() / lambda - wi;
            if v > 0.0 {
                -pi.signum() * v
            } else {
                0.0
            }
        })
        .collect()
}

/// `λ ↦ h(z(λ))` for the query `p`; nonincreasing in `λ`.
pub fn constraint_at_multiplier(set: &WeightedBallSet, p: &[f64], lambda: f64) -> Result<f64> {
    check_dim(set.dim(), p)?;
    let w = set.coordinate_weights();
    Ok(weighted_constraint(&w, &soft_threshold(p, &w, lambda)))
}

/// Multiplier for `min ⟨p, x⟩ s.t. ½‖x‖² + Σ w_i|x_i| ≤ c2` over the given
/// coordinates. `None` when every `p_i` is zero.
pub(crate) fn solve_multiplier(abs_p: &[f64], weights: &[f64], c2: f64) -> Option<f64> {
    let p_max = abs_p.iter().copied().fold(0.0, f64::max);
    if p_max <= 0.0 {
        return None;
    }
    // Normalized magnitudes keep the sums of squares in range.
    let q: Vec<f64> = abs_p.iter().map(|v| v / p_max).collect();
    let breakpoint = |i: usize| weights[i] / q[i];
    let mut order: Vec<usize> = (0..q.len()).filter(|&i| q[i] > 0.0).collect();
    order.sort_by(|&a, &b| breakpoint(a).total_cmp(&breakpoint(b)).then(a.cmp(&b)));

    let (mut sum_q2, mut sum_w2) = (0.0, 0.0);
    let mut scale = 0.0;
    let mut active = 0;
    for (k, &i) in order.iter().enumerate() {
        sum_q2 += q[i] * q[i];
        sum_w2 += weights[i] * weights[i];
        scale = ((2.0 * c2 + sum_w2) / sum_q2).sqrt();
        active = k + 1;
        match order.get(k + 1) {
            Some(&j) if scale <= breakpoint(j) * (1.0 + BREAKPOINT_SLACK) => break,
            _ => {}
        }
    }
    let lambda = p_max / scale;
    settle_multiplier(lambda, order[active..].iter().map(|&i| (abs_p[i], weights[i])))
}

/// Smallest `λ' ≥ λ` at which every `(|p_i|, w_i)` pair thresholds to zero.
pub(crate) fn settle_multiplier<I>(mut lambda: f64, inactive: I) -> Option<f64>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let mut steps = 0;
    for (ap, w) in inactive {
        while ap / lambda > w {
            lambda = lambda.next_up();
            steps += 1;
            if steps > MAX_SETTLE_STEPS {
                return None;
            }
        }
    }
    Some(lambda)
}

/// Exact LMO over the (possibly permuted) weighted ball.
pub fn lmo_weighted_ball(set: &WeightedBallSet, p: &[f64]) -> Result<LmoResult> {
    check_dim(set.dim(), p)?;
    if vector::is_zero(p) {
        return Err(Error::ZeroQuery);
    }
    let w = set.coordinate_weights();
    let abs_p: Vec<f64> = p.iter().map(|v| v.abs()).collect();
    let lambda = solve_multiplier(&abs_p, &w, set.c_squared())
        .expect("nonzero query has a multiplier");
    Ok(assemble(p, &w, lambda, set.c_squared()))
}

pub(crate) fn assemble(p: &[f64], weights: &[f64], lambda: f64, c2: f64) -> LmoResult {
    let z = soft_threshold(p, weights, lambda);
    let constraint_residual = (weighted_constraint(weights, &z) - c2).abs();
    LmoResult { z, lambda, constraint_residual }
}

/// LMO over `{x ≥ 0, Σx_i ≤ 1}`: the zero vertex when `p ≥ 0`, otherwise the
/// basis vector of the smallest index attaining `min p_i`.
pub fn lmo_simplex(p: &[f64]) -> Vec<f64> {
    let mut z = vec![0.0; p.len()];
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in p.iter().enumerate() {
        if v < 0.0 && best.is_none_or(|(_, b)| v < b) {
            best = Some((i, v));
        }
    }
    if let Some((j, _)) = best {
        z[j] = 1.0;
    }
    z
}

/// LMO over `S + B(0, 1/β)`: `LMO_S(p) − (1/β)·p/‖p‖`.
pub fn lmo_minkowski(smoothed: &SmoothedInstance, p: &[f64]) -> Result<Vec<f64>> {
    check_dim(smoothed.dim(), p)?;
    if vector::is_zero(p) {
        return Err(Error::ZeroQuery);
    }
    let mut z = match &smoothed.base {
        SmoothedBase::Simplex { .. } => lmo_simplex(p),
        SmoothedBase::WeightedBall(set) => lmo_weighted_ball(set, p)?.z,
    };
    let step = 1.0 / (smoothed.beta * vector::norm(p));
    vector::axpy(-step, p, &mut z);
    Ok(z)
}

fn shrink(x: &[f64], weights: &[f64], gamma: f64) -> Vec<f64> {
    x.iter()
        .zip(weights)
        .map(|(&xi, &wi)| {
            let v = (xi.abs() - gamma * wi) / (1.0 + gamma);
            if v > 0.0 {
                xi.signum() * v
            } else {
                0.0
            }
        })
        .collect()
}

/// Euclidean projection onto the weighted ball:
/// `y_i = sign(x_i)·max(0, (|x_i| − γ w_{π(i)})/(1 + γ))`, with `γ` found by
/// bisection on the decreasing map `γ ↦ h(y(γ))`.
pub fn project_onto_weighted_ball(set: &WeightedBallSet, x: &[f64]) -> Result<ProjectionResult> {
    check_dim(set.dim(), x)?;
    let w = set.coordinate_weights();
    let c2 = set.c_squared();
    if weighted_constraint(&w, x) <= c2 {
        return Ok(ProjectionResult { y: x.to_vec(), gamma: 0.0, distance: 0.0 });
    }
    let hi = x
        .iter()
        .zip(&w)
        .map(|(xi, wi)| xi.abs() / wi)
        .fold(0.0, f64::max);
    let root = bisect(
        |g| weighted_constraint(&w, &shrink(x, &w, g)) - c2,
        0.0,
        hi,
        1e-12 * c2,
        MAX_BISECTION_ITERATIONS,
    );
    let y = shrink(x, &w, root.point);
    let distance = vector::distance(x, &y);
    Ok(ProjectionResult { y, gamma: root.point, distance })
}

/// Euclidean projection onto `{x ≥ 0, Σx_i ≤ 1}`.
pub fn project_onto_simplex(x: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    if clipped.iter().sum::<f64>() <= 1.0 {
        return clipped;
    }
    // The budget constraint is active: project onto {x ≥ 0, Σx_i = 1}.
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumulative += v;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if v - candidate > 0.0 {
            tau = candidate;
        } else {
            break;
        }
    }
    x.iter().map(|v| (v - tau).max(0.0)).collect()
}

/// The boundary point `r·u`, `r > 0` solving `h(r·u) = C²`.
pub fn boundary_scale(set: &WeightedBallSet, u: &[f64]) -> Result<Vec<f64>> {
    check_dim(set.dim(), u)?;
    if vector::is_zero(u) {
        return Err(Error::InvalidParameter { name: "u", value: 0.0, reason: "direction must be nonzero" });
    }
    // ½r²‖u‖² + a·r = C², solved in rationalized form.
    let a: f64 = u
        .iter()
        .enumerate()
        .map(|(i, ui)| set.coordinate_weight(i) * ui.abs())
        .sum();
    let c2 = set.c_squared();
    let r = 2.0 * c2 / (a + (a * a + 2.0 * c2 * vector::dot(u, u)).sqrt());
    Ok(vector::scale(r, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{build_smoothed_instance, BaseKind, Permutation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;
    use std::f64::consts::SQRT_2;

    fn unit_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = vector::norm(&v);
        vector::scale(1.0 / n, &v)
    }

    /// Independent route: bisection on `λ ↦ h(z(λ))` over `(0, max|p_i|/w_i]`.
    fn lmo_by_bisection(set: &WeightedBallSet, p: &[f64]) -> Vec<f64> {
        let w = set.coordinate_weights();
        let c2 = set.c_squared();
        let hi = p.iter().zip(&w).map(|(pi, wi)| pi.abs() / wi).fold(0.0, f64::max);
        let root = bisect(
            |lam| weighted_constraint(&w, &soft_threshold(p, &w, lam)) - c2,
            hi * 1e-12,
            hi,
            0.0,
            MAX_BISECTION_ITERATIONS,
        );
        soft_threshold(p, &w, root.point)
    }

    #[test]
    fn constraint_examples() {
        let s = WeightedBallSet::new(2).unwrap();
        assert_eq!(eval_constraint(&s, &[0.0, 0.0]).unwrap(), 0.0);
        let h = eval_constraint(&s, &[0.20710678118654752, 0.0]).unwrap();
        assert!((h - 0.125).abs() < 1e-15);
        assert!(eval_constraint(&s, &[0.0; 3]).is_err());
    }

    #[test]
    fn membership_examples() {
        let s = WeightedBallSet::new(2).unwrap();
        assert!(contains(&s, &[0.0, 0.0], 0.0).unwrap());
        let two_c = 2.0 * s.c();
        assert!(!contains(&s, &[two_c, two_c], 1e-10).unwrap());
        let [edge, _] = s.diameter_attaining_points();
        assert!(contains(&s, &edge, 1e-10).unwrap());
        // Pushing a boundary point out by more than the slack flips membership.
        let out = vector::scale(1.0 + 1e-8, &edge);
        assert!(!contains(&s, &out, 1e-10).unwrap());
        assert!(contains(&s, &out, 1e-6).unwrap());
    }

    #[test]
    fn single_coordinate_query() {
        let s = WeightedBallSet::new(2).unwrap();
        let r = lmo_weighted_ball(&s, &[0.0, -1.0]).unwrap();
        assert_eq!(r.z[0], 0.0);
        let w2 = s.weights()[1];
        let closed = -w2 + (w2 * w2 + 2.0 * s.c_squared()).sqrt();
        assert!((r.z[1] - closed).abs() < 1e-15);
        assert!((r.z[1] - 0.15891862).abs() < 1e-8);
        assert!((r.lambda - 1.15470054).abs() < 1e-8);
        assert!((lmo_by_bisection(&s, &[0.0, -1.0])[1] - closed).abs() < 1e-12);
    }

    #[test]
    fn equal_magnitudes_threshold_the_heavier_coordinate_to_zero() {
        let s = WeightedBallSet::new(2).unwrap();
        let r = lmo_weighted_ball(&s, &[-1.0, -1.0]).unwrap();
        assert!((r.z[0] - 0.20710678).abs() < 1e-8);
        // literal zero, not a small number
        assert_eq!(r.z[1].to_bits(), 0.0f64.to_bits());
        assert!((r.lambda - SQRT_2).abs() < 1e-12);
        assert!(r.constraint_residual <= 1e-12 * s.c_squared());
    }

    #[test]
    fn equal_magnitudes_keep_exact_zeros_in_every_dimension() {
        for d in 1..=64 {
            for alpha in [1.0, 0.3, 7.0] {
                let s = WeightedBallSet::scaled(d, alpha).unwrap();
                for sigma in [-1.0, 1.0, -3.7e-4, 2.5e5] {
                    let r = lmo_weighted_ball(&s, &vec![sigma; d]).unwrap();
                    assert!(r.z[0] != 0.0);
                    assert!(r.z[1..].iter().all(|&v| v == 0.0), "d={d} alpha={alpha} sigma={sigma}");
                }
            }
        }
    }

    #[test]
    fn zero_query_is_ambiguous() {
        let s = WeightedBallSet::new(3).unwrap();
        assert!(matches!(lmo_weighted_ball(&s, &[0.0; 3]), Err(Error::ZeroQuery)));
        assert!(matches!(lmo_weighted_ball(&s, &[1.0; 2]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn lmo_beats_boundary_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=10 {
            let s = WeightedBallSet::new(d).unwrap();
            let samples: Vec<Vec<f64>> = (0..100)
                .map(|_| boundary_scale(&s, &unit_vector(&mut rng, d)).unwrap())
                .collect();
            for _ in 0..200 {
                let p = unit_vector(&mut rng, d);
                let r = lmo_weighted_ball(&s, &p).unwrap();
                assert!(r.constraint_residual <= 1e-12 * s.c_squared());
                let pz = vector::dot(&p, &r.z);
                for v in &samples {
                    assert!(pz <= vector::dot(&p, v) + 1e-12);
                }
                let other = lmo_by_bisection(&s, &p);
                assert!(vector::distance(&other, &r.z) <= 1e-10);
            }
        }
    }

    #[test]
    fn reconstruction_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = WeightedBallSet::new(8)
            .unwrap()
            .with_permutation(Permutation::new(vec![4, 0, 7, 2, 1, 6, 3, 5]).unwrap())
            .unwrap();
        let w = s.coordinate_weights();
        for _ in 0..500 {
            let p = unit_vector(&mut rng, 8);
            let r = lmo_weighted_ball(&s, &p).unwrap();
            let again = soft_threshold(&p, &w, r.lambda);
            assert!(again.iter().zip(&r.z).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
    }

    #[test]
    fn multiplier_map_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let d = rng.random_range(1..=10);
            let s = WeightedBallSet::new(d).unwrap();
            let p = unit_vector(&mut rng, d);
            let hi = (0..d).map(|i| p[i].abs() / s.coordinate_weight(i)).fold(0.0, f64::max);
            let mut prev = f64::INFINITY;
            for k in 1..=100 {
                let lam = if k == 100 { hi } else { hi * k as f64 / 100.0 };
                let h = constraint_at_multiplier(&s, &p, lam).unwrap();
                assert!(h <= prev);
                prev = h;
            }
            assert!(prev <= 1e-14 * s.c_squared());
        }
    }

    #[test]
    fn simplex_vertices() {
        assert_eq!(lmo_simplex(&[1.0, 2.0, 3.0]), vec![0.0, 0.0, 0.0]);
        assert_eq!(lmo_simplex(&[0.5, -1.0, -1.0]), vec![0.0, 1.0, 0.0]);
        assert_eq!(lmo_simplex(&[-1.0, 0.0, 0.0]), vec![1.0, 0.0, 0.0]);
        assert_eq!(lmo_simplex(&[0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn minkowski_examples() {
        let ball = build_smoothed_instance(BaseKind::WeightedBall, 2, 10.0).unwrap();
        let z = lmo_minkowski(&ball, &[0.0, -1.0]).unwrap();
        assert_eq!(z[0], 0.0);
        assert!((z[1] - 0.25891862).abs() < 1e-8);

        let simplex = build_smoothed_instance(BaseKind::Simplex, 2, 10.0).unwrap();
        let z = lmo_minkowski(&simplex, &[1.0, 1.0]).unwrap();
        assert!((z[0] + 0.07071068).abs() < 1e-8);
        assert!((z[1] + 0.07071068).abs() < 1e-8);
        assert!(matches!(lmo_minkowski(&simplex, &[0.0, 0.0]), Err(Error::ZeroQuery)));
    }

    #[test]
    fn minkowski_lmo_is_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for kind in [BaseKind::WeightedBall, BaseKind::Simplex] {
            let inst = build_smoothed_instance(kind, 5, 10.0).unwrap();
            for _ in 0..100 {
                let p = unit_vector(&mut rng, 5);
                let z = lmo_minkowski(&inst, &p).unwrap();
                assert!(inst.distance_to_base(&z).unwrap() <= 0.1 + 1e-10);
                for _ in 0..50 {
                    let v = match &inst.base {
                        SmoothedBase::WeightedBall(s) => boundary_scale(s, &unit_vector(&mut rng, 5)).unwrap(),
                        SmoothedBase::Simplex { .. } => {
                            let raw: Vec<f64> = (0..6).map(|_| rng.random::<f64>()).collect();
                            let total: f64 = raw.iter().sum();
                            raw[..5].iter().map(|r| r / total).collect()
                        }
                    };
                    let b = vector::scale(0.1 * rng.random::<f64>(), &unit_vector(&mut rng, 5));
                    let vb: Vec<f64> = v.iter().zip(&b).map(|(a, c)| a + c).collect();
                    assert!(vector::dot(&p, &z) <= vector::dot(&p, &vb) + 1e-12);
                }
            }
        }
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn projection_examples() {
        let s = WeightedBallSet::new(3).unwrap();
        let r = project_onto_weighted_ball(&s, &[0.0; 3]).unwrap();
        assert_eq!(r.gamma, 0.0);
        assert_eq!(r.distance, 0.0);

        let s1 = WeightedBallSet::new(1).unwrap();
        let r = project_onto_weighted_ball(&s1, &[1.0]).unwrap();
        assert!((r.y[0] - 0.29289322).abs() < 1e-8);
        assert!((r.distance - 0.70710678).abs() < 1e-8);
        assert!(r.gamma > 0.0);
    }

    #[test]
    fn projection_satisfies_the_obtuse_angle_condition() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in [2, 5, 9] {
            let s = WeightedBallSet::new(d)
                .unwrap()
                .with_permutation(Permutation::new((0..d).rev().collect()).unwrap())
                .unwrap();
            for _ in 0..30 {
                let x = vector::scale(3.0 * s.c(), &unit_vector(&mut rng, d));
                let r = project_onto_weighted_ball(&s, &x).unwrap();
                let h = eval_constraint(&s, &r.y).unwrap();
                assert!((h - s.c_squared()).abs() <= 1e-10);
                let xy = vector::sub(&x, &r.y);
                for _ in 0..100 {
                    let v = boundary_scale(&s, &unit_vector(&mut rng, d)).unwrap();
                    let v = vector::scale(rng.random::<f64>(), &v);
                    assert!(vector::dot(&xy, &vector::sub(&v, &r.y)) <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn simplex_projection() {
        assert_eq!(project_onto_simplex(&[0.2, -0.1]), vec![0.2, 0.0]);
        let y = project_onto_simplex(&[1.0, 1.0, -3.0]);
        assert_eq!(y, vec![0.5, 0.5, 0.0]);
        let y = project_onto_simplex(&[0.3; 4]);
        assert!(y.iter().all(|&v| (v - 0.25).abs() < 1e-15));
    }

    #[test]
    fn boundary_scale_examples() {
        let s = WeightedBallSet::new(6).unwrap();
        let mut e1 = vec![0.0; 6];
        e1[0] = 1.0;
        let r = boundary_scale(&s, &e1).unwrap();
        assert!((r[0] - s.c() * (2.0 - SQRT_2)).abs() <= 1e-15);
        e1[0] = -1.0;
        let r = boundary_scale(&s, &e1).unwrap();
        assert!((r[0] + s.c() * (2.0 - SQRT_2)).abs() <= 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let v = boundary_scale(&s, &unit_vector(&mut rng, 6)).unwrap();
            assert!(contains(&s, &v, 1e-10).unwrap());
            assert!((eval_constraint(&s, &v).unwrap() - s.c_squared()).abs() <= 1e-12 * s.c_squared());
        }
    }
}
