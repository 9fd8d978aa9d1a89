//! The verification suite behind `verify`: a fixed matrix of checks with a
//! deterministic text report and a JSON mirror.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bounds::{BoundSpec, TheoremId};
use super::verify::{self, ZeroChainKind};
use super::{run_cell, Family};
use crate::algorithms::{run_method, Method, DEFAULT_INNER_BUDGET, DEFAULT_OPEN_LOOP_OFFSET};
use crate::error::Result;
use crate::instances::{build_hard_instance, build_smoothed_instance, BaseKind, WeightedBallSet};
use crate::oracle;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteKind {
    Structure,
    Zerochain,
    Bounds,
    All,
}

impl SuiteKind {
    fn expand(&self) -> Vec<SuiteKind> {
        match self {
            SuiteKind::All => vec![SuiteKind::Structure, SuiteKind::Zerochain, SuiteKind::Bounds],
            other => vec![*other],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SuiteKind::Structure => "structure",
            SuiteKind::Zerochain => "zerochain",
            SuiteKind::Bounds => "bounds",
            SuiteKind::All => "all",
        }
    }
}

impl FromStr for SuiteKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "structure" => Ok(SuiteKind::Structure),
            "zerochain" => Ok(SuiteKind::Zerochain),
            "bounds" => Ok(SuiteKind::Bounds),
            "all" => Ok(SuiteKind::All),
            other => Err(format!("unknown suite `{other}`; expected structure, zerochain, bounds or all")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteConfig {
    pub suites: Vec<SuiteKind>,
    pub seed: u64,
    /// Add a deliberately corrupted check that must fail.
    pub inject_fault: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { suites: vec![SuiteKind::All], seed: DEFAULT_SEED, inject_fault: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckLine {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteReport {
    pub seed: u64,
    pub defaults: Vec<String>,
    pub checks: Vec<CheckLine>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "lmo-hardbench verification report");
        let _ = writeln!(out, "seed: {}", self.seed);
        for d in &self.defaults {
            let _ = writeln!(out, "default: {d}");
        }
        let _ = writeln!(
            out,
            "note: the lower bounds hold for every method in their class; only the implemented variants are checked, so universality itself is not tested"
        );
        let mut current = "";
        for c in &self.checks {
            if c.suite != current {
                current = &c.suite;
                let _ = writeln!(out, "\n[{current}]");
            }
            let _ = writeln!(out, "{}  {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        let _ = writeln!(out, "\nsummary: {} checks, {} failed", self.checks.len(), self.failures());
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn defaults() -> Vec<String> {
    vec![
        format!("bound slack {:e} (relative, one-sided)", verify::BOUND_SLACK),
        format!("certificate tolerance {:e}", verify::CERTIFICATE_TOLERANCE),
        format!("feasibility tolerance {:e}", oracle::FEASIBILITY_TOLERANCE),
        format!("membership tolerance {:e}", verify::MEMBERSHIP_TOLERANCE),
        format!("tail tolerance {:e}", verify::TAIL_TOLERANCE),
        format!("open-loop step a/(k+a) with a = {DEFAULT_OPEN_LOOP_OFFSET}"),
        format!("fully-corrective inner budget {DEFAULT_INNER_BUDGET}"),
        format!("smoothed beta 200/diam(base) unless set"),
    ]
}

struct Collector {
    suite: &'static str,
    checks: Vec<CheckLine>,
}

impl Collector {
    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckLine { suite: self.suite.into(), name: name.into(), passed, detail: detail.into() });
    }

    /// Record an error as a failed check rather than aborting the suite.
    fn attempt(&mut self, name: impl Into<String>, f: impl FnOnce() -> Result<(bool, String)>) {
        let name = name.into();
        match f() {
            Ok((passed, detail)) => self.push(name, passed, detail),
            Err(e) => self.push(name, false, format!("error: {e}")),
        }
    }
}

pub fn run_suite(config: &SuiteConfig) -> SuiteReport {
    let mut kinds: Vec<SuiteKind> = config.suites.iter().flat_map(SuiteKind::expand).collect();
    kinds.dedup();
    let mut checks = Vec::new();
    for kind in kinds {
        let mut col = Collector { suite: kind.name(), checks: Vec::new() };
        match kind {
            SuiteKind::Structure => structure(&mut col, config.seed),
            SuiteKind::Zerochain => zero_chain(&mut col),
            SuiteKind::Bounds => bounds(&mut col),
            SuiteKind::All => unreachable!("expanded above"),
        }
        checks.extend(col.checks);
    }
    if config.inject_fault {
        let mut col = Collector { suite: "fault", checks: Vec::new() };
        injected_fault(&mut col);
        checks.extend(col.checks);
    }
    let passed = checks.iter().all(|c| c.passed);
    SuiteReport { seed: config.seed, defaults: defaults(), checks, passed }
}

fn structure(col: &mut Collector, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for d in 1..=8 {
        col.attempt(format!("set structure d={d}"), || {
            let r = verify::verify_set_structure(d, 2000, &mut rng)?;
            Ok((
                r.ok,
                format!(
                    "{} of {} points disagree, diameter {}, identities {}, weight-sum bound {}",
                    r.membership_disagreements,
                    r.samples,
                    ok_word(r.diameter_ok),
                    ok_word(r.weight_identities_ok),
                    ok_word(r.weight_sum_bound_ok)
                ),
            ))
        });
    }
    for d in 1..=20 {
        col.attempt(format!("scalars d={d}"), || {
            let r = verify::verify_structural_scalars(d, 10, &mut rng)?;
            let rho = match (r.rho_residual, r.optimum_residual) {
                (Some(res), Some(opt)) => format!(", rho residual {res:.3e}, optimum residual {opt:.3e}"),
                _ => String::new(),
            };
            Ok((r.ok, format!("nu residual {:.3e}{rho}", r.nu_residual)))
        });
    }
}

fn zero_chain(col: &mut Collector) {
    for method in Method::suite() {
        col.attempt(format!("exact chain {method} d=20 T=9"), || {
            let inst = build_hard_instance(20, 1.0, 1.0)?;
            let mut set = inst.set.clone();
            let tr = run_method(&inst.objective, &mut set, method, 9, 0.0)?;
            let r = verify::verify_zero_chain(&tr, ZeroChainKind::Exact);
            Ok((r.ok, violations_or(&r.violations, "supports nested")))
        });
    }
    for method in Method::suite() {
        col.attempt(format!("resisting chain {method} d=16 T=7"), || {
            let cell = run_cell(Family::Permuted, method, 7, None)?;
            let oracle = cell.oracle.as_ref().expect("permuted cells keep the oracle");
            let done = cell.completion.as_ref().expect("permuted cells are completed");
            let r = verify::verify_resisting_oracle(oracle, &done.pi_star)?;
            Ok((
                r.ok,
                format!(
                    "{} assigned, replay deviation {:.3e}{}",
                    oracle.assigned().len(),
                    r.replay_deviation,
                    if r.ok { String::new() } else { format!("; {}", r.violations.join("; ")) }
                ),
            ))
        });
    }
    for kind in [BaseKind::WeightedBall, BaseKind::Simplex] {
        for beta in [10.0, 100.0] {
            for method in Method::suite() {
                col.attempt(format!("approximate chain {method} {} beta={beta} d=16", base_name(kind)), || {
                    let mut inst = build_smoothed_instance(kind, 16, beta)?;
                    let obj = inst.objective.clone();
                    let tr = run_method(&obj, &mut inst, method, 15, 0.0)?;
                    let r = verify::verify_zero_chain(&tr, ZeroChainKind::Approximate { beta });
                    Ok((
                        r.ok,
                        format!(
                            "max |delta|·beta·sqrt(d-t) {:.6}, max tail spread {:.3e}{}",
                            r.max_delta_ratio,
                            r.max_tail_spread,
                            if r.ok { String::new() } else { format!("; {}", r.violations.join("; ")) }
                        ),
                    ))
                });
            }
        }
    }
}

fn bounds(col: &mut Collector) {
    for budget in [4, 8, 16] {
        for method in Method::suite() {
            col.attempt(format!("T2_final {method} T={budget} d={}", 2 * (budget + 1)), || {
                let cell = run_cell(Family::Ball, method, budget, None)?;
                report_line(&cell.verify()?)
            });
        }
    }
    for d in [2, 6, 10, 20] {
        for method in Method::suite() {
            col.attempt(format!("T2_perIter {method} d={d}"), || {
                let inst = build_hard_instance(d, 1.0, 1.0)?;
                let mut set = inst.set.clone();
                let tr = run_method(&inst.objective, &mut set, method, d - 1, 0.0)?;
                report_line(&verify::verify_lower_bound(&tr, &BoundSpec::t2_per_iter(d, 0, 1.0, 1.0), None)?)
            });
        }
    }
    for budget in [3, 7] {
        for method in Method::suite() {
            col.attempt(format!("T1 {method} T={budget} d={}", 2 * (budget + 1)), || {
                let cell = run_cell(Family::Permuted, method, budget, None)?;
                let rep = cell.verify()?;
                let done = cell.completion.as_ref().expect("completed");
                let (line_ok, detail) = report_line(&rep)?;
                Ok((
                    line_ok,
                    format!(
                        "{detail}, tail bound {:.6e}, averaged {:.6e}, {} unassigned",
                        done.tail_bound, done.average_tail_bound, done.unassigned
                    ),
                ))
            });
        }
        col.attempt(format!("T1 infeasible fixture T={budget}"), || {
            let cell = run_cell(Family::Permuted, Method::OpenLoop { offset: DEFAULT_OPEN_LOOP_OFFSET }, budget, None)?;
            let oracle = cell.oracle.as_ref().expect("permuted cells keep the oracle");
            let jump = vec![oracle.family().shift(); cell.d];
            let done = oracle.complete_permutation(&jump)?;
            let rep = verify::verify_lower_bound(&cell.trajectory, &cell.bound_spec(), Some(&done))?;
            Ok((rep.passed && rep.feasible == Some(false), format!("feasible={}", !matches!(rep.feasible, Some(false)))))
        });
    }
    for method in Method::suite() {
        col.attempt(format!("T4_final {method} T=4 d=8"), || {
            let cell = run_cell(Family::SmoothedSimplex, method, 4, None)?;
            report_line(&cell.verify()?)
        });
        col.attempt(format!("T5_final {method} T=4 d=10"), || {
            let cell = run_cell(Family::SmoothedBall, method, 4, None)?;
            report_line(&cell.verify()?)
        });
    }
    for budget in [8, 16, 32] {
        col.attempt(format!("line-search rate T={budget} d={}", 2 * (budget + 1)), || {
            let cell = run_cell(Family::Ball, Method::LineSearch, budget, None)?;
            let diam = WeightedBallSet::new(cell.d)?.diameter();
            let cap = 9.0 * diam * diam / (budget * budget) as f64;
            let gaps = cell.trajectory.gaps();
            let monotone = gaps.windows(2).all(|w| w[1] <= w[0]);
            let gap = cell.trajectory.final_gap;
            Ok((
                gap <= cap && monotone,
                format!(
                    "gap {gap:.6e}, 9·diam²/T² {cap:.6e}, gap·T²/diam² {:.4}, monotone {}",
                    gap * (budget * budget) as f64 / (diam * diam),
                    ok_word(monotone)
                ),
            ))
        });
    }
}

fn injected_fault(col: &mut Collector) {
    col.attempt("T2_final line-search T=4 with the final gap zeroed", || {
        let mut cell = run_cell(Family::Ball, Method::LineSearch, 4, None)?;
        cell.trajectory.final_gap = 0.0;
        if let Some(last) = cell.trajectory.records.last_mut() {
            last.gap = 0.0;
        }
        report_line(&cell.verify()?)
    });
}

fn report_line(rep: &verify::VerificationReport) -> Result<(bool, String)> {
    let mut detail = format!(
        "gap {:.6e}, bound {:.6e}, margin {:.6e}, certificates {}",
        rep.realized_gap,
        rep.bound_value,
        rep.margin,
        ok_word(rep.certificates_ok)
    );
    if let Some(f) = rep.feasible {
        let _ = write!(detail, ", feasible {f}");
    }
    if !rep.notes.is_empty() {
        let _ = write!(detail, " ({})", rep.notes);
    }
    let positive = match rep.theorem {
        TheoremId::T4Final | TheoremId::T5Final => rep.bound_value > 0.0,
        _ => true,
    };
    if !positive {
        detail.push_str(", bound is vacuous");
    }
    Ok((rep.passed && rep.certificates_ok && positive, detail))
}

fn ok_word(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

fn violations_or(v: &[String], fallback: &str) -> String {
    if v.is_empty() {
        fallback.to_string()
    } else {
        v.join("; ")
    }
}

fn base_name(kind: BaseKind) -> &'static str {
    match kind {
        BaseKind::Simplex => "simplex",
        BaseKind::WeightedBall => "weighted-ball",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_suite_passes_and_is_reproducible() {
        let cfg = SuiteConfig { suites: vec![SuiteKind::Structure], seed: 7, inject_fault: false };
        let a = run_suite(&cfg);
        assert!(a.passed, "{}", a.render());
        assert_eq!(a.render(), run_suite(&cfg).render());
    }

    #[test]
    fn injected_fault_fails_the_report() {
        let cfg = SuiteConfig { suites: vec![], seed: 1, inject_fault: true };
        let r = run_suite(&cfg);
        assert!(!r.passed);
        assert_eq!(r.failures(), 1);
        assert!(r.render().contains("FAIL"));
    }

    #[test]
    fn suite_names_parse() {
        for s in ["structure", "zerochain", "bounds", "all"] {
            assert_eq!(s.parse::<SuiteKind>().unwrap().name(), s);
        }
        assert!("everything".parse::<SuiteKind>().is_err());
    }
}
