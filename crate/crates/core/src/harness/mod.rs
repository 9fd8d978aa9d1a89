//! Bound formulas, verifiers, the verification suite and parameter sweeps.

pub mod bounds;
pub mod suite;
pub mod sweep;
pub mod verify;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algorithms::{run_method, Method, Trajectory};
use crate::error::Result;
use crate::instances::{build_hard_instance, build_smoothed_instance, BaseKind, PermutedFamily, WeightedBallSet};
use crate::lmo::contains;
use crate::oracle::{CompletionResult, ResistingOracle};

pub use bounds::{bound_value, BoundSpec, TheoremId};
pub use suite::{run_suite, SuiteConfig, SuiteKind, SuiteReport};
pub use sweep::{sweep, SweepConfig, SweepRow};
pub use verify::{
    brute_force_completion, check_certificates, verify_lower_bound, verify_resisting_oracle, verify_set_structure,
    verify_structural_scalars, verify_zero_chain, VerificationReport, ZeroChainKind,
};

/// Instance families with a matching final-form bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Weighted ball, exact LMO; `d = 2(T+1)`.
    Ball,
    /// Permuted family behind the resisting oracle; `d = 2(T+1)`.
    Permuted,
    /// Smoothed weighted ball; `d = 2(T+1)`.
    SmoothedBall,
    /// Smoothed simplex; `d = 2T`.
    SmoothedSimplex,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Ball, Family::Permuted, Family::SmoothedBall, Family::SmoothedSimplex];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Ball => "ball",
            Family::Permuted => "permuted",
            Family::SmoothedBall => "smoothed-ball",
            Family::SmoothedSimplex => "smoothed-simplex",
        }
    }

    pub fn theorem(&self) -> TheoremId {
        match self {
            Family::Ball => TheoremId::T2Final,
            Family::Permuted => TheoremId::T1,
            Family::SmoothedBall => TheoremId::T5Final,
            Family::SmoothedSimplex => TheoremId::T4Final,
        }
    }

    pub fn dimension(&self, budget: usize) -> usize {
        self.theorem().final_dimension(budget).expect("final-form theorems fix d")
    }

    pub fn is_smoothed(&self) -> bool {
        matches!(self, Family::SmoothedBall | Family::SmoothedSimplex)
    }

    /// `β = 200 / diam(base)`, large enough that the smoothed bounds are
    /// nonvacuous at small budgets.
    pub fn default_beta(&self, d: usize) -> Option<f64> {
        match self {
            Family::SmoothedBall => WeightedBallSet::new(d).ok().map(|s| 200.0 / s.diameter()),
            Family::SmoothedSimplex => Some(200.0 / std::f64::consts::SQRT_2),
            _ => None,
        }
    }

    pub fn bound_spec(&self, budget: usize, beta: Option<f64>) -> BoundSpec {
        match self {
            Family::Ball => BoundSpec::t2_final(budget, 1.0, 1.0),
            Family::Permuted => BoundSpec::t1(budget, 1.0, 1.0),
            Family::SmoothedBall => BoundSpec::t5_final(budget, beta.unwrap_or(f64::NAN)),
            Family::SmoothedSimplex => BoundSpec::t4_final(budget, beta.unwrap_or(f64::NAN)),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family `{s}`; expected ball, permuted, smoothed-ball or smoothed-simplex"))
    }
}

/// One method run on one family at its theorem's dimension.
#[derive(Debug, Clone)]
pub struct Cell {
    pub family: Family,
    pub method: Method,
    pub d: usize,
    pub budget: usize,
    pub beta: Option<f64>,
    pub trajectory: Trajectory,
    pub completion: Option<CompletionResult>,
    pub oracle: Option<ResistingOracle>,
    /// Feasibility of `x_T` (for the permuted family, under the completion).
    pub feasible: bool,
}

pub fn run_cell(family: Family, method: Method, budget: usize, beta: Option<f64>) -> Result<Cell> {
    let d = family.dimension(budget);
    let beta = if family.is_smoothed() { beta.or(family.default_beta(d)) } else { None };
    let (trajectory, completion, oracle, feasible) = match family {
        Family::Ball => {
            let inst = build_hard_instance(d, 1.0, 1.0)?;
            let mut set = inst.set.clone();
            let tr = run_method(&inst.objective, &mut set, method, budget, 0.0)?;
            let feasible = contains(&inst.set, tr.final_point(), verify::FEASIBILITY_TOLERANCE)?;
            (tr, None, None, feasible)
        }
        Family::Permuted => {
            let fam = PermutedFamily::scaled(d, 1.0, 1.0)?;
            let mut oracle = ResistingOracle::new(fam.clone());
            let tr = run_method(&fam.objective(), &mut oracle, method, budget, fam.optimal_value())?;
            let done = oracle.complete_permutation(tr.final_point())?;
            let feasible = done.feasible;
            (tr, Some(done), Some(oracle), feasible)
        }
        Family::SmoothedBall | Family::SmoothedSimplex => {
            let kind = if family == Family::SmoothedBall { BaseKind::WeightedBall } else { BaseKind::Simplex };
            let mut inst = build_smoothed_instance(kind, d, beta.expect("smoothed families carry beta"))?;
            let obj = inst.objective.clone();
            let tr = run_method(&obj, &mut inst, method, budget, 0.0)?;
            let feasible = inst.contains(tr.final_point(), verify::FEASIBILITY_TOLERANCE)?;
            (tr, None, None, feasible)
        }
    };
    Ok(Cell { family, method, d, budget, beta, trajectory, completion, oracle, feasible })
}

impl Cell {
    pub fn bound_spec(&self) -> BoundSpec {
        self.family.bound_spec(self.budget, self.beta)
    }

    pub fn verify(&self) -> Result<VerificationReport> {
        verify_lower_bound(&self.trajectory, &self.bound_spec(), self.completion.as_ref())
    }
}
