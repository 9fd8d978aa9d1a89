//! Deterministic Frank-Wolfe variants that emit their own span and hull
//! certificates.
//!
//! Methods see the problem only through [`FirstOrderOracle`] and
//! [`LinearMinimizationOracle`]; neither the minimizer nor the set internals
//! are reachable from the iteration loop.

pub mod export;
pub mod steps;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{QuadraticObjective, SmoothedInstance, WeightedBallSet};
use crate::lmo;
use crate::oracle::ResistingOracle;
use crate::vector::{dot, norm, sub};

pub use steps::{
    capped_line_search, fully_corrective_step, line_search_step, short_step, ActiveSet, CorrectiveResult,
    QuadraticModel,
};

pub const DEFAULT_OPEN_LOOP_OFFSET: f64 = 2.0;
pub const DEFAULT_INNER_BUDGET: usize = 1000;

/// Values, gradients and exact segment minimization of `f`.
pub trait FirstOrderOracle {
    fn dim(&self) -> usize;
    fn smoothness(&self) -> f64;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    /// `argmin_{θ∈[0,cap]} f(x + θ·dir)`.
    fn line_search(&self, x: &[f64], dir: &[f64], cap: f64) -> f64;
}

impl FirstOrderOracle for QuadraticObjective {
    fn dim(&self) -> usize {
        QuadraticObjective::dim(self)
    }

    fn smoothness(&self) -> f64 {
        QuadraticObjective::smoothness(self)
    }

    fn value(&self, x: &[f64]) -> f64 {
        QuadraticObjective::value(self, x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        QuadraticObjective::gradient(self, x)
    }

    fn line_search(&self, x: &[f64], dir: &[f64], cap: f64) -> f64 {
        capped_line_search(x, dir, cap, self)
    }
}

pub trait LinearMinimizationOracle {
    fn dim(&self) -> usize;
    fn minimize(&mut self, p: &[f64]) -> Result<Vec<f64>>;
}

impl LinearMinimizationOracle for WeightedBallSet {
    fn dim(&self) -> usize {
        WeightedBallSet::dim(self)
    }

    fn minimize(&mut self, p: &[f64]) -> Result<Vec<f64>> {
        Ok(lmo::lmo_weighted_ball(self, p)?.z)
    }
}

impl LinearMinimizationOracle for SmoothedInstance {
    fn dim(&self) -> usize {
        SmoothedInstance::dim(self)
    }

    fn minimize(&mut self, p: &[f64]) -> Result<Vec<f64>> {
        lmo::lmo_minkowski(self, p)
    }
}

impl LinearMinimizationOracle for ResistingOracle {
    fn dim(&self) -> usize {
        ResistingOracle::dim(self)
    }

    fn minimize(&mut self, p: &[f64]) -> Result<Vec<f64>> {
        Ok(self.query(p)?.z)
    }
}

impl<T: LinearMinimizationOracle + ?Sized> LinearMinimizationOracle for &mut T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn minimize(&mut self, p: &[f64]) -> Result<Vec<f64>> {
        (**self).minimize(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum Method {
    /// `θ_k = a/(k + a)` for offset `a`; `a = 2` is the classical schedule.
    OpenLoop { offset: f64 },
    LineSearch,
    ShortStep,
    AwayStep,
    Pairwise,
    FullyCorrective {
        #[serde(rename = "innerBudget")]
        inner_budget: usize,
    },
}

impl Method {
    pub const NAMES: [&'static str; 6] =
        ["open-loop", "line-search", "short-step", "away-step", "pairwise", "fully-corrective"];

    /// Every variant with default parameters.
    pub fn suite() -> Vec<Method> {
        Self::NAMES.iter().map(|n| n.parse().expect("known name")).collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::OpenLoop { .. } => "open-loop",
            Method::LineSearch => "line-search",
            Method::ShortStep => "short-step",
            Method::AwayStep => "away-step",
            Method::Pairwise => "pairwise",
            Method::FullyCorrective { .. } => "fully-corrective",
        }
    }

    /// Whether each step is an exact minimization, so `f` cannot increase.
    pub fn is_monotone(&self) -> bool {
        !matches!(self, Method::OpenLoop { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Method::OpenLoop { offset } if !(offset.is_finite() && offset > 0.0) => {
                Err(Error::InvalidParameter { name: "offset", value: offset, reason: "must be positive" })
            }
            Method::FullyCorrective { inner_budget: 0 } => Err(Error::InvalidParameter {
                name: "inner_budget",
                value: 0.0,
                reason: "must be at least 1",
            }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "open-loop" => Method::OpenLoop { offset: DEFAULT_OPEN_LOOP_OFFSET },
            "line-search" => Method::LineSearch,
            "short-step" => Method::ShortStep,
            "away-step" => Method::AwayStep,
            "pairwise" => Method::Pairwise,
            "fully-corrective" => Method::FullyCorrective { inner_budget: DEFAULT_INNER_BUDGET },
            other => return Err(format!("unknown method `{other}`; expected one of {}", Self::NAMES.join(", "))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    FrankWolfe,
    Away,
    /// An away step that removed its atom.
    Drop,
    Pairwise,
    Corrective,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IterationRecord {
    pub k: usize,
    pub x: Vec<f64>,
    pub value: f64,
    pub gap: f64,
    pub gradient: Vec<f64>,
    /// Search direction `p_k`; absent on the final record.
    pub p: Option<Vec<f64>>,
    /// LMO answer `z_{k+1}` to `p_k`.
    pub z: Option<Vec<f64>>,
    pub step: Option<f64>,
    pub step_kind: Option<StepKind>,
    pub inner_iterations: Option<usize>,
    /// Weights over `{x₀, z₁, …, z_k}` reconstructing `x_k`.
    pub convex_coeffs: Vec<f64>,
    /// Coefficients over `[x_i − x₀]_{i≤k}, [z_i − x₀]_{i≤k}, [∇f(x_i)]_{i≤k}`
    /// reconstructing `p_k`.
    pub span_coeffs: Option<Vec<f64>>,
}

impl IterationRecord {
    pub fn support(&self) -> usize {
        crate::vector::support_size(&self.x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Trajectory {
    pub method: Method,
    pub dim: usize,
    pub optimal_value: f64,
    pub records: Vec<IterationRecord>,
    pub final_gap: f64,
}

impl Trajectory {
    pub fn iterations(&self) -> usize {
        self.records.len() - 1
    }

    pub fn final_point(&self) -> &[f64] {
        &self.records.last().expect("trajectories are nonempty").x
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.gap).collect()
    }

    /// `[x₀, z₁, …, z_T]`.
    pub fn atoms(&self) -> Vec<Vec<f64>> {
        let mut atoms = vec![self.records[0].x.clone()];
        atoms.extend(self.records.iter().filter_map(|r| r.z.clone()));
        atoms
    }

    /// Generating set for `p_k`, in the order `span_coeffs` uses.
    pub fn span_generators(&self, k: usize) -> Vec<Vec<f64>> {
        let x0 = &self.records[0].x;
        let mut gens: Vec<Vec<f64>> = (1..=k).map(|i| sub(&self.records[i].x, x0)).collect();
        gens.extend((0..k).map(|i| sub(self.records[i].z.as_ref().expect("z before T"), x0)));
        gens.extend((0..=k).map(|i| self.records[i].gradient.clone()));
        gens
    }

    /// `‖x_k − Σ c_i a_i‖` from the emitted convex coefficients.
    pub fn convex_residual(&self, k: usize) -> f64 {
        let atoms = self.atoms();
        let rec = &self.records[k];
        let mut recon = vec![0.0; self.dim];
        for (c, a) in rec.convex_coeffs.iter().zip(&atoms) {
            crate::vector::axpy(*c, a, &mut recon);
        }
        crate::vector::distance(&rec.x, &recon)
    }

    /// `‖p_k − Σ c_j g_j‖` from the emitted span coefficients.
    pub fn span_residual(&self, k: usize) -> Option<f64> {
        let rec = &self.records[k];
        let (p, coeffs) = (rec.p.as_ref()?, rec.span_coeffs.as_ref()?);
        let gens = self.span_generators(k);
        let mut recon = vec![0.0; self.dim];
        for (c, g) in coeffs.iter().zip(&gens) {
            crate::vector::axpy(*c, g, &mut recon);
        }
        Some(crate::vector::distance(p, &recon))
    }
}

/// Run `iterations` steps of `method` from `x₀ = 0`, one gradient and one LMO
/// query per step.
pub fn run_method(
    fo: &dyn FirstOrderOracle,
    lmo: &mut dyn LinearMinimizationOracle,
    method: Method,
    iterations: usize,
    optimal_value: f64,
) -> Result<Trajectory> {
    method.validate()?;
    if iterations == 0 {
        return Err(Error::InvalidParameter { name: "T", value: 0.0, reason: "at least one iteration is required" });
    }
    let d = fo.dim();
    if lmo.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: lmo.dim() });
    }
    let l = fo.smoothness();

    let mut atoms = vec![vec![0.0; d]];
    let mut weights = ActiveSet::new();
    let mut x = vec![0.0; d];
    let mut records = Vec::with_capacity(iterations + 1);

    for k in 0..=iterations {
        let g = fo.gradient(&x);
        let value = fo.value(&x);
        let mut rec = IterationRecord {
            k,
            x: x.clone(),
            value,
            gap: value - optimal_value,
            gradient: g.clone(),
            p: None,
            z: None,
            step: None,
            step_kind: None,
            inner_iterations: None,
            convex_coeffs: weights.weights().to_vec(),
            span_coeffs: None,
        };
        if k == iterations {
            records.push(rec);
            break;
        }

        let p = g.clone();
        let mut span = vec![0.0; 3 * k + 1];
        span[3 * k] = 1.0;
        let z = lmo.minimize(&p)?;
        atoms.push(z.clone());
        weights.push_atom();
        let new = atoms.len() - 1;

        let (step, kind, inner) = match method {
            Method::OpenLoop { offset } => {
                let theta = offset / (k as f64 + offset);
                x = toward(&x, &z, theta);
                weights.toward(new, theta);
                (Some(theta), StepKind::FrankWolfe, None)
            }
            Method::LineSearch => {
                let theta = fo.line_search(&x, &sub(&z, &x), 1.0);
                x = toward(&x, &z, theta);
                weights.toward(new, theta);
                (Some(theta), StepKind::FrankWolfe, None)
            }
            Method::ShortStep => {
                let theta = short_step(&x, &z, &g, l);
                x = toward(&x, &z, theta);
                weights.toward(new, theta);
                (Some(theta), StepKind::FrankWolfe, None)
            }
            Method::AwayStep => {
                let a = weights.worst_atom(&atoms, &g).expect("active set is nonempty");
                let fw_gap = dot(&g, &sub(&x, &z));
                let away_gap = dot(&g, &sub(&atoms[a], &x));
                if weights.active_count() == 1 || fw_gap >= away_gap {
                    let theta = fo.line_search(&x, &sub(&z, &x), 1.0);
                    x = toward(&x, &z, theta);
                    weights.toward(new, theta);
                    (Some(theta), StepKind::FrankWolfe, None)
                } else {
                    let cap = weights.away_cap(a);
                    let theta = fo.line_search(&x, &sub(&x, &atoms[a]), cap);
                    x = x.iter().zip(&atoms[a]).map(|(xi, ai)| xi + theta * (xi - ai)).collect();
                    weights.away_from(a, theta);
                    let kind = if theta == cap { StepKind::Drop } else { StepKind::Away };
                    (Some(theta), kind, None)
                }
            }
            Method::Pairwise => {
                let a = weights.worst_atom(&atoms, &g).expect("active set is nonempty");
                let cap = weights.weights()[a];
                let dir = sub(&z, &atoms[a]);
                let theta = fo.line_search(&x, &dir, cap);
                x = x.iter().zip(&dir).map(|(xi, di)| xi + theta * di).collect();
                weights.transfer(a, new, theta);
                (Some(theta), StepKind::Pairwise, None)
            }
            Method::FullyCorrective { inner_budget } => {
                let model = QuadraticModel { anchor: x.clone(), gradient: g.clone(), l };
                let r = fully_corrective_step(&atoms, weights.clone(), &model, inner_budget)?;
                weights = r.weights;
                x = r.point;
                (None, StepKind::Corrective, Some(r.inner_iterations))
            }
        };

        rec.p = Some(p);
        rec.z = Some(z);
        rec.step = step;
        rec.step_kind = Some(kind);
        rec.inner_iterations = inner;
        rec.span_coeffs = Some(span);
        records.push(rec);
    }

    let final_gap = records.last().expect("at least one record").gap;
    Ok(Trajectory { method, dim: d, optimal_value, records, final_gap })
}

fn toward(x: &[f64], z: &[f64], theta: f64) -> Vec<f64> {
    x.iter().zip(z).map(|(xi, zi)| xi + theta * (zi - xi)).collect()
}

/// Relative form of the span residual, `0` for a zero direction.
pub fn relative(residual: f64, scale: &[f64]) -> f64 {
    let n = norm(scale);
    if n == 0.0 {
        residual
    } else {
        residual / n
    }
}
