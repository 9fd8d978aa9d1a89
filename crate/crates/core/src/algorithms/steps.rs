//! Step-size rules and atom bookkeeping shared by the method suite.

use crate::error::{Error, Result};
use crate::instances::QuadraticObjective;
use crate::vector::{dot, sub};

/// Atoms whose convex weight falls below this are dropped.
pub const DROP_THRESHOLD: f64 = 1e-14;

/// Inner duality gap at which the fully-corrective loop stops.
pub const INNER_GAP_TOLERANCE: f64 = 1e-12;

/// Exact minimizer of the quadratic over the segment `[x, z]`, as a step in
/// `[0, 1]`. Returns 0 when `x = z`.
pub fn line_search_step(x: &[f64], z: &[f64], objective: &QuadraticObjective) -> f64 {
    let dir = sub(z, x);
    capped_line_search(x, &dir, 1.0, objective)
}

/// Exact minimizer of `θ ↦ f(x + θ·dir)` over `[0, cap]`.
pub fn capped_line_search(x: &[f64], dir: &[f64], cap: f64, objective: &QuadraticObjective) -> f64 {
    let dd = dot(dir, dir);
    if dd == 0.0 {
        return 0.0;
    }
    let offset = sub(x, objective.minimizer());
    (-dot(&offset, dir) / dd).clamp(0.0, cap)
}

/// `min(1, ⟨g, x − z⟩ / (L‖x − z‖²))`, clamped below at 0.
pub fn short_step(x: &[f64], z: &[f64], gradient: &[f64], l: f64) -> f64 {
    let d = sub(x, z);
    let dd = dot(&d, &d);
    if dd == 0.0 {
        return 0.0;
    }
    (dot(gradient, &d) / (l * dd)).clamp(0.0, 1.0)
}

/// Convex weights over an indexed atom list. Index 0 is `x₀`, index `i` is
/// `z_i`; weights of unused atoms are kept at zero so indices stay aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSet {
    weights: Vec<f64>,
}

impl ActiveSet {
    /// All mass on the starting point.
    pub fn new() -> Self {
        Self { weights: vec![1.0] }
    }

    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.is_empty() || weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::DegenerateActiveSet("weights must be finite and nonnegative"));
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::DegenerateActiveSet("weights must sum to one"));
        }
        if weights.iter().all(|&w| w == 0.0) {
            return Err(Error::DegenerateActiveSet("no active atom"));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights.iter().enumerate().filter(|(_, &w)| w > 0.0).map(|(i, _)| i)
    }

    pub fn active_count(&self) -> usize {
        self.active().count()
    }

    /// Register a new atom with zero weight.
    pub fn push_atom(&mut self) {
        self.weights.push(0.0);
    }

    /// `x ← (1−θ)x + θ·a_j`.
    pub fn toward(&mut self, j: usize, theta: f64) {
        for w in &mut self.weights {
            *w *= 1.0 - theta;
        }
        self.weights[j] += theta;
        self.prune();
    }

    /// `x ← (1+θ)x − θ·a_j`, valid for `θ ≤ w_j/(1 − w_j)`.
    pub fn away_from(&mut self, j: usize, theta: f64) {
        for w in &mut self.weights {
            *w *= 1.0 + theta;
        }
        self.weights[j] -= theta;
        self.prune();
    }

    /// Move `θ ≤ w_from` of mass from one atom to another.
    pub fn transfer(&mut self, from: usize, to: usize, theta: f64) {
        self.weights[from] -= theta;
        self.weights[to] += theta;
        self.prune();
    }

    /// Largest away step that keeps the weights nonnegative.
    pub fn away_cap(&self, j: usize) -> f64 {
        let w = self.weights[j];
        if w >= 1.0 {
            0.0
        } else {
            w / (1.0 - w)
        }
    }

    /// Active atom maximizing `⟨g, a⟩`; ties go to the lowest index.
    pub fn worst_atom(&self, atoms: &[Vec<f64>], gradient: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in self.active() {
            let v = dot(gradient, &atoms[j]);
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((j, v));
            }
        }
        best.map(|(j, _)| j)
    }

    pub fn combine(&self, atoms: &[Vec<f64>]) -> Vec<f64> {
        let d = atoms.first().map_or(0, Vec::len);
        let mut x = vec![0.0; d];
        for (w, a) in self.weights.iter().zip(atoms) {
            if *w != 0.0 {
                for (xi, ai) in x.iter_mut().zip(a) {
                    *xi += w * ai;
                }
            }
        }
        x
    }

    fn prune(&mut self) {
        for w in &mut self.weights {
            if *w < DROP_THRESHOLD {
                *w = 0.0;
            }
        }
        let total: f64 = self.weights.iter().sum();
        for w in &mut self.weights {
            *w /= total;
        }
    }
}

impl Default for ActiveSet {
    fn default() -> Self {
        Self::new()
    }
}

/// `m(y) = ⟨g, y − x⟩ + (L/2)‖y − x‖²`, the upper model at `x` (exact, up
/// to the constant `f(x)`, for the isotropic quadratics used here).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticModel {
    pub anchor: Vec<f64>,
    pub gradient: Vec<f64>,
    pub l: f64,
}

impl QuadraticModel {
    pub fn value(&self, y: &[f64]) -> f64 {
        let d = sub(y, &self.anchor);
        dot(&self.gradient, &d) + 0.5 * self.l * dot(&d, &d)
    }

    pub fn gradient_at(&self, y: &[f64]) -> Vec<f64> {
        self.gradient
            .iter()
            .zip(y.iter().zip(&self.anchor))
            .map(|(g, (yi, ai))| g + self.l * (yi - ai))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectiveResult {
    pub point: Vec<f64>,
    pub weights: ActiveSet,
    pub inner_iterations: usize,
    /// Model values, starting with the initial point.
    pub model_trace: Vec<f64>,
}

/// Minimize the model over the hull of `atoms` by conditional gradient on the
/// weights, starting from `start`.
pub fn fully_corrective_step(
    atoms: &[Vec<f64>],
    start: ActiveSet,
    model: &QuadraticModel,
    inner_budget: usize,
) -> Result<CorrectiveResult> {
    if atoms.is_empty() {
        return Err(Error::DegenerateActiveSet("fully corrective step needs at least one atom"));
    }
    if start.len() != atoms.len() {
        return Err(Error::DimensionMismatch { expected: atoms.len(), actual: start.len() });
    }
    let mut weights = start;
    let mut y = weights.combine(atoms);
    let mut trace = vec![model.value(&y)];
    let mut iterations = 0;
    while iterations < inner_budget {
        let g = model.gradient_at(&y);
        let (j, _) = atoms
            .iter()
            .enumerate()
            .map(|(j, a)| (j, dot(&g, a)))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        let d = sub(&y, &atoms[j]);
        let gap = dot(&g, &d);
        if gap <= INNER_GAP_TOLERANCE {
            break;
        }
        let theta = (gap / (model.l * dot(&d, &d))).clamp(0.0, 1.0);
        weights.toward(j, theta);
        y = weights.combine(atoms);
        trace.push(model.value(&y));
        iterations += 1;
    }
    Ok(CorrectiveResult { point: y, weights, inner_iterations: iterations, model_trace: trace })
}
