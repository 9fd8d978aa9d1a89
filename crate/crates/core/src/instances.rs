//! Hard problem instances.
//!
//! The base feasible region is the weighted ball
//!
//! ```text
//! S = { x : ½‖x‖² + Σ_i w_{π(i)} |x_i| ≤ C² },   C = 1/(α·sqrt(d² + d + 2)),   w_k = C·sqrt(2k)
//! ```
//!
//! which is the intersection of the `2^d` balls `‖x + s∘w‖ ≤ 1/α`. Weights are
//! stored once in ascending rank order; a [`Permutation`] maps coordinates to
//! ranks so the base set and every permuted copy share one representation.
//! Rescaling by `α` keeps the same functional form, so every formula in this
//! crate is written for an arbitrary `α`.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lmo;
use crate::roots::{bisect, MAX_BISECTION_ITERATIONS};
use crate::vector;

/// Relative residual at which scalar root-finders stop.
pub const ROOT_TOLERANCE: f64 = 1e-12;

/// A bijection from coordinates to weight ranks, both 0-based in memory.
/// Serialized as the list of 1-based ranks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(d: usize) -> Self {
        Self((0..d).collect())
    }

    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        let d = ranks.len();
        let mut seen = vec![false; d];
        for &r in &ranks {
            if r >= d {
                return Err(Error::InvalidPermutation(format!("rank {r} out of range for d = {d}")));
            }
            if std::mem::replace(&mut seen[r], true) {
                return Err(Error::InvalidPermutation(format!("rank {r} appears twice")));
            }
        }
        Ok(Self(ranks))
    }

    /// Build from 1-based ranks, the convention used in serialized documents.
    pub fn from_one_based(ranks: &[usize]) -> Result<Self> {
        if ranks.contains(&0) {
            return Err(Error::InvalidPermutation("1-based ranks cannot contain 0".into()));
        }
        Self::new(ranks.iter().map(|r| r - 1).collect())
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|r| r + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rank(&self, coordinate: usize) -> usize {
        self.0[coordinate]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &r)| i == r)
    }

    /// The coordinate carrying `rank`.
    pub fn coordinate_of_rank(&self, rank: usize) -> Option<usize> {
        self.0.iter().position(|&r| r == rank)
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let ranks = Vec::<usize>::deserialize(deserializer)?;
        Self::from_one_based(&ranks).map_err(serde::de::Error::custom)
    }
}

/// The strongly convex weighted ball, optionally with permuted weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedBallSet {
    d: usize,
    alpha: f64,
    c: f64,
    weights: Vec<f64>,
    weight_sum: f64,
    perm: Option<Permutation>,
}

impl WeightedBallSet {
    /// The unit (`α = 1`) construction.
    pub fn new(d: usize) -> Result<Self> {
        Self::scaled(d, 1.0)
    }

    /// The construction rescaled to be `α`-strongly convex, i.e. `S / α`.
    pub fn scaled(d: usize, alpha: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension { d, reason: "the weighted ball needs d >= 1" });
        }
        check_positive("alpha", alpha)?;
        let df = d as f64;
        let c = 1.0 / (df * df + df + 2.0).sqrt() / alpha;
        let weights: Vec<f64> = (1..=d).map(|k| c * (2.0 * k as f64).sqrt()).collect();
        let weight_sum = weights.iter().sum();
        Ok(Self { d, alpha, c, weights, weight_sum, perm: None })
    }

    /// The same set with coordinates carrying the weights ranked by `perm`.
    pub fn with_permutation(&self, perm: Permutation) -> Result<Self> {
        if perm.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, actual: perm.len() });
        }
        let perm = if perm.is_identity() { None } else { Some(perm) };
        Ok(Self { perm, ..self.clone() })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn c_squared(&self) -> f64 {
        self.c * self.c
    }

    /// Weights in ascending rank order: `weights()[k] = C·sqrt(2(k+1))`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight_sum(&self) -> f64 {
        self.weight_sum
    }

    /// Radius of the shifted balls whose intersection is this set.
    pub fn ball_radius(&self) -> f64 {
        1.0 / self.alpha
    }

    pub fn permutation(&self) -> Option<&Permutation> {
        self.perm.as_ref()
    }

    /// The permutation, materialized even when it is the identity.
    pub fn permutation_or_identity(&self) -> Permutation {
        self.perm.clone().unwrap_or_else(|| Permutation::identity(self.d))
    }

    pub fn rank_of(&self, coordinate: usize) -> usize {
        self.perm.as_ref().map_or(coordinate, |p| p.rank(coordinate))
    }

    /// `w_{π(i)}` for coordinate `i`.
    pub fn coordinate_weight(&self, coordinate: usize) -> f64 {
        self.weights[self.rank_of(coordinate)]
    }

    pub fn coordinate_weights(&self) -> Vec<f64> {
        (0..self.d).map(|i| self.coordinate_weight(i)).collect()
    }

    /// `2C(2 − √2)`, attained along the coordinate with the smallest weight.
    pub fn diameter(&self) -> f64 {
        2.0 * self.c * (2.0 - SQRT_2)
    }

    /// The antipodal boundary points `±C(2 − √2)·e_j`, `j` the rank-1 coordinate.
    pub fn diameter_attaining_points(&self) -> [Vec<f64>; 2] {
        let j = self.perm.as_ref().map_or(0, |p| p.coordinate_of_rank(0).unwrap_or(0));
        let r = self.c * (2.0 - SQRT_2);
        let mut plus = vec![0.0; self.d];
        let mut minus = vec![0.0; self.d];
        plus[j] = r;
        minus[j] = -r;
        [plus, minus]
    }
}

/// Unique positive root of `½dν² + Wν = C²`, in rationalized form.
pub fn compute_nu(set: &WeightedBallSet) -> f64 {
    let d = set.dim() as f64;
    let w = set.weight_sum();
    let c2 = set.c_squared();
    2.0 * c2 / (w + (w * w + 2.0 * d * c2).sqrt())
}

/// `f(x) = (L/2)‖x − x⋆‖²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticObjective {
    #[serde(rename = "L")]
    l: f64,
    x_star: Vec<f64>,
}

impl QuadraticObjective {
    pub fn new(l: f64, x_star: Vec<f64>) -> Result<Self> {
        check_positive("L", l)?;
        Ok(Self { l, x_star })
    }

    pub fn smoothness(&self) -> f64 {
        self.l
    }

    pub fn minimizer(&self) -> &[f64] {
        &self.x_star
    }

    pub fn dim(&self) -> usize {
        self.x_star.len()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.l * vector::distance(x, &self.x_star).powi(2)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.x_star).map(|(xi, si)| self.l * (xi - si)).collect()
    }
}

/// The weighted ball with the quadratic whose minimizer `ν·1` sits on its boundary.
#[derive(Debug, Clone)]
pub struct HardInstance {
    pub set: WeightedBallSet,
    pub objective: QuadraticObjective,
    pub nu: f64,
}

impl HardInstance {
    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn diameter(&self) -> f64 {
        self.set.diameter()
    }

    /// `f(x) − min_S f`; the minimum is zero since `x⋆ ∈ S`.
    pub fn gap(&self, x: &[f64]) -> f64 {
        self.objective.value(x)
    }
}

/// Build the unit instance and rescale it to `L`-smooth objective and
/// `α`-strongly convex set via `x ↦ x/α`, `f̃(x) = (L/α²) f(αx)`.
pub fn build_hard_instance(d: usize, l: f64, alpha: f64) -> Result<HardInstance> {
    check_positive("L", l)?;
    let set = WeightedBallSet::scaled(d, alpha)?;
    // The rescaled set has the same functional form, so its boundary scalar is ν/α.
    let nu = compute_nu(&set);
    let objective = QuadraticObjective::new(l, vec![nu; d])?;
    Ok(HardInstance { set, objective, nu })
}

/// The family `{(f, S_π)}` over all permutations π, sharing one objective.
#[derive(Debug, Clone)]
pub struct PermutedFamily {
    base_set: WeightedBallSet,
    rho: f64,
    shift: f64,
    l: f64,
}

/// `Σ_i [½ρ²(w_d − w_i)² + ρ w_i (w_d − w_i)]`, increasing in `ρ > 0`.
pub fn rho_polynomial(set: &WeightedBallSet, rho: f64) -> f64 {
    let w = set.weights();
    let wd = w[w.len() - 1];
    w.iter()
        .map(|&wi| {
            let gap = wd - wi;
            0.5 * rho * rho * gap * gap + rho * wi * gap
        })
        .sum()
}

/// Unit permuted family (`L = α = 1`).
pub fn build_permuted_family(d: usize) -> Result<PermutedFamily> {
    PermutedFamily::scaled(d, 1.0, 1.0)
}

impl PermutedFamily {
    pub fn scaled(d: usize, l: f64, alpha: f64) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidDimension { d, reason: "the permuted family needs d >= 3" });
        }
        check_positive("L", l)?;
        let base_set = WeightedBallSet::scaled(d, alpha)?;
        let c2 = base_set.c_squared();
        let root = bisect(
            |rho| rho_polynomial(&base_set, rho) - c2,
            0.0,
            1.0,
            ROOT_TOLERANCE * c2,
            MAX_BISECTION_ITERATIONS,
        );
        let rho = root.point;
        let wd = base_set.weights()[d - 1];
        let shift = rho / (1.0 - rho) * wd;
        Ok(Self { base_set, rho, shift, l })
    }

    pub fn dim(&self) -> usize {
        self.base_set.dim()
    }

    pub fn base_set(&self) -> &WeightedBallSet {
        &self.base_set
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `M = ρ/(1−ρ)·w_d`, the common unconstrained minimizer `M·1`.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn smoothness(&self) -> f64 {
        self.l
    }

    pub fn diameter(&self) -> f64 {
        self.base_set.diameter()
    }

    /// `f(x) = (L/2)‖x − M·1‖²`. Depends on the family only through `M`.
    pub fn objective(&self) -> QuadraticObjective {
        QuadraticObjective { l: self.l, x_star: vec![self.shift; self.dim()] }
    }

    pub fn permuted_set(&self, perm: &Permutation) -> Result<WeightedBallSet> {
        self.base_set.with_permutation(perm.clone())
    }

    /// `x_i = ρ(w_d − w_{π(i)})`, the minimizer of `f` over `S_π`.
    pub fn optimum_for_permutation(&self, perm: &Permutation) -> Result<Vec<f64>> {
        let d = self.dim();
        if perm.len() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: perm.len() });
        }
        let w = self.base_set.weights();
        let wd = w[d - 1];
        Ok(perm.as_slice().iter().map(|&r| self.rho * (wd - w[r])).collect())
    }

    /// `min_{S_π} f`, the same for every π since the optima are permutations
    /// of one another.
    pub fn optimal_value(&self) -> f64 {
        let w = self.base_set.weights();
        let wd = w[w.len() - 1];
        let sq: f64 = w.iter().map(|&wi| (self.rho * (wd - wi) - self.shift).powi(2)).sum();
        0.5 * self.l * sq
    }

    /// Largest violation of `x − M·1 + γ(x + ζ) = 0` with `γ = ρ/(1−ρ)` and
    /// `ζ ∈ ∂(Σ w_{π(i)}|x_i|)`, measured coordinatewise.
    pub fn stationarity_residual(&self, perm: &Permutation, x: &[f64]) -> f64 {
        let gamma = self.rho / (1.0 - self.rho);
        let w = self.base_set.weights();
        x.iter()
            .zip(perm.as_slice())
            .map(|(&xi, &r)| {
                let wi = w[r];
                if xi != 0.0 {
                    (xi - self.shift + gamma * (xi + xi.signum() * wi)).abs()
                } else {
                    // ζ_i is pinned by stationarity; it must lie in [−w_i, w_i].
                    let zeta = self.shift / gamma;
                    (zeta.abs() - wi).max(0.0)
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Base of a Minkowski-sum smoothing `S + B(0, 1/β)`.
#[derive(Debug, Clone, PartialEq)]
pub enum SmoothedBase {
    /// `{x ≥ 0, Σx_i ≤ 1}`
    Simplex { d: usize },
    WeightedBall(WeightedBallSet),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseKind {
    Simplex,
    WeightedBall,
}

impl SmoothedBase {
    pub fn kind(&self) -> BaseKind {
        match self {
            SmoothedBase::Simplex { .. } => BaseKind::Simplex,
            SmoothedBase::WeightedBall(_) => BaseKind::WeightedBall,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SmoothedBase::Simplex { d } => *d,
            SmoothedBase::WeightedBall(s) => s.dim(),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            SmoothedBase::Simplex { d: 1 } => 1.0,
            SmoothedBase::Simplex { .. } => SQRT_2,
            SmoothedBase::WeightedBall(s) => s.diameter(),
        }
    }

    /// Euclidean distance from `x` to the base set.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        match self {
            SmoothedBase::Simplex { d } => {
                check_dim(*d, x)?;
                Ok(vector::distance(x, &lmo::project_onto_simplex(x)))
            }
            SmoothedBase::WeightedBall(s) => Ok(lmo::project_onto_weighted_ball(s, x)?.distance),
        }
    }
}

/// A base set smoothed by a ball of radius `1/β`, with `x⋆ = tail_value·1`
/// on the boundary of the sum.
#[derive(Debug, Clone)]
pub struct SmoothedInstance {
    pub base: SmoothedBase,
    pub beta: f64,
    pub objective: QuadraticObjective,
    pub tail_value: f64,
}

impl SmoothedInstance {
    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn diameter(&self) -> f64 {
        self.base.diameter() + 2.0 / self.beta
    }

    pub fn distance_to_base(&self, x: &[f64]) -> Result<f64> {
        self.base.distance(x)
    }

    /// Membership in `S + B(0, 1/β)` with relative slack `tol` on the radius.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        Ok(self.distance_to_base(x)? <= (1.0 + tol) / self.beta)
    }

    /// `f(x) − min f`; zero at `x⋆`, which lies in the set.
    pub fn gap(&self, x: &[f64]) -> f64 {
        self.objective.value(x)
    }
}

pub fn build_smoothed_instance(kind: BaseKind, d: usize, beta: f64) -> Result<SmoothedInstance> {
    check_positive("beta", beta)?;
    let (base, tail_value) = match kind {
        BaseKind::Simplex => {
            if d == 0 {
                return Err(Error::InvalidDimension { d, reason: "the simplex needs d >= 1" });
            }
            let df = d as f64;
            (SmoothedBase::Simplex { d }, 1.0 / df + 1.0 / (beta * df.sqrt()))
        }
        BaseKind::WeightedBall => {
            let set = WeightedBallSet::new(d)?;
            let nu_beta = compute_nu_beta(&set, beta)?;
            (SmoothedBase::WeightedBall(set), nu_beta)
        }
    };
    let objective = QuadraticObjective::new(1.0, vec![tail_value; d])?;
    Ok(SmoothedInstance { base, beta, objective, tail_value })
}

/// The `η > ν` at which `dist(η·1, S) = 1/β`, by bisection on the
/// increasing distance map.
pub fn compute_nu_beta(set: &WeightedBallSet, beta: f64) -> Result<f64> {
    check_positive("beta", beta)?;
    let d = set.dim();
    let target = 1.0 / beta;
    let nu = compute_nu(set);
    let dist = |eta: f64| -> f64 {
        lmo::project_onto_weighted_ball(set, &vec![eta; d])
            .map(|p| p.distance)
            .unwrap_or(f64::NAN)
    };
    let mut step = target;
    let mut hi = nu + step;
    while dist(hi) < target {
        step *= 2.0;
        hi = nu + step;
    }
    let root = bisect(|eta| dist(eta) - target, nu, hi, ROOT_TOLERANCE * target, MAX_BISECTION_ITERATIONS);
    Ok(root.point)
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason: "must be positive and finite" })
    }
}

pub(crate) fn check_dim(expected: usize, x: &[f64]) -> Result<()> {
    if x.len() == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual: x.len() })
    }
}

/// Serialized form of any instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub kind: InstanceKind,
    pub d: usize,
    #[serde(rename = "C", skip_serializing_if = "Option::is_none", default)]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub w: Option<Vec<f64>>,
    /// 1-based weight rank of each coordinate.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub perm: Option<Vec<usize>>,
    #[serde(rename = "L")]
    pub l: f64,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rho: Option<f64>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none", default)]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub base: Option<BaseKind>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tail_value: Option<f64>,
    pub diameter: f64,
    pub x_star: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    Ball,
    Permuted,
    Smoothed,
}

/// Any constructed instance, as exchanged through documents.
#[derive(Debug, Clone)]
pub enum Instance {
    Ball(HardInstance),
    Permuted { family: PermutedFamily, perm: Permutation },
    Smoothed(SmoothedInstance),
}

impl Instance {
    pub fn to_document(&self) -> InstanceDocument {
        match self {
            Instance::Ball(h) => InstanceDocument {
                kind: InstanceKind::Ball,
                d: h.dim(),
                c: Some(h.set.c()),
                w: Some(h.set.weights().to_vec()),
                perm: Some(h.set.permutation_or_identity().to_one_based()),
                l: h.objective.smoothness(),
                alpha: h.set.alpha(),
                nu: Some(h.nu),
                rho: None,
                m: None,
                beta: None,
                base: None,
                tail_value: None,
                diameter: h.diameter(),
                x_star: h.objective.minimizer().to_vec(),
            },
            Instance::Permuted { family, perm } => InstanceDocument {
                kind: InstanceKind::Permuted,
                d: family.dim(),
                c: Some(family.base_set().c()),
                w: Some(family.base_set().weights().to_vec()),
                perm: Some(perm.to_one_based()),
                l: family.smoothness(),
                alpha: family.base_set().alpha(),
                nu: None,
                rho: Some(family.rho()),
                m: Some(family.shift()),
                beta: None,
                base: None,
                tail_value: None,
                diameter: family.diameter(),
                x_star: family.objective().minimizer().to_vec(),
            },
            Instance::Smoothed(s) => {
                let ball = match &s.base {
                    SmoothedBase::WeightedBall(b) => Some(b),
                    SmoothedBase::Simplex { .. } => None,
                };
                InstanceDocument {
                    kind: InstanceKind::Smoothed,
                    d: s.dim(),
                    c: ball.map(|b| b.c()),
                    w: ball.map(|b| b.weights().to_vec()),
                    perm: None,
                    l: s.objective.smoothness(),
                    alpha: ball.map_or(1.0, |b| b.alpha()),
                    nu: ball.map(compute_nu),
                    rho: None,
                    m: None,
                    beta: Some(s.beta),
                    base: Some(s.base.kind()),
                    tail_value: Some(s.tail_value),
                    diameter: s.diameter(),
                    x_star: s.objective.minimizer().to_vec(),
                }
            }
        }
    }

    /// Rebuild from the document's parameters and check its stored values.
    pub fn from_document(doc: &InstanceDocument) -> Result<Self> {
        let instance = match doc.kind {
            InstanceKind::Ball => {
                let mut h = build_hard_instance(doc.d, doc.l, doc.alpha)?;
                if let Some(p) = &doc.perm {
                    h.set = h.set.with_permutation(Permutation::from_one_based(p)?)?;
                }
                Instance::Ball(h)
            }
            InstanceKind::Permuted => {
                let family = PermutedFamily::scaled(doc.d, doc.l, doc.alpha)?;
                let perm = match &doc.perm {
                    Some(p) => Permutation::from_one_based(p)?,
                    None => Permutation::identity(doc.d),
                };
                if perm.len() != doc.d {
                    return Err(Error::DimensionMismatch { expected: doc.d, actual: perm.len() });
                }
                Instance::Permuted { family, perm }
            }
            InstanceKind::Smoothed => {
                let beta = doc.beta.ok_or_else(|| Error::InstanceMismatch("smoothed instance without beta".into()))?;
                let kind = doc.base.unwrap_or(BaseKind::WeightedBall);
                Instance::Smoothed(build_smoothed_instance(kind, doc.d, beta)?)
            }
        };
        let rebuilt = instance.to_document();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300);
        if let (Some(a), Some(b)) = (doc.c, rebuilt.c) {
            if !close(a, b) {
                return Err(Error::InstanceMismatch(format!("stored C = {a} but parameters give {b}")));
            }
        }
        if doc.x_star.len() != rebuilt.x_star.len() {
            return Err(Error::DimensionMismatch { expected: rebuilt.x_star.len(), actual: doc.x_star.len() });
        }
        Ok(instance)
    }

    pub fn dim(&self) -> usize {
        match self {
            Instance::Ball(h) => h.dim(),
            Instance::Permuted { family, .. } => family.dim(),
            Instance::Smoothed(s) => s.dim(),
        }
    }
}
