//! Right-hand sides of the lower-bound theorems.
//!
//! Each bound is evaluated with the diameter of the set it is stated for,
//! computed here from the construction rather than passed in.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{PermutedFamily, WeightedBallSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    /// Resisting oracle, any deterministic method, `d = 2(T+1)`.
    T1,
    /// Span methods on the weighted ball, every `t ≤ d − 1`.
    #[serde(rename = "T2_perIter")]
    T2PerIter,
    /// Span methods on the weighted ball, `d = 2(T+1)`.
    #[serde(rename = "T2_final")]
    T2Final,
    /// Smoothed simplex, every `t ≤ d − 1`.
    #[serde(rename = "T4_perIter")]
    T4PerIter,
    /// Smoothed simplex, `d = 2T`.
    #[serde(rename = "T4_final")]
    T4Final,
    /// Smoothed weighted ball, every `t ≤ d − 1`.
    #[serde(rename = "T5_perIter")]
    T5PerIter,
    /// Smoothed weighted ball, `d = 2(T+1)`.
    #[serde(rename = "T5_final")]
    T5Final,
}

impl TheoremId {
    pub fn label(&self) -> &'static str {
        match self {
            TheoremId::T1 => "T1",
            TheoremId::T2PerIter => "T2_perIter",
            TheoremId::T2Final => "T2_final",
            TheoremId::T4PerIter => "T4_perIter",
            TheoremId::T4Final => "T4_final",
            TheoremId::T5PerIter => "T5_perIter",
            TheoremId::T5Final => "T5_final",
        }
    }

    pub fn is_per_iteration(&self) -> bool {
        matches!(self, TheoremId::T2PerIter | TheoremId::T4PerIter | TheoremId::T5PerIter)
    }

    /// Dimension the final-form bound is stated in.
    pub fn final_dimension(&self, budget: usize) -> Option<usize> {
        match self {
            TheoremId::T1 | TheoremId::T2Final | TheoremId::T5Final => Some(2 * (budget + 1)),
            TheoremId::T4Final => Some(2 * budget),
            _ => None,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Parameters of one bound. Per-iteration bounds use `d` and `t`; final
/// bounds use the budget `t = T` and derive `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub theorem: TheoremId,
    pub d: Option<usize>,
    pub t: Option<usize>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

impl BoundSpec {
    fn empty(theorem: TheoremId) -> Self {
        Self { theorem, d: None, t: None, l: None, alpha: None, beta: None }
    }

    pub fn t1(budget: usize, l: f64, alpha: f64) -> Self {
        Self { t: Some(budget), l: Some(l), alpha: Some(alpha), ..Self::empty(TheoremId::T1) }
    }

    pub fn t2_per_iter(d: usize, t: usize, l: f64, alpha: f64) -> Self {
        Self { d: Some(d), t: Some(t), l: Some(l), alpha: Some(alpha), ..Self::empty(TheoremId::T2PerIter) }
    }

    pub fn t2_final(budget: usize, l: f64, alpha: f64) -> Self {
        Self { t: Some(budget), l: Some(l), alpha: Some(alpha), ..Self::empty(TheoremId::T2Final) }
    }

    pub fn t4_per_iter(d: usize, t: usize, beta: f64) -> Self {
        Self { d: Some(d), t: Some(t), beta: Some(beta), ..Self::empty(TheoremId::T4PerIter) }
    }

    pub fn t4_final(budget: usize, beta: f64) -> Self {
        Self { t: Some(budget), beta: Some(beta), ..Self::empty(TheoremId::T4Final) }
    }

    pub fn t5_per_iter(d: usize, t: usize, beta: f64) -> Self {
        Self { d: Some(d), t: Some(t), beta: Some(beta), ..Self::empty(TheoremId::T5PerIter) }
    }

    pub fn t5_final(budget: usize, beta: f64) -> Self {
        Self { t: Some(budget), beta: Some(beta), ..Self::empty(TheoremId::T5Final) }
    }

    /// The same theorem at another iteration index.
    pub fn at(&self, t: usize) -> Self {
        Self { t: Some(t), ..*self }
    }

    fn need<T: Copy>(&self, v: Option<T>, missing: &'static str) -> Result<T> {
        v.ok_or(Error::IncompleteBound { theorem: self.theorem.label(), missing })
    }

    /// Dimension of the instance this bound refers to.
    pub fn dimension(&self) -> Result<usize> {
        match self.theorem.final_dimension(self.need(self.t, "t")?) {
            Some(d) => Ok(d),
            None => self.need(self.d, "d"),
        }
    }

    /// Diameter of the set the bound is stated for.
    pub fn diameter(&self) -> Result<f64> {
        let d = self.dimension()?;
        Ok(match self.theorem {
            TheoremId::T1 => {
                PermutedFamily::scaled(d, self.need(self.l, "L")?, self.need(self.alpha, "alpha")?)?.diameter()
            }
            TheoremId::T2PerIter | TheoremId::T2Final => {
                WeightedBallSet::scaled(d, self.need(self.alpha, "alpha")?)?.diameter()
            }
            TheoremId::T4PerIter | TheoremId::T4Final => {
                simplex_diameter(d) + 2.0 / positive(self.need(self.beta, "beta")?, "beta")?
            }
            TheoremId::T5PerIter | TheoremId::T5Final => {
                WeightedBallSet::new(d)?.diameter() + 2.0 / positive(self.need(self.beta, "beta")?, "beta")?
            }
        })
    }
}

fn positive(v: f64, name: &'static str) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter { name, value: v, reason: "must be positive and finite" })
    }
}

fn simplex_diameter(d: usize) -> f64 {
    if d >= 2 {
        std::f64::consts::SQRT_2
    } else {
        1.0
    }
}

pub fn bound_value(spec: &BoundSpec) -> Result<f64> {
    let diam = spec.diameter()?;
    let d = spec.dimension()? as f64;
    let t = spec.need(spec.t, "t")?;
    let tf = t as f64;
    let sqrt2 = std::f64::consts::SQRT_2;
    if spec.theorem.is_per_iteration() && t > spec.dimension()? {
        return Err(Error::InvalidParameter { name: "t", value: tf, reason: "must not exceed d" });
    }
    if !spec.theorem.is_per_iteration() && t == 0 {
        return Err(Error::InvalidParameter { name: "T", value: 0.0, reason: "must be at least 1" });
    }
    let clamp_sq = |v: f64| v.max(0.0).powi(2);
    Ok(match spec.theorem {
        TheoremId::T1 => spec.need(spec.l, "L")? * diam * diam / (528.0 * (tf + 1.0).powi(2)),
        TheoremId::T2PerIter => 0.4 * (d - tf) * spec.need(spec.l, "L")? * diam * diam / (d + 2.0).powi(3),
        TheoremId::T2Final => spec.need(spec.l, "L")? * diam * diam / (20.0 * (tf + 2.0).powi(2)),
        TheoremId::T4PerIter => {
            let beta = spec.need(spec.beta, "beta")?;
            let base = diam - 2.0 / beta;
            clamp_sq(((d - tf) / 2.0).sqrt() * (base / (sqrt2 * d) + 1.0 / (beta * d.sqrt())) - 1.0 / (sqrt2 * beta))
        }
        TheoremId::T4Final => {
            let beta = spec.need(spec.beta, "beta")?;
            clamp_sq((diam - 2.0 / beta) / (4.0 * tf.sqrt()) - (sqrt2 - 1.0) / (2.0 * beta))
        }
        TheoremId::T5PerIter => {
            let beta = spec.need(spec.beta, "beta")?;
            let base = diam - 2.0 / beta;
            clamp_sq((0.4 * (d - tf) * base * base / (d + 2.0).powi(3)).sqrt() - 1.0 / (sqrt2 * beta))
        }
        TheoremId::T5Final => {
            let beta = spec.need(spec.beta, "beta")?;
            clamp_sq((diam - 2.0 / beta) / (20f64.sqrt() * (tf + 2.0)) - 1.0 / (sqrt2 * beta))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t2_final_example() {
        let spec = BoundSpec::t2_final(4, 1.0, 1.0);
        let diam = spec.diameter().unwrap();
        assert!((diam - 2.0 * (2.0 - 2f64.sqrt()) / 112f64.sqrt()).abs() <= 1e-15);
        let b = bound_value(&spec).unwrap();
        assert!((b - diam * diam / 720.0).abs() <= 1e-18);
        assert!((b - 1.70211e-5).abs() <= 1e-10);
    }

    #[test]
    fn per_iteration_bound_vanishes_at_t_equal_d() {
        assert_eq!(bound_value(&BoundSpec::t2_per_iter(6, 6, 1.0, 1.0)).unwrap(), 0.0);
        assert!(bound_value(&BoundSpec::t2_per_iter(6, 7, 1.0, 1.0)).is_err());
        assert_eq!(bound_value(&BoundSpec::t4_per_iter(6, 6, 10.0)).unwrap(), 0.0);
    }

    #[test]
    fn smoothed_bounds_clamp_for_small_beta() {
        assert_eq!(bound_value(&BoundSpec::t4_final(4, 0.5)).unwrap(), 0.0);
        assert_eq!(bound_value(&BoundSpec::t5_final(4, 10.0)).unwrap(), 0.0);
        assert!(bound_value(&BoundSpec::t4_final(4, 200.0)).unwrap() > 0.0);
        let beta = 200.0 / WeightedBallSet::new(10).unwrap().diameter();
        assert!(bound_value(&BoundSpec::t5_final(4, beta)).unwrap() > 0.0);
    }

    #[test]
    fn final_forms_follow_from_per_iteration_forms() {
        // T4 at d = 2T, t = T and T5 at d = 2(T+1), t = T dominate their final forms.
        for budget in [2usize, 4, 8] {
            for beta in [50.0, 500.0] {
                let f4 = bound_value(&BoundSpec::t4_final(budget, beta)).unwrap();
                let p4 = bound_value(&BoundSpec::t4_per_iter(2 * budget, budget, beta)).unwrap();
                assert!(p4 >= f4 - 1e-15);
                let f5 = bound_value(&BoundSpec::t5_final(budget, beta)).unwrap();
                let p5 = bound_value(&BoundSpec::t5_per_iter(2 * budget + 2, budget, beta)).unwrap();
                assert!(p5 >= f5 - 1e-15);
            }
            let f2 = bound_value(&BoundSpec::t2_final(budget, 1.0, 1.0)).unwrap();
            let p2 = bound_value(&BoundSpec::t2_per_iter(2 * budget + 2, budget, 1.0, 1.0)).unwrap();
            assert!(p2 >= f2 * (1.0 - 1e-14));
            assert!((p2 - f2).abs() <= 1e-14 * f2);
        }
    }

    #[test]
    fn rescaling_moves_the_bound_as_expected() {
        let unit = bound_value(&BoundSpec::t2_final(4, 1.0, 1.0)).unwrap();
        let scaled = bound_value(&BoundSpec::t2_final(4, 3.0, 2.0)).unwrap();
        assert!((scaled - 3.0 / 4.0 * unit).abs() <= 1e-18);
        let t1 = bound_value(&BoundSpec::t1(3, 1.0, 1.0)).unwrap();
        assert!(t1 > 0.0);
    }

    #[test]
    fn missing_parameters_are_reported() {
        let mut spec = BoundSpec::t2_final(4, 1.0, 1.0);
        spec.alpha = None;
        assert!(matches!(bound_value(&spec), Err(Error::IncompleteBound { missing: "alpha", .. })));
        let mut spec = BoundSpec::t4_final(4, 10.0);
        spec.t = None;
        assert!(matches!(bound_value(&spec), Err(Error::IncompleteBound { missing: "t", .. })));
        assert!(bound_value(&BoundSpec::t4_final(0, 10.0)).is_err());
    }

    #[test]
    fn theorem_ids_serialize_with_their_labels() {
        let s = serde_json::to_string(&BoundSpec::t2_per_iter(4, 1, 1.0, 1.0)).unwrap();
        assert!(s.contains("\"T2_perIter\""));
        assert!(s.contains("\"L\""));
    }
}
