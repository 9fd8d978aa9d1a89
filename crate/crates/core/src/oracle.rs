//! The resisting oracle over the permuted family.
//!
//! The adversary fixes the weight permutation lazily. Each nonzero query
//! assigns the next-smallest weight to the unassigned coordinate of largest
//! query magnitude, then answers with the soft-threshold restricted to the
//! assigned coordinates. Unassigned coordinates stay exactly zero whatever
//! weights they later receive, so the answer is consistent with every
//! completion. After the run, [`ResistingOracle::complete_permutation`] picks
//! the completion that is worst for the final iterate.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{check_dim, Permutation, PermutedFamily};
use crate::lmo::{self, LmoResult};
use crate::vector;

/// Feasibility slack for the infeasible-or-large-gap dichotomy.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-10;

/// Relative excess of `|p_j|/λ` over the next weight that counts as a genuine
/// zero-chain violation rather than rounding.
const GUARD_SLACK: f64 = 1e-12;

/// One answered query. Ranks are 0-based in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryRecord {
    pub p: Vec<f64>,
    pub z: Vec<f64>,
    /// `None` for the zero query.
    pub lambda: Option<f64>,
    pub assigned_index: Option<usize>,
    pub assigned_rank: Option<usize>,
}

/// JSON form of a [`QueryRecord`]; `assignedRank` is 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QueryLogEntry {
    pub p: Vec<f64>,
    pub z: Vec<f64>,
    pub lambda: Option<f64>,
    pub assigned_index: Option<usize>,
    pub assigned_rank: Option<usize>,
}

impl From<&QueryRecord> for QueryLogEntry {
    fn from(r: &QueryRecord) -> Self {
        Self {
            p: r.p.clone(),
            z: r.z.clone(),
            lambda: r.lambda,
            assigned_index: r.assigned_index,
            assigned_rank: r.assigned_rank.map(|k| k + 1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResistingOracle {
    family: PermutedFamily,
    /// coordinate → rank, the partial permutation on the assigned set.
    assigned: BTreeMap<usize, usize>,
    log: Vec<QueryRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CompletionResult {
    pub pi_star: Permutation,
    pub x_final: Vec<f64>,
    pub feasible: bool,
    /// `f(x_T) − f(x⋆^{(π⋆)})`; meaningful only when `feasible`.
    pub gap: f64,
    /// `L·diam²/(528·(T+1)²)`
    pub certified_floor: f64,
    /// `(L/2)·Σ_{j∈U} ((x_T)_j − (x⋆^{(π⋆)})_j)²`, the quantity π⋆ maximizes.
    pub tail_bound: f64,
    /// The same quantity averaged over all completions.
    pub average_tail_bound: f64,
    /// `(L/2)·m·Var{ρ(w_d − w_k)}` over the unassigned ranks.
    pub variance_floor: f64,
    pub unassigned: usize,
    pub queries: usize,
}

impl ResistingOracle {
    pub fn new(family: PermutedFamily) -> Self {
        Self { family, assigned: BTreeMap::new(), log: Vec::new() }
    }

    pub fn family(&self) -> &PermutedFamily {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    /// The partial permutation on `K_t`, as coordinate → 0-based rank.
    pub fn assigned(&self) -> &BTreeMap<usize, usize> {
        &self.assigned
    }

    pub fn is_assigned(&self, coordinate: usize) -> bool {
        self.assigned.contains_key(&coordinate)
    }

    pub fn log(&self) -> &[QueryRecord] {
        &self.log
    }

    pub fn log_entries(&self) -> Vec<QueryLogEntry> {
        self.log.iter().map(QueryLogEntry::from).collect()
    }

    pub fn query(&mut self, p: &[f64]) -> Result<QueryRecord> {
        let d = self.dim();
        check_dim(d, p)?;
        if vector::is_zero(p) {
            let record = QueryRecord {
                p: p.to_vec(),
                z: vec![0.0; d],
                lambda: None,
                assigned_index: None,
                assigned_rank: None,
            };
            self.log.push(record.clone());
            return Ok(record);
        }

        let mut newly = None;
        if self.assigned.len() < d {
            let mut best: Option<(usize, f64)> = None;
            for (i, &v) in p.iter().enumerate() {
                if !self.assigned.contains_key(&i) && best.is_none_or(|(_, b)| v.abs() > b) {
                    best = Some((i, v.abs()));
                }
            }
            let (i_star, _) = best.expect("an unassigned coordinate exists");
            let rank = self.assigned.len();
            self.assigned.insert(i_star, rank);
            newly = Some((i_star, rank));
        }

        let answer = self.restricted_lmo(p)?;
        let record = QueryRecord {
            p: p.to_vec(),
            z: answer.z,
            lambda: Some(answer.lambda),
            assigned_index: newly.map(|(i, _)| i),
            assigned_rank: newly.map(|(_, r)| r),
        };
        self.log.push(record.clone());
        Ok(record)
    }

    /// Soft-threshold over the assigned coordinates, with every unassigned
    /// coordinate checked against the smallest weight it could still receive.
    fn restricted_lmo(&self, p: &[f64]) -> Result<LmoResult> {
        let d = self.dim();
        let w = self.family.base_set().weights();
        let c2 = self.family.base_set().c_squared();
        let coords: Vec<usize> = self.assigned.keys().copied().collect();
        let abs_p: Vec<f64> = coords.iter().map(|&i| p[i].abs()).collect();
        let weights: Vec<f64> = coords.iter().map(|&i| w[self.assigned[&i]]).collect();
        let mut lambda = lmo::solve_multiplier(&abs_p, &weights, c2).ok_or(Error::ZeroQuery)?;

        if let Some(&next_weight) = w.get(self.assigned.len()) {
            let guards: Vec<(usize, f64)> = (0..d)
                .filter(|i| !self.assigned.contains_key(i))
                .map(|i| (i, p[i].abs()))
                .collect();
            for &(j, ap) in &guards {
                let ratio = ap / lambda;
                if ratio > next_weight * (1.0 + GUARD_SLACK) {
                    return Err(Error::ZeroChainViolation { coordinate: j, ratio, weight: next_weight });
                }
            }
            lambda = lmo::settle_multiplier(lambda, guards.iter().map(|&(_, ap)| (ap, next_weight)))
                .ok_or(Error::ZeroChainViolation { coordinate: usize::MAX, ratio: f64::NAN, weight: next_weight })?;
        }

        let restricted = lmo::assemble(
            &coords.iter().map(|&i| p[i]).collect::<Vec<_>>(),
            &weights,
            lambda,
            c2,
        );
        let mut z = vec![0.0; d];
        for (k, &i) in coords.iter().enumerate() {
            z[i] = restricted.z[k];
        }
        Ok(LmoResult { z, lambda, constraint_residual: restricted.constraint_residual })
    }

    /// Complete π on the unassigned coordinates to maximize
    /// `Σ_{j∈U} ((x_T)_j − ρ(w_d − w_{π(j)}))²`.
    ///
    /// The sum equals `Σa² + Σb² − 2Σ a_j b_{π(j)}`, so the maximizer pairs the
    /// smallest entries of `x_T` with the largest remaining targets, which
    /// belong to the smallest remaining ranks.
    pub fn complete_permutation(&self, x_final: &[f64]) -> Result<CompletionResult> {
        let d = self.dim();
        check_dim(d, x_final)?;
        let mut unassigned: Vec<usize> = (0..d).filter(|i| !self.assigned.contains_key(i)).collect();
        unassigned.sort_by(|&a, &b| x_final[a].total_cmp(&x_final[b]).then(a.cmp(&b)));

        let mut ranks = vec![0; d];
        for (&i, &r) in &self.assigned {
            ranks[i] = r;
        }
        for (offset, &i) in unassigned.iter().enumerate() {
            ranks[i] = self.assigned.len() + offset;
        }
        let pi_star = Permutation::new(ranks)?;
        self.evaluate_completion(pi_star, x_final)
    }

    /// Score an arbitrary completion of the current partial permutation.
    pub fn evaluate_completion(&self, pi: Permutation, x_final: &[f64]) -> Result<CompletionResult> {
        let d = self.dim();
        check_dim(d, x_final)?;
        if let Some((&i, &r)) = self.assigned.iter().find(|(&i, &r)| pi.rank(i) != r) {
            return Err(Error::InvalidPermutation(format!(
                "completion moves assigned coordinate {i} off rank {}",
                r + 1
            )));
        }
        let family = &self.family;
        let l = family.smoothness();
        let set = family.permuted_set(&pi)?;
        let feasible = lmo::contains(&set, x_final, FEASIBILITY_TOLERANCE)?;
        let optimum = family.optimum_for_permutation(&pi)?;
        let gap = family.objective().value(x_final) - family.optimal_value();

        let unassigned: Vec<usize> = (0..d).filter(|i| !self.assigned.contains_key(i)).collect();
        let m = unassigned.len();
        let tail_bound = 0.5
            * l
            * unassigned
                .iter()
                .map(|&j| (x_final[j] - optimum[j]).powi(2))
                .sum::<f64>();

        let w = family.base_set().weights();
        let wd = w[d - 1];
        let targets: Vec<f64> = (self.assigned.len()..d).map(|k| family.rho() * (wd - w[k])).collect();
        let (average_tail_bound, variance_floor) = if m == 0 {
            (0.0, 0.0)
        } else {
            let mf = m as f64;
            let mean = targets.iter().sum::<f64>() / mf;
            let var = targets.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / mf;
            let spread: f64 = unassigned.iter().map(|&j| (x_final[j] - mean).powi(2)).sum();
            (0.5 * l * (spread + mf * var), 0.5 * l * mf * var)
        };

        let queries = self.log.len();
        let diam = family.diameter();
        let certified_floor = l * diam * diam / (528.0 * ((queries + 1) as f64).powi(2));
        Ok(CompletionResult {
            pi_star: pi,
            x_final: x_final.to_vec(),
            feasible,
            gap,
            certified_floor,
            tail_bound,
            average_tail_bound,
            variance_floor,
            unassigned: m,
            queries,
        })
    }

    /// Largest deviation between each logged answer and the full LMO over
    /// `S_π` for the completed permutation `pi`.
    pub fn replay(&self, pi: &Permutation) -> Result<f64> {
        let set = self.family.permuted_set(pi)?;
        let mut worst: f64 = 0.0;
        for record in &self.log {
            let full = match record.lambda {
                None => vec![0.0; self.dim()],
                Some(_) => lmo::lmo_weighted_ball(&set, &record.p)?.z,
            };
            let dev = full
                .iter()
                .zip(&record.z)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            worst = worst.max(dev);
        }
        Ok(worst)
    }
}
