//! The two criterion (i) sample sizes compared by the study, computed from
//! models fitted on a large independent "published" cohort.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::scenario::{generate_dataset, ScenarioSpec};
use crate::criteria::{criterion_one_direct, pair_requirement, PairEstimate, DEFAULT_SHRINKAGE};
use crate::error::Result;
use crate::glm::{cox_snell_from_lr, fit_binary, fit_multinomial, heuristic_shrinkage, Dataset};
use crate::rsq::adjust_apparent;

pub const DEFAULT_CALC_COHORT: usize = 500_000;

/// Sample size applying the closed form directly to the multinomial model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectSize {
    pub n: u64,
    pub raw: f64,
    pub lr: f64,
    pub r2_app: f64,
    pub s_vh: f64,
    pub r2_adj: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSize {
    pub k: usize,
    pub lr: f64,
    pub r2_app: f64,
    pub s_vh: f64,
    pub r2_adj: f64,
    /// Share of the cohort in `{1, k}`.
    pub omega: f64,
    pub events_raw: f64,
    pub n_raw: f64,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistinctSize {
    pub n: u64,
    pub pairs: Vec<PairSize>,
}

/// `N_MN` from an already generated cohort: `2 × 5 = 10` parameters,
/// shrinkage target 0.9.
pub fn n_mn_from_cohort(cohort: &Dataset) -> Result<DirectSize> {
    let fit = fit_multinomial(cohort)?;
    let n = cohort.n() as f64;
    let params = ((fit.k() - 1) * cohort.q()) as u32;
    let lr = fit.lr();
    let r2_app = cox_snell_from_lr(lr, n);
    let s_vh = heuristic_shrinkage(params, lr)?.value;
    let r2_adj = adjust_apparent(r2_app, s_vh)?;
    let size = criterion_one_direct(cohort.q() as u32, fit.k(), r2_adj, DEFAULT_SHRINKAGE)?;
    Ok(DirectSize {
        n: size.n,
        raw: size.raw,
        lr,
        r2_app,
        s_vh,
        r2_adj,
    })
}

/// `N_DL` from an already generated cohort: distinct logistic models for
/// `{1, 2}` and `{1, 3}`, five parameters each, scaled up by the share of
/// the cohort each model uses.
pub fn n_dl_from_cohort(cohort: &Dataset) -> Result<DistinctSize> {
    let total = cohort.n() as f64;
    let q = cohort.q() as u32;
    let mut pairs = Vec::new();
    for k in 2..=cohort.k() {
        let sub = cohort.pair_subset(k, 1);
        let fit = fit_binary(&sub)?;
        let m = sub.n() as f64;
        let lr = fit.lr();
        let r2_app = cox_snell_from_lr(lr, m);
        let s_vh = heuristic_shrinkage(q, lr)?.value;
        let r2_adj = adjust_apparent(r2_app, s_vh)?;
        let omega = m / total;
        let req = pair_requirement(&PairEstimate::new(k, 1, r2_adj, omega), q)?;
        pairs.push(PairSize {
            k,
            lr,
            r2_app,
            s_vh,
            r2_adj,
            omega,
            events_raw: req.events.raw,
            n_raw: req.cohort.raw,
            n: req.cohort.n,
        });
    }
    Ok(DistinctSize {
        n: pairs.iter().map(|p| p.n).max().unwrap_or(0),
        pairs,
    })
}

pub fn compute_n_mn<R: Rng + ?Sized>(spec: &ScenarioSpec, rng: &mut R) -> Result<DirectSize> {
    n_mn_from_cohort(&generate_dataset(spec, DEFAULT_CALC_COHORT, rng))
}

pub fn compute_n_dl<R: Rng + ?Sized>(spec: &ScenarioSpec, rng: &mut R) -> Result<DistinctSize> {
    n_dl_from_cohort(&generate_dataset(spec, DEFAULT_CALC_COHORT, rng))
}
