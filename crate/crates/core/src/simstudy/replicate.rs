use rand::Rng;
use serde::{Deserialize, Serialize};

use super::scenario::{generate_dataset, ScenarioSpec};
use crate::calibration::{binary_calibration_slope, multinomial_recalibration, LinearPredictorSet};
use crate::error::{Error, Result};
use crate::glm::{fit_binary, fit_multinomial, heuristic_shrinkage, BinaryFit, Dataset, MultinomialFit};

/// The population cohort every replicate is validated on, with the
/// `{1, k}` subsets precomputed.
#[derive(Debug, Clone)]
pub struct ValidationCohort {
    pub data: Dataset,
    pairs: Vec<PairRows>,
}

#[derive(Debug, Clone)]
struct PairRows {
    rows: Vec<usize>,
    events: Vec<bool>,
}

impl ValidationCohort {
    pub fn new(data: Dataset) -> Self {
        let pairs = (2..=3)
            .map(|k| {
                let rows: Vec<usize> = (0..data.n())
                    .filter(|&i| data.labels()[i] == 1 || data.labels()[i] == k)
                    .collect();
                let events = rows.iter().map(|&i| data.labels()[i] == k).collect();
                PairRows { rows, events }
            })
            .collect();
        Self { data, pairs }
    }

    pub fn generate<R: Rng + ?Sized>(spec: &ScenarioSpec, n: usize, rng: &mut R) -> Self {
        Self::new(generate_dataset(spec, n, rng))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimand {
    SMn21,
    SMn31,
    SDl21,
    SDl31,
    SVhMn,
    SVhDl21,
    SVhDl31,
}

impl Estimand {
    pub const ALL: [Estimand; 7] = [
        Estimand::SMn21,
        Estimand::SMn31,
        Estimand::SDl21,
        Estimand::SDl31,
        Estimand::SVhMn,
        Estimand::SVhDl21,
        Estimand::SVhDl31,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Estimand::SMn21 => "s_mn_21",
            Estimand::SMn31 => "s_mn_31",
            Estimand::SDl21 => "s_dl_21",
            Estimand::SDl31 => "s_dl_31",
            Estimand::SVhMn => "s_vh_mn",
            Estimand::SVhDl21 => "s_vh_dl_21",
            Estimand::SVhDl31 => "s_vh_dl_31",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateResult {
    pub replicate: usize,
    pub s_mn_21: f64,
    pub s_mn_31: f64,
    pub s_dl_21: f64,
    pub s_dl_31: f64,
    pub s_vh_mn: f64,
    pub s_vh_dl_21: f64,
    pub s_vh_dl_31: f64,
    pub converged: bool,
    /// Why the replicate was excluded, if it was.
    pub failure: Option<String>,
}

impl ReplicateResult {
    fn failed(replicate: usize, why: &Error) -> Self {
        Self {
            replicate,
            s_mn_21: f64::NAN,
            s_mn_31: f64::NAN,
            s_dl_21: f64::NAN,
            s_dl_31: f64::NAN,
            s_vh_mn: f64::NAN,
            s_vh_dl_21: f64::NAN,
            s_vh_dl_31: f64::NAN,
            converged: false,
            failure: Some(why.to_string()),
        }
    }

    pub fn get(&self, e: Estimand) -> f64 {
        match e {
            Estimand::SMn21 => self.s_mn_21,
            Estimand::SMn31 => self.s_mn_31,
            Estimand::SDl21 => self.s_dl_21,
            Estimand::SDl31 => self.s_dl_31,
            Estimand::SVhMn => self.s_vh_mn,
            Estimand::SVhDl21 => self.s_vh_dl_21,
            Estimand::SVhDl31 => self.s_vh_dl_31,
        }
    }
}

struct DevelopmentFits {
    multinomial: MultinomialFit,
    distinct: [BinaryFit; 2],
}

fn fit_development(dev: &Dataset) -> Result<DevelopmentFits> {
    let multinomial = fit_multinomial(dev)?;
    let d2 = fit_binary(&dev.pair_subset(2, 1))?;
    let d3 = fit_binary(&dev.pair_subset(3, 1))?;
    Ok(DevelopmentFits {
        multinomial,
        distinct: [d2, d3],
    })
}

fn evaluate(replicate: usize, dev: &Dataset, validation: &ValidationCohort) -> Result<ReplicateResult> {
    if dev.k() < 3 || dev.category_counts().contains(&0) {
        return Err(Error::DegenerateCategory {
            index: dev
                .category_counts()
                .iter()
                .position(|&c| c == 0)
                .map_or(3, |i| i + 1),
        });
    }
    let fits = fit_development(dev)?;
    let q = dev.q() as u32;
    let s_vh_mn = heuristic_shrinkage(2 * q, fits.multinomial.lr())?.value;
    let s_vh_dl_21 = heuristic_shrinkage(q, fits.distinct[0].lr())?.value;
    let s_vh_dl_31 = heuristic_shrinkage(q, fits.distinct[1].lr())?.value;

    let v = &validation.data;
    let mut lp = Vec::with_capacity(v.n() * 2);
    for i in 0..v.n() {
        lp.extend(fits.multinomial.slope_predictors(v.row(i)));
    }
    let recal = multinomial_recalibration(&LinearPredictorSet::new(lp, 3, v.labels().to_vec())?)?;

    let mut s_dl = [0.0; 2];
    for (j, pair) in validation.pairs.iter().enumerate() {
        let fit = &fits.distinct[j];
        let lp: Vec<f64> = pair.rows.iter().map(|&i| fit.slope_predictor(v.row(i))).collect();
        s_dl[j] = binary_calibration_slope(&lp, &pair.events)?.slope;
    }

    Ok(ReplicateResult {
        replicate,
        s_mn_21: recal.slopes[0],
        s_mn_31: recal.slopes[1],
        s_dl_21: s_dl[0],
        s_dl_31: s_dl[1],
        s_vh_mn,
        s_vh_dl_21,
        s_vh_dl_31,
        converged: true,
        failure: None,
    })
}

/// One development draw of size `n`, fitted and calibrated on `validation`.
///
/// Failures (a missing category, separation, non-convergence) come back as
/// a flagged result rather than an error.
pub fn run_replicate<R: Rng + ?Sized>(
    spec: &ScenarioSpec,
    n: usize,
    validation: &ValidationCohort,
    replicate: usize,
    rng: &mut R,
) -> ReplicateResult {
    let dev = generate_dataset(spec, n, rng);
    evaluate_dataset(replicate, &dev, validation)
}

/// As [`run_replicate`] on a supplied development dataset.
pub fn evaluate_dataset(replicate: usize, dev: &Dataset, validation: &ValidationCohort) -> ReplicateResult {
    evaluate(replicate, dev, validation).unwrap_or_else(|e| ReplicateResult::failed(replicate, &e))
}
