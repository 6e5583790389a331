//! Calibration slopes on validation data and pairwise concordance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glm::{maximize, BinaryObjective, MultinomialObjective, NewtonOptions, SubmodelDesign};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryCalibration {
    pub slope: f64,
    pub intercept: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn has_variance(values: impl Iterator<Item = f64> + Clone) -> bool {
    let mut it = values;
    match it.next() {
        Some(first) => it.any(|v| v != first),
        None => false,
    }
}

/// Logistic regression of `events` on `{1, lp}`; the slope is the
/// shrinkage factor the predictor needs on this data.
pub fn binary_calibration_slope(lp: &[f64], events: &[bool]) -> Result<BinaryCalibration> {
    if lp.len() != events.len() || lp.is_empty() {
        return Err(Error::Validation(format!(
            "{} linear predictors for {} outcomes",
            lp.len(),
            events.len()
        )));
    }
    if !has_variance(lp.iter().copied()) {
        return Err(Error::DegeneratePredictor);
    }
    let n_events = events.iter().filter(|&&e| e).count();
    if n_events == 0 {
        return Err(Error::DegenerateCategory { index: 2 });
    }
    if n_events == events.len() {
        return Err(Error::DegenerateCategory { index: 1 });
    }
    let design: Vec<f64> = lp.iter().flat_map(|&v| [1.0, v]).collect();
    let obj = BinaryObjective {
        design: &design,
        p: 2,
        events,
        offset: None,
    };
    let res = maximize(&obj, &calibration_options())?;
    Ok(BinaryCalibration {
        intercept: res.theta[0],
        slope: res.theta[1],
        converged: true,
        iterations: res.iterations,
    })
}

fn calibration_options() -> NewtonOptions {
    // slopes are unbounded in principle; only genuine divergence should trip this
    NewtonOptions {
        separation_bound: 1e3,
        ..NewtonOptions::default()
    }
}

/// Per-subject sub-model linear predictors `Σ β̂_{q,k} X_q` (row-major,
/// `K − 1` columns) with the observed categories.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPredictorSet {
    lp: Vec<f64>,
    k: usize,
    y: Vec<usize>,
}

impl LinearPredictorSet {
    pub fn new(lp: Vec<f64>, k: usize, y: Vec<usize>) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain("categories", k as f64, ">= 2"));
        }
        if lp.len() != y.len() * (k - 1) || y.is_empty() {
            return Err(Error::Validation(format!(
                "{} predictor values for {} subjects and {} sub-models",
                lp.len(),
                y.len(),
                k - 1
            )));
        }
        if let Some(&bad) = y.iter().find(|&&l| l == 0 || l > k) {
            return Err(Error::Validation(format!("label {bad} outside 1..={k}")));
        }
        Ok(Self { lp, k, y })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + Clone + '_ {
        self.lp.iter().skip(j).step_by(self.k - 1).copied()
    }

    pub fn labels(&self) -> &[usize] {
        &self.y
    }

    /// Every sub-model column multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            lp: self.lp.iter().map(|v| v * c).collect(),
            k: self.k,
            y: self.y.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecalibrationResult {
    /// `S_MN,k` for `k = 2..K`.
    pub slopes: Vec<f64>,
    /// `α*_{0,k}` for `k = 2..K`.
    pub intercepts: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Joint multinomial recalibration: sub-model `k` has linear predictor
/// `α_k + s_k · lp_k`, and `lp_k` enters no other sub-model.
pub fn multinomial_recalibration(lps: &LinearPredictorSet) -> Result<RecalibrationResult> {
    let m = lps.k - 1;
    let mut present = vec![false; lps.k];
    for &l in &lps.y {
        present[l - 1] = true;
    }
    if let Some(i) = present.iter().position(|p| !p) {
        return Err(Error::DegenerateCategory { index: i + 1 });
    }
    for j in 0..m {
        if !has_variance(lps.column(j)) {
            return Err(Error::DegeneratePredictor);
        }
    }
    let design: Vec<f64> = lps.lp.iter().flat_map(|&v| [1.0, v]).collect();
    let obj = MultinomialObjective {
        design: SubmodelDesign::PerSubmodel { x: &design, p: 2 },
        labels: &lps.y,
        k: lps.k,
    };
    let res = maximize(&obj, &calibration_options())?;
    Ok(RecalibrationResult {
        intercepts: res.theta.iter().step_by(2).copied().collect(),
        slopes: res.theta.iter().skip(1).step_by(2).copied().collect(),
        converged: true,
        iterations: res.iterations,
    })
}

/// Probability that a random positive outranks a random negative, ties
/// counted one half. `O(n log n)`.
pub fn concordance(scores: &[f64], positive: &[bool]) -> Result<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    concordance_sorted(&order, scores, positive)
}

/// As [`concordance`] given indices that sort `scores` ascending.
pub fn concordance_sorted(order: &[usize], scores: &[f64], positive: &[bool]) -> Result<f64> {
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 {
        return Err(Error::UndefinedConcordance(2));
    }
    if n_neg == 0 {
        return Err(Error::UndefinedConcordance(1));
    }
    let mut neg_below = 0u64;
    let mut wins = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let mut j = i;
        let (mut pos_tie, mut neg_tie) = (0u64, 0u64);
        while j < order.len() && scores[order[j]] == s {
            if positive[order[j]] {
                pos_tie += 1;
            } else {
                neg_tie += 1;
            }
            j += 1;
        }
        wins += pos_tie as f64 * (neg_below as f64 + 0.5 * neg_tie as f64);
        neg_below += neg_tie;
        i = j;
    }
    Ok(wins / (n_pos as f64 * n_neg as f64))
}

/// Pairwise C-statistic by the conditional risk method: subjects with
/// outcome `k` or `r` are scored by `P(k) / (P(k) + P(r))`.
///
/// `risks` is row-major `n × K`; categories are 1-based.
pub fn pairwise_cstat(risks: &[f64], y: &[usize], k: usize, r: usize) -> Result<f64> {
    if y.is_empty() || !risks.len().is_multiple_of(y.len()) {
        return Err(Error::Validation("risk matrix does not match outcomes".into()));
    }
    let kk = risks.len() / y.len();
    if k == 0 || r == 0 || k > kk || r > kk || k == r {
        return Err(Error::Validation(format!("invalid category pair {{{k},{r}}}")));
    }
    let mut scores = Vec::new();
    let mut positive = Vec::new();
    for (i, &label) in y.iter().enumerate() {
        let row = &risks[i * kk..(i + 1) * kk];
        let total: f64 = row.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::Validation(format!("risks of subject {i} sum to {total}")));
        }
        if label == k || label == r {
            let (pk, pr) = (row[k - 1], row[r - 1]);
            scores.push(if pk + pr > 0.0 { pk / (pk + pr) } else { 0.5 });
            positive.push(label == k);
        }
    }
    let n_pos = positive.iter().filter(|&&p| p).count();
    if n_pos == 0 {
        return Err(Error::UndefinedConcordance(k));
    }
    if n_pos == positive.len() {
        return Err(Error::UndefinedConcordance(r));
    }
    concordance(&scores, &positive)
}
