//! Maximum-likelihood binary and multinomial logistic regression.
//!
//! Both models are fitted by Newton-Raphson with an analytic Hessian,
//! step-halving whenever the log-likelihood would decrease, and an all-zero
//! start. There is no penalisation. The multinomial objective also accepts
//! a separate design per sub-model, which is what the constrained
//! recalibration model in [`crate::calibration`] needs.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rsq;

/// Predictor matrix (row-major, no intercept column) and 1-based labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Vec<f64>,
    q: usize,
    y: Vec<usize>,
}

impl Dataset {
    pub fn new(x: Vec<f64>, q: usize, y: Vec<usize>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::Validation("dataset has no rows".into()));
        }
        if x.len() != y.len() * q {
            return Err(Error::Validation(format!(
                "predictor matrix has {} values, expected {} rows × {} columns",
                x.len(),
                y.len(),
                q
            )));
        }
        if y.contains(&0) {
            return Err(Error::Validation("labels are 1-based".into()));
        }
        Ok(Self { x, q, y })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.q..(i + 1) * self.q]
    }

    pub fn labels(&self) -> &[usize] {
        &self.y
    }

    pub fn k(&self) -> usize {
        self.y.iter().copied().max().unwrap_or(0)
    }

    /// Number of rows per category `1..=k`.
    pub fn category_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.k()];
        for &l in &self.y {
            counts[l - 1] += 1;
        }
        counts
    }

    /// Rows with outcome `k` or `r`, relabelled so `r → 1` and `k → 2`.
    pub fn pair_subset(&self, k: usize, r: usize) -> Dataset {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (i, &l) in self.y.iter().enumerate() {
            if l == k || l == r {
                x.extend_from_slice(self.row(i));
                y.push(if l == k { 2 } else { 1 });
            }
        }
        Dataset { x, q: self.q, y }
    }

    fn require_all_present(&self, k: usize) -> Result<Vec<u64>> {
        let counts = self.category_counts();
        if counts.len() < k {
            return Err(Error::DegenerateCategory { index: counts.len() + 1 });
        }
        match counts.iter().position(|&c| c == 0) {
            Some(i) => Err(Error::DegenerateCategory { index: i + 1 }),
            None => Ok(counts),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    pub score_tol: f64,
    pub rel_lnl_tol: f64,
    /// Coefficient magnitude beyond which a still-improving fit is
    /// declared separated.
    pub separation_bound: f64,
    pub rcond_min: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            score_tol: 1e-8,
            rel_lnl_tol: 1e-12,
            separation_bound: 15.0,
            rcond_min: 1e-12,
        }
    }
}

/// A concave log-likelihood with analytic derivatives.
pub(crate) trait Objective {
    fn dim(&self) -> usize;
    fn lnl(&self, theta: &[f64]) -> f64;
    /// Log-likelihood, score vector and negative Hessian (row-major).
    fn derivatives(&self, theta: &[f64]) -> (f64, Vec<f64>, Vec<f64>);
}

#[derive(Debug, Clone)]
pub(crate) struct NewtonResult {
    pub theta: Vec<f64>,
    pub lnl: f64,
    pub iterations: usize,
    pub score_norm: f64,
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub(crate) fn maximize(obj: &impl Objective, opts: &NewtonOptions) -> Result<NewtonResult> {
    let dim = obj.dim();
    let mut theta = vec![0.0; dim];
    let (mut lnl, mut grad, mut info) = obj.derivatives(&theta);
    for iter in 0..opts.max_iterations {
        let score_norm = max_norm(&grad);
        if score_norm < opts.score_tol {
            return Ok(NewtonResult { theta, lnl, iterations: iter, score_norm });
        }
        let mat = DMatrix::from_row_slice(dim, dim, &info);
        let chol = mat
            .cholesky()
            .ok_or(Error::SingularHessian { rcond: 0.0 })?;
        let l = chol.l_dirty();
        let (lo, hi) = (0..dim).fold((f64::INFINITY, 0.0f64), |(lo, hi), i| {
            let d = l[(i, i)].abs();
            (lo.min(d), hi.max(d))
        });
        let rcond = (lo / hi).powi(2);
        if !(rcond >= opts.rcond_min) {
            return Err(Error::SingularHessian { rcond });
        }
        let step = chol.solve(&DVector::from_column_slice(&grad));

        // the full step is evaluated with derivatives since it is nearly always kept
        let mut candidate: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + s).collect();
        let mut full = Some(obj.derivatives(&candidate));
        let mut cand_lnl = full.as_ref().map_or(f64::NAN, |d| d.0);
        let mut scale = 1.0;
        let mut halvings = 0;
        while !(cand_lnl >= lnl) && halvings < 40 {
            scale *= 0.5;
            halvings += 1;
            candidate = theta.iter().zip(step.iter()).map(|(t, s)| t + scale * s).collect();
            cand_lnl = obj.lnl(&candidate);
            full = None;
        }
        if !(cand_lnl >= lnl) {
            // no ascent direction left at machine precision
            return Ok(NewtonResult { theta, lnl, iterations: iter, score_norm });
        }
        let change = cand_lnl - lnl;
        theta = candidate;
        let biggest = max_norm(&theta);
        (lnl, grad, info) = match full {
            Some(d) => d,
            None => obj.derivatives(&theta),
        };
        if biggest > opts.separation_bound && change > opts.rel_lnl_tol * lnl.abs().max(1.0) {
            return Err(Error::Separation { iterations: iter + 1, magnitude: biggest });
        }
        if change <= opts.rel_lnl_tol * lnl.abs().max(1.0) {
            return Ok(NewtonResult {
                theta,
                lnl,
                iterations: iter + 1,
                score_norm: max_norm(&grad),
            });
        }
    }
    let score_norm = max_norm(&grad);
    if score_norm < opts.score_tol {
        return Ok(NewtonResult { theta, lnl, iterations: opts.max_iterations, score_norm });
    }
    Err(Error::NonConvergence { iterations: opts.max_iterations, score_norm })
}

#[inline]
fn log1pexp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Logistic likelihood over a row-major design (intercept column included)
/// with an optional fixed offset.
pub(crate) struct BinaryObjective<'a> {
    pub design: &'a [f64],
    pub p: usize,
    pub events: &'a [bool],
    pub offset: Option<&'a [f64]>,
}

impl BinaryObjective<'_> {
    fn eta(&self, i: usize, theta: &[f64]) -> f64 {
        let row = &self.design[i * self.p..(i + 1) * self.p];
        let lin: f64 = row.iter().zip(theta).map(|(a, b)| a * b).sum();
        lin + self.offset.map_or(0.0, |o| o[i])
    }
}

impl Objective for BinaryObjective<'_> {
    fn dim(&self) -> usize {
        self.p
    }

    fn lnl(&self, theta: &[f64]) -> f64 {
        (0..self.events.len())
            .map(|i| {
                let eta = self.eta(i, theta);
                if self.events[i] {
                    -log1pexp(-eta)
                } else {
                    -log1pexp(eta)
                }
            })
            .sum()
    }

    fn derivatives(&self, theta: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let p = self.p;
        let mut lnl = 0.0;
        let mut grad = vec![0.0; p];
        let mut info = vec![0.0; p * p];
        for i in 0..self.events.len() {
            let row = &self.design[i * p..(i + 1) * p];
            let eta = self.eta(i, theta);
            let e = (-eta.abs()).exp();
            let mu = if eta >= 0.0 { 1.0 / (1.0 + e) } else { e / (1.0 + e) };
            let y = if self.events[i] { 1.0 } else { 0.0 };
            // ln(1 + exp(±η)) from the shared exp(-|η|)
            let soft = e.ln_1p();
            lnl -= if self.events[i] == (eta >= 0.0) { soft } else { soft + eta.abs() };
            let w = mu * (1.0 - mu);
            let resid = y - mu;
            for a in 0..p {
                grad[a] += resid * row[a];
                let wa = w * row[a];
                for b in 0..=a {
                    info[a * p + b] += wa * row[b];
                }
            }
        }
        symmetrize(&mut info, p);
        (lnl, grad, info)
    }
}

fn symmetrize(m: &mut [f64], p: usize) {
    for a in 0..p {
        for b in 0..a {
            m[b * p + a] = m[a * p + b];
        }
    }
}

/// Per-row design for the multinomial likelihood: either one covariate
/// row shared by every sub-model, or one row per sub-model.
pub(crate) enum SubmodelDesign<'a> {
    Shared { x: &'a [f64], p: usize },
    PerSubmodel { x: &'a [f64], p: usize },
}

/// Multinomial logistic likelihood with category 1 as reference.
pub(crate) struct MultinomialObjective<'a> {
    pub design: SubmodelDesign<'a>,
    pub labels: &'a [usize],
    pub k: usize,
}

impl MultinomialObjective<'_> {
    fn p(&self) -> usize {
        match self.design {
            SubmodelDesign::Shared { p, .. } | SubmodelDesign::PerSubmodel { p, .. } => p,
        }
    }

    #[inline]
    fn row(&self, i: usize, j: usize) -> &[f64] {
        match self.design {
            SubmodelDesign::Shared { x, p } => &x[i * p..(i + 1) * p],
            SubmodelDesign::PerSubmodel { x, p } => {
                let m = self.k - 1;
                let start = (i * m + j) * p;
                &x[start..start + p]
            }
        }
    }

    /// Fills `eta` with sub-model linear predictors for row `i` and returns
    /// `ln(1 + Σ exp η_j)`.
    fn row_eta(&self, i: usize, theta: &[f64], eta: &mut [f64]) -> f64 {
        let p = self.p();
        let mut top = 0.0f64;
        for (j, e) in eta.iter_mut().enumerate() {
            let row = self.row(i, j);
            *e = row.iter().zip(&theta[j * p..(j + 1) * p]).map(|(a, b)| a * b).sum();
            top = top.max(*e);
        }
        // log-sum-exp including the reference category's zero
        let s: f64 = (-top).exp() + eta.iter().map(|e| (e - top).exp()).sum::<f64>();
        top + s.ln()
    }

    /// As `row_eta`, also filling `prob` with the sub-model probabilities.
    fn row_probs(&self, i: usize, theta: &[f64], eta: &mut [f64], prob: &mut [f64]) -> f64 {
        let p = self.p();
        let mut top = 0.0f64;
        for (j, e) in eta.iter_mut().enumerate() {
            let row = self.row(i, j);
            *e = row.iter().zip(&theta[j * p..(j + 1) * p]).map(|(a, b)| a * b).sum();
            top = top.max(*e);
        }
        let mut s = (-top).exp();
        for (pr, e) in prob.iter_mut().zip(eta.iter()) {
            *pr = (e - top).exp();
            s += *pr;
        }
        for pr in prob.iter_mut() {
            *pr /= s;
        }
        top + s.ln()
    }
}

impl Objective for MultinomialObjective<'_> {
    fn dim(&self) -> usize {
        (self.k - 1) * self.p()
    }

    fn lnl(&self, theta: &[f64]) -> f64 {
        let mut eta = vec![0.0; self.k - 1];
        (0..self.labels.len())
            .map(|i| {
                let lse = self.row_eta(i, theta, &mut eta);
                let own = if self.labels[i] == 1 { 0.0 } else { eta[self.labels[i] - 2] };
                own - lse
            })
            .sum()
    }

    fn derivatives(&self, theta: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let m = self.k - 1;
        let p = self.p();
        let dim = m * p;
        let mut lnl = 0.0;
        let mut grad = vec![0.0; dim];
        let mut info = vec![0.0; dim * dim];
        let mut eta = vec![0.0; m];
        let mut prob = vec![0.0; m];
        for i in 0..self.labels.len() {
            let lse = self.row_probs(i, theta, &mut eta, &mut prob);
            let label = self.labels[i];
            lnl += if label == 1 { 0.0 } else { eta[label - 2] } - lse;
            for j in 0..m {
                let xj = self.row(i, j);
                let resid = if label == j + 2 { 1.0 } else { 0.0 } - prob[j];
                for a in 0..p {
                    grad[j * p + a] += resid * xj[a];
                }
                for l in 0..=j {
                    let w = if l == j { prob[j] * (1.0 - prob[j]) } else { -prob[j] * prob[l] };
                    let xl = self.row(i, l);
                    for a in 0..p {
                        let wa = w * xj[a];
                        let base = (j * p + a) * dim + l * p;
                        let upper = if l == j { a + 1 } else { p };
                        for b in 0..upper {
                            info[base + b] += wa * xl[b];
                        }
                    }
                }
            }
        }
        symmetrize(&mut info, dim);
        (lnl, grad, info)
    }
}

/// Prepends an intercept column.
pub(crate) fn with_intercept(data: &Dataset) -> Vec<f64> {
    let p = data.q() + 1;
    let mut design = Vec::with_capacity(data.n() * p);
    for i in 0..data.n() {
        design.push(1.0);
        design.extend_from_slice(data.row(i));
    }
    design
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryFit {
    /// Intercept followed by `Q` slopes.
    pub coefficients: Vec<f64>,
    pub lnl: f64,
    pub lnl_null: f64,
    pub converged: bool,
    pub iterations: usize,
    pub score_norm: f64,
    pub n: usize,
}

impl BinaryFit {
    pub fn intercept(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn slopes(&self) -> &[f64] {
        &self.coefficients[1..]
    }

    pub fn lr(&self) -> f64 {
        lr_statistic(self.lnl_null, self.lnl).unwrap_or(0.0)
    }

    /// Linear predictor without intercept, `Σ γ̂_q x_q`.
    pub fn slope_predictor(&self, x: &[f64]) -> f64 {
        self.slopes().iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultinomialFit {
    /// Row `j` holds `(β_{0,j+2}, β_{1,j+2}, …, β_{Q,j+2})`.
    pub coefficients: Vec<Vec<f64>>,
    pub lnl: f64,
    pub lnl_null: f64,
    pub converged: bool,
    pub iterations: usize,
    pub score_norm: f64,
    pub n: usize,
}

impl MultinomialFit {
    pub fn k(&self) -> usize {
        self.coefficients.len() + 1
    }

    pub fn lr(&self) -> f64 {
        lr_statistic(self.lnl_null, self.lnl).unwrap_or(0.0)
    }

    /// Sub-model linear predictors without intercepts, one per
    /// non-reference category.
    pub fn slope_predictors(&self, x: &[f64]) -> Vec<f64> {
        self.coefficients
            .iter()
            .map(|row| row[1..].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Predicted category probabilities `P(Y = 1..K)` for one row.
    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        let eta: Vec<f64> = self
            .coefficients
            .iter()
            .map(|row| row[0] + row[1..].iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        softmax_with_reference(&eta)
    }
}

pub(crate) fn softmax_with_reference(eta: &[f64]) -> Vec<f64> {
    let top = eta.iter().fold(0.0f64, |m, &e| m.max(e));
    let mut out = Vec::with_capacity(eta.len() + 1);
    out.push((-top).exp());
    out.extend(eta.iter().map(|e| (e - top).exp()));
    let s: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= s);
    out
}

pub fn fit_binary(data: &Dataset) -> Result<BinaryFit> {
    fit_binary_with(data, &NewtonOptions::default())
}

pub fn fit_binary_with(data: &Dataset, opts: &NewtonOptions) -> Result<BinaryFit> {
    if data.k() > 2 {
        return Err(Error::Validation(format!(
            "binary fit needs labels in {{1, 2}}, found label {}",
            data.k()
        )));
    }
    let counts = data.require_all_present(2)?;
    let design = with_intercept(data);
    let events: Vec<bool> = data.labels().iter().map(|&l| l == 2).collect();
    let obj = BinaryObjective {
        design: &design,
        p: data.q() + 1,
        events: &events,
        offset: None,
    };
    let res = maximize(&obj, opts)?;
    Ok(BinaryFit {
        coefficients: res.theta,
        lnl: res.lnl,
        lnl_null: rsq::lnl_null_counts(&counts)?,
        converged: true,
        iterations: res.iterations,
        score_norm: res.score_norm,
        n: data.n(),
    })
}

pub fn fit_multinomial(data: &Dataset) -> Result<MultinomialFit> {
    fit_multinomial_with(data, &NewtonOptions::default())
}

pub fn fit_multinomial_with(data: &Dataset, opts: &NewtonOptions) -> Result<MultinomialFit> {
    let k = data.k();
    if k < 2 {
        return Err(Error::DegenerateCategory { index: 2 });
    }
    let counts = data.require_all_present(k)?;
    let design = with_intercept(data);
    let p = data.q() + 1;
    let obj = MultinomialObjective {
        design: SubmodelDesign::Shared { x: &design, p },
        labels: data.labels(),
        k,
    };
    let res = maximize(&obj, opts)?;
    Ok(MultinomialFit {
        coefficients: res.theta.chunks(p).map(<[f64]>::to_vec).collect(),
        lnl: res.lnl,
        lnl_null: rsq::lnl_null_counts(&counts)?,
        converged: true,
        iterations: res.iterations,
        score_norm: res.score_norm,
        n: data.n(),
    })
}

/// Multinomial log-likelihood and score at `coefficients`, laid out as in
/// [`MultinomialFit::coefficients`].
pub fn multinomial_score(data: &Dataset, coefficients: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let design = with_intercept(data);
    let obj = MultinomialObjective {
        design: SubmodelDesign::Shared {
            x: &design,
            p: data.q() + 1,
        },
        labels: data.labels(),
        k: coefficients.len() + 1,
    };
    let theta: Vec<f64> = coefficients.concat();
    let (lnl, grad, _) = obj.derivatives(&theta);
    (lnl, grad)
}

pub fn multinomial_loglik(data: &Dataset, coefficients: &[Vec<f64>]) -> f64 {
    let design = with_intercept(data);
    let obj = MultinomialObjective {
        design: SubmodelDesign::Shared {
            x: &design,
            p: data.q() + 1,
        },
        labels: data.labels(),
        k: coefficients.len() + 1,
    };
    obj.lnl(&coefficients.concat())
}

/// Closed-form intercept-only fit: `β_{0,k} = ln(E_k / E_1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullFit {
    pub intercepts: Vec<f64>,
    pub lnl: f64,
}

pub fn fit_intercept_only(data: &Dataset) -> Result<NullFit> {
    let counts = data.require_all_present(data.k().max(2))?;
    let base = counts[0] as f64;
    Ok(NullFit {
        intercepts: counts[1..].iter().map(|&c| (c as f64 / base).ln()).collect(),
        lnl: rsq::lnl_null_counts(&counts)?,
    })
}

/// `LR = −2 (lnL_null − lnL_model)`, clamped at zero within tolerance.
pub fn lr_statistic(lnl_null: f64, lnl_model: f64) -> Result<f64> {
    let diff = lnl_model - lnl_null;
    if diff < -1e-9 * (1.0 + lnl_null.abs()) {
        return Err(Error::ModelOrdering { lnl_null, lnl_model });
    }
    Ok((2.0 * diff).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShrinkageHeuristic {
    pub value: f64,
    pub lr: f64,
    pub params: u32,
}

impl ShrinkageHeuristic {
    /// Negative heuristic shrinkage: the model is worse than its parameter count.
    pub fn is_negative(&self) -> bool {
        self.value < 0.0
    }
}

/// `S_VH = 1 − params / LR`.
pub fn heuristic_shrinkage(params: u32, lr: f64) -> Result<ShrinkageHeuristic> {
    if !(lr > 0.0) {
        return Err(Error::domain("likelihood ratio", lr, "(0, ∞)"));
    }
    Ok(ShrinkageHeuristic {
        value: 1.0 - params as f64 / lr,
        lr,
        params,
    })
}

/// `R²_CS = 1 − exp(−LR / n)`.
pub fn cox_snell_from_lr(lr: f64, n: f64) -> f64 {
    1.0 - (-lr / n).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_group() -> Dataset {
        // x = 0: 10 events of 50; x = 1: 40 events of 50
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..50 {
            x.push(0.0);
            y.push(if i < 10 { 2 } else { 1 });
        }
        for i in 0..50 {
            x.push(1.0);
            y.push(if i < 40 { 2 } else { 1 });
        }
        Dataset::new(x, 1, y).unwrap()
    }

    #[test]
    fn saturated_two_group_log_odds() {
        let fit = fit_binary(&two_group()).unwrap();
        assert_abs_diff_eq!(fit.intercept(), (0.25f64).ln(), epsilon = 1e-8);
        assert_abs_diff_eq!(fit.slopes()[0], 16f64.ln(), epsilon = 1e-8);
        assert_abs_diff_eq!(fit.intercept(), -1.38629, epsilon = 1e-5);
        assert_abs_diff_eq!(fit.slopes()[0], 2.77259, epsilon = 1e-5);
        assert!(fit.lnl >= fit.lnl_null);
        assert!(fit.score_norm < 1e-8);
    }

    #[test]
    fn intercept_only_binary() {
        let y: Vec<usize> = (0..100).map(|i| if i < 30 { 2 } else { 1 }).collect();
        let data = Dataset::new(vec![], 0, y).unwrap();
        let fit = fit_binary(&data).unwrap();
        assert_abs_diff_eq!(fit.intercept(), (3.0f64 / 7.0).ln(), epsilon = 1e-9);
        assert_abs_diff_eq!(fit.intercept(), -0.84730, epsilon = 1e-5);
        assert_abs_diff_eq!(fit.lnl, -61.08643, epsilon = 1e-5);
        let null = fit_intercept_only(&data).unwrap();
        assert_abs_diff_eq!(null.lnl, fit.lnl, epsilon = 1e-9);
    }

    #[test]
    fn intercept_only_multinomial() {
        let y: Vec<usize> = (0..100)
            .map(|i| if i < 50 { 1 } else if i < 80 { 2 } else { 3 })
            .collect();
        let data = Dataset::new(vec![], 0, y).unwrap();
        let fit = fit_multinomial(&data).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0][0], -0.51083, epsilon = 1e-5);
        assert_abs_diff_eq!(fit.coefficients[1][0], -0.91629, epsilon = 1e-5);
        let null = fit_intercept_only(&data).unwrap();
        assert_abs_diff_eq!(null.intercepts[0], (0.6f64).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(null.intercepts[1], (0.4f64).ln(), epsilon = 1e-12);
        let d = rsq::OutcomeDistribution::from_counts(&[50, 30, 20]).unwrap();
        assert_abs_diff_eq!(null.lnl, rsq::lnl_null_multinomial(&d).unwrap(), epsilon = 1e-12);
        assert_abs_diff_eq!(fit.lnl, null.lnl, epsilon = 1e-9);
    }

    #[test]
    fn null_fit_symmetric() {
        let y: Vec<usize> = (0..100).map(|i| 1 + i % 2).collect();
        let null = fit_intercept_only(&Dataset::new(vec![], 0, y).unwrap()).unwrap();
        assert_abs_diff_eq!(null.lnl, -69.31472, epsilon = 1e-5);
    }

    #[test]
    fn missing_category_rejected() {
        let data = Dataset::new(vec![0.0, 1.0, 2.0], 1, vec![1, 3, 1]).unwrap();
        assert!(matches!(
            fit_multinomial(&data),
            Err(Error::DegenerateCategory { index: 2 })
        ));
        let one_class = Dataset::new(vec![0.0, 1.0], 1, vec![1, 1]).unwrap();
        assert!(fit_binary(&one_class).is_err());
    }

    #[test]
    fn perfect_separation_flagged() {
        let x: Vec<f64> = (0..40).map(|i| i as f64 / 10.0 - 2.0).collect();
        let y: Vec<usize> = x.iter().map(|&v| if v > 0.0 { 2 } else { 1 }).collect();
        let data = Dataset::new(x, 1, y).unwrap();
        assert!(matches!(fit_binary(&data), Err(Error::Separation { .. })));
    }

    #[test]
    fn collinear_design_is_singular() {
        let x: Vec<f64> = (0..30).flat_map(|i| [i as f64, 2.0 * i as f64]).collect();
        let y: Vec<usize> = (0..30).map(|i| 1 + (i * 7 % 3 == 0) as usize).collect();
        let data = Dataset::new(x, 2, y).unwrap();
        assert!(matches!(fit_binary(&data), Err(Error::SingularHessian { .. })));
    }

    #[test]
    fn lr_and_heuristic() {
        assert_eq!(lr_statistic(-100.0, -100.0).unwrap(), 0.0);
        assert_abs_diff_eq!(lr_statistic(-100.0, -90.0).unwrap(), 20.0, epsilon = 1e-12);
        assert!(matches!(
            lr_statistic(-90.0, -100.0),
            Err(Error::ModelOrdering { .. })
        ));
        assert_abs_diff_eq!(heuristic_shrinkage(10, 100.0).unwrap().value, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(heuristic_shrinkage(10, 20.0).unwrap().value, 0.5, epsilon = 1e-15);
        assert!(heuristic_shrinkage(10, 5.0).unwrap().is_negative());
        assert!(heuristic_shrinkage(10, 0.0).is_err());
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(vec![1.0], 2, vec![1]).is_err());
        assert!(Dataset::new(vec![], 0, vec![]).is_err());
        assert!(Dataset::new(vec![1.0], 1, vec![0]).is_err());
        let d = Dataset::new(vec![1.0, 2.0, 3.0], 1, vec![3, 1, 2]).unwrap();
        let sub = d.pair_subset(3, 1);
        assert_eq!(sub.labels(), &[2, 1]);
        assert_eq!(sub.row(0), &[1.0]);
    }
}
