//! The three minimum sample size criteria and their aggregation.
//!
//! Criterion (i) targets a shrinkage factor in every distinct logistic
//! model `{k, r}`; criterion (ii) bounds the gap between apparent and
//! adjusted Nagelkerke R²; criterion (iii) asks for simultaneous confidence
//! intervals of width `±δ` around every category proportion. Every size is
//! reported both raw and rounded up.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::rsq::OutcomeDistribution;

pub const DEFAULT_SHRINKAGE: f64 = 0.9;
pub const DEFAULT_DELTA: f64 = 0.05;
pub const DEFAULT_ALPHA: f64 = 0.05;

/// A sample size before and after rounding up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSize {
    pub raw: f64,
    pub n: u64,
}

impl SampleSize {
    fn ceil(raw: f64) -> Self {
        Self {
            raw,
            n: raw.ceil() as u64,
        }
    }
}

fn check_unit_open(what: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(what, v, "(0, 1)"))
    }
}

/// Events needed in a binary model with `params` predictor parameters so
/// that the expected heuristic shrinkage is `s`.
pub fn pair_events_required(params: u32, r2_adj: f64, s: f64) -> Result<SampleSize> {
    if params == 0 {
        return Err(Error::domain("predictor parameters", 0.0, ">= 1"));
    }
    check_unit_open("adjusted Cox-Snell R²", r2_adj)?;
    check_unit_open("shrinkage target", s)?;
    if r2_adj >= s {
        return Err(Error::Infeasible(format!(
            "R²_adj = {r2_adj} is not below the shrinkage target {s}"
        )));
    }
    let raw = params as f64 / ((s - 1.0) * (1.0 - r2_adj / s).ln());
    Ok(SampleSize::ceil(raw))
}

/// One distinct logistic model `{k, r}` (k > r) entering criterion (i).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairEstimate {
    pub k: usize,
    pub r: usize,
    pub r2_adj: f64,
    /// Proportion of the whole cohort with outcome in `{k, r}`.
    pub p_pair: f64,
    pub s_target: f64,
}

impl PairEstimate {
    pub fn new(k: usize, r: usize, r2_adj: f64, p_pair: f64) -> Self {
        Self {
            k,
            r,
            r2_adj,
            p_pair,
            s_target: DEFAULT_SHRINKAGE,
        }
    }

    pub fn with_shrinkage(mut self, s: f64) -> Self {
        self.s_target = s;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRequirement {
    pub k: usize,
    pub r: usize,
    pub s_target: f64,
    pub r2_adj: f64,
    pub p_pair: f64,
    /// Events `m_{k,r}` in the pair.
    pub events: SampleSize,
    /// Whole-cohort size `n_{k,r} = m_{k,r} / p_{k,r}`.
    pub cohort: SampleSize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOneReport {
    pub q: u32,
    pub pairs: Vec<PairRequirement>,
    pub binding: (usize, usize),
    pub n: u64,
}

impl CriterionOneReport {
    pub fn pair(&self, k: usize, r: usize) -> Option<&PairRequirement> {
        self.pairs.iter().find(|p| p.k == k && p.r == r)
    }
}

/// Criterion (i) over every pair of a `k_categories` outcome.
pub fn criterion_one(pairs: &[PairEstimate], q: u32, k_categories: usize) -> Result<CriterionOneReport> {
    if k_categories < 2 {
        return Err(Error::domain("categories", k_categories as f64, ">= 2"));
    }
    let expected = k_categories * (k_categories - 1) / 2;
    let mut seen = vec![false; k_categories * k_categories];
    for p in pairs {
        if p.k <= p.r || p.k > k_categories || p.r == 0 {
            return Err(Error::Incomplete(format!(
                "pair {{{},{}}} is not of the form k > r within 1..={}",
                p.k, p.r, k_categories
            )));
        }
        let slot = (p.k - 1) * k_categories + (p.r - 1);
        if seen[slot] {
            return Err(Error::Incomplete(format!("pair {{{},{}}} given twice", p.k, p.r)));
        }
        seen[slot] = true;
    }
    if pairs.len() != expected {
        let missing: Vec<String> = (2..=k_categories)
            .flat_map(|k| (1..k).map(move |r| (k, r)))
            .filter(|&(k, r)| !seen[(k - 1) * k_categories + (r - 1)])
            .map(|(k, r)| format!("{{{k},{r}}}"))
            .collect();
        return Err(Error::Incomplete(format!("missing pairs {}", missing.join(", "))));
    }

    let mut out = Vec::with_capacity(pairs.len());
    for p in pairs {
        let req = pair_requirement(p, q).map_err(|e| e.in_pair(p.k, p.r))?;
        out.push(req);
    }
    out.sort_by_key(|p| (p.r, p.k));
    // ties resolve to the first pair in (r, k) order
    let binding = out
        .iter()
        .fold(None::<&PairRequirement>, |best, p| match best {
            Some(b) if b.cohort.n >= p.cohort.n => Some(b),
            _ => Some(p),
        })
        .expect("at least one pair");
    Ok(CriterionOneReport {
        q,
        binding: (binding.k, binding.r),
        n: binding.cohort.n,
        pairs: out,
    })
}

/// Events and whole-cohort size for a single pair.
pub fn pair_requirement(p: &PairEstimate, q: u32) -> Result<PairRequirement> {
    if !(p.p_pair > 0.0 && p.p_pair <= 1.0) {
        return Err(Error::domain("pair proportion", p.p_pair, "(0, 1]"));
    }
    let events = pair_events_required(q, p.r2_adj, p.s_target)?;
    Ok(PairRequirement {
        k: p.k,
        r: p.r,
        s_target: p.s_target,
        r2_adj: p.r2_adj,
        p_pair: p.p_pair,
        events,
        cohort: SampleSize::ceil(events.raw / p.p_pair),
    })
}

/// Criterion (i) applied directly to the whole multinomial model with
/// `(K − 1) Q` parameters.
///
/// Diagnostic only: meeting it does not guarantee the target shrinkage in
/// every sub-model.
pub fn criterion_one_direct(q: u32, k_categories: usize, r2_adj_mn: f64, s: f64) -> Result<SampleSize> {
    if k_categories < 2 {
        return Err(Error::domain("categories", k_categories as f64, ">= 2"));
    }
    pair_events_required((k_categories as u32 - 1) * q, r2_adj_mn, s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionTwoReport {
    pub size: SampleSize,
    /// Smallest `S_VH_MN` keeping the Nagelkerke optimism below `δ`.
    pub shrinkage_bound: f64,
    pub delta: f64,
}

/// `S_VH ≥ R²_adj / (R²_adj + δ max(R²_CS))`.
pub fn nagelkerke_shrinkage_bound(r2_adj: f64, max_r2: f64, delta: f64) -> f64 {
    r2_adj / (r2_adj + delta * max_r2)
}

pub fn criterion_two(
    q: u32,
    k_categories: usize,
    r2_adj: f64,
    max_r2_app: f64,
    delta: f64,
) -> Result<CriterionTwoReport> {
    if k_categories < 2 {
        return Err(Error::domain("categories", k_categories as f64, ">= 2"));
    }
    check_unit_open("max Cox-Snell R²", max_r2_app)?;
    if !(r2_adj > 0.0 && r2_adj < max_r2_app) {
        return Err(Error::Inconsistent { r2: r2_adj, max: max_r2_app });
    }
    if !(delta > 0.0) {
        return Err(Error::domain("delta", delta, "(0, 0.5)"));
    }
    let shift = r2_adj + delta * max_r2_app;
    if shift >= 1.0 {
        return Err(Error::Infeasible(format!(
            "R²_adj + δ·max(R²) = {shift} is not below 1"
        )));
    }
    let bound = nagelkerke_shrinkage_bound(r2_adj, max_r2_app, delta);
    let params = (k_categories as f64 - 1.0) * q as f64;
    let raw = params / ((bound - 1.0) * (1.0 - shift).ln());
    Ok(CriterionTwoReport {
        size: SampleSize::ceil(raw),
        shrinkage_bound: bound,
        delta,
    })
}

/// Upper-tail quantile of the 1-df chi-squared distribution.
pub fn chi2_quantile_1df(upper_tail: f64) -> Result<f64> {
    if !(upper_tail > 0.0 && upper_tail <= 1.0) {
        return Err(Error::domain("upper-tail probability", upper_tail, "(0, 1]"));
    }
    let z = Normal::standard().inverse_cdf(1.0 - upper_tail / 2.0);
    Ok(z * z)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionSpec {
    pub delta: f64,
    pub alpha: f64,
}

impl Default for PrecisionSpec {
    fn default() -> Self {
        Self {
            delta: DEFAULT_DELTA,
            alpha: DEFAULT_ALPHA,
        }
    }
}

impl PrecisionSpec {
    pub fn new(delta: f64, alpha: f64) -> Result<Self> {
        let spec = Self { delta, alpha };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(Error::domain("delta", self.delta, "(0, 0.5)"));
        }
        check_unit_open("alpha", self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategoryPrecision {
    pub category: usize,
    pub p: f64,
    pub size: SampleSize,
    /// Set when `p_k` is 0 or 1 and the category contributes nothing.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionThreeReport {
    pub chi2: f64,
    pub spec: PrecisionSpec,
    pub categories: Vec<CategoryPrecision>,
    pub n: u64,
}

/// Criterion (iii): `max_k χ²_{α/K,1} p_k (1 − p_k) / δ²`.
pub fn criterion_three(dist: &OutcomeDistribution, spec: PrecisionSpec) -> Result<CriterionThreeReport> {
    spec.validate()?;
    let k = dist.k();
    let chi2 = chi2_quantile_1df(spec.alpha / k as f64)?;
    let categories: Vec<CategoryPrecision> = dist
        .proportions()
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let degenerate = p <= 0.0 || p >= 1.0;
            let raw = if degenerate {
                0.0
            } else {
                chi2 * p * (1.0 - p) / (spec.delta * spec.delta)
            };
            CategoryPrecision {
                category: i + 1,
                p,
                size: SampleSize::ceil(raw),
                degenerate,
            }
        })
        .collect();
    let n = categories.iter().map(|c| c.size.n).max().unwrap_or(0);
    Ok(CriterionThreeReport {
        chi2,
        spec,
        categories,
        n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSizeReport {
    pub n1: u64,
    pub n2: u64,
    pub n3: u64,
    pub n_final: u64,
    /// `ceil(n_final · p_k)` per category.
    pub expected_events: Vec<u64>,
}

pub fn final_sample_size(n1: u64, n2: u64, n3: u64, dist: &OutcomeDistribution) -> SampleSizeReport {
    let n_final = n1.max(n2).max(n3);
    let expected_events = dist
        .proportions()
        .iter()
        .map(|p| (n_final as f64 * p).ceil() as u64)
        .collect();
    SampleSizeReport {
        n1,
        n2,
        n3,
        n_final,
        expected_events,
    }
}
