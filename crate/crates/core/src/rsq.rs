//! Cox-Snell and Nagelkerke R² arithmetic.
//!
//! Null log-likelihoods of intercept-only models, the maximum attainable
//! Cox-Snell R² for a given outcome distribution, conversions between the
//! two R² families, and the optimism adjustment `R²_adj = S_VH × R²_app`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-9;

/// Category counts or proportions of a K-category outcome.
///
/// Built either from event counts (then `p_k = E_k / n` exactly) or from
/// anticipated proportions alone. Zero categories are accepted here and
/// rejected by the operations that take logarithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    proportions: Vec<f64>,
    counts: Option<Vec<u64>>,
}

impl OutcomeDistribution {
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::InvalidDistribution(format!(
                "need at least 2 categories, got {}",
                counts.len()
            )));
        }
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidDistribution("total count is zero".into()));
        }
        let proportions = counts.iter().map(|&e| e as f64 / n as f64).collect();
        Ok(Self {
            proportions,
            counts: Some(counts.to_vec()),
        })
    }

    pub fn from_proportions(proportions: &[f64]) -> Result<Self> {
        if proportions.len() < 2 {
            return Err(Error::InvalidDistribution(format!(
                "need at least 2 categories, got {}",
                proportions.len()
            )));
        }
        if let Some(p) = proportions
            .iter()
            .find(|p| !p.is_finite() || **p < 0.0 || **p >= 1.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "proportion {p} outside [0, 1)"
            )));
        }
        let total: f64 = proportions.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "proportions sum to {total}, not 1"
            )));
        }
        Ok(Self {
            proportions: proportions.to_vec(),
            counts: None,
        })
    }

    /// Accepts published proportions that were rounded before reporting:
    /// the sum may miss 1 by up to 0.01 and is renormalised.
    pub fn from_reported_proportions(proportions: &[f64]) -> Result<Self> {
        let total: f64 = proportions.iter().sum();
        if !total.is_finite() || (total - 1.0).abs() > 0.01 {
            return Err(Error::InvalidDistribution(format!(
                "reported proportions sum to {total}"
            )));
        }
        let scaled: Vec<f64> = proportions.iter().map(|p| p / total).collect();
        Self::from_proportions(&scaled)
    }

    pub fn k(&self) -> usize {
        self.proportions.len()
    }

    pub fn proportions(&self) -> &[f64] {
        &self.proportions
    }

    pub fn counts(&self) -> Option<&[u64]> {
        self.counts.as_deref()
    }

    pub fn n(&self) -> Option<u64> {
        self.counts.as_ref().map(|c| c.iter().sum())
    }

    /// `p_{k,r} = p_k + p_r` with 1-based category labels.
    pub fn pair_proportion(&self, k: usize, r: usize) -> f64 {
        match &self.counts {
            Some(c) => {
                (c[k - 1] + c[r - 1]) as f64 / c.iter().sum::<u64>() as f64
            }
            None => self.proportions[k - 1] + self.proportions[r - 1],
        }
    }

    /// `φ_{k,r}`: proportion of category `k` among subjects in `{k, r}`.
    pub fn pair_prevalence(&self, k: usize, r: usize) -> Result<PairPrevalence> {
        let phi = match &self.counts {
            Some(c) => c[k - 1] as f64 / (c[k - 1] + c[r - 1]) as f64,
            None => {
                self.proportions[k - 1] / (self.proportions[k - 1] + self.proportions[r - 1])
            }
        };
        PairPrevalence::new(phi)
    }

    /// The distribution with categories reordered so that new category `i`
    /// is old category `perm[i]` (both 0-based).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            proportions: perm.iter().map(|&i| self.proportions[i]).collect(),
            counts: self
                .counts
                .as_ref()
                .map(|c| perm.iter().map(|&i| c[i]).collect()),
        }
    }
}

/// Outcome proportion of category `k` relative to the pair `{k, r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairPrevalence(f64);

impl PairPrevalence {
    pub fn new(phi: f64) -> Result<Self> {
        if !(phi > 0.0 && phi < 1.0) {
            return Err(Error::domain("pair prevalence", phi, "(0, 1)"));
        }
        Ok(Self(phi))
    }

    pub fn from_counts(e_k: u64, e_r: u64) -> Result<Self> {
        Self::new(e_k as f64 / (e_k + e_r) as f64)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RSquaredKind {
    Apparent,
    Adjusted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RSquaredFamily {
    CoxSnell,
    Nagelkerke,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RSquared {
    pub value: f64,
    pub kind: RSquaredKind,
    pub family: RSquaredFamily,
}

impl RSquared {
    pub fn cox_snell(value: f64, kind: RSquaredKind, max_r2: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&value) {
            return Err(Error::domain("Cox-Snell R²", value, "[0, 1)"));
        }
        if value >= max_r2 {
            return Err(Error::Inconsistent { r2: value, max: max_r2 });
        }
        Ok(Self {
            value,
            kind,
            family: RSquaredFamily::CoxSnell,
        })
    }

    pub fn nagelkerke(value: f64, kind: RSquaredKind) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::domain("Nagelkerke R²", value, "[0, 1]"));
        }
        Ok(Self {
            value,
            kind,
            family: RSquaredFamily::Nagelkerke,
        })
    }

    /// Re-expresses the value in the other family given `max(R²_CS)`.
    pub fn convert(self, max_r2: f64) -> Result<Self> {
        match self.family {
            RSquaredFamily::CoxSnell => {
                Self::nagelkerke(nagelkerke_from_cs(self.value, max_r2)?, self.kind)
            }
            RSquaredFamily::Nagelkerke => Self::cox_snell(self.value * max_r2, self.kind, max_r2),
        }
    }
}

fn positive_count(counts: &[u64]) -> Result<()> {
    match counts.iter().position(|&e| e == 0) {
        Some(index) => Err(Error::DegenerateCategory { index: index + 1 }),
        None => Ok(()),
    }
}

/// `Σ_k E_k ln(E_k / n)` of the intercept-only multinomial model.
pub fn lnl_null_multinomial(dist: &OutcomeDistribution) -> Result<f64> {
    let counts = dist.counts().ok_or_else(|| {
        Error::InvalidDistribution("null log-likelihood requires category counts".into())
    })?;
    lnl_null_counts(counts)
}

pub(crate) fn lnl_null_counts(counts: &[u64]) -> Result<f64> {
    positive_count(counts)?;
    let n = counts.iter().sum::<u64>() as f64;
    Ok(counts
        .iter()
        .map(|&e| {
            let e = e as f64;
            e * (e / n).ln()
        })
        .sum())
}

/// Null log-likelihood of the distinct logistic model on the pair `{k, r}`.
pub fn lnl_null_binary(e_k: u64, e_r: u64) -> Result<f64> {
    lnl_null_counts(&[e_k, e_r])
}

/// `1 − exp(2 lnL_null / n)` computed from counts.
pub fn max_rcs_from_lnl(lnl_null: f64, n: f64) -> f64 {
    1.0 - (2.0 * lnl_null / n).exp()
}

/// Maximum attainable Cox-Snell R², `1 − (Π_k p_k^{p_k})²`.
pub fn max_rcs(dist: &OutcomeDistribution) -> Result<f64> {
    let p = dist.proportions();
    if let Some(index) = p.iter().position(|&pk| pk <= 0.0) {
        return Err(Error::DegenerateCategory { index: index + 1 });
    }
    let prod: f64 = p.iter().map(|&pk| pk.powf(pk)).product();
    Ok(1.0 - prod * prod)
}

/// Maximum Cox-Snell R² of a distinct logistic model with pair prevalence `φ`.
pub fn max_rcs_pair(phi: PairPrevalence) -> f64 {
    let f = phi.value();
    let base = f.powf(f) * (1.0 - f).powf(1.0 - f);
    1.0 - base * base
}

pub fn nagelkerke_from_cs(r2_cs: f64, max_r2: f64) -> Result<f64> {
    if !(max_r2 > 0.0 && max_r2 < 1.0) {
        return Err(Error::domain("max Cox-Snell R²", max_r2, "(0, 1)"));
    }
    if r2_cs < 0.0 {
        return Err(Error::domain("Cox-Snell R²", r2_cs, "[0, max]"));
    }
    if r2_cs > max_r2 {
        return Err(Error::Inconsistent { r2: r2_cs, max: max_r2 });
    }
    Ok(r2_cs / max_r2)
}

/// Anything with a maximum attainable Cox-Snell R².
pub trait MaxCoxSnell {
    fn max_cox_snell(&self) -> Result<f64>;
}

impl MaxCoxSnell for OutcomeDistribution {
    fn max_cox_snell(&self) -> Result<f64> {
        max_rcs(self)
    }
}

impl MaxCoxSnell for PairPrevalence {
    fn max_cox_snell(&self) -> Result<f64> {
        Ok(max_rcs_pair(*self))
    }
}

/// Default Nagelkerke R² assumed when no prior model information exists.
pub const DEFAULT_NAGELKERKE: f64 = 0.15;

/// `R²_CS = R²_Nagelkerke × max(R²_CS)`, the conservative fallback.
pub fn cs_from_nagelkerke_assumption<T: MaxCoxSnell + ?Sized>(
    target: &T,
    r2_nag: f64,
) -> Result<f64> {
    if !(0.0..1.0).contains(&r2_nag) {
        return Err(Error::domain("Nagelkerke R²", r2_nag, "[0, 1)"));
    }
    Ok(r2_nag * target.max_cox_snell()?)
}

/// Optimism-adjusted R²: `S_VH × R²_app`.
pub fn adjust_apparent(r2_app: f64, s_vh: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r2_app) {
        return Err(Error::domain("apparent R²", r2_app, "[0, 1)"));
    }
    if !(s_vh > 0.0 && s_vh <= 1.0) {
        return Err(Error::domain("heuristic shrinkage", s_vh, "(0, 1]"));
    }
    Ok(s_vh * r2_app)
}
