//! TOML configuration files for `samplesize` and `simulate`.
//!
//! A sample size config names the outcome distribution, the number of
//! predictor parameters, one R² source for the overall model and one per
//! pair of categories:
//!
//! ```toml
//! k_categories = 3
//! q_parameters = 10
//! counts = [500, 300, 200]
//!
//! [overall]
//! nagelkerke_fallback = true
//!
//! [pairs."2,1"]
//! c_statistic = 0.8
//!
//! [pairs."3,1"]
//! r2_cs_adj = 0.12
//!
//! [pairs."3,2"]
//! nagelkerke_fallback = true
//! shrinkage = 0.85
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::criteria::{DEFAULT_ALPHA, DEFAULT_DELTA, DEFAULT_SHRINKAGE};
use crate::cstat::DEFAULT_SIM_SIZE;
use crate::error::{Error, Result};
use crate::rsq::OutcomeDistribution;
use crate::simstudy::{self, DevSize, RunConfig, ScenarioSpec};

pub const DEFAULT_SEED: u64 = 20240101;

fn default_shrinkage() -> f64 {
    DEFAULT_SHRINKAGE
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn default_sim_size() -> usize {
    DEFAULT_SIM_SIZE
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Where a pair's adjusted Cox-Snell R² comes from. Exactly one field set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r2_cs_adj: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_statistic: Option<f64>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub nagelkerke_fallback: bool,
    /// Per-pair shrinkage target overriding the global one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shrinkage: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairSource {
    Direct(f64),
    CStatistic(f64),
    NagelkerkeFallback,
}

impl PairInput {
    pub fn source(&self) -> Result<PairSource> {
        match (self.r2_cs_adj, self.c_statistic, self.nagelkerke_fallback) {
            (Some(r2), None, false) => Ok(PairSource::Direct(r2)),
            (None, Some(c), false) => Ok(PairSource::CStatistic(c)),
            (None, None, true) => Ok(PairSource::NagelkerkeFallback),
            _ => Err(Error::Config(
                "exactly one of r2_cs_adj, c_statistic, nagelkerke_fallback is required".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverallInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r2_cs_adj: Option<f64>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub nagelkerke_fallback: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OverallSource {
    Direct(f64),
    NagelkerkeFallback,
}

impl OverallInput {
    pub fn source(&self) -> Result<OverallSource> {
        match (self.r2_cs_adj, self.nagelkerke_fallback) {
            (Some(r2), false) => Ok(OverallSource::Direct(r2)),
            (None, true) => Ok(OverallSource::NagelkerkeFallback),
            _ => Err(Error::Config(
                "overall: exactly one of r2_cs_adj, nagelkerke_fallback is required".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub k_categories: usize,
    pub q_parameters: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category_proportions: Option<Vec<f64>>,
    #[serde(default = "default_shrinkage")]
    pub shrinkage: f64,
    /// Criterion (ii) tolerance on the Nagelkerke optimism.
    #[serde(default = "default_delta")]
    pub delta2: f64,
    /// Criterion (iii) margin of error.
    #[serde(default = "default_delta")]
    pub delta3: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Cohort size for C-statistic conversions.
    #[serde(default = "default_sim_size")]
    pub sim_size: usize,
    pub overall: OverallInput,
    #[serde(default)]
    pub pairs: BTreeMap<String, PairInput>,
}

/// Parses a `"k,r"` key into `(k, r)` with `k > r`.
pub fn parse_pair_key(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("pairs.{key:?}: expected \"k,r\" with 1 <= r < k"));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    let k: usize = a.trim().parse().map_err(|_| bad())?;
    let r: usize = b.trim().parse().map_err(|_| bad())?;
    if r == 0 || r >= k {
        return Err(bad());
    }
    Ok((k, r))
}

impl StudyConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn distribution(&self) -> Result<OutcomeDistribution> {
        let dist = match (&self.counts, &self.category_proportions) {
            (Some(c), None) => OutcomeDistribution::from_counts(c)?,
            (None, Some(p)) => OutcomeDistribution::from_reported_proportions(p)?,
            _ => {
                return Err(Error::Config(
                    "exactly one of counts, category_proportions is required".into(),
                ))
            }
        };
        if dist.k() != self.k_categories {
            return Err(Error::Config(format!(
                "k_categories = {} but {} categories were given",
                self.k_categories,
                dist.k()
            )));
        }
        Ok(dist)
    }

    /// Pairs in `(r, k)` order with their parsed keys.
    pub fn pair_inputs(&self) -> Result<Vec<((usize, usize), &PairInput)>> {
        let mut out = Vec::with_capacity(self.pairs.len());
        for (key, input) in &self.pairs {
            let (k, r) = parse_pair_key(key)?;
            if k > self.k_categories {
                return Err(Error::Config(format!(
                    "pairs.{key:?}: category {k} exceeds k_categories = {}",
                    self.k_categories
                )));
            }
            input
                .source()
                .map_err(|e| Error::Config(format!("pairs.{key:?}: {}", e.root())))?;
            if out.iter().any(|&((k2, r2), _)| (k2, r2) == (k, r)) {
                return Err(Error::Config(format!("pairs.{key:?}: duplicate pair {{{k},{r}}}")));
            }
            out.push(((k, r), input));
        }
        let expected = self.k_categories * (self.k_categories - 1) / 2;
        if out.len() != expected {
            let missing: Vec<String> = (1..self.k_categories)
                .flat_map(|r| (r + 1..=self.k_categories).map(move |k| (k, r)))
                .filter(|p| !out.iter().any(|(q, _)| q == p))
                .map(|(k, r)| format!("\"{k},{r}\""))
                .collect();
            return Err(Error::Config(format!("pairs: missing {}", missing.join(", "))));
        }
        out.sort_by_key(|&((k, r), _)| (r, k));
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_categories < 2 {
            return Err(Error::Config("k_categories must be at least 2".into()));
        }
        if self.q_parameters == 0 {
            return Err(Error::Config("q_parameters must be at least 1".into()));
        }
        self.distribution()
            .map_err(|e| Error::Config(format!("outcome distribution: {e}")))?;
        self.overall.source()?;
        self.pair_inputs()?;
        Ok(())
    }
}

/// A simulation run described on file; command-line flags override it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    /// Catalog scenario id, 1 to 12.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<u32>,
    /// A custom generating model instead of a catalog scenario.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario_spec: Option<ScenarioSpec>,
    /// Development sizes: counts or `"N_MN"` / `"N_DL"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_values: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calc_cohort: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl SimulationConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
            .map_err(|e| Error::Config(format!("{}: {}", path.display(), e.root())))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn scenario_spec(&self) -> Result<ScenarioSpec> {
        match (self.scenario, &self.scenario_spec) {
            (Some(id), None) => simstudy::scenario(id)
                .ok_or_else(|| Error::Config(format!("unknown scenario {id}; valid ids are 1 to 12"))),
            (None, Some(spec)) => Ok(spec.clone()),
            (Some(_), Some(_)) => Err(Error::Config("give scenario or scenario_spec, not both".into())),
            (None, None) => Err(Error::Config("no scenario given".into())),
        }
    }

    pub fn run_config(&self) -> Result<RunConfig> {
        let spec = self.scenario_spec()?;
        let mut rc = RunConfig::new(spec, self.seed.unwrap_or(DEFAULT_SEED));
        if let Some(ns) = &self.n_values {
            rc.n_values = ns
                .iter()
                .map(|s| s.parse::<DevSize>())
                .collect::<Result<_>>()
                .map_err(|e| Error::Config(format!("n_values: {e}")))?;
        }
        if let Some(r) = self.reps {
            rc.reps = r;
        }
        if let Some(c) = self.calc_cohort {
            rc.calc_cohort = c;
        }
        if let Some(v) = self.validation_n {
            rc.validation_n = v;
        }
        if let Some(w) = self.workers {
            rc.workers = w;
        }
        rc.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(rc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const THREE: &str = r#"
k_categories = 3
q_parameters = 4
counts = [60, 25, 15]

[overall]
nagelkerke_fallback = true

[pairs."2,1"]
r2_cs_adj = 0.1

[pairs."3,1"]
c_statistic = 0.75

[pairs."3,2"]
nagelkerke_fallback = true
shrinkage = 0.8
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = StudyConfig::from_toml(THREE).unwrap();
        assert_eq!(cfg.shrinkage, 0.9);
        assert_eq!(cfg.pairs["3,2"].shrinkage, Some(0.8));
        let again = StudyConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn rejects_two_sources() {
        let text = THREE.replace("r2_cs_adj = 0.1", "r2_cs_adj = 0.1\nc_statistic = 0.7");
        let err = StudyConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("2,1"), "{err}");
    }

    #[test]
    fn rejects_missing_pair() {
        let text = THREE.replace("[pairs.\"3,1\"]\nc_statistic = 0.75\n", "");
        let err = StudyConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("\"3,1\""), "{err}");
    }

    #[test]
    fn rejects_unknown_field() {
        let text = THREE.replace("q_parameters = 4", "q_parameters = 4\nqq = 1");
        assert!(StudyConfig::from_toml(&text).is_err());
    }

    #[test]
    fn pair_keys() {
        assert_eq!(parse_pair_key("5, 3").unwrap(), (5, 3));
        assert!(parse_pair_key("3,5").is_err());
        assert!(parse_pair_key("3").is_err());
        assert!(parse_pair_key("1,0").is_err());
    }

    #[test]
    fn simulation_config() {
        let cfg = SimulationConfig::from_toml("scenario = 4\nn_values = [\"N_MN\", \"250\"]\nreps = 7").unwrap();
        let rc = cfg.run_config().unwrap();
        assert_eq!(rc.n_values, vec![DevSize::NMn, DevSize::Fixed(250)]);
        assert_eq!(rc.reps, 7);
        assert_eq!(rc.scenario.id, 4);
        assert!(SimulationConfig::from_toml("scenario = 13").unwrap().run_config().is_err());
        let back = SimulationConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, back);
    }
}
