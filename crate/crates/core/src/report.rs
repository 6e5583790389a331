//! The full sample size calculation driven by a [`StudyConfig`], and its
//! text and JSON renderings.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{OverallSource, PairSource, StudyConfig, DEFAULT_SEED};
use crate::criteria::{
    criterion_one, criterion_three, criterion_two, final_sample_size, CriterionOneReport, CriterionThreeReport,
    CriterionTwoReport, PairEstimate, PrecisionSpec, SampleSizeReport,
};
use crate::cstat::{rsq_from_cstat, CStatEstimate, CStatSpec};
use crate::error::{Error, Result};
use crate::rsq::{cs_from_nagelkerke_assumption, max_rcs, DEFAULT_NAGELKERKE};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum R2Provenance {
    Direct,
    CStatistic {
        c_statistic: f64,
        phi: f64,
        sim_size: usize,
        seed: u64,
        achieved_c: f64,
        achieved_prevalence: f64,
        mu: f64,
        sigma: f64,
    },
    NagelkerkeFallback {
        r2_nagelkerke: f64,
        max_r2_cs: f64,
    },
}

impl R2Provenance {
    fn from_cstat(est: &CStatEstimate) -> Self {
        R2Provenance::CStatistic {
            c_statistic: est.spec.c,
            phi: est.spec.phi.value(),
            sim_size: est.spec.sim_size,
            seed: est.spec.seed,
            achieved_c: est.achieved_c,
            achieved_prevalence: est.achieved_prevalence,
            mu: est.mu,
            sigma: est.sigma,
        }
    }

    fn short(&self) -> String {
        match self {
            R2Provenance::Direct => "given".into(),
            R2Provenance::CStatistic { c_statistic, .. } => format!("C = {c_statistic}"),
            R2Provenance::NagelkerkeFallback { r2_nagelkerke, .. } => format!("R²_Nag = {r2_nagelkerke}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedPair {
    pub k: usize,
    pub r: usize,
    pub r2_cs_adj: f64,
    pub s_target: f64,
    pub provenance: R2Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSizeAnalysis {
    pub schema_version: u32,
    pub k_categories: usize,
    pub q_parameters: u32,
    pub proportions: Vec<f64>,
    pub counts: Option<Vec<u64>>,
    pub max_r2_cs_app: f64,
    pub r2_cs_adj: f64,
    pub overall_provenance: R2Provenance,
    pub pairs: Vec<ResolvedPair>,
    pub criterion_one: CriterionOneReport,
    pub criterion_two: CriterionTwoReport,
    pub criterion_three: CriterionThreeReport,
    pub result: SampleSizeReport,
}

fn resolve_pair(
    cfg: &StudyConfig,
    dist: &crate::rsq::OutcomeDistribution,
    (k, r): (usize, usize),
    source: PairSource,
    s_target: f64,
) -> Result<ResolvedPair> {
    let (r2_cs_adj, provenance) = match source {
        PairSource::Direct(v) => (v, R2Provenance::Direct),
        PairSource::CStatistic(c) => {
            let mut spec = CStatSpec::new(c, dist.pair_prevalence(k, r)?, cfg.seed.unwrap_or(DEFAULT_SEED));
            spec.sim_size = cfg.sim_size;
            let est = rsq_from_cstat(&spec)?;
            (est.r2_cs, R2Provenance::from_cstat(&est))
        }
        PairSource::NagelkerkeFallback => {
            let phi = dist.pair_prevalence(k, r)?;
            let max = crate::rsq::max_rcs_pair(phi);
            (
                cs_from_nagelkerke_assumption(&phi, DEFAULT_NAGELKERKE)?,
                R2Provenance::NagelkerkeFallback {
                    r2_nagelkerke: DEFAULT_NAGELKERKE,
                    max_r2_cs: max,
                },
            )
        }
    };
    Ok(ResolvedPair {
        k,
        r,
        r2_cs_adj,
        s_target,
        provenance,
    })
}

/// Resolves every R² input and runs criteria (i) to (iii).
///
/// C-statistic conversions run in parallel, all with the config seed.
pub fn analyse(cfg: &StudyConfig) -> Result<SampleSizeAnalysis> {
    cfg.validate()?;
    let dist = cfg.distribution()?;
    let max_r2 = max_rcs(&dist)?;
    let (r2_cs_adj, overall_provenance) = match cfg.overall.source()? {
        OverallSource::Direct(v) => (v, R2Provenance::Direct),
        OverallSource::NagelkerkeFallback => (
            cs_from_nagelkerke_assumption(&dist, DEFAULT_NAGELKERKE)?,
            R2Provenance::NagelkerkeFallback {
                r2_nagelkerke: DEFAULT_NAGELKERKE,
                max_r2_cs: max_r2,
            },
        ),
    };

    let inputs = cfg.pair_inputs()?;
    let pairs: Vec<ResolvedPair> = inputs
        .par_iter()
        .map(|&(key, input)| {
            let s = input.shrinkage.unwrap_or(cfg.shrinkage);
            resolve_pair(cfg, &dist, key, input.source()?, s).map_err(|e| e.in_pair(key.0, key.1))
        })
        .collect::<Result<_>>()?;

    let estimates: Vec<PairEstimate> = pairs
        .iter()
        .map(|p| PairEstimate::new(p.k, p.r, p.r2_cs_adj, dist.pair_proportion(p.k, p.r)).with_shrinkage(p.s_target))
        .collect();
    let one = criterion_one(&estimates, cfg.q_parameters, cfg.k_categories)?;
    let two = criterion_two(cfg.q_parameters, cfg.k_categories, r2_cs_adj, max_r2, cfg.delta2)?;
    let three = criterion_three(&dist, PrecisionSpec::new(cfg.delta3, cfg.alpha)?)?;
    let result = final_sample_size(one.n, two.size.n, three.n, &dist);

    Ok(SampleSizeAnalysis {
        schema_version: SCHEMA_VERSION,
        k_categories: cfg.k_categories,
        q_parameters: cfg.q_parameters,
        proportions: dist.proportions().to_vec(),
        counts: dist.counts().map(<[u64]>::to_vec),
        max_r2_cs_app: max_r2,
        r2_cs_adj,
        overall_provenance,
        pairs,
        criterion_one: one,
        criterion_two: two,
        criterion_three: three,
        result,
    })
}

impl SampleSizeAnalysis {
    /// Which criterion sets the final size: 1, 2 or 3.
    pub fn binding_criterion(&self) -> u8 {
        let r = &self.result;
        if r.n_final == r.n1 {
            1
        } else if r.n_final == r.n2 {
            2
        } else {
            3
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("analysis serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("report JSON: {e}")))
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = self.write_text(&mut s);
        s
    }

    fn write_text(&self, s: &mut String) -> std::fmt::Result {
        writeln!(s, "K = {} outcome categories, Q = {} predictor parameters", self.k_categories, self.q_parameters)?;
        let props: Vec<String> = self.proportions.iter().map(|p| format!("{p:.4}")).collect();
        writeln!(s, "p_k = ({})", props.join(", "))?;
        writeln!(s, "max R²_CS,app = {:.4}", self.max_r2_cs_app)?;
        writeln!(s, "R²_CS,adj (overall) = {:.4} [{}]", self.r2_cs_adj, self.overall_provenance.short())?;
        writeln!(s)?;

        writeln!(s, "Criterion (i): shrinkage target per pair")?;
        writeln!(
            s,
            "  {:<7} {:<16} {:>9} {:>8} {:>5} {:>10} {:>8}",
            "pair", "R² source", "R²_CS,adj", "p_kr", "S", "m_kr", "n_kr"
        )?;
        for (p, req) in self.pairs.iter().zip(&self.criterion_one.pairs) {
            writeln!(
                s,
                "  {:<7} {:<16} {:>9.4} {:>8.4} {:>5.2} {:>10.2} {:>8}",
                format!("{{{},{}}}", req.k, req.r),
                p.provenance.short(),
                req.r2_adj,
                req.p_pair,
                req.s_target,
                req.events.raw,
                req.cohort.n
            )?;
        }
        let (bk, br) = self.criterion_one.binding;
        writeln!(s, "  binding pair {{{bk},{br}}}: n = {}", self.criterion_one.n)?;
        for p in &self.pairs {
            if let R2Provenance::CStatistic {
                c_statistic,
                phi,
                sim_size,
                seed,
                achieved_c,
                achieved_prevalence,
                ..
            } = &p.provenance
            {
                writeln!(
                    s,
                    "  {{{},{}}} from C = {c_statistic}, φ = {phi:.4}: achieved C = {achieved_c:.4}, φ = {achieved_prevalence:.4} (n = {sim_size}, seed {seed})",
                    p.k, p.r
                )?;
            }
        }
        writeln!(s)?;

        let two = &self.criterion_two;
        writeln!(
            s,
            "Criterion (ii): δ = {}, S_VH >= {:.4}, n = {}",
            two.delta, two.shrinkage_bound, two.size.n
        )?;
        let three = &self.criterion_three;
        let per: Vec<String> = three.categories.iter().map(|c| c.size.n.to_string()).collect();
        writeln!(
            s,
            "Criterion (iii): δ = {}, α = {}, χ² = {:.4}, per category ({}), n = {}",
            three.spec.delta,
            three.spec.alpha,
            three.chi2,
            per.join(", "),
            three.n
        )?;
        writeln!(s)?;
        let events: Vec<String> = self.result.expected_events.iter().map(u64::to_string).collect();
        writeln!(
            s,
            "Minimum sample size: {} (criterion {})",
            self.result.n_final,
            ["i", "ii", "iii"][self.binding_criterion() as usize - 1]
        )?;
        writeln!(s, "Expected events per category: {}", events.join(", "))
    }
}
