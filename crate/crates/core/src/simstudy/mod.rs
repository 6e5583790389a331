//! Simulation study comparing the direct multinomial sample size with the
//! distinct-logistic one, measured by calibration slopes on a large
//! validation cohort.

mod replicate;
mod scenario;
mod sizes;
mod summary;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use replicate::{evaluate_dataset, run_replicate, Estimand, ReplicateResult, ValidationCohort};
pub use scenario::{catalog, generate_dataset, scenario, ScenarioSpec, PREDICTORS};
pub use sizes::{
    compute_n_dl, compute_n_mn, n_dl_from_cohort, n_mn_from_cohort, DirectSize, DistinctSize, PairSize,
    DEFAULT_CALC_COHORT,
};
pub use summary::{percentile, summarize, summarize_values, EstimandSummary, ShrinkageSummary, PERCENTILES};

use crate::error::{Error, Result};

pub const DEFAULT_REPS: usize = 1000;
pub const DEFAULT_VALIDATION_N: usize = 500_000;
pub const MIN_COHORT: usize = 10_000;

/// A development sample size, possibly one of the two computed sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DevSize {
    Fixed(usize),
    NMn,
    NDl,
}

impl DevSize {
    /// The tabled sizes: 250, 500, 1000, `N_MN`, `N_DL`.
    pub fn defaults() -> Vec<DevSize> {
        vec![
            DevSize::Fixed(250),
            DevSize::Fixed(500),
            DevSize::Fixed(1000),
            DevSize::NMn,
            DevSize::NDl,
        ]
    }
}

impl fmt::Display for DevSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DevSize::Fixed(n) => write!(f, "{n}"),
            DevSize::NMn => f.write_str("N_MN"),
            DevSize::NDl => f.write_str("N_DL"),
        }
    }
}

impl FromStr for DevSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "N_MN" | "NMN" => Ok(DevSize::NMn),
            "N_DL" | "NDL" => Ok(DevSize::NDl),
            other => match other.parse::<usize>() {
                Ok(n) if n >= 1 => Ok(DevSize::Fixed(n)),
                _ => Err(Error::Validation(format!(
                    "development size {s:?}: expected a positive count, N_MN or N_DL"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scenario: ScenarioSpec,
    pub n_values: Vec<DevSize>,
    pub reps: usize,
    pub seed: u64,
    pub calc_cohort: usize,
    pub validation_n: usize,
    /// Worker threads; 0 uses one per core. Results do not depend on it.
    pub workers: usize,
}

impl RunConfig {
    pub fn new(scenario: ScenarioSpec, seed: u64) -> Self {
        Self {
            scenario,
            n_values: DevSize::defaults(),
            reps: DEFAULT_REPS,
            seed,
            calc_cohort: DEFAULT_CALC_COHORT,
            validation_n: DEFAULT_VALIDATION_N,
            workers: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.reps == 0 {
            return Err(Error::Validation("reps must be at least 1".into()));
        }
        if self.n_values.is_empty() {
            return Err(Error::Validation("no development sizes requested".into()));
        }
        for (name, v) in [("calc_cohort", self.calc_cohort), ("validation_n", self.validation_n)] {
            if v < MIN_COHORT {
                return Err(Error::Validation(format!("{name} = {v} is below {MIN_COHORT}")));
            }
        }
        Ok(())
    }
}

const STREAM_REPLICATE: u64 = 0;
const STREAM_CALC: u64 = 1;
const STREAM_VALIDATION: u64 = 2;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// An independent generator for one work unit, fixed by its coordinates.
pub fn substream(seed: u64, coords: &[u64]) -> ChaCha8Rng {
    let mut h = splitmix64(seed);
    for &c in coords {
        h = splitmix64(h ^ c);
    }
    ChaCha8Rng::seed_from_u64(h)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub size: DevSize,
    pub n: usize,
    pub replicates: Vec<ReplicateResult>,
    /// `None` when every replicate was excluded.
    pub summary: Option<ShrinkageSummary>,
}

impl CellResult {
    pub fn n_excluded(&self) -> usize {
        self.replicates.iter().filter(|r| !r.converged).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub scenario: ScenarioSpec,
    pub seed: u64,
    pub reps: usize,
    pub n_mn: Option<DirectSize>,
    pub n_dl: Option<DistinctSize>,
    pub cells: Vec<CellResult>,
}

impl StudyResult {
    pub fn cell(&self, size: DevSize) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.size == size)
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))
}

/// Replicates of one development size, in replicate order.
pub fn run_cell(
    config: &RunConfig,
    n: usize,
    validation: &ValidationCohort,
) -> Result<Vec<ReplicateResult>> {
    let id = u64::from(config.scenario.id);
    let work = |rep: usize| {
        let mut rng = substream(config.seed, &[STREAM_REPLICATE, id, n as u64, rep as u64]);
        run_replicate(&config.scenario, n, validation, rep, &mut rng)
    };
    Ok(pool(config.workers)?.install(|| (0..config.reps).into_par_iter().map(work).collect()))
}

pub fn run_study(config: &RunConfig) -> Result<StudyResult> {
    config.validate()?;
    let id = u64::from(config.scenario.id);
    let spec = &config.scenario;

    let needs_sizes = config.n_values.iter().any(|s| !matches!(s, DevSize::Fixed(_)));
    let (n_mn, n_dl) = if needs_sizes {
        let mut rng = substream(config.seed, &[STREAM_CALC, id]);
        let cohort = generate_dataset(spec, config.calc_cohort, &mut rng);
        (Some(n_mn_from_cohort(&cohort)?), Some(n_dl_from_cohort(&cohort)?))
    } else {
        (None, None)
    };

    let mut rng = substream(config.seed, &[STREAM_VALIDATION, id]);
    let validation = ValidationCohort::generate(spec, config.validation_n, &mut rng);

    let mut cells = Vec::with_capacity(config.n_values.len());
    for &size in &config.n_values {
        let n = match size {
            DevSize::Fixed(n) => n,
            DevSize::NMn => n_mn.as_ref().map(|s| s.n as usize).unwrap_or_default(),
            DevSize::NDl => n_dl.as_ref().map(|s| s.n as usize).unwrap_or_default(),
        };
        let replicates = run_cell(config, n, &validation)?;
        let summary = match summarize(&replicates) {
            Ok(s) => Some(s),
            Err(Error::EmptySummary { .. }) => None,
            Err(e) => return Err(e),
        };
        cells.push(CellResult {
            size,
            n,
            replicates,
            summary,
        });
    }

    Ok(StudyResult {
        scenario: spec.clone(),
        seed: config.seed,
        reps: config.reps,
        n_mn,
        n_dl,
        cells,
    })
}

pub const REPLICATE_HEADER: [&str; 11] = [
    "scenario_label",
    "n",
    "replicate",
    "s_mn_21",
    "s_mn_31",
    "s_dl_21",
    "s_dl_31",
    "s_vh_mn",
    "s_vh_dl_21",
    "s_vh_dl_31",
    "converged",
];

pub const SUMMARY_HEADER: [&str; 11] = [
    "scenario_label",
    "n",
    "estimand",
    "mean",
    "p2_5",
    "p25",
    "p50",
    "p75",
    "p97_5",
    "n_converged",
    "n_excluded",
];

pub fn write_replicates<W: Write>(study: &StudyResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPLICATE_HEADER)?;
    for cell in &study.cells {
        for r in &cell.replicates {
            let mut rec = vec![study.scenario.label.clone(), cell.n.to_string(), r.replicate.to_string()];
            rec.extend(Estimand::ALL.iter().map(|&e| r.get(e).to_string()));
            rec.push(u8::from(r.converged).to_string());
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary<W: Write>(study: &StudyResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for cell in &study.cells {
        let excluded = cell.n_excluded();
        let converged = cell.replicates.len() - excluded;
        for &e in &Estimand::ALL {
            let stats = match &cell.summary {
                Some(s) => {
                    let v = s.get(e);
                    [v.mean, v.p2_5, v.p25, v.p50, v.p75, v.p97_5]
                }
                None => [f64::NAN; 6],
            };
            let mut rec = vec![study.scenario.label.clone(), cell.n.to_string(), e.name().to_string()];
            rec.extend(stats.iter().map(f64::to_string));
            rec.push(converged.to_string());
            rec.push(excluded.to_string());
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `replicates.csv` and `summary.csv` into `dir`, creating it.
pub fn write_study(study: &StudyResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let files: [(&str, fn(&StudyResult, fs::File) -> csv::Result<()>); 2] =
        [("replicates.csv", write_replicates), ("summary.csv", write_summary)];
    for (name, write) in files {
        let path = dir.join(name);
        let file = fs::File::create(&path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        write(study, file).map_err(|source| Error::Csv { path, source })?;
    }
    Ok(())
}
