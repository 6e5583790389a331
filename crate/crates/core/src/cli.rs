//! The `mnlss` command line.
//!
//! Exit codes: 0 success, 1 a model fit or simulation failed, 2 invalid
//! input or configuration (including an unknown scenario), 3 a criterion
//! is infeasible for the given inputs, 4 a file could not be read or
//! written. Reports go to stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{SimulationConfig, StudyConfig, DEFAULT_SEED};
use crate::cstat::{rsq_from_cstat, CStatSpec, DEFAULT_SIM_SIZE};
use crate::error::{Error, Result};
use crate::report::{analyse, SCHEMA_VERSION};
use crate::rsq::PairPrevalence;
use crate::simstudy::{
    self, catalog, DevSize, DirectSize, DistinctSize, Estimand, ScenarioSpec, ShrinkageSummary, StudyResult,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "mnlss", version, about = "Minimum sample size for multinomial logistic regression models")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every simulation; overrides the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Directory to write reports or CSV files into.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum sample size from a study config (requires --config).
    Samplesize,
    /// Cox-Snell R² implied by a C-statistic and an outcome prevalence.
    Cstat2rsq {
        /// Pairwise C-statistic, in (0.5, 1)
        #[arg(long)]
        c: f64,
        /// Prevalence of the event category within the pair.
        #[arg(long, conflicts_with = "counts", required_unless_present = "counts")]
        phi: Option<f64>,
        /// Event and non-event counts instead of --phi.
        #[arg(long, num_args = 2, value_names = ["EVENTS", "NON_EVENTS"])]
        counts: Option<Vec<u64>>,
        /// Simulated subjects for the conversion
        #[arg(long, default_value_t = DEFAULT_SIM_SIZE)]
        sim_size: usize,
    },
    /// Run the shrinkage simulation study for one scenario.
    Simulate {
        /// Catalog scenario id (1 to 12).
        scenario: Option<u32>,
        /// TOML file with a custom scenario (label, beta).
        #[arg(long, conflicts_with = "scenario")]
        spec: Option<PathBuf>,
        /// Development sizes, comma separated; N_MN and N_DL are allowed.
        #[arg(long = "n", value_delimiter = ',')]
        n: Vec<String>,
        /// Replicates per development size
        #[arg(long)]
        reps: Option<usize>,
        /// Worker threads; 0 means one per core.
        #[arg(long)]
        workers: Option<usize>,
        /// Cohort size used to derive N_MN and N_DL
        #[arg(long)]
        calc_cohort: Option<usize>,
        /// Validation cohort size
        #[arg(long)]
        validation_n: Option<usize>,
    },
    /// List the built-in simulation scenarios.
    Scenarios,
}

pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::Io { .. } | Error::Csv { .. } => EXIT_IO,
        Error::Config(_)
        | Error::Validation(_)
        | Error::Incomplete(_)
        | Error::InvalidDistribution(_)
        | Error::Domain { .. }
        | Error::Inconsistent { .. }
        | Error::DegenerateCategory { .. } => EXIT_INVALID,
        _ => EXIT_FAILURE,
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(cli: &Cli, stdout: &mut dyn Write, name: &str, text: String, json: String) -> Result<()> {
    if let Some(dir) = &cli.out {
        write_file(&dir.join(format!("{name}.txt")), &text)?;
        write_file(&dir.join(format!("{name}.json")), &json)?;
    }
    let shown = if cli.json { json } else { text };
    writeln!(stdout, "{}", shown.trim_end()).map_err(|source| Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn cmd_samplesize(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("samplesize needs --config <file>".into()))?;
    let mut cfg = StudyConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    let analysis = analyse(&cfg)?;
    emit(cli, stdout, "samplesize", analysis.render_text(), analysis.to_json())
}

#[derive(Serialize)]
struct CStatReport {
    schema_version: u32,
    r2_cs: f64,
    max_r2_cs: f64,
    #[serde(flatten)]
    estimate: crate::cstat::CStatEstimate,
}

fn cmd_cstat2rsq(
    cli: &Cli,
    stdout: &mut dyn Write,
    c: f64,
    phi: Option<f64>,
    counts: Option<&[u64]>,
    sim_size: usize,
) -> Result<()> {
    let phi = match (phi, counts) {
        (Some(p), _) => PairPrevalence::new(p)?,
        (None, Some(&[e, ne])) => PairPrevalence::from_counts(e, ne)?,
        _ => return Err(Error::Config("give --phi or --counts EVENTS NON_EVENTS".into())),
    };
    let spec = CStatSpec::new(c, phi, cli.seed.unwrap_or(DEFAULT_SEED)).with_sim_size(sim_size);
    let est = rsq_from_cstat(&spec)?;
    let max = crate::rsq::max_rcs_pair(phi);
    let text = format!(
        "C = {c}, φ = {}\nR²_CS = {:.4} (max {:.4}, Nagelkerke {:.4})\nachieved C = {:.4}, φ = {:.4}; μ = {:.4}, σ = {:.4}\nsimulation size {}, seed {}\n",
        phi.value(),
        est.r2_cs,
        max,
        est.r2_cs / max,
        est.achieved_c,
        est.achieved_prevalence,
        est.mu,
        est.sigma,
        spec.sim_size,
        spec.seed
    );
    let json = serde_json::to_string_pretty(&CStatReport {
        schema_version: SCHEMA_VERSION,
        r2_cs: est.r2_cs,
        max_r2_cs: max,
        estimate: est,
    })
    .expect("report serialises");
    emit(cli, stdout, "cstat2rsq", text, json)
}

#[derive(Serialize)]
struct CellReport<'a> {
    size: String,
    n: usize,
    n_converged: usize,
    n_excluded: usize,
    summary: Option<&'a ShrinkageSummary>,
}

#[derive(Serialize)]
struct StudyReport<'a> {
    schema_version: u32,
    scenario: &'a ScenarioSpec,
    seed: u64,
    reps: usize,
    n_mn: Option<&'a DirectSize>,
    n_dl: Option<&'a DistinctSize>,
    cells: Vec<CellReport<'a>>,
}

fn study_text(study: &StudyResult) -> String {
    let mut s = format!("{}, {} replicates, seed {}\n", study.scenario.label, study.reps, study.seed);
    if let Some(m) = &study.n_mn {
        s += &format!("N_MN = {} (R²_CS,adj = {:.4}, S_VH = {:.4})\n", m.n, m.r2_adj, m.s_vh);
    }
    if let Some(d) = &study.n_dl {
        let per: Vec<String> = d.pairs.iter().map(|p| format!("n_{},1 = {}", p.k, p.n)).collect();
        s += &format!("N_DL = {} ({})\n", d.n, per.join(", "));
    }
    s += &format!("\n{:>8} {:>6} {:>6}", "N", "kept", "excl");
    for e in Estimand::ALL {
        s += &format!(" {:>10}", e.name());
    }
    s += "\n";
    for cell in &study.cells {
        let excl = cell.n_excluded();
        let label = match cell.size {
            DevSize::Fixed(_) => cell.n.to_string(),
            other => format!("{other}={}", cell.n),
        };
        s += &format!("{label:>8} {:>6} {excl:>6}", cell.replicates.len() - excl);
        for e in Estimand::ALL {
            match &cell.summary {
                Some(sum) => s += &format!(" {:>10.4}", sum.median(e)),
                None => s += &format!(" {:>10}", "-"),
            }
        }
        s += "\n";
    }
    s += "(medians over converged replicates)\n";
    s
}

fn cmd_simulate(cli: &Cli, stdout: &mut dyn Write, args: &Command) -> Result<()> {
    let Command::Simulate {
        scenario,
        spec,
        n,
        reps,
        workers,
        calc_cohort,
        validation_n,
    } = args
    else {
        unreachable!()
    };
    let mut sim = match &cli.config {
        Some(path) => SimulationConfig::load(path)?,
        None => SimulationConfig::default(),
    };
    if let Some(id) = scenario {
        sim.scenario = Some(*id);
        sim.scenario_spec = None;
    }
    if let Some(path) = spec {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        let parsed: ScenarioSpec =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        sim.scenario = None;
        sim.scenario_spec = Some(parsed);
    }
    if !n.is_empty() {
        sim.n_values = Some(n.clone());
    }
    sim.reps = reps.or(sim.reps);
    sim.workers = workers.or(sim.workers);
    sim.calc_cohort = calc_cohort.or(sim.calc_cohort);
    sim.validation_n = validation_n.or(sim.validation_n);
    sim.seed = cli.seed.or(sim.seed);

    let rc = sim.run_config()?;
    let study = simstudy::run_study(&rc)?;
    if let Some(dir) = &cli.out {
        simstudy::write_study(&study, dir)?;
    }
    let report = StudyReport {
        schema_version: SCHEMA_VERSION,
        scenario: &study.scenario,
        seed: study.seed,
        reps: study.reps,
        n_mn: study.n_mn.as_ref(),
        n_dl: study.n_dl.as_ref(),
        cells: study
            .cells
            .iter()
            .map(|c| CellReport {
                size: c.size.to_string(),
                n: c.n,
                n_converged: c.replicates.len() - c.n_excluded(),
                n_excluded: c.n_excluded(),
                summary: c.summary.as_ref(),
            })
            .collect(),
    };
    let json = serde_json::to_string_pretty(&report).expect("report serialises");
    let shown = if cli.json { json } else { study_text(&study) };
    writeln!(stdout, "{}", shown.trim_end()).map_err(|source| Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn cmd_scenarios(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let all = catalog();
    let mut text = String::new();
    for s in &all {
        let f = s.expected_freqs;
        text += &format!("{:>2}  {}  expected ({:.2}, {:.2}, {:.2})\n", s.id, s.label, f[0], f[1], f[2]);
        for (j, row) in s.beta.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|b| format!("{b:>6}")).collect();
            text += &format!("      β_·,{}: {}\n", j + 2, cells.join(" "));
        }
    }
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "scenarios": all,
    }))
    .expect("catalog serialises");
    emit(cli, stdout, "scenarios", text, json)
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Samplesize => cmd_samplesize(cli, stdout),
        Command::Cstat2rsq { c, phi, counts, sim_size } => {
            cmd_cstat2rsq(cli, stdout, *c, *phi, counts.as_deref(), *sim_size)
        }
        cmd @ Command::Simulate { .. } => cmd_simulate(cli, stdout, cmd),
        Command::Scenarios => cmd_scenarios(cli, stdout),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match run(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
