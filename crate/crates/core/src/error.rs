use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("category {index} has no events; its log-likelihood contribution is undefined")]
    DegenerateCategory { index: usize },

    #[error("{what} = {value} is outside its valid domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid outcome distribution: {0}")]
    InvalidDistribution(String),

    #[error("Cox-Snell R² {r2} exceeds its maximum attainable value {max}")]
    Inconsistent { r2: f64, max: f64 },

    #[error("infeasible target: {0}")]
    Infeasible(String),

    #[error("pair {{{k},{r}}}: {source}")]
    Pair {
        k: usize,
        r: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("incomplete specification: {0}")]
    Incomplete(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("no convergence after {iterations} iterations (score max-norm {score_norm:e})")]
    NonConvergence { iterations: usize, score_norm: f64 },

    #[error("separation detected at iteration {iterations}: |coefficient| = {magnitude}")]
    Separation { iterations: usize, magnitude: f64 },

    #[error("singular information matrix (reciprocal condition estimate {rcond:e})")]
    SingularHessian { rcond: f64 },

    #[error("linear predictor has zero variance")]
    DegeneratePredictor,

    #[error("model log-likelihood {lnl_model} is below the null log-likelihood {lnl_null}")]
    ModelOrdering { lnl_null: f64, lnl_model: f64 },

    #[error("concordance undefined: category {0} has no subjects")]
    UndefinedConcordance(usize),

    #[error("cannot calibrate C-statistic simulation: {0}")]
    Calibration(String),

    #[error("summary is empty: all {excluded} replicates were excluded")]
    EmptySummary { excluded: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain { what, value, domain }
    }

    pub(crate) fn in_pair(self, k: usize, r: usize) -> Self {
        Error::Pair {
            k,
            r,
            source: Box::new(self),
        }
    }

    /// Unwraps pair context to the underlying cause.
    pub fn root(&self) -> &Error {
        match self {
            Error::Pair { source, .. } => source.root(),
            other => other,
        }
    }
}
