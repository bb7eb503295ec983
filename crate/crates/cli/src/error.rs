use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(
        "infeasible: minimum total power {p_min_w:e} W ({p_min_dbm:.4} dBm) exceeds budget {budget_w:e} W ({budget_dbm:.4} dBm)"
    )]
    Infeasible {
        p_min_w: f64,
        p_min_dbm: f64,
        budget_w: f64,
        budget_dbm: f64,
    },
    #[error("infeasible: theta {theta} is below theta_min {theta_min}")]
    InfeasibleTheta { theta: f64, theta_min: f64 },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write output: {0}")]
    Output(String),
    #[error(transparent)]
    Solver(noma_ee::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Infeasible { .. } | CliError::InfeasibleTheta { .. } => EXIT_INFEASIBLE,
            CliError::Io { .. } | CliError::Output(_) => EXIT_IO,
            CliError::Solver(noma_ee::Error::InvalidInput(_)) => EXIT_USAGE,
            CliError::Solver(_) => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<noma_ee::Error> for CliError {
    fn from(e: noma_ee::Error) -> Self {
        use noma_ee::{watts_to_dbm, Error};
        match e {
            Error::Infeasible { p_min_w, budget_w } => CliError::Infeasible {
                p_min_w,
                p_min_dbm: watts_to_dbm(p_min_w),
                budget_w,
                budget_dbm: watts_to_dbm(budget_w),
            },
            Error::InfeasibleTheta { theta, theta_min } => CliError::InfeasibleTheta { theta, theta_min },
            Error::InvalidInput(msg) => CliError::Usage(msg),
            other => CliError::Solver(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
