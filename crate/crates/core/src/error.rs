use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The budget cannot meet every user's minimum rate.
    #[error("infeasible: minimum required power {p_min_w:e} W exceeds budget {budget_w:e} W")]
    Infeasible { p_min_w: f64, budget_w: f64 },

    /// `theta` lies below the smallest fraction that meets the QoS constraints.
    #[error("theta {theta} is below the feasible minimum {theta_min}")]
    InfeasibleTheta { theta: f64, theta_min: f64 },

    #[error("{method} did not converge within {iterations} iterations")]
    NoConvergence { method: &'static str, iterations: usize },

    /// A structural property that the theory guarantees did not hold.
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
