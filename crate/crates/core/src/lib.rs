//! Energy-efficient power allocation for single-antenna downlink NOMA.
//!
//! The solver pipeline is:
//!
//! 1. [`qos::min_power`] computes the smallest total transmit power that meets
//!    every user's minimum rate under SIC decoding in ascending-gain order.
//! 2. [`allocation::Problem::optimal_coeffs`] gives the closed-form power split
//!    that maximizes the sum rate for a fixed consumed fraction `theta` of the
//!    budget.
//! 3. [`optimizer::maximize_ee`] bisects on the derivative of the resulting
//!    univariate energy-efficiency curve, which is strictly pseudo-concave.
//!
//! [`tdma`] holds the orthogonal baseline and [`montecarlo`] the averaged
//! experiment sweeps. All numeric code is generic over [`Scalar`]; the `*F64`
//! aliases below name the instantiations used by the experiment engine.

pub mod allocation;
pub mod error;
pub mod montecarlo;
pub mod optimizer;
pub mod qos;
pub mod scalar;
pub mod system_model;
pub mod tdma;

pub use allocation::{rates, sum_rate_telescoped, Allocation, AllocationSlopes, Problem};
pub use error::{Error, Result};
pub use optimizer::{
    dinkelbach_maximize, max_se_allocation, maximize_ee, Boundary, OptimizerConfig, Optimum,
};
pub use qos::{is_feasible, min_power, MinPowerResult, QosProfile};
pub use scalar::Scalar;
pub use system_model::{
    dbm_to_watts, derived_constants, generate_channel, watts_to_dbm, ChannelState,
    DerivedConstants, SystemParams,
};
pub use tdma::{
    tdma_max_ee, tdma_min_power, tdma_rates, tdma_required_power, PowerGrid, QosBasis, TdmaConfig, TdmaResult,
};

pub type SystemParamsF64 = SystemParams<f64>;
pub type ChannelStateF64 = ChannelState<f64>;
pub type QosProfileF64 = QosProfile<f64>;
pub type ProblemF64 = Problem<f64>;
pub type AllocationF64 = Allocation<f64>;
pub type OptimumF64 = Optimum<f64>;
pub type TdmaResultF64 = TdmaResult<f64>;

pub type SystemParamsF32 = SystemParams<f32>;
pub type ChannelStateF32 = ChannelState<f32>;
pub type QosProfileF32 = QosProfile<f32>;
pub type ProblemF32 = Problem<f32>;
pub type AllocationF32 = Allocation<f32>;
