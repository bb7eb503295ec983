//! Serializable command reports and their plain-text rendering.

use std::fmt;

use serde::{Deserialize, Serialize};

use noma_ee::{watts_to_dbm, Allocation, ChannelState, MinPowerResult, SystemParams, TdmaResult};

/// dBm of a power, or `None` for zero power.
fn dbm(watts: f64) -> Option<f64> {
    (watts > 0.0).then(|| watts_to_dbm(watts))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub budget_w: f64,
    pub budget_dbm: f64,
    pub noise_w: f64,
    pub circuit_w: f64,
    pub pathloss_exponent: f64,
    /// Ascending.
    pub gains: Vec<f64>,
    pub distances_m: Vec<f64>,
    pub r_min: Vec<f64>,
}

impl InstanceSummary {
    pub fn new(params: &SystemParams<f64>, channel: &ChannelState<f64>, r_min: &[f64]) -> Self {
        InstanceSummary {
            budget_w: params.total_power_w,
            budget_dbm: watts_to_dbm(params.total_power_w),
            noise_w: params.noise_power_w,
            circuit_w: params.circuit_power_w,
            pathloss_exponent: params.pathloss_exponent,
            gains: channel.gains().to_vec(),
            distances_m: channel.distances_m().to_vec(),
            r_min: r_min.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub instance: InstanceSummary,
    pub per_user_min_power_w: Vec<f64>,
    pub p_min_w: f64,
    pub p_min_dbm: Option<f64>,
    pub theta_min: f64,
    pub feasible: bool,
}

impl FeasibilityReport {
    pub fn new(instance: InstanceSummary, min: &MinPowerResult<f64>, feasible: bool) -> Self {
        FeasibilityReport {
            instance,
            per_user_min_power_w: min.per_user_w.clone(),
            p_min_w: min.total_w,
            p_min_dbm: dbm(min.total_w),
            theta_min: min.theta_min,
            feasible,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationReport {
    pub theta: f64,
    pub transmit_power_w: f64,
    pub transmit_power_dbm: Option<f64>,
    pub coeffs: Vec<f64>,
    pub powers_w: Vec<f64>,
    pub rates: Vec<f64>,
    pub sum_rate: f64,
    pub ee: f64,
}

impl AllocationReport {
    pub fn new(alloc: &Allocation<f64>, budget_w: f64) -> Self {
        AllocationReport {
            theta: alloc.theta,
            transmit_power_w: alloc.transmit_power_w,
            transmit_power_dbm: dbm(alloc.transmit_power_w),
            coeffs: alloc.coeffs.clone(),
            powers_w: alloc.coeffs.iter().map(|a| a * budget_w).collect(),
            rates: alloc.rates.clone(),
            sum_rate: alloc.sum_rate,
            ee: alloc.ee,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocateReport {
    pub instance: InstanceSummary,
    pub theta_min: f64,
    pub allocation: AllocationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub theta_star: f64,
    pub ee: f64,
    pub iterations: usize,
    /// `|EE_bisection - EE_dinkelbach| / EE_dinkelbach`.
    pub relative_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub instance: InstanceSummary,
    pub theta_min: f64,
    pub theta_star: f64,
    pub boundary: String,
    pub iterations: usize,
    pub allocation: AllocationReport,
    pub cross_check: Option<CrossCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdmaReport {
    pub instance: InstanceSummary,
    pub qos_basis: String,
    pub required_power_w: f64,
    pub feasible: bool,
    pub power_w: f64,
    pub power_dbm: Option<f64>,
    pub rates: Vec<f64>,
    pub sum_rate: f64,
    pub ee: f64,
}

impl TdmaReport {
    pub fn new(instance: InstanceSummary, qos_basis: &str, required_power_w: f64, r: &TdmaResult<f64>) -> Self {
        TdmaReport {
            instance,
            qos_basis: qos_basis.to_string(),
            required_power_w,
            feasible: r.feasible,
            power_w: r.power_w,
            power_dbm: dbm(r.power_w),
            rates: r.rates.clone(),
            sum_rate: r.sum_rate,
            ee: r.ee,
        }
    }
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6e}")).collect::<Vec<_>>().join(", ")
}

fn opt_dbm(v: Option<f64>) -> String {
    v.map_or_else(|| "-inf".to_string(), |d| format!("{d:.4}"))
}

impl fmt::Display for InstanceSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "budget P:          {:.6e} W ({:.4} dBm)", self.budget_w, self.budget_dbm)?;
        writeln!(f, "noise:             {:.6e} W", self.noise_w)?;
        writeln!(f, "circuit power:     {:.6e} W", self.circuit_w)?;
        writeln!(f, "gains:             [{}]", list(&self.gains))?;
        writeln!(f, "minimum rates:     [{}]", list(&self.r_min))
    }
}

impl fmt::Display for AllocationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theta:             {:.12}", self.theta)?;
        writeln!(
            f,
            "transmit power:    {:.6e} W ({} dBm)",
            self.transmit_power_w,
            opt_dbm(self.transmit_power_dbm)
        )?;
        writeln!(f, "coefficients:      [{}]", list(&self.coeffs))?;
        writeln!(f, "powers (W):        [{}]", list(&self.powers_w))?;
        writeln!(f, "rates:             [{}]", list(&self.rates))?;
        writeln!(f, "sum rate:          {:.10} bits/s/Hz", self.sum_rate)?;
        writeln!(f, "EE:                {:.10} bits/J/Hz", self.ee)
    }
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.instance)?;
        writeln!(f, "min powers (W):    [{}]", list(&self.per_user_min_power_w))?;
        writeln!(f, "P_Min:             {:.6e} W ({} dBm)", self.p_min_w, opt_dbm(self.p_min_dbm))?;
        writeln!(f, "theta_min:         {:.12}", self.theta_min)?;
        writeln!(f, "feasible:          {}", if self.feasible { "yes" } else { "no" })
    }
}

impl fmt::Display for AllocateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.instance)?;
        writeln!(f, "theta_min:         {:.12}", self.theta_min)?;
        write!(f, "{}", self.allocation)
    }
}

impl fmt::Display for OptimizeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.instance)?;
        writeln!(f, "theta_min:         {:.12}", self.theta_min)?;
        writeln!(f, "boundary:          {}", self.boundary)?;
        writeln!(f, "iterations:        {}", self.iterations)?;
        write!(f, "{}", self.allocation)?;
        if let Some(c) = &self.cross_check {
            writeln!(f, "dinkelbach theta:  {:.12}", c.theta_star)?;
            writeln!(f, "dinkelbach EE:     {:.10}", c.ee)?;
            writeln!(f, "relative EE gap:   {:.3e}", c.relative_gap)?;
        }
        Ok(())
    }
}

impl fmt::Display for TdmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.instance)?;
        writeln!(f, "QoS basis:         {}", self.qos_basis)?;
        writeln!(f, "required power:    {:.6e} W", self.required_power_w)?;
        writeln!(f, "feasible:          {}", if self.feasible { "yes" } else { "no" })?;
        writeln!(f, "slot power:        {:.6e} W ({} dBm)", self.power_w, opt_dbm(self.power_dbm))?;
        writeln!(f, "rates:             [{}]", list(&self.rates))?;
        writeln!(f, "sum rate:          {:.10} bits/s/Hz", self.sum_rate)?;
        writeln!(f, "EE:                {:.10} bits/J/Hz", self.ee)
    }
}
