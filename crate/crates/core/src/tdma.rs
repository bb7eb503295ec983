//! Orthogonal baseline: `K` equal time slots, one per user, all transmitted at
//! the same fixed power `p`. Each user's delivered rate is
//! `(1/K) log2(1 + p|h_k|²/σ²)`, the average transmit power is `p`, and the
//! EE-optimal `p` is found by exhaustive search over a power grid.
//!
//! By default a user's minimum rate is checked against the rate of its own
//! slot ([`QosBasis::PerSlot`]). Checking the time-averaged rate instead
//! ([`QosBasis::TimeAveraged`]) makes every TDMA-feasible draw NOMA-feasible
//! as well, since equal-slot time sharing at power `p` lies inside the NOMA
//! rate region at the same power.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qos::{check_users, QosProfile};
use crate::scalar::{compensated_sum, exp2_m1, log2_1p, Scalar};
use crate::system_model::{ChannelState, SystemParams};

/// Spacing of the exhaustive-search power grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerGrid {
    Linear,
    Decibel,
}

/// Which rate the minimum-rate requirement is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QosBasis {
    /// `(1/K) log2(1 + p|h_k|²/σ²) ≥ r_k`: threshold `(2^{K r_k} - 1) σ²/|h_k|²`.
    TimeAveraged,
    /// `log2(1 + p|h_k|²/σ²) ≥ r_k` within the user's own slot:
    /// threshold `(2^{r_k} - 1) σ²/|h_k|²`.
    PerSlot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TdmaConfig {
    pub grid_points: usize,
    pub power_grid_scale: PowerGrid,
    pub qos_basis: QosBasis,
}

impl Default for TdmaConfig {
    fn default() -> Self {
        TdmaConfig {
            grid_points: 2001,
            power_grid_scale: PowerGrid::Decibel,
            qos_basis: QosBasis::PerSlot,
        }
    }
}

/// Lower grid edge, relative to the budget, when no power is required at all
/// (every minimum rate is zero) and a decibel grid cannot start at zero.
const ZERO_REQUIREMENT_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TdmaResult<T> {
    pub power_w: T,
    /// Time-averaged rates, `(1/K)` of each slot rate.
    pub rates: Vec<T>,
    pub sum_rate: T,
    pub ee: T,
    pub feasible: bool,
}

/// Per-user time-averaged rates at slot power `power_w`.
pub fn tdma_rates<T: Scalar>(power_w: T, channel: &ChannelState<T>, params: &SystemParams<T>) -> Vec<T> {
    let share = T::one() / T::from_usize(channel.users()).expect("user count fits");
    channel
        .gains()
        .iter()
        .map(|&h| share * log2_1p(power_w * h / params.noise_power_w))
        .collect()
}

/// Smallest slot power meeting every time-averaged minimum rate:
/// `max_k (2^{K r_k} - 1) σ²/|h_k|²`.
pub fn tdma_min_power<T: Scalar>(
    channel: &ChannelState<T>,
    params: &SystemParams<T>,
    qos: &QosProfile<T>,
) -> Result<T> {
    tdma_required_power(channel, params, qos, QosBasis::TimeAveraged)
}

/// Smallest slot power meeting every minimum rate under `basis`.
pub fn tdma_required_power<T: Scalar>(
    channel: &ChannelState<T>,
    params: &SystemParams<T>,
    qos: &QosProfile<T>,
    basis: QosBasis,
) -> Result<T> {
    check_users(channel, qos)?;
    let k = match basis {
        QosBasis::TimeAveraged => T::from_usize(channel.users()).expect("user count fits"),
        QosBasis::PerSlot => T::one(),
    };
    Ok(channel
        .gains()
        .iter()
        .zip(qos.r_min())
        .map(|(&h, &r)| exp2_m1(k * r) * params.noise_power_w / h)
        .fold(T::zero(), T::max))
}

/// Exhaustive search for the EE-maximizing slot power between the power the
/// configured QoS basis requires and `P`. Returns `feasible = false` and zero EE when the
/// budget cannot meet the minimum rates. Ties go to the lower power.
pub fn tdma_max_ee<T: Scalar>(
    channel: &ChannelState<T>,
    params: &SystemParams<T>,
    qos: &QosProfile<T>,
    config: &TdmaConfig,
) -> Result<TdmaResult<T>> {
    if config.grid_points < 2 {
        return Err(Error::invalid("TDMA power grid needs at least two points"));
    }
    let required = tdma_required_power(channel, params, qos, config.qos_basis)?;
    let budget = params.total_power_w;
    if required > budget * (T::one() + T::lit(1e-12)) {
        return Ok(TdmaResult {
            power_w: T::zero(),
            rates: vec![T::zero(); channel.users()],
            sum_rate: T::zero(),
            ee: T::zero(),
            feasible: false,
        });
    }
    let low = required.min(budget);

    let evaluate = |p: T| {
        let rates = tdma_rates(p, channel, params);
        let sum_rate = compensated_sum(rates.iter().copied());
        let ee = sum_rate / (p + params.circuit_power_w);
        TdmaResult {
            power_w: p,
            rates,
            sum_rate,
            ee,
            feasible: true,
        }
    };

    let grid = power_grid(low, budget, config);
    let mut best = evaluate(grid[0]);
    for &p in &grid[1..] {
        let candidate = evaluate(p);
        if candidate.ee > best.ee {
            best = candidate;
        }
    }
    Ok(best)
}

fn power_grid<T: Scalar>(low: T, high: T, config: &TdmaConfig) -> Vec<T> {
    let n = config.grid_points;
    let last = T::from_usize(n - 1).expect("grid size fits");
    if low >= high {
        return vec![high];
    }
    let mut grid: Vec<T> = match config.power_grid_scale {
        PowerGrid::Linear => (0..n)
            .map(|i| low + (high - low) * T::from_usize(i).unwrap() / last)
            .collect(),
        PowerGrid::Decibel => {
            let low = if low > T::zero() { low } else { high * T::lit(ZERO_REQUIREMENT_FLOOR) };
            let ratio = (high / low).ln();
            (0..n)
                .map(|i| low * (ratio * T::from_usize(i).unwrap() / last).exp())
                .collect()
        }
    };
    // Pin the endpoints exactly.
    grid[0] = grid[0].max(low);
    grid[n - 1] = high;
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(p: f64) -> SystemParams<f64> {
        SystemParams::new(p, 1e-10, 1.0, 3.0).unwrap()
    }

    #[test]
    fn rate_examples() {
        let ch = ChannelState::from_gains(vec![1e-6]).unwrap();
        assert_relative_eq!(tdma_rates(0.01, &ch, &params(1.0))[0], 101f64.log2(), max_relative = 1e-14);

        let ch = ChannelState::from_gains(vec![3e-10, 15e-10]).unwrap();
        let r = tdma_rates(1.0, &ch, &params(1.0));
        assert_relative_eq!(r[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(r[1], 2.0, max_relative = 1e-14);
        assert_eq!(tdma_rates(0.0, &ch, &params(1.0)), vec![0.0, 0.0]);
    }

    #[test]
    fn min_power_examples() {
        let ch = ChannelState::from_gains(vec![1e-6]).unwrap();
        let q = QosProfile::uniform(1, 1.0).unwrap();
        assert_relative_eq!(tdma_min_power(&ch, &params(1.0), &q).unwrap(), 1e-4, max_relative = 1e-14);

        let ch = ChannelState::from_gains(vec![1e-7, 1e-6]).unwrap();
        let q = QosProfile::uniform(2, 1.0).unwrap();
        let p_req = tdma_min_power(&ch, &params(1.0), &q).unwrap();
        assert_relative_eq!(p_req, 3e-3, max_relative = 1e-14);
        // First feasible point of a fine linear scan sits right at the closed form.
        let step = 1e-6;
        let first = (0..10_000)
            .map(|i| i as f64 * step)
            .find(|&p| tdma_rates(p, &ch, &params(1.0)).iter().all(|&r| r >= 1.0 - 1e-12))
            .unwrap();
        assert!((first - p_req).abs() <= step);

        let q0 = QosProfile::uniform(2, 0.0).unwrap();
        assert_eq!(tdma_min_power(&ch, &params(1.0), &q0).unwrap(), 0.0);
    }

    #[test]
    fn per_slot_basis_checks_slot_rates() {
        let ch = ChannelState::from_gains(vec![1e-7, 1e-6]).unwrap();
        let q = QosProfile::uniform(2, 1.0).unwrap();
        let p_slot = tdma_required_power(&ch, &params(1.0), &q, QosBasis::PerSlot).unwrap();
        assert_relative_eq!(p_slot, 1e-3, max_relative = 1e-14);
        assert!(p_slot < tdma_min_power(&ch, &params(1.0), &q).unwrap());

        // Budget between the two thresholds: feasible only per slot.
        let p = params(2e-3);
        let slot = tdma_max_ee(&ch, &p, &q, &TdmaConfig::default()).unwrap();
        assert!(slot.feasible);
        assert!(slot.rates.iter().all(|&r| 2.0 * r >= 1.0 - 1e-12));
        let avg = TdmaConfig { qos_basis: QosBasis::TimeAveraged, ..TdmaConfig::default() };
        assert!(!tdma_max_ee(&ch, &p, &q, &avg).unwrap().feasible);
    }

    #[test]
    fn infeasible_budget_gives_zero_ee() {
        let ch = ChannelState::from_gains(vec![1e-7, 1e-6]).unwrap();
        let q = QosProfile::uniform(2, 1.0).unwrap();
        let r = tdma_max_ee(&ch, &params(5e-4), &q, &TdmaConfig::default()).unwrap();
        assert!(!r.feasible);
        assert_eq!(r.ee, 0.0);
    }

    #[test]
    fn feasible_result_meets_rates_and_ee_definition() {
        let ch = ChannelState::from_gains(vec![1e-7, 1e-6]).unwrap();
        let q = QosProfile::uniform(2, 1.0).unwrap();
        let p = params(10.0);
        for scale in [PowerGrid::Decibel, PowerGrid::Linear] {
            let cfg = TdmaConfig { grid_points: 501, power_grid_scale: scale, qos_basis: QosBasis::TimeAveraged };
            let r = tdma_max_ee(&ch, &p, &q, &cfg).unwrap();
            assert!(r.feasible);
            assert!(r.rates.iter().all(|&x| x >= 1.0 - 1e-12));
            assert_relative_eq!(r.ee, r.sum_rate / (r.power_w + 1.0), max_relative = 1e-14);
            assert!(r.power_w >= 3e-3 && r.power_w <= 10.0);
        }
    }

    #[test]
    fn grid_endpoints_and_monotone_feasibility() {
        let cfg = TdmaConfig { grid_points: 11, power_grid_scale: PowerGrid::Decibel, ..TdmaConfig::default() };
        let g = power_grid(1e-3, 1.0, &cfg);
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[10], 1.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_relative_eq!(g[5], 10f64.powf(-1.5), max_relative = 1e-12);
        assert_eq!(power_grid(0.5, 0.5, &cfg), vec![0.5]);
        let g0 = power_grid(0.0, 2.0, &cfg);
        assert_relative_eq!(g0[0], 2e-9, max_relative = 1e-12);

        let ch = ChannelState::from_gains(vec![1e-7, 1e-6]).unwrap();
        let mut seen = false;
        for p in power_grid(1e-5, 1.0, &cfg) {
            let ok = tdma_rates(p, &ch, &params(1.0)).iter().all(|&r| r >= 1.0);
            assert!(!seen || ok);
            seen |= ok;
        }
    }

    #[test]
    fn rejects_degenerate_grid() {
        let ch = ChannelState::from_gains(vec![1e-6]).unwrap();
        let q = QosProfile::uniform(1, 1.0).unwrap();
        let cfg = TdmaConfig { grid_points: 1, power_grid_scale: PowerGrid::Decibel, ..TdmaConfig::default() };
        assert!(tdma_max_ee(&ch, &params(1.0), &q, &cfg).is_err());
    }
}
