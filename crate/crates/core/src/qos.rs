//! Per-user rate requirements and the minimum total power that meets them.

use crate::error::{Error, Result};
use crate::scalar::{exp2_m1, Scalar};
use crate::system_model::{ChannelState, SystemParams};

/// Minimum rates (bits/s/Hz) with the SINR targets they imply.
///
/// `a_const[k] = 2^r_min[k] - 1` is the SINR user `k` needs, and
/// `d_const[k] = a_const[k] / (a_const[k] + 1)` is the fraction of the power
/// still undecided at user `k` that it must take when its constraint is tight.
#[derive(Debug, Clone, PartialEq)]
pub struct QosProfile<T> {
    r_min: Vec<T>,
    a_const: Vec<T>,
    d_const: Vec<T>,
}

impl<T: Scalar> QosProfile<T> {
    pub fn new(r_min: Vec<T>) -> Result<Self> {
        if let Some(r) = r_min.iter().find(|r| !(r.is_finite() && **r >= T::zero())) {
            return Err(Error::invalid(format!("minimum rate {r:?} must be finite and nonnegative")));
        }
        let a_const: Vec<T> = r_min.iter().map(|&r| exp2_m1(r)).collect();
        let d_const = a_const.iter().map(|&a| a / (a + T::one())).collect();
        Ok(QosProfile { r_min, a_const, d_const })
    }

    /// Same minimum rate for `users` users.
    pub fn uniform(users: usize, r_min: T) -> Result<Self> {
        Self::new(vec![r_min; users])
    }

    pub fn users(&self) -> usize {
        self.r_min.len()
    }

    pub fn r_min(&self) -> &[T] {
        &self.r_min
    }

    pub fn a_const(&self) -> &[T] {
        &self.a_const
    }

    pub fn d_const(&self) -> &[T] {
        &self.d_const
    }
}

/// Smallest per-user powers meeting every rate requirement.
#[derive(Debug, Clone, PartialEq)]
pub struct MinPowerResult<T> {
    pub per_user_w: Vec<T>,
    pub total_w: T,
    /// `total_w / P`; the problem is feasible iff this is at most one.
    pub theta_min: T,
}

/// Computes the minimum powers with every QoS constraint tight, strongest user
/// first: `P_K = A_K σ²/|h_K|²`, then `P_k = A_k (Σ_{i>k} P_i + σ²/|h_k|²)`.
pub fn min_power<T: Scalar>(
    channel: &ChannelState<T>,
    params: &SystemParams<T>,
    qos: &QosProfile<T>,
) -> Result<MinPowerResult<T>> {
    check_users(channel, qos)?;
    let k_users = channel.users();
    let mut per_user_w = vec![T::zero(); k_users];
    // Power of all stronger users, i.e. interference left after SIC at user k.
    let mut above = T::zero();
    for k in (0..k_users).rev() {
        let p = qos.a_const[k] * (above + params.noise_power_w / channel.gains()[k]);
        per_user_w[k] = p;
        above = above + p;
    }
    Ok(MinPowerResult {
        per_user_w,
        total_w: above,
        theta_min: above / params.total_power_w,
    })
}

/// Whether the budget covers the minimum power, allowing a relative slack of
/// 1e-12 so that `P == P_Min` computed along different paths still passes.
pub fn is_feasible<T: Scalar>(params: &SystemParams<T>, min_power: &MinPowerResult<T>) -> bool {
    min_power.total_w <= params.total_power_w * (T::one() + T::lit(1e-12))
}

pub(crate) fn check_users<T: Scalar>(channel: &ChannelState<T>, qos: &QosProfile<T>) -> Result<()> {
    if channel.users() != qos.users() {
        return Err(Error::invalid(format!(
            "channel has {} users but QoS profile has {}",
            channel.users(),
            qos.users()
        )));
    }
    Ok(())
}
