//! Sum-rate-optimal power split for a fixed consumed power `θP`, and the
//! energy-efficiency curve `EE(θ)` it induces.
//!
//! For fixed `θ` every user except the strongest runs exactly at its minimum
//! rate; the strongest user absorbs whatever is left. The coefficients are
//! affine in `θ` with strictly positive slopes (when every minimum rate is
//! positive), which makes the numerator of `EE(θ)` concave and `EE(θ)` itself
//! strictly pseudo-concave on `[θ_min, 1]`.

use crate::error::{Error, Result};
use crate::qos::{check_users, is_feasible, min_power, MinPowerResult, QosProfile};
use crate::scalar::{compensated_sum, log2_1p, Scalar};
use crate::system_model::{ChannelState, SystemParams};

/// Outcome of a power split: coefficients (fractions of `P`), rates and EE.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation<T> {
    pub coeffs: Vec<T>,
    pub theta: T,
    pub rates: Vec<T>,
    pub sum_rate: T,
    pub transmit_power_w: T,
    /// bits/Joule/Hz
    pub ee: T,
}

impl<T: Scalar> Allocation<T> {
    /// Evaluates rates and EE for arbitrary nonnegative coefficients.
    pub fn from_coeffs(coeffs: Vec<T>, channel: &ChannelState<T>, params: &SystemParams<T>) -> Self {
        let rates = rates(&coeffs, channel, params);
        let sum_rate = compensated_sum(rates.iter().copied());
        let theta = compensated_sum(coeffs.iter().copied());
        let transmit_power_w = theta * params.total_power_w;
        let ee = sum_rate / (transmit_power_w + params.circuit_power_w);
        Allocation {
            coeffs,
            theta,
            rates,
            sum_rate,
            transmit_power_w,
            ee,
        }
    }
}

/// `d a_k*/dθ` for every user.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationSlopes<T> {
    pub slopes: Vec<T>,
}

/// Achievable SIC rates: user `k` cancels every weaker user and sees the
/// stronger users' signals as noise,
/// `R_k = log2(1 + C_k a_k / (C_k Σ_{i>k} a_i + σ²))`.
pub fn rates<T: Scalar>(coeffs: &[T], channel: &ChannelState<T>, params: &SystemParams<T>) -> Vec<T> {
    assert_eq!(coeffs.len(), channel.users(), "one coefficient per user");
    let sigma2 = params.noise_power_w;
    let mut out = vec![T::zero(); coeffs.len()];
    let mut above = T::zero();
    for k in (0..coeffs.len()).rev() {
        let c = params.total_power_w * channel.gains()[k];
        out[k] = log2_1p(c * coeffs[k] / (c * above + sigma2));
        above = above + coeffs[k];
    }
    out
}

/// Sum rate through the telescoped form
/// `log2(1 + C_1 θ/σ²) + Σ_{k<K} [log2(C_{k+1} x_k + σ²) - log2(C_k x_k + σ²)]`
/// with `x_k` the coefficient mass of users stronger than `k`.
pub fn sum_rate_telescoped<T: Scalar>(coeffs: &[T], channel: &ChannelState<T>, params: &SystemParams<T>) -> T {
    assert_eq!(coeffs.len(), channel.users(), "one coefficient per user");
    let sigma2 = params.noise_power_w;
    let c = |k: usize| params.total_power_w * channel.gains()[k];
    let k_users = coeffs.len();

    let mut x = vec![T::zero(); k_users];
    for k in (0..k_users.saturating_sub(1)).rev() {
        x[k] = x[k + 1] + coeffs[k + 1];
    }
    let theta = x[0] + coeffs[0];

    let head = log2_1p(c(0) * theta / sigma2);
    let tail = (0..k_users - 1).map(|k| f_term(c(k + 1), c(k), x[k], sigma2));
    compensated_sum(std::iter::once(head).chain(tail))
}

/// `F_k(x) = log2(C_{k+1} x + σ²) - log2(C_k x + σ²)`. Nondecreasing in `x`
/// whenever `C_{k+1} ≥ C_k`, identically zero on ties.
pub fn f_term<T: Scalar>(c_next: T, c_k: T, x: T, sigma2: T) -> T {
    log2_1p((c_next - c_k) * x / (c_k * x + sigma2))
}

/// A validated problem instance: channel, system parameters and QoS profile
/// with the minimum-power split and allocation slopes precomputed.
#[derive(Debug, Clone)]
pub struct Problem<T> {
    params: SystemParams<T>,
    channel: ChannelState<T>,
    qos: QosProfile<T>,
    min_power: MinPowerResult<T>,
    slopes: AllocationSlopes<T>,
}

impl<T: Scalar> Problem<T> {
    pub fn new(params: SystemParams<T>, channel: ChannelState<T>, qos: QosProfile<T>) -> Result<Self> {
        check_users(&channel, &qos)?;
        let min_power = min_power(&channel, &params, &qos)?;
        let slopes = slopes(&qos);
        Ok(Problem {
            params,
            channel,
            qos,
            min_power,
            slopes,
        })
    }

    /// Same channel and QoS under a different budget.
    pub fn with_total_power(&self, total_power_w: T) -> Result<Self> {
        Self::new(self.params.with_total_power(total_power_w)?, self.channel.clone(), self.qos.clone())
    }

    pub fn params(&self) -> &SystemParams<T> {
        &self.params
    }

    pub fn channel(&self) -> &ChannelState<T> {
        &self.channel
    }

    pub fn qos(&self) -> &QosProfile<T> {
        &self.qos
    }

    pub fn users(&self) -> usize {
        self.channel.users()
    }

    pub fn min_power(&self) -> &MinPowerResult<T> {
        &self.min_power
    }

    pub fn theta_min(&self) -> T {
        self.min_power.theta_min
    }

    pub fn is_feasible(&self) -> bool {
        is_feasible(&self.params, &self.min_power)
    }

    pub fn require_feasible(&self) -> Result<()> {
        if self.is_feasible() {
            Ok(())
        } else {
            Err(Error::Infeasible {
                p_min_w: self.min_power.total_w.as_f64(),
                budget_w: self.params.total_power_w.as_f64(),
            })
        }
    }

    pub fn slopes(&self) -> &AllocationSlopes<T> {
        &self.slopes
    }

    /// `C_k = P |h_k|²`.
    pub fn c(&self, k: usize) -> T {
        self.params.total_power_w * self.channel.gains()[k]
    }

    /// Closed-form optimal coefficients `a*(θ)`.
    ///
    /// Users `k < K` are filled in ascending order with
    /// `a_k = D_k (θ - Σ_{i<k} a_i + σ²/C_k)` and the strongest user takes the
    /// remainder. The recursion is evaluated as the minimum-power split plus
    /// the excess `θ - θ_min` handed down the same recursion, which is equal
    /// term by term and keeps the strongest user's share free of cancellation
    /// near `θ_min`.
    pub fn optimal_coeffs(&self, theta: T) -> Result<Vec<T>> {
        let excess = self.excess(theta)?;
        let p = self.params.total_power_w;
        let d = self.qos.d_const();
        let k_users = self.users();
        let mut coeffs = Vec::with_capacity(k_users);
        let mut remaining = excess;
        for k in 0..k_users - 1 {
            let share = d[k] * remaining;
            coeffs.push(self.min_power.per_user_w[k] / p + share);
            remaining = remaining - share;
        }
        coeffs.push(self.min_power.per_user_w[k_users - 1] / p + remaining);
        Ok(coeffs)
    }

    /// `θ - θ_min`, clamped at zero for values within round-off of the edge.
    fn excess(&self, theta: T) -> Result<T> {
        let theta_min = self.theta_min();
        let slack = T::lit(1e-12) * theta_min;
        if !theta.is_finite() || theta < theta_min - slack {
            return Err(Error::InfeasibleTheta {
                theta: theta.as_f64(),
                theta_min: theta_min.as_f64(),
            });
        }
        Ok((theta - theta_min).max(T::zero()))
    }

    /// Optimal allocation at `θ` with rates and EE.
    pub fn allocation(&self, theta: T) -> Result<Allocation<T>> {
        let coeffs = self.optimal_coeffs(theta)?;
        Ok(Allocation::from_coeffs(coeffs, &self.channel, &self.params))
    }

    /// Sum rate of the optimal split at `θ`.
    pub fn sum_rate(&self, theta: T) -> Result<T> {
        let coeffs = self.optimal_coeffs(theta)?;
        Ok(compensated_sum(rates(&coeffs, &self.channel, &self.params)))
    }

    /// Total consumed power `θP + P_c`.
    pub fn consumed_power(&self, theta: T) -> T {
        theta * self.params.total_power_w + self.params.circuit_power_w
    }

    pub fn ee(&self, theta: T) -> Result<T> {
        Ok(self.sum_rate(theta)? / self.consumed_power(theta))
    }

    /// `dR/dθ` of the optimal split. Only the strongest user's rate moves with
    /// `θ`, so this is `C_K s_K / (ln 2 (σ² + C_K a_K*(θ)))`.
    pub fn sum_rate_derivative(&self, theta: T) -> Result<T> {
        let coeffs = self.optimal_coeffs(theta)?;
        Ok(self.strongest_rate_slope(&coeffs))
    }

    fn strongest_rate_slope(&self, coeffs: &[T]) -> T {
        let last = self.users() - 1;
        let c_k = self.c(last);
        c_k * self.slopes.slopes[last] / (T::LN_2() * (self.params.noise_power_w + c_k * coeffs[last]))
    }

    /// Analytic `dEE/dθ = [R'(θ)(θP + P_c) - R(θ) P] / (θP + P_c)²`.
    pub fn ee_derivative(&self, theta: T) -> Result<T> {
        let coeffs = self.optimal_coeffs(theta)?;
        let rate_slope = self.strongest_rate_slope(&coeffs);
        let sum_rate = compensated_sum(rates(&coeffs, &self.channel, &self.params));
        let consumed = self.consumed_power(theta);
        Ok((rate_slope * consumed - sum_rate * self.params.total_power_w) / (consumed * consumed))
    }
}

/// Slopes of the optimal coefficients in `θ`:
/// `s_k = D_k (1 - Σ_{i<k} s_i)` for `k < K`, `s_K = 1 - Σ_{i<K} s_i`.
///
/// The partial sums stay in `[0, 1)` because every `D_k < 1`, so `s_K > 0`
/// always and `s_k > 0` whenever user `k` has a positive minimum rate.
pub fn slopes<T: Scalar>(qos: &QosProfile<T>) -> AllocationSlopes<T> {
    let d = qos.d_const();
    let k_users = d.len();
    let mut slopes = Vec::with_capacity(k_users);
    let mut assigned = T::zero();
    for &d_k in &d[..k_users.saturating_sub(1)] {
        let s = d_k * (T::one() - assigned);
        slopes.push(s);
        assigned = assigned + s;
    }
    if k_users > 0 {
        slopes.push(T::one() - assigned);
    }
    AllocationSlopes { slopes }
}
