//! Outer maximization of `EE(θ)` over the feasible interval `[θ_min, 1]`.
//!
//! `EE(θ)` has a strictly concave numerator and an affine denominator, so
//! its derivative changes sign at most once, from positive to negative. The
//! primary solver bisects on that sign. [`dinkelbach_maximize`] solves the
//! same problem through the parametric subtractive form and exists to
//! cross-check the bisection.

use crate::allocation::{Allocation, Problem};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig<T> {
    /// Bisection stops once the bracket is narrower than this.
    pub theta_tolerance: T,
    pub max_iterations: usize,
    /// Dinkelbach stops once `max_θ R(θ) - λ(θP + P_c)` falls below this.
    pub dinkelbach_tolerance: T,
}

impl<T: Scalar> Default for OptimizerConfig<T> {
    fn default() -> Self {
        OptimizerConfig {
            theta_tolerance: T::lit(1e-10),
            max_iterations: 200,
            dinkelbach_tolerance: T::lit(1e-10),
        }
    }
}

impl<T: Scalar> OptimizerConfig<T> {
    fn validate(&self) -> Result<()> {
        if !(self.theta_tolerance > T::zero()) || !(self.dinkelbach_tolerance > T::zero()) {
            return Err(Error::invalid("optimizer tolerances must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

/// Where the maximizer sits relative to the feasible interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// `dEE/dθ = 0` strictly inside `(θ_min, 1)`.
    InteriorRoot,
    /// EE already decreases at `θ_min`: spend only the minimum power.
    ClampedLow,
    /// EE still increases at `θ = 1`: spend the full budget.
    ClampedHigh,
}

impl Boundary {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::InteriorRoot => "interior-root",
            Boundary::ClampedLow => "clamped-low",
            Boundary::ClampedHigh => "clamped-high",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum<T> {
    pub theta_star: T,
    pub allocation: Allocation<T>,
    pub boundary: Boundary,
    pub iterations: usize,
}

/// Lower end of the search interval. At `P == P_Min` round-off can put
/// `θ_min` a hair above one.
fn lower_theta<T: Scalar>(problem: &Problem<T>) -> T {
    problem.theta_min().min(T::one())
}

fn finite<T: Scalar>(value: T, what: &str, theta: T) -> Result<T> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvariantViolation(format!("{what} is not finite at theta = {theta:?}")))
    }
}

/// Energy-efficiency-optimal allocation by bisection on `dEE/dθ`.
pub fn maximize_ee<T: Scalar>(problem: &Problem<T>, config: &OptimizerConfig<T>) -> Result<Optimum<T>> {
    config.validate()?;
    problem.require_feasible()?;
    let lo0 = lower_theta(problem);
    let derivative = |t: T| -> Result<T> { finite(problem.ee_derivative(t)?, "dEE/dtheta", t) };

    let finish = |theta: T, boundary, iterations| -> Result<Optimum<T>> {
        Ok(Optimum {
            theta_star: theta,
            allocation: problem.allocation(theta)?,
            boundary,
            iterations,
        })
    };

    if derivative(lo0)? <= T::zero() {
        return finish(lo0, Boundary::ClampedLow, 0);
    }
    if derivative(T::one())? >= T::zero() {
        return finish(T::one(), Boundary::ClampedHigh, 0);
    }

    let (mut lo, mut hi) = (lo0, T::one());
    let mut iterations = 0;
    while hi - lo > config.theta_tolerance {
        if iterations == config.max_iterations {
            return Err(Error::NoConvergence {
                method: "bisection",
                iterations,
            });
        }
        iterations += 1;
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            // Bracket cannot shrink further in this precision.
            break;
        }
        let d = derivative(mid)?;
        if d > T::zero() {
            lo = mid;
        } else if d < T::zero() {
            hi = mid;
        } else {
            return finish(mid, Boundary::InteriorRoot, iterations);
        }
    }
    finish(lo + (hi - lo) / T::lit(2.0), Boundary::InteriorRoot, iterations)
}

/// The full-power strategy: the optimal split at `θ = 1`.
pub fn max_se_allocation<T: Scalar>(problem: &Problem<T>) -> Result<Allocation<T>> {
    problem.require_feasible()?;
    problem.allocation(T::one())
}

/// Dinkelbach iteration on `R(θ) / (θP + P_c)`.
///
/// Starting from `λ = EE(θ_min)`, each step maximizes the concave
/// `R(θ) - λ(θP + P_c)` over the feasible interval by bisection on its
/// derivative, then sets `λ` to the efficiency at that maximizer.
pub fn dinkelbach_maximize<T: Scalar>(problem: &Problem<T>, config: &OptimizerConfig<T>) -> Result<Optimum<T>> {
    config.validate()?;
    problem.require_feasible()?;
    let lo0 = lower_theta(problem);

    let mut lambda = problem.ee(lo0)?;
    for iteration in 1..=config.max_iterations {
        let theta = argmax_parametric(problem, lambda, lo0, config)?;
        let rate = problem.sum_rate(theta)?;
        let consumed = problem.consumed_power(theta);
        let gap = finite(rate - lambda * consumed, "Dinkelbach objective", theta)?;
        if gap <= config.dinkelbach_tolerance {
            let boundary = if theta <= lo0 {
                Boundary::ClampedLow
            } else if theta >= T::one() {
                Boundary::ClampedHigh
            } else {
                Boundary::InteriorRoot
            };
            return Ok(Optimum {
                theta_star: theta,
                allocation: problem.allocation(theta)?,
                boundary,
                iterations: iteration,
            });
        }
        lambda = rate / consumed;
    }
    Err(Error::NoConvergence {
        method: "Dinkelbach",
        iterations: config.max_iterations,
    })
}

/// Maximizer of `R(θ) - λ(θP + P_c)` on `[lo, 1]`. `R'` is decreasing, so the
/// endpoint signs decide clamping and bisection finds the interior root.
fn argmax_parametric<T: Scalar>(problem: &Problem<T>, lambda: T, lo: T, config: &OptimizerConfig<T>) -> Result<T> {
    let p = problem.params().total_power_w;
    let slope = |t: T| -> Result<T> { Ok(problem.sum_rate_derivative(t)? - lambda * p) };
    if slope(lo)? <= T::zero() {
        return Ok(lo);
    }
    if slope(T::one())? >= T::zero() {
        return Ok(T::one());
    }
    let (mut a, mut b) = (lo, T::one());
    for _ in 0..config.max_iterations {
        if b - a <= config.theta_tolerance {
            break;
        }
        let mid = a + (b - a) / T::lit(2.0);
        if mid <= a || mid >= b {
            break;
        }
        let s = slope(mid)?;
        if s > T::zero() {
            a = mid;
        } else if s < T::zero() {
            b = mid;
        } else {
            return Ok(mid);
        }
    }
    Ok(a + (b - a) / T::lit(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qos::QosProfile;
    use crate::system_model::{dbm_to_watts, generate_channel, ChannelState, SystemParams};
    use approx::assert_relative_eq;

    fn fig1_problem(power_dbm: f64, users: usize, seed: u64) -> Problem<f64> {
        let params = SystemParams::from_dbm(power_dbm, -70.0, 30.0, 3.0).unwrap();
        let ch = generate_channel(&vec![80.0; users], 3.0, seed).unwrap();
        Problem::new(params, ch, QosProfile::uniform(users, 1.0).unwrap()).unwrap()
    }

    fn grid_max(problem: &Problem<f64>, n: usize) -> f64 {
        let t0 = problem.theta_min().min(1.0);
        (0..=n)
            .map(|i| problem.ee(t0 + (1.0 - t0) * i as f64 / n as f64).unwrap())
            .fold(f64::MIN, f64::max)
    }

    #[test]
    fn large_budget_beats_full_power() {
        let mut interior = 0;
        for seed in 0..50 {
            let pb = fig1_problem(40.0, 2, seed);
            if !pb.is_feasible() {
                continue;
            }
            let opt = maximize_ee(&pb, &OptimizerConfig::default()).unwrap();
            assert_ne!(opt.boundary, Boundary::ClampedHigh);
            let full = max_se_allocation(&pb).unwrap();
            assert!(opt.allocation.ee > full.ee);
            if opt.boundary == Boundary::InteriorRoot {
                interior += 1;
                assert!(pb.ee_derivative(opt.theta_star).unwrap().abs() <= 1e-6 * opt.allocation.ee);
            }
        }
        assert!(interior > 0);
    }

    #[test]
    fn budget_at_minimum_power_is_degenerate() {
        let pb = fig1_problem(40.0, 3, 4);
        let at_edge = pb.with_total_power(pb.min_power().total_w).unwrap();
        let opt = maximize_ee(&at_edge, &OptimizerConfig::default()).unwrap();
        assert_eq!(opt.theta_star, 1.0_f64.min(at_edge.theta_min()));
        assert_ne!(opt.boundary, Boundary::InteriorRoot);
        assert_relative_eq!(opt.theta_star, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn infeasible_budget_reports_min_power() {
        let pb = fig1_problem(-30.0, 3, 1);
        assert!(!pb.is_feasible());
        match maximize_ee(&pb, &OptimizerConfig::default()) {
            Err(Error::Infeasible { p_min_w, budget_w }) => {
                assert_relative_eq!(p_min_w, pb.min_power().total_w);
                assert_relative_eq!(budget_w, dbm_to_watts(-30.0));
            }
            other => panic!("expected infeasibility, got {other:?}"),
        }
        assert!(max_se_allocation(&pb).is_err());
        assert!(dinkelbach_maximize(&pb, &OptimizerConfig::default()).is_err());
    }

    #[test]
    fn beats_dense_grid_on_small_instances() {
        for seed in 0..30 {
            let users = 1 + (seed as usize % 3);
            let pb = fig1_problem(10.0 + seed as f64, users, seed);
            if !pb.is_feasible() {
                continue;
            }
            let opt = maximize_ee(&pb, &OptimizerConfig::default()).unwrap();
            assert!(opt.allocation.ee >= grid_max(&pb, 10_000) - 1e-8);
            assert!(opt.allocation.ee >= pb.ee(pb.theta_min()).unwrap());
            assert!(opt.allocation.ee >= pb.ee(1.0).unwrap());
        }
    }

    #[test]
    fn max_se_uses_full_budget_and_never_beats_eepa() {
        for seed in 0..20 {
            let pb = fig1_problem(25.0, 3, seed);
            if !pb.is_feasible() {
                continue;
            }
            let full = max_se_allocation(&pb).unwrap();
            assert_relative_eq!(full.coeffs.iter().sum::<f64>(), 1.0, max_relative = 1e-12);
            let opt = maximize_ee(&pb, &OptimizerConfig::default()).unwrap();
            assert!(opt.allocation.ee >= full.ee);
        }
    }

    #[test]
    fn max_se_sum_rate_dominates_grid_splits() {
        // Two users at full power: scan feasible (a1, 1 - a1) splits.
        let params = SystemParams::new(1.0, 1e-10, 1.0, 3.0).unwrap();
        let ch = ChannelState::from_gains(vec![1e-7, 1e-6]).unwrap();
        let q = QosProfile::uniform(2, 1.0).unwrap();
        let pb = Problem::new(params, ch.clone(), q).unwrap();
        let best = max_se_allocation(&pb).unwrap().sum_rate;
        for i in 0..=1000 {
            let a1 = i as f64 / 1000.0;
            let r = crate::allocation::rates(&[a1, 1.0 - a1], &ch, &params);
            if r[0] >= 1.0 && r[1] >= 1.0 {
                assert!(r[0] + r[1] <= best + 1e-12);
            }
        }
    }

    #[test]
    fn huge_circuit_power_clamps_high_in_both_solvers() {
        let params = SystemParams::new(1.0, 1e-10, 1e9, 3.0).unwrap();
        let pb = Problem::new(params, ChannelState::from_gains(vec![1e-6]).unwrap(), QosProfile::uniform(1, 1.0).unwrap()).unwrap();
        let cfg = OptimizerConfig::default();
        let a = maximize_ee(&pb, &cfg).unwrap();
        let b = dinkelbach_maximize(&pb, &cfg).unwrap();
        assert_eq!(a.boundary, Boundary::ClampedHigh);
        assert_eq!(b.boundary, Boundary::ClampedHigh);
        assert_eq!(a.theta_star, 1.0);
        assert_eq!(b.theta_star, 1.0);
    }

    #[test]
    fn bisection_iteration_bound() {
        let cfg = OptimizerConfig::default();
        for seed in 0..40 {
            let pb = fig1_problem(35.0, 2, seed);
            if !pb.is_feasible() {
                continue;
            }
            let opt = maximize_ee(&pb, &cfg).unwrap();
            let bound = ((1.0 - pb.theta_min()) / cfg.theta_tolerance).log2().ceil() as usize;
            assert!(opt.iterations <= bound);
        }
    }

    #[test]
    fn solvers_agree_on_fig1_setup() {
        let cfg = OptimizerConfig::default();
        let mut worst_iters = 0;
        for seed in 0..200 {
            for &power in &[10.0, 20.0, 30.0, 40.0, 50.0] {
                let pb = fig1_problem(power, 2 + (seed as usize % 2), seed);
                if !pb.is_feasible() {
                    continue;
                }
                let a = maximize_ee(&pb, &cfg).unwrap();
                let b = dinkelbach_maximize(&pb, &cfg).unwrap();
                assert_relative_eq!(a.allocation.ee, b.allocation.ee, max_relative = 1e-8);
                worst_iters = worst_iters.max(b.iterations);
            }
        }
        assert!(worst_iters <= 20, "Dinkelbach took {worst_iters} iterations");
    }

    #[test]
    fn config_validation() {
        let pb = fig1_problem(30.0, 2, 0);
        let mut cfg = OptimizerConfig::default();
        cfg.max_iterations = 0;
        assert!(maximize_ee(&pb, &cfg).is_err());
        let mut cfg = OptimizerConfig::default();
        cfg.theta_tolerance = 0.0;
        assert!(maximize_ee(&pb, &cfg).is_err());
    }

    #[test]
    fn f32_solver_runs() {
        let params = SystemParams::from_dbm(30.0_f32, -70.0, 30.0, 3.0).unwrap();
        let ch = ChannelState::from_gains(vec![1e-6_f32, 4e-6]).unwrap();
        let pb = Problem::new(params, ch, QosProfile::uniform(2, 1.0_f32).unwrap()).unwrap();
        let cfg = OptimizerConfig { theta_tolerance: 1e-6, max_iterations: 100, dinkelbach_tolerance: 1e-5 };
        let opt = maximize_ee(&pb, &cfg).unwrap();
        assert!(opt.theta_star >= pb.theta_min() && opt.theta_star <= 1.0);
    }
}
