//! Physical-layer model: unit conversion, Rayleigh/path-loss channel draws and
//! the ascending-gain user ordering every other module relies on.
//!
//! Users are stored 0-based: index `k` here is user `k + 1` in the usual
//! 1-based notation, so `gains[0]` is the weakest user and `gains[K - 1]` the
//! strongest one (decoded last under SIC).

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Converts decibel-milliwatts to watts.
pub fn dbm_to_watts<T: Scalar>(x_dbm: T) -> T {
    T::lit(10.0).powf(x_dbm / T::lit(10.0)) / T::lit(1000.0)
}

/// Converts watts to decibel-milliwatts. Zero maps to negative infinity.
pub fn watts_to_dbm<T: Scalar>(watts: T) -> T {
    T::lit(10.0) * (watts * T::lit(1000.0)).log10()
}

/// Budget, noise, circuit power (all linear watts) and path-loss exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    pub total_power_w: T,
    pub noise_power_w: T,
    pub circuit_power_w: T,
    pub pathloss_exponent: T,
}

impl<T: Scalar> SystemParams<T> {
    pub fn new(total_power_w: T, noise_power_w: T, circuit_power_w: T, pathloss_exponent: T) -> Result<Self> {
        let params = SystemParams {
            total_power_w,
            noise_power_w,
            circuit_power_w,
            pathloss_exponent,
        };
        params.validate()?;
        Ok(params)
    }

    /// Builds parameters from dBm-valued powers.
    pub fn from_dbm(total_power_dbm: T, noise_dbm: T, circuit_dbm: T, pathloss_exponent: T) -> Result<Self> {
        Self::new(
            dbm_to_watts(total_power_dbm),
            dbm_to_watts(noise_dbm),
            dbm_to_watts(circuit_dbm),
            pathloss_exponent,
        )
    }

    /// Same parameters with a different budget.
    pub fn with_total_power(self, total_power_w: T) -> Result<Self> {
        Self::new(total_power_w, self.noise_power_w, self.circuit_power_w, self.pathloss_exponent)
    }

    fn validate(&self) -> Result<()> {
        let positive = |v: T| v.is_finite() && v > T::zero();
        if !positive(self.total_power_w) {
            return Err(Error::invalid("total power must be positive and finite"));
        }
        if !positive(self.noise_power_w) {
            return Err(Error::invalid("noise power must be positive and finite"));
        }
        if !positive(self.circuit_power_w) {
            return Err(Error::invalid("circuit power must be positive and finite"));
        }
        if !positive(self.pathloss_exponent) {
            return Err(Error::invalid("path-loss exponent must be positive and finite"));
        }
        Ok(())
    }
}

/// Channel power gains of `K` users, sorted ascending.
///
/// `distances_m` and `fading` are permuted together with `gains`, so
/// `gains[k] == fading[k].norm_sqr() * distances_m[k].powf(-alpha)` after
/// sorting.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState<T> {
    gains: Vec<T>,
    distances_m: Vec<T>,
    fading: Vec<Complex<T>>,
}

impl<T: Scalar> ChannelState<T> {
    /// Combines per-user distances and fading draws, then sorts users by gain.
    /// Ties keep their input order.
    pub fn from_parts(distances_m: Vec<T>, fading: Vec<Complex<T>>, pathloss_exponent: T) -> Result<Self> {
        if distances_m.is_empty() {
            return Err(Error::invalid("at least one user is required"));
        }
        if distances_m.len() != fading.len() {
            return Err(Error::invalid(format!(
                "{} distances but {} fading draws",
                distances_m.len(),
                fading.len()
            )));
        }
        if let Some(d) = distances_m.iter().find(|d| !(d.is_finite() && **d > T::zero())) {
            return Err(Error::invalid(format!("distance {d:?} must be positive and finite")));
        }
        let mut users: Vec<(T, T, Complex<T>)> = distances_m
            .into_iter()
            .zip(fading)
            .map(|(d, g)| (g.norm_sqr() * d.powf(-pathloss_exponent), d, g))
            .collect();
        if let Some(u) = users.iter().find(|u| !(u.0.is_finite() && u.0 > T::zero())) {
            return Err(Error::invalid(format!("channel gain {:?} must be positive and finite", u.0)));
        }
        users.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite gains"));

        let mut state = ChannelState {
            gains: Vec::with_capacity(users.len()),
            distances_m: Vec::with_capacity(users.len()),
            fading: Vec::with_capacity(users.len()),
        };
        for (h, d, g) in users {
            state.gains.push(h);
            state.distances_m.push(d);
            state.fading.push(g);
        }
        Ok(state)
    }

    /// Wraps explicit channel power gains. Each user is recorded at unit
    /// distance with real fading `sqrt(gain)`, which keeps the joint-permutation
    /// invariant for any path-loss exponent.
    pub fn from_gains(mut gains: Vec<T>) -> Result<Self> {
        if gains.is_empty() {
            return Err(Error::invalid("at least one user is required"));
        }
        if let Some(h) = gains.iter().find(|h| !(h.is_finite() && **h > T::zero())) {
            return Err(Error::invalid(format!("channel gain {h:?} must be positive and finite")));
        }
        gains.sort_by(|a, b| a.partial_cmp(b).expect("finite gains"));
        Ok(ChannelState {
            distances_m: vec![T::one(); gains.len()],
            fading: gains.iter().map(|&h| Complex::new(h.sqrt(), T::zero())).collect(),
            gains,
        })
    }

    pub fn users(&self) -> usize {
        self.gains.len()
    }

    pub fn gains(&self) -> &[T] {
        &self.gains
    }

    pub fn distances_m(&self) -> &[T] {
        &self.distances_m
    }

    pub fn fading(&self) -> &[Complex<T>] {
        &self.fading
    }
}

/// Draws CN(0, 1) fading for each user (variance 1/2 per component) and
/// applies `d^-alpha` path loss.
pub fn sample_channel<T, R>(distances_m: &[T], pathloss_exponent: T, rng: &mut R) -> Result<ChannelState<T>>
where
    T: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let scale = T::FRAC_1_SQRT_2();
    let fading = distances_m
        .iter()
        .map(|_| {
            let re: T = StandardNormal.sample(rng);
            let im: T = StandardNormal.sample(rng);
            Complex::new(re * scale, im * scale)
        })
        .collect();
    ChannelState::from_parts(distances_m.to_vec(), fading, pathloss_exponent)
}

/// Seeded channel draw using ChaCha20, so a seed reproduces the same channel
/// on every platform.
pub fn generate_channel<T>(distances_m: &[T], pathloss_exponent: T, rng_seed: u64) -> Result<ChannelState<T>>
where
    T: Scalar,
    StandardNormal: Distribution<T>,
{
    let mut rng = ChaCha20Rng::seed_from_u64(rng_seed);
    sample_channel(distances_m, pathloss_exponent, &mut rng)
}

/// `C_k = P |h_k|^2` for every user.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedConstants<T> {
    pub c: Vec<T>,
}

pub fn derived_constants<T: Scalar>(params: &SystemParams<T>, channel: &ChannelState<T>) -> DerivedConstants<T> {
    DerivedConstants {
        c: channel.gains().iter().map(|&h| params.total_power_w * h).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dbm_conversions() {
        assert_relative_eq!(dbm_to_watts(30.0_f64), 1.0, max_relative = 1e-15);
        assert_relative_eq!(dbm_to_watts(-70.0_f64), 1.0e-10, max_relative = 1e-15);
        assert_relative_eq!(dbm_to_watts(0.0_f64), 1.0e-3, max_relative = 1e-15);
        assert_relative_eq!(watts_to_dbm(1.2e-3_f64), 0.791_812_460_476_248_3, max_relative = 1e-12);
        assert_eq!(watts_to_dbm(0.0_f64), f64::NEG_INFINITY);
    }

    #[test]
    fn params_reject_nonpositive_values() {
        assert!(SystemParams::new(1.0, 1e-10, 1.0, 3.0).is_ok());
        assert!(SystemParams::new(0.0, 1e-10, 1.0, 3.0).is_err());
        assert!(SystemParams::new(1.0, -1.0, 1.0, 3.0).is_err());
        assert!(SystemParams::new(1.0, 1e-10, 0.0, 3.0).is_err());
        assert!(SystemParams::new(1.0, 1e-10, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn equal_fading_orders_by_distance() {
        let one = Complex::new(1.0, 0.0);
        let ch = ChannelState::from_parts(vec![100.0, 50.0], vec![one, one], 3.0).unwrap();
        assert_relative_eq!(ch.gains()[0], 1e-6, max_relative = 1e-14);
        assert_relative_eq!(ch.gains()[1], 8e-6, max_relative = 1e-14);
        assert_eq!(ch.distances_m(), &[100.0, 50.0]);
    }

    #[test]
    fn single_user_unit_distance_gain_is_fading_power() {
        let ch = generate_channel(&[1.0_f64], 3.0, 11).unwrap();
        assert_eq!(ch.gains()[0], ch.fading()[0].norm_sqr());
    }

    #[test]
    fn fig1_distances_scale_by_pathloss() {
        let ch = generate_channel(&[80.0_f64, 80.0, 80.0], 3.0, 7).unwrap();
        assert_eq!(ch.users(), 3);
        for k in 0..3 {
            assert_relative_eq!(ch.gains()[k], ch.fading()[k].norm_sqr() * 80f64.powi(-3), max_relative = 1e-12);
        }
        assert!(ch.gains().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn empty_and_bad_distances_rejected() {
        assert!(generate_channel::<f64>(&[], 3.0, 1).is_err());
        assert!(generate_channel(&[10.0_f64, 0.0], 3.0, 1).is_err());
        assert!(ChannelState::<f64>::from_gains(vec![1e-6, 0.0]).is_err());
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let a = generate_channel(&[40.0_f64, 60.0, 80.0], 3.0, 99).unwrap();
        let b = generate_channel(&[40.0_f64, 60.0, 80.0], 3.0, 99).unwrap();
        assert_eq!(a, b);
        let c = generate_channel(&[40.0_f64, 60.0, 80.0], 3.0, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn fading_has_unit_mean_power() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let n = 20_000;
        let mean: f64 = (0..n)
            .map(|_| sample_channel(&[1.0_f64], 3.0, &mut rng).unwrap().gains()[0])
            .sum::<f64>()
            / n as f64;
        // Exponential(1): standard error 1/sqrt(n) ~ 0.007.
        assert!((mean - 1.0).abs() < 0.03, "mean |g|^2 = {mean}");
    }

    #[test]
    fn derived_constants_scale_gains() {
        let ch = ChannelState::from_gains(vec![1e-7_f64, 1e-6]).unwrap();
        let p = SystemParams::new(1.0, 1e-10, 1.0, 3.0).unwrap();
        assert_eq!(derived_constants(&p, &ch).c, vec![1e-7, 1e-6]);

        let ch = ChannelState::from_gains(vec![2e-6_f64]).unwrap();
        let p = p.with_total_power(0.1).unwrap();
        assert_relative_eq!(derived_constants(&p, &ch).c[0], 2e-7, max_relative = 1e-15);
    }

    #[test]
    fn generic_over_f32() {
        let ch = generate_channel(&[80.0_f32, 80.0], 3.0, 3).unwrap();
        assert!(ch.gains()[0] <= ch.gains()[1]);
        assert!((dbm_to_watts(30.0_f32) - 1.0).abs() < 1e-6);
    }
}
