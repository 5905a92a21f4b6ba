//! Co-integrated volatility estimators: the spectral estimator built from the
//! empirical characteristic function, the truncated realized covariance, and
//! plain realized covariance.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::ClassParams;
use crate::num::{real, Real};
use crate::simulate::PathSample;

/// ECF moduli at or below this level count as zero (the indicator in the
/// estimator definition); prevents -inf logs.
pub const ECF_MODULUS_FLOOR: f64 = 1e-300;

/// Empirical characteristic function value at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcfValue<T> {
    pub u: [T; 2],
    pub value: Complex<T>,
    pub n: usize,
}

/// Mean of `exp(i <u, dx_j>)` over the increments, accumulated with pairwise
/// summation to bound rounding error at large n.
pub fn ecf<T: Real>(sample: &PathSample<T>, u: [T; 2]) -> EcfValue<T> {
    assert!(sample.n >= 1, "ecf requires at least one increment");
    let sum = pairwise_sum(&sample.increments, u);
    let n_inv = real::<T>(1.0 / sample.n as f64);
    EcfValue { u, value: sum * n_inv, n: sample.n }
}

fn pairwise_sum<T: Real>(increments: &[[T; 2]], u: [T; 2]) -> Complex<T> {
    if increments.len() <= 64 {
        let mut acc = Complex::new(T::zero(), T::zero());
        for inc in increments {
            let phase = u[0] * inc[0] + u[1] * inc[1];
            acc += Complex::new(phase.cos(), phase.sin());
        }
        acc
    } else {
        let mid = increments.len() / 2;
        pairwise_sum(&increments[..mid], u) + pairwise_sum(&increments[mid..], u)
    }
}

/// Frequency choice `U_n`: `sqrt(n)` for `r <= 1`,
/// `sqrt((r - 1) n log n) / sqrt(M)` for `r > 1` (natural log).
pub fn frequency_rule<T: Real>(n: usize, params: &ClassParams<T>) -> Result<T> {
    if n < 2 {
        return Err(Error::Domain(format!("frequency rule requires n >= 2, got {n}")));
    }
    let n_t = real::<T>(n as f64);
    if params.r <= T::one() {
        Ok(n_t.sqrt())
    } else {
        Ok(((params.r - T::one()) * n_t * n_t.ln()).sqrt() / params.m.sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConfig<T> {
    pub class_params: ClassParams<T>,
    /// Bypasses the frequency rule when set.
    pub u_override: Option<T>,
}

impl<T: Real> SpectralConfig<T> {
    pub fn new(class_params: ClassParams<T>) -> Self {
        Self { class_params, u_override: None }
    }

    pub fn with_u_override(class_params: ClassParams<T>, u: T) -> Result<Self> {
        if !(u > T::zero()) {
            return Err(Error::InvalidParameter(format!("u_override must be positive, got {u:?}")));
        }
        Ok(Self { class_params, u_override: Some(u) })
    }
}

/// Spectral estimate with its diagnostics. When `valid` is false (an ECF
/// modulus vanished) `value` is NaN, never a silent zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate<T> {
    pub value: T,
    pub u_used: T,
    pub ecf_plus: EcfValue<T>,
    pub ecf_minus: EcfValue<T>,
    pub valid: bool,
}

/// `(n / 2U^2) (log |ecf(U, -U)| - log |ecf(U, U)|)`.
pub fn spectral_estimate<T: Real>(
    sample: &PathSample<T>,
    cfg: &SpectralConfig<T>,
) -> Result<SpectralEstimate<T>> {
    if sample.n < 2 {
        return Err(Error::Domain(format!("spectral estimator requires n >= 2, got {}", sample.n)));
    }
    let u = match cfg.u_override {
        Some(u) => u,
        None => frequency_rule(sample.n, &cfg.class_params)?,
    };
    let ecf_plus = ecf(sample, [u, u]);
    let ecf_minus = ecf(sample, [u, -u]);
    Ok(combine_ecf(u, ecf_plus, ecf_minus))
}

/// Combining step of the spectral estimator, split out so the validity
/// indicator is testable on manufactured ECF values.
pub fn combine_ecf<T: Real>(
    u: T,
    ecf_plus: EcfValue<T>,
    ecf_minus: EcfValue<T>,
) -> SpectralEstimate<T> {
    let floor = real::<T>(ECF_MODULUS_FLOOR);
    let mod_plus = ecf_plus.value.norm();
    let mod_minus = ecf_minus.value.norm();
    let valid = mod_plus > floor && mod_minus > floor;
    let value = if valid {
        let n_t = real::<T>(ecf_plus.n as f64);
        n_t / (real::<T>(2.0) * u * u) * (mod_minus.ln() - mod_plus.ln())
    } else {
        T::nan()
    };
    SpectralEstimate { value, u_used: u, ecf_plus, ecf_minus, valid }
}

/// Truncated-realized-covariance configuration; the threshold is
/// `r_h = h^{2 u_exp}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrcConfig<T> {
    pub h: T,
    pub u_exp: T,
    pub threshold: T,
}

impl<T: Real> TrcConfig<T> {
    pub fn new(h: T, u_exp: T) -> Result<Self> {
        if !(h > T::zero()) {
            return Err(Error::InvalidParameter(format!("h must be positive, got {h:?}")));
        }
        if !(u_exp > T::zero() && u_exp < real::<T>(0.5)) {
            return Err(Error::InvalidParameter(format!("u_exp must lie in (0, 1/2), got {u_exp:?}")));
        }
        let threshold = h.powf(real::<T>(2.0) * u_exp);
        Ok(Self { h, u_exp, threshold })
    }

    pub fn for_sample_size(n: usize, u_exp: T) -> Result<Self> {
        Self::new(real::<T>(1.0 / n as f64), u_exp)
    }
}

/// Sum of increment products with each factor zeroed when its square exceeds
/// the threshold (inclusive comparison).
pub fn trc_estimate<T: Real>(sample: &PathSample<T>, cfg: &TrcConfig<T>) -> T {
    sample.increments.iter().fold(T::zero(), |acc, inc| {
        let keep1 = inc[0] * inc[0] <= cfg.threshold;
        let keep2 = inc[1] * inc[1] <= cfg.threshold;
        if keep1 && keep2 {
            acc + inc[0] * inc[1]
        } else {
            acc
        }
    })
}

/// Plain realized covariance: sum of increment products.
pub fn realized_covariance<T: Real>(sample: &PathSample<T>) -> T {
    sample.increments.iter().fold(T::zero(), |acc, inc| acc + inc[0] * inc[1])
}
