//! Von Mises circular priors.
//!
//! The density is `exp(kappa * cos(omega - mu)) / (2 pi I0(kappa))`. It is
//! uniform on the circle for `kappa = 0` and approaches a Gaussian with
//! variance `1 / kappa` as `kappa` grows, so `kappa` spans the range from
//! complete ignorance to virtual certainty of a frequency.
//!
//! Large concentrations overflow `I0` long before they are numerically
//! interesting, so every quantity here is computed from the exponentially
//! scaled Bessel functions `exp(-x) I_n(x)`.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Series/asymptotic crossover for the modified Bessel functions.
const BESSEL_SERIES_LIMIT: f64 = 20.0;

/// Largest argument for which the unscaled `I_n(x)` is guaranteed finite.
pub const BESSEL_UNSCALED_LIMIT: f64 = 700.0;

/// Below this concentration the sampler draws from the uniform circle.
const SAMPLER_UNIFORM_KAPPA: f64 = 1e-6;

/// Above this concentration Best-Fisher loses precision in `1 - f`; the
/// wrapped-normal limit is used instead.
const SAMPLER_NORMAL_KAPPA: f64 = 1e6;

/// Wraps an angle into `[-pi, pi)`.
pub fn wrap_angle(x: f64) -> f64 {
    if (-PI..PI).contains(&x) {
        return x;
    }
    let w = (x + PI).rem_euclid(TAU) - PI;
    // rem_euclid can round up to exactly TAU
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

/// Modified Bessel function of the first kind, `I_0` or `I_1`.
///
/// Relative accuracy is about 1e-15 on `[0, 700]`. Beyond 700 the result
/// overflows to infinity around `x = 713`; use [`bessel_i_scaled`] there.
pub fn bessel_i(order: u32, x: f64) -> Result<f64> {
    let scaled = bessel_i_scaled(order, x)?;
    Ok(scaled * x.exp())
}

/// Exponentially scaled modified Bessel function, `exp(-x) I_n(x)`, for
/// `n` in `{0, 1}`. Finite for every finite `x >= 0`.
pub fn bessel_i_scaled(order: u32, x: f64) -> Result<f64> {
    if order > 1 {
        return Err(Error::Unsupported(format!(
            "Bessel order {order}; only 0 and 1 are implemented"
        )));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(format!(
            "Bessel argument must be finite and nonnegative, got {x}"
        )));
    }
    Ok(if x < BESSEL_SERIES_LIMIT {
        bessel_series(order, x) * (-x).exp()
    } else {
        bessel_asymptotic_scaled(order, x)
    })
}

/// `ln I_0(x)` without overflow.
pub fn ln_bessel_i0(x: f64) -> Result<f64> {
    Ok(bessel_i_scaled(0, x)?.ln() + x)
}

/// Ratio `I_1(x) / I_0(x)`, the mean resultant length of a von Mises
/// variate with concentration `x`.
pub fn bessel_ratio(x: f64) -> Result<f64> {
    Ok(bessel_i_scaled(1, x)? / bessel_i_scaled(0, x)?)
}

// sum_k (x/2)^(2k+n) / (k! (k+n)!); all terms positive, so no cancellation
fn bessel_series(order: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let mut term = if order == 0 { 1.0 } else { half };
    let mut sum = term;
    let n = order as f64;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + n));
        sum += term;
        if term <= sum * f64::EPSILON * 0.25 {
            break;
        }
        k += 1.0;
    }
    sum
}

// exp(-x) I_n(x) ~ (2 pi x)^(-1/2) sum_k (-1)^k a_k(n) / x^k,
// a_k(n) = prod_{i=1..k} (4n^2 - (2i-1)^2) / (k! 8^k). Truncated at the
// smallest term; for x >= 20 that term is below 1e-17 relative.
fn bessel_asymptotic_scaled(order: u32, x: f64) -> f64 {
    let mu = 4.0 * (order as f64).powi(2);
    let mut term: f64 = 1.0;
    let mut sum: f64 = 1.0;
    let mut i = 1.0;
    loop {
        let odd = 2.0 * i - 1.0;
        let next = -term * (mu - odd * odd) / (i * 8.0 * x);
        if next.abs() >= term.abs() || next.abs() <= f64::EPSILON * 0.25 * sum.abs() {
            if next.abs() < term.abs() {
                sum += next;
            }
            break;
        }
        sum += next;
        term = next;
        i += 1.0;
    }
    sum / (TAU * x).sqrt()
}

/// Von Mises prior on a single frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VonMisesPrior {
    mu: f64,
    kappa: f64,
}

impl VonMisesPrior {
    /// Builds a prior with circular mean `mu` (wrapped into `[-pi, pi)`)
    /// and concentration `kappa >= 0`.
    pub fn new(mu: f64, kappa: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::domain(format!("prior mean must be finite, got {mu}")));
        }
        if !kappa.is_finite() || kappa < 0.0 {
            return Err(Error::domain(format!(
                "prior concentration must be finite and >= 0, got {kappa}"
            )));
        }
        Ok(Self {
            mu: wrap_angle(mu),
            kappa,
        })
    }

    /// The uniform circular distribution.
    pub fn uninformative() -> Self {
        Self { mu: 0.0, kappa: 0.0 }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `kappa cos(omega - mu) - ln(2 pi I0(kappa))`.
    pub fn log_pdf(&self, omega: f64) -> f64 {
        // ln I0 via the scaled form keeps this finite for any kappa
        let ln_i0 = ln_bessel_i0(self.kappa).expect("kappa validated at construction");
        self.kappa * (omega - self.mu).cos() - TAU.ln() - ln_i0
    }

    pub fn pdf(&self, omega: f64) -> f64 {
        let scaled_i0 = bessel_i_scaled(0, self.kappa).expect("kappa validated at construction");
        (self.kappa * ((omega - self.mu).cos() - 1.0)).exp() / (TAU * scaled_i0)
    }

    /// `1 - I1(kappa) / I0(kappa)`.
    pub fn circular_variance(&self) -> f64 {
        1.0 - bessel_ratio(self.kappa).expect("kappa validated at construction")
    }

    /// First trigonometric moment `E[exp(j omega)]` as `(re, im)`.
    pub fn first_moment(&self) -> (f64, f64) {
        let rho = bessel_ratio(self.kappa).expect("kappa validated at construction");
        (rho * self.mu.cos(), rho * self.mu.sin())
    }

    /// Standard deviation of the large-`kappa` Gaussian approximation.
    pub fn gaussian_std(&self) -> f64 {
        1.0 / self.kappa.sqrt()
    }

    /// Draws one variate in `[-pi, pi)` with the Best-Fisher rejection
    /// sampler.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let kappa = self.kappa;
        if kappa < SAMPLER_UNIFORM_KAPPA {
            return wrap_angle(self.mu + TAU * rng.random::<f64>() - PI);
        }
        if kappa > SAMPLER_NORMAL_KAPPA {
            let z: f64 = rng.sample(StandardNormal);
            return wrap_angle(self.mu + z / kappa.sqrt());
        }

        let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
        let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
        let r = (1.0 + rho * rho) / (2.0 * rho);
        let f = loop {
            let u1: f64 = rng.random();
            let u2: f64 = rng.random();
            let z = (PI * u1).cos();
            let f = (1.0 + r * z) / (r + z);
            let c = kappa * (r - f);
            if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
                break f;
            }
        };
        let theta = f.clamp(-1.0, 1.0).acos();
        let signed = if rng.random::<f64>() < 0.5 { -theta } else { theta };
        wrap_angle(self.mu + signed)
    }
}
