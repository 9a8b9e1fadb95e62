//! Cisoid signal model: steering vectors, Vandermonde matrices and noisy
//! synthesis of `y = A(omega) s + n`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

/// Frequencies closer than this are flagged as duplicates.
const DUPLICATE_TOL: f64 = 1e-12;

/// Samples of a unit-amplitude cisoid, `a(omega)_t = exp(j omega t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    omega: f64,
    entries: CVector,
}

impl SteeringVector {
    pub fn new(omega: f64, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("steering vector needs m >= 1 samples"));
        }
        Ok(Self {
            omega,
            entries: steering_entries(omega, m),
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &CVector {
        &self.entries
    }

    pub fn into_entries(self) -> CVector {
        self.entries
    }
}

pub fn steering_vector(omega: f64, m: usize) -> Result<SteeringVector> {
    SteeringVector::new(omega, m)
}

// Each entry is evaluated directly rather than by repeated multiplication so
// the phase error does not grow with t.
pub(crate) fn steering_entries(omega: f64, m: usize) -> CVector {
    CVector::from_iterator(m, (0..m).map(|t| Complex64::cis(omega * t as f64)))
}

/// `A(omega)` together with a flag raised when two frequencies coincide.
#[derive(Debug, Clone)]
pub struct Vandermonde {
    pub matrix: CMatrix,
    pub ill_conditioned: bool,
}

/// Builds the `m x d` Vandermonde matrix whose column `i` is `a(omega_i)`.
pub fn vandermonde(omegas: &[f64], m: usize) -> Result<Vandermonde> {
    let d = omegas.len();
    if d == 0 || m <= d {
        return Err(Error::domain(format!(
            "Vandermonde matrix needs m > d >= 1, got m = {m}, d = {d}"
        )));
    }
    Ok(Vandermonde {
        matrix: vandermonde_unchecked(omegas, m),
        ill_conditioned: has_duplicates(omegas),
    })
}

pub(crate) fn vandermonde_unchecked(omegas: &[f64], m: usize) -> CMatrix {
    CMatrix::from_fn(m, omegas.len(), |t, i| Complex64::cis(omegas[i] * t as f64))
}

fn has_duplicates(omegas: &[f64]) -> bool {
    omegas.iter().enumerate().any(|(i, &a)| {
        omegas[i + 1..]
            .iter()
            .any(|&b| crate::circular::wrap_angle(a - b).abs() < DUPLICATE_TOL)
    })
}

/// Phase law for cisoid amplitudes `s_i = alpha_i exp(j phi_i)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseLaw {
    /// `phi_i` drawn uniformly over `[0, 2 pi)` for every draw.
    Uniform,
    /// Fixed phases in radians.
    Fixed(Vec<f64>),
}

/// Everything needed to synthesize one observation.
#[derive(Debug, Clone)]
pub struct SignalDraw {
    pub omegas: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub phases: PhaseLaw,
    pub sigma2: f64,
    pub m: usize,
}

#[derive(Debug, Clone)]
pub struct SignalInstance {
    pub y: CVector,
    pub true_omegas: Vec<f64>,
    pub true_s: Vec<Complex64>,
    pub sigma2: f64,
}

impl SignalInstance {
    pub fn m(&self) -> usize {
        self.y.len()
    }
}

/// Synthesizes `y = A(omega) s + n` with circularly-symmetric complex
/// Gaussian noise of variance `sigma2`.
///
/// Random draws happen in a fixed order (phases for `i = 1..d`, then noise
/// for `t = 0..m-1`, real part before imaginary part) so a seeded stream
/// reproduces the same instance everywhere.
pub fn synthesize<R: Rng + ?Sized>(draw: &SignalDraw, rng: &mut R) -> Result<SignalInstance> {
    let d = draw.omegas.len();
    let m = draw.m;
    if d == 0 || m <= d {
        return Err(Error::domain(format!(
            "signal model needs m > d >= 1, got m = {m}, d = {d}"
        )));
    }
    if draw.amplitudes.len() != d {
        return Err(Error::domain(format!(
            "expected {d} amplitudes, got {}",
            draw.amplitudes.len()
        )));
    }
    if !(draw.sigma2 >= 0.0 && draw.sigma2.is_finite()) {
        return Err(Error::domain(format!(
            "noise variance must be finite and >= 0, got {}",
            draw.sigma2
        )));
    }
    if draw.omegas.iter().chain(&draw.amplitudes).any(|v| !v.is_finite()) {
        return Err(Error::domain("frequencies and amplitudes must be finite"));
    }

    let phases: Vec<f64> = match &draw.phases {
        PhaseLaw::Uniform => (0..d).map(|_| TAU * rng.random::<f64>()).collect(),
        PhaseLaw::Fixed(p) if p.len() == d => p.clone(),
        PhaseLaw::Fixed(p) => {
            return Err(Error::domain(format!("expected {d} phases, got {}", p.len())));
        }
    };
    let s: Vec<Complex64> = draw
        .amplitudes
        .iter()
        .zip(&phases)
        .map(|(&alpha, &phi)| Complex64::from_polar(alpha, phi))
        .collect();

    let a = vandermonde_unchecked(&draw.omegas, m);
    let mut y = &a * CVector::from_column_slice(&s);
    if draw.sigma2 > 0.0 {
        let scale = (draw.sigma2 / 2.0).sqrt();
        for v in y.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *v += Complex64::new(scale * re, scale * im);
        }
    }

    Ok(SignalInstance {
        y,
        true_omegas: draw.omegas.clone(),
        true_s: s,
        sigma2: draw.sigma2,
    })
}
