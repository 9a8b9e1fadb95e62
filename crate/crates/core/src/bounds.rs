//! Cramér-Rao bounds for the frequencies of a cisoid mixture.
//!
//! The deterministic bound is `C = ((2 / sigma2) Re{S^* D^* P_perp(A) D S})^-1`
//! with `S = diag(s)` and `D` the matrix of steering-vector derivatives.
//! The approximate hybrid bound adds `diag(lambda)` (the prior
//! concentrations of the frequencies treated as random) to the Fisher
//! matrix evaluated at the mean frequencies. It is only meaningful when
//! those concentrations are large.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circular::wrap_angle;
use crate::error::{Error, Result};
use crate::projection::complement_projector;
use crate::signal::{vandermonde_unchecked, CMatrix, CVector};

/// Smallest Fisher eigenvalue, relative to the largest, that still counts
/// as invertible.
const FISHER_CONDITION_LIMIT: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrbInputs {
    pub omegas: Vec<f64>,
    pub s: Vec<Complex64>,
    pub sigma2: f64,
    pub m: usize,
    /// Prior concentration added per frequency; zero for deterministic
    /// frequencies. Ignored by [`crb`].
    pub lambda: Vec<f64>,
}

impl CrbInputs {
    fn validate(&self) -> Result<()> {
        let d = self.omegas.len();
        if d == 0 || self.m <= d {
            return Err(Error::domain(format!(
                "bounds need m > d >= 1, got m = {}, d = {d}",
                self.m
            )));
        }
        if self.s.len() != d || self.lambda.len() != d {
            return Err(Error::domain(format!(
                "expected {d} amplitudes and {d} prior weights, got {} and {}",
                self.s.len(),
                self.lambda.len()
            )));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::domain(format!(
                "noise variance must be positive, got {}",
                self.sigma2
            )));
        }
        if self.lambda.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
            return Err(Error::domain("prior weights must be finite and >= 0"));
        }
        Ok(())
    }
}

/// `d a(omega) / d omega`, entry `t` is `j t exp(j omega t)`.
pub fn steering_derivative(omega: f64, m: usize) -> CVector {
    CVector::from_iterator(
        m,
        (0..m).map(|t| Complex64::new(0.0, t as f64) * Complex64::cis(omega * t as f64)),
    )
}

/// `(2 / sigma2) Re{S^* D^* P_perp(A) D S}`.
pub fn fisher_information(inputs: &CrbInputs) -> Result<DMatrix<f64>> {
    inputs.validate()?;
    let (m, d) = (inputs.m, inputs.omegas.len());
    let a = vandermonde_unchecked(&inputs.omegas, m);
    let perp = complement_projector(&a)?.matrix;
    let ds = CMatrix::from_fn(m, d, |t, i| {
        Complex64::new(0.0, t as f64) * Complex64::cis(inputs.omegas[i] * t as f64) * inputs.s[i]
    });
    let inner = ds.adjoint() * perp * &ds;
    let scale = 2.0 / inputs.sigma2;
    let mut fisher = DMatrix::from_fn(d, d, |i, k| scale * inner[(i, k)].re);
    // symmetrize rounding
    fisher = 0.5 * (&fisher + fisher.transpose());
    Ok(fisher)
}

fn invert_fisher(fisher: DMatrix<f64>, inputs: &CrbInputs) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(fisher.clone());
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if max.is_nan() || max <= 0.0 || min <= FISHER_CONDITION_LIMIT * max {
        return Err(Error::Singular(describe_degeneracy(inputs)));
    }
    let inv = fisher
        .cholesky()
        .ok_or_else(|| Error::Singular(describe_degeneracy(inputs)))?
        .inverse();
    Ok(0.5 * (&inv + inv.transpose()))
}

fn describe_degeneracy(inputs: &CrbInputs) -> String {
    if let Some(i) = inputs.s.iter().position(|s| s.norm() == 0.0) {
        return format!("amplitude {} is zero", i + 1);
    }
    let d = inputs.omegas.len();
    let mut closest = (f64::INFINITY, 0, 0);
    for i in 0..d {
        for k in i + 1..d {
            let gap = wrap_angle(inputs.omegas[i] - inputs.omegas[k]).abs();
            if gap < closest.0 {
                closest = (gap, i, k);
            }
        }
    }
    if closest.0.is_finite() {
        format!(
            "frequencies {} and {} are nearly collinear (separation {:.3e} rad)",
            closest.1 + 1,
            closest.2 + 1,
            closest.0
        )
    } else {
        "Fisher information is not positive definite".to_string()
    }
}

/// Deterministic Cramér-Rao bound on the frequencies.
pub fn crb(inputs: &CrbInputs) -> Result<DMatrix<f64>> {
    let fisher = fisher_information(inputs)?;
    invert_fisher(fisher, inputs)
}

/// Approximate hybrid bound `(F(mean omegas) + diag(lambda))^-1`, where
/// `inputs.omegas` holds the mean frequencies.
pub fn acrb(inputs: &CrbInputs) -> Result<DMatrix<f64>> {
    let mut fisher = fisher_information(inputs)?;
    for (i, l) in inputs.lambda.iter().enumerate() {
        fisher[(i, i)] += l;
    }
    invert_fisher(fisher, inputs)
}

/// `6 sigma2 / (|s|^2 m (m^2 - 1))`, the single-cisoid bound.
pub fn single_tone_crb(s_abs2: f64, sigma2: f64, m: usize) -> f64 {
    let m = m as f64;
    6.0 * sigma2 / (s_abs2 * m * (m * m - 1.0))
}
