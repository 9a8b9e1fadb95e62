//! ESPRIT frequency estimation with a forward-backward covariance.
//!
//! This is the prior-free baseline: the signal subspace is spanned by the
//! `d` principal eigenvectors of the `p x p` covariance, and the
//! frequencies are the angles of the eigenvalues of the least-squares
//! rotation between its two shifted sub-blocks.

use nalgebra::linalg::Schur;
use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::circular::wrap_angle;
use crate::error::{Error, Result};
use crate::projection::pseudo_inverse;
use crate::signal::{CMatrix, CVector};

/// Eigenvalues below this fraction of the largest count as noise when
/// checking for a subspace deficit.
const SIGNIFICANT_EIGENVALUE: f64 = 1e-10;

/// Sample covariance of sliding length-`p` windows of the data.
#[derive(Debug, Clone)]
pub struct CovarianceEstimate {
    pub r: CMatrix,
    pub p: usize,
    pub snapshots: usize,
}

impl CovarianceEstimate {
    pub fn hermitian_defect(&self) -> f64 {
        (&self.r - self.r.adjoint()).norm()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.r.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }
}

/// Forward-backward covariance `(R_f + J conj(R_f) J) / 2`, where `R_f`
/// averages `x_k x_k^*` over the windows `x_k = y[k..k+p]`.
pub fn forward_backward_covariance(y: &CVector, p: usize) -> Result<CovarianceEstimate> {
    let m = y.len();
    if p == 0 || p > m {
        return Err(Error::domain(format!(
            "window length must satisfy 1 <= p <= m, got p = {p}, m = {m}"
        )));
    }
    let snapshots = m - p + 1;
    let mut forward = CMatrix::zeros(p, p);
    for k in 0..snapshots {
        let x = y.rows(k, p);
        forward += x * x.adjoint();
    }
    forward.unscale_mut(snapshots as f64);

    let r = CMatrix::from_fn(p, p, |i, j| {
        0.5 * (forward[(i, j)] + forward[(p - 1 - i, p - 1 - j)].conj())
    });
    Ok(CovarianceEstimate { r, p, snapshots })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EspritEstimate {
    /// Frequencies in `[-pi, pi)`, in no particular order.
    pub omegas: Vec<f64>,
    /// Fewer than `d` eigenvalues stood out from the rest.
    pub low_rank: bool,
}

/// ESPRIT frequencies for model order `d` with window length `p`.
pub fn esprit(y: &CVector, d: usize, p: usize) -> Result<EspritEstimate> {
    let m = y.len();
    if d == 0 || p < d + 1 || p > m || m - p + 1 < d {
        return Err(Error::domain(format!(
            "ESPRIT needs d + 1 <= p and m - p + 1 >= d, got m = {m}, d = {d}, p = {p}"
        )));
    }
    if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::domain("data contains non-finite samples"));
    }

    let cov = forward_backward_covariance(y, p)?;
    let eig = SymmetricEigen::new(cov.r);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].abs().total_cmp(&eig.eigenvalues[a].abs()));

    let largest = eig.eigenvalues[order[0]].abs();
    let low_rank = largest == 0.0
        || eig.eigenvalues[order[d - 1]].abs() <= SIGNIFICANT_EIGENVALUE * largest;

    let signal = CMatrix::from_fn(p, d, |t, j| eig.eigenvectors[(t, order[j])]);
    let upper = signal.rows(0, p - 1).into_owned();
    let lower = signal.rows(1, p - 1).into_owned();
    let rotation = pseudo_inverse(&upper)? * lower;

    let omegas = rotation_eigenvalues(rotation)?
        .into_iter()
        .map(|z| wrap_angle(z.arg()))
        .collect();
    Ok(EspritEstimate { omegas, low_rank })
}

fn rotation_eigenvalues(rotation: CMatrix) -> Result<Vec<Complex64>> {
    if rotation.nrows() == 1 {
        return Ok(vec![rotation[(0, 0)]]);
    }
    Schur::new(rotation)
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::domain("Schur decomposition of the rotation matrix failed"))
}

/// Default window length, `floor(m / 2)`.
pub fn default_window(m: usize) -> usize {
    m / 2
}
