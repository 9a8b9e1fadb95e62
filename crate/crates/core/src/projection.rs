//! Orthogonal projectors onto Vandermonde column spaces.
//!
//! Projectors are formed from an orthonormal basis of the column space
//! (left singular vectors above a rank threshold), never from the normal
//! equations, so nearly collinear steering vectors stay well behaved.

use nalgebra::SVD;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::{CMatrix, CVector, SteeringVector};

/// Candidates with `||P_perp a||^2` below this multiple of `m` are treated
/// as lying in the span of the fixed columns.
pub const DEGENERATE_DEN_FACTOR: f64 = 1e-12;

fn check_finite(a: &CMatrix) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::domain("matrix has non-finite entries"))
    }
}

fn rank_threshold(a: &CMatrix, sigma_max: f64) -> f64 {
    a.nrows().max(a.ncols()) as f64 * f64::EPSILON * sigma_max
}

fn svd_of(a: &CMatrix) -> SVD<Complex64, nalgebra::Dyn, nalgebra::Dyn> {
    SVD::new(a.clone(), true, true)
}

/// Moore-Penrose pseudo-inverse with singular values below
/// `max(m, d) * eps * sigma_max` treated as zero.
pub fn pseudo_inverse(a: &CMatrix) -> Result<CMatrix> {
    check_finite(a)?;
    let (m, d) = a.shape();
    if m < d {
        return Err(Error::domain(format!(
            "pseudo-inverse expects a tall matrix, got {m}x{d}"
        )));
    }
    if d == 0 {
        return Ok(CMatrix::zeros(0, m));
    }
    let svd = svd_of(a);
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let sigma_max = svd.singular_values.max();
    let tol = rank_threshold(a, sigma_max);

    let mut pinv = CMatrix::zeros(d, m);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > tol {
            // V_k (1/s) U_k^*
            let v_k = v_t.row(k).adjoint();
            let u_k = u.column(k).adjoint();
            pinv += (v_k * u_k).unscale(s);
        }
    }
    Ok(pinv)
}

/// Orthonormal basis for the column space of a matrix.
#[derive(Debug, Clone)]
pub struct RangeBasis {
    q: CMatrix,
    m: usize,
}

impl RangeBasis {
    pub fn new(a: &CMatrix) -> Result<Self> {
        check_finite(a)?;
        let m = a.nrows();
        if a.ncols() == 0 {
            return Ok(Self {
                q: CMatrix::zeros(m, 0),
                m,
            });
        }
        let svd = svd_of(a);
        let u = svd.u.as_ref().expect("left singular vectors requested");
        let tol = rank_threshold(a, svd.singular_values.max());
        let keep: Vec<usize> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > tol)
            .map(|(k, _)| k)
            .collect();
        let q = CMatrix::from_fn(m, keep.len(), |t, j| u[(t, keep[j])]);
        Ok(Self { q, m })
    }

    pub fn rank(&self) -> usize {
        self.q.ncols()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `v - Q Q^* v`, the component of `v` orthogonal to the range.
    pub fn project_out(&self, v: &CVector) -> CVector {
        if self.q.ncols() == 0 {
            return v.clone();
        }
        let coeffs = self.q.ad_mul(v);
        v - &self.q * coeffs
    }

    pub fn range_projector(&self) -> CMatrix {
        &self.q * self.q.adjoint()
    }
}

/// An orthogonal projector together with the rank of the matrix it was
/// built from.
#[derive(Debug, Clone)]
pub struct Projector {
    pub matrix: CMatrix,
    pub source_rank: usize,
}

impl Projector {
    pub fn apply(&self, v: &CVector) -> CVector {
        &self.matrix * v
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `||P - P^*|| / ||P||`
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.matrix.norm().max(f64::MIN_POSITIVE);
        (&self.matrix - self.matrix.adjoint()).norm() / scale
    }

    /// `||P^2 - P|| / ||P||`
    pub fn idempotent_defect(&self) -> f64 {
        let scale = self.matrix.norm().max(f64::MIN_POSITIVE);
        (&self.matrix * &self.matrix - &self.matrix).norm() / scale
    }
}

/// Projector onto the column space of `a`.
pub fn range_projector(a: &CMatrix) -> Result<Projector> {
    let basis = RangeBasis::new(a)?;
    Ok(Projector {
        matrix: basis.range_projector(),
        source_rank: basis.rank(),
    })
}

/// `I - A A^+`, the projector onto the orthogonal complement of the
/// column space of `a`.
pub fn complement_projector(a: &CMatrix) -> Result<Projector> {
    let (m, d) = a.shape();
    if m <= d {
        return Err(Error::domain(format!(
            "complement projector expects m > d, got {m}x{d}"
        )));
    }
    let basis = RangeBasis::new(a)?;
    Ok(Projector {
        matrix: CMatrix::identity(m, m) - basis.range_projector(),
        source_rank: basis.rank(),
    })
}

/// Pieces of the rank-one projector update `P_[A_i, a] = P_A_i + P_a~`
/// with `a~ = P_perp(A_i) a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualComponents {
    /// `y^* P_perp(A_i) y`
    pub r0: f64,
    /// `y^* P_perp(A_i) a`
    pub num: Complex64,
    /// `||P_perp(A_i) a||^2`
    pub den: f64,
    /// `a` is (numerically) in the span of `A_i`.
    pub degenerate: bool,
}

impl ResidualComponents {
    /// `y^* P_perp([A_i, a]) y = r0 - |num|^2 / den`, clamped at zero.
    /// `None` for degenerate candidates.
    pub fn residual(&self) -> Option<f64> {
        if self.degenerate {
            None
        } else {
            Some((self.r0 - self.num.norm_sqr() / self.den).max(0.0))
        }
    }
}

/// Fixed part of a coordinate search: the complement basis of the held
/// columns and the projected data `P_perp(A_i) y`. Evaluating a candidate
/// column then costs O(m * (d - 1)).
#[derive(Debug, Clone)]
pub struct ComplementFrame {
    basis: RangeBasis,
    projected_y: CVector,
    r0: f64,
}

impl ComplementFrame {
    pub fn new(fixed: &CMatrix, y: &CVector) -> Result<Self> {
        if fixed.nrows() != y.len() {
            return Err(Error::domain(format!(
                "data length {} does not match {} matrix rows",
                y.len(),
                fixed.nrows()
            )));
        }
        let basis = RangeBasis::new(fixed)?;
        let projected_y = basis.project_out(y);
        let r0 = projected_y.norm_squared();
        Ok(Self {
            basis,
            projected_y,
            r0,
        })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn components(&self, a: &CVector) -> ResidualComponents {
        let projected_a = self.basis.project_out(a);
        let den = projected_a.norm_squared();
        // y^* P a = (P y)^* a for Hermitian P; use the projected a as well
        // so both factors carry the same rounding.
        let num = self.projected_y.dotc(&projected_a);
        ResidualComponents {
            r0: self.r0,
            num,
            den,
            degenerate: den < DEGENERATE_DEN_FACTOR * self.basis.m() as f64,
        }
    }
}

/// `r0`, `num` and `den` for candidate `a` against the held columns
/// `fixed` (which may have zero columns).
pub fn residual_components(
    fixed: &CMatrix,
    a: &SteeringVector,
    y: &CVector,
) -> Result<ResidualComponents> {
    if a.m() != y.len() {
        return Err(Error::domain("steering vector and data lengths differ"));
    }
    Ok(ComplementFrame::new(fixed, y)?.components(a.entries()))
}

/// `y^* P_perp(A) y`, rank-aware.
pub fn residual_energy(a: &CMatrix, y: &CVector) -> Result<f64> {
    Ok(ComplementFrame::new(a, y)?.r0())
}
