//! MAP line-spectrum estimation with von Mises frequency priors.
//!
//! Concentrating out the amplitudes and noise variance under Jeffreys
//! priors leaves the cost
//!
//! ```text
//! V(omega) = (y^* P_perp(A(omega)) y) * exp(phi(omega)),
//! phi(omega) = sum_i Re{beta_i exp(j omega_i)},
//! beta_i = -kappa_i exp(-j mu_i) / (m + 1),
//! ```
//!
//! which [`estimate`] minimizes one frequency at a time over successively
//! refined grids (alternating projections). Costs are compared in the log
//! domain, so arbitrarily large concentrations are safe.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circular::{wrap_angle, VonMisesPrior};
use crate::error::{Error, Result};
use crate::projection::{pseudo_inverse, residual_energy, ComplementFrame};
use crate::signal::{steering_entries, vandermonde_unchecked, CMatrix, CVector};

/// Prior weights `beta_i = -kappa_i exp(-j mu_i) / (m + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorWeights {
    beta: Vec<Complex64>,
    m: usize,
}

impl PriorWeights {
    pub fn new(priors: &[VonMisesPrior], m: usize) -> Self {
        let scale = -1.0 / (m as f64 + 1.0);
        let beta = priors
            .iter()
            .map(|p| Complex64::from_polar(p.kappa(), -p.mu()) * scale)
            .collect();
        Self { beta, m }
    }

    pub fn beta(&self) -> &[Complex64] {
        &self.beta
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `pi_i = kappa_i exp(-j mu_i)`, the prior term of the log-posterior
    /// before concentration.
    pub fn prior_vector(&self) -> Vec<Complex64> {
        let scale = -(self.m as f64 + 1.0);
        self.beta.iter().map(|b| b * scale).collect()
    }

    /// `Re{beta_i exp(j omega)}`
    pub fn phi_i(&self, i: usize, omega: f64) -> f64 {
        (self.beta[i] * Complex64::cis(omega)).re
    }
}

/// `phi(omega) = Re{e_2^* A(omega) beta} = sum_i Re{beta_i exp(j omega_i)}`.
pub fn phi(omegas: &[f64], weights: &PriorWeights) -> Result<f64> {
    if omegas.len() != weights.beta.len() {
        return Err(Error::domain(format!(
            "{} frequencies but {} prior weights",
            omegas.len(),
            weights.beta.len()
        )));
    }
    Ok(omegas
        .iter()
        .enumerate()
        .map(|(i, &w)| weights.phi_i(i, w))
        .sum())
}

fn check_problem(y: &CVector, d: usize) -> Result<usize> {
    let m = y.len();
    if d == 0 || m <= d {
        return Err(Error::domain(format!(
            "estimation needs m > d >= 1, got m = {m}, d = {d}"
        )));
    }
    if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::domain("data contains non-finite samples"));
    }
    Ok(m)
}

/// Residuals below `||y||^2 m eps` are rounding noise, so the cost treats
/// them as equal. Without this an exact fit (noise-free data on a grid
/// point) scores `-inf` and overrides any prior.
fn residual_floor(y: &CVector) -> f64 {
    y.norm_squared() * y.len() as f64 * f64::EPSILON
}

/// `ln(y^* P_perp(A) y) + phi(omega)`, with the residual floored at
/// rounding level.
pub fn log_map_cost(y: &CVector, omegas: &[f64], priors: &[VonMisesPrior]) -> Result<f64> {
    if omegas.len() != priors.len() {
        return Err(Error::domain("one prior per frequency is required"));
    }
    let m = check_problem(y, omegas.len())?;
    let residual = residual_energy(&vandermonde_unchecked(omegas, m), y)?;
    Ok(residual.max(residual_floor(y)).ln() + phi(omegas, &PriorWeights::new(priors, m))?)
}

/// The concentrated MAP cost `(y^* P_perp(A) y) exp(phi(omega))`.
///
/// Overflows to infinity once `phi` exceeds about 709; compare
/// [`log_map_cost`] values in that regime.
pub fn map_cost(y: &CVector, omegas: &[f64], priors: &[VonMisesPrior]) -> Result<f64> {
    if omegas.len() != priors.len() {
        return Err(Error::domain("one prior per frequency is required"));
    }
    let m = check_problem(y, omegas.len())?;
    let residual = residual_energy(&vandermonde_unchecked(omegas, m), y)?;
    Ok(residual * phi(omegas, &PriorWeights::new(priors, m))?.exp())
}

/// Log of the coordinate cost
/// `(y^* P y - |y^* P a(omega)|^2 / ||P a(omega)||^2) exp(Re{beta_i exp(j omega)})`
/// with `P = P_perp(A(others))`. `None` when `a(omega)` lies in the span of
/// the held frequencies.
pub fn per_frequency_log_cost(
    y: &CVector,
    omega: f64,
    others: &[f64],
    prior: &VonMisesPrior,
) -> Result<Option<f64>> {
    let m = check_problem(y, others.len() + 1)?;
    let frame = ComplementFrame::new(&vandermonde_unchecked(others, m), y)?;
    let weights = PriorWeights::new(std::slice::from_ref(prior), m);
    Ok(coordinate_log_cost(&frame, &weights, 0, omega, m, residual_floor(y)))
}

/// Coordinate cost for frequency `omega` with `others` held fixed; see
/// [`per_frequency_log_cost`].
pub fn per_frequency_cost(
    y: &CVector,
    omega: f64,
    others: &[f64],
    prior: &VonMisesPrior,
) -> Result<Option<f64>> {
    Ok(per_frequency_log_cost(y, omega, others, prior)?.map(f64::exp))
}

fn coordinate_log_cost(
    frame: &ComplementFrame,
    weights: &PriorWeights,
    i: usize,
    omega: f64,
    m: usize,
    floor: f64,
) -> Option<f64> {
    let residual = frame.components(&steering_entries(omega, m)).residual()?;
    Some(residual.max(floor).ln() + weights.phi_i(i, omega))
}

/// Grid search settings for [`estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Grid points per one-dimensional search.
    pub grid_points: usize,
    /// Number of refinement levels; each halves the search interval.
    pub levels: usize,
    /// Convergence threshold in units of the current grid spacing.
    pub tolerance_cells: f64,
    pub max_sweeps_per_level: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid_points: 500,
            levels: 10,
            tolerance_cells: 2.0,
            max_sweeps_per_level: 50,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 8 {
            return Err(Error::config("solver.g", "grid needs at least 8 points"));
        }
        if self.levels < 1 {
            return Err(Error::config("solver.L", "at least one level is required"));
        }
        if !(self.tolerance_cells > 0.0 && self.tolerance_cells.is_finite()) {
            return Err(Error::config("solver.tolerance_cells", "must be positive"));
        }
        if self.max_sweeps_per_level < 1 {
            return Err(Error::config("solver.max_sweeps", "must be positive"));
        }
        Ok(())
    }

    /// Grid spacing at `level` (0-based).
    pub fn spacing(&self, level: usize) -> f64 {
        TAU / (self.grid_points as f64 * 2f64.powi(level as i32))
    }

    /// Resolution limit `pi / (2^(L-1) g)`: half the finest spacing, the
    /// largest distance from any frequency to the nearest final grid point.
    pub fn resolution(&self) -> f64 {
        0.5 * self.spacing(self.levels - 1)
    }

    fn grid(&self, level: usize, center: f64) -> Vec<f64> {
        let g = self.grid_points;
        let h = self.spacing(level);
        if level == 0 {
            return (0..g).map(|k| -PI + k as f64 * h).collect();
        }
        let half = (g / 2) as f64;
        (0..g)
            .map(|k| wrap_angle(center + (k as f64 - half) * h))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateResult {
    /// Estimates in `[-pi, pi)`, entry `i` paired with prior `i`.
    pub omegas: Vec<f64>,
    pub s_hat: Vec<Complex64>,
    pub sigma2_hat: f64,
    pub sweeps_per_level: Vec<usize>,
    /// Every level met its tolerance before the sweep cap.
    pub converged: bool,
    /// Estimates after initialization and after every sweep.
    pub history: Vec<Vec<f64>>,
}

impl EstimateResult {
    pub fn total_sweeps(&self) -> usize {
        self.sweeps_per_level.iter().sum()
    }
}

// Lowest index wins ties; degenerate candidates are skipped.
fn grid_argmin(
    frame: &ComplementFrame,
    weights: &PriorWeights,
    i: usize,
    grid: &[f64],
    m: usize,
    floor: f64,
) -> Option<f64> {
    let mut best: Option<(f64, f64)> = None;
    for &omega in grid {
        if let Some(cost) = coordinate_log_cost(frame, weights, i, omega, m, floor) {
            if best.is_none_or(|(c, _)| cost < c) {
                best = Some((cost, omega));
            }
        }
    }
    best.map(|(_, omega)| omega)
}

fn frame_without(y: &CVector, estimates: &[f64], skip: usize, m: usize) -> Result<ComplementFrame> {
    let others: Vec<f64> = estimates
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != skip)
        .map(|(_, &w)| w)
        .collect();
    ComplementFrame::new(&vandermonde_unchecked(&others, m), y)
}

/// Alternating-projections MAP estimate of the `d = priors.len()`
/// frequencies in `y`, with closed-form amplitudes `A^+ y` and noise
/// variance `y^* P_perp y / (m + 1)`.
///
/// Frequencies are initialized one at a time in order of decreasing prior
/// certainty `|beta_i|`, each against those already placed. Every level
/// then sweeps `i = 1..d` until no estimate moves by `tolerance_cells`
/// grid spacings or more, and the next level searches half the interval
/// around each estimate.
pub fn estimate(
    y: &CVector,
    priors: &[VonMisesPrior],
    config: &SolverConfig,
) -> Result<EstimateResult> {
    config.validate()?;
    let d = priors.len();
    let m = check_problem(y, d)?;
    let weights = PriorWeights::new(priors, m);
    let floor = residual_floor(y);

    let mut order: Vec<usize> = (0..d).collect();
    // stable sort keeps index order among equal certainties
    order.sort_by(|&a, &b| {
        weights.beta[b]
            .norm()
            .partial_cmp(&weights.beta[a].norm())
            .expect("finite prior weights")
    });

    let coarse = config.grid(0, 0.0);
    let mut placed: Vec<f64> = Vec::with_capacity(d);
    let mut estimates = vec![0.0; d];
    for &i in &order {
        let frame = ComplementFrame::new(&vandermonde_unchecked(&placed, m), y)?;
        let omega = grid_argmin(&frame, &weights, i, &coarse, m, floor).ok_or_else(|| {
            Error::domain(format!("no admissible grid point for frequency {}", i + 1))
        })?;
        estimates[i] = omega;
        placed.push(omega);
    }

    let mut history = vec![estimates.clone()];
    let mut sweeps_per_level = Vec::with_capacity(config.levels);
    let mut converged = true;
    for level in 0..config.levels {
        let grids: Vec<Vec<f64>> = estimates.iter().map(|&c| config.grid(level, c)).collect();
        let threshold = config.tolerance_cells * config.spacing(level);
        let mut sweeps = 0;
        loop {
            sweeps += 1;
            let mut settled = true;
            for i in 0..d {
                let frame = frame_without(y, &estimates, i, m)?;
                if let Some(omega) = grid_argmin(&frame, &weights, i, &grids[i], m, floor) {
                    if wrap_angle(omega - estimates[i]).abs() >= threshold {
                        settled = false;
                    }
                    estimates[i] = omega;
                }
            }
            history.push(estimates.clone());
            if settled {
                break;
            }
            if sweeps >= config.max_sweeps_per_level {
                converged = false;
                break;
            }
        }
        sweeps_per_level.push(sweeps);
    }

    let a = vandermonde_unchecked(&estimates, m);
    let s_hat = (pseudo_inverse(&a)? * y).iter().copied().collect();
    let sigma2_hat = residual_energy(&a, y)? / (m as f64 + 1.0);

    Ok(EstimateResult {
        omegas: estimates,
        s_hat,
        sigma2_hat,
        sweeps_per_level,
        converged,
        history,
    })
}

/// Amplitudes `A^+(omega) y` for given frequencies.
pub fn amplitudes(y: &CVector, omegas: &[f64]) -> Result<Vec<Complex64>> {
    let m = check_problem(y, omegas.len())?;
    let a: CMatrix = vandermonde_unchecked(omegas, m);
    Ok((pseudo_inverse(&a)? * y).iter().copied().collect())
}
