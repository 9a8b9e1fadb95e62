//! Monte Carlo benchmark harness.
//!
//! A [`Scenario`] describes the frequencies (random from their priors or
//! fixed), amplitudes, noise levels and sample counts to sweep. Every
//! trial runs on its own ChaCha stream seeded from `(master seed, sweep
//! index, trial index)`, so results do not depend on scheduling or on
//! the number of worker threads.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{acrb, crb, CrbInputs};
use crate::circular::{wrap_angle, VonMisesPrior};
use crate::error::{Error, Result};
use crate::esprit::{default_window, esprit};
use crate::map::{estimate, SolverConfig};
use crate::signal::{synthesize, PhaseLaw, SignalDraw};

/// Largest model order for exhaustive error pairing.
pub const MAX_MATCH_ORDER: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Map,
    Esprit,
}

impl Estimator {
    pub fn name(&self) -> &'static str {
        match self {
            Estimator::Map => "map",
            Estimator::Esprit => "esprit",
        }
    }

    /// Whether output index `i` already belongs to true frequency `i`.
    pub fn keyed(&self) -> bool {
        matches!(self, Estimator::Map)
    }
}

/// How one true frequency is generated, and the prior the MAP estimator
/// is given for it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FrequencySpec {
    /// Drawn from the prior in every trial.
    Random { prior: VonMisesPrior },
    /// Held at `omega`; the estimator still sees `prior`.
    Fixed { omega: f64, prior: VonMisesPrior },
}

impl FrequencySpec {
    pub fn prior(&self) -> VonMisesPrior {
        match self {
            FrequencySpec::Random { prior } | FrequencySpec::Fixed { prior, .. } => *prior,
        }
    }

    /// Prior information entering the hybrid bound: `kappa` for random
    /// frequencies, zero for fixed ones.
    pub fn lambda(&self) -> f64 {
        match self {
            FrequencySpec::Random { prior } => prior.kappa(),
            FrequencySpec::Fixed { .. } => 0.0,
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            FrequencySpec::Random { prior } => prior.mu(),
            FrequencySpec::Fixed { omega, .. } => *omega,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVar {
    Snr,
    Samples,
}

impl SweepVar {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVar::Snr => "snr",
            SweepVar::Samples => "samples",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub frequencies: Vec<FrequencySpec>,
    pub m_values: Vec<usize>,
    pub snr_db_values: Vec<f64>,
    /// `alpha_i`
    pub amplitudes: Vec<f64>,
    #[serde(with = "phase_law_serde")]
    pub phases: PhaseLaw,
    pub trials: usize,
    pub seed: u64,
    pub estimators: Vec<Estimator>,
    pub solver: SolverConfig,
}

mod phase_law_serde {
    use super::PhaseLaw;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Name(String),
        Fixed(Vec<f64>),
    }

    pub fn serialize<S: Serializer>(law: &PhaseLaw, ser: S) -> Result<S::Ok, S::Error> {
        match law {
            PhaseLaw::Uniform => Repr::Name("uniform".into()),
            PhaseLaw::Fixed(p) => Repr::Fixed(p.clone()),
        }
        .serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<PhaseLaw, D::Error> {
        match Repr::deserialize(de)? {
            Repr::Name(n) if n == "uniform" => Ok(PhaseLaw::Uniform),
            Repr::Name(n) => Err(serde::de::Error::custom(format!("unknown phase law `{n}`"))),
            Repr::Fixed(p) => Ok(PhaseLaw::Fixed(p)),
        }
    }
}

/// One value of the swept variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub index: usize,
    pub m: usize,
    pub snr_db: f64,
    /// `10^(-snr_db / 10)`, so unit amplitudes have the requested SNR.
    pub sigma2: f64,
}

impl SweepPoint {
    pub fn value(&self, var: SweepVar) -> f64 {
        match var {
            SweepVar::Snr => self.snr_db,
            SweepVar::Samples => self.m as f64,
        }
    }
}

pub fn snr_to_sigma2(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

impl Scenario {
    /// Three cisoids with `kappa = 2000, 200, 0`, means `0.45 pi` and
    /// `0.60 pi`, and the third frequency fixed at `0.75 pi`; unit
    /// amplitudes with uniform random phases.
    pub fn three_tone(m_values: Vec<usize>, snr_db_values: Vec<f64>) -> Self {
        let prior = |mu: f64, kappa: f64| VonMisesPrior::new(mu * PI, kappa).expect("valid prior");
        Self {
            frequencies: vec![
                FrequencySpec::Random {
                    prior: prior(0.45, 2000.0),
                },
                FrequencySpec::Random {
                    prior: prior(0.60, 200.0),
                },
                FrequencySpec::Fixed {
                    omega: 0.75 * PI,
                    prior: prior(0.0, 0.0),
                },
            ],
            m_values,
            snr_db_values,
            amplitudes: vec![1.0; 3],
            phases: PhaseLaw::Uniform,
            trials: 500,
            seed: 1,
            estimators: vec![Estimator::Map, Estimator::Esprit],
            solver: SolverConfig::default(),
        }
    }

    /// SNR sweep at `m = 32`.
    pub fn three_tone_snr_sweep() -> Self {
        Self::three_tone(vec![32], vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0])
    }

    /// Sample-count sweep at 0 dB.
    pub fn three_tone_samples_sweep() -> Self {
        Self::three_tone(vec![8, 16, 32, 64, 128], vec![0.0])
    }

    pub fn d(&self) -> usize {
        self.frequencies.len()
    }

    pub fn priors(&self) -> Vec<VonMisesPrior> {
        self.frequencies.iter().map(FrequencySpec::prior).collect()
    }

    pub fn sweep_var(&self) -> SweepVar {
        if self.m_values.len() > 1 {
            SweepVar::Samples
        } else {
            SweepVar::Snr
        }
    }

    pub fn sweep_points(&self) -> Vec<SweepPoint> {
        let make = |index, m, snr_db| SweepPoint {
            index,
            m,
            snr_db,
            sigma2: snr_to_sigma2(snr_db),
        };
        match self.sweep_var() {
            SweepVar::Samples => self
                .m_values
                .iter()
                .enumerate()
                .map(|(i, &m)| make(i, m, self.snr_db_values[0]))
                .collect(),
            SweepVar::Snr => self
                .snr_db_values
                .iter()
                .enumerate()
                .map(|(i, &snr)| make(i, self.m_values[0], snr))
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.d();
        if d == 0 {
            return Err(Error::config("priors", "at least one frequency is required"));
        }
        if self.m_values.is_empty() {
            return Err(Error::config("model.m", "no sample count given"));
        }
        if self.snr_db_values.is_empty() {
            return Err(Error::config("sweep.values", "no SNR value given"));
        }
        if self.m_values.len() > 1 && self.snr_db_values.len() > 1 {
            return Err(Error::config(
                "sweep",
                "only one of the sample count and the SNR may be swept",
            ));
        }
        if let Some(&m) = self.m_values.iter().find(|&&m| m <= d) {
            return Err(Error::config(
                "model.m",
                format!("m = {m} must exceed d = {d}"),
            ));
        }
        if self.snr_db_values.iter().any(|s| s.is_nan() || *s == f64::NEG_INFINITY) {
            return Err(Error::config("sweep.values", "SNR values must be numbers below +inf dB or +inf"));
        }
        if self.amplitudes.len() != d {
            return Err(Error::config(
                "signal.alpha",
                format!("expected {d} amplitudes, got {}", self.amplitudes.len()),
            ));
        }
        if self.amplitudes.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::config("signal.alpha", "amplitudes must be finite and >= 0"));
        }
        if let PhaseLaw::Fixed(p) = &self.phases {
            if p.len() != d || p.iter().any(|v| !v.is_finite()) {
                return Err(Error::config(
                    "signal.phase",
                    format!("expected {d} finite phases"),
                ));
            }
        }
        if self.trials < 1 {
            return Err(Error::config("mc.trials", "at least one trial is required"));
        }
        if self.estimators.is_empty() {
            return Err(Error::config("estimators", "no estimator selected"));
        }
        if self.estimators.contains(&Estimator::Esprit) {
            if let Some(&m) = self
                .m_values
                .iter()
                .find(|&&m| default_window(m) < d + 1 || m - default_window(m) + 1 < d)
            {
                return Err(Error::config(
                    "model.m",
                    format!("m = {m} is too small for ESPRIT with window m/2 and d = {d}"),
                ));
            }
        }
        self.solver.validate()
    }
}

/// Error of `est` relative to `truth`, mapped into `[-pi, pi)`.
pub fn wrap_error(truth: f64, est: f64) -> f64 {
    wrap_angle(est - truth)
}

/// Pairing of estimates to true frequencies: `truth[i]` pairs with
/// `estimates[perm[i]]`. Unkeyed estimates get the assignment with the
/// least total absolute wrapped error (lexicographically first on ties).
pub fn match_frequencies(truth: &[f64], estimates: &[f64], keyed: bool) -> Result<Vec<usize>> {
    let d = truth.len();
    if estimates.len() != d {
        return Err(Error::domain(format!(
            "{} estimates for {d} frequencies",
            estimates.len()
        )));
    }
    if keyed {
        return Ok((0..d).collect());
    }
    if d > MAX_MATCH_ORDER {
        return Err(Error::Unsupported(format!(
            "exhaustive matching of {d} frequencies (limit {MAX_MATCH_ORDER})"
        )));
    }
    let cost: Vec<Vec<f64>> = truth
        .iter()
        .map(|&t| estimates.iter().map(|&e| wrap_error(t, e).abs()).collect())
        .collect();

    struct Search<'a> {
        cost: &'a [Vec<f64>],
        used: Vec<bool>,
        current: Vec<usize>,
        best: Option<(f64, Vec<usize>)>,
    }
    impl Search<'_> {
        fn walk(&mut self, row: usize, acc: f64) {
            if row == self.cost.len() {
                if self.best.as_ref().is_none_or(|(b, _)| acc < *b) {
                    self.best = Some((acc, self.current.clone()));
                }
                return;
            }
            for col in 0..self.cost.len() {
                if !self.used[col] {
                    self.used[col] = true;
                    self.current.push(col);
                    self.walk(row + 1, acc + self.cost[row][col]);
                    self.current.pop();
                    self.used[col] = false;
                }
            }
        }
    }
    let mut search = Search {
        cost: &cost,
        used: vec![false; d],
        current: Vec::with_capacity(d),
        best: None,
    };
    search.walk(0, 0.0);
    Ok(search.best.map(|(_, p)| p).unwrap_or_default())
}

/// Counter-based seed for one trial.
pub fn child_seed(master: u64, sweep_index: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ sweep_index as u64) ^ trial as u64)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorOutcome {
    pub estimator: Estimator,
    /// Wrapped errors per true frequency, `None` on failure.
    pub errors: Option<Vec<f64>>,
    pub failure: Option<String>,
    /// MAP: all levels converged. ESPRIT: full-rank signal subspace.
    pub converged: bool,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub sweep_index: usize,
    pub trial: usize,
    pub seed: u64,
    pub omegas: Vec<f64>,
    pub s: Vec<Complex64>,
    pub outcomes: Vec<EstimatorOutcome>,
    /// CRB diagonal at the drawn frequencies.
    pub crb_diag: Option<Vec<f64>>,
    /// ACRB diagonal at the mean frequencies with this trial's amplitudes.
    pub acrb_diag: Option<Vec<f64>>,
}

fn run_trial(scenario: &Scenario, point: &SweepPoint, trial: usize) -> TrialRecord {
    let seed = child_seed(scenario.seed, point.index, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omegas: Vec<f64> = scenario
        .frequencies
        .iter()
        .map(|f| match f {
            FrequencySpec::Random { prior } => prior.sample(&mut rng),
            FrequencySpec::Fixed { omega, .. } => *omega,
        })
        .collect();
    let draw = SignalDraw {
        omegas: omegas.clone(),
        amplitudes: scenario.amplitudes.clone(),
        phases: scenario.phases.clone(),
        sigma2: point.sigma2,
        m: point.m,
    };
    let instance = synthesize(&draw, &mut rng).expect("scenario validated before trials");
    let priors = scenario.priors();
    let d = omegas.len();

    let outcomes = scenario
        .estimators
        .iter()
        .map(|&estimator| {
            let start = Instant::now();
            let result = match estimator {
                Estimator::Map => estimate(&instance.y, &priors, &scenario.solver)
                    .map(|r| (r.omegas, r.converged)),
                Estimator::Esprit => esprit(&instance.y, d, default_window(point.m))
                    .map(|r| (r.omegas, !r.low_rank)),
            };
            let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            let paired = result.and_then(|(est, converged)| {
                if est.iter().any(|w| !w.is_finite()) {
                    return Err(Error::domain("non-finite frequency estimate"));
                }
                let perm = match_frequencies(&omegas, &est, estimator.keyed())?;
                let errors = omegas
                    .iter()
                    .zip(&perm)
                    .map(|(&t, &k)| wrap_error(t, est[k]))
                    .collect();
                Ok((errors, converged))
            });
            match paired {
                Ok((errors, converged)) => EstimatorOutcome {
                    estimator,
                    errors: Some(errors),
                    failure: None,
                    converged,
                    elapsed_ms,
                },
                Err(e) => EstimatorOutcome {
                    estimator,
                    errors: None,
                    failure: Some(e.to_string()),
                    converged: false,
                    elapsed_ms,
                },
            }
        })
        .collect();

    let bound_inputs = |omegas: Vec<f64>| CrbInputs {
        omegas,
        s: instance.true_s.clone(),
        sigma2: point.sigma2,
        m: point.m,
        lambda: scenario.frequencies.iter().map(FrequencySpec::lambda).collect(),
    };
    let diag = |c: nalgebra::DMatrix<f64>| c.diagonal().iter().copied().collect::<Vec<f64>>();
    let crb_diag = crb(&bound_inputs(omegas.clone())).ok().map(diag);
    let means = scenario.frequencies.iter().map(FrequencySpec::mean).collect();
    let acrb_diag = acrb(&bound_inputs(means)).ok().map(diag);

    TrialRecord {
        sweep_index: point.index,
        trial,
        seed,
        omegas,
        s: instance.true_s,
        outcomes,
        crb_diag,
        acrb_diag,
    }
}

/// Compensated (Neumaier) sum in iteration order.
fn stable_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if f64::abs(sum) >= f64::abs(v) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        f64::NAN
    } else {
        stable_sum(values.iter().copied()) / values.len() as f64
    }
}

/// One line of the aggregate table: one estimator, one frequency, one
/// sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub sweep_value: f64,
    pub m: usize,
    pub snr_db: f64,
    pub estimator: Estimator,
    /// 1-based.
    pub freq_index: usize,
    pub rmse_rad: f64,
    /// `sqrt(mean CRB_ii)` over the trials' frequency draws.
    pub crb_sqrt_rad: f64,
    /// `sqrt(mean ACRB_ii)` at the mean frequencies.
    pub acrb_sqrt_rad: f64,
    /// `mean(sqrt(CRB_ii))`, for comparison with `crb_sqrt_rad`.
    pub crb_mean_sqrt_rad: f64,
    pub trials: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateReport {
    pub sweep_var: SweepVar,
    pub seed: u64,
    pub trials: usize,
    pub rows: Vec<AggregateRow>,
    /// Trials whose CRB or ACRB could not be evaluated, per sweep point.
    pub bound_failures: Vec<usize>,
}

impl AggregateReport {
    pub fn row(&self, sweep_index: usize, estimator: Estimator, freq_index: usize) -> Option<&AggregateRow> {
        let per_point = self.rows.len() / self.bound_failures.len().max(1);
        self.rows[sweep_index * per_point..(sweep_index + 1) * per_point]
            .iter()
            .find(|r| r.estimator == estimator && r.freq_index == freq_index)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingSummary {
    pub sweep_index: usize,
    pub estimator: Estimator,
    pub mean_ms: f64,
    pub max_ms: f64,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub report: AggregateReport,
    pub trials: Vec<TrialRecord>,
    pub timings: Vec<TimingSummary>,
}

fn aggregate_point(
    scenario: &Scenario,
    point: &SweepPoint,
    records: &[TrialRecord],
    rows: &mut Vec<AggregateRow>,
    timings: &mut Vec<TimingSummary>,
) -> usize {
    let d = scenario.d();
    let crbs: Vec<&Vec<f64>> = records.iter().filter_map(|r| r.crb_diag.as_ref()).collect();
    let acrbs: Vec<&Vec<f64>> = records.iter().filter_map(|r| r.acrb_diag.as_ref()).collect();
    let bound_failures = records
        .iter()
        .filter(|r| r.crb_diag.is_none() || r.acrb_diag.is_none())
        .count();
    let var = scenario.sweep_var();

    for (slot, &estimator) in scenario.estimators.iter().enumerate() {
        let outcomes: Vec<&EstimatorOutcome> = records.iter().map(|r| &r.outcomes[slot]).collect();
        let ok: Vec<&Vec<f64>> = outcomes.iter().filter_map(|o| o.errors.as_ref()).collect();
        let failures = outcomes.len() - ok.len();
        for i in 0..d {
            let sq: Vec<f64> = ok.iter().map(|e| e[i] * e[i]).collect();
            let crb_i: Vec<f64> = crbs.iter().map(|c| c[i]).collect();
            let crb_sqrt: Vec<f64> = crb_i.iter().map(|c| c.sqrt()).collect();
            let acrb_i: Vec<f64> = acrbs.iter().map(|c| c[i]).collect();
            rows.push(AggregateRow {
                sweep_value: point.value(var),
                m: point.m,
                snr_db: point.snr_db,
                estimator,
                freq_index: i + 1,
                rmse_rad: mean(&sq).sqrt(),
                crb_sqrt_rad: mean(&crb_i).sqrt(),
                acrb_sqrt_rad: mean(&acrb_i).sqrt(),
                crb_mean_sqrt_rad: mean(&crb_sqrt),
                trials: records.len(),
                failures,
            });
        }
        let times: Vec<f64> = outcomes.iter().map(|o| o.elapsed_ms).collect();
        timings.push(TimingSummary {
            sweep_index: point.index,
            estimator,
            mean_ms: mean(&times),
            max_ms: times.iter().copied().fold(0.0, f64::max),
        });
    }
    bound_failures
}

/// Runs every trial of every sweep point and aggregates RMSE and bounds.
///
/// `threads` sets the size of a dedicated worker pool; `None` uses the
/// global rayon pool. Results are identical for any thread count.
pub fn run_scenario(scenario: &Scenario, threads: Option<usize>) -> Result<ScenarioOutcome> {
    scenario.validate()?;
    let points = scenario.sweep_points();
    let run = || -> Vec<TrialRecord> {
        points
            .iter()
            .flat_map(|point| {
                (0..scenario.trials)
                    .into_par_iter()
                    .map(|t| run_trial(scenario, point, t))
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    let trials = match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::domain(format!("cannot build thread pool: {e}")))?;
            pool.install(run)
        }
        None => run(),
    };

    let mut rows = Vec::new();
    let mut timings = Vec::new();
    let mut bound_failures = Vec::with_capacity(points.len());
    for (point, records) in points.iter().zip(trials.chunks(scenario.trials)) {
        bound_failures.push(aggregate_point(scenario, point, records, &mut rows, &mut timings));
    }

    Ok(ScenarioOutcome {
        report: AggregateReport {
            sweep_var: scenario.sweep_var(),
            seed: scenario.seed,
            trials: scenario.trials,
            rows,
            bound_failures,
        },
        trials,
        timings,
    })
}

/// Bounds at the mean frequencies for every sweep point, without Monte
/// Carlo. Amplitudes use the scenario's fixed phases, or zero phase when
/// phases are random.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsRow {
    pub sweep_value: f64,
    pub m: usize,
    pub snr_db: f64,
    pub sigma2: f64,
    pub freq_index: usize,
    pub lambda: f64,
    pub crb_sqrt_rad: f64,
    pub acrb_sqrt_rad: f64,
    pub warning: Option<String>,
}

pub fn bounds_table(scenario: &Scenario) -> Result<Vec<BoundsRow>> {
    scenario.validate()?;
    let var = scenario.sweep_var();
    let phases = match &scenario.phases {
        PhaseLaw::Fixed(p) => p.clone(),
        PhaseLaw::Uniform => vec![0.0; scenario.d()],
    };
    let s: Vec<Complex64> = scenario
        .amplitudes
        .iter()
        .zip(&phases)
        .map(|(&a, &p)| Complex64::from_polar(a, p))
        .collect();
    let lambda: Vec<f64> = scenario.frequencies.iter().map(FrequencySpec::lambda).collect();
    let means: Vec<f64> = scenario.frequencies.iter().map(FrequencySpec::mean).collect();

    let mut rows = Vec::new();
    for point in scenario.sweep_points() {
        let inputs = CrbInputs {
            omegas: means.clone(),
            s: s.clone(),
            sigma2: point.sigma2,
            m: point.m,
            lambda: lambda.clone(),
        };
        let c = crb(&inputs);
        let h = acrb(&inputs);
        let warning = match (&c, &h) {
            (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
            _ => None,
        };
        for i in 0..scenario.d() {
            rows.push(BoundsRow {
                sweep_value: point.value(var),
                m: point.m,
                snr_db: point.snr_db,
                sigma2: point.sigma2,
                freq_index: i + 1,
                lambda: lambda[i],
                crb_sqrt_rad: c.as_ref().map_or(f64::NAN, |c| c[(i, i)].sqrt()),
                acrb_sqrt_rad: h.as_ref().map_or(f64::NAN, |h| h[(i, i)].sqrt()),
                warning: warning.clone(),
            });
        }
    }
    Ok(rows)
}
