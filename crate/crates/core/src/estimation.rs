//! Parameter estimation from traces and trial records.
//!
//! * [`fit_effusivity`]: least-squares fit of the object effusivity to a
//!   measured trace, bounded quasi-Newton with finite-difference gradients.
//! * [`fit_warming_correction`]: straight line from refrigerator setting to
//!   the temperature the cold block actually has when touched.
//! * [`optimize_deviation_threshold`]: grid search for the largest finger
//!   temperature deviation that still counts as an ambiguous trial.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{Label, MaterialCondition};
use crate::heatcore::{contact_temperature_raw, BodyState, SensorSpec};
use crate::sensorsim::{resolve_contact, SimError, TemperatureTrace};

pub const DEFAULT_EFFUSIVITY_BOUNDS: (f64, f64) = (50.0, 50_000.0);
const MIN_POST_CONTACT_SAMPLES: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimationError {
    #[error("need at least {needed} post-contact samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid bounds [{0}, {1}]")]
    InvalidBounds(f64, f64),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("no trials")]
    EmptyTrials,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Convergence when a step moves less than this fraction of the bound width.
    pub step_tolerance: f64,
    /// Finite-difference step in log-effusivity.
    pub fd_step: f64,
    /// Noise level handed to contact detection, °C.
    pub noise_floor: f64,
    /// Samples either side of the detected peak tried as the contact.
    pub contact_search: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            step_tolerance: 1e-6,
            fd_step: 1e-5,
            noise_floor: 0.0,
            contact_search: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub estimate: f64,
    /// °C².
    pub residual_sse: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Sample taken as contact.
    pub contact_index: usize,
    pub bounds: (f64, f64),
    pub initial_guess: f64,
    /// Objective after each accepted iteration, starting with the initial guess.
    pub objective_history: Vec<f64>,
    pub options: FitOptions,
}

/// Object and sensor effusivities fitted together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFitResult {
    pub object_effusivity: f64,
    pub sensor_effusivity: f64,
    pub residual_sse: f64,
    pub iterations: usize,
    pub converged: bool,
    pub objective_history: Vec<f64>,
}

struct Minimum {
    x: Vec<f64>,
    fx: f64,
    iterations: usize,
    converged: bool,
    history: Vec<f64>,
}

/// Projected BFGS over a box, working in log coordinates. Gradients are
/// central differences; steps are accepted only under an Armijo decrease, so
/// the objective never increases between accepted iterates.
fn minimize_box(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], lo: &[f64], hi: &[f64], opts: &FitOptions) -> Minimum {
    let n = x0.len();
    let ulo: Vec<f64> = lo.iter().map(|v| v.ln()).collect();
    let uhi: Vec<f64> = hi.iter().map(|v| v.ln()).collect();
    let clamp = |u: &mut [f64]| {
        for i in 0..n {
            u[i] = u[i].clamp(ulo[i], uhi[i]);
        }
    };
    let fu = |u: &[f64]| f(&u.iter().map(|v| v.exp()).collect::<Vec<_>>());
    let h = opts.fd_step;

    // Gradient plus diagonal curvature from the same stencil.
    let grad = |u: &[f64], fx: f64| -> (Vec<f64>, Vec<f64>) {
        let mut g = vec![0.0; n];
        let mut c = vec![0.0; n];
        for i in 0..n {
            let mut up = u.to_vec();
            let mut dn = u.to_vec();
            up[i] = (u[i] + h).min(uhi[i]);
            dn[i] = (u[i] - h).max(ulo[i]);
            let (fp, fm) = (fu(&up), fu(&dn));
            let (hp, hm) = (up[i] - u[i], u[i] - dn[i]);
            g[i] = (fp - fm) / (hp + hm);
            if hp > 0.0 && hm > 0.0 {
                c[i] = ((fp - fx) / hp - (fx - fm) / hm) / (0.5 * (hp + hm));
            }
        }
        (g, c)
    };

    let mut u: Vec<f64> = x0.iter().map(|v| v.ln()).collect();
    clamp(&mut u);
    let mut fx = fu(&u);
    let mut history = vec![fx];
    let (mut g, curv) = grad(&u, fx);
    let diag_inverse = |c: &[f64]| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { 1.0 / c[i].abs().max(1e-12) } else { 0.0 })
                    .collect()
            })
            .collect()
    };
    let mut hinv = diag_inverse(&curv);
    let mut converged = false;
    let mut iterations = 0;
    let width: Vec<f64> = (0..n).map(|i| hi[i] - lo[i]).collect();

    while iterations < opts.max_iterations {
        iterations += 1;
        let active: Vec<bool> = (0..n)
            .map(|i| (u[i] <= ulo[i] && g[i] > 0.0) || (u[i] >= uhi[i] && g[i] < 0.0))
            .collect();
        if (0..n).all(|i| active[i] || g[i] == 0.0) {
            converged = true;
            break;
        }
        let mut d: Vec<f64> = (0..n)
            .map(|i| {
                if active[i] {
                    0.0
                } else {
                    -(0..n).filter(|&j| !active[j]).map(|j| hinv[i][j] * g[j]).sum::<f64>()
                }
            })
            .collect();
        let slope: f64 = (0..n).map(|i| d[i] * g[i]).sum();
        if !(slope < 0.0) {
            let (_, c) = grad(&u, fx);
            hinv = diag_inverse(&c);
            d = (0..n)
                .map(|i| if active[i] { 0.0 } else { -hinv[i][i] * g[i] })
                .collect();
        }

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let mut trial: Vec<f64> = (0..n).map(|i| u[i] + alpha * d[i]).collect();
            clamp(&mut trial);
            let decrease: f64 = (0..n).map(|i| g[i] * (trial[i] - u[i])).sum();
            let ft = fu(&trial);
            if ft <= fx + 1e-4 * decrease && ft <= fx {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= 0.5;
        }
        let Some((next, fnext)) = accepted else {
            // No admissible decrease left at this resolution.
            converged = true;
            break;
        };

        let moved = (0..n).all(|i| (next[i].exp() - u[i].exp()).abs() < opts.step_tolerance * width[i]);
        let (gnext, _) = grad(&next, fnext);
        let s: Vec<f64> = (0..n).map(|i| next[i] - u[i]).collect();
        let y: Vec<f64> = (0..n).map(|i| gnext[i] - g[i]).collect();
        let sy: f64 = (0..n).map(|i| s[i] * y[i]).sum();
        if sy > 1e-300 {
            // H' = (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| hinv[i][j] * y[j]).sum()).collect();
            let yhy: f64 = (0..n).map(|i| y[i] * hy[i]).sum();
            for i in 0..n {
                for j in 0..n {
                    hinv[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
        u = next;
        fx = fnext;
        g = gnext;
        history.push(fx);
        if moved {
            converged = true;
            break;
        }
    }

    Minimum {
        x: u.iter().map(|v| v.exp()).collect(),
        fx,
        iterations,
        converged,
        history,
    }
}

fn check_bounds(bounds: (f64, f64)) -> Result<(), EstimationError> {
    let (lo, hi) = bounds;
    if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() {
        return Err(EstimationError::InvalidBounds(lo, hi));
    }
    Ok(())
}

/// Post-contact samples from index `k`, as (seconds since contact, temperature).
fn samples_from(trace: &TemperatureTrace, k: usize) -> Result<Vec<(f64, f64)>, EstimationError> {
    let t0 = trace.times[k];
    let pts: Vec<(f64, f64)> = trace.times[k..]
        .iter()
        .zip(&trace.temperatures[k..])
        .map(|(&t, &y)| (t - t0, y))
        .collect();
    if pts.len() < MIN_POST_CONTACT_SAMPLES {
        return Err(EstimationError::TooFewSamples {
            needed: MIN_POST_CONTACT_SAMPLES,
            got: pts.len(),
        });
    }
    Ok(pts)
}

fn detected_contact(trace: &TemperatureTrace, noise_floor: f64) -> Result<usize, EstimationError> {
    trace.validate()?;
    Ok(resolve_contact(trace, noise_floor)?)
}

/// Fits the object effusivity to a trace, holding the sensor and the object
/// temperature fixed. Samples before contact are dropped.
pub fn fit_effusivity(
    trace: &TemperatureTrace,
    sensor: &SensorSpec,
    object_temp: f64,
    bounds: (f64, f64),
) -> Result<FitResult, EstimationError> {
    fit_effusivity_with(trace, sensor, object_temp, bounds, &FitOptions::default())
}

/// [`fit_effusivity`] with explicit options.
///
/// Contact starts at the detected peak. With `contact_search > 0` every
/// sample within that many of the peak is also tried as the contact: each
/// candidate gets its own effusivity fit, the samples before it are scored
/// against a straight approach line ending at the sensor temperature, and the
/// candidate with the lowest total over a shared window wins. A noisy heated
/// trace is nearly flat for a few samples after contact, which otherwise
/// biases the peak late.
pub fn fit_effusivity_with(
    trace: &TemperatureTrace,
    sensor: &SensorSpec,
    object_temp: f64,
    bounds: (f64, f64),
    opts: &FitOptions,
) -> Result<FitResult, EstimationError> {
    if trace.len() < MIN_POST_CONTACT_SAMPLES {
        return Err(EstimationError::TooFewSamples {
            needed: MIN_POST_CONTACT_SAMPLES,
            got: trace.len(),
        });
    }
    check_bounds(bounds)?;
    sensor.validate().map_err(SimError::from)?;
    let detected = detected_contact(trace, opts.noise_floor)?;
    let mut best = fit_at(trace, detected, sensor, object_temp, bounds, opts)?;
    if opts.contact_search == 0 {
        return Ok(best);
    }

    let radius = opts.contact_search;
    let last = trace.len() - MIN_POST_CONTACT_SAMPLES;
    let window_start = detected.saturating_sub(2 * radius);
    let ts = sensor.temperature();
    let mut best_total = best.residual_sse + approach_sse(trace, window_start, detected, ts);
    for k in detected.saturating_sub(radius)..=(detected + radius).min(last) {
        if k == detected {
            continue;
        }
        let fit = fit_at(trace, k, sensor, object_temp, bounds, opts)?;
        let total = fit.residual_sse + approach_sse(trace, window_start, k, ts);
        if total < best_total {
            best_total = total;
            best = fit;
        }
    }
    Ok(best)
}

/// Squared residuals of samples `[start, k)` about the least-squares line
/// through `(t_k, anchor)`.
fn approach_sse(trace: &TemperatureTrace, start: usize, k: usize, anchor: f64) -> f64 {
    let tk = trace.times[k];
    let pts = (start..k).map(|i| (trace.times[i] - tk, trace.temperatures[i] - anchor));
    let (sxy, sxx) = pts.clone().fold((0.0, 0.0), |(a, b), (x, y)| (a + x * y, b + x * x));
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    pts.map(|(x, y)| (y - slope * x).powi(2)).sum()
}

fn fit_at(
    trace: &TemperatureTrace,
    contact: usize,
    sensor: &SensorSpec,
    object_temp: f64,
    bounds: (f64, f64),
    opts: &FitOptions,
) -> Result<FitResult, EstimationError> {
    let pts = samples_from(trace, contact)?;
    let weights = pts
        .iter()
        .map(|&(t, _)| sensor.response_weight(t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(SimError::from)?;
    let ts = sensor.temperature();
    let es = sensor.effusivity();
    let sse = |x: &[f64]| -> f64 {
        let tc = contact_temperature_raw(ts, es, object_temp, x[0]);
        pts.iter()
            .zip(&weights)
            .map(|(&(_, y), &w)| (y - (ts + (tc - ts) * w)).powi(2))
            .sum()
    };

    let (lo, hi) = bounds;
    let guess = (lo * hi).sqrt();
    let min = minimize_box(&sse, &[guess], &[lo], &[hi], opts);
    let mut estimate = min.x[0];
    let mut best = min.fx;
    for candidate in [lo, hi, guess] {
        let v = sse(&[candidate]);
        if v < best {
            best = v;
            estimate = candidate;
        }
    }
    Ok(FitResult {
        estimate: estimate.clamp(lo, hi),
        residual_sse: best,
        iterations: min.iterations,
        converged: min.converged,
        contact_index: contact,
        bounds,
        initial_guess: guess,
        objective_history: min.history,
        options: *opts,
    })
}

/// Fits object and sensor effusivity jointly.
pub fn fit_effusivity_pair(
    trace: &TemperatureTrace,
    sensor: &SensorSpec,
    object_temp: f64,
    object_bounds: (f64, f64),
    sensor_bounds: (f64, f64),
    opts: &FitOptions,
) -> Result<PairFitResult, EstimationError> {
    check_bounds(object_bounds)?;
    check_bounds(sensor_bounds)?;
    sensor.validate().map_err(SimError::from)?;
    let pts = samples_from(trace, detected_contact(trace, opts.noise_floor)?)?;
    let weights = pts
        .iter()
        .map(|&(t, _)| sensor.response_weight(t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(SimError::from)?;
    let ts = sensor.temperature();
    let sse = |x: &[f64]| -> f64 {
        let tc = contact_temperature_raw(ts, x[1], object_temp, x[0]);
        pts.iter()
            .zip(&weights)
            .map(|(&(_, y), &w)| (y - (ts + (tc - ts) * w)).powi(2))
            .sum()
    };
    let guess = [
        (object_bounds.0 * object_bounds.1).sqrt(),
        (sensor_bounds.0 * sensor_bounds.1).sqrt(),
    ];
    let min = minimize_box(
        &sse,
        &guess,
        &[object_bounds.0, sensor_bounds.0],
        &[object_bounds.1, sensor_bounds.1],
        opts,
    );
    Ok(PairFitResult {
        object_effusivity: min.x[0],
        sensor_effusivity: min.x[1],
        residual_sse: min.fx,
        iterations: min.iterations,
        converged: min.converged,
        objective_history: min.history,
    })
}

/// Refrigerator setting → surface temperature when touched.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarmingCorrection {
    pub slope: f64,
    pub intercept: f64,
}

impl WarmingCorrection {
    pub const IDENTITY: Self = Self {
        slope: 1.0,
        intercept: 0.0,
    };

    pub fn touched(&self, fridge_setting: f64) -> f64 {
        self.slope * fridge_setting + self.intercept
    }

    /// Refrigerator setting that yields `touched` at the time of contact.
    pub fn fridge_setting(&self, touched: f64) -> Option<f64> {
        (self.slope != 0.0).then(|| (touched - self.intercept) / self.slope)
    }
}

/// Ordinary least squares line through `(fridge setting, touched temperature)`.
pub fn fit_warming_correction(pairs: &[(f64, f64)]) -> Result<WarmingCorrection, EstimationError> {
    if pairs.len() < 2 {
        return Err(EstimationError::DegenerateInput(format!(
            "need at least 2 points, got {}",
            pairs.len()
        )));
    }
    if pairs.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(EstimationError::DegenerateInput("non-finite value".into()));
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(EstimationError::DegenerateInput(
            "all refrigerator settings are equal".into(),
        ));
    }
    let sxy: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok(WarmingCorrection {
        slope,
        intercept: my - slope * mx,
    })
}

/// One trial: the finger temperature around the trial and what the
/// participant answered for each sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// Mean of the readings taken just before and just after the trial, °C.
    pub finger_temp_avg: f64,
    /// Finger temperature the ambiguous condition was planned for, °C.
    pub intended: f64,
    /// `intended - finger_temp_avg`, °C.
    pub epsilon: f64,
    pub answers: BTreeMap<MaterialCondition, Label>,
}

impl TrialRecord {
    pub fn new(finger_temp_avg: f64, intended: f64, answers: BTreeMap<MaterialCondition, Label>) -> Self {
        Self {
            finger_temp_avg,
            intended,
            epsilon: intended - finger_temp_avg,
            answers,
        }
    }

    pub fn validate(&self) -> Result<(), EstimationError> {
        if (self.epsilon - (self.intended - self.finger_temp_avg)).abs() > 1e-9 {
            return Err(EstimationError::InvalidArgument(format!(
                "epsilon {} does not match {} - {}",
                self.epsilon, self.intended, self.finger_temp_avg
            )));
        }
        Ok(())
    }

    fn answered(&self, case: MaterialCondition, answer: Label) -> bool {
        self.answers.get(&case) == Some(&answer)
    }

    /// Called both the cold wood and the metal "metal".
    pub fn metal_metal(&self) -> bool {
        self.answered(MaterialCondition::ColdWood, Label::Metal)
            && self.answered(MaterialCondition::AmbientMetal, Label::Metal)
    }

    /// Called at least one of cold wood and metal "wood".
    pub fn any_wood(&self) -> bool {
        self.answered(MaterialCondition::ColdWood, Label::Wood)
            || self.answered(MaterialCondition::AmbientMetal, Label::Wood)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSearchResult {
    pub gamma: f64,
    pub p_mm: f64,
    pub p_w: f64,
    /// `(gamma, p_mm + p_w)` for every grid point.
    pub grid: Vec<(f64, f64)>,
}

impl ThresholdSearchResult {
    pub fn objective(&self) -> f64 {
        self.p_mm + self.p_w
    }
}

fn proportions(trials: &[TrialRecord], center: f64, gamma: f64) -> (f64, f64) {
    let (mut inside, mut mm, mut outside, mut w) = (0usize, 0usize, 0usize, 0usize);
    for trial in trials {
        let within = (trial.finger_temp_avg - center).abs() <= gamma + 1e-12;
        if within {
            inside += 1;
            mm += trial.metal_metal() as usize;
        } else {
            outside += 1;
            w += trial.any_wood() as usize;
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    (ratio(mm, inside), ratio(w, outside))
}

/// Evaluates `γ = 0, step, 2·step, …, gamma_max` and keeps the γ that
/// maximizes `p_mm + p_w`, preferring the smallest on ties.
pub fn optimize_deviation_threshold(
    trials: &[TrialRecord],
    center: f64,
    grid_step: f64,
    gamma_max: f64,
) -> Result<ThresholdSearchResult, EstimationError> {
    if trials.is_empty() {
        return Err(EstimationError::EmptyTrials);
    }
    if !(grid_step > 0.0) || !(gamma_max >= 0.0) || !gamma_max.is_finite() {
        return Err(EstimationError::InvalidArgument(format!(
            "grid step {grid_step} and maximum {gamma_max}"
        )));
    }
    for t in trials {
        t.validate()?;
    }
    let steps = (gamma_max / grid_step + 1e-9).floor() as usize;
    let mut grid = Vec::with_capacity(steps + 1);
    let mut best: Option<(f64, f64, f64)> = None;
    for k in 0..=steps {
        let gamma = k as f64 * grid_step;
        let (p_mm, p_w) = proportions(trials, center, gamma);
        let objective = p_mm + p_w;
        grid.push((gamma, objective));
        if best.is_none_or(|(_, a, b)| objective > a + b) {
            best = Some((gamma, p_mm, p_w));
        }
    }
    let (gamma, p_mm, p_w) = best.expect("grid has at least one point");
    Ok(ThresholdSearchResult { gamma, p_mm, p_w, grid })
}

/// Fit report as emitted by the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub estimate: f64,
    pub residual_sse: f64,
    pub iterations: usize,
    pub converged: bool,
    pub bounds: (f64, f64),
}

impl From<&FitResult> for FitReport {
    fn from(r: &FitResult) -> Self {
        Self {
            estimate: r.estimate,
            residual_sse: r.residual_sse,
            iterations: r.iterations,
            converged: r.converged,
            bounds: r.bounds,
        }
    }
}

/// Object state used when generating a fitting trace; re-exported for
/// callers that build their own scenarios.
pub fn object_at(material: &crate::heatcore::ThermalMaterial, temp: f64) -> Result<BodyState, EstimationError> {
    BodyState::new(material.clone(), temp).map_err(|e| EstimationError::Sim(e.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heatcore::ThermalMaterial;
    use crate::sensorsim::{synthesize_trace, NonIdealityConfig, SensorId, TraceConfig};

    fn sensor() -> SensorSpec {
        let body = BodyState::new(ThermalMaterial::new("robot", 892.0).unwrap(), 35.0).unwrap();
        SensorSpec::with_defaults(body, true).unwrap()
    }

    fn trace_for(e: f64) -> TemperatureTrace {
        let object = BodyState::new(ThermalMaterial::new("o", e).unwrap(), 22.5).unwrap();
        let cfg = TraceConfig::new(sensor(), object);
        synthesize_trace(&cfg, &NonIdealityConfig::IDEAL).unwrap()
    }

    #[test]
    fn recovers_wood_and_metal() {
        for e in [331.0, 23664.0] {
            let r = fit_effusivity(&trace_for(e), &sensor(), 22.5, DEFAULT_EFFUSIVITY_BOUNDS).unwrap();
            assert!((r.estimate - e).abs() / e < 1e-3, "{e}: {r:?}");
            assert!(r.converged);
        }
    }

    #[test]
    fn objective_never_increases() {
        let r = fit_effusivity(&trace_for(331.0), &sensor(), 22.5, DEFAULT_EFFUSIVITY_BOUNDS).unwrap();
        assert!(r.objective_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn too_few_samples() {
        let tr = TemperatureTrace::new(vec![0.0, 0.1, 0.2], vec![35.0, 34.0, 33.0], SensorId::Active).unwrap();
        assert!(matches!(
            fit_effusivity(&tr, &sensor(), 22.5, DEFAULT_EFFUSIVITY_BOUNDS),
            Err(EstimationError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn invalid_bounds() {
        let tr = trace_for(331.0);
        assert!(matches!(
            fit_effusivity(&tr, &sensor(), 22.5, (500.0, 100.0)),
            Err(EstimationError::InvalidBounds(..))
        ));
        assert!(fit_effusivity(&tr, &sensor(), 22.5, (0.0, 100.0)).is_err());
    }

    #[test]
    fn optimum_outside_bounds_lands_on_bound() {
        let r = fit_effusivity(&trace_for(23664.0), &sensor(), 22.5, (100.0, 1000.0)).unwrap();
        assert_eq!(r.estimate, 1000.0);
    }

    #[test]
    fn pair_fit_runs() {
        let r = fit_effusivity_pair(
            &trace_for(331.0),
            &sensor(),
            22.5,
            DEFAULT_EFFUSIVITY_BOUNDS,
            (200.0, 5000.0),
            &FitOptions::default(),
        )
        .unwrap();
        // Only the ratio e_o / e_s is identifiable from a single trace.
        let ratio = r.object_effusivity / r.sensor_effusivity;
        assert!((ratio - 331.0 / 892.0).abs() / (331.0 / 892.0) < 1e-3, "{r:?}");
        assert!(r.objective_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn warming_exact_line() {
        let pairs: Vec<(f64, f64)> = (-7..=4)
            .map(|k| {
                let x = 5.0 * k as f64;
                (x, 0.8 * x + 5.0)
            })
            .collect();
        assert_eq!(pairs.first().unwrap().0, -35.0);
        assert_eq!(pairs.last().unwrap().0, 20.0);
        let fit = fit_warming_correction(&pairs).unwrap();
        assert!((fit.slope - 0.8).abs() < 1e-12);
        assert!((fit.intercept - 5.0).abs() < 1e-12);
        assert!((fit.fridge_setting(fit.touched(3.0)).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn warming_degenerate() {
        assert!(matches!(
            fit_warming_correction(&[(1.0, 2.0)]),
            Err(EstimationError::DegenerateInput(_))
        ));
        assert!(matches!(
            fit_warming_correction(&[(1.0, 2.0), (1.0, 3.0)]),
            Err(EstimationError::DegenerateInput(_))
        ));
    }

    #[test]
    fn warming_perturbed() {
        // y = 0.8x + 5 with +0.1, -0.1 alternating at x = -35, -30, ..., 20.
        // Hand computation: x̄ = -7.5, Σ(x - x̄)² = 3575, and the perturbations
        // contribute Σ(x - x̄)·δ = 0.1·(-27.5 + 22.5 - 17.5 + 12.5 - 7.5 + 2.5
        // + 2.5 - 7.5 + 12.5 - 17.5 + 22.5 - 27.5)·(-1)^k, i.e. a slope shift of
        // -3.0 / 3575 ≈ -8.4e-4.
        let pairs: Vec<(f64, f64)> = (-7..=4)
            .enumerate()
            .map(|(i, k)| {
                let x = 5.0 * k as f64;
                let delta = if i % 2 == 0 { 0.1 } else { -0.1 };
                (x, 0.8 * x + 5.0 + delta)
            })
            .collect();
        let fit = fit_warming_correction(&pairs).unwrap();
        assert!((fit.slope - 0.8).abs() < 0.01);
        assert!((fit.slope - (0.8 - 3.0 / 3575.0)).abs() < 1e-12, "{}", fit.slope);
        // residuals are orthogonal to the inputs
        let dot: f64 = pairs.iter().map(|&(x, y)| x * (y - fit.touched(x))).sum();
        assert!(dot.abs() < 1e-9);
    }

    fn trial(eps: f64, cold: Label, metal: Label) -> TrialRecord {
        let answers = BTreeMap::from([
            (MaterialCondition::ColdWood, cold),
            (MaterialCondition::AmbientMetal, metal),
        ]);
        TrialRecord::new(27.0 - eps, 27.0, answers)
    }

    #[test]
    fn threshold_recovers_constructed_gamma() {
        let mut trials = Vec::new();
        for eps in [-3.5, -2.0, -0.5, 0.0, 1.0, 2.5, 3.5] {
            trials.push(trial(eps, Label::Metal, Label::Metal));
        }
        for eps in [-6.0, -4.0, 4.0, 5.5, 8.0] {
            trials.push(trial(eps, Label::Wood, Label::Metal));
        }
        let r = optimize_deviation_threshold(&trials, 27.0, 0.5, 10.0).unwrap();
        assert_eq!(r.gamma, 3.5);
        assert_eq!(r.p_mm, 1.0);
        assert_eq!(r.p_w, 1.0);
        assert_eq!(r.grid.len(), 21);
        let max = r.grid.iter().map(|g| g.1).fold(f64::MIN, f64::max);
        assert_eq!(r.objective(), max);
    }

    #[test]
    fn threshold_all_metal_takes_smallest_gamma() {
        // Objective is 1 as soon as one trial is in range (p_mm = 1, p_w = 0),
        // so the earliest such grid point wins.
        let trials: Vec<_> = [1.2, -2.7, 4.1]
            .iter()
            .map(|&e| trial(e, Label::Metal, Label::Metal))
            .collect();
        let r = optimize_deviation_threshold(&trials, 27.0, 0.5, 10.0).unwrap();
        assert_eq!(r.gamma, 1.5);
        assert_eq!(r.objective(), 1.0);
    }

    #[test]
    fn threshold_empty() {
        assert!(matches!(
            optimize_deviation_threshold(&[], 27.0, 0.5, 10.0),
            Err(EstimationError::EmptyTrials)
        ));
    }

    #[test]
    fn trial_epsilon_consistency() {
        let t = trial(1.25, Label::Metal, Label::Wood);
        t.validate().unwrap();
        assert!((t.epsilon - 1.25).abs() < 1e-12);
        let mut bad = t.clone();
        bad.epsilon += 0.1;
        assert!(bad.validate().is_err());
    }
}
