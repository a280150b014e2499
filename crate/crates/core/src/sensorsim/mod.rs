//! Synthetic sensor traces.
//!
//! A trace starts `pre_contact_duration` seconds before contact. A heated
//! sensor ramps up to its set point during that window and touches the object
//! exactly when it gets there, so the trace peaks at contact. After contact
//! the sensing element follows the ideal semi-infinite response.
//!
//! Three optional effects make traces less ideal. They are a synthetic
//! stand-in for unmodeled physics, not a derivation:
//!
//! * approach convection: while the sensor approaches, its contact face
//!   drifts toward the temperature of the air gap (the midpoint of ambient
//!   and the object surface) at rate `h`. The face deficit this builds up is
//!   released into the sensing element once contact is made;
//! * contact lag: the post-contact response passes through a first-order lag
//!   with time constant `tau`;
//! * white Gaussian noise with standard deviation `noise_sigma`.
//!
//! A cold object widens the air-gap deficit, so its trace drops faster right
//! after contact than a warm object with the same contact temperature.

mod chain;
mod csv;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand_distr::{Distribution, Normal};

use crate::heatcore::{contact_temperature, BodyState, HeatError, SensorSpec};
use crate::seed;

pub use self::chain::{apply_signal_chain, quantize, Butterworth2, SignalChainConfig};
pub use self::csv::{format_sig9, parse_trace_csv, read_trace_csv, trace_to_csv, write_trace_csv};

/// Default sampling rate, Hz.
pub const DEFAULT_SAMPLE_RATE: f64 = 50.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no contact found: total variation {variation} is below the noise floor {floor}")]
    NoContact { variation: f64, floor: f64 },
    #[error("temperature {0} °C is outside the ADC range")]
    OutOfRange(f64),
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("trace file: {0}")]
    Format(String),
    #[error(transparent)]
    Heat(#[from] HeatError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceConfig {
    pub sensor: SensorSpec,
    pub object: BodyState,
    /// Post-contact duration, s.
    pub t_max: f64,
    /// Hz.
    pub sample_rate: f64,
    /// s.
    pub pre_contact_duration: f64,
    /// Heater ramp rate before contact, °C/s. Ignored for unheated sensors.
    #[serde(default = "default_heating_rate")]
    pub heating_rate: f64,
    /// Room temperature, °C.
    #[serde(default = "default_ambient")]
    pub ambient_temperature: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_heating_rate() -> f64 {
    0.5
}

fn default_ambient() -> f64 {
    22.5
}

impl TraceConfig {
    pub fn new(sensor: SensorSpec, object: BodyState) -> Self {
        Self {
            sensor,
            object,
            t_max: 5.0,
            sample_rate: DEFAULT_SAMPLE_RATE,
            pre_contact_duration: 1.0,
            heating_rate: default_heating_rate(),
            ambient_temperature: default_ambient(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.sensor.validate()?;
        self.object.validate()?;
        let checks = [
            ("t_max", self.t_max > 0.0 && self.t_max.is_finite()),
            ("sample_rate", self.sample_rate > 0.0 && self.sample_rate.is_finite()),
            (
                "pre_contact_duration",
                self.pre_contact_duration >= 0.0 && self.pre_contact_duration.is_finite(),
            ),
            (
                "heating_rate",
                self.heating_rate >= 0.0 && self.heating_rate.is_finite(),
            ),
            ("ambient_temperature", self.ambient_temperature.is_finite()),
        ];
        for (name, ok) in checks {
            if !ok {
                return Err(SimError::InvalidConfig(format!("{name} out of range")));
            }
        }
        Ok(())
    }

    fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }

    /// Index of the first post-contact sample.
    pub fn contact_index(&self) -> usize {
        (self.pre_contact_duration * self.sample_rate).round() as usize
    }

    fn post_contact_samples(&self) -> usize {
        (self.t_max * self.sample_rate).round() as usize + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonIdealityConfig {
    /// °C.
    pub noise_sigma: f64,
    /// Approach convection coefficient, 1/s.
    pub approach_conv_coeff: f64,
    /// Contact lag time constant, s.
    pub contact_lag: f64,
}

impl NonIdealityConfig {
    pub const IDEAL: Self = Self {
        noise_sigma: 0.0,
        approach_conv_coeff: 0.0,
        contact_lag: 0.0,
    };

    pub fn noiseless(self) -> Self {
        Self {
            noise_sigma: 0.0,
            ..self
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (name, v) in [
            ("noise_sigma", self.noise_sigma),
            ("approach_conv_coeff", self.approach_conv_coeff),
            ("contact_lag", self.contact_lag),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(SimError::InvalidConfig(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

impl Default for NonIdealityConfig {
    fn default() -> Self {
        Self {
            noise_sigma: 0.02,
            approach_conv_coeff: 0.05,
            contact_lag: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SensorId {
    Active,
    Passive,
}

impl SensorId {
    pub fn as_str(self) -> &'static str {
        match self {
            SensorId::Active => "active",
            SensorId::Passive => "passive",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "active" => Some(SensorId::Active),
            "passive" => Some(SensorId::Passive),
            _ => None,
        }
    }
}

/// A uniformly sampled temperature series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperatureTrace {
    pub times: Vec<f64>,
    pub temperatures: Vec<f64>,
    pub sensor_id: SensorId,
    /// Sample index at which contact happened (simulated) or was detected.
    pub contact_index: Option<usize>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub material: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_id: Option<String>,
}

impl TemperatureTrace {
    pub fn new(times: Vec<f64>, temperatures: Vec<f64>, sensor_id: SensorId) -> Result<Self, SimError> {
        let trace = Self {
            times,
            temperatures,
            sensor_id,
            contact_index: None,
            seed: 0,
            material: None,
            block_id: None,
        };
        trace.validate()?;
        Ok(trace)
    }

    pub fn len(&self) -> usize {
        self.temperatures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.temperatures.is_empty()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.temperatures.is_empty() {
            return Err(SimError::InvalidTrace("empty trace".into()));
        }
        if self.times.len() != self.temperatures.len() {
            return Err(SimError::InvalidTrace(format!(
                "{} times but {} temperatures",
                self.times.len(),
                self.temperatures.len()
            )));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SimError::InvalidTrace("times must be strictly increasing".into()));
        }
        if self.temperatures.iter().any(|t| !t.is_finite()) {
            return Err(SimError::InvalidTrace("non-finite temperature".into()));
        }
        if let Some(k) = self.contact_index {
            if k >= self.len() {
                return Err(SimError::InvalidTrace(format!("contact index {k} past the end")));
            }
        }
        Ok(())
    }

    /// Mean sampling interval, s.
    pub fn sample_interval(&self) -> f64 {
        if self.len() < 2 {
            return 0.0;
        }
        (self.times[self.len() - 1] - self.times[0]) / (self.len() - 1) as f64
    }

    /// Least-squares slope of temperature against time over
    /// `[start, end]` seconds after sample `from`, °C/s.
    pub fn window_slope(&self, from: usize, start: f64, end: f64) -> Option<f64> {
        let t0 = self.times[from];
        let pts: Vec<(f64, f64)> = self.times[from..]
            .iter()
            .zip(&self.temperatures[from..])
            .map(|(&t, &y)| (t - t0, y))
            .filter(|&(t, _)| t >= start - 1e-9 && t <= end + 1e-9)
            .collect();
        least_squares_slope(&pts)
    }
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Face deficit accumulated during the approach, °C.
///
/// The face starts at the ramp's starting temperature, is driven by the
/// heater at `rate` and loses heat toward `gap_temp` at rate `h`; the deficit
/// is how far it ends up below the set point at contact.
fn approach_deficit(set_point: f64, rate: f64, duration: f64, h: f64, gap_temp: f64) -> f64 {
    if h == 0.0 || duration == 0.0 {
        return 0.0;
    }
    let start = set_point - rate * duration;
    // dS/dt = rate - h (S - gap_temp)  =>  S -> gap_temp + rate / h
    let equilibrium = gap_temp + rate / h;
    let settled = -(-h * duration).exp_m1();
    let face = start + (equilibrium - start) * settled;
    set_point - face
}

/// Synthesizes one trace.
pub fn synthesize_trace(cfg: &TraceConfig, nonideal: &NonIdealityConfig) -> Result<TemperatureTrace, SimError> {
    cfg.validate()?;
    nonideal.validate()?;

    let dt = cfg.dt();
    let k0 = cfg.contact_index();
    let n_post = cfg.post_contact_samples();
    let set_point = cfg.sensor.temperature();
    let rate = if cfg.sensor.heated { cfg.heating_rate } else { 0.0 };
    let pre_duration = k0 as f64 * dt;

    let mut temps = Vec::with_capacity(k0 + n_post);
    for i in 0..k0 {
        temps.push(set_point - rate * (k0 - i) as f64 * dt);
    }

    let tc = contact_temperature(&cfg.sensor.body, &cfg.object)?.contact_temperature;
    let gap_temp = 0.5 * (cfg.ambient_temperature + cfg.object.temperature);
    let deficit = approach_deficit(set_point, rate, pre_duration, nonideal.approach_conv_coeff, gap_temp);
    let decay = if nonideal.contact_lag > 0.0 {
        (-dt / nonideal.contact_lag).exp()
    } else {
        0.0
    };

    let mut lagged = set_point;
    for j in 0..n_post {
        let t = j as f64 * dt;
        let w = cfg.sensor.response_weight(t)?;
        let mut input = set_point + (tc - set_point) * w;
        if j > 0 {
            input -= deficit;
        }
        lagged = if j == 0 {
            input
        } else {
            decay * lagged + (1.0 - decay) * input
        };
        temps.push(lagged);
    }

    if nonideal.noise_sigma > 0.0 {
        let normal = Normal::new(0.0, nonideal.noise_sigma).map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        let mut rng = seed::rng(cfg.seed);
        for t in &mut temps {
            *t += normal.sample(&mut rng);
        }
    }

    let times = (0..temps.len()).map(|i| i as f64 * dt).collect();
    Ok(TemperatureTrace {
        times,
        temperatures: temps,
        sensor_id: if cfg.sensor.heated {
            SensorId::Active
        } else {
            SensorId::Passive
        },
        contact_index: Some(k0),
        seed: cfg.seed,
        material: Some(cfg.object.material.name.clone()),
        block_id: None,
    })
}

/// Finds the contact sample.
///
/// For a heated sensor contact is the global temperature maximum. For a
/// passive sensor it is the start of the steepest change: the last sample
/// before the largest step whose own step is still below a tenth of it.
/// Ties go to the earliest index.
pub fn detect_contact(trace: &TemperatureTrace, noise_sigma: f64) -> Result<usize, SimError> {
    trace.validate()?;
    let temps = &trace.temperatures;
    let variation: f64 = temps.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    let scale = temps.iter().fold(1.0_f64, |m, t| m.max(t.abs()));
    let floor = (10.0 * noise_sigma).max(1e-9 * scale);
    if variation <= floor {
        return Err(SimError::NoContact { variation, floor });
    }
    match trace.sensor_id {
        SensorId::Active => {
            let mut best = 0;
            for (i, &t) in temps.iter().enumerate() {
                if t > temps[best] {
                    best = i;
                }
            }
            Ok(best)
        }
        SensorId::Passive => {
            let steps: Vec<f64> = temps.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
            let mut steepest = 0;
            for (i, &s) in steps.iter().enumerate() {
                if s > steps[steepest] {
                    steepest = i;
                }
            }
            let threshold = 0.1 * steps[steepest];
            let mut onset = steepest;
            while onset > 0 && steps[onset - 1] >= threshold {
                onset -= 1;
            }
            Ok(onset)
        }
    }
}

/// Detected contact, falling back to the recorded index when the trace is
/// too flat to locate one.
pub fn resolve_contact(trace: &TemperatureTrace, noise_sigma: f64) -> Result<usize, SimError> {
    match detect_contact(trace, noise_sigma) {
        Ok(k) => Ok(k),
        Err(SimError::NoContact { .. }) if trace.contact_index.is_some() => Ok(trace.contact_index.unwrap_or_default()),
        Err(e) => Err(e),
    }
}

/// Seeds for the two sensors of a double-condition pair.
pub fn pair_seeds(seed: u64) -> (u64, u64) {
    (seed::derive(seed, &[0]), seed::derive(seed, &[1]))
}

/// Simulates a heated sensor and an unheated sensor of the same geometry
/// touching the same object.
pub fn simulate_double_condition(
    cfg: &TraceConfig,
    passive_temp: f64,
    nonideal: &NonIdealityConfig,
    chain: Option<&SignalChainConfig>,
) -> Result<(TemperatureTrace, TemperatureTrace), SimError> {
    cfg.validate()?;
    let (active_seed, passive_seed) = pair_seeds(cfg.seed);

    let mut active_cfg = cfg.clone();
    active_cfg.sensor.heated = true;
    active_cfg.seed = active_seed;

    let mut passive_cfg = cfg.clone();
    passive_cfg.sensor.heated = false;
    passive_cfg.sensor.body = cfg.sensor.body.with_temperature(passive_temp)?;
    passive_cfg.seed = passive_seed;

    let mut active = synthesize_trace(&active_cfg, nonideal)?;
    let mut passive = synthesize_trace(&passive_cfg, nonideal)?;
    if let Some(chain) = chain {
        active.temperatures = apply_signal_chain(&active.temperatures, chain, cfg.sample_rate)?;
        passive.temperatures = apply_signal_chain(&passive.temperatures, chain, cfg.sample_rate)?;
    }
    Ok((active, passive))
}
