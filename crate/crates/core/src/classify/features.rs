use serde::{Deserialize, Serialize};

use super::ClassifyError;
use crate::sensorsim::{resolve_contact, SimError, TemperatureTrace};

/// Layout of the feature vector built from one or two traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureConfig {
    /// Post-contact temperatures resampled onto this many points over `[0, t_max]`.
    pub n_resampled: usize,
    /// Seconds after contact covered by the resampled block.
    pub t_max: f64,
    /// Least-squares slope windows, seconds after contact.
    pub slope_windows: Vec<(f64, f64)>,
    pub include_passive: bool,
    /// Noise level handed to contact detection, °C.
    #[serde(default)]
    pub noise_floor: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            n_resampled: 50,
            t_max: 5.0,
            slope_windows: vec![(0.0, 0.5), (0.5, 5.0)],
            include_passive: false,
            noise_floor: 0.0,
        }
    }
}

impl FeatureConfig {
    pub fn with_passive(mut self, include: bool) -> Self {
        self.include_passive = include;
        self
    }

    pub fn validate(&self) -> Result<(), ClassifyError> {
        if self.n_resampled < 2 {
            return Err(ClassifyError::InvalidConfig(format!(
                "n_resampled must be >= 2, got {}",
                self.n_resampled
            )));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(ClassifyError::InvalidConfig(format!(
                "t_max must be > 0, got {}",
                self.t_max
            )));
        }
        for &(a, b) in &self.slope_windows {
            if !(a >= 0.0 && b > a && b <= self.t_max) {
                return Err(ClassifyError::InvalidConfig(format!(
                    "slope window ({a}, {b}) must lie within [0, {}]",
                    self.t_max
                )));
            }
        }
        if !(self.noise_floor >= 0.0) {
            return Err(ClassifyError::InvalidConfig("noise_floor must be >= 0".into()));
        }
        Ok(())
    }

    /// Features contributed by one trace.
    pub fn block_len(&self) -> usize {
        self.n_resampled + self.slope_windows.len()
    }

    pub fn len(&self) -> usize {
        self.block_len() * if self.include_passive { 2 } else { 1 }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Linear interpolation at `t`, holding the end values outside the samples.
fn interpolate(times: &[f64], temps: &[f64], t: f64) -> f64 {
    let i = times.partition_point(|&x| x <= t);
    if i == 0 {
        return temps[0];
    }
    if i == times.len() {
        return temps[times.len() - 1];
    }
    let (t0, t1) = (times[i - 1], times[i]);
    temps[i - 1] + (temps[i] - temps[i - 1]) * (t - t0) / (t1 - t0)
}

fn trace_block(
    trace: &TemperatureTrace,
    contact: usize,
    cfg: &FeatureConfig,
    out: &mut Vec<f64>,
) -> Result<(), ClassifyError> {
    let times = &trace.times[contact..];
    let temps = &trace.temperatures[contact..];
    let (t0, y0) = (times[0], temps[0]);
    let step = cfg.t_max / (cfg.n_resampled - 1) as f64;
    for i in 0..cfg.n_resampled {
        out.push(interpolate(times, temps, t0 + i as f64 * step) - y0);
    }
    for &(a, b) in &cfg.slope_windows {
        let slope = trace.window_slope(contact, a, b).ok_or_else(|| {
            ClassifyError::InvalidConfig(format!("slope window ({a}, {b}) holds fewer than 2 samples"))
        })?;
        out.push(slope);
    }
    Ok(())
}

/// Builds the feature vector for one touch.
///
/// Contact is located on the active trace; the passive trace shares its time
/// base and is cut at the same sample.
pub fn extract_features(
    active: &TemperatureTrace,
    passive: Option<&TemperatureTrace>,
    cfg: &FeatureConfig,
) -> Result<Vec<f64>, ClassifyError> {
    cfg.validate()?;
    let contact = match resolve_contact(active, cfg.noise_floor) {
        Ok(k) => k,
        Err(SimError::NoContact { .. }) => return Err(ClassifyError::NoContact),
        Err(e) => return Err(e.into()),
    };
    let mut out = Vec::with_capacity(cfg.len());
    trace_block(active, contact, cfg, &mut out)?;
    if cfg.include_passive {
        let passive = passive.ok_or(ClassifyError::MissingPassive)?;
        passive.validate()?;
        if passive.times != active.times {
            return Err(ClassifyError::InvalidConfig(
                "passive trace must share the active trace's time base".into(),
            ));
        }
        trace_block(passive, contact, cfg, &mut out)?;
    }
    debug_assert_eq!(out.len(), cfg.len());
    Ok(out)
}
