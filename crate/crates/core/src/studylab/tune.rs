use serde::{Deserialize, Serialize};

use super::StudyError;
use crate::ambiguity::ambiguous_temperature_raw;
use crate::estimation::WarmingCorrection;
use crate::heatcore::{BodyState, ThermalMaterial};
use crate::sensorsim::{synthesize_trace, NonIdealityConfig, TraceConfig};

/// How the cold block is prepared: the refrigerator-to-touch line and the
/// transport delay it was measured for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColdPrepConfig {
    pub warming: WarmingCorrection,
    /// Seconds between leaving the refrigerator and contact.
    pub delay: f64,
}

impl ColdPrepConfig {
    pub fn robot(warming: WarmingCorrection) -> Self {
        Self { warming, delay: 5.0 }
    }

    pub fn human(warming: WarmingCorrection) -> Self {
        Self { warming, delay: 20.0 }
    }

    pub fn validate(&self) -> Result<(), StudyError> {
        if !(self.delay >= 0.0) || !self.delay.is_finite() {
            return Err(StudyError::InvalidConfig(format!(
                "delay must be >= 0, got {}",
                self.delay
            )));
        }
        if !self.warming.slope.is_finite() || !self.warming.intercept.is_finite() || self.warming.slope == 0.0 {
            return Err(StudyError::InvalidConfig(
                "warming line must be finite with non-zero slope".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuneOptions {
    /// Non-idealities of the simulated traces; noise is ignored.
    pub nonideal: NonIdealityConfig,
    /// Candidates span this many °C either side of the ideal prediction.
    pub half_width: f64,
    /// Explicit candidate range, overriding `half_width`.
    #[serde(default)]
    pub range: Option<(f64, f64)>,
    #[serde(default)]
    pub prep: Option<ColdPrepConfig>,
}

impl Default for TuneOptions {
    fn default() -> Self {
        Self {
            nonideal: NonIdealityConfig::default().noiseless(),
            half_width: 5.0,
            range: None,
            prep: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    /// Touched cold-wood temperature, °C.
    pub target: f64,
    /// Ideal-model prediction, °C.
    pub predicted: f64,
    /// Refrigerator setting that yields `target`, when a warming line is set.
    pub fridge_setting: Option<f64>,
    /// Largest absolute difference between the cold-wood and metal traces, °C.
    pub gap: f64,
    /// The winner sits at an end of the candidate grid.
    pub boundary: bool,
    /// `(candidate, gap)` for every candidate.
    pub candidates: Vec<(f64, f64)>,
}

/// Scans cold-wood temperatures on a grid and keeps the one whose heated
/// sensor trace is closest, in the sup norm, to the trace on ambient metal.
///
/// `base` holds the sensor, the metal object and the trace timing. Traces are
/// simulated without noise. Ties go to the lower candidate.
pub fn tune_ambiguous_target(
    base: &TraceConfig,
    wood: &ThermalMaterial,
    grid_step: f64,
    opts: &TuneOptions,
) -> Result<TuneResult, StudyError> {
    if !(grid_step > 0.0) || !grid_step.is_finite() {
        return Err(StudyError::InvalidConfig(format!(
            "grid step must be > 0, got {grid_step}"
        )));
    }
    if let Some(prep) = &opts.prep {
        prep.validate()?;
    }
    let nonideal = opts.nonideal.noiseless();
    let mut base = base.clone();
    base.sensor.heated = true;
    let metal_trace = synthesize_trace(&base, &nonideal)?;

    let predicted = ambiguous_temperature_raw(
        base.sensor.temperature(),
        base.sensor.effusivity(),
        base.object.temperature,
        base.object.effusivity(),
        wood.effusivity,
    );
    let candidates: Vec<f64> = match opts.range {
        Some((lo, hi)) => {
            if !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
                return Err(StudyError::InvalidConfig(format!(
                    "invalid candidate range ({lo}, {hi})"
                )));
            }
            let n = ((hi - lo) / grid_step + 1e-9).floor() as usize;
            (0..=n).map(|k| lo + k as f64 * grid_step).collect()
        }
        None => {
            let center = (predicted / grid_step).round() * grid_step;
            let k = (opts.half_width / grid_step).ceil() as i64;
            (-k..=k).map(|i| center + i as f64 * grid_step).collect()
        }
    };

    let mut scored = Vec::with_capacity(candidates.len());
    for &c in &candidates {
        let mut cfg = base.clone();
        cfg.object = BodyState::new(wood.clone(), c)?;
        let cold = synthesize_trace(&cfg, &nonideal)?;
        let gap = cold
            .temperatures
            .iter()
            .zip(&metal_trace.temperatures)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        scored.push((c, gap));
    }
    let mut best = 0;
    for (i, s) in scored.iter().enumerate() {
        if s.1 < scored[best].1 {
            best = i;
        }
    }
    let (target, gap) = scored[best];
    let boundary = scored.len() > 1 && (best == 0 || best == scored.len() - 1);
    let fridge_setting = opts.prep.and_then(|p| p.warming.fridge_setting(target));
    Ok(TuneResult {
        target,
        predicted,
        fridge_setting,
        gap,
        boundary,
        candidates: scored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heatcore::SensorSpec;

    fn base() -> TraceConfig {
        let sensor = BodyState::new(ThermalMaterial::new("s", 892.0).unwrap(), 29.5).unwrap();
        let metal = BodyState::new(ThermalMaterial::new("m", 23664.0).unwrap(), 22.5).unwrap();
        TraceConfig::new(SensorSpec::with_defaults(sensor, true).unwrap(), metal)
    }

    fn wood() -> ThermalMaterial {
        ThermalMaterial::new("w", 331.0).unwrap()
    }

    #[test]
    fn ideal_picks_nearest_grid_point() {
        let opts = TuneOptions {
            nonideal: NonIdealityConfig::IDEAL,
            ..TuneOptions::default()
        };
        let r = tune_ambiguous_target(&base(), &wood(), 1.0, &opts).unwrap();
        assert!((r.predicted - 4.575466693306969).abs() < 1e-9);
        assert_eq!(r.target, 5.0);
        assert!(!r.boundary);
        let r = tune_ambiguous_target(&base(), &wood(), 0.5, &opts).unwrap();
        assert_eq!(r.target, 4.5);
    }

    #[test]
    fn warming_inverts_to_fridge_setting() {
        let warming = WarmingCorrection {
            slope: 0.8,
            intercept: 5.0,
        };
        let opts = TuneOptions {
            nonideal: NonIdealityConfig::IDEAL,
            prep: Some(ColdPrepConfig::robot(warming)),
            ..TuneOptions::default()
        };
        let r = tune_ambiguous_target(&base(), &wood(), 1.0, &opts).unwrap();
        let fridge = r.fridge_setting.unwrap();
        assert!((fridge - (r.target - 5.0) / 0.8).abs() < 1e-12);
        assert!((warming.touched(fridge) - r.target).abs() < 1e-12);
    }

    #[test]
    fn boundary_flag() {
        let opts = TuneOptions {
            nonideal: NonIdealityConfig::IDEAL,
            range: Some((10.0, 15.0)),
            ..TuneOptions::default()
        };
        let r = tune_ambiguous_target(&base(), &wood(), 1.0, &opts).unwrap();
        assert_eq!(r.target, 10.0);
        assert!(r.boundary);
    }

    #[test]
    fn bad_step() {
        assert!(tune_ambiguous_target(&base(), &wood(), 0.0, &TuneOptions::default()).is_err());
    }
}
