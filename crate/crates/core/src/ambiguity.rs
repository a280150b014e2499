//! Ambiguous initial conditions and the two-temperature sensor.
//!
//! Two objects of different effusivity produce identical measurements when
//! they share the same contact temperature, because the `erfc` factor in the
//! measured response depends only on the sensor. For a given object 1 there is
//! exactly one object 2 temperature with that property. A second sensor held
//! at another temperature moves that ambiguous temperature, so at most one of
//! the two sensors can be fooled by a given pair of materials.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::heatcore::{contact_temperature_raw, response_weight, BodyState, HeatError, SensorSpec};
use crate::seed;

/// Gaps at or below this are treated as zero, in °C.
pub const DISTINCTNESS_THRESHOLD: f64 = 1e-12;
/// Minimum relative difference between the two object effusivities in a sweep.
pub const MIN_RELATIVE_EFFUSIVITY_GAP: f64 = 1e-6;

const SWEEP_EFFUSIVITY_RANGE: (f64, f64) = (50.0, 50_000.0);
const EQUAL_SLICE_PERIOD: u64 = 10;
const SWEEP_TEMPERATURE_RANGE: (f64, f64) = (-40.0, 45.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AmbiguityError {
    #[error("effusivity must be positive, got {0}")]
    NonPositiveEffusivity(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Heat(#[from] HeatError),
}

fn positive(e: f64) -> Result<f64, AmbiguityError> {
    if e > 0.0 && e.is_finite() {
        Ok(e)
    } else {
        Err(AmbiguityError::NonPositiveEffusivity(e))
    }
}

/// Object 2 temperature that makes object 2 indistinguishable from object 1,
/// for a sensor at `sensor_temp` with effusivity `es`.
///
/// This is the expanded rational form; [`ambiguity_offset`] gives the same
/// quantity factored.
pub fn ambiguous_temperature_raw(sensor_temp: f64, es: f64, object_temp: f64, eo1: f64, eo2: f64) -> f64 {
    let (ts, to1) = (sensor_temp, object_temp);
    (-ts * es * eo1 + ts * es * eo2 + es * to1 * eo1 + to1 * eo1 * eo2) / (eo2 * (es + eo1))
}

/// `T_o2 - T_o1 = e_s (T_s - T_o1)(e_o2 - e_o1) / (e_o2 (e_s + e_o1))`.
pub fn ambiguity_offset(sensor_temp: f64, es: f64, object_temp: f64, eo1: f64, eo2: f64) -> f64 {
    es * (sensor_temp - object_temp) * (eo2 - eo1) / (eo2 * (es + eo1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityQuery {
    pub sensor: BodyState,
    pub object1: BodyState,
    pub target_effusivity: f64,
}

pub fn ambiguous_object_temperature(q: &AmbiguityQuery) -> Result<f64, AmbiguityError> {
    let es = positive(q.sensor.effusivity())?;
    let eo1 = positive(q.object1.effusivity())?;
    let eo2 = positive(q.target_effusivity)?;
    Ok(ambiguous_temperature_raw(
        q.sensor.temperature,
        es,
        q.object1.temperature,
        eo1,
        eo2,
    ))
}

/// Largest difference between the traces measured on `object1` and `object2`
/// over `n_points` uniformly spaced times in `[0, t_max]`.
pub fn verify_ambiguity(
    sensor: &SensorSpec,
    object1: &BodyState,
    object2: &BodyState,
    t_max: f64,
    n_points: usize,
) -> Result<f64, AmbiguityError> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(AmbiguityError::InvalidGrid(format!(
            "t_max must be positive, got {t_max}"
        )));
    }
    if n_points < 2 {
        return Err(AmbiguityError::InvalidGrid(format!(
            "need at least 2 points, got {n_points}"
        )));
    }
    let es = positive(sensor.effusivity())?;
    let ts = sensor.temperature();
    let tc1 = contact_temperature_raw(ts, es, object1.temperature, positive(object1.effusivity())?);
    let tc2 = contact_temperature_raw(ts, es, object2.temperature, positive(object2.effusivity())?);
    let dt = t_max / (n_points - 1) as f64;
    let mut worst = 0.0_f64;
    for i in 0..n_points {
        let w = response_weight(sensor.depth, sensor.diffusivity, i as f64 * dt)?;
        let m1 = ts + (tc1 - ts) * w;
        let m2 = ts + (tc2 - ts) * w;
        worst = worst.max((m1 - m2).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleConditionQuery {
    pub sensor1: BodyState,
    pub sensor2: BodyState,
    pub object1: BodyState,
    pub target_effusivity: f64,
}

/// Raw parameters of a two-sensor configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleConditionParams {
    pub sensor1_temp: f64,
    pub sensor1_effusivity: f64,
    pub sensor2_temp: f64,
    pub sensor2_effusivity: f64,
    pub object1_temp: f64,
    pub object1_effusivity: f64,
    pub object2_effusivity: f64,
}

impl DoubleConditionParams {
    /// `e_s1 e_s2 (T_s1 - T_s2) + e_o1 (e_s1 (T_s1 - T_o1) + e_s2 (T_o1 - T_s2))`.
    ///
    /// The per-sensor ambiguous temperatures differ by this times
    /// `(e_o2 - e_o1) / (e_o2 (e_s1 + e_o1)(e_s2 + e_o1))`.
    pub fn distinctness_expression(&self) -> f64 {
        let p = self;
        p.sensor1_effusivity * p.sensor2_effusivity * (p.sensor1_temp - p.sensor2_temp)
            + p.object1_effusivity
                * (p.sensor1_effusivity * (p.sensor1_temp - p.object1_temp)
                    + p.sensor2_effusivity * (p.object1_temp - p.sensor2_temp))
    }

    fn evaluate(&self) -> DoubleConditionGap {
        let p = self;
        let first = ambiguous_temperature_raw(
            p.sensor1_temp,
            p.sensor1_effusivity,
            p.object1_temp,
            p.object1_effusivity,
            p.object2_effusivity,
        );
        let second = ambiguous_temperature_raw(
            p.sensor2_temp,
            p.sensor2_effusivity,
            p.object1_temp,
            p.object1_effusivity,
            p.object2_effusivity,
        );
        let gap = (first - second).abs();
        let expression = self.distinctness_expression();
        let materials_differ = p.object2_effusivity != p.object1_effusivity;
        // Magnitude of the summands in the expanded form, which sets the
        // rounding noise of each ambiguous temperature.
        let summands = |ts: f64, es: f64| {
            let (to1, eo1, eo2) = (p.object1_temp.abs(), p.object1_effusivity, p.object2_effusivity);
            (ts.abs() * es * (eo1 + eo2) + to1 * eo1 * (es + eo2)) / (eo2 * (es + eo1))
        };
        let temp_scale = summands(p.sensor1_temp, p.sensor1_effusivity)
            .max(summands(p.sensor2_temp, p.sensor2_effusivity))
            .max(1.0);
        let expr_scale = (p.sensor1_effusivity * p.sensor2_effusivity
            + p.object1_effusivity * (p.sensor1_effusivity + p.sensor2_effusivity))
            * p.sensor1_temp
                .abs()
                .max(p.sensor2_temp.abs())
                .max(p.object1_temp.abs())
                .max(1.0);
        let gap_zero = gap <= 64.0 * f64::EPSILON * temp_scale;
        let expr_zero = expression.abs() <= 64.0 * f64::EPSILON * expr_scale;
        let consistent = !materials_differ || gap_zero == expr_zero;
        DoubleConditionGap {
            first,
            second,
            gap,
            expression,
            consistent,
        }
    }
}

/// Per-sensor ambiguous temperatures and their separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleConditionGap {
    pub first: f64,
    pub second: f64,
    pub gap: f64,
    /// Value of [`DoubleConditionParams::distinctness_expression`].
    pub expression: f64,
    /// Whether "expression is zero" and "gap is zero" agree, up to rounding.
    pub consistent: bool,
}

impl DoubleConditionQuery {
    pub fn params(&self) -> Result<DoubleConditionParams, AmbiguityError> {
        Ok(DoubleConditionParams {
            sensor1_temp: self.sensor1.temperature,
            sensor1_effusivity: positive(self.sensor1.effusivity())?,
            sensor2_temp: self.sensor2.temperature,
            sensor2_effusivity: positive(self.sensor2.effusivity())?,
            object1_temp: self.object1.temperature,
            object1_effusivity: positive(self.object1.effusivity())?,
            object2_effusivity: positive(self.target_effusivity)?,
        })
    }
}

pub fn double_condition_gap(q: &DoubleConditionQuery) -> Result<DoubleConditionGap, AmbiguityError> {
    Ok(q.params()?.evaluate())
}

/// Region of parameter space a sweep samples from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepDomain {
    /// `e_s1 >= e_s2`, `T_s1 > T_s2`, and object 1 either colder than both
    /// sensors or between them.
    Preconditions,
    /// Same as [`SweepDomain::Preconditions`] with `e_s1 = e_s2`.
    EqualSensorEffusivity,
    /// Object 1 hotter than both sensors with `e_s1 > e_s2`; outside what the
    /// distinctness argument covers. Zero gaps are logged, not counted.
    Exploratory,
}

impl SweepDomain {
    pub fn description(self) -> &'static str {
        match self {
            SweepDomain::Preconditions => {
                "e_s1 >= e_s2 > 0, T_s1 > T_s2, T_o1 < T_s2 or T_s2 <= T_o1 <= T_s1, |e_o1 - e_o2|/e_o1 >= 1e-6; \
                 every tenth sample has e_s1 = e_s2; effusivities log-uniform in [50, 50000], temperatures uniform in [-40, 45] C"
            }
            SweepDomain::EqualSensorEffusivity => {
                "e_s1 = e_s2 > 0, T_s1 > T_s2, T_o1 < T_s2 or T_s2 <= T_o1 <= T_s1, |e_o1 - e_o2|/e_o1 >= 1e-6; \
                 effusivities log-uniform in [50, 50000], temperatures uniform in [-40, 45] C"
            }
            SweepDomain::Exploratory => {
                "e_s1 > e_s2 > 0, T_o1 > T_s1 > T_s2, |e_o1 - e_o2|/e_o1 >= 1e-6; \
                 effusivities log-uniform in [50, 50000], temperatures uniform in [-40, 45] C"
            }
        }
    }

    /// The precondition domain spends every tenth sample on its
    /// `e_s1 = e_s2` slice so a sweep always covers that special case.
    fn slice_for(self, index: u64) -> Self {
        match self {
            SweepDomain::Preconditions if index % EQUAL_SLICE_PERIOD == EQUAL_SLICE_PERIOD - 1 => {
                SweepDomain::EqualSensorEffusivity
            }
            other => other,
        }
    }

    fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> DoubleConditionParams {
        let (tlo, thi) = SWEEP_TEMPERATURE_RANGE;
        loop {
            let mut a = log_uniform(rng);
            let mut b = log_uniform(rng);
            if a < b {
                std::mem::swap(&mut a, &mut b);
            }
            let (es1, es2) = match self {
                SweepDomain::EqualSensorEffusivity => (a, a),
                _ => (a, b),
            };
            if self == SweepDomain::Exploratory && es1 == es2 {
                continue;
            }
            let mut ts1 = rng.gen_range(tlo..thi);
            let mut ts2 = rng.gen_range(tlo..thi);
            if ts1 == ts2 {
                continue;
            }
            if ts1 < ts2 {
                std::mem::swap(&mut ts1, &mut ts2);
            }
            let to1 = match self {
                SweepDomain::Exploratory => {
                    if ts1 >= thi {
                        continue;
                    }
                    rng.gen_range(ts1..thi)
                }
                // Either below both sensors or bracketed by them.
                _ => rng.gen_range(tlo..ts1),
            };
            if self == SweepDomain::Exploratory && to1 <= ts1 {
                continue;
            }
            let eo1 = log_uniform(rng);
            let eo2 = log_uniform(rng);
            if (eo1 - eo2).abs() / eo1 < MIN_RELATIVE_EFFUSIVITY_GAP {
                continue;
            }
            return DoubleConditionParams {
                sensor1_temp: ts1,
                sensor1_effusivity: es1,
                sensor2_temp: ts2,
                sensor2_effusivity: es2,
                object1_temp: to1,
                object1_effusivity: eo1,
                object2_effusivity: eo2,
            };
        }
    }
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let (lo, hi) = SWEEP_EFFUSIVITY_RANGE;
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

/// Parameter set whose gap fell at or below the distinctness threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSample {
    pub index: u64,
    pub params: DoubleConditionParams,
    pub gap: f64,
    pub expression: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub n_samples: u64,
    /// Samples with gap at or below the threshold (precondition domains only).
    pub violations: u64,
    /// Samples where the zero-ness of the gap and of the expression disagree.
    pub inconsistencies: u64,
    /// Smallest gap seen, `null` for an empty sweep.
    pub min_gap: Option<f64>,
    pub seed: u64,
    pub domain: SweepDomain,
    pub domain_description: String,
    pub threshold: f64,
    /// Samples whose expression came out negative.
    pub negative_expressions: u64,
    /// Samples drawn with `e_s1 = e_s2`.
    pub equal_sensor_effusivity_samples: u64,
    /// Zero-gap parameter sets found in the exploratory domain.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub zero_gap_samples: Vec<SweepSample>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.inconsistencies == 0
    }
}

/// Samples the precondition domain and counts gaps at or below the
/// distinctness threshold.
pub fn proof_sweep(n_samples: u64, seed: u64) -> SweepReport {
    proof_sweep_in(SweepDomain::Preconditions, n_samples, seed)
}

pub fn proof_sweep_in(domain: SweepDomain, n_samples: u64, seed: u64) -> SweepReport {
    let results: Vec<(DoubleConditionParams, DoubleConditionGap)> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::rng(seed::derive(seed, &[i]));
            let params = domain.slice_for(i).sample(&mut rng);
            (params, params.evaluate())
        })
        .collect();

    let mut report = SweepReport {
        n_samples,
        violations: 0,
        inconsistencies: 0,
        min_gap: None,
        seed,
        domain,
        domain_description: domain.description().to_owned(),
        threshold: DISTINCTNESS_THRESHOLD,
        negative_expressions: 0,
        equal_sensor_effusivity_samples: 0,
        zero_gap_samples: Vec::new(),
    };
    for (index, (params, gap)) in results.into_iter().enumerate() {
        report.min_gap = Some(report.min_gap.map_or(gap.gap, |m: f64| m.min(gap.gap)));
        if params.sensor1_effusivity == params.sensor2_effusivity {
            report.equal_sensor_effusivity_samples += 1;
        }
        if gap.expression < 0.0 {
            report.negative_expressions += 1;
        }
        if !gap.consistent {
            report.inconsistencies += 1;
        }
        if gap.gap <= DISTINCTNESS_THRESHOLD {
            match domain {
                SweepDomain::Exploratory => report.zero_gap_samples.push(SweepSample {
                    index: index as u64,
                    params,
                    gap: gap.gap,
                    expression: gap.expression,
                }),
                _ => report.violations += 1,
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heatcore::ThermalMaterial;

    fn body(e: f64, t: f64) -> BodyState {
        BodyState::new(ThermalMaterial::new("m", e).unwrap(), t).unwrap()
    }

    fn query(ts: f64, es: f64, to1: f64, eo1: f64, eo2: f64) -> AmbiguityQuery {
        AmbiguityQuery {
            sensor: body(es, ts),
            object1: body(eo1, to1),
            target_effusivity: eo2,
        }
    }

    #[test]
    fn equal_effusivity_collapses() {
        let t = ambiguous_object_temperature(&query(29.5, 892.0, 22.5, 331.0, 331.0)).unwrap();
        assert!((t - 22.5).abs() < 1e-12);
    }

    #[test]
    fn sensor_at_object_temperature() {
        let t = ambiguous_object_temperature(&query(22.5, 892.0, 22.5, 23664.0, 331.0)).unwrap();
        assert!((t - 22.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_positive_target() {
        assert!(matches!(
            ambiguous_object_temperature(&query(29.5, 892.0, 22.5, 331.0, 0.0)),
            Err(AmbiguityError::NonPositiveEffusivity(_))
        ));
    }

    #[test]
    fn factored_form_agrees() {
        let (ts, es, to1, eo1, eo2) = (31.0, 1450.0, 18.0, 23664.0, 331.0);
        let a = ambiguous_temperature_raw(ts, es, to1, eo1, eo2);
        let b = to1 + ambiguity_offset(ts, es, to1, eo1, eo2);
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn contact_temperatures_match() {
        let (ts, es, to1, eo1, eo2) = (29.5, 892.0, 22.5, 23664.0, 331.0);
        let to2 = ambiguous_temperature_raw(ts, es, to1, eo1, eo2);
        let tc1 = contact_temperature_raw(ts, es, to1, eo1);
        let tc2 = contact_temperature_raw(ts, es, to2, eo2);
        assert!((tc1 - tc2).abs() / tc1.abs() < 1e-12);
    }

    #[test]
    fn verify_grid_errors() {
        let s = SensorSpec::with_defaults(body(892.0, 29.5), true).unwrap();
        let o = body(331.0, 22.5);
        assert!(matches!(
            verify_ambiguity(&s, &o, &o, 0.0, 10),
            Err(AmbiguityError::InvalidGrid(_))
        ));
        assert!(matches!(
            verify_ambiguity(&s, &o, &o, 5.0, 1),
            Err(AmbiguityError::InvalidGrid(_))
        ));
        assert_eq!(verify_ambiguity(&s, &o, &o, 5.0, 100).unwrap(), 0.0);
    }

    #[test]
    fn identical_sensors_have_zero_gap() {
        let q = DoubleConditionQuery {
            sensor1: body(892.0, 29.5),
            sensor2: body(892.0, 29.5),
            object1: body(23664.0, 22.5),
            target_effusivity: 331.0,
        };
        let g = double_condition_gap(&q).unwrap();
        assert_eq!(g.gap, 0.0);
        assert_eq!(g.expression, 0.0);
        assert!(g.consistent);
    }

    #[test]
    fn same_material_has_zero_gap() {
        let q = DoubleConditionQuery {
            sensor1: body(892.0, 29.5),
            sensor2: body(500.0, 22.5),
            object1: body(331.0, 10.0),
            target_effusivity: 331.0,
        };
        let g = double_condition_gap(&q).unwrap();
        assert!(g.gap < 1e-12);
        assert!(g.consistent);
    }

    #[test]
    fn equal_sensor_effusivity_distinct_temperatures() {
        let q = DoubleConditionQuery {
            sensor1: body(892.0, 29.5),
            sensor2: body(892.0, 22.5),
            object1: body(23664.0, 22.5),
            target_effusivity: 331.0,
        };
        let g = double_condition_gap(&q).unwrap();
        assert!(g.gap > 1.0);
        assert!(g.expression > 0.0);
    }

    #[test]
    fn gap_factorization() {
        let p = DoubleConditionParams {
            sensor1_temp: 29.5,
            sensor1_effusivity: 1450.0,
            sensor2_temp: 22.5,
            sensor2_effusivity: 892.0,
            object1_temp: 20.0,
            object1_effusivity: 23664.0,
            object2_effusivity: 331.0,
        };
        let g = p.evaluate();
        let predicted = g.expression * (p.object2_effusivity - p.object1_effusivity)
            / (p.object2_effusivity
                * (p.sensor1_effusivity + p.object1_effusivity)
                * (p.sensor2_effusivity + p.object1_effusivity));
        assert!(((g.first - g.second) - predicted).abs() < 1e-9);
    }

    #[test]
    fn empty_sweep() {
        let r = proof_sweep(0, 1);
        assert_eq!(r.violations, 0);
        assert_eq!(r.min_gap, None);
        assert!(r.passed());
    }

    #[test]
    fn sampled_domains_respect_preconditions() {
        let mut rng = seed::rng(3);
        for _ in 0..2000 {
            let p = SweepDomain::Preconditions.sample(&mut rng);
            assert!(p.sensor1_effusivity >= p.sensor2_effusivity);
            assert!(p.sensor1_temp > p.sensor2_temp);
            assert!(p.object1_temp < p.sensor1_temp);
            let p = SweepDomain::EqualSensorEffusivity.sample(&mut rng);
            assert_eq!(p.sensor1_effusivity, p.sensor2_effusivity);
            let p = SweepDomain::Exploratory.sample(&mut rng);
            assert!(p.object1_temp > p.sensor1_temp && p.sensor1_temp > p.sensor2_temp);
            assert!(p.sensor1_effusivity > p.sensor2_effusivity);
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let a = proof_sweep(500, 42);
        let b = proof_sweep(500, 42);
        assert_eq!(a, b);
        assert_eq!(a.violations, 0);
        assert_eq!(a.equal_sensor_effusivity_samples, 50);
    }
}
