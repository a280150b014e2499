//! Semi-infinite solid contact model.
//!
//! Two bodies at uniform temperatures touch at `t = 0`. The interface jumps
//! to the effusivity-weighted mean of the two temperatures and the sensing
//! element, buried at depth `x_m` inside the sensor, relaxes toward that
//! interface temperature following an `erfc` profile.
//!
//! Temperatures are in °C, effusivities in J·m⁻²·K⁻¹·s⁻¹ᐟ², diffusivities in
//! m²/s, depths in m and times in s.

mod erfc;

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::erfc::erfc;

/// Largest |temperature| accepted for a body, in °C.
pub const TEMPERATURE_LIMIT: f64 = 200.0;
/// Largest sensing depth accepted, in m.
pub const DEPTH_LIMIT: f64 = 10.0e-3;
/// Default sensing depth, in m.
pub const DEFAULT_DEPTH: f64 = 0.5e-3;
/// Default sensor diffusivity, in m²/s.
pub const DEFAULT_DIFFUSIVITY: f64 = 1.0e-7;

const PROPERTY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeatError {
    #[error("{name} must be positive, got {value}")]
    NonPositiveProperty { name: &'static str, value: f64 },
    #[error("effusivity must be positive, got {0}")]
    NonPositiveEffusivity(f64),
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("temperature {0} °C is outside the accepted range")]
    InvalidTemperature(f64),
    #[error("invalid sensor: {0}")]
    InvalidSensor(String),
    #[error("material {name}: effusivity {effusivity} disagrees with sqrt(λρc_p) = {derived}")]
    InconsistentProperties {
        name: String,
        effusivity: f64,
        derived: f64,
    },
    #[error("duplicate material name {0:?}")]
    DuplicateMaterial(String),
    #[error("unknown material {0:?}")]
    UnknownMaterial(String),
    #[error("catalog: {0}")]
    Catalog(String),
}

/// `e = sqrt(λ ρ c_p)`.
pub fn effusivity_from_properties(conductivity: f64, density: f64, specific_heat: f64) -> Result<f64, HeatError> {
    for (name, value) in [
        ("conductivity", conductivity),
        ("density", density),
        ("specific heat", specific_heat),
    ] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(HeatError::NonPositiveProperty { name, value });
        }
    }
    Ok((conductivity * density * specific_heat).sqrt())
}

fn check_effusivity(e: f64) -> Result<f64, HeatError> {
    if e > 0.0 && e.is_finite() {
        Ok(e)
    } else {
        Err(HeatError::NonPositiveEffusivity(e))
    }
}

/// A named material. The constituent properties are optional; when all three
/// are present they must reproduce the effusivity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalMaterial {
    pub name: String,
    pub effusivity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conductivity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub specific_heat: Option<f64>,
}

impl ThermalMaterial {
    pub fn new(name: impl Into<String>, effusivity: f64) -> Result<Self, HeatError> {
        check_effusivity(effusivity)?;
        Ok(Self {
            name: name.into(),
            effusivity,
            conductivity: None,
            density: None,
            specific_heat: None,
        })
    }

    pub fn from_properties(
        name: impl Into<String>,
        conductivity: f64,
        density: f64,
        specific_heat: f64,
    ) -> Result<Self, HeatError> {
        let effusivity = effusivity_from_properties(conductivity, density, specific_heat)?;
        Ok(Self {
            name: name.into(),
            effusivity,
            conductivity: Some(conductivity),
            density: Some(density),
            specific_heat: Some(specific_heat),
        })
    }

    pub fn validate(&self) -> Result<(), HeatError> {
        check_effusivity(self.effusivity)?;
        if let (Some(k), Some(rho), Some(cp)) = (self.conductivity, self.density, self.specific_heat) {
            let derived = effusivity_from_properties(k, rho, cp)?;
            if (self.effusivity - derived).abs() / self.effusivity >= PROPERTY_TOLERANCE {
                return Err(HeatError::InconsistentProperties {
                    name: self.name.clone(),
                    effusivity: self.effusivity,
                    derived,
                });
            }
        }
        Ok(())
    }
}

pub const PINE_WOOD: &str = "pine wood";
pub const ALUMINUM: &str = "aluminum";
pub const ROBOT_SENSOR: &str = "robot sensor";
pub const HUMAN_FINGER: &str = "human finger";

/// The set of recognizable materials, keyed by unique name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MaterialCatalog {
    entries: Vec<ThermalMaterial>,
}

impl MaterialCatalog {
    pub fn new(entries: Vec<ThermalMaterial>) -> Result<Self, HeatError> {
        let mut catalog = Self {
            entries: Vec::with_capacity(entries.len()),
        };
        for m in entries {
            catalog.insert(m)?;
        }
        Ok(catalog)
    }

    /// Pine wood, aluminum, the robot sensor and a human finger.
    pub fn presets() -> Self {
        let preset = |name: &str, e: f64| ThermalMaterial::new(name, e).expect("preset");
        Self {
            entries: vec![
                preset(PINE_WOOD, 331.0),
                preset(ALUMINUM, 23664.0),
                preset(ROBOT_SENSOR, 892.0),
                preset(HUMAN_FINGER, 1450.0),
            ],
        }
    }

    pub fn insert(&mut self, material: ThermalMaterial) -> Result<(), HeatError> {
        material.validate()?;
        if self.get(&material.name).is_some() {
            return Err(HeatError::DuplicateMaterial(material.name));
        }
        self.entries.push(material);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&ThermalMaterial> {
        self.entries.iter().find(|m| m.name == name)
    }

    pub fn require(&self, name: &str) -> Result<&ThermalMaterial, HeatError> {
        self.get(name)
            .ok_or_else(|| HeatError::UnknownMaterial(name.to_owned()))
    }

    pub fn entries(&self) -> &[ThermalMaterial] {
        &self.entries
    }

    /// Parses a JSON array of `{"name", "effusivity", ...}` objects.
    pub fn from_json_str(text: &str) -> Result<Self, HeatError> {
        let entries: Vec<ThermalMaterial> =
            serde_json::from_str(text).map_err(|e| HeatError::Catalog(e.to_string()))?;
        Self::new(entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, HeatError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| HeatError::Catalog(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }
}

/// A semi-infinite body at a uniform initial temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyState {
    pub material: ThermalMaterial,
    pub temperature: f64,
}

impl BodyState {
    pub fn new(material: ThermalMaterial, temperature: f64) -> Result<Self, HeatError> {
        let body = Self { material, temperature };
        body.validate()?;
        Ok(body)
    }

    pub fn effusivity(&self) -> f64 {
        self.material.effusivity
    }

    pub fn with_temperature(&self, temperature: f64) -> Result<Self, HeatError> {
        Self::new(self.material.clone(), temperature)
    }

    pub fn validate(&self) -> Result<(), HeatError> {
        self.material.validate()?;
        if !self.temperature.is_finite() || self.temperature.abs() >= TEMPERATURE_LIMIT {
            return Err(HeatError::InvalidTemperature(self.temperature));
        }
        Ok(())
    }
}

/// The sensing body: its material and initial temperature plus the geometry
/// of the buried sensing element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorSpec {
    pub body: BodyState,
    /// Thermal diffusivity of the sensor material, m²/s.
    #[serde(default = "default_diffusivity")]
    pub diffusivity: f64,
    /// Depth of the sensing element below the contact face, m.
    #[serde(default = "default_depth")]
    pub depth: f64,
    /// Whether the sensor is actively heated above ambient before contact.
    #[serde(default)]
    pub heated: bool,
}

fn default_diffusivity() -> f64 {
    DEFAULT_DIFFUSIVITY
}

fn default_depth() -> f64 {
    DEFAULT_DEPTH
}

impl SensorSpec {
    pub fn new(body: BodyState, diffusivity: f64, depth: f64, heated: bool) -> Result<Self, HeatError> {
        let spec = Self {
            body,
            diffusivity,
            depth,
            heated,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Default geometry (0.5 mm depth, 1e-7 m²/s).
    pub fn with_defaults(body: BodyState, heated: bool) -> Result<Self, HeatError> {
        Self::new(body, DEFAULT_DIFFUSIVITY, DEFAULT_DEPTH, heated)
    }

    pub fn temperature(&self) -> f64 {
        self.body.temperature
    }

    pub fn effusivity(&self) -> f64 {
        self.body.effusivity()
    }

    pub fn validate(&self) -> Result<(), HeatError> {
        self.body.validate()?;
        if !(self.diffusivity > 0.0) || !self.diffusivity.is_finite() {
            return Err(HeatError::InvalidSensor(format!(
                "diffusivity must be positive, got {}",
                self.diffusivity
            )));
        }
        if !(0.0..=DEPTH_LIMIT).contains(&self.depth) {
            return Err(HeatError::InvalidSensor(format!(
                "depth must lie in [0, {DEPTH_LIMIT}] m, got {}",
                self.depth
            )));
        }
        Ok(())
    }

    /// The `erfc` weight at time `t` after contact: 0 means the element still
    /// reads its initial temperature, 1 means it reads the contact temperature.
    pub fn response_weight(&self, t: f64) -> Result<f64, HeatError> {
        response_weight(self.depth, self.diffusivity, t)
    }
}

/// `erfc(x_m / (2 sqrt(α t)))`, with the `t = 0` value taken as the limit.
pub fn response_weight(depth: f64, diffusivity: f64, t: f64) -> Result<f64, HeatError> {
    if t < 0.0 || t.is_nan() {
        return Err(HeatError::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(if depth > 0.0 { 0.0 } else { 1.0 });
    }
    Ok(erfc(depth / (2.0 * (diffusivity * t).sqrt())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactSolution {
    pub contact_temperature: f64,
}

/// Interface temperature for raw temperatures and effusivities.
pub fn contact_temperature_raw(
    sensor_temp: f64,
    sensor_effusivity: f64,
    object_temp: f64,
    object_effusivity: f64,
) -> f64 {
    let tc =
        (sensor_temp * sensor_effusivity + object_temp * object_effusivity) / (sensor_effusivity + object_effusivity);
    // rounding can step a hair outside the bracket
    tc.clamp(sensor_temp.min(object_temp), sensor_temp.max(object_temp))
}

/// The temperature the contact interface jumps to at `t = 0`.
pub fn contact_temperature(sensor: &BodyState, object: &BodyState) -> Result<ContactSolution, HeatError> {
    let es = check_effusivity(sensor.effusivity())?;
    let eo = check_effusivity(object.effusivity())?;
    Ok(ContactSolution {
        contact_temperature: contact_temperature_raw(sensor.temperature, es, object.temperature, eo),
    })
}

/// Temperature read by the sensing element `t` seconds after contact.
pub fn measured_temperature(sensor: &SensorSpec, object: &BodyState, t: f64) -> Result<f64, HeatError> {
    let tc = contact_temperature(&sensor.body, object)?.contact_temperature;
    let w = sensor.response_weight(t)?;
    let ts = sensor.temperature();
    Ok(ts + (tc - ts) * w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(e: f64, t: f64) -> BodyState {
        BodyState::new(ThermalMaterial::new("m", e).unwrap(), t).unwrap()
    }

    fn sensor(t: f64) -> SensorSpec {
        SensorSpec::with_defaults(body(892.0, t), true).unwrap()
    }

    #[test]
    fn effusivity_examples() {
        assert_eq!(effusivity_from_properties(1.0, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(effusivity_from_properties(4.0, 1.0, 1.0).unwrap(), 2.0);
        // 237 * 2700 * 897 = 573_990_300, whose square root is 23958.09...
        let al = effusivity_from_properties(237.0, 2700.0, 897.0).unwrap();
        assert!((al - 23958.09).abs() < 1.0, "{al}");
    }

    #[test]
    fn effusivity_rejects_non_positive() {
        assert!(matches!(
            effusivity_from_properties(0.0, 1.0, 1.0),
            Err(HeatError::NonPositiveProperty {
                name: "conductivity",
                ..
            })
        ));
        assert!(effusivity_from_properties(1.0, -2.0, 1.0).is_err());
        assert!(effusivity_from_properties(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn material_property_consistency() {
        let m = ThermalMaterial::from_properties("al", 237.0, 2700.0, 897.0).unwrap();
        m.validate().unwrap();
        let mut bad = m.clone();
        bad.effusivity *= 1.0 + 1e-6;
        assert!(matches!(bad.validate(), Err(HeatError::InconsistentProperties { .. })));
        assert!(ThermalMaterial::new("x", 0.0).is_err());
    }

    #[test]
    fn catalog_presets_and_uniqueness() {
        let c = MaterialCatalog::presets();
        assert_eq!(c.require(PINE_WOOD).unwrap().effusivity, 331.0);
        assert_eq!(c.require(ALUMINUM).unwrap().effusivity, 23664.0);
        assert_eq!(c.require(ROBOT_SENSOR).unwrap().effusivity, 892.0);
        assert_eq!(c.require(HUMAN_FINGER).unwrap().effusivity, 1450.0);
        let mut c2 = c.clone();
        assert!(matches!(
            c2.insert(ThermalMaterial::new(PINE_WOOD, 1.0).unwrap()),
            Err(HeatError::DuplicateMaterial(_))
        ));
        assert!(matches!(c.require("oak"), Err(HeatError::UnknownMaterial(_))));
    }

    #[test]
    fn catalog_json() {
        let c = MaterialCatalog::from_json_str(
            r#"[{"name": "glass", "effusivity": 1400},
                {"name": "al", "effusivity": 23958.0, "conductivity": 237, "density": 2700, "specific_heat": 897}]"#,
        );
        // 23958.0 is off from sqrt(λρc_p) by far more than the 1e-9 tolerance
        assert!(matches!(c, Err(HeatError::InconsistentProperties { .. })));
        let c = MaterialCatalog::from_json_str(r#"[{"name": "glass", "effusivity": 1400}]"#).unwrap();
        assert_eq!(c.entries().len(), 1);
        assert!(MaterialCatalog::from_json_str(r#"[{"name": "a", "effusivity": 1, "colour": 2}]"#).is_err());
        assert!(MaterialCatalog::from_json_str(r#"[{"name": "a", "effusivity": -1}]"#).is_err());
    }

    #[test]
    fn body_bounds() {
        assert!(BodyState::new(ThermalMaterial::new("m", 1.0).unwrap(), 250.0).is_err());
        assert!(BodyState::new(ThermalMaterial::new("m", 1.0).unwrap(), f64::NAN).is_err());
        let s = body(1.0, 20.0);
        assert!(SensorSpec::new(s.clone(), 0.0, 1e-3, false).is_err());
        assert!(SensorSpec::new(s.clone(), 1e-7, -1e-3, false).is_err());
        assert!(SensorSpec::new(s, 1e-7, 11e-3, false).is_err());
    }

    #[test]
    fn contact_temperature_examples() {
        let tc = |ts, es, to, eo| {
            contact_temperature(&body(es, ts), &body(eo, to))
                .unwrap()
                .contact_temperature
        };
        assert_eq!(tc(20.0, 892.0, 20.0, 331.0), 20.0);
        assert_eq!(tc(30.0, 500.0, 10.0, 500.0), 20.0);
        // (29.5 * 892 + 22.5 * 23664) / 24556 = 558754 / 24556
        let expected = 558_754.0 / 24_556.0;
        assert!((tc(29.5, 892.0, 22.5, 23664.0) - expected).abs() < 1e-12);
        assert!((expected - 22.754).abs() < 1e-3);
    }

    #[test]
    fn measured_temperature_limits() {
        let s = sensor(29.5);
        let o = body(331.0, 22.5);
        let tc = contact_temperature(&s.body, &o).unwrap().contact_temperature;
        assert_eq!(measured_temperature(&s, &o, 0.0).unwrap(), 29.5);
        let mut flush = s.clone();
        flush.depth = 0.0;
        assert_eq!(measured_temperature(&flush, &o, 1.0).unwrap(), tc);
        assert_eq!(measured_temperature(&flush, &o, 0.0).unwrap(), tc);
        let late = measured_temperature(&s, &o, 1e9).unwrap();
        assert!((late - tc).abs() < 1e-3);
        assert!(matches!(
            measured_temperature(&s, &o, -1.0),
            Err(HeatError::NegativeTime(_))
        ));
    }

    #[test]
    fn effusivity_dominance() {
        let s = body(1.0, 35.0);
        let o = body(1e6, 5.0);
        let tc = contact_temperature(&s, &o).unwrap().contact_temperature;
        assert!((tc - 5.0).abs() < 1e-3 * 30.0);
    }
}
