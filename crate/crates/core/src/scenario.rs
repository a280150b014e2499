//! JSON scenario files read by the command line.
//!
//! Every section is optional and unknown keys are rejected. Materials are
//! referred to by name and looked up in the catalog, which is either inline,
//! a path relative to the scenario file, or the built-in presets.
//!
//! ```json
//! {
//!   "sensor": { "material": "robot sensor", "temperature": 29.5 },
//!   "objects": [ { "material": "aluminum", "temperature": 22.5 } ],
//!   "trace": { "t_max": 5.0, "seed": 7 },
//!   "nonideal": { "noise_sigma": 0.02, "approach_conv_coeff": 0.05, "contact_lag": 0.2 }
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::heatcore::{
    BodyState, HeatError, MaterialCatalog, SensorSpec, ThermalMaterial, ALUMINUM, DEFAULT_DEPTH, DEFAULT_DIFFUSIVITY,
    PINE_WOOD, ROBOT_SENSOR,
};
use crate::sensorsim::{NonIdealityConfig, SignalChainConfig, SimError, TraceConfig, DEFAULT_SAMPLE_RATE};
use crate::studylab::{StudyDatasetConfig, StudyOptions};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("scenario schema error: {0}")]
    Schema(#[from] serde_json::Error),
    #[error(transparent)]
    Heat(#[from] HeatError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("scenario has no object {0}")]
    MissingObject(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CatalogSection {
    File(PathBuf),
    Inline(MaterialCatalog),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorSection {
    pub material: String,
    pub temperature: f64,
    #[serde(default = "default_diffusivity")]
    pub diffusivity: f64,
    #[serde(default = "default_depth")]
    pub depth: f64,
    #[serde(default = "default_heated")]
    pub heated: bool,
}

fn default_diffusivity() -> f64 {
    DEFAULT_DIFFUSIVITY
}
fn default_depth() -> f64 {
    DEFAULT_DEPTH
}
fn default_heated() -> bool {
    true
}

impl Default for SensorSection {
    fn default() -> Self {
        Self {
            material: ROBOT_SENSOR.into(),
            temperature: 29.5,
            diffusivity: DEFAULT_DIFFUSIVITY,
            depth: DEFAULT_DEPTH,
            heated: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSection {
    pub material: String,
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceSection {
    pub t_max: f64,
    pub sample_rate: f64,
    pub pre_contact_duration: f64,
    pub heating_rate: f64,
    pub ambient_temperature: f64,
    pub seed: u64,
}

impl Default for TraceSection {
    fn default() -> Self {
        Self {
            t_max: 5.0,
            sample_rate: DEFAULT_SAMPLE_RATE,
            pre_contact_duration: 1.0,
            heating_rate: 0.5,
            ambient_temperature: 22.5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub catalog: Option<CatalogSection>,
    #[serde(default)]
    pub sensor: SensorSection,
    #[serde(default)]
    pub objects: Vec<ObjectSection>,
    #[serde(default)]
    pub trace: TraceSection,
    /// Ideal when absent.
    #[serde(default)]
    pub nonideal: Option<NonIdealityConfig>,
    #[serde(default)]
    pub chain: Option<SignalChainConfig>,
    #[serde(default)]
    pub study: Option<StudyDatasetConfig>,
    #[serde(default)]
    pub study_options: Option<StudyOptions>,
    /// Directory relative catalog paths resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl ScenarioFile {
    pub fn from_json_str(text: &str) -> Result<Self, ScenarioError> {
        let scenario: Self = serde_json::from_str(text)?;
        scenario.catalog()?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut scenario: Self = serde_json::from_str(&text)?;
        scenario.base_dir = path.parent().map(Path::to_path_buf);
        scenario.catalog()?;
        Ok(scenario)
    }

    pub fn catalog(&self) -> Result<MaterialCatalog, ScenarioError> {
        match &self.catalog {
            None => Ok(MaterialCatalog::presets()),
            Some(CatalogSection::Inline(c)) => {
                MaterialCatalog::new(c.entries().to_vec())?;
                Ok(c.clone())
            }
            Some(CatalogSection::File(p)) => {
                let path = match &self.base_dir {
                    Some(dir) if p.is_relative() => dir.join(p),
                    _ => p.clone(),
                };
                Ok(MaterialCatalog::load(path)?)
            }
        }
    }

    pub fn material(&self, name: &str) -> Result<ThermalMaterial, ScenarioError> {
        Ok(self.catalog()?.require(name)?.clone())
    }

    pub fn sensor_spec(&self) -> Result<SensorSpec, ScenarioError> {
        let s = &self.sensor;
        let body = BodyState::new(self.material(&s.material)?, s.temperature)?;
        Ok(SensorSpec::new(body, s.diffusivity, s.depth, s.heated)?)
    }

    /// Declared objects, or ambient aluminum and ambient pine when none are.
    pub fn objects(&self) -> Result<Vec<BodyState>, ScenarioError> {
        if self.objects.is_empty() {
            let ambient = self.trace.ambient_temperature;
            return Ok(vec![
                BodyState::new(self.material(ALUMINUM)?, ambient)?,
                BodyState::new(self.material(PINE_WOOD)?, ambient)?,
            ]);
        }
        self.objects
            .iter()
            .map(|o| Ok(BodyState::new(self.material(&o.material)?, o.temperature)?))
            .collect()
    }

    /// Object by position or material name.
    pub fn object(&self, key: &str) -> Result<BodyState, ScenarioError> {
        let objects = self.objects()?;
        if let Ok(i) = key.parse::<usize>() {
            return objects
                .get(i)
                .cloned()
                .ok_or_else(|| ScenarioError::MissingObject(key.into()));
        }
        objects
            .into_iter()
            .find(|o| o.material.name == key)
            .ok_or_else(|| ScenarioError::MissingObject(key.into()))
    }

    pub fn nonideal(&self) -> NonIdealityConfig {
        self.nonideal.unwrap_or(NonIdealityConfig::IDEAL)
    }

    pub fn trace_config(&self, object: BodyState) -> Result<TraceConfig, ScenarioError> {
        let t = &self.trace;
        let cfg = TraceConfig {
            sensor: self.sensor_spec()?,
            object,
            t_max: t.t_max,
            sample_rate: t.sample_rate,
            pre_contact_duration: t.pre_contact_duration,
            heating_rate: t.heating_rate,
            ambient_temperature: t.ambient_temperature,
            seed: t.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn dataset_config(&self) -> StudyDatasetConfig {
        self.study.clone().unwrap_or_default()
    }

    pub fn study_options(&self) -> StudyOptions {
        self.study_options.clone().unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_default() {
        let s = ScenarioFile::from_json_str("{}").unwrap();
        assert_eq!(s.sensor_spec().unwrap().temperature(), 29.5);
        assert_eq!(s.objects().unwrap().len(), 2);
        assert_eq!(s.nonideal(), NonIdealityConfig::IDEAL);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            ScenarioFile::from_json_str(r#"{"sensr": {}}"#),
            Err(ScenarioError::Schema(_))
        ));
        assert!(ScenarioFile::from_json_str(r#"{"trace": {"tmax": 5}}"#).is_err());
        assert!(ScenarioFile::from_json_str(r#"{"nonideal": {"noise_sigma": 0.1}}"#).is_err());
    }

    #[test]
    fn inline_catalog_and_lookup() {
        let s = ScenarioFile::from_json_str(
            r#"{
                "catalog": [{"name": "oak", "effusivity": 500}, {"name": "skin", "effusivity": 1200}],
                "sensor": {"material": "skin", "temperature": 33},
                "objects": [{"material": "oak", "temperature": 20}]
            }"#,
        )
        .unwrap();
        assert_eq!(s.object("oak").unwrap().effusivity(), 500.0);
        assert_eq!(s.object("0").unwrap().temperature, 20.0);
        assert!(matches!(s.object("pine"), Err(ScenarioError::MissingObject(_))));
        assert_eq!(s.sensor_spec().unwrap().effusivity(), 1200.0);
    }

    #[test]
    fn partial_sections_take_defaults() {
        let s = ScenarioFile::from_json_str(
            r#"{"study": {"n_sets": 4}, "study_options": {"svm": {"epochs": 5}}, "chain": {"adc_bits": 10}}"#,
        )
        .unwrap();
        let cfg = s.dataset_config();
        assert_eq!((cfg.n_sets, cfg.trials_per_set), (4, 3));
        assert_eq!(s.study_options().svm.epochs, 5);
        assert_eq!(s.chain.unwrap().adc_bits, 10);
    }

    #[test]
    fn unknown_material() {
        let s = ScenarioFile::from_json_str(r#"{"sensor": {"material": "glass", "temperature": 30}}"#).unwrap();
        assert!(s.sensor_spec().is_err());
    }
}
