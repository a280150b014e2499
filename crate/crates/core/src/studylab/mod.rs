//! End-to-end replications of the robot studies.
//!
//! [`generate_study_dataset`] produces the 30 sets × 3 trials × 3 material
//! conditions × 2 sensors regimen; [`run_study`] turns it into features and
//! runs leave-one-block-out cross validation for one of the three studies.
//! [`tune_ambiguous_target`] picks the cold-wood temperature whose trace best
//! matches ambient metal, and [`epsilon_histogram`] bins finger-temperature
//! deviations.

mod histogram;
mod output;
mod tune;

use std::collections::BTreeMap;
use std::time::Instant;

use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ambiguity::ambiguous_temperature_raw;
use crate::classify::{
    extract_features, lobo_cv, ClassifyError, ConfusionMatrix, FeatureConfig, FoldResult, LabeledExample,
    MaterialCondition, Study, SvmParams,
};
use crate::estimation::{EstimationError, TrialRecord};
use crate::heatcore::{BodyState, HeatError, SensorSpec, ThermalMaterial, ALUMINUM, PINE_WOOD, ROBOT_SENSOR};
use crate::seed;
use crate::sensorsim::{
    simulate_double_condition, NonIdealityConfig, SignalChainConfig, SimError, TemperatureTrace, TraceConfig,
};

pub use self::histogram::{epsilon_histogram, EpsilonHistogram, HistogramBin};
pub use self::output::{write_dataset, write_study_outputs};
pub use self::tune::{tune_ambiguous_target, ColdPrepConfig, TuneOptions, TuneResult};

#[derive(Debug, Error)]
pub enum StudyError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown study {0}; expected 1, 2 or 3")]
    UnknownStudy(u32),
    #[error("bad block structure: {0}")]
    BadBlockStructure(String),
    #[error("no trials")]
    EmptyTrials,
    #[error(transparent)]
    Classify(ClassifyError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Heat(#[from] HeatError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl From<ClassifyError> for StudyError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::UnknownStudy(id) => StudyError::UnknownStudy(id),
            ClassifyError::BadBlockStructure(msg) => StudyError::BadBlockStructure(msg),
            other => StudyError::Classify(other),
        }
    }
}

/// Where the cold-wood blocks are cooled to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum ColdTarget {
    /// The temperature at which ideal wood and metal traces coincide.
    Predicted,
    /// The temperature chosen by [`tune_ambiguous_target`] under the
    /// configured non-idealities.
    Tuned,
    /// A fixed touched temperature, °C.
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyDatasetConfig {
    pub n_sets: usize,
    pub trials_per_set: usize,
    pub ambient_temp: f64,
    /// Heated sensor temperature at contact, °C.
    pub sensor_temp: f64,
    pub sensor_material: ThermalMaterial,
    pub wood: ThermalMaterial,
    pub metal: ThermalMaterial,
    pub cold_target: ColdTarget,
    /// Standard deviation of the per-touch cold-wood temperature, °C.
    pub cold_jitter: f64,
    pub nonideal: NonIdealityConfig,
    pub chain: Option<SignalChainConfig>,
    pub t_max: f64,
    pub sample_rate: f64,
    pub pre_contact_duration: f64,
    pub heating_rate: f64,
    pub base_seed: u64,
}

impl Default for StudyDatasetConfig {
    fn default() -> Self {
        let m = |name: &str, e: f64| ThermalMaterial::new(name, e).expect("preset");
        Self {
            n_sets: 30,
            trials_per_set: 3,
            ambient_temp: 22.5,
            sensor_temp: 29.5,
            sensor_material: m(ROBOT_SENSOR, 892.0),
            wood: m(PINE_WOOD, 331.0),
            metal: m(ALUMINUM, 23664.0),
            cold_target: ColdTarget::Predicted,
            cold_jitter: 0.3,
            nonideal: NonIdealityConfig::default(),
            chain: Some(SignalChainConfig::default()),
            t_max: 5.0,
            sample_rate: 50.0,
            pre_contact_duration: 1.0,
            heating_rate: 0.5,
            base_seed: 0,
        }
    }
}

impl StudyDatasetConfig {
    /// No sensor noise, no cold-wood jitter and no signal chain; approach
    /// convection and contact lag stay on.
    pub fn noiseless() -> Self {
        let d = Self::default();
        Self {
            nonideal: d.nonideal.noiseless(),
            cold_jitter: 0.0,
            chain: None,
            ..d
        }
    }

    pub fn validate(&self) -> Result<(), StudyError> {
        let bad = |msg: String| Err(StudyError::InvalidConfig(msg));
        if self.n_sets == 0 || self.trials_per_set == 0 {
            return bad("n_sets and trials_per_set must be positive".into());
        }
        if !(self.sensor_temp > self.ambient_temp) {
            return bad(format!(
                "heated sensor temperature {} must exceed ambient {}",
                self.sensor_temp, self.ambient_temp
            ));
        }
        if !(self.cold_jitter >= 0.0) || !self.cold_jitter.is_finite() {
            return bad(format!("cold_jitter must be >= 0, got {}", self.cold_jitter));
        }
        if let ColdTarget::Fixed(t) = self.cold_target {
            if !t.is_finite() {
                return bad("cold target must be finite".into());
            }
        }
        for m in [&self.sensor_material, &self.wood, &self.metal] {
            m.validate()?;
        }
        self.nonideal.validate()?;
        if let Some(chain) = &self.chain {
            chain.validate()?;
        }
        self.trace_config(self.metal_state()?, 0)?.validate()?;
        Ok(())
    }

    pub fn n_touches(&self) -> usize {
        self.n_sets * self.trials_per_set * MaterialCondition::ALL.len()
    }

    pub fn n_traces(&self) -> usize {
        2 * self.n_touches()
    }

    pub fn sensor(&self) -> Result<SensorSpec, StudyError> {
        let body = BodyState::new(self.sensor_material.clone(), self.sensor_temp)?;
        Ok(SensorSpec::with_defaults(body, true)?)
    }

    pub fn metal_state(&self) -> Result<BodyState, StudyError> {
        Ok(BodyState::new(self.metal.clone(), self.ambient_temp)?)
    }

    pub fn trace_config(&self, object: BodyState, seed: u64) -> Result<TraceConfig, StudyError> {
        let mut cfg = TraceConfig::new(self.sensor()?, object);
        cfg.t_max = self.t_max;
        cfg.sample_rate = self.sample_rate;
        cfg.pre_contact_duration = self.pre_contact_duration;
        cfg.heating_rate = self.heating_rate;
        cfg.ambient_temperature = self.ambient_temp;
        cfg.seed = seed;
        Ok(cfg)
    }

    /// Ideal-model cold-wood temperature matching ambient metal.
    pub fn predicted_cold_target(&self) -> f64 {
        ambiguous_temperature_raw(
            self.sensor_temp,
            self.sensor_material.effusivity,
            self.ambient_temp,
            self.metal.effusivity,
            self.wood.effusivity,
        )
    }

    /// Touched cold-wood temperature the dataset is built around.
    pub fn resolve_cold_target(&self) -> Result<f64, StudyError> {
        match self.cold_target {
            ColdTarget::Predicted => Ok(self.predicted_cold_target()),
            ColdTarget::Fixed(t) => Ok(t),
            ColdTarget::Tuned => {
                let opts = TuneOptions {
                    nonideal: self.nonideal.noiseless(),
                    ..TuneOptions::default()
                };
                let base = self.trace_config(self.metal_state()?, 0)?;
                Ok(tune_ambiguous_target(&base, &self.wood, 0.1, &opts)?.target)
            }
        }
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        hex_digest(serde_json::to_string(self).expect("config serializes").as_bytes())
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Bookkeeping for one touch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub set: usize,
    pub trial: usize,
    pub condition: MaterialCondition,
    pub block_id: String,
    /// Position of this touch in its set's randomized presentation order.
    pub presentation: usize,
    pub object_temperature: f64,
    pub seed: u64,
    pub active_file: String,
    pub passive_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: StudyDatasetConfig,
    pub config_hash: String,
    pub cold_target: f64,
    pub n_traces: usize,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn hash(&self) -> String {
        hex_digest(self.to_json().as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Touch {
    pub entry: ManifestEntry,
    pub active: TemperatureTrace,
    pub passive: TemperatureTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyDataset {
    pub manifest: Manifest,
    pub touches: Vec<Touch>,
}

impl StudyDataset {
    pub fn n_traces(&self) -> usize {
        2 * self.touches.len()
    }

    /// Traces (active and passive) recorded for `condition`.
    pub fn count(&self, condition: MaterialCondition) -> usize {
        2 * self.touches.iter().filter(|t| t.entry.condition == condition).count()
    }
}

/// Generates every touch of the regimen.
///
/// Block ids cycle with the trial index, so with three trials per set each
/// block is touched once per set. Every touch draws from a seed derived from
/// `(base_seed, set, trial, condition)`, which makes the output independent
/// of thread count.
pub fn generate_study_dataset(cfg: &StudyDatasetConfig) -> Result<StudyDataset, StudyError> {
    cfg.validate()?;
    let cold_target = cfg.resolve_cold_target()?;
    let conditions = MaterialCondition::ALL;
    let per_set = cfg.trials_per_set * conditions.len();

    let mut plan = Vec::with_capacity(cfg.n_touches());
    for set in 0..cfg.n_sets {
        let mut order: Vec<usize> = (0..per_set).collect();
        rand::seq::SliceRandom::shuffle(
            order.as_mut_slice(),
            &mut seed::rng(seed::derive(cfg.base_seed, &[set as u64, u64::MAX])),
        );
        for trial in 0..cfg.trials_per_set {
            for (c, &condition) in conditions.iter().enumerate() {
                let slot = trial * conditions.len() + c;
                plan.push((set, trial, condition, order[slot]));
            }
        }
    }

    let touches: Vec<Touch> = plan
        .into_par_iter()
        .map(|(set, trial, condition, presentation)| make_touch(cfg, cold_target, set, trial, condition, presentation))
        .collect::<Result<_, _>>()?;

    let manifest = Manifest {
        config: cfg.clone(),
        config_hash: cfg.hash(),
        cold_target,
        n_traces: 2 * touches.len(),
        entries: touches.iter().map(|t| t.entry.clone()).collect(),
    };
    Ok(StudyDataset { manifest, touches })
}

fn make_touch(
    cfg: &StudyDatasetConfig,
    cold_target: f64,
    set: usize,
    trial: usize,
    condition: MaterialCondition,
    presentation: usize,
) -> Result<Touch, StudyError> {
    let touch_seed = seed::derive(cfg.base_seed, &[set as u64, trial as u64, condition as u64]);
    let object = match condition {
        MaterialCondition::AmbientWood => BodyState::new(cfg.wood.clone(), cfg.ambient_temp)?,
        MaterialCondition::AmbientMetal => cfg.metal_state()?,
        MaterialCondition::ColdWood => {
            let mut temp = cold_target;
            if cfg.cold_jitter > 0.0 {
                let normal = Normal::new(0.0, cfg.cold_jitter).map_err(|e| StudyError::InvalidConfig(e.to_string()))?;
                temp += normal.sample(&mut seed::rng(seed::derive(touch_seed, &[u64::MAX])));
            }
            BodyState::new(cfg.wood.clone(), temp)?
        }
    };
    let object_temperature = object.temperature;
    let block_id = condition.block_id(trial % 3);
    let tcfg = cfg.trace_config(object, touch_seed)?;
    let (mut active, mut passive) =
        simulate_double_condition(&tcfg, cfg.ambient_temp, &cfg.nonideal, cfg.chain.as_ref())?;
    for tr in [&mut active, &mut passive] {
        tr.block_id = Some(block_id.clone());
        tr.material = Some(condition.as_str().to_string());
    }
    let stem = format!("set{:02}_trial{}_{}", set + 1, trial + 1, block_id);
    Ok(Touch {
        entry: ManifestEntry {
            set,
            trial,
            condition,
            block_id,
            presentation,
            object_temperature,
            seed: touch_seed,
            active_file: format!("traces/{stem}_active.csv"),
            passive_file: format!("traces/{stem}_passive.csv"),
        },
        active,
        passive,
    })
}

/// Feature layout and classifier settings for a study run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyOptions {
    pub features: FeatureConfig,
    pub svm: SvmParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub seed: u64,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub study: Study,
    pub folds: Vec<FoldResult>,
    pub aggregate: ConfusionMatrix,
    pub accuracy: f64,
    pub cold_wood_as_metal: f64,
    pub cold_wood_accuracy: f64,
    pub ambient_wood_accuracy: f64,
    pub metal_accuracy: f64,
    pub fingerprint: Fingerprint,
    pub runtime_s: f64,
}

/// Builds per-touch examples for `study`.
pub fn study_examples(
    study: Study,
    dataset: &StudyDataset,
    features: &FeatureConfig,
) -> Result<Vec<LabeledExample>, StudyError> {
    let cfg = FeatureConfig {
        include_passive: study.uses_passive(),
        noise_floor: features.noise_floor.max(dataset.manifest.config.nonideal.noise_sigma),
        ..features.clone()
    };
    dataset
        .touches
        .par_iter()
        .map(|t| {
            let x = extract_features(&t.active, Some(&t.passive), &cfg)?;
            Ok(LabeledExample::new(
                x,
                t.entry.condition.label(),
                t.entry.block_id.clone(),
                t.entry.condition,
            )?)
        })
        .collect()
}

pub fn run_study(study_id: u32, dataset: &StudyDataset) -> Result<StudyReport, StudyError> {
    run_study_with(study_id, dataset, &StudyOptions::default())
}

pub fn run_study_with(study_id: u32, dataset: &StudyDataset, opts: &StudyOptions) -> Result<StudyReport, StudyError> {
    let start = Instant::now();
    let study = Study::from_id(study_id)?;
    let examples = study_examples(study, dataset, &opts.features)?;
    let result = lobo_cv(&examples, study, &opts.svm)?;
    let agg = &result.aggregate;
    let options_json = serde_json::to_string(opts)?;
    let config_hash =
        hex_digest(format!("{}|{}|{}", dataset.manifest.config_hash, options_json, study.id()).as_bytes());
    Ok(StudyReport {
        study,
        accuracy: agg.accuracy(),
        cold_wood_as_metal: agg.rate(MaterialCondition::ColdWood, crate::classify::Label::Metal),
        cold_wood_accuracy: agg.condition_accuracy(MaterialCondition::ColdWood),
        ambient_wood_accuracy: agg.condition_accuracy(MaterialCondition::AmbientWood),
        metal_accuracy: agg.condition_accuracy(MaterialCondition::AmbientMetal),
        aggregate: result.aggregate,
        folds: result.folds,
        fingerprint: Fingerprint {
            seed: dataset.manifest.config.base_seed,
            config_hash,
        },
        runtime_s: start.elapsed().as_secs_f64(),
    })
}

/// One record per cold-wood touch with ε = target − touched temperature, the
/// robot-side counterpart of a finger deviating from its planned temperature.
pub fn cold_prep_trials(dataset: &StudyDataset) -> Vec<TrialRecord> {
    dataset
        .touches
        .iter()
        .filter(|t| t.entry.condition == MaterialCondition::ColdWood)
        .map(|t| {
            TrialRecord::new(
                t.entry.object_temperature,
                dataset.manifest.cold_target,
                BTreeMap::new(),
            )
        })
        .collect()
}

/// Runs `f` on a pool of `jobs` workers, or on the global pool for `None`.
pub fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, StudyError> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(StudyError::InvalidConfig("--jobs must be >= 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| StudyError::InvalidConfig(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}
