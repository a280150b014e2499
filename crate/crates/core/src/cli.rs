//! The `thermoscope` command line.
//!
//! Every subcommand prints exactly one JSON document on stdout and sends
//! diagnostics to stderr. Exit status is 0 on success, 2 for invalid input or
//! configuration, and 3 for numerical failures (including a proof sweep with
//! violations).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::ambiguity::{
    ambiguous_object_temperature, proof_sweep_in, verify_ambiguity, AmbiguityError, AmbiguityQuery, SweepDomain,
};
use crate::classify::{extract_features, predict, train_linear_svm_standardized, ClassifyError, Study};
use crate::estimation::{
    fit_effusivity_with, optimize_deviation_threshold, EstimationError, FitOptions, FitReport, TrialRecord,
    WarmingCorrection,
};
use crate::heatcore::{BodyState, HeatError, SensorSpec, ThermalMaterial};
use crate::scenario::{ScenarioError, ScenarioFile};
use crate::sensorsim::{read_trace_csv, simulate_double_condition, synthesize_trace, write_trace_csv, SimError};
use crate::studylab::{
    cold_prep_trials, epsilon_histogram, generate_study_dataset, run_study_with, study_examples, tune_ambiguous_target,
    with_jobs, write_dataset, write_study_outputs, ColdPrepConfig, StudyError, TuneOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable that overrides the base seed.
pub const SEED_ENV: &str = "THERMOSCOPE_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "thermoscope",
    version,
    about = "Contact heat transfer, thermal ambiguity and material recognition"
)]
pub struct Cli {
    /// Worker threads for parallel stages; output does not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Temperature at which a second material is indistinguishable from the first.
    Predict(PredictArgs),
    /// Random sweep certifying that two sensors at different temperatures are never both fooled.
    VerifyProof(VerifyProofArgs),
    /// Simulate a trace (or an active/passive pair) to CSV.
    Simulate(SimulateArgs),
    /// Fit the object effusivity to a trace CSV.
    Fit(FitArgs),
    /// Classify a touch as wood or metal with a model trained on the study dataset.
    Classify(ClassifyArgs),
    /// Generate the study dataset and run one study end to end.
    Study(StudyArgs),
    /// Pick the cold-wood temperature whose trace best matches ambient metal.
    TuneTarget(TuneArgs),
    /// Histogram of finger-temperature deviations, optionally with the γ search.
    Histogram(HistogramArgs),
}

#[derive(Debug, Args)]
pub struct ScenarioArg {
    /// Scenario JSON; built-in defaults when omitted.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
}

impl ScenarioArg {
    fn load(&self) -> Result<ScenarioFile, CliError> {
        match &self.scenario {
            Some(p) => Ok(ScenarioFile::load(p)?),
            None => Ok(ScenarioFile::default()),
        }
    }
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub scenario: ScenarioArg,
    /// Material of object 1 (catalog name).
    #[arg(long)]
    pub object1: String,
    /// Temperature of object 1, °C; defaults to the scenario ambient.
    #[arg(long)]
    pub object1_temp: Option<f64>,
    /// Effusivity of object 2.
    #[arg(long, conflicts_with = "target")]
    pub target_effusivity: Option<f64>,
    /// Material of object 2 (catalog name).
    #[arg(long)]
    pub target: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyProofArgs {
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// preconditions, equal-sensor-effusivity or exploratory.
    #[arg(long, default_value = "preconditions")]
    pub domain: String,
    /// Report file; the report also goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArg,
    /// Object by index or material name.
    #[arg(long, default_value = "0")]
    pub object: String,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also simulate an unheated sensor at ambient.
    #[arg(long)]
    pub double: bool,
    /// Active trace CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Passive trace CSV (with --double).
    #[arg(long)]
    pub passive_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub scenario: ScenarioArg,
    #[arg(long)]
    pub trace: PathBuf,
    /// Sensor as `EFFUSIVITY,TEMPERATURE`; the scenario sensor when omitted.
    #[arg(long)]
    pub sensor: Option<String>,
    /// Object temperature, °C; defaults to the scenario ambient.
    #[arg(long)]
    pub object_temp: Option<f64>,
    /// `LO,HI`.
    #[arg(long, default_value = "50,50000")]
    pub bounds: String,
    /// Noise level for contact detection, °C.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub scenario: ScenarioArg,
    #[arg(long)]
    pub active: PathBuf,
    #[arg(long)]
    pub passive: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub study: u32,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[command(flatten)]
    pub scenario: ScenarioArg,
    #[arg(long)]
    pub study: u32,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// γ for the cold-prep histogram, °C.
    #[arg(long, default_value_t = 3.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.5)]
    pub bin_width: f64,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub scenario: ScenarioArg,
    /// Candidate spacing, °C.
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    /// Candidate range `LO,HI`; around the ideal prediction when omitted.
    #[arg(long)]
    pub range: Option<String>,
    /// Warming line `SLOPE,INTERCEPT` from refrigerator setting to touched temperature.
    #[arg(long)]
    pub warming: Option<String>,
    /// Transport delay the warming line was measured for, s.
    #[arg(long, default_value_t = 5.0)]
    pub delay: f64,
    /// Simulate without approach convection or contact lag.
    #[arg(long)]
    pub ideal: bool,
}

#[derive(Debug, Args)]
pub struct HistogramArgs {
    /// JSON array of trial records.
    #[arg(long)]
    pub trials: PathBuf,
    /// γ, °C; found by grid search around --center when omitted.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Planned finger temperature for the γ search, °C.
    #[arg(long)]
    pub center: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub bin_width: f64,
    #[arg(long, default_value_t = 0.5)]
    pub grid_step: f64,
    #[arg(long, default_value_t = 10.0)]
    pub gamma_max: f64,
    /// Histogram CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numerical(m) => m,
        }
    }
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::NoContact { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<HeatError> for CliError {
    fn from(e: HeatError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<AmbiguityError> for CliError {
    fn from(e: AmbiguityError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<EstimationError> for CliError {
    fn from(e: EstimationError) -> Self {
        match e {
            EstimationError::Sim(s) => s.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Sim(s) => s.into(),
            ClassifyError::NoContact | ClassifyError::SingleClass => CliError::Numerical(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<StudyError> for CliError {
    fn from(e: StudyError) -> Self {
        match e {
            StudyError::Sim(s) => s.into(),
            StudyError::Classify(c) => c.into(),
            StudyError::Estimation(x) => x.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// status. Output goes to the given writers.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    let env_seed = match std::env::var(SEED_ENV) {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(s) => Some(s),
            Err(_) => {
                let _ = writeln!(stderr, "error: {SEED_ENV} must be an unsigned integer, got {v:?}");
                return EXIT_INPUT;
            }
        },
        Err(_) => None,
    };
    let jobs = cli.jobs;
    let mut warnings = Vec::new();
    let outcome = with_jobs(jobs, || execute(cli.command, env_seed, &mut warnings))
        .map_err(CliError::from)
        .and_then(|r| r);
    for w in warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    match outcome {
        Ok((doc, code)) => {
            let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&doc).expect("json"));
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

/// Entry point for the binary.
pub fn main_with_args(args: impl IntoIterator<Item = OsString>) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Flag beats environment beats scenario.
fn pick_seed(flag: Option<u64>, env: Option<u64>, scenario: u64) -> u64 {
    flag.or(env).unwrap_or(scenario)
}

fn parse_pair(text: &str, what: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(input(format!(
            "{what} must be two comma-separated numbers, got {text:?}"
        )));
    }
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| input(format!("{what}: {s:?} is not a number")))
    };
    Ok((num(parts[0])?, num(parts[1])?))
}

fn execute(command: Command, env_seed: Option<u64>, warnings: &mut Vec<String>) -> Result<(Value, i32), CliError> {
    match command {
        Command::Predict(a) => cmd_predict(a),
        Command::VerifyProof(a) => cmd_verify_proof(a, env_seed),
        Command::Simulate(a) => cmd_simulate(a, env_seed),
        Command::Fit(a) => cmd_fit(a),
        Command::Classify(a) => cmd_classify(a, env_seed),
        Command::Study(a) => cmd_study(a, env_seed),
        Command::TuneTarget(a) => cmd_tune(a, warnings),
        Command::Histogram(a) => cmd_histogram(a),
    }
}

fn cmd_predict(a: PredictArgs) -> Result<(Value, i32), CliError> {
    let scenario = a.scenario.load()?;
    let sensor = scenario.sensor_spec()?;
    let t1 = a.object1_temp.unwrap_or(scenario.trace.ambient_temperature);
    let object1 = BodyState::new(scenario.material(&a.object1)?, t1)?;
    let target_effusivity = match (&a.target, a.target_effusivity) {
        (Some(name), None) => scenario.material(name)?.effusivity,
        (None, Some(e)) => e,
        _ => return Err(input("give exactly one of --target and --target-effusivity")),
    };
    let t2 = ambiguous_object_temperature(&AmbiguityQuery {
        sensor: sensor.body.clone(),
        object1: object1.clone(),
        target_effusivity,
    })?;
    if !t2.is_finite() {
        return Err(CliError::Numerical(format!(
            "ambiguous temperature is not finite ({t2})"
        )));
    }
    // Residual of the ideal traces over [0, 5] s, when object 2 is physical.
    let residual = ThermalMaterial::new("object 2", target_effusivity)
        .and_then(|m| BodyState::new(m, t2))
        .ok()
        .map(|object2| verify_ambiguity(&sensor, &object1, &object2, 5.0, 1000))
        .transpose()?;
    Ok((
        json!({
            "sensor_temperature": sensor.temperature(),
            "sensor_effusivity": sensor.effusivity(),
            "object1": a.object1,
            "object1_temperature": t1,
            "object1_effusivity": object1.effusivity(),
            "target_effusivity": target_effusivity,
            "ambiguous_temperature": t2,
            "verification_residual": residual,
        }),
        EXIT_OK,
    ))
}

fn cmd_verify_proof(a: VerifyProofArgs, env_seed: Option<u64>) -> Result<(Value, i32), CliError> {
    let domain: SweepDomain = serde_json::from_value(Value::String(a.domain.clone()))
        .map_err(|_| input(format!("unknown domain {:?}", a.domain)))?;
    let seed = pick_seed(a.seed, env_seed, 0);
    let report = proof_sweep_in(domain, a.samples, seed);
    let doc = serde_json::to_value(&report).expect("report serializes");
    if let Some(path) = &a.out {
        std::fs::write(path, serde_json::to_string_pretty(&report).expect("json") + "\n")?;
    }
    let code = if report.passed() { EXIT_OK } else { EXIT_NUMERICAL };
    Ok((doc, code))
}

fn cmd_simulate(a: SimulateArgs, env_seed: Option<u64>) -> Result<(Value, i32), CliError> {
    let scenario = a.scenario.load()?;
    let object = scenario.object(&a.object)?;
    let mut cfg = scenario.trace_config(object)?;
    cfg.seed = pick_seed(a.seed, env_seed, cfg.seed);
    let nonideal = scenario.nonideal();
    if a.double {
        let passive_out = a
            .passive_out
            .as_ref()
            .ok_or_else(|| input("--double needs --passive-out"))?;
        let (active, passive) =
            simulate_double_condition(&cfg, cfg.ambient_temperature, &nonideal, scenario.chain.as_ref())?;
        write_trace_csv(&active, &a.out)?;
        write_trace_csv(&passive, passive_out)?;
        Ok((
            json!({
                "samples": active.len(),
                "contact_index": active.contact_index,
                "seed": cfg.seed,
                "active": a.out,
                "passive": passive_out,
            }),
            EXIT_OK,
        ))
    } else {
        let mut trace = synthesize_trace(&cfg, &nonideal)?;
        if let Some(chain) = &scenario.chain {
            trace.temperatures = crate::sensorsim::apply_signal_chain(&trace.temperatures, chain, cfg.sample_rate)?;
        }
        write_trace_csv(&trace, &a.out)?;
        Ok((
            json!({
                "samples": trace.len(),
                "contact_index": trace.contact_index,
                "seed": cfg.seed,
                "object": cfg.object.material.name,
                "object_temperature": cfg.object.temperature,
                "active": a.out,
            }),
            EXIT_OK,
        ))
    }
}

fn cmd_fit(a: FitArgs) -> Result<(Value, i32), CliError> {
    let scenario = a.scenario.load()?;
    let bounds = parse_pair(&a.bounds, "--bounds")?;
    if !(bounds.0 > 0.0 && bounds.1 > bounds.0) {
        return Err(input(format!("--bounds must satisfy 0 < lo < hi, got {}", a.bounds)));
    }
    let sensor = match &a.sensor {
        Some(text) => {
            let (e, t) = parse_pair(text, "--sensor")?;
            let base = scenario.sensor_spec()?;
            let body = BodyState::new(ThermalMaterial::new("sensor", e)?, t)?;
            SensorSpec::new(body, base.diffusivity, base.depth, base.heated)?
        }
        None => scenario.sensor_spec()?,
    };
    let trace = read_trace_csv(&a.trace)?;
    let object_temp = a.object_temp.unwrap_or(scenario.trace.ambient_temperature);
    let opts = FitOptions {
        noise_floor: a.noise,
        ..FitOptions::default()
    };
    let fit = fit_effusivity_with(&trace, &sensor, object_temp, bounds, &opts)?;
    Ok((serde_json::to_value(FitReport::from(&fit)).expect("json"), EXIT_OK))
}

fn cmd_classify(a: ClassifyArgs, env_seed: Option<u64>) -> Result<(Value, i32), CliError> {
    let scenario = a.scenario.load()?;
    let study = Study::from_id(a.study)?;
    let mut cfg = scenario.dataset_config();
    cfg.base_seed = pick_seed(a.seed, env_seed, cfg.base_seed);
    let opts = scenario.study_options();
    let dataset = generate_study_dataset(&cfg)?;
    let mut examples = study_examples(study, &dataset, &opts.features)?;
    if !study.trains_on_cold_wood() {
        examples.retain(|e| e.material_condition != crate::classify::MaterialCondition::ColdWood);
    }
    let model = train_linear_svm_standardized(&examples, &opts.svm)?;

    let active = read_trace_csv(&a.active)?;
    let passive = a.passive.as_deref().map(read_trace_csv).transpose()?;
    let features = crate::classify::FeatureConfig {
        include_passive: study.uses_passive(),
        noise_floor: opts.features.noise_floor.max(cfg.nonideal.noise_sigma),
        ..opts.features.clone()
    };
    let x = extract_features(&active, passive.as_ref(), &features)?;
    let (label, margin) = predict(&model, &x)?;
    Ok((
        json!({
            "study": study.id(),
            "label": label,
            "margin": margin,
            "training_examples": examples.len(),
            "dataset_hash": dataset.manifest.hash(),
        }),
        EXIT_OK,
    ))
}

fn cmd_study(a: StudyArgs, env_seed: Option<u64>) -> Result<(Value, i32), CliError> {
    let scenario = a.scenario.load()?;
    Study::from_id(a.study)?;
    let mut cfg = scenario.dataset_config();
    cfg.base_seed = pick_seed(a.seed, env_seed, cfg.base_seed);
    let dataset = generate_study_dataset(&cfg)?;
    let report = run_study_with(a.study, &dataset, &scenario.study_options())?;
    let histogram = epsilon_histogram(&cold_prep_trials(&dataset), a.gamma, a.bin_width).ok();
    write_dataset(&dataset, &a.out)?;
    write_study_outputs(&a.out, &report, histogram.as_ref())?;
    Ok((
        json!({
            "study": report.study,
            "traces": dataset.n_traces(),
            "accuracy": report.accuracy,
            "ambient_wood_accuracy": report.ambient_wood_accuracy,
            "metal_accuracy": report.metal_accuracy,
            "cold_wood_accuracy": report.cold_wood_accuracy,
            "cold_wood_as_metal": report.cold_wood_as_metal,
            "folds": report.folds.len(),
            "fingerprint": report.fingerprint,
            "manifest_hash": dataset.manifest.hash(),
            "out": a.out,
        }),
        EXIT_OK,
    ))
}

fn cmd_tune(a: TuneArgs, warnings: &mut Vec<String>) -> Result<(Value, i32), CliError> {
    let scenario = a.scenario.load()?;
    let cfg = scenario.dataset_config();
    let base = cfg.trace_config(cfg.metal_state()?, 0)?;
    let range = a.range.as_deref().map(|r| parse_pair(r, "--range")).transpose()?;
    let prep = a
        .warming
        .as_deref()
        .map(|w| {
            parse_pair(w, "--warming").map(|(slope, intercept)| ColdPrepConfig {
                warming: WarmingCorrection { slope, intercept },
                delay: a.delay,
            })
        })
        .transpose()?;
    let opts = TuneOptions {
        nonideal: if a.ideal {
            crate::sensorsim::NonIdealityConfig::IDEAL
        } else {
            cfg.nonideal.noiseless()
        },
        range,
        prep,
        ..TuneOptions::default()
    };
    let result = tune_ambiguous_target(&base, &cfg.wood, a.step, &opts)?;
    if result.boundary {
        warnings.push(format!("best candidate {} is on the edge of the grid", result.target));
    }
    Ok((serde_json::to_value(&result).expect("json"), EXIT_OK))
}

fn read_trials(path: &Path) -> Result<Vec<TrialRecord>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
    let trials: Vec<TrialRecord> =
        serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    for t in &trials {
        t.validate()?;
    }
    Ok(trials)
}

fn cmd_histogram(a: HistogramArgs) -> Result<(Value, i32), CliError> {
    let trials = read_trials(&a.trials)?;
    let search = match (a.gamma, a.center) {
        (Some(_), _) => None,
        (None, Some(center)) => Some(optimize_deviation_threshold(&trials, center, a.grid_step, a.gamma_max)?),
        (None, None) => return Err(input("give --gamma, or --center to search for it")),
    };
    let gamma = a.gamma.or(search.as_ref().map(|s| s.gamma)).expect("gamma set");
    let hist = epsilon_histogram(&trials, gamma, a.bin_width)?;
    if let Some(out) = &a.out {
        std::fs::write(out, hist.to_csv())?;
    }
    Ok((json!({ "histogram": hist, "threshold_search": search }), EXIT_OK))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["thermoscope"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn predict_equal_effusivity() {
        let (code, out, _) = run_capture(&["predict", "--object1", "pine wood", "--target-effusivity", "331"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["ambiguous_temperature"].as_f64().unwrap() - 22.5).abs() < 1e-12);
    }

    #[test]
    fn predict_needs_a_target() {
        let (code, _, err) = run_capture(&["predict", "--object1", "pine wood"]);
        assert_eq!(code, 2);
        assert!(err.contains("--target"));
    }

    #[test]
    fn verify_proof_empty() {
        let (code, out, _) = run_capture(&["verify-proof", "--samples", "0"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["n_samples"], 0);
        assert_eq!(v["violations"], 0);
    }

    #[test]
    fn bad_flag_is_input_error() {
        let (code, _, _) = run_capture(&["study", "--study", "1"]);
        assert_eq!(code, 2);
        let (code, _, _) = run_capture(&["frobnicate"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn seed_precedence() {
        assert_eq!(pick_seed(Some(1), Some(2), 3), 1);
        assert_eq!(pick_seed(None, Some(2), 3), 2);
        assert_eq!(pick_seed(None, None, 3), 3);
    }
}
