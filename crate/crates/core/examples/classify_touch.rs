//! Feature extraction and a linear SVM on a freshly generated dataset, then
//! classification of a new cold-wood touch with and without the passive sensor.
//!
//! `cargo run --release --example classify_touch`

use thermoscope::classify::{
    extract_features, lobo_cv, predict, train_linear_svm_standardized, FeatureConfig, MaterialCondition, Study,
    SvmParams,
};
use thermoscope::studylab::{generate_study_dataset, study_examples, StudyDatasetConfig};
use thermoscope::{simulate_double_condition, BodyState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = StudyDatasetConfig {
        n_sets: 10,
        ..StudyDatasetConfig::default()
    };
    let dataset = generate_study_dataset(&cfg)?;
    let params = SvmParams::default();

    let cold_wood = BodyState::new(cfg.wood.clone(), cfg.predicted_cold_target())?;
    let cold = cfg.trace_config(cold_wood, 99)?;
    let (active, passive) = simulate_double_condition(&cold, cfg.ambient_temp, &cfg.nonideal, cfg.chain.as_ref())?;

    for study in [Study::AmbientOnly, Study::DoubleCondition] {
        let mut examples = study_examples(study, &dataset, &FeatureConfig::default())?;
        let cv = lobo_cv(&examples, study, &params)?;
        if !study.trains_on_cold_wood() {
            examples.retain(|e| e.material_condition != MaterialCondition::ColdWood);
        }
        let model = train_linear_svm_standardized(&examples, &params)?;
        let features = FeatureConfig {
            include_passive: study.uses_passive(),
            noise_floor: cfg.nonideal.noise_sigma,
            ..FeatureConfig::default()
        };
        let x = extract_features(&active, Some(&passive), &features)?;
        let (label, margin) = predict(&model, &x)?;
        println!(
            "study {}: {} features, CV accuracy {:.3}, cold wood as metal {:.3}; new cold touch -> {} (margin {margin:+.3})",
            study.id(),
            x.len(),
            cv.aggregate.accuracy(),
            cv.aggregate.rate(MaterialCondition::ColdWood, thermoscope::classify::Label::Metal),
            label.as_str()
        );
    }
    Ok(())
}
