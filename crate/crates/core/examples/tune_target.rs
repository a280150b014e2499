//! Choosing the cold-wood temperature whose trace is closest to ambient metal,
//! first under the ideal model and then with approach convection and contact
//! lag, and converting it to a refrigerator setting.
//!
//! `cargo run --release --example tune_target`

use thermoscope::estimation::fit_warming_correction;
use thermoscope::sensorsim::NonIdealityConfig;
use thermoscope::studylab::{tune_ambiguous_target, ColdPrepConfig, StudyDatasetConfig, TuneOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = StudyDatasetConfig::default();
    let base = cfg.trace_config(cfg.metal_state()?, 0)?;
    println!("predicted by the ideal model: {:.3} °C", cfg.predicted_cold_target());

    let ideal = TuneOptions {
        nonideal: NonIdealityConfig::IDEAL,
        ..TuneOptions::default()
    };
    let r = tune_ambiguous_target(&base, &cfg.wood, 0.5, &ideal)?;
    println!("ideal traces, 0.5 °C grid: {:.1} °C (gap {:.4})", r.target, r.gap);

    let realistic = TuneOptions {
        nonideal: cfg.nonideal.noiseless(),
        ..TuneOptions::default()
    };
    let r = tune_ambiguous_target(&base, &cfg.wood, 0.5, &realistic)?;
    println!("with convection and lag:     {:.1} °C (gap {:.4})", r.target, r.gap);

    // Warming between refrigerator and contact, measured at a few settings.
    let warming = fit_warming_correction(&[(0.0, 2.1), (2.0, 3.9), (4.0, 5.8), (6.0, 7.5)])?;
    let prep = ColdPrepConfig::robot(warming);
    let opts = TuneOptions {
        prep: Some(prep),
        ..realistic
    };
    let r = tune_ambiguous_target(&base, &cfg.wood, 0.5, &opts)?;
    println!(
        "warming {:.3}·x + {:.3}: set the refrigerator to {:.2} °C",
        warming.slope,
        warming.intercept,
        r.fridge_setting.unwrap_or(f64::NAN)
    );
    Ok(())
}
