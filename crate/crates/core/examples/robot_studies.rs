//! Replays the three robot studies on the default and noiseless datasets.
//!
//! Run with `cargo run --release --example robot_studies`.

use std::time::Instant;

use thermoscope::studylab::{generate_study_dataset, run_study, StudyDatasetConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (name, cfg) in [
        ("default", StudyDatasetConfig::default()),
        ("noiseless", StudyDatasetConfig::noiseless()),
    ] {
        let start = Instant::now();
        let dataset = generate_study_dataset(&cfg)?;
        println!(
            "{name}: {} traces, cold target {:.3} °C ({:.2} s)",
            dataset.n_traces(),
            dataset.manifest.cold_target,
            start.elapsed().as_secs_f64()
        );
        for study in 1..=3 {
            let r = run_study(study, &dataset)?;
            println!(
                "  study {study}: accuracy {:.3}  wood {:.3}  metal {:.3}  cold wood {:.3} (as metal {:.3})  {:.2} s",
                r.accuracy,
                r.ambient_wood_accuracy,
                r.metal_accuracy,
                r.cold_wood_accuracy,
                r.cold_wood_as_metal,
                r.runtime_s
            );
        }
    }
    Ok(())
}
