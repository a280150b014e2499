//! Recovers object effusivity from simulated heated-sensor traces.
//!
//! Run with `cargo run --release --example fit_effusivity`.

use thermoscope::estimation::{fit_effusivity, DEFAULT_EFFUSIVITY_BOUNDS};
use thermoscope::{synthesize_trace, BodyState, NonIdealityConfig, SensorSpec, ThermalMaterial, TraceConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let body = BodyState::new(ThermalMaterial::new("robot sensor", 892.0)?, 29.5)?;
    let sensor = SensorSpec::with_defaults(body, true)?;

    for truth in [331.0, 892.0, 23664.0] {
        let object = BodyState::new(ThermalMaterial::new("object", truth)?, 22.5)?;
        let cfg = TraceConfig::new(sensor.clone(), object);
        let clean = synthesize_trace(&cfg, &NonIdealityConfig::IDEAL)?;
        let fit = fit_effusivity(&clean, &sensor, 22.5, DEFAULT_EFFUSIVITY_BOUNDS)?;

        let noisy = NonIdealityConfig {
            noise_sigma: 0.05,
            ..NonIdealityConfig::IDEAL
        };
        let mut errors = Vec::new();
        for seed in 0..20 {
            let trace = synthesize_trace(&TraceConfig { seed, ..cfg.clone() }, &noisy)?;
            let f = fit_effusivity(&trace, &sensor, 22.5, DEFAULT_EFFUSIVITY_BOUNDS)?;
            errors.push((f.estimate - truth).abs() / truth);
        }
        errors.sort_by(f64::total_cmp);
        println!(
            "e = {truth:>7}: noiseless {:.3} ({} iterations), noisy median error {:.2}% (max {:.2}%)",
            fit.estimate,
            fit.iterations,
            100.0 * (errors[9] + errors[10]) / 2.0,
            100.0 * errors[19]
        );
    }
    Ok(())
}
