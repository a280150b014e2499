//! Simulated active and passive traces through the thermistor, ADC and
//! Butterworth chain, written as CSV.
//!
//! `cargo run --example signal_chain [out_dir]`

use std::path::PathBuf;

use thermoscope::heatcore::{ALUMINUM, ROBOT_SENSOR};
use thermoscope::sensorsim::{write_trace_csv, Butterworth2};
use thermoscope::{
    detect_contact, simulate_double_condition, BodyState, MaterialCatalog, NonIdealityConfig, SensorSpec,
    SignalChainConfig, TraceConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/signal_chain".into()));
    std::fs::create_dir_all(&out)?;

    let chain = SignalChainConfig::default();
    for t in [5.0, 22.5, 29.5, 40.0] {
        println!(
            "{t:>5.1} °C: R = {:.0} Ω, code {}, step {:.4} °C",
            chain.resistance(t),
            chain.code(t)?,
            chain.step_width(t)?
        );
    }

    let fs = 50.0;
    let filter = Butterworth2::new(chain.filter_cutoff, fs)?;
    let (b, a) = filter.coefficients();
    let gain = |f: f64| {
        let w = 2.0 * std::f64::consts::PI * f / fs;
        let z = |k: f64| (-(k * w)).sin_cos();
        let (num_im, num_re) = [(0.0, b[0]), (1.0, b[1]), (2.0, b[2])]
            .iter()
            .fold((0.0, 0.0), |(im, re), &(k, c)| {
                let (s, co) = z(k);
                (im + c * s, re + c * co)
            });
        let (s1, c1) = z(1.0);
        let (s2, c2) = z(2.0);
        let den = (c1 * a[0] + c2 * a[1] + 1.0, s1 * a[0] + s2 * a[1]);
        (num_re.hypot(num_im)) / den.0.hypot(den.1)
    };
    println!(
        "filter gain: DC {:.6}, cutoff {:.4}",
        gain(0.0),
        gain(chain.filter_cutoff)
    );

    let catalog = MaterialCatalog::presets();
    let sensor = SensorSpec::with_defaults(BodyState::new(catalog.require(ROBOT_SENSOR)?.clone(), 29.5)?, true)?;
    let object = BodyState::new(catalog.require(ALUMINUM)?.clone(), 22.5)?;
    let cfg = TraceConfig {
        seed: 7,
        ..TraceConfig::new(sensor, object)
    };
    let (active, passive) = simulate_double_condition(&cfg, 22.5, &NonIdealityConfig::default(), Some(&chain))?;
    let detected = detect_contact(&active, NonIdealityConfig::default().noise_sigma)?;
    println!(
        "{} samples, true contact {:?}, detected {detected}, final active {:.3} °C, passive {:.3} °C",
        active.len(),
        active.contact_index,
        active.temperatures.last().unwrap(),
        passive.temperatures.last().unwrap()
    );
    write_trace_csv(&active, out.join("active.csv"))?;
    write_trace_csv(&passive, out.join("passive.csv"))?;
    println!("wrote {}", out.display());
    Ok(())
}
