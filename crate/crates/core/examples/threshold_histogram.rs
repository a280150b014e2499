//! Grid search for the finger-temperature deviation threshold and the
//! deviation histogram, on a small synthetic set of human trials.
//!
//! `cargo run --example threshold_histogram`

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thermoscope::classify::{Label, MaterialCondition};
use thermoscope::estimation::{optimize_deviation_threshold, TrialRecord};
use thermoscope::studylab::epsilon_histogram;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let planned: f64 = 32.0;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // Near the planned temperature the metal and the cold wood feel alike.
    let trials: Vec<TrialRecord> = (0..120)
        .map(|_| {
            let finger = planned + rng.gen_range(-6.0..6.0);
            let fooled = (finger - planned).abs() < 3.0 || rng.gen_bool(0.1);
            let cold_wood = if fooled { Label::Metal } else { Label::Wood };
            let answers = BTreeMap::from([
                (MaterialCondition::AmbientMetal, Label::Metal),
                (MaterialCondition::ColdWood, cold_wood),
                (MaterialCondition::AmbientWood, Label::Wood),
            ]);
            TrialRecord::new(finger, planned, answers)
        })
        .collect();

    let search = optimize_deviation_threshold(&trials, planned, 0.5, 6.0)?;
    println!(
        "gamma = {:.1} °C: p_mm = {:.3}, p_w = {:.3}",
        search.gamma, search.p_mm, search.p_w
    );

    let hist = epsilon_histogram(&trials, search.gamma, 1.0)?;
    for bin in &hist.bins {
        let mark = if bin.in_range { '*' } else { ' ' };
        println!("{:>6.1} .. {:>5.1} {mark} {}", bin.lo, bin.hi, "#".repeat(bin.count));
    }
    println!(
        "negative {}, zero {}, positive {}",
        hist.n_negative, hist.n_zero, hist.n_positive
    );
    Ok(())
}
