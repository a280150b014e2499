//! Random sweep showing that a heated and an unheated sensor are never fooled
//! by the same object temperature.
//!
//! `cargo run --release --example proof_sweep [samples] [seed]`

use thermoscope::ambiguity::{proof_sweep_in, SweepDomain};

fn main() {
    let mut args = std::env::args().skip(1);
    let samples = args.next().and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    for domain in [
        SweepDomain::Preconditions,
        SweepDomain::EqualSensorEffusivity,
        SweepDomain::Exploratory,
    ] {
        let r = proof_sweep_in(domain, samples, seed);
        println!(
            "{:<22} samples {:>6}  violations {}  min gap {:.3e}  negative expressions {}\n  {}",
            format!("{domain:?}"),
            r.n_samples,
            r.violations,
            r.min_gap.unwrap_or(f64::NAN),
            r.negative_expressions,
            r.domain_description
        );
    }
}
