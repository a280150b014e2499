//! Drives the command line front end in-process from a scenario file.
//!
//! `cargo run --example scenario_cli`

use thermoscope::cli;

const SCENARIO: &str = r#"{
  "catalog": [
    {"name": "robot sensor", "effusivity": 892},
    {"name": "oak", "effusivity": 520},
    {"name": "steel", "effusivity": 7800}
  ],
  "sensor": {"material": "robot sensor", "temperature": 31.0},
  "objects": [{"material": "steel", "temperature": 21.0}],
  "trace": {"ambient_temperature": 21.0, "seed": 5},
  "nonideal": {"noise_sigma": 0.02, "approach_conv_coeff": 0.0, "contact_lag": 0.0}
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("thermoscope_scenario_cli");
    std::fs::create_dir_all(&dir)?;
    let scenario = dir.join("scenario.json");
    std::fs::write(&scenario, SCENARIO)?;
    let trace = dir.join("steel.csv");
    let s = scenario.to_str().unwrap();
    let t = trace.to_str().unwrap();

    let commands: [&[&str]; 3] = [
        &["predict", "--scenario", s, "--object1", "oak", "--target", "steel"],
        &["simulate", "--scenario", s, "--object", "steel", "--out", t],
        &[
            "fit",
            "--scenario",
            s,
            "--trace",
            t,
            "--object-temp",
            "21",
            "--noise",
            "0.02",
        ],
    ];
    for args in commands {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = cli::run(
            std::iter::once("thermoscope").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        println!(
            "$ thermoscope {}\nexit {code}\n{}",
            args.join(" "),
            String::from_utf8_lossy(&out)
        );
        if !err.is_empty() {
            eprintln!("{}", String::from_utf8_lossy(&err));
        }
    }
    Ok(())
}
