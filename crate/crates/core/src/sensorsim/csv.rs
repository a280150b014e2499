//! Trace CSV: header `time_s,temperature_c,sensor_id`, one row per sample,
//! numbers rendered like C's `%.9g`.

use std::fmt::Write as _;
use std::path::Path;

use super::{SensorId, SimError, TemperatureTrace};

const HEADER: &str = "time_s,temperature_c,sensor_id";
const SIGNIFICANT: i32 = 9;

/// Renders `x` with 9 significant digits in `%g` style: fixed notation for
/// decimal exponents in `[-4, 9)`, scientific otherwise, trailing zeros
/// removed.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // Round first so the exponent reflects carries such as 9.99999999995 -> 10.
    let sci = format!("{:.*e}", (SIGNIFICANT - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIGNIFICANT).contains(&exp) {
        let decimals = (SIGNIFICANT - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let mantissa = trim_zeros(mantissa.to_owned());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

pub fn trace_to_csv(trace: &TemperatureTrace) -> String {
    let mut out = String::with_capacity(32 * (trace.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    let id = trace.sensor_id.as_str();
    for (t, y) in trace.times.iter().zip(&trace.temperatures) {
        let _ = writeln!(out, "{},{},{id}", format_sig9(*t), format_sig9(*y));
    }
    out
}

pub fn write_trace_csv(trace: &TemperatureTrace, path: impl AsRef<Path>) -> Result<(), SimError> {
    let path = path.as_ref();
    std::fs::write(path, trace_to_csv(trace)).map_err(|e| SimError::Format(format!("{}: {e}", path.display())))
}

pub fn parse_trace_csv(text: &str) -> Result<TemperatureTrace, SimError> {
    let mut lines = text.lines();
    match lines.next().map(str::trim) {
        Some(HEADER) => {}
        Some(other) => return Err(SimError::Format(format!("expected header {HEADER:?}, found {other:?}"))),
        None => return Err(SimError::Format("empty file".into())),
    }
    let mut times = Vec::new();
    let mut temps = Vec::new();
    let mut sensor: Option<SensorId> = None;
    for (n, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = n + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(SimError::Format(format!("line {row}: expected 3 fields")));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| SimError::Format(format!("line {row}: {s:?}: {e}")))
        };
        times.push(num(fields[0])?);
        temps.push(num(fields[1])?);
        let id = SensorId::parse(fields[2])
            .ok_or_else(|| SimError::Format(format!("line {row}: unknown sensor id {:?}", fields[2])))?;
        match sensor {
            None => sensor = Some(id),
            Some(s) if s != id => return Err(SimError::Format(format!("line {row}: mixed sensor ids"))),
            _ => {}
        }
    }
    let sensor = sensor.ok_or_else(|| SimError::Format("no samples".into()))?;
    TemperatureTrace::new(times, temps, sensor)
}

pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<TemperatureTrace, SimError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| SimError::Format(format!("{}: {e}", path.display())))?;
    parse_trace_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_matches_printf_g() {
        // Expected strings produced with printf("%.9g").
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (0.02, "0.02"),
            (22.754_315_678_9, "22.7543157"),
            (-3.25, "-3.25"),
            (123_456_789.4, "123456789"),
            (1_234_567_890.0, "1.23456789e+09"),
            (0.000_123_456_789_12, "0.000123456789"),
            (0.000_012_345_678_912, "1.23456789e-05"),
            (9.999_999_999_5, "10"),
            (5.0e-10, "5e-10"),
        ];
        for (x, want) in cases {
            assert_eq!(format_sig9(x), want, "{x}");
        }
    }

    #[test]
    fn header_required() {
        assert!(matches!(parse_trace_csv("0,1,active\n"), Err(SimError::Format(_))));
        assert!(matches!(parse_trace_csv(""), Err(SimError::Format(_))));
        assert!(parse_trace_csv("time_s,temperature_c,sensor_id\n0,1,other\n").is_err());
    }

    #[test]
    fn exact_layout() {
        let tr = TemperatureTrace::new(vec![0.0, 0.02], vec![29.5, 29.499_999_999_9], SensorId::Active).unwrap();
        assert_eq!(
            trace_to_csv(&tr),
            "time_s,temperature_c,sensor_id\n0,29.5,active\n0.02,29.5,active\n"
        );
    }
}
