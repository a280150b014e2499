//! Reference implementations used only by the tests. They are written from
//! the closed-form physics, without calling into the library numerics.

#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thermoscope::{SensorId, TemperatureTrace};

/// erfc from the all-positive Maclaurin-type series
/// erf(x) = 2/√π · e^(−x²) · Σ 2ⁿ x^(2n+1) / (1·3·…·(2n+1)).
pub fn erfc_series(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc_series(-x);
    }
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0u32;
    loop {
        n += 1;
        term *= 2.0 * x2 / (2 * n + 1) as f64;
        sum += term;
        if term < sum * 1e-18 || n > 10_000 {
            break;
        }
    }
    let erf = 2.0 / std::f64::consts::PI.sqrt() * (-x2).exp() * sum;
    1.0 - erf
}

pub fn contact_oracle(ts: f64, es: f64, to: f64, eo: f64) -> f64 {
    (ts * es + to * eo) / (es + eo)
}

pub fn measured_oracle(ts: f64, tc: f64, depth: f64, alpha: f64, t: f64) -> f64 {
    if t == 0.0 {
        return ts;
    }
    ts + (tc - ts) * erfc_series(depth / (2.0 * (alpha * t).sqrt()))
}

/// Object-2 temperature whose contact temperature matches object 1, by bisection.
pub fn ambiguous_bisection(ts: f64, es: f64, to1: f64, eo1: f64, eo2: f64) -> f64 {
    let target = contact_oracle(ts, es, to1, eo1);
    let f = |t: f64| contact_oracle(ts, es, t, eo2) - target;
    let (mut lo, mut hi) = (-1.0e4, 1.0e4);
    assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Heated-sensor trace at 50 Hz: a 1 s ramp at 0.5 °C/s up to the sensor
/// temperature, then the buried-sensor response for 5 s, plus seeded
/// Gaussian noise.
pub fn generated_trace(ts: f64, es: f64, to: f64, eo: f64, sigma: f64, seed: u64) -> TemperatureTrace {
    let dt = 1.0 / 50.0;
    let tc = contact_oracle(ts, es, to, eo);
    let mut temps: Vec<f64> = (0..50).map(|i| ts - 0.5 * (50 - i) as f64 * dt).collect();
    temps.extend((0..=250).map(|j| measured_oracle(ts, tc, 0.5e-3, 1e-7, j as f64 * dt)));
    if sigma > 0.0 {
        let normal = Normal::new(0.0, sigma).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in &mut temps {
            *t += normal.sample(&mut rng);
        }
    }
    let times = (0..temps.len()).map(|i| i as f64 * dt).collect();
    let mut trace = TemperatureTrace::new(times, temps, SensorId::Active).unwrap();
    trace.contact_index = Some(50);
    trace
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
