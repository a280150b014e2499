//! Thermistor, voltage divider, ADC and low-pass filter.
//!
//! The NTC thermistor sits on the supply side of the divider and the
//! reference resistor on the ground side, so the ADC reads
//! `V = supply * R_ref / (R_ref + R(T))` and the voltage rises with
//! temperature.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::SimError;

const KELVIN: f64 = 273.15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SignalChainConfig {
    /// Thermistor resistance at `reference_temp`, Ω.
    pub r0: f64,
    /// °C.
    pub reference_temp: f64,
    /// K.
    pub beta: f64,
    /// Ω.
    pub r_ref: f64,
    /// V.
    pub supply: f64,
    pub adc_bits: u32,
    /// Hz.
    pub filter_cutoff: f64,
}

impl Default for SignalChainConfig {
    fn default() -> Self {
        Self {
            r0: 10_000.0,
            reference_temp: 25.0,
            beta: 3977.0,
            r_ref: 10_000.0,
            supply: 3.3,
            adc_bits: 12,
            filter_cutoff: 10.0,
        }
    }
}

impl SignalChainConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [
            ("r0", self.r0),
            ("beta", self.beta),
            ("r_ref", self.r_ref),
            ("supply", self.supply),
            ("filter_cutoff", self.filter_cutoff),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(SimError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.reference_temp + KELVIN > 0.0) {
            return Err(SimError::InvalidConfig(
                "reference temperature below absolute zero".into(),
            ));
        }
        if !(8..=16).contains(&self.adc_bits) {
            return Err(SimError::InvalidConfig(format!(
                "adc_bits must lie in [8, 16], got {}",
                self.adc_bits
            )));
        }
        Ok(())
    }

    fn full_scale(&self) -> f64 {
        ((1u32 << self.adc_bits) - 1) as f64
    }

    /// Beta-model resistance at `temp` °C.
    pub fn resistance(&self, temp: f64) -> f64 {
        let tk = temp + KELVIN;
        let t0 = self.reference_temp + KELVIN;
        self.r0 * (self.beta * (1.0 / tk - 1.0 / t0)).exp()
    }

    pub fn temperature_from_resistance(&self, r: f64) -> f64 {
        let t0 = self.reference_temp + KELVIN;
        1.0 / (1.0 / t0 + (r / self.r0).ln() / self.beta) - KELVIN
    }

    pub fn divider_voltage(&self, temp: f64) -> f64 {
        self.supply * self.r_ref / (self.r_ref + self.resistance(temp))
    }

    /// ADC code for `temp`; halfway values round away from zero.
    pub fn code(&self, temp: f64) -> Result<u32, SimError> {
        if !temp.is_finite() || temp + KELVIN <= 0.0 {
            return Err(SimError::OutOfRange(temp));
        }
        let raw = (self.divider_voltage(temp) / self.supply * self.full_scale()).round();
        let code = raw.clamp(0.0, self.full_scale());
        // The rails have no finite inverse.
        if code <= 0.0 || code >= self.full_scale() {
            return Err(SimError::OutOfRange(temp));
        }
        Ok(code as u32)
    }

    pub fn temperature_from_code(&self, code: u32) -> f64 {
        let ratio = code as f64 / self.full_scale();
        let r = self.r_ref * (1.0 / ratio - 1.0);
        self.temperature_from_resistance(r)
    }

    /// Temperature span of the ADC code `temp` falls in, °C.
    pub fn step_width(&self, temp: f64) -> Result<f64, SimError> {
        let code = self.code(temp)?;
        let lo = self.temperature_from_code(code.saturating_sub(1).max(1));
        let hi = self.temperature_from_code((code + 1).min(self.full_scale() as u32 - 1));
        Ok((hi - lo).abs() / 2.0)
    }
}

/// Second-order Butterworth low-pass, bilinear transform with prewarping,
/// transposed direct form II.
#[derive(Debug, Clone, PartialEq)]
pub struct Butterworth2 {
    b: [f64; 3],
    a: [f64; 2],
    z: [f64; 2],
}

impl Butterworth2 {
    pub fn new(cutoff: f64, sample_rate: f64) -> Result<Self, SimError> {
        if !(cutoff > 0.0) || !(sample_rate > 2.0 * cutoff) {
            return Err(SimError::InvalidConfig(format!(
                "sample rate {sample_rate} Hz must exceed twice the cutoff {cutoff} Hz"
            )));
        }
        let k = (PI * cutoff / sample_rate).tan();
        let k2 = k * k;
        let norm = 1.0 / (1.0 + SQRT_2 * k + k2);
        let b0 = k2 * norm;
        Ok(Self {
            b: [b0, 2.0 * b0, b0],
            a: [2.0 * (k2 - 1.0) * norm, (1.0 - SQRT_2 * k + k2) * norm],
            z: [0.0, 0.0],
        })
    }

    /// Puts the filter in the steady state for a constant input `x`.
    pub fn settle(&mut self, x: f64) {
        self.z[1] = (self.b[2] - self.a[1]) * x;
        self.z[0] = (1.0 - self.b[0]) * x;
    }

    pub fn step(&mut self, x: f64) -> f64 {
        let y = self.b[0] * x + self.z[0];
        self.z[0] = self.b[1] * x - self.a[0] * y + self.z[1];
        self.z[1] = self.b[2] * x - self.a[1] * y;
        y
    }

    pub fn coefficients(&self) -> ([f64; 3], [f64; 2]) {
        (self.b, self.a)
    }
}

/// Quantizes each temperature through the divider and ADC, maps it back to
/// °C, then low-pass filters the result forward in time.
pub fn apply_signal_chain(true_temps: &[f64], cfg: &SignalChainConfig, sample_rate: f64) -> Result<Vec<f64>, SimError> {
    cfg.validate()?;
    let mut filter = Butterworth2::new(cfg.filter_cutoff, sample_rate)?;
    let quantized = quantize(true_temps, cfg)?;
    let Some(&first) = quantized.first() else {
        return Ok(Vec::new());
    };
    filter.settle(first);
    Ok(quantized.into_iter().map(|x| filter.step(x)).collect())
}

/// Divider and ADC round trip without the filter.
pub fn quantize(true_temps: &[f64], cfg: &SignalChainConfig) -> Result<Vec<f64>, SimError> {
    true_temps
        .iter()
        .map(|&t| cfg.code(t).map(|c| cfg.temperature_from_code(c)))
        .collect()
}
