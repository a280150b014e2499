use serde::{Deserialize, Serialize};

use super::StudyError;
use crate::estimation::TrialRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// The bin center lies within `[-γ, γ]`.
    pub in_range: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonHistogram {
    pub gamma: f64,
    pub bin_width: f64,
    pub bins: Vec<HistogramBin>,
    pub n_negative: usize,
    pub n_zero: usize,
    pub n_positive: usize,
}

impl EpsilonHistogram {
    pub fn total(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }

    /// `bin_lo,bin_hi,count,in_range`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,count,in_range\n");
        for b in &self.bins {
            out.push_str(&format!("{},{},{},{}\n", b.lo, b.hi, b.count, b.in_range));
        }
        out
    }
}

/// Bins ε = intended − measured finger temperature.
///
/// Bins are `bin_width` wide and centered on multiples of it, so zero sits
/// in the middle of the central bin and the layout is symmetric about 0.
pub fn epsilon_histogram(trials: &[TrialRecord], gamma: f64, bin_width: f64) -> Result<EpsilonHistogram, StudyError> {
    if trials.is_empty() {
        return Err(StudyError::EmptyTrials);
    }
    if !(bin_width > 0.0) || !bin_width.is_finite() {
        return Err(StudyError::InvalidConfig(format!(
            "bin width must be > 0, got {bin_width}"
        )));
    }
    if !(gamma >= 0.0) {
        return Err(StudyError::InvalidConfig(format!("gamma must be >= 0, got {gamma}")));
    }
    let index = |eps: f64| (eps / bin_width + 0.5).floor() as i64;
    let mut keys = Vec::with_capacity(trials.len());
    for t in trials {
        if !t.epsilon.is_finite() {
            return Err(StudyError::InvalidConfig("non-finite epsilon".into()));
        }
        keys.push(index(t.epsilon));
    }
    let (kmin, kmax) = keys
        .iter()
        .fold((i64::MAX, i64::MIN), |(a, b), &k| (a.min(k), b.max(k)));
    // Symmetric span so the central bin stays in the middle.
    let reach = kmin.abs().max(kmax.abs());
    let mut bins: Vec<HistogramBin> = (-reach..=reach)
        .map(|k| {
            let center = k as f64 * bin_width;
            HistogramBin {
                lo: center - 0.5 * bin_width,
                hi: center + 0.5 * bin_width,
                count: 0,
                in_range: center.abs() <= gamma + 1e-12,
            }
        })
        .collect();
    for k in keys {
        bins[(k + reach) as usize].count += 1;
    }
    Ok(EpsilonHistogram {
        gamma,
        bin_width,
        bins,
        n_negative: trials.iter().filter(|t| t.epsilon < 0.0).count(),
        n_zero: trials.iter().filter(|t| t.epsilon == 0.0).count(),
        n_positive: trials.iter().filter(|t| t.epsilon > 0.0).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn trial(eps: f64) -> TrialRecord {
        TrialRecord::new(30.0 - eps, 30.0, BTreeMap::new())
    }

    #[test]
    fn single_zero() {
        let h = epsilon_histogram(&[trial(0.0)], 3.5, 0.5).unwrap();
        assert_eq!(h.bins.len(), 1);
        assert_eq!(h.bins[0].count, 1);
        assert!(h.bins[0].in_range);
        assert_eq!((h.bins[0].lo, h.bins[0].hi), (-0.25, 0.25));
    }

    #[test]
    fn outside_gamma() {
        let h = epsilon_histogram(&[trial(4.0), trial(-4.0), trial(0.2)], 3.5, 0.5).unwrap();
        assert_eq!(h.total(), 3);
        for b in &h.bins {
            if b.count > 0 && (b.lo + b.hi).abs() > 1.0 {
                assert!(!b.in_range);
            }
        }
        assert_eq!(h.bins.first().unwrap().count, 1);
        assert_eq!(h.bins.last().unwrap().count, 1);
    }

    #[test]
    fn empty_and_bad_width() {
        assert!(matches!(epsilon_histogram(&[], 3.5, 0.5), Err(StudyError::EmptyTrials)));
        assert!(epsilon_histogram(&[trial(0.0)], 3.5, 0.0).is_err());
    }

    #[test]
    fn csv_layout() {
        let h = epsilon_histogram(&[trial(0.0), trial(0.6)], 0.0, 0.5).unwrap();
        let csv = h.to_csv();
        assert_eq!(csv.lines().next(), Some("bin_lo,bin_hi,count,in_range"));
        assert!(csv.contains("-0.25,0.25,1,true"));
        assert!(csv.contains("0.25,0.75,1,false"));
    }
}
