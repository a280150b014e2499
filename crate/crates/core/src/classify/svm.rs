use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{ClassifyError, Label, LabeledExample};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvmParams {
    /// Regularization strength λ.
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            lambda: 1e-3,
            epochs: 200,
            seed: 0,
        }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<(), ClassifyError> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(ClassifyError::InvalidConfig(format!(
                "lambda must be > 0, got {}",
                self.lambda
            )));
        }
        if self.epochs == 0 {
            return Err(ClassifyError::InvalidConfig("epochs must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-feature affine scaling fitted on a training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Constant features get unit scale.
    pub fn fit<'a>(rows: impl IntoIterator<Item = &'a [f64]>) -> Result<Self, ClassifyError> {
        let rows: Vec<&[f64]> = rows.into_iter().collect();
        let first = rows.first().ok_or(ClassifyError::SingleClass)?;
        let d = first.len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for r in &rows {
            if r.len() != d {
                return Err(ClassifyError::DimensionMismatch {
                    expected: d,
                    got: r.len(),
                });
            }
            for (m, v) in mean.iter_mut().zip(r.iter()) {
                *m += v / n;
            }
        }
        let mut std = vec![0.0; d];
        for r in &rows {
            for j in 0..d {
                std[j] += (r[j] - mean[j]).powi(2) / n;
            }
        }
        for s in &mut std {
            *s = s.sqrt();
            if !(*s > 1e-12) {
                *s = 1.0;
            }
        }
        Ok(Self { mean, std })
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub params: SvmParams,
    /// Applied to raw features before the linear rule, when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<Standardizer>,
}

impl LinearSvmModel {
    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn margin(&self, features: &[f64]) -> Result<f64, ClassifyError> {
        if features.len() != self.weights.len() {
            return Err(ClassifyError::DimensionMismatch {
                expected: self.weights.len(),
                got: features.len(),
            });
        }
        let x = match &self.scaling {
            Some(s) => s.transform(features),
            None => features.to_vec(),
        };
        Ok(self.weights.iter().zip(&x).map(|(w, v)| w * v).sum::<f64>() + self.bias)
    }
}

/// Metal iff the margin is strictly positive; a zero margin is wood.
pub fn label_for_margin(margin: f64) -> Label {
    if margin > 0.0 {
        Label::Metal
    } else {
        Label::Wood
    }
}

pub fn predict(model: &LinearSvmModel, features: &[f64]) -> Result<(Label, f64), ClassifyError> {
    let m = model.margin(features)?;
    Ok((label_for_margin(m), m))
}

fn check_classes(examples: &[LabeledExample]) -> Result<usize, ClassifyError> {
    let has = |l: Label| examples.iter().any(|e| e.label == l);
    if !has(Label::Wood) || !has(Label::Metal) {
        return Err(ClassifyError::SingleClass);
    }
    let d = examples[0].features.len();
    if let Some(e) = examples.iter().find(|e| e.features.len() != d) {
        return Err(ClassifyError::DimensionMismatch {
            expected: d,
            got: e.features.len(),
        });
    }
    Ok(d)
}

/// Stochastic subgradient descent on the regularized hinge loss
/// `λ/2·|w|² + mean(max(0, 1 − y·(w·x + b)))`.
///
/// The bias is handled as the weight of a constant unit feature. Step size
/// at update `t` is `1/(λt)`; iterates are projected onto the ball of radius
/// `1/√λ` that contains the optimum. Each epoch visits the examples in an
/// order drawn from a seed derived from `(seed, epoch)`.
pub fn train_linear_svm(examples: &[LabeledExample], params: &SvmParams) -> Result<LinearSvmModel, ClassifyError> {
    params.validate()?;
    let d = check_classes(examples)?;
    let rows: Vec<(&[f64], f64)> = examples
        .iter()
        .map(|e| (e.features.as_slice(), e.label.sign()))
        .collect();
    let (w, b) = pegasos(&rows, d, params);
    Ok(LinearSvmModel {
        weights: w,
        bias: b,
        params: *params,
        scaling: None,
    })
}

/// Like [`train_linear_svm`] but standardizes features with statistics of
/// `examples` first and stores the scaling in the model.
pub fn train_linear_svm_standardized(
    examples: &[LabeledExample],
    params: &SvmParams,
) -> Result<LinearSvmModel, ClassifyError> {
    params.validate()?;
    let d = check_classes(examples)?;
    let scaling = Standardizer::fit(examples.iter().map(|e| e.features.as_slice()))?;
    let scaled: Vec<Vec<f64>> = examples.iter().map(|e| scaling.transform(&e.features)).collect();
    let rows: Vec<(&[f64], f64)> = scaled
        .iter()
        .zip(examples)
        .map(|(x, e)| (x.as_slice(), e.label.sign()))
        .collect();
    let (w, b) = pegasos(&rows, d, params);
    Ok(LinearSvmModel {
        weights: w,
        bias: b,
        params: *params,
        scaling: Some(scaling),
    })
}

fn pegasos(rows: &[(&[f64], f64)], d: usize, params: &SvmParams) -> (Vec<f64>, f64) {
    let lambda = params.lambda;
    let radius = 1.0 / lambda.sqrt();
    // Last slot is the bias.
    let mut w = vec![0.0; d + 1];
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut t = 0usize;
    for epoch in 0..params.epochs {
        order.sort_unstable();
        order.shuffle(&mut seed::rng(seed::derive(params.seed, &[epoch as u64])));
        for &i in &order {
            t += 1;
            let (x, y) = rows[i];
            let eta = 1.0 / (lambda * t as f64);
            let score: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + w[d];
            let shrink = 1.0 - eta * lambda;
            for v in &mut w {
                *v *= shrink;
            }
            if y * score < 1.0 {
                for (v, a) in w.iter_mut().zip(x) {
                    *v += eta * y * a;
                }
                w[d] += eta * y;
            }
            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > radius {
                let s = radius / norm;
                for v in &mut w {
                    *v *= s;
                }
            }
        }
    }
    let b = w.pop().unwrap_or(0.0);
    (w, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::MaterialCondition;

    fn ex(x: Vec<f64>, label: Label) -> LabeledExample {
        let cond = match label {
            Label::Wood => MaterialCondition::AmbientWood,
            Label::Metal => MaterialCondition::AmbientMetal,
        };
        LabeledExample::new(x, label, format!("{}1", cond.block_prefix()), cond).unwrap()
    }

    fn accuracy(model: &LinearSvmModel, data: &[LabeledExample]) -> f64 {
        let ok = data
            .iter()
            .filter(|e| predict(model, &e.features).unwrap().0 == e.label)
            .count();
        ok as f64 / data.len() as f64
    }

    #[test]
    fn separable_pair() {
        let data = vec![ex(vec![-1.0], Label::Wood), ex(vec![1.0], Label::Metal)];
        let m = train_linear_svm(&data, &SvmParams::default()).unwrap();
        assert_eq!(accuracy(&m, &data), 1.0);
    }

    #[test]
    fn conflicting_labels() {
        let data = vec![
            ex(vec![0.5, 0.5], Label::Wood),
            ex(vec![0.5, 0.5], Label::Metal),
            ex(vec![0.5, 0.5], Label::Wood),
            ex(vec![0.5, 0.5], Label::Metal),
        ];
        let m = train_linear_svm(&data, &SvmParams::default()).unwrap();
        assert_eq!(accuracy(&m, &data), 0.5);
    }

    #[test]
    fn single_class() {
        let data = vec![ex(vec![1.0], Label::Wood), ex(vec![2.0], Label::Wood)];
        assert_eq!(
            train_linear_svm(&data, &SvmParams::default()),
            Err(ClassifyError::SingleClass)
        );
    }

    #[test]
    fn tie_and_sign_rule() {
        let zero = LinearSvmModel {
            weights: vec![0.0],
            bias: 0.0,
            params: SvmParams::default(),
            scaling: None,
        };
        assert_eq!(predict(&zero, &[3.0]).unwrap(), (Label::Wood, 0.0));
        let one = LinearSvmModel {
            weights: vec![1.0],
            ..zero.clone()
        };
        assert_eq!(predict(&one, &[2.0]).unwrap(), (Label::Metal, 2.0));
        assert!(matches!(
            predict(&one, &[1.0, 2.0]),
            Err(ClassifyError::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn deterministic() {
        let data: Vec<_> = (0..40)
            .map(|i| {
                let x = if i % 2 == 0 {
                    1.0 + i as f64 / 40.0
                } else {
                    -1.0 - i as f64 / 40.0
                };
                ex(
                    vec![x, (i % 7) as f64],
                    if x > 0.0 { Label::Metal } else { Label::Wood },
                )
            })
            .collect();
        let p = SvmParams {
            seed: 11,
            ..SvmParams::default()
        };
        let a = train_linear_svm(&data, &p).unwrap();
        let b = train_linear_svm(&data, &p).unwrap();
        assert_eq!(a, b);
        assert_eq!(accuracy(&a, &data), 1.0);
    }

    #[test]
    fn standardizer_constant_feature() {
        let rows = [vec![1.0, 5.0], vec![3.0, 5.0]];
        let s = Standardizer::fit(rows.iter().map(|r| r.as_slice())).unwrap();
        assert_eq!(s.mean, vec![2.0, 5.0]);
        assert_eq!(s.std, vec![1.0, 1.0]);
        assert_eq!(s.transform(&[3.0, 5.0]), vec![1.0, 0.0]);
    }
}
