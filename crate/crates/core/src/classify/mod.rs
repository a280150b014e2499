//! Features, a linear SVM, and leave-one-block-out cross validation.
//!
//! Every touch yields one [`LabeledExample`] tagged with the physical block it
//! came from (`W1`–`W3`, `CW1`–`CW3`, `M1`–`M3`). [`lobo_cv`] holds out one
//! block per material condition at a time, which gives 27 folds, and never
//! lets a held-out block leak into training.

mod features;
mod svm;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sensorsim::SimError;

pub use self::features::{extract_features, FeatureConfig};
pub use self::svm::{
    label_for_margin, predict, train_linear_svm, train_linear_svm_standardized, LinearSvmModel, Standardizer, SvmParams,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("the passive trace is required by this feature layout")]
    MissingPassive,
    #[error("no contact found in the active trace")]
    NoContact,
    #[error("training data must contain both wood and metal examples")]
    SingleClass,
    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("bad block structure: {0}")]
    BadBlockStructure(String),
    #[error("unknown study {0}; expected 1, 2 or 3")]
    UnknownStudy(u32),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Wood,
    Metal,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Wood, Label::Metal];

    /// SVM target: metal is +1.
    pub fn sign(self) -> f64 {
        match self {
            Label::Wood => -1.0,
            Label::Metal => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Wood => "wood",
            Label::Metal => "metal",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaterialCondition {
    AmbientWood,
    ColdWood,
    AmbientMetal,
}

impl MaterialCondition {
    pub const ALL: [MaterialCondition; 3] = [
        MaterialCondition::AmbientWood,
        MaterialCondition::ColdWood,
        MaterialCondition::AmbientMetal,
    ];

    /// True class; cold wood is still wood.
    pub fn label(self) -> Label {
        match self {
            MaterialCondition::AmbientMetal => Label::Metal,
            _ => Label::Wood,
        }
    }

    pub fn block_prefix(self) -> &'static str {
        match self {
            MaterialCondition::AmbientWood => "W",
            MaterialCondition::ColdWood => "CW",
            MaterialCondition::AmbientMetal => "M",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MaterialCondition::AmbientWood => "ambient_wood",
            MaterialCondition::ColdWood => "cold_wood",
            MaterialCondition::AmbientMetal => "ambient_metal",
        }
    }

    pub fn block_id(self, index: usize) -> String {
        format!("{}{}", self.block_prefix(), index + 1)
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Checks that `block_id` is the condition's prefix followed by a number.
fn block_matches(block_id: &str, cond: MaterialCondition) -> bool {
    block_id
        .strip_prefix(cond.block_prefix())
        .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub features: Vec<f64>,
    pub label: Label,
    pub block_id: String,
    pub material_condition: MaterialCondition,
}

impl LabeledExample {
    pub fn new(
        features: Vec<f64>,
        label: Label,
        block_id: impl Into<String>,
        material_condition: MaterialCondition,
    ) -> Result<Self, ClassifyError> {
        let ex = Self {
            features,
            label,
            block_id: block_id.into(),
            material_condition,
        };
        ex.validate()?;
        Ok(ex)
    }

    pub fn validate(&self) -> Result<(), ClassifyError> {
        if !block_matches(&self.block_id, self.material_condition) {
            return Err(ClassifyError::BadBlockStructure(format!(
                "block {} does not belong to {}",
                self.block_id,
                self.material_condition.as_str()
            )));
        }
        Ok(())
    }
}

/// Counts indexed by (true condition, predicted label).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// Rows follow [`MaterialCondition::ALL`], columns [`Label::ALL`].
    pub counts: [[usize; 2]; 3],
}

impl ConfusionMatrix {
    pub fn record(&mut self, truth: MaterialCondition, predicted: Label) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    pub fn count(&self, truth: MaterialCondition, predicted: Label) -> usize {
        self.counts[truth.index()][predicted.index()]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn condition_total(&self, truth: MaterialCondition) -> usize {
        self.counts[truth.index()].iter().sum()
    }

    /// Fraction of `truth` examples predicted as `predicted`; 0 when none.
    pub fn rate(&self, truth: MaterialCondition, predicted: Label) -> f64 {
        let n = self.condition_total(truth);
        if n == 0 {
            0.0
        } else {
            self.count(truth, predicted) as f64 / n as f64
        }
    }

    pub fn condition_accuracy(&self, truth: MaterialCondition) -> f64 {
        self.rate(truth, truth.label())
    }

    pub fn accuracy(&self) -> f64 {
        let n = self.total();
        if n == 0 {
            return 0.0;
        }
        let correct: usize = MaterialCondition::ALL.iter().map(|&c| self.count(c, c.label())).sum();
        correct as f64 / n as f64
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (row, orow) in self.counts.iter_mut().zip(&other.counts) {
            for (c, o) in row.iter_mut().zip(orow) {
                *c += o;
            }
        }
    }

    /// `true_condition,predicted,count`, one line per cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("true_condition,predicted,count\n");
        for cond in MaterialCondition::ALL {
            for label in Label::ALL {
                out.push_str(&format!(
                    "{},{},{}\n",
                    cond.as_str(),
                    label.as_str(),
                    self.count(cond, label)
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Study {
    /// Train on ambient wood and metal only.
    AmbientOnly,
    /// Also train on cold wood.
    WithColdWood,
    /// Also train on cold wood, with the passive sensor's features.
    DoubleCondition,
}

impl Study {
    pub fn id(self) -> u32 {
        match self {
            Study::AmbientOnly => 1,
            Study::WithColdWood => 2,
            Study::DoubleCondition => 3,
        }
    }

    pub fn from_id(id: u32) -> Result<Self, ClassifyError> {
        match id {
            1 => Ok(Study::AmbientOnly),
            2 => Ok(Study::WithColdWood),
            3 => Ok(Study::DoubleCondition),
            other => Err(ClassifyError::UnknownStudy(other)),
        }
    }

    pub fn trains_on_cold_wood(self) -> bool {
        self != Study::AmbientOnly
    }

    pub fn uses_passive(self) -> bool {
        self == Study::DoubleCondition
    }
}

impl TryFrom<u32> for Study {
    type Error = ClassifyError;
    fn try_from(id: u32) -> Result<Self, Self::Error> {
        Study::from_id(id)
    }
}

impl From<Study> for u32 {
    fn from(s: Study) -> u32 {
        s.id()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    /// Held-out block ids as (metal, wood, cold wood).
    pub held_out: (String, String, String),
    pub n_train: usize,
    pub n_test: usize,
    pub confusion: ConfusionMatrix,
    pub margins: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoboResult {
    pub study: Study,
    pub folds: Vec<FoldResult>,
    pub aggregate: ConfusionMatrix,
}

/// Sorted block ids per condition, requiring exactly three of each.
fn block_ids(dataset: &[LabeledExample]) -> Result<[Vec<String>; 3], ClassifyError> {
    let mut blocks: [Vec<String>; 3] = Default::default();
    for ex in dataset {
        ex.validate()?;
        let list = &mut blocks[ex.material_condition.index()];
        if !list.contains(&ex.block_id) {
            list.push(ex.block_id.clone());
        }
    }
    for (cond, list) in MaterialCondition::ALL.iter().zip(blocks.iter_mut()) {
        if list.len() != 3 {
            return Err(ClassifyError::BadBlockStructure(format!(
                "{} has {} blocks, expected 3",
                cond.as_str(),
                list.len()
            )));
        }
        list.sort();
    }
    Ok(blocks)
}

/// 27-fold leave-one-block-out cross validation.
///
/// Folds are ordered by the (metal, wood, cold wood) held-out block index.
/// Features are standardized with the training fold's statistics.
pub fn lobo_cv(dataset: &[LabeledExample], study: Study, params: &SvmParams) -> Result<LoboResult, ClassifyError> {
    params.validate()?;
    let blocks = block_ids(dataset)?;
    let [wood, cold, metal] = &blocks;
    let dim = dataset[0].features.len();
    if let Some(e) = dataset.iter().find(|e| e.features.len() != dim) {
        return Err(ClassifyError::DimensionMismatch {
            expected: dim,
            got: e.features.len(),
        });
    }

    let mut triples = Vec::with_capacity(27);
    for m in metal {
        for w in wood {
            for c in cold {
                triples.push((m.clone(), w.clone(), c.clone()));
            }
        }
    }

    let folds: Vec<FoldResult> = triples
        .into_par_iter()
        .map(|held_out| run_fold(dataset, study, params, held_out))
        .collect::<Result<_, _>>()?;
    let mut aggregate = ConfusionMatrix::default();
    for f in &folds {
        aggregate.merge(&f.confusion);
    }
    Ok(LoboResult {
        study,
        folds,
        aggregate,
    })
}

fn run_fold(
    dataset: &[LabeledExample],
    study: Study,
    params: &SvmParams,
    held_out: (String, String, String),
) -> Result<FoldResult, ClassifyError> {
    let is_test = |e: &LabeledExample| e.block_id == held_out.0 || e.block_id == held_out.1 || e.block_id == held_out.2;
    let train: Vec<LabeledExample> = dataset
        .iter()
        .filter(|e| !is_test(e))
        .filter(|e| study.trains_on_cold_wood() || e.material_condition != MaterialCondition::ColdWood)
        .cloned()
        .collect();
    let test: Vec<&LabeledExample> = dataset.iter().filter(|e| is_test(e)).collect();
    assert!(train.iter().all(|e| !is_test(e)), "held-out block leaked into training");
    let model = train_linear_svm_standardized(&train, params)?;
    let mut confusion = ConfusionMatrix::default();
    let mut margins = Vec::with_capacity(test.len());
    for e in &test {
        let (label, margin) = predict(&model, &e.features)?;
        confusion.record(e.material_condition, label);
        margins.push(margin);
    }
    Ok(FoldResult {
        held_out,
        n_train: train.len(),
        n_test: test.len(),
        confusion,
        margins,
    })
}
