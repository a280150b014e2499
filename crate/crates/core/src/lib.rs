//! Material recognition via contact heat transfer.
//!
//! `thermoscope` models what a temperature sensor measures when it touches an
//! object, predicts the object temperatures at which two different materials
//! produce identical measurements, and certifies numerically that a pair of
//! sensors held at two different temperatures cannot be fooled the same way.
//! Around that core it simulates realistic sensor traces (noise, approach
//! convection, contact lag and a thermistor/ADC/Butterworth signal chain),
//! fits material effusivities from traces, and replays three classification
//! studies with a linear SVM under leave-one-block-out cross validation.
//!
//! | module         | capability                                                |
//! |----------------|-----------------------------------------------------------|
//! | [`heatcore`]   | effusivity, contact temperature, measured temperature, erfc |
//! | [`ambiguity`]  | ambiguous object temperatures and the two-sensor sweep    |
//! | [`sensorsim`]  | trace synthesis, contact detection, signal chain, CSV     |
//! | [`estimation`] | effusivity fitting, warming correction, threshold search  |
//! | [`classify`]   | features, linear SVM, leave-one-block-out CV              |
//! | [`studylab`]   | the 540-trace regimen, target tuning, study reports       |
//! | [`cli`]        | the `thermoscope` command line front end                  |
//!
//! The runnable programs under `examples/` walk through each capability.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ambiguity;
pub mod classify;
pub mod cli;
pub mod estimation;
pub mod heatcore;
pub mod scenario;
pub mod seed;
pub mod sensorsim;
pub mod studylab;

pub use ambiguity::{
    ambiguous_object_temperature, double_condition_gap, proof_sweep, verify_ambiguity, AmbiguityQuery,
    DoubleConditionQuery, SweepDomain, SweepReport,
};
pub use heatcore::{
    contact_temperature, effusivity_from_properties, erfc, measured_temperature, BodyState, ContactSolution,
    MaterialCatalog, SensorSpec, ThermalMaterial,
};
pub use sensorsim::{
    apply_signal_chain, detect_contact, simulate_double_condition, synthesize_trace, NonIdealityConfig, SensorId,
    SignalChainConfig, TemperatureTrace, TraceConfig,
};
