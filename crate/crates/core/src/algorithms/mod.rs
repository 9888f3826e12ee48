//! End-to-end algorithms. Each returns a typed outcome together with a
//! [`RunRecord`] describing what was measured and how often the oracle was
//! applied.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::statevec::StateVector;

mod counting;
mod deutsch;
mod grover;
mod shor;
mod simon;

pub use counting::{counting_error_bound, default_counter_bits, quantum_count, CountEstimate};
pub use deutsch::{deutsch, deutsch_jozsa, FunctionClass, PromiseOutcome};
pub use grover::{
    default_iteration_cap, grover_known, grover_round, grover_unknown, grover_with_count, GroverOutcome,
    GroverSchedule, GroverUnknownOutcome,
};
pub use shor::{shor_factor, shor_factor_with, shor_order, FactorOutcome, OrderOutcome, DEFAULT_ORDER_ATTEMPTS};
pub use simon::{default_max_rounds, simon, SimonOutcome};

/// One labelled measurement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    pub register: String,
    pub outcome: u64,
}

/// Serializable trace of a single run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: String,
    pub seed: u64,
    pub measurements: Vec<Measurement>,
    pub iterations: BTreeMap<String, u64>,
    pub oracle_calls: u64,
    pub result: Value,
}

impl RunRecord {
    pub fn new(algorithm: &str, seed: u64) -> Self {
        Self {
            algorithm: algorithm.to_string(),
            seed,
            measurements: Vec::new(),
            iterations: BTreeMap::new(),
            oracle_calls: 0,
            result: Value::Null,
        }
    }

    pub fn measured(&mut self, register: &str, outcome: u64) {
        self.measurements.push(Measurement { register: register.to_string(), outcome });
    }

    pub fn bump(&mut self, counter: &str, by: u64) {
        *self.iterations.entry(counter.to_string()).or_insert(0) += by;
    }

    /// `result.status == "success"`.
    pub fn succeeded(&self) -> bool {
        self.result.get("status").and_then(Value::as_str) == Some("success")
    }

    /// Fold a sub-run into this record.
    pub(crate) fn absorb(&mut self, other: RunRecord) {
        self.measurements.extend(other.measurements);
        for (k, v) in other.iterations {
            self.bump(&k, v);
        }
        self.oracle_calls += other.oracle_calls;
    }
}

pub(crate) fn status(ok: bool) -> &'static str {
    if ok {
        "success"
    } else {
        "failure"
    }
}

/// Hook for watching a run step by step.
pub trait StepObserver {
    /// Called after each named preparation or transform step.
    fn step(&mut self, _label: &str, _state: &StateVector) {}

    /// Called right before `qubits` are measured as `register`.
    fn before_measure(&mut self, _register: &str, _qubits: &[usize], _state: &StateVector) {}

    /// Free-form progress message.
    fn note(&mut self, _text: &str) {}
}

/// Observer that ignores everything.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoObserver;

impl StepObserver for NoObserver {}

/// Observer that keeps a copy of every step's state. Memory grows with the
/// number of steps; meant for small registers and tests.
#[derive(Clone, Debug, Default)]
pub struct Recorder {
    pub steps: Vec<(String, StateVector)>,
}

impl Recorder {
    pub fn last(&self, label: &str) -> Option<&StateVector> {
        self.steps.iter().rev().find(|(l, _)| l == label).map(|(_, s)| s)
    }
}

impl StepObserver for Recorder {
    fn step(&mut self, label: &str, state: &StateVector) {
        self.steps.push((label.to_string(), state.clone()));
    }
}

/// Measure `range` as `register`, notifying `obs` and logging the outcome.
pub(crate) fn measure_register(
    state: StateVector,
    range: crate::register::QubitRange,
    register: &str,
    rng: &mut crate::measure::RngStream,
    obs: &mut dyn StepObserver,
    record: &mut RunRecord,
) -> crate::error::Result<crate::measure::MeasureResult> {
    let qubits: Vec<usize> = range.qubits().collect();
    obs.before_measure(register, &qubits, &state);
    let m = crate::measure::measure_subset(state, &qubits, rng)?;
    record.measured(register, m.outcome);
    Ok(m)
}
