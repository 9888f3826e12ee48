use serde::Serialize;
use serde_json::json;

use super::{measure_register, status, RunRecord, StepObserver};
use crate::error::{Error, Result};
use crate::gates::{apply_hadamard_all, apply_hadamard_range};
use crate::measure::RngStream;
use crate::register::QubitRange;
use crate::statevec::StateVector;
use crate::transforms::{apply_oracle, ClassicalOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionClass {
    Constant,
    Balanced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PromiseOutcome {
    pub class: FunctionClass,
    /// The measured first register; zero means constant.
    pub measured: u64,
}

/// `|0>_n |1>`, Hadamards on everything, one oracle call, Hadamards on the
/// first register, then measure it.
fn promise_circuit(
    algorithm: &str,
    register: &str,
    f: &ClassicalOracle,
    rng: &mut RngStream,
    obs: &mut dyn StepObserver,
) -> Result<(PromiseOutcome, RunRecord)> {
    let n = f.in_bits();
    let mut record = RunRecord::new(algorithm, rng.seed());
    let mut state = StateVector::basis(n + 1, 1)?;
    obs.step("psi0", &state);
    apply_hadamard_all(&mut state);
    obs.step("psi1", &state);
    apply_oracle(&mut state, f)?;
    record.oracle_calls += 1;
    obs.step("psi2", &state);
    apply_hadamard_range(&mut state, QubitRange::leading(n))?;
    obs.step("psi3", &state);
    let m = measure_register(state, QubitRange::leading(n), register, rng, obs, &mut record)?;
    let class = if m.outcome == 0 { FunctionClass::Constant } else { FunctionClass::Balanced };
    record.result = json!({ "status": status(true), "verdict": class, "measured": m.outcome });
    Ok((PromiseOutcome { class, measured: m.outcome }, record))
}

fn check_shape(f: &ClassicalOracle, one_input: bool) -> Result<()> {
    if f.out_bits() != 1 || (one_input && f.in_bits() != 1) {
        let want = if one_input { "1 -> 1" } else { "n -> 1" };
        return Err(Error::OracleShape(format!("expected a {want} oracle, got {} -> {}", f.in_bits(), f.out_bits())));
    }
    Ok(())
}

/// Decide whether a one-bit function is constant or balanced with a single
/// oracle call.
pub fn deutsch(
    f: &ClassicalOracle,
    rng: &mut RngStream,
    obs: &mut dyn StepObserver,
) -> Result<(PromiseOutcome, RunRecord)> {
    check_shape(f, true)?;
    promise_circuit("deutsch", "delta", f, rng, obs)
}

/// Constant-or-balanced promise problem on `n` input bits. Promise
/// violations are not detected.
pub fn deutsch_jozsa(
    f: &ClassicalOracle,
    rng: &mut RngStream,
    obs: &mut dyn StepObserver,
) -> Result<(PromiseOutcome, RunRecord)> {
    check_shape(f, false)?;
    promise_circuit("deutsch_jozsa", "k", f, rng, obs)
}

// The Deutsch circuit spelled out gate by gate, kept for comparison with
// the shared Hadamard-wall version above.
#[cfg(test)]
fn deutsch_gatewise(f: &ClassicalOracle) -> StateVector {
    use crate::gates::{apply_1q, StandardGate};
    let h = StandardGate::H.matrix();
    let mut s = StateVector::zero(2).unwrap();
    apply_1q(&mut s, &StandardGate::X.matrix(), 1).unwrap();
    apply_1q(&mut s, &h, 0).unwrap();
    apply_1q(&mut s, &h, 1).unwrap();
    apply_oracle(&mut s, f).unwrap();
    apply_1q(&mut s, &h, 0).unwrap();
    s
}
