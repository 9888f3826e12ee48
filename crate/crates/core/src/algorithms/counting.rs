use std::f64::consts::PI;

use serde::Serialize;
use serde_json::json;

use super::{measure_register, status, RunRecord, StepObserver};
use crate::error::{Error, Result};
use crate::gates::apply_hadamard_all;
use crate::measure::RngStream;
use crate::register::QubitRange;
use crate::statevec::StateVector;
use crate::transforms::{apply_counting, apply_qft, ClassicalOracle, OracleForm};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CountEstimate {
    pub l_measured: u64,
    /// `l` folded into `[0, 2^(p-1)]`.
    pub l_folded: u64,
    pub omega_tilde: f64,
    pub t_tilde: f64,
    pub error_bound: f64,
}

/// `p = n + 2` counter qubits.
pub fn default_counter_bits(n: usize) -> usize {
    n + 2
}

/// `(2π/2^p) √(t(2^n - t)) + (π²/2^{2p}) |2^n - 2t|`.
pub fn counting_error_bound(t: f64, n: usize, p: usize) -> f64 {
    let dim = (1u64 << n) as f64;
    let scale = (1u64 << p) as f64;
    2.0 * PI / scale * (t * (dim - t)).max(0.0).sqrt() + PI * PI / (scale * scale) * (dim - 2.0 * t).abs()
}

impl CountEstimate {
    pub fn from_measurement(l_measured: u64, n: usize, p: usize) -> Self {
        let scale = 1u64 << p;
        let l_folded = if l_measured > scale / 2 { scale - l_measured } else { l_measured };
        let omega_tilde = l_folded as f64 / scale as f64;
        let t_tilde = (1u64 << n) as f64 * (PI * omega_tilde).sin().powi(2);
        Self { l_measured, l_folded, omega_tilde, t_tilde, error_bound: counting_error_bound(t_tilde, n, p) }
    }
}

/// Estimate the number of solutions of `f` with `p` counter qubits.
pub fn quantum_count(
    f: &ClassicalOracle,
    p: usize,
    rng: &mut RngStream,
    obs: &mut dyn StepObserver,
) -> Result<(CountEstimate, RunRecord)> {
    if p < 2 {
        return Err(Error::Domain(format!("need at least 2 counter qubits, got {p}")));
    }
    if f.out_bits() != 1 {
        return Err(Error::OracleShape(format!("expected an n -> 1 oracle, got {} -> {}", f.in_bits(), f.out_bits())));
    }
    let n = f.in_bits();
    let counter = QubitRange::leading(p);
    let mut record = RunRecord::new("quantum_count", rng.seed());
    let mut state = StateVector::zero(p + n)?;
    obs.step("psi0", &state);
    apply_hadamard_all(&mut state);
    obs.step("psi1", &state);
    apply_counting(&mut state, f, p, n, OracleForm::Phase)?;
    // As a circuit: controlled G^(2^w) for each counter bit w.
    record.oracle_calls += (1u64 << p) - 1;
    obs.step("psi2", &state);
    apply_qft(&mut state, counter, true)?;
    obs.step("psi3", &state);
    let l = measure_register(state, counter, "l", rng, obs, &mut record)?.outcome;
    let estimate = CountEstimate::from_measurement(l, n, p);
    record.result = json!({
        "status": status(true),
        "p": p,
        "l": estimate.l_measured,
        "l_folded": estimate.l_folded,
        "omega": estimate.omega_tilde,
        "t_estimate": estimate.t_tilde,
        "error_bound": estimate.error_bound,
    });
    Ok((estimate, record))
}
