use serde_json::json;

use super::{measure_register, status, RunRecord, StepObserver};
use crate::error::{Error, Result};
use crate::gates::apply_hadamard_range;
use crate::gf2::Gf2Basis;
use crate::measure::RngStream;
use crate::register::QubitRange;
use crate::statevec::StateVector;
use crate::transforms::{apply_oracle, ClassicalOracle};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimonOutcome {
    /// The recovered xor-mask, if the rows reached rank `n - 1` and the mask
    /// passed the classical check `f(0) == f(s)`.
    pub mask: Option<u64>,
    pub rounds: u64,
    pub rank: usize,
    /// Every measured `ω`, accepted or not.
    pub omegas: Vec<u64>,
}

pub fn default_max_rounds(n: usize) -> u64 {
    10 * n as u64
}

/// One quantum round: returns the measured `ω`.
fn simon_round(
    f: &ClassicalOracle,
    rng: &mut RngStream,
    obs: &mut dyn StepObserver,
    record: &mut RunRecord,
) -> Result<u64> {
    let n = f.in_bits();
    let first = QubitRange::leading(n);
    let mut state = StateVector::zero(2 * n)?;
    obs.step("psi0", &state);
    apply_hadamard_range(&mut state, first)?;
    obs.step("psi1", &state);
    apply_oracle(&mut state, f)?;
    record.oracle_calls += 1;
    obs.step("psi2", &state);
    let m = measure_register(state, QubitRange::new(n, n), "delta", rng, obs, record)?;
    let mut state = m.post_state;
    obs.step("psi3", &state);
    apply_hadamard_range(&mut state, first)?;
    obs.step("psi4", &state);
    Ok(measure_register(state, first, "omega", rng, obs, record)?.outcome)
}

/// Recover the hidden xor-mask `s` of `f` (with `f(j) = f(k)` iff
/// `j ^ k ∈ {0, s}`), using at most `max_rounds` oracle calls. Running out
/// of rounds yields a failure record, not an error.
pub fn simon(
    f: &ClassicalOracle,
    max_rounds: u64,
    rng: &mut RngStream,
    obs: &mut dyn StepObserver,
) -> Result<(SimonOutcome, RunRecord)> {
    let n = f.in_bits();
    if f.out_bits() != n {
        return Err(Error::OracleShape(format!("expected an n -> n oracle, got {} -> {}", n, f.out_bits())));
    }
    let mut record = RunRecord::new("simon", rng.seed());
    let mut basis = Gf2Basis::new(n)?;
    let mut omegas = Vec::new();
    let mut rounds = 0;
    while basis.rank() < n - 1 && rounds < max_rounds {
        let omega = simon_round(f, rng, obs, &mut record)?;
        rounds += 1;
        omegas.push(omega);
        let accepted = basis.add_if_independent(omega)?;
        obs.note(&format!(
            "omega = {omega} ({}), rank {}",
            if accepted { "independent" } else { "dependent" },
            basis.rank()
        ));
    }
    record.bump("rounds", rounds);
    let mask = if basis.rank() == n - 1 {
        let s = basis.nullspace_nontrivial()?;
        (f.eval(0) == f.eval(s)).then_some(s)
    } else {
        None
    };
    let reason = match (mask, basis.rank() == n - 1) {
        (Some(_), _) => None,
        (None, true) => Some("candidate mask failed the check f(0) == f(s)"),
        (None, false) => Some("rank n - 1 not reached within the round budget"),
    };
    record.result = json!({
        "status": status(mask.is_some()),
        "mask": mask,
        "rank": basis.rank(),
        "rows": basis.rows(),
        "reason": reason,
    });
    Ok((SimonOutcome { mask, rounds, rank: basis.rank(), omegas }, record))
}
