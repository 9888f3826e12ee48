use std::f64::consts::PI;

use serde::Serialize;
use serde_json::json;

use super::{measure_register, status, RunRecord, StepObserver};
use crate::error::{Error, Result};
use crate::gates::apply_hadamard_all;
use crate::measure::RngStream;
use crate::register::QubitRange;
use crate::statevec::StateVector;
use crate::transforms::{grover_step, ClassicalOracle};

/// Rotation angle of the Grover gate for `t` solutions among `2^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GroverSchedule {
    /// `sin²θ = t / 2^n`.
    pub theta: f64,
    /// `⌊π / 4θ⌋`, or 0 when there is nothing to find.
    pub m_opt: u64,
}

impl GroverSchedule {
    pub fn new(n: usize, t: u64) -> Result<Self> {
        let dim = 1u64 << n;
        if t > dim {
            return Err(Error::Domain(format!("{t} solutions among {dim} entries")));
        }
        let theta = (t as f64 / dim as f64).sqrt().asin();
        let m_opt = if t == 0 { 0 } else { (PI / (4.0 * theta)).floor() as u64 };
        Ok(Self { theta, m_opt })
    }

    /// Probability of measuring a solution after `k` iterations.
    pub fn success_probability(&self, k: u64) -> f64 {
        ((2 * k + 1) as f64 * self.theta).sin().powi(2)
    }

    /// Amplitude of the normalized solution state after `k` iterations.
    pub fn solution_amplitude(&self, k: u64) -> f64 {
        ((2 * k + 1) as f64 * self.theta).sin()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroverOutcome {
    pub found: u64,
    /// Whether `f(found) = 1`.
    pub hit: bool,
    pub iterations: u64,
    pub schedule: GroverSchedule,
}

/// `|γ>_n ⊗ |->` with the ancilla as the last qubit.
fn prepared(n: usize) -> Result<StateVector> {
    let mut state = StateVector::basis(n + 1, 1)?;
    apply_hadamard_all(&mut state);
    Ok(state)
}

/// Prepare `|γ>_n ⊗ |->`, apply `k` Grover iterations and measure the search
/// register.
pub fn grover_round(
    f: &ClassicalOracle,
    k: u64,
    rng: &mut RngStream,
    obs: &mut dyn StepObserver,
    record: &mut RunRecord,
) -> Result<u64> {
    if f.out_bits() != 1 {
        return Err(Error::OracleShape(format!("expected an n -> 1 oracle, got {} -> {}", f.in_bits(), f.out_bits())));
    }
    let n = f.in_bits();
    let mut state = prepared(n)?;
    obs.step("psi1", &state);
    for j in 0..k {
        grover_step(&mut state, f, n)?;
        record.oracle_calls += 1;
        obs.step(&format!("iteration {}", j + 1), &state);
    }
    record.bump("grover", k);
    Ok(measure_register(state, QubitRange::leading(n), "i", rng, obs, record)?.outcome)
}

/// Search with a known number `t` of solutions, running `m_opt` iterations.
pub fn grover_with_count(
    f: &ClassicalOracle,
    t: u64,
    rng: &mut RngStream,
    obs: &mut dyn StepObserver,
) -> Result<(GroverOutcome, RunRecord)> {
    let n = f.in_bits();
    let schedule = GroverSchedule::new(n, t)?;
    let mut record = RunRecord::new("grover", rng.seed());
    let found = grover_round(f, schedule.m_opt, rng, obs, &mut record)?;
    let hit = f.eval(found) == 1;
    let amplitudes: Vec<f64> = (0..=schedule.m_opt).map(|k| schedule.solution_amplitude(k)).collect();
    record.result = json!({
        "status": status(hit),
        "found": found,
        "iterations": schedule.m_opt,
        "theta": schedule.theta,
        "success_probability": schedule.success_probability(schedule.m_opt),
        "amplitudes": amplitudes,
    });
    Ok((GroverOutcome { found, hit, iterations: schedule.m_opt, schedule }, record))
}

/// Search for the single index with `f(j) = 1`.
pub fn grover_known(
    f: &ClassicalOracle,
    rng: &mut RngStream,
    obs: &mut dyn StepObserver,
) -> Result<(GroverOutcome, RunRecord)> {
    grover_with_count(f, 1, rng, obs)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroverUnknownOutcome {
    /// A solution, or `None` once the iteration budget ran out.
    pub found: Option<u64>,
    pub total_iterations: u64,
    pub rounds: u64,
}

/// `⌈9 √2^n⌉` cumulative iterations.
pub fn default_iteration_cap(n: usize) -> u64 {
    (9.0 * ((1u64 << n) as f64).sqrt()).ceil() as u64
}

/// Search with an unknown number of solutions: each round draws an
/// iteration count uniformly below the current bound `m`, which grows by
/// `λ` after every miss up to `√2^n`.
pub fn grover_unknown(
    f: &ClassicalOracle,
    lambda: f64,
    max_total_iters: u64,
    rng: &mut RngStream,
    obs: &mut dyn StepObserver,
) -> Result<(GroverUnknownOutcome, RunRecord)> {
    if !(lambda > 1.0 && lambda < 4.0 / 3.0) {
        return Err(Error::Domain(format!("lambda {lambda} outside (1, 4/3)")));
    }
    let n = f.in_bits();
    let cap = ((1u64 << n) as f64).sqrt();
    let mut record = RunRecord::new("grover_unknown", rng.seed());
    let mut m = 1.0f64;
    let mut total = 0;
    let mut rounds = 0;
    let mut found = None;
    loop {
        let k = rng.range(0, m.ceil() as u64);
        if total + k > max_total_iters {
            obs.note(&format!("iteration budget {max_total_iters} exhausted"));
            break;
        }
        total += k;
        rounds += 1;
        let i = grover_round(f, k, rng, obs, &mut record)?;
        if f.eval(i) == 1 {
            found = Some(i);
            break;
        }
        obs.note(&format!("round {rounds}: {k} iterations, measured {i}, not a solution"));
        m = (lambda * m).min(cap);
    }
    record.bump("rounds", rounds);
    record.result = json!({
        "status": status(found.is_some()),
        "found": found,
        "total_iterations": total,
        "verdict": if found.is_some() { "found" } else { "no solution" },
    });
    Ok((GroverUnknownOutcome { found, total_iterations: total, rounds }, record))
}
