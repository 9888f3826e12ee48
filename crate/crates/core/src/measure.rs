//! Projective measurement with collapse, and seeded sampling.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::register::QubitRange;
use crate::statevec::{StateVector, C64};

/// Probabilities below this are treated as exactly zero when sampling.
pub const PROBABILITY_FLOOR: f64 = 1e-15;

/// Seeded random stream. Every measurement consumes exactly one uniform.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    counter: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::derived(seed, 0)
    }

    /// Independent stream `run_index` of `seed`, for batched runs.
    pub fn derived(seed: u64, run_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run_index);
        Self { seed, stream: run_index, counter: 0, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Number of draws taken so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.counter += 1;
        self.rng.random::<f64>()
    }

    /// Uniform integer in `[lo, hi)`.
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        self.counter += 1;
        self.rng.random_range(lo..hi)
    }
}

/// Outcome of a measurement and the collapsed, renormalized state.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureResult {
    pub outcome: u64,
    pub post_state: StateVector,
}

fn floored(p: f64) -> f64 {
    if p < PROBABILITY_FLOOR {
        0.0
    } else {
        p
    }
}

/// Inverse-CDF draw from unnormalized weights.
fn draw_index(weights: &[f64], u: f64) -> usize {
    let total: f64 = weights.iter().map(|&w| floored(w)).sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        let w = floored(w);
        if w == 0.0 {
            continue;
        }
        acc += w;
        last = i;
        if target < acc {
            return i;
        }
    }
    last
}

/// Measure every qubit.
pub fn measure_all(state: StateVector, rng: &mut RngStream) -> MeasureResult {
    let n = state.n_qubits();
    let j = draw_index(&state.probabilities(), rng.uniform());
    MeasureResult { outcome: j as u64, post_state: StateVector::basis(n, j as u64).expect("index in range") }
}

fn check_subset(n_qubits: usize, qubits: &[usize]) -> Result<()> {
    if qubits.is_empty() {
        return Err(Error::Domain("cannot measure an empty qubit set".into()));
    }
    let mut seen = vec![false; n_qubits];
    for &q in qubits {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(Error::InvalidQubitSet(format!("qubit {q} listed twice")));
        }
    }
    Ok(())
}

/// Value of `qubits` (first listed is most significant) inside index `i`.
#[inline]
fn subset_value(i: usize, shifts: &[usize]) -> usize {
    shifts.iter().fold(0, |acc, &s| (acc << 1) | ((i >> s) & 1))
}

fn as_range(qubits: &[usize]) -> Option<QubitRange> {
    qubits.windows(2).all(|w| w[1] == w[0] + 1).then(|| QubitRange::new(qubits[0], qubits.len()))
}

/// Outcome distribution of `qubits`, indexed with the first listed qubit as
/// the most significant bit.
pub fn marginal_probabilities(state: &StateVector, qubits: &[usize]) -> Result<Vec<f64>> {
    let n = state.n_qubits();
    check_subset(n, qubits)?;
    let mut marginal = vec![0.0; 1usize << qubits.len()];
    if let Some(range) = as_range(qubits) {
        // Runs of `stride` consecutive indices share one register value.
        let layout = range.layout(n);
        let mask = layout.block_dim() - 1;
        for (run, chunk) in state.amps().chunks_exact(layout.stride()).enumerate() {
            let m = &mut marginal[run & mask];
            for a in chunk {
                *m += a.norm_sqr();
            }
        }
    } else {
        let shifts: Vec<usize> = qubits.iter().map(|&q| n - 1 - q).collect();
        for (i, a) in state.amps().iter().enumerate() {
            marginal[subset_value(i, &shifts)] += a.norm_sqr();
        }
    }
    Ok(marginal)
}

/// Zero every component inconsistent with `outcome` on `qubits`, then
/// renormalize. Fails if the outcome has probability zero.
pub fn postselect(mut state: StateVector, qubits: &[usize], outcome: u64) -> Result<StateVector> {
    let n = state.n_qubits();
    check_subset(n, qubits)?;
    if qubits.len() < 64 && outcome >> qubits.len() != 0 {
        return Err(Error::IndexOutOfRange { index: outcome, n_qubits: qubits.len() });
    }
    if let Some(range) = as_range(qubits) {
        return postselect_range(state, range, outcome);
    }
    let shifts: Vec<usize> = qubits.iter().map(|&q| n - 1 - q).collect();
    let zero = C64::new(0.0, 0.0);
    let mut kept = 0.0;
    for (i, a) in state.amps_mut().iter_mut().enumerate() {
        if subset_value(i, &shifts) as u64 == outcome {
            kept += a.norm_sqr();
        } else {
            *a = zero;
        }
    }
    if floored(kept) == 0.0 {
        return Err(Error::Domain(format!("outcome {outcome} has probability zero")));
    }
    state.renormalize();
    Ok(state)
}

fn postselect_range(mut state: StateVector, range: QubitRange, outcome: u64) -> Result<StateVector> {
    let layout = range.layout(state.n_qubits());
    let (stride, mask) = (layout.stride(), layout.block_dim() - 1);
    let zero = C64::new(0.0, 0.0);
    let mut kept = 0.0;
    for (run, chunk) in state.amps_mut().chunks_exact_mut(stride).enumerate() {
        if (run & mask) as u64 == outcome {
            for a in chunk.iter() {
                kept += a.norm_sqr();
            }
        } else {
            chunk.fill(zero);
        }
    }
    if floored(kept) == 0.0 {
        return Err(Error::Domain(format!("outcome {outcome} has probability zero")));
    }
    let scale = 1.0 / kept.sqrt();
    for (run, chunk) in state.amps_mut().chunks_exact_mut(stride).enumerate() {
        if (run & mask) as u64 == outcome {
            chunk.iter_mut().for_each(|a| *a *= scale);
        }
    }
    Ok(state)
}

/// Measure `qubits`, leaving the rest in superposition. The outcome's most
/// significant bit is the first listed qubit.
pub fn measure_subset(state: StateVector, qubits: &[usize], rng: &mut RngStream) -> Result<MeasureResult> {
    let marginal = marginal_probabilities(&state, qubits)?;
    let outcome = draw_index(&marginal, rng.uniform()) as u64;
    let post_state = postselect(state, qubits, outcome)?;
    Ok(MeasureResult { outcome, post_state })
}

/// Measure a contiguous register.
pub fn measure_range(state: StateVector, range: QubitRange, rng: &mut RngStream) -> Result<MeasureResult> {
    range.check(state.n_qubits())?;
    let qubits: Vec<usize> = range.qubits().collect();
    measure_subset(state, &qubits, rng)
}

/// Outcome counts of repeated non-destructive sampling.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub shots: u64,
    pub counts: BTreeMap<u64, u64>,
}

impl Histogram {
    pub fn count(&self, outcome: u64) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    /// Empirical distribution over `dim` outcomes.
    pub fn frequencies(&self, dim: usize) -> Vec<f64> {
        let mut f = vec![0.0; dim];
        for (&j, &c) in &self.counts {
            if let Some(slot) = f.get_mut(j as usize) {
                *slot = c as f64 / self.shots as f64;
            }
        }
        f
    }
}

/// Draw `shots` full-register samples from `state` without collapsing it.
pub fn sample_counts(state: &StateVector, shots: u64, rng: &mut RngStream) -> Result<Histogram> {
    if shots == 0 {
        return Err(Error::Domain("shots must be at least 1".into()));
    }
    sample_distribution(&state.probabilities(), shots, rng)
}

/// Multinomial sample from an arbitrary (unnormalized) weight vector.
pub fn sample_distribution(weights: &[f64], shots: u64, rng: &mut RngStream) -> Result<Histogram> {
    let mut cdf = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for &w in weights {
        acc += floored(w);
        cdf.push(acc);
    }
    if acc <= 0.0 {
        return Err(Error::Domain("distribution has no mass".into()));
    }
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let target = rng.uniform() * acc;
        let mut j = cdf.partition_point(|&c| c <= target).min(cdf.len() - 1);
        while floored(weights[j]) == 0.0 && j > 0 {
            j -= 1;
        }
        *counts.entry(j as u64).or_insert(0) += 1;
    }
    Ok(Histogram { shots, counts })
}

/// Total-variation distance `½ Σ |p - q|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..len).map(|i| (at(p, i) - at(q, i)).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{apply_1q, apply_cnot, apply_hadamard_all, StandardGate};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn psi3() -> StateVector {
        // (|001> + |011> + |101> + |111>)/2
        let mut amps = vec![c(0.0, 0.0); 8];
        for j in [1, 3, 5, 7] {
            amps[j] = c(0.5, 0.0);
        }
        StateVector::from_amplitudes(amps).unwrap()
    }

    #[test]
    fn basis_states_measure_deterministically() {
        for seed in 0..20 {
            let mut rng = RngStream::new(seed);
            let r = measure_all(StateVector::basis(5, 19).unwrap(), &mut rng);
            assert_eq!(r.outcome, 19);
            assert_eq!(rng.counter(), 1);
        }
    }

    #[test]
    fn uniform_over_four_odd_values() {
        let mut rng = RngStream::new(1);
        let state = psi3();
        let h = sample_counts(&state, 10_000, &mut rng).unwrap();
        for j in [1, 3, 5, 7] {
            let f = h.count(j) as f64 / 1e4;
            assert!((f - 0.25).abs() < 0.02, "{j}: {f}");
        }
        assert_eq!(h.counts.len(), 4);
        assert_eq!(rng.counter(), 10_000);
    }

    #[test]
    fn partial_collapse_of_the_three_qubit_example() {
        let post = postselect(psi3(), &[0], 1).unwrap();
        let mut expect = vec![c(0.0, 0.0); 8];
        expect[5] = c(FRAC_1_SQRT_2, 0.0);
        expect[7] = c(FRAC_1_SQRT_2, 0.0);
        assert!(post.max_abs_diff(&StateVector::from_amplitudes(expect).unwrap()).unwrap() < 1e-15);
        assert!(postselect(psi3(), &[2], 0).is_err());
    }

    #[test]
    fn bell_partner_collapses() {
        for seed in 0..50 {
            let mut s = StateVector::zero(2).unwrap();
            apply_1q(&mut s, &StandardGate::H.matrix(), 0).unwrap();
            apply_cnot(&mut s, 0, 1).unwrap();
            let mut rng = RngStream::new(seed);
            let first = measure_subset(s, &[0], &mut rng).unwrap();
            let second = measure_subset(first.post_state, &[1], &mut rng).unwrap();
            assert_eq!(first.outcome, second.outcome);
        }
    }

    #[test]
    fn subset_order_sets_outcome_bits() {
        let s = StateVector::basis(4, 0b1001).unwrap();
        let mut rng = RngStream::new(0);
        assert_eq!(measure_subset(s.clone(), &[3, 0], &mut rng).unwrap().outcome, 0b11);
        assert_eq!(measure_subset(s.clone(), &[1, 3], &mut rng).unwrap().outcome, 0b01);
        assert_eq!(measure_subset(s.clone(), &[0, 1, 2], &mut rng).unwrap().outcome, 0b100);
        assert!(measure_subset(s.clone(), &[], &mut rng).is_err());
        assert!(measure_subset(s.clone(), &[1, 1], &mut rng).is_err());
        assert!(measure_subset(s, &[4], &mut rng).is_err());
    }

    #[test]
    fn collapse_is_idempotent() {
        let mut rng = RngStream::new(5);
        for _ in 0..100 {
            let mut s = StateVector::zero(5).unwrap();
            apply_hadamard_all(&mut s);
            let r = measure_subset(s, &[4, 1], &mut rng).unwrap();
            assert!(r.post_state.is_normalized());
            let again = measure_subset(r.post_state.clone(), &[4, 1], &mut rng).unwrap();
            assert_eq!(again.outcome, r.outcome);
            assert_eq!(again.post_state, r.post_state);
        }
    }

    #[test]
    fn same_seed_same_sequence() {
        let s = StateVector::uniform(3).unwrap();
        let run = |seed| {
            let mut rng = RngStream::new(seed);
            (0..32).map(|_| measure_all(s.clone(), &mut rng).outcome).collect::<Vec<_>>()
        };
        assert_eq!(run(3), run(3));
        assert_ne!(run(3), run(4));
        let a: Vec<f64> = (0..4).map(|_| RngStream::derived(3, 1).uniform()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert_ne!(RngStream::derived(3, 1).uniform(), RngStream::derived(3, 2).uniform());
    }

    #[test]
    fn histogram_json_shape() {
        let mut rng = RngStream::new(0);
        let h = sample_counts(&StateVector::zero(3).unwrap(), 7, &mut rng).unwrap();
        assert_eq!(serde_json::to_string(&h).unwrap(), r#"{"shots":7,"counts":{"0":7}}"#);
        assert!(sample_counts(&StateVector::zero(1).unwrap(), 0, &mut rng).is_err());
    }

    #[test]
    fn extinct_branches_are_never_drawn() {
        let tiny = 1e-9;
        let s = StateVector::normalized(vec![c(1.0, 0.0), c(tiny, 0.0)]).unwrap();
        let mut rng = RngStream::new(0);
        let h = sample_counts(&s, 100_000, &mut rng).unwrap();
        assert_eq!(h.count(1), 0);
    }

    #[test]
    fn tv_distance() {
        assert_eq!(total_variation(&[0.5, 0.5], &[1.0]), 0.5);
        assert_eq!(total_variation(&[0.25; 4], &[0.25; 4]), 0.0);
    }
}
