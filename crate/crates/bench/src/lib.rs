//! Shared fixtures for the kernel benchmarks.

use qwire::random::random_state;
use qwire::StateVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Reproducible Haar-random state for a benchmark of `n_qubits`.
pub fn fixture_state(n_qubits: usize) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(n_qubits as u64);
    random_state(n_qubits, &mut rng)
}
