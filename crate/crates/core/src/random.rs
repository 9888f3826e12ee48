//! Haar-random states and unitaries for tests, benches and sweeps.

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::gates::GateMatrix;
use crate::statevec::{StateVector, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed pure state on `n_qubits` qubits.
pub fn random_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> StateVector {
    loop {
        let amps: Vec<C64> = (0..1usize << n_qubits).map(|_| gaussian(rng)).collect();
        if let Ok(s) = StateVector::normalized(amps) {
            return s;
        }
    }
}

/// Haar-distributed unitary on `k_qubits` qubits: Gram-Schmidt on a complex
/// Ginibre matrix, which is the QR factor with a positive-diagonal R.
pub fn random_unitary<R: Rng + ?Sized>(k_qubits: usize, rng: &mut R) -> GateMatrix {
    let dim = 1usize << k_qubits;
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        for u in &cols {
            let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(u).for_each(|(b, a)| *b -= proj * a);
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|a| *a /= norm);
            cols.push(v);
        }
    }
    let m = Array2::from_shape_fn((dim, dim), |(i, j)| cols[j][i]);
    GateMatrix::new(m).expect("power-of-two side")
}

pub fn random_unitary_2x2<R: Rng + ?Sized>(rng: &mut R) -> GateMatrix {
    random_unitary(1, rng)
}

/// A product of `n_qubits` random single-qubit states, with its factors.
pub fn random_product_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> (StateVector, Vec<StateVector>) {
    let factors: Vec<StateVector> = (0..n_qubits).map(|_| random_state(1, rng)).collect();
    let mut state = factors[0].clone();
    for f in &factors[1..] {
        state = state.tensor(f).expect("within qubit limit");
    }
    (state, factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_objects_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 1..=4 {
            assert!(random_unitary(k, &mut rng).unitarity_deviation() < 1e-12);
        }
        for n in 1..=6 {
            assert!(random_state(n, &mut rng).is_normalized());
        }
        let (s, f) = random_product_state(4, &mut rng);
        assert_eq!(f.len(), 4);
        assert!(s.is_normalized());
    }
}
