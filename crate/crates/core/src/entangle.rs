//! Separability tests for pure states.
//!
//! A state is split one qubit at a time: the amplitudes are viewed as a
//! `2 x 2^(rest)` matrix and checked to be rank one.

use crate::error::{Error, Result};
use crate::statevec::{StateVector, C64};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// `|α0 α3 - α1 α2| <= tol` for a two-qubit state.
pub fn is_product_2q(state: &StateVector, tol: f64) -> Result<bool> {
    if state.n_qubits() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, actual: state.n_qubits() });
    }
    let a = state.amps();
    Ok((a[0] * a[3] - a[1] * a[2]).norm() <= tol)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Separability {
    /// One-qubit factors, most significant first. Factors after the first
    /// have their first nonzero amplitude real and positive; the global
    /// phase sits in factor 0.
    Product(Vec<StateVector>),
    /// The split after qubit `qubit` is not rank one.
    Entangled { qubit: usize },
}

impl Separability {
    pub fn is_product(&self) -> bool {
        matches!(self, Separability::Product(_))
    }
}

/// Dominant left singular vector of the `2 x m` matrix with rows `r0`, `r1`.
fn dominant_direction(r0: &[C64], r1: &[C64]) -> [C64; 2] {
    let g00: f64 = r0.iter().map(|a| a.norm_sqr()).sum();
    let g11: f64 = r1.iter().map(|a| a.norm_sqr()).sum();
    let g01: C64 = r0.iter().zip(r1).map(|(a, b)| a * b.conj()).sum();
    let half_gap = (g00 - g11) / 2.0;
    let lambda = (g00 + g11) / 2.0 + (half_gap * half_gap + g01.norm_sqr()).sqrt();
    // Two null vectors of G - λI; keep the better conditioned one.
    let from_row0 = [g01, C64::new(lambda - g00, 0.0)];
    let from_row1 = [C64::new(lambda - g11, 0.0), g01.conj()];
    let norm = |v: &[C64; 2]| (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let (v, len) = if norm(&from_row0) >= norm(&from_row1) {
        (from_row0, norm(&from_row0))
    } else {
        (from_row1, norm(&from_row1))
    };
    if len == 0.0 {
        // G is a multiple of I: only possible for a zero matrix here.
        return [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    }
    [v[0] / len, v[1] / len]
}

fn canonical_phase(amps: &[C64]) -> C64 {
    amps.iter().find(|a| a.norm() > 1e-12).map(|a| a.conj() / a.norm()).unwrap_or(C64::new(1.0, 0.0))
}

/// Factor `state` into one-qubit states, or report where that fails.
pub fn factor_product(state: &StateVector, tol: f64) -> Result<Separability> {
    let n = state.n_qubits();
    let mut rest: Vec<C64> = state.amps().to_vec();
    let mut factors: Vec<Vec<C64>> = Vec::with_capacity(n);
    for qubit in 0..n.saturating_sub(1) {
        let half = rest.len() / 2;
        let (r0, r1) = rest.split_at(half);
        let u = dominant_direction(r0, r1);
        let next: Vec<C64> = r0.iter().zip(r1).map(|(a, b)| u[0].conj() * a + u[1].conj() * b).collect();
        let residual: f64 = r0
            .iter()
            .zip(r1)
            .zip(&next)
            .map(|((a, b), v)| (a - u[0] * v).norm_sqr() + (b - u[1] * v).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual > tol {
            return Ok(Separability::Entangled { qubit });
        }
        factors.push(u.to_vec());
        rest = next;
    }
    factors.push(rest);

    let mut global = C64::new(1.0, 0.0);
    for f in factors.iter_mut().skip(1) {
        let norm = f.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let phase = canonical_phase(f);
        f.iter_mut().for_each(|a| *a *= phase / norm);
        global *= norm / phase;
    }
    factors[0].iter_mut().for_each(|a| *a *= global);
    let factors = factors.into_iter().map(StateVector::normalized).collect::<Result<Vec<_>>>()?;
    Ok(Separability::Product(factors))
}

/// Tensor product of a factor list.
pub fn tensor_all(factors: &[StateVector]) -> Result<StateVector> {
    let (first, rest) = factors.split_first().ok_or_else(|| Error::Domain("no factors".into()))?;
    rest.iter().try_fold(first.clone(), |acc, f| acc.tensor(f))
}
