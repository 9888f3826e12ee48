//! Dense n-qubit pure states and the tensor-algebra primitives built on them.
//!
//! Amplitudes are stored flat, indexed by the basis integer. Qubit 0 is the
//! leftmost tensor factor and therefore the most significant bit of the
//! index: `|a_{n-1} ... a_1 a_0>` has `a_0` in bit 0 and lives at qubit
//! `n - 1`.

use std::sync::atomic::{AtomicUsize, Ordering};

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Allowed deviation of `sum |a_j|^2` from one for a valid state.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Raw amplitudes whose squared norm is off by at most this much are
/// silently renormalized; anything further is rejected.
pub const RENORMALIZE_LIMIT: f64 = 1e-6;

pub const DEFAULT_MAX_QUBITS: usize = 26;

static MAX_QUBITS: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_QUBITS);

/// Current upper bound on the qubit count of any constructed state.
pub fn max_qubits() -> usize {
    MAX_QUBITS.load(Ordering::Relaxed)
}

/// Override the qubit limit (default 26, i.e. 1 GiB of amplitudes).
pub fn set_max_qubits(limit: usize) {
    MAX_QUBITS.store(limit.clamp(1, 62), Ordering::Relaxed);
}

fn check_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::InvalidArgument("a state needs at least one qubit".into()));
    }
    let limit = max_qubits();
    if n_qubits > limit {
        return Err(Error::TooManyQubits { n_qubits, limit });
    }
    Ok(())
}

/// A pure state of `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

/// Spherical coordinates of a single-qubit state modulo global phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    /// Polar angle in `[0, pi]`.
    pub theta: f64,
    /// Azimuth in `[0, 2 pi)`.
    pub phi: f64,
}

/// All-zero amplitudes straight from the allocator, so large registers skip
/// an explicit fill.
fn zeroed(n_qubits: usize) -> Vec<C64> {
    bytemuck::zeroed_vec(1usize << n_qubits)
}

impl StateVector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mut amps = zeroed(n_qubits);
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// The computational basis state `|a>_n`.
    pub fn basis(n_qubits: usize, index: u64) -> Result<Self> {
        check_qubits(n_qubits)?;
        if index >= (1u64 << n_qubits) {
            return Err(Error::IndexOutOfRange { index, n_qubits });
        }
        let mut amps = zeroed(n_qubits);
        amps[index as usize] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// The uniform superposition `|gamma>_n`.
    pub fn uniform(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self { n_qubits, amps: vec![a; dim] })
    }

    /// Build a state from raw amplitudes. The length must be a power of two.
    /// Small normalization drift (up to [`RENORMALIZE_LIMIT`]) is corrected.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch { expected: len.next_power_of_two().max(2), actual: len });
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_qubits(n_qubits)?;
        let mut state = Self { n_qubits, amps };
        let norm_sqr = state.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > RENORMALIZE_LIMIT {
            return Err(Error::NotNormalized { norm_sqr });
        }
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            state.renormalize();
        }
        Ok(state)
    }

    /// Like [`from_amplitudes`](Self::from_amplitudes) but scales any nonzero
    /// vector to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr == 0.0 || !norm_sqr.is_finite() {
            return Err(Error::NotNormalized { norm_sqr });
        }
        let scale = 1.0 / norm_sqr.sqrt();
        Self::from_amplitudes(amps.into_iter().map(|a| a * scale).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    /// Back to `|0...0>`, keeping the allocation.
    pub(crate) fn reset(&mut self) {
        self.amps.fill(C64::new(0.0, 0.0));
        self.amps[0] = C64::new(1.0, 0.0);
    }

    pub(crate) fn renormalize(&mut self) {
        let scale = 1.0 / self.norm_sqr().sqrt();
        self.amps.iter_mut().for_each(|a| *a *= scale);
    }

    /// Bit of `index` that holds `qubit`.
    #[inline]
    pub fn qubit_shift(&self, qubit: usize) -> usize {
        self.n_qubits - 1 - qubit
    }

    pub(crate) fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange { qubit, n_qubits: self.n_qubits });
        }
        Ok(())
    }

    /// `self ⊗ other`: the amplitude at `i * 2^{n_b} + j` is `a_i * b_j`.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n_qubits = self.n_qubits + other.n_qubits;
        check_qubits(n_qubits)?;
        let mut amps = Vec::with_capacity(1usize << n_qubits);
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(StateVector { n_qubits, amps })
    }

    /// `<self|other> = sum conj(a_j) b_j`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_same_dim(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|self><other|`, entry `(i, j) = a_i conj(b_j)`.
    pub fn outer(&self, other: &StateVector) -> Result<Array2<C64>> {
        self.check_same_dim(other)?;
        let dim = self.dim();
        Ok(Array2::from_shape_fn((dim, dim), |(i, j)| self.amps[i] * other.amps[j].conj()))
    }

    /// Measurement probabilities `|a_j|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Index of the largest-magnitude amplitude (first one on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        let mut best_p = -1.0;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > best_p {
                best = i;
                best_p = p;
            }
        }
        best
    }

    /// Largest `|a_i - b_i|` between two states of the same size.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    fn check_same_dim(&self, other: &StateVector) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, actual: other.n_qubits });
        }
        Ok(())
    }
}

/// Kronecker product of two dense matrices: the block matrix `[a_ij * B]`.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &aij) in a.indexed_iter() {
        if aij == C64::new(0.0, 0.0) {
            continue;
        }
        let mut block = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
        block.zip_mut_with(b, |o, &bv| *o = aij * bv);
    }
    out
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    n: usize,
    amps: Vec<[f64; 2]>,
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StateRepr { n: self.n_qubits, amps: self.amps.iter().map(|a| [a.re, a.im]).collect() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = StateRepr::deserialize(deserializer)?;
        let amps: Vec<C64> = repr.amps.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        let state = StateVector::from_amplitudes(amps).map_err(serde::de::Error::custom)?;
        if state.n_qubits != repr.n {
            return Err(serde::de::Error::custom(format!(
                "\"n\" is {} but {} amplitudes were given",
                repr.n,
                state.dim()
            )));
        }
        Ok(state)
    }
}
