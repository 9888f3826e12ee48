//! Contiguous qubit ranges and the strided "fiber" view they induce on a
//! flat amplitude array.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::C64;

/// Qubits `start .. start + len` of a register, `start` being the most
/// significant of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QubitRange {
    pub start: usize,
    pub len: usize,
}

impl QubitRange {
    pub fn new(start: usize, len: usize) -> Self {
        Self { start, len }
    }

    /// Inclusive `lo..=hi`.
    pub fn inclusive(lo: usize, hi: usize) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidArgument(format!("empty qubit range {lo}..{hi}")));
        }
        Ok(Self { start: lo, len: hi - lo + 1 })
    }

    /// The first `len` qubits.
    pub fn leading(len: usize) -> Self {
        Self { start: 0, len }
    }

    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn last(&self) -> usize {
        self.end() - 1
    }

    pub fn contains(&self, qubit: usize) -> bool {
        qubit >= self.start && qubit < self.end()
    }

    pub fn overlaps(&self, other: &QubitRange) -> bool {
        self.start < other.end() && other.start < self.end()
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        self.start..self.end()
    }

    pub fn check(&self, n_qubits: usize) -> Result<()> {
        if self.len == 0 {
            return Err(Error::InvalidArgument("empty qubit range".into()));
        }
        if self.end() > n_qubits {
            return Err(Error::QubitOutOfRange { qubit: self.last(), n_qubits });
        }
        Ok(())
    }

    /// Geometry of this range inside an `n_qubits` register.
    pub(crate) fn layout(&self, n_qubits: usize) -> Layout {
        Layout { low_bits: n_qubits - self.end(), len: self.len, high_count: 1usize << self.start }
    }
}

impl fmt::Display for QubitRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.last())
    }
}

/// Index decomposition `i = (high << (len + low_bits)) | (value << low_bits) | low`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Layout {
    pub low_bits: usize,
    pub len: usize,
    pub high_count: usize,
}

impl Layout {
    #[inline]
    pub fn stride(&self) -> usize {
        1usize << self.low_bits
    }

    #[inline]
    pub fn block_dim(&self) -> usize {
        1usize << self.len
    }

    #[inline]
    pub fn value_of(&self, index: usize) -> usize {
        (index >> self.low_bits) & (self.block_dim() - 1)
    }

    /// Number of fibers, i.e. configurations of the qubits outside the range.
    pub fn fiber_count(&self) -> usize {
        self.high_count << self.low_bits
    }

    #[inline]
    pub fn fiber_base(&self, fiber: usize) -> usize {
        let high = fiber >> self.low_bits;
        let low = fiber & (self.stride() - 1);
        (high << (self.len + self.low_bits)) | low
    }

    #[inline]
    pub fn fiber_of(&self, index: usize) -> usize {
        let high = index >> (self.len + self.low_bits);
        (high << self.low_bits) | (index & (self.stride() - 1))
    }

    /// Flags for fibers holding at least one nonzero amplitude.
    pub fn active_fibers(&self, amps: &[C64]) -> Vec<bool> {
        let mut active = vec![false; self.fiber_count()];
        let zero = C64::new(0.0, 0.0);
        for (i, a) in amps.iter().enumerate() {
            if *a != zero {
                active[self.fiber_of(i)] = true;
            }
        }
        active
    }

    /// Run `op` on every fiber (the `2^len` amplitudes sharing the outside
    /// configuration), optionally skipping all-zero fibers. `op` sees the
    /// fiber as a contiguous buffer in block-value order.
    pub fn for_each_fiber(&self, amps: &mut [C64], skip_zero: bool, mut op: impl FnMut(&mut [C64])) {
        let dim = self.block_dim();
        let active = skip_zero.then(|| self.active_fibers(amps));
        if self.low_bits == 0 {
            for (fiber, chunk) in amps.chunks_exact_mut(dim).enumerate() {
                if active.as_ref().is_none_or(|a| a[fiber]) {
                    op(chunk);
                }
            }
            return;
        }
        let stride = self.stride();
        let mut buf = vec![C64::new(0.0, 0.0); dim];
        for fiber in 0..self.fiber_count() {
            if active.as_ref().is_some_and(|a| !a[fiber]) {
                continue;
            }
            let base = self.fiber_base(fiber);
            for (j, b) in buf.iter_mut().enumerate() {
                *b = amps[base + j * stride];
            }
            op(&mut buf);
            for (j, b) in buf.iter().enumerate() {
                amps[base + j * stride] = *b;
            }
        }
    }
}
