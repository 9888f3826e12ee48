//! Dense unitary gates and their in-place application to a state.
//!
//! Single-qubit gates are applied by strided 2x2 updates over amplitude
//! pairs that differ only in the target bit; nothing here ever builds a
//! `2^n x 2^n` matrix.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::register::QubitRange;
use crate::statevec::{BlochPoint, StateVector, C64};

/// Tolerance of the unitarity validator.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// A dense unitary on `k_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct GateMatrix {
    k_qubits: usize,
    entries: Array2<C64>,
}

impl GateMatrix {
    /// Wrap a square matrix whose side is a power of two. Unitarity is not
    /// checked here; see [`GateMatrix::validate`].
    pub fn new(entries: Array2<C64>) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols || rows < 2 || !rows.is_power_of_two() {
            return Err(Error::DimensionMismatch { expected: rows.next_power_of_two().max(2), actual: cols });
        }
        Ok(Self { k_qubits: rows.trailing_zeros() as usize, entries })
    }

    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Result<Self> {
        let flat: Vec<C64> = rows.iter().flatten().copied().collect();
        Self::new(Array2::from_shape_vec((N, N), flat).expect("square"))
    }

    pub fn identity(k_qubits: usize) -> Self {
        let dim = 1usize << k_qubits;
        Self { k_qubits, entries: Array2::from_diag_elem(dim, C64::new(1.0, 0.0)) }
    }

    pub fn k_qubits(&self) -> usize {
        self.k_qubits
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn adjoint(&self) -> GateMatrix {
        GateMatrix { k_qubits: self.k_qubits, entries: self.entries.t().mapv(|v| v.conj()) }
    }

    pub fn matmul(&self, other: &GateMatrix) -> Result<GateMatrix> {
        if self.k_qubits != other.k_qubits {
            return Err(Error::DimensionMismatch { expected: self.k_qubits, actual: other.k_qubits });
        }
        Ok(GateMatrix { k_qubits: self.k_qubits, entries: self.entries.dot(&other.entries) })
    }

    /// `max |U U^† - I|` over all entries.
    pub fn unitarity_deviation(&self) -> f64 {
        let product = self.entries.dot(&self.adjoint().entries);
        product
            .indexed_iter()
            .map(|((i, j), v)| (v - if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).norm())
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let deviation = self.unitarity_deviation();
        if deviation.is_nan() || deviation >= UNITARY_TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &GateMatrix) -> f64 {
        self.entries.iter().zip(other.entries.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    fn as_2x2(&self) -> Result<[[C64; 2]; 2]> {
        if self.k_qubits != 1 {
            return Err(Error::DimensionMismatch { expected: 1, actual: self.k_qubits });
        }
        let e = &self.entries;
        Ok([[e[[0, 0]], e[[0, 1]]], [e[[1, 0]], e[[1, 1]]]])
    }
}

/// The named gates of the standard set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StandardGate {
    H,
    X,
    Y,
    Z,
    I,
    Cnot,
}

impl StandardGate {
    pub fn matrix(self) -> GateMatrix {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let m = match self {
            StandardGate::H => GateMatrix::from_rows([[h, h], [h, -h]]),
            StandardGate::X => GateMatrix::from_rows([[o, l], [l, o]]),
            StandardGate::Y => GateMatrix::from_rows([[o, -i], [i, o]]),
            StandardGate::Z => GateMatrix::from_rows([[l, o], [o, -l]]),
            StandardGate::I => GateMatrix::from_rows([[l, o], [o, l]]),
            StandardGate::Cnot => GateMatrix::from_rows([[l, o, o, o], [o, l, o, o], [o, o, o, l], [o, o, l, o]]),
        };
        m.expect("standard gates are well formed")
    }
}

impl FromStr for StandardGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "H" => Ok(StandardGate::H),
            "X" => Ok(StandardGate::X),
            "Y" => Ok(StandardGate::Y),
            "Z" => Ok(StandardGate::Z),
            "I" => Ok(StandardGate::I),
            "CNOT" | "CX" => Ok(StandardGate::Cnot),
            _ => Err(Error::UnknownGate(s.to_string())),
        }
    }
}

impl fmt::Display for StandardGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            StandardGate::H => "h",
            StandardGate::X => "x",
            StandardGate::Y => "y",
            StandardGate::Z => "z",
            StandardGate::I => "i",
            StandardGate::Cnot => "cnot",
        };
        f.write_str(name)
    }
}

/// Look up a gate by name (`H`, `X`, `Y`, `Z`, `I`, `CNOT`; case-insensitive).
pub fn standard_gate(name: &str) -> Result<GateMatrix> {
    name.parse::<StandardGate>().map(StandardGate::matrix)
}

pub(crate) fn apply_2x2(amps: &mut [C64], shift: usize, g: &[[C64; 2]; 2]) {
    let stride = 1usize << shift;
    for chunk in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = chunk.split_at_mut(stride);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a0, *a1);
            *a0 = g[0][0] * x + g[0][1] * y;
            *a1 = g[1][0] * x + g[1][1] * y;
        }
    }
}

/// Apply a single-qubit gate to `qubit`.
pub fn apply_1q(state: &mut StateVector, gate: &GateMatrix, qubit: usize) -> Result<()> {
    let g = gate.as_2x2()?;
    state.check_qubit(qubit)?;
    let shift = state.qubit_shift(qubit);
    apply_2x2(state.amps_mut(), shift, &g);
    Ok(())
}

/// Unnormalized in-place Walsh-Hadamard butterflies on a `2^k` buffer.
pub(crate) fn walsh_hadamard(buf: &mut [C64]) {
    let n = buf.len();
    let mut half = 1;
    while half < n {
        for chunk in buf.chunks_exact_mut(half << 1) {
            let (lo, hi) = chunk.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half <<= 1;
    }
    let scale = 1.0 / (n as f64).sqrt();
    buf.iter_mut().for_each(|a| *a *= scale);
}

/// `H^{⊗len}` on a contiguous range of qubits.
pub fn apply_hadamard_range(state: &mut StateVector, range: QubitRange) -> Result<()> {
    range.check(state.n_qubits())?;
    let layout = range.layout(state.n_qubits());
    layout.for_each_fiber(state.amps_mut(), true, walsh_hadamard);
    Ok(())
}

/// `H^{⊗n}` on every qubit.
pub fn apply_hadamard_all(state: &mut StateVector) {
    walsh_hadamard(state.amps_mut());
}

/// Controlled-NOT: flips `target` wherever `control` is 1.
pub fn apply_cnot(state: &mut StateVector, control: usize, target: usize) -> Result<()> {
    state.check_qubit(control)?;
    state.check_qubit(target)?;
    if control == target {
        return Err(Error::ControlEqualsTarget(control));
    }
    let cbit = 1usize << state.qubit_shift(control);
    let tbit = 1usize << state.qubit_shift(target);
    let amps = state.amps_mut();
    for i in 0..amps.len() {
        if i & cbit != 0 && i & tbit == 0 {
            amps.swap(i, i | tbit);
        }
    }
    Ok(())
}

/// Angles of `U = e^{iα} Rz(β) Ry(γ) Rz(δ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZyzAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// `diag(e^{-iθ/2}, e^{iθ/2})`.
pub fn rz(theta: f64) -> GateMatrix {
    let o = C64::new(0.0, 0.0);
    GateMatrix::from_rows([[C64::from_polar(1.0, -theta / 2.0), o], [o, C64::from_polar(1.0, theta / 2.0)]])
        .expect("2x2")
}

/// Real rotation `[[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]`.
pub fn ry(theta: f64) -> GateMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    GateMatrix::from_rows([[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]]).expect("2x2")
}

impl ZyzAngles {
    pub fn reconstruct(&self) -> GateMatrix {
        let m = rz(self.beta).matmul(&ry(self.gamma)).and_then(|m| m.matmul(&rz(self.delta))).expect("2x2");
        let phase = C64::from_polar(1.0, self.alpha);
        GateMatrix { k_qubits: 1, entries: m.entries.mapv(|v| v * phase) }
    }
}

/// Below this magnitude an entry's phase carries no information.
const PHASE_FLOOR: f64 = 1e-14;

/// Split a single-qubit unitary into a global phase and Z-Y-Z rotations.
/// Angles are not unique; the result reproduces `u` within 1e-10 with
/// `α ∈ (-π, π]`, `γ ∈ [0, π]` and `β, δ ∈ (-2π, 2π]`.
pub fn zyz_decompose(u: &GateMatrix) -> Result<ZyzAngles> {
    let m = u.as_2x2()?;
    u.validate()?;
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let alpha = det.arg() / 2.0;
    let unphase = C64::from_polar(1.0, -alpha);
    let v10 = m[1][0] * unphase;
    let v11 = m[1][1] * unphase;
    let gamma = 2.0 * v10.norm().atan2(v11.norm());
    let sum_half = if v11.norm() > PHASE_FLOOR { v11.arg() } else { 0.0 };
    let diff_half = if v10.norm() > PHASE_FLOOR { v10.arg() } else { 0.0 };
    Ok(ZyzAngles { alpha, beta: sum_half + diff_half, gamma, delta: sum_half - diff_half })
}

/// Bloch-sphere coordinates of a one-qubit state, global phase removed.
/// At the poles `φ` is fixed to 0.
pub fn bloch_coords(state: &StateVector) -> Result<BlochPoint> {
    if state.n_qubits() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, actual: state.n_qubits() });
    }
    let (a, b) = (state.amplitude(0), state.amplitude(1));
    let theta = 2.0 * a.norm().min(1.0).acos();
    let pole = a.norm() < 1e-12 || b.norm() < 1e-12;
    let phi = if pole {
        0.0
    } else {
        let p = (b * a.conj()).arg().rem_euclid(TAU);
        if p >= TAU {
            0.0
        } else {
            p
        }
    };
    Ok(BlochPoint { theta: theta.clamp(0.0, PI), phi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_state, random_unitary_2x2};
    use crate::statevec::kron;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Explicit `I ⊗ .. ⊗ g ⊗ .. ⊗ I` for the oracle checks.
    fn embed(g: &GateMatrix, qubit: usize, n: usize) -> Array2<C64> {
        let id = GateMatrix::identity(1);
        let mut m = Array2::from_elem((1, 1), c(1.0, 0.0));
        for q in 0..n {
            m = kron(&m, if q == qubit { g.entries() } else { id.entries() });
        }
        m
    }

    #[test]
    fn standard_gates_are_unitary() {
        for g in
            [StandardGate::H, StandardGate::X, StandardGate::Y, StandardGate::Z, StandardGate::I, StandardGate::Cnot]
        {
            assert!(g.matrix().unitarity_deviation() < 1e-12, "{g}");
        }
        assert!(matches!(standard_gate("toffoli"), Err(Error::UnknownGate(_))));
        assert_eq!(standard_gate("cnot").unwrap().k_qubits(), 2);
    }

    #[test]
    fn involutions_and_pauli_algebra() {
        let i = StandardGate::I.matrix();
        for g in [StandardGate::H, StandardGate::X, StandardGate::Y, StandardGate::Z] {
            let m = g.matrix();
            assert!(m.matmul(&m).unwrap().max_abs_diff(&i) < 1e-15, "{g}^2 != I");
        }
        let (x, y, z) = (StandardGate::X.matrix(), StandardGate::Y.matrix(), StandardGate::Z.matrix());
        for (a, b) in [(&x, &y), (&y, &z), (&x, &z)] {
            let ab = a.matmul(b).unwrap();
            let ba = b.matmul(a).unwrap();
            assert!(ab.entries().iter().zip(ba.entries().iter()).all(|(p, q)| (p + q).norm() < 1e-15));
        }
        let iz = z.entries().mapv(|v| v * c(0.0, 1.0));
        assert_eq!(x.matmul(&y).unwrap().entries(), &iz);
    }

    #[test]
    fn hadamard_and_pauli_on_basis_states() {
        let mut s = StateVector::zero(1).unwrap();
        apply_1q(&mut s, &StandardGate::H.matrix(), 0).unwrap();
        assert!((s.amplitude(0) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((s.amplitude(1) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        for j in 0..2 {
            let mut s = StateVector::basis(1, j).unwrap();
            apply_1q(&mut s, &StandardGate::X.matrix(), 0).unwrap();
            assert_eq!(s, StateVector::basis(1, 1 ^ j).unwrap());
        }
        let mut s = StateVector::normalized(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        apply_1q(&mut s, &StandardGate::Z.matrix(), 0).unwrap();
        assert_eq!(s.amps(), &[c(0.6, 0.0), c(0.0, -0.8)]);
        let before = s.clone();
        apply_1q(&mut s, &StandardGate::I.matrix(), 0).unwrap();
        assert_eq!(s, before);
        assert!(apply_1q(&mut s, &StandardGate::H.matrix(), 1).is_err());
        assert!(apply_1q(&mut s, &StandardGate::Cnot.matrix(), 0).is_err());
    }

    #[test]
    fn hadamard_on_qubit_zero_of_two() {
        let mut s = StateVector::zero(2).unwrap();
        apply_1q(&mut s, &StandardGate::H.matrix(), 0).unwrap();
        let h = FRAC_1_SQRT_2;
        let expected = [c(h, 0.0), c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0)];
        assert!(s.amps().iter().zip(expected).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn apply_1q_matches_kron_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=8 {
            for q in 0..n {
                let g = random_unitary_2x2(&mut rng);
                let s = random_state(n, &mut rng);
                let dense = embed(&g, q, n);
                let v = ndarray::Array1::from(s.amps().to_vec());
                let expect = dense.dot(&v);
                let mut got = s.clone();
                apply_1q(&mut got, &g, q).unwrap();
                let err = got.amps().iter().zip(expect.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(err < 1e-10, "n={n} q={q} err={err}");
                assert!((got.norm_sqr() - s.norm_sqr()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hadamard_wall() {
        let mut s = StateVector::zero(4).unwrap();
        apply_hadamard_all(&mut s);
        assert!(s.amps().iter().all(|a| (a - c(0.25, 0.0)).norm() < 1e-15));

        // |5>_3 picks up (-1)^{popcount(5 & k)}.
        let mut s = StateVector::basis(3, 5).unwrap();
        apply_hadamard_all(&mut s);
        let signs: Vec<f64> = (0..8u32).map(|k| if (5 & k).count_ones() % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(signs, [1.0, -1.0, 1.0, -1.0, -1.0, 1.0, -1.0, 1.0]);
        let r = 1.0 / 8f64.sqrt();
        for (a, sg) in s.amps().iter().zip(&signs) {
            assert!((a - c(sg * r, 0.0)).norm() < 1e-15);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let orig = random_state(5, &mut rng);
        let mut s = orig.clone();
        apply_hadamard_all(&mut s);
        apply_hadamard_all(&mut s);
        assert!(s.max_abs_diff(&orig).unwrap() < 1e-14);
    }

    #[test]
    fn hadamard_range_matches_per_qubit_hadamards() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = StandardGate::H.matrix();
        for (start, len) in [(0, 3), (1, 2), (2, 3), (4, 1)] {
            let s = random_state(5, &mut rng);
            let mut a = s.clone();
            apply_hadamard_range(&mut a, QubitRange::new(start, len)).unwrap();
            let mut b = s.clone();
            for q in start..start + len {
                apply_1q(&mut b, &h, q).unwrap();
            }
            assert!(a.max_abs_diff(&b).unwrap() < 1e-13);
        }
    }

    #[test]
    fn cnot_examples() {
        let h = FRAC_1_SQRT_2;
        let mut s = StateVector::from_amplitudes(vec![c(h, 0.0), c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0)]).unwrap();
        apply_cnot(&mut s, 0, 1).unwrap();
        assert_eq!(s.amps(), &[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]);

        let mut z = StateVector::zero(2).unwrap();
        apply_cnot(&mut z, 0, 1).unwrap();
        assert_eq!(z, StateVector::zero(2).unwrap());
        assert!(matches!(apply_cnot(&mut z, 1, 1), Err(Error::ControlEqualsTarget(1))));

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let orig = random_state(4, &mut rng);
            let mut s = orig.clone();
            apply_cnot(&mut s, 3, 1).unwrap();
            apply_cnot(&mut s, 3, 1).unwrap();
            assert_eq!(s, orig);
        }
    }

    #[test]
    fn zyz_identity_is_canonical() {
        let a = zyz_decompose(&GateMatrix::identity(1)).unwrap();
        assert_eq!(a, ZyzAngles { alpha: 0.0, beta: 0.0, gamma: 0.0, delta: 0.0 });
    }

    #[test]
    fn zyz_reconstructs_named_gates() {
        for g in [StandardGate::H, StandardGate::X, StandardGate::Y, StandardGate::Z] {
            let m = g.matrix();
            let angles = zyz_decompose(&m).unwrap();
            assert!(angles.reconstruct().max_abs_diff(&m) < 1e-10, "{g}: {angles:?}");
            assert!((0.0..=PI).contains(&angles.gamma));
            assert!(angles.alpha > -PI && angles.alpha <= PI);
        }
    }

    #[test]
    fn zyz_rejects_non_unitary() {
        let m = GateMatrix::from_rows([[c(1.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]).unwrap();
        assert!(matches!(zyz_decompose(&m), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn bloch_poles_and_equator() {
        let p = bloch_coords(&StateVector::basis(1, 0).unwrap()).unwrap();
        assert_eq!((p.theta, p.phi), (0.0, 0.0));
        let p = bloch_coords(&StateVector::basis(1, 1).unwrap()).unwrap();
        assert!((p.theta - PI).abs() < 1e-15 && p.phi == 0.0);
        let p = bloch_coords(&StateVector::uniform(1).unwrap()).unwrap();
        assert!((p.theta - FRAC_PI_2).abs() < 1e-12 && p.phi.abs() < 1e-12);
        // Global phase is irrelevant; |0> + i|1> sits at φ = π/2.
        let s = StateVector::normalized(vec![c(0.0, 1.0), c(-1.0, 0.0)]).unwrap();
        let p = bloch_coords(&s).unwrap();
        assert!((p.phi - FRAC_PI_2).abs() < 1e-12, "{p:?}");
        assert!(bloch_coords(&StateVector::zero(2).unwrap()).is_err());
    }
}
