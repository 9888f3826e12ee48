//! Structured multi-qubit unitaries: oracle gates, modular exponentiation,
//! the QFT, Grover diffusion and the Grover and counting gates.
//!
//! Block transforms act on a contiguous [`QubitRange`]. Each configuration
//! of the remaining qubits selects a fiber of `2^len` amplitudes, which is
//! transformed independently; all-zero fibers are skipped.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numtheory::{check_modulus, gcd_nonzero, mulmod};
use crate::register::QubitRange;
use crate::statevec::{max_qubits, StateVector, C64};

/// A total function `{0..2^n} -> {0..2^m}`, stored as a truth table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalOracle {
    in_bits: usize,
    out_bits: usize,
    table: Arc<[u64]>,
}

impl ClassicalOracle {
    pub fn new(in_bits: usize, out_bits: usize, table: Vec<u64>) -> Result<Self> {
        if in_bits == 0 || out_bits == 0 || in_bits + out_bits > 63 {
            return Err(Error::OracleShape(format!("unsupported shape {in_bits} -> {out_bits}")));
        }
        if in_bits > max_qubits() {
            return Err(Error::TooManyQubits { n_qubits: in_bits, limit: max_qubits() });
        }
        if table.len() != 1usize << in_bits {
            return Err(Error::OracleShape(format!("table has {} entries, expected {}", table.len(), 1u64 << in_bits)));
        }
        if let Some((j, v)) = table.iter().enumerate().find(|(_, &v)| v >> out_bits != 0) {
            return Err(Error::OracleShape(format!("f({j}) = {v} does not fit {out_bits} bits")));
        }
        Ok(Self { in_bits, out_bits, table: table.into() })
    }

    /// Tabulate `f` over every input.
    pub fn from_fn(in_bits: usize, out_bits: usize, f: impl FnMut(u64) -> u64) -> Result<Self> {
        if in_bits > max_qubits() {
            return Err(Error::TooManyQubits { n_qubits: in_bits, limit: max_qubits() });
        }
        Self::new(in_bits, out_bits, (0..1u64 << in_bits).map(f).collect())
    }

    pub fn constant(in_bits: usize, out_bits: usize, value: u64) -> Result<Self> {
        Self::from_fn(in_bits, out_bits, |_| value)
    }

    /// Single-output indicator of `marked`.
    pub fn marking(in_bits: usize, marked: &[u64]) -> Result<Self> {
        let mut table = vec![0; 1usize << in_bits];
        for &j in marked {
            *table.get_mut(j as usize).ok_or(Error::IndexOutOfRange { index: j, n_qubits: in_bits })? = 1;
        }
        Self::new(in_bits, 1, table)
    }

    pub fn in_bits(&self) -> usize {
        self.in_bits
    }

    pub fn out_bits(&self) -> usize {
        self.out_bits
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    #[inline]
    pub fn eval(&self, j: u64) -> u64 {
        self.table[j as usize]
    }

    /// Inputs with `f(j) != 0`.
    pub fn support(&self) -> Vec<u64> {
        (0..self.table.len() as u64).filter(|&j| self.eval(j) != 0).collect()
    }

    /// Parse the text format: a header line `n m`, then one `j f(j)` line
    /// per input in decimal. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let located = |line: usize, msg: String| Error::OracleShape(format!("line {line}: {msg}"));
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let pair = |line: usize, l: &str| -> Result<(u64, u64)> {
            let mut it = l.split_whitespace();
            let a = it.next().ok_or_else(|| located(line, "expected two integers".into()))?;
            let b = it.next().ok_or_else(|| located(line, "expected two integers".into()))?;
            if it.next().is_some() {
                return Err(located(line, "trailing tokens".into()));
            }
            let a = a.parse().map_err(|_| located(line, format!("invalid integer `{a}`")))?;
            let b = b.parse().map_err(|_| located(line, format!("invalid integer `{b}`")))?;
            Ok((a, b))
        };
        let (line, header) = lines.next().ok_or_else(|| located(1, "missing `n m` header".into()))?;
        let (n, m) = pair(line, header)?;
        if n == 0 || m == 0 || n as usize > max_qubits() || n + m > 63 {
            return Err(located(line, format!("unsupported shape {n} {m}")));
        }
        let mut table: Vec<Option<u64>> = vec![None; 1usize << n];
        let mut last_line = line;
        for (line, l) in lines {
            last_line = line;
            let (j, v) = pair(line, l)?;
            let slot = table
                .get_mut(j as usize)
                .ok_or_else(|| located(line, format!("input {j} out of range for {n} bits")))?;
            if slot.is_some() {
                return Err(located(line, format!("input {j} given twice")));
            }
            if v >> m != 0 {
                return Err(located(line, format!("output {v} does not fit {m} bits")));
            }
            *slot = Some(v);
        }
        if let Some(j) = table.iter().position(Option::is_none) {
            return Err(located(last_line, format!("no value for input {j}")));
        }
        Self::new(n as usize, m as usize, table.into_iter().map(Option::unwrap).collect())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::OracleShape(msg) => Error::OracleShape(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.in_bits, self.out_bits);
        for (j, v) in self.table.iter().enumerate() {
            out.push_str(&format!("{j} {v}\n"));
        }
        out
    }

    fn require_single_output(&self) -> Result<()> {
        if self.out_bits != 1 {
            return Err(Error::OracleShape(format!("expected one output bit, got {}", self.out_bits)));
        }
        Ok(())
    }
}

fn check_disjoint(a: QubitRange, b: QubitRange) -> Result<()> {
    if a.overlaps(&b) {
        return Err(Error::InvalidQubitSet(format!("ranges {a} and {b} overlap")));
    }
    Ok(())
}

/// `|j>|k> -> |j>|k xor f(j)>` with `j` read from `input` and `k` from `output`.
pub fn apply_oracle_on(
    state: &mut StateVector,
    f: &ClassicalOracle,
    input: QubitRange,
    output: QubitRange,
) -> Result<()> {
    let n = state.n_qubits();
    input.check(n)?;
    output.check(n)?;
    check_disjoint(input, output)?;
    if input.len != f.in_bits() || output.len != f.out_bits() {
        return Err(Error::OracleShape(format!(
            "oracle is {} -> {} but registers are {} -> {}",
            f.in_bits(),
            f.out_bits(),
            input.len,
            output.len
        )));
    }
    let in_layout = input.layout(n);
    let out_shift = n - output.end();
    let amps = state.amps_mut();
    for i in 0..amps.len() {
        let y = f.eval(in_layout.value_of(i) as u64) as usize;
        if y != 0 {
            let partner = i ^ (y << out_shift);
            if partner > i {
                amps.swap(i, partner);
            }
        }
    }
    Ok(())
}

/// Oracle on a state of exactly `n + m` qubits: input leading, output trailing.
pub fn apply_oracle(state: &mut StateVector, f: &ClassicalOracle) -> Result<()> {
    let (n, m) = (f.in_bits(), f.out_bits());
    if state.n_qubits() != n + m {
        return Err(Error::DimensionMismatch { expected: n + m, actual: state.n_qubits() });
    }
    apply_oracle_on(state, f, QubitRange::leading(n), QubitRange::new(n, m))
}

/// Negate the amplitudes whose `range` value is marked by `f`. Equivalent to
/// the oracle gate with its output qubit prepared in `|->`.
pub fn apply_phase_oracle(state: &mut StateVector, f: &ClassicalOracle, range: QubitRange) -> Result<()> {
    f.require_single_output()?;
    range.check(state.n_qubits())?;
    if range.len != f.in_bits() {
        return Err(Error::OracleShape(format!("oracle takes {} bits, range has {}", f.in_bits(), range.len)));
    }
    let layout = range.layout(state.n_qubits());
    for (i, a) in state.amps_mut().iter_mut().enumerate() {
        if f.eval(layout.value_of(i) as u64) != 0 {
            *a = -*a;
        }
    }
    Ok(())
}

/// `|j>_t |k>_n -> |j>_t |(k + x^j) mod N>_n` for `k < N`; rows with `k >= N`
/// are left alone.
pub fn apply_modexp(state: &mut StateVector, x: u64, modulus: u64, t_qubits: usize, n_qubits: usize) -> Result<()> {
    check_modulus(modulus)?;
    if x <= 1 || x >= modulus {
        return Err(Error::Domain(format!("base {x} must satisfy 1 < x < {modulus}")));
    }
    if gcd_nonzero(x, modulus) != 1 {
        return Err(Error::NotCoprime(x, modulus));
    }
    if state.n_qubits() != t_qubits + n_qubits {
        return Err(Error::DimensionMismatch { expected: t_qubits + n_qubits, actual: state.n_qubits() });
    }
    if n_qubits >= 64 || (1u64 << n_qubits) < modulus {
        return Err(Error::Domain(format!("{n_qubits} qubits cannot hold residues mod {modulus}")));
    }
    let n = modulus as usize;
    let zero = C64::new(0.0, 0.0);
    // x^j is carried along the rows, one multiplication per row.
    let mut power = 1u64;
    for row in state.amps_mut().chunks_exact_mut(1usize << n_qubits) {
        let residues = &mut row[..n];
        if residues.iter().any(|a| *a != zero) {
            residues.rotate_right(power as usize);
        }
        power = mulmod(power, x, modulus);
    }
    Ok(())
}

/// Iterative radix-2 FFT over one fiber. `twiddles[k] = e^{sign 2πik/len}`
/// for `k < len/2`.
fn fft_in_place(buf: &mut [C64], twiddles: &[C64]) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = n / len;
        for chunk in buf.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                let t = twiddles[k * step] * *b;
                let u = *a;
                *a = u + t;
                *b = u - t;
            }
        }
        len <<= 1;
    }
    let scale = 1.0 / (n as f64).sqrt();
    buf.iter_mut().for_each(|a| *a *= scale);
}

fn twiddle_table(len: usize, inverse: bool) -> Vec<C64> {
    let sign = if inverse { 1.0 } else { -1.0 };
    (0..len / 2).map(|k| C64::from_polar(1.0, sign * TAU * k as f64 / len as f64)).collect()
}

/// Quantum Fourier transform on `range`: `|j> -> 2^{-q/2} Σ_k e^{-2πijk/2^q} |k>`,
/// or with the positive sign when `inverse`.
pub fn apply_qft(state: &mut StateVector, range: QubitRange, inverse: bool) -> Result<()> {
    range.check(state.n_qubits())?;
    let layout = range.layout(state.n_qubits());
    let twiddles = twiddle_table(layout.block_dim(), inverse);
    layout.for_each_fiber(state.amps_mut(), true, |buf| fft_in_place(buf, &twiddles));
    Ok(())
}

fn invert_about_mean(buf: &mut [C64]) {
    let mean = buf.iter().sum::<C64>() / buf.len() as f64;
    let two_mean = mean * 2.0;
    buf.iter_mut().for_each(|a| *a = two_mean - *a);
}

/// Grover diffusion `2|γ><γ| - I` on `range`, as inversion about the mean of
/// each fiber.
pub fn apply_diffusion(state: &mut StateVector, range: QubitRange) -> Result<()> {
    range.check(state.n_qubits())?;
    let layout = range.layout(state.n_qubits());
    layout.for_each_fiber(state.amps_mut(), true, invert_about_mean);
    Ok(())
}

/// How the oracle of a Grover iteration is realised.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleForm {
    /// Oracle gate with an output qubit right after the search register.
    Ancilla,
    /// Direct sign flip of marked amplitudes.
    Phase,
}

impl OracleForm {
    pub fn extra_qubits(self) -> usize {
        match self {
            OracleForm::Ancilla => 1,
            OracleForm::Phase => 0,
        }
    }
}

/// One Grover iteration `(Γ ⊗ I) O_f` on the search register `range`.
pub fn grover_step_on(state: &mut StateVector, f: &ClassicalOracle, range: QubitRange, form: OracleForm) -> Result<()> {
    f.require_single_output()?;
    match form {
        OracleForm::Ancilla => apply_oracle_on(state, f, range, QubitRange::new(range.end(), 1))?,
        OracleForm::Phase => apply_phase_oracle(state, f, range)?,
    }
    apply_diffusion(state, range)
}

/// One Grover iteration on the leading `q` qubits. A `q + 1` qubit state
/// uses the trailing qubit as the oracle's output (prepared in `|->` by the
/// caller); a `q` qubit state uses the phase oracle.
pub fn grover_step(state: &mut StateVector, f: &ClassicalOracle, q: usize) -> Result<()> {
    let form = match state.n_qubits().checked_sub(q) {
        Some(1) => OracleForm::Ancilla,
        Some(0) => OracleForm::Phase,
        _ => return Err(Error::DimensionMismatch { expected: q + 1, actual: state.n_qubits() }),
    };
    grover_step_on(state, f, QubitRange::leading(q), form)
}

/// Counting gate: `|m>_p |ψ> -> |m>_p G^m |ψ>`, the search register (plus
/// ancilla for [`OracleForm::Ancilla`]) following the `p` counter qubits.
/// Counter slices with no amplitude are skipped, and a slice that starts
/// equal to its predecessor reuses the predecessor's `G^(m-1)` result.
pub fn apply_counting(
    state: &mut StateVector,
    f: &ClassicalOracle,
    p: usize,
    q: usize,
    form: OracleForm,
) -> Result<()> {
    f.require_single_output()?;
    let rest = q + form.extra_qubits();
    if state.n_qubits() != p + rest {
        return Err(Error::DimensionMismatch { expected: p + rest, actual: state.n_qubits() });
    }
    if f.in_bits() != q {
        return Err(Error::OracleShape(format!("oracle takes {} bits, search register has {q}", f.in_bits())));
    }
    let zero = C64::new(0.0, 0.0);
    let search = QubitRange::leading(q);
    let slice_dim = 1usize << rest;
    let mut scratch = StateVector::zero(rest)?;
    // Input and G^(m-1) output of the previous slice.
    let mut previous: Option<(usize, Vec<C64>)> = None;
    for (m, slice) in state.amps_mut().chunks_exact_mut(slice_dim).enumerate() {
        if m == 0 {
            scratch.amps_mut().copy_from_slice(slice);
            previous = Some((0, slice.to_vec()));
            continue;
        }
        if slice.iter().all(|a| *a == zero) {
            previous = None;
            continue;
        }
        let steps = match &previous {
            Some((pm, input)) if *pm + 1 == m && input.as_slice() == &*slice => 1,
            _ => {
                scratch.amps_mut().copy_from_slice(slice);
                m
            }
        };
        let input = slice.to_vec();
        for _ in 0..steps {
            grover_step_on(&mut scratch, f, search, form)?;
        }
        slice.copy_from_slice(scratch.amps());
        previous = Some((m, input));
    }
    Ok(())
}
