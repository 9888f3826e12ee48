use std::io::Write;

use qwire::measure::marginal_probabilities;
use qwire::{StateVector, StepObserver, C64};

const TOP: usize = 8;

/// Named registers, most significant first, used to print basis labels.
#[derive(Clone, Debug)]
pub struct Registers(pub Vec<(String, usize)>);

impl Registers {
    pub fn new(parts: &[(&str, usize)]) -> Self {
        Registers(parts.iter().map(|&(n, len)| (n.to_string(), len)).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.0.iter().map(|r| r.1).sum()
    }

    /// `|a>|b>` with each register's value in decimal.
    pub fn label(&self, index: usize) -> String {
        let mut shift = self.n_qubits();
        let mut out = String::new();
        for (_, len) in &self.0 {
            shift -= len;
            let v = (index >> shift) & ((1usize << len) - 1);
            out.push_str(&format!("|{v}>"));
        }
        out
    }

    pub fn header(&self) -> String {
        let names: Vec<String> = self.0.iter().map(|(n, len)| format!("{n}[{len}]")).collect();
        names.join(" ")
    }
}

pub struct DistRow {
    pub measurement: usize,
    pub register: String,
    pub outcome: usize,
    pub probability: f64,
}

/// Observer behind the human-readable narration, `--state` and
/// `--dump-distribution`.
pub struct Narrator<'a> {
    pub out: Option<&'a mut dyn Write>,
    pub registers: Registers,
    pub keep_state: bool,
    pub last_state: Option<StateVector>,
    pub distributions: Option<Vec<DistRow>>,
    measurements: usize,
}

impl<'a> Narrator<'a> {
    pub fn new(out: Option<&'a mut dyn Write>, registers: Registers, keep_state: bool, dump: bool) -> Self {
        Narrator { out, registers, keep_state, last_state: None, distributions: dump.then(Vec::new), measurements: 0 }
    }

    fn keep(&mut self, state: &StateVector) {
        if self.keep_state {
            self.last_state = Some(state.clone());
        }
    }
}

/// The `TOP` largest amplitudes (ties to the lower index) and how many
/// nonzero amplitudes there are in total.
pub fn top_amplitudes(state: &StateVector) -> (Vec<(usize, C64)>, usize) {
    let mut top: Vec<(usize, f64)> = Vec::with_capacity(TOP + 1);
    let mut nonzero = 0;
    for (i, a) in state.amps().iter().enumerate() {
        let p = a.norm_sqr();
        if p < 1e-24 {
            continue;
        }
        nonzero += 1;
        if top.len() == TOP && p <= top[TOP - 1].1 {
            continue;
        }
        let at = top.iter().position(|&(_, q)| p > q).unwrap_or(top.len());
        top.insert(at, (i, p));
        top.truncate(TOP);
    }
    (top.into_iter().map(|(i, _)| (i, state.amps()[i])).collect(), nonzero)
}

pub fn format_amplitude(a: C64) -> String {
    format!("{:+.6} {:+.6}i", a.re, a.im)
}

impl StepObserver for Narrator<'_> {
    fn step(&mut self, label: &str, state: &StateVector) {
        self.keep(state);
        let Some(out) = self.out.as_mut() else { return };
        let (top, nonzero) = top_amplitudes(state);
        let _ = writeln!(out, "{label}");
        for (i, a) in &top {
            let _ = writeln!(out, "  {:<20} {}  p={:.6}", self.registers.label(*i), format_amplitude(*a), a.norm_sqr());
        }
        if nonzero > top.len() {
            let _ = writeln!(out, "  ... {} more nonzero amplitudes", nonzero - top.len());
        }
    }

    fn before_measure(&mut self, register: &str, qubits: &[usize], state: &StateVector) {
        self.keep(state);
        if let Some(rows) = self.distributions.as_mut() {
            if let Ok(probs) = marginal_probabilities(state, qubits) {
                rows.extend(probs.iter().enumerate().filter(|(_, &p)| p >= 1e-15).map(|(outcome, &probability)| {
                    DistRow { measurement: self.measurements, register: register.to_string(), outcome, probability }
                }));
            }
        }
        self.measurements += 1;
        if let Some(out) = self.out.as_mut() {
            let first = qubits.first().copied().unwrap_or(0);
            let last = qubits.last().copied().unwrap_or(0);
            let _ = writeln!(out, "measure {register} (qubits {first}..{last})");
        }
    }

    fn note(&mut self, text: &str) {
        if let Some(out) = self.out.as_mut() {
            let _ = writeln!(out, "  {text}");
        }
    }
}
