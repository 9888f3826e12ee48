//! A line-oriented circuit language.
//!
//! ```text
//! # Deutsch's algorithm
//! qubits 2
//! set 1 1
//! h all
//! oracle f 0..0 -> 1..1
//! h 0
//! measure 0..0 as delta
//! ```
//!
//! Mnemonics are case-insensitive, `#` starts a comment and ranges are
//! inclusive. `qubits` must come first and is not itself an instruction.

use std::fmt;

use crate::register::QubitRange;

mod exec;
mod parse;

pub use exec::{execute, load_tables, Execution, OracleTables};
pub use parse::{parse, parse_bytes, ParseError, ParseErrorKind};

/// Target of `h` and `measure`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    All,
    Range(QubitRange),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instruction {
    /// Put a fresh qubit in `|1>`.
    Set(usize),
    /// `h <q>` is stored as a one-qubit range.
    H(Target),
    Pauli(Pauli, usize),
    Cnot {
        control: usize,
        target: usize,
    },
    Oracle {
        name: String,
        input: QubitRange,
        output: QubitRange,
    },
    Load {
        name: String,
        path: String,
    },
    Qft {
        range: QubitRange,
        inverse: bool,
    },
    Diffuse(QubitRange),
    Measure {
        target: Target,
        label: String,
    },
}

impl Instruction {
    /// Whether this instruction acts on `qubit`.
    pub fn touches(&self, qubit: usize) -> bool {
        let on = |t: &Target| match t {
            Target::All => true,
            Target::Range(r) => r.contains(qubit),
        };
        match self {
            Instruction::Set(q) | Instruction::Pauli(_, q) => *q == qubit,
            Instruction::H(t) | Instruction::Measure { target: t, .. } => on(t),
            Instruction::Cnot { control, target } => *control == qubit || *target == qubit,
            Instruction::Oracle { input, output, .. } => input.contains(qubit) || output.contains(qubit),
            Instruction::Load { .. } => false,
            Instruction::Qft { range, .. } | Instruction::Diffuse(range) => range.contains(qubit),
        }
    }
}

struct Span(QubitRange);

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.0.start, self.0.last())
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Set(q) => write!(f, "set {q} 1"),
            Instruction::H(Target::All) => f.write_str("h all"),
            Instruction::H(Target::Range(r)) => write!(f, "h {}", r.start),
            Instruction::Pauli(p, q) => {
                let name = match p {
                    Pauli::X => "x",
                    Pauli::Y => "y",
                    Pauli::Z => "z",
                };
                write!(f, "{name} {q}")
            }
            Instruction::Cnot { control, target } => write!(f, "cnot {control} {target}"),
            Instruction::Oracle { name, input, output } => {
                write!(f, "oracle {name} {} -> {}", Span(*input), Span(*output))
            }
            Instruction::Load { name, path } => write!(f, "load {name} {path}"),
            Instruction::Qft { range, inverse } => {
                write!(f, "{} {}", if *inverse { "iqft" } else { "qft" }, Span(*range))
            }
            Instruction::Diffuse(r) => write!(f, "diffuse {}", Span(*r)),
            Instruction::Measure { target: Target::All, label } => write!(f, "measure all as {label}"),
            Instruction::Measure { target: Target::Range(r), label } => {
                write!(f, "measure {} as {label}", Span(*r))
            }
        }
    }
}

/// A parsed and validated circuit.
#[derive(Clone, Debug)]
pub struct Circuit {
    pub n_qubits: usize,
    pub instructions: Vec<Instruction>,
    /// Source line of each instruction, for diagnostics.
    pub lines: Vec<usize>,
}

// Source positions are not part of a circuit's identity.
impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.n_qubits == other.n_qubits && self.instructions == other.instructions
    }
}

impl Eq for Circuit {}

impl Circuit {
    /// Measurement labels in program order.
    pub fn outputs(&self) -> Vec<&str> {
        self.instructions
            .iter()
            .filter_map(|i| match i {
                Instruction::Measure { label, .. } => Some(label.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Every oracle name referenced by an `oracle` instruction.
    pub fn oracle_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self
            .instructions
            .iter()
            .filter_map(|i| match i {
                Instruction::Oracle { name, .. } => Some(name.as_str()),
                _ => None,
            })
            .collect();
        names.sort_unstable();
        names.dedup();
        names
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n_qubits)?;
        for i in &self.instructions {
            writeln!(f, "{i}")?;
        }
        Ok(())
    }
}
