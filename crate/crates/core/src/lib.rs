//! State-vector simulation of the textbook quantum algorithms: Deutsch,
//! Deutsch-Jozsa, Simon, Shor, Grover search and quantum counting, plus a
//! small circuit language.
//!
//! Qubit 0 is the most significant bit of a basis index, so `|j>_n` has its
//! binary digits listed from qubit 0 to qubit `n - 1`.

pub mod algorithms;
pub mod circuit;
pub mod entangle;
pub mod error;
pub mod gates;
pub mod gf2;
pub mod measure;
pub mod numtheory;
pub mod random;
pub mod register;
pub mod statevec;
pub mod transforms;

pub use algorithms::{NoObserver, RunRecord, StepObserver};
pub use circuit::{Circuit, Instruction, ParseError};
pub use error::{Error, Result};
pub use gates::{GateMatrix, StandardGate, ZyzAngles};
pub use measure::{Histogram, MeasureResult, RngStream};
pub use register::QubitRange;
pub use statevec::{BlochPoint, StateVector, C64};
pub use transforms::{ClassicalOracle, OracleForm};
