use std::collections::BTreeMap;
use std::path::Path;

use serde_json::json;

use super::{Circuit, Instruction, Pauli, Target};
use crate::algorithms::{RunRecord, StepObserver};
use crate::error::{Error, Result};
use crate::gates::{apply_1q, apply_cnot, apply_hadamard_all, StandardGate};
use crate::measure::{measure_subset, RngStream};
use crate::statevec::StateVector;
use crate::transforms::{apply_diffusion, apply_oracle_on, apply_qft, ClassicalOracle};

pub type OracleTables = BTreeMap<String, ClassicalOracle>;

#[derive(Clone, Debug)]
pub struct Execution {
    pub record: RunRecord,
    /// The final state, unless a `measure all` consumed it.
    pub final_state: Option<StateVector>,
}

/// Load every `load` instruction's table, resolving relative paths against
/// `base`. Names already in `tables` are kept, so tables supplied by the
/// caller override the circuit's own.
pub fn load_tables(circuit: &Circuit, base: &Path, tables: &mut OracleTables) -> Result<()> {
    for (instr, line) in circuit.instructions.iter().zip(&circuit.lines) {
        if let Instruction::Load { name, path } = instr {
            if tables.contains_key(name) {
                continue;
            }
            let f = ClassicalOracle::load(base.join(path))
                .map_err(|e| Error::InvalidArgument(format!("load `{name}`, line {line}: {e}")))?;
            tables.insert(name.clone(), f);
        }
    }
    Ok(())
}

fn check_oracles(circuit: &Circuit, tables: &OracleTables) -> Result<()> {
    for (instr, line) in circuit.instructions.iter().zip(&circuit.lines) {
        if let Instruction::Oracle { name, input, output } = instr {
            let f = tables
                .get(name)
                .ok_or_else(|| Error::InvalidArgument(format!("unresolved oracle `{name}`, line {line}")))?;
            if f.in_bits() != input.len || f.out_bits() != output.len {
                return Err(Error::OracleShape(format!(
                    "line {line}: `{name}` is {} -> {} but the registers are {} -> {}",
                    f.in_bits(),
                    f.out_bits(),
                    input.len,
                    output.len
                )));
            }
        }
    }
    Ok(())
}

/// Run `circuit` from `|0...0>`. Every oracle is resolved before the first
/// instruction executes.
pub fn execute(
    circuit: &Circuit,
    tables: &OracleTables,
    rng: &mut RngStream,
    obs: &mut dyn StepObserver,
) -> Result<Execution> {
    check_oracles(circuit, tables)?;
    let n = circuit.n_qubits;
    let mut record = RunRecord::new("circuit", rng.seed());
    let mut state = StateVector::zero(n)?;
    let mut consumed = false;
    let mut outputs = serde_json::Map::new();
    obs.step("start", &state);
    for (instr, line) in circuit.instructions.iter().zip(&circuit.lines) {
        match instr {
            Instruction::Set(q) => apply_1q(&mut state, &StandardGate::X.matrix(), *q)?,
            Instruction::H(Target::All) => apply_hadamard_all(&mut state),
            Instruction::H(Target::Range(r)) => apply_1q(&mut state, &StandardGate::H.matrix(), r.start)?,
            Instruction::Pauli(p, q) => {
                let g = match p {
                    Pauli::X => StandardGate::X,
                    Pauli::Y => StandardGate::Y,
                    Pauli::Z => StandardGate::Z,
                };
                apply_1q(&mut state, &g.matrix(), *q)?;
            }
            Instruction::Cnot { control, target } => apply_cnot(&mut state, *control, *target)?,
            Instruction::Oracle { name, input, output } => {
                apply_oracle_on(&mut state, &tables[name], *input, *output)?;
                record.oracle_calls += 1;
            }
            Instruction::Load { .. } => continue,
            Instruction::Qft { range, inverse } => apply_qft(&mut state, *range, *inverse)?,
            Instruction::Diffuse(r) => apply_diffusion(&mut state, *r)?,
            Instruction::Measure { target, label } => {
                let qubits: Vec<usize> = match target {
                    Target::All => {
                        consumed = true;
                        (0..n).collect()
                    }
                    Target::Range(r) => r.qubits().collect(),
                };
                obs.before_measure(label, &qubits, &state);
                let m = measure_subset(state, &qubits, rng)?;
                state = m.post_state;
                record.measured(label, m.outcome);
                outputs.insert(label.clone(), m.outcome.into());
            }
        }
        obs.step(&format!("line {line}: {instr}"), &state);
    }
    record.result = json!({ "status": "success", "outputs": outputs });
    Ok(Execution { record, final_state: (!consumed).then_some(state) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{deutsch, NoObserver};
    use crate::circuit::parse;

    fn tables(pairs: &[(&str, ClassicalOracle)]) -> OracleTables {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn deutsch_identity_gives_one() {
        let c = parse("qubits 2\nset 1 1\nh all\noracle f 0..0 -> 1..1\nh 0\nmeasure 0..0 as delta").unwrap();
        let f = ClassicalOracle::new(1, 1, vec![0, 1]).unwrap();
        for seed in 0..10 {
            let run = execute(&c, &tables(&[("f", f.clone())]), &mut RngStream::new(seed), &mut NoObserver).unwrap();
            assert_eq!(run.record.result["outputs"]["delta"], 1);
            assert_eq!(run.record.oracle_calls, 1);
            let (direct, rec) = deutsch(&f, &mut RngStream::new(seed), &mut NoObserver).unwrap();
            assert_eq!(direct.measured, 1);
            assert_eq!(rec.measurements, run.record.measurements);
            assert!(run.final_state.is_some());
        }
    }

    #[test]
    fn bell_outcomes() {
        let c = parse("qubits 2\nh 0\ncnot 0 1\nmeasure all as b").unwrap();
        let mut ones = 0;
        for seed in 0..400 {
            let run = execute(&c, &OracleTables::new(), &mut RngStream::new(seed), &mut NoObserver).unwrap();
            let b = run.record.measurements[0].outcome;
            assert!(b == 0 || b == 3);
            ones += (b == 3) as u32;
            assert!(run.final_state.is_none());
        }
        assert!((150..250).contains(&ones), "{ones}");
    }

    #[test]
    fn empty_circuit_keeps_zero_state() {
        let c = parse("qubits 3").unwrap();
        let run = execute(&c, &OracleTables::new(), &mut RngStream::new(0), &mut NoObserver).unwrap();
        assert_eq!(run.final_state.unwrap(), StateVector::zero(3).unwrap());
        assert!(run.record.measurements.is_empty());
    }

    #[test]
    fn unresolved_and_misshapen_oracles() {
        let c = parse("qubits 3\nh 0\noracle g 0..1 -> 2..2").unwrap();
        let e = execute(&c, &OracleTables::new(), &mut RngStream::new(0), &mut NoObserver).unwrap_err();
        assert_eq!(e.to_string(), "unresolved oracle `g`, line 3");
        let f = ClassicalOracle::constant(1, 1, 0).unwrap();
        let e = execute(&c, &tables(&[("g", f)]), &mut RngStream::new(0), &mut NoObserver).unwrap_err();
        assert!(matches!(e, Error::OracleShape(_)));
    }
}
