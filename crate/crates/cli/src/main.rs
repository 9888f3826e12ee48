mod args;
mod narrate;

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use rayon::prelude::*;
use serde_json::{json, Value};

use qwire::algorithms::{
    default_counter_bits, default_iteration_cap, default_max_rounds, deutsch, deutsch_jozsa, grover_unknown,
    grover_with_count, quantum_count, shor_factor, shor_factor_with, simon,
};
use qwire::circuit::{self, execute, load_tables, OracleTables};
use qwire::{ClassicalOracle, Histogram, NoObserver, RngStream, RunRecord, StateVector, StepObserver};

use args::{Cli, Command, Global};
use narrate::{format_amplitude, Narrator, Registers};

/// `--state` above this many qubits needs `--force`.
const STATE_DUMP_LIMIT: usize = 16;

type RunFn =
    Box<dyn Fn(&mut RngStream, &mut dyn StepObserver) -> qwire::Result<(RunRecord, Option<StateVector>)> + Sync>;

struct Job {
    registers: Registers,
    run: RunFn,
    /// Circuits report their own final state; algorithms report the state
    /// seen right before their last measurement.
    own_state: bool,
}

/// Everything that ends the process with exit code 2.
struct UsageError(String);

impl From<qwire::Error> for UsageError {
    fn from(e: qwire::Error) -> Self {
        UsageError(e.to_string())
    }
}

fn load_oracle(path: &Path) -> Result<ClassicalOracle, UsageError> {
    Ok(ClassicalOracle::load(path)?)
}

fn plain(f: impl Fn(&mut RngStream, &mut dyn StepObserver) -> qwire::Result<RunRecord> + Sync + 'static) -> RunFn {
    Box::new(move |rng, obs| Ok((f(rng, obs)?, None)))
}

fn build(command: Command) -> Result<Job, UsageError> {
    let job = match command {
        Command::Deutsch { oracle } => {
            let f = load_oracle(&oracle)?;
            Job {
                registers: Registers::new(&[("x", f.in_bits()), ("y", 1)]),
                run: plain(move |rng, obs| Ok(deutsch(&f, rng, obs)?.1)),
                own_state: false,
            }
        }
        Command::Dj { oracle } => {
            let f = load_oracle(&oracle)?;
            Job {
                registers: Registers::new(&[("x", f.in_bits()), ("y", 1)]),
                run: plain(move |rng, obs| Ok(deutsch_jozsa(&f, rng, obs)?.1)),
                own_state: false,
            }
        }
        Command::Simon { oracle, max_rounds } => {
            let f = load_oracle(&oracle)?;
            let n = f.in_bits();
            let rounds = max_rounds.unwrap_or_else(|| default_max_rounds(n));
            Job {
                registers: Registers::new(&[("x", n), ("y", f.out_bits())]),
                run: plain(move |rng, obs| Ok(simon(&f, rounds, rng, obs)?.1)),
                own_state: false,
            }
        }
        Command::Shor { modulus, x, attempts, max_bases } => {
            if modulus < 3 {
                return Err(UsageError(format!("N = {modulus} is too small to factor")));
            }
            let n = (64 - (modulus - 1).leading_zeros()) as usize;
            let registers = Registers::new(&[("x", 2 * n), ("y", n)]);
            let run = match x {
                Some(x) => plain(move |rng, obs| Ok(shor_factor_with(modulus, x, attempts, rng, obs)?.1)),
                None => plain(move |rng, obs| Ok(shor_factor(modulus, max_bases, attempts, rng, obs)?.1)),
            };
            Job { registers, run, own_state: false }
        }
        Command::Grover { oracle, solutions, multi, lambda, max_iterations } => {
            let f = load_oracle(&oracle)?;
            let n = f.in_bits();
            let registers = Registers::new(&[("i", n), ("a", 1)]);
            let run = if multi {
                let cap = max_iterations.unwrap_or_else(|| default_iteration_cap(n));
                plain(move |rng, obs| Ok(grover_unknown(&f, lambda, cap, rng, obs)?.1))
            } else {
                plain(move |rng, obs| Ok(grover_with_count(&f, solutions, rng, obs)?.1))
            };
            Job { registers, run, own_state: false }
        }
        Command::Count { oracle, p } => {
            let f = load_oracle(&oracle)?;
            let n = f.in_bits();
            let p = p.unwrap_or_else(|| default_counter_bits(n));
            Job {
                registers: Registers::new(&[("l", p), ("i", n)]),
                run: plain(move |rng, obs| Ok(quantum_count(&f, p, rng, obs)?.1)),
                own_state: false,
            }
        }
        Command::Run { circuit: path, tables } => {
            let text = std::fs::read(&path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
            let c = circuit::parse_bytes(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            let mut oracles = OracleTables::new();
            for (name, table) in tables {
                oracles.insert(name, load_oracle(&table)?);
            }
            let base = path.parent().unwrap_or(Path::new("."));
            load_tables(&c, base, &mut oracles)?;
            Job {
                registers: Registers::new(&[("q", c.n_qubits)]),
                run: Box::new(move |rng, obs| {
                    let run = execute(&c, &oracles, rng, obs)?;
                    Ok((run.record, run.final_state))
                }),
                own_state: true,
            }
        }
    };
    Ok(job)
}

fn state_json(state: &StateVector) -> Value {
    Value::Array(state.amps().iter().map(|a| json!([a.re, a.im])).collect())
}

fn write_distribution(path: &Path, rows: &[narrate::DistRow]) -> Result<(), UsageError> {
    let fail = |e: &dyn std::fmt::Display| UsageError(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(|e| fail(&e))?;
    w.write_record(["measurement", "register", "outcome", "probability"]).map_err(|e| fail(&e))?;
    for r in rows {
        w.write_record([
            r.measurement.to_string(),
            r.register.clone(),
            r.outcome.to_string(),
            format!("{:e}", r.probability),
        ])
        .map_err(|e| fail(&e))?;
    }
    w.flush().map_err(|e| fail(&e))
}

fn print_result(out: &mut dyn Write, record: &RunRecord) -> io::Result<()> {
    let status = record.result.get("status").and_then(Value::as_str).unwrap_or("unknown");
    writeln!(out, "{}: {status}", record.algorithm)?;
    if let Value::Object(fields) = &record.result {
        for (k, v) in fields.iter().filter(|(k, _)| *k != "status") {
            writeln!(out, "  {k}: {v}")?;
        }
    }
    writeln!(out, "  oracle calls: {}", record.oracle_calls)
}

fn single(job: &Job, g: &Global, out: &mut dyn Write) -> Result<u8, UsageError> {
    let mut rng = RngStream::new(g.seed);
    let narrate = !g.json && !g.quiet;
    let mut buffer = Vec::new();
    let (record, last_state, distributions) = {
        let sink: Option<&mut dyn Write> = if narrate { Some(&mut buffer) } else { None };
        let keep = g.state && !job.own_state;
        let mut obs = Narrator::new(sink, job.registers.clone(), keep, g.dump_distribution.is_some());
        if narrate {
            let _ = writeln!(obs.out.as_mut().expect("narrating"), "registers: {}", job.registers.header());
        }
        let (record, final_state) = (job.run)(&mut rng, &mut obs)?;
        let state = if job.own_state { final_state } else { obs.last_state.take() };
        (record, state, obs.distributions.take())
    };
    out.write_all(&buffer).map_err(io_error)?;
    if let (Some(path), Some(rows)) = (&g.dump_distribution, distributions) {
        write_distribution(path, &rows)?;
    }
    if g.json {
        let mut doc = serde_json::to_value(&record).map_err(|e| UsageError(e.to_string()))?;
        if g.state {
            doc["state"] = last_state.as_ref().map_or(Value::Null, state_json);
        }
        writeln!(out, "{doc}").map_err(io_error)?;
    } else {
        print_result(out, &record).map_err(io_error)?;
        if let Some(s) = last_state.filter(|_| g.state) {
            writeln!(out, "state:").map_err(io_error)?;
            for (i, a) in s.amps().iter().enumerate() {
                writeln!(out, "  {:<20} {}", job.registers.label(i), format_amplitude(*a)).map_err(io_error)?;
            }
        }
    }
    Ok(if record.succeeded() { 0 } else { 1 })
}

fn shots(job: &Job, g: &Global, shots: u64, out: &mut dyn Write) -> Result<u8, UsageError> {
    if g.state {
        return Err(UsageError("--state cannot be combined with --shots".into()));
    }
    // Every shot has its own derived stream, so the aggregate does not
    // depend on how rayon schedules them.
    let records: Vec<RunRecord> = (0..shots)
        .into_par_iter()
        .map(|i| (job.run)(&mut RngStream::derived(g.seed, i), &mut NoObserver).map(|r| r.0))
        .collect::<qwire::Result<_>>()?;
    if let Some(path) = &g.dump_distribution {
        let mut obs = Narrator::new(None, job.registers.clone(), false, true);
        (job.run)(&mut RngStream::derived(g.seed, 0), &mut obs)?;
        write_distribution(path, &obs.distributions.unwrap_or_default())?;
    }
    let mut histograms: BTreeMap<String, Histogram> = BTreeMap::new();
    for m in records.iter().flat_map(|r| &r.measurements) {
        let h = histograms.entry(m.register.clone()).or_default();
        h.shots += 1;
        *h.counts.entry(m.outcome).or_insert(0) += 1;
    }
    let successes = records.iter().filter(|r| r.succeeded()).count();
    let algorithm = records.first().map_or("", |r| r.algorithm.as_str());
    if g.json {
        let doc = json!({
            "algorithm": algorithm,
            "seed": g.seed,
            "shots": shots,
            "successes": successes,
            "histograms": histograms,
        });
        writeln!(out, "{doc}").map_err(io_error)?;
    } else {
        writeln!(out, "{algorithm}: {successes}/{shots} successful runs").map_err(io_error)?;
        for (register, h) in &histograms {
            writeln!(out, "{register} ({} measurements)", h.shots).map_err(io_error)?;
            for (outcome, count) in &h.counts {
                let freq = *count as f64 / h.shots as f64;
                writeln!(out, "  {outcome:>10} {count:>10} {freq:.6}").map_err(io_error)?;
            }
        }
    }
    Ok(0)
}

fn io_error(e: io::Error) -> UsageError {
    UsageError(format!("cannot write output: {e}"))
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<u8, UsageError> {
    let g = cli.global;
    let job = build(cli.command)?;
    let n = job.registers.n_qubits();
    if g.state && n > STATE_DUMP_LIMIT && !g.force {
        return Err(UsageError(format!("--state would print 2^{n} amplitudes; add --force to allow it")));
    }
    match g.shots {
        Some(k) => shots(&job, &g, k, out),
        None => single(&job, &g, out),
    }
}

/// The whole program with its output streams passed in; returns the exit
/// code.
fn app<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                2
            } else {
                let _ = out.write_all(text.as_bytes());
                0
            };
        }
    };
    match run(cli, out) {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn main() -> ExitCode {
    let code = app(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code)
}
