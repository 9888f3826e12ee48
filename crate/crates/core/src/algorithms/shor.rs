use serde_json::json;

use super::{measure_register, status, RunRecord, StepObserver};
use crate::error::{Error, Result};
use crate::gates::apply_hadamard_range;
use crate::measure::RngStream;
use crate::numtheory::{
    best_denominator, check_modulus, extract_order, gcd_nonzero, is_prime, minimize_order, modpow, perfect_power,
};
use crate::register::QubitRange;
use crate::statevec::{max_qubits, StateVector};
use crate::transforms::{apply_modexp, apply_qft};

pub const DEFAULT_ORDER_ATTEMPTS: u64 = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderOutcome {
    pub order: Option<u64>,
    pub attempts: u64,
    /// Phase measurements, one per attempt.
    pub omegas: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorOutcome {
    pub factors: Option<(u64, u64)>,
    /// Bases tried, in order.
    pub bases: Vec<u64>,
    /// Order of the last base, when order finding succeeded.
    pub order: Option<u64>,
}

/// Register widths `(t, n)` with `2^n >= N` and `t = 2n`.
fn register_sizes(modulus: u64) -> Result<(usize, usize)> {
    let n = (64 - (modulus - 1).leading_zeros()) as usize;
    let t = 2 * n;
    if t + n > max_qubits() {
        return Err(Error::TooManyQubits { n_qubits: t + n, limit: max_qubits() });
    }
    Ok((t, n))
}

/// One pass of the quantum part: returns the phase measurement `ω`. The
/// register's memory is kept in `scratch` between attempts; at 2^24
/// amplitudes a fresh allocation costs more than the transforms.
fn order_round(
    base: u64,
    modulus: u64,
    (t, n): (usize, usize),
    scratch: &mut Option<StateVector>,
    rng: &mut RngStream,
    obs: &mut dyn StepObserver,
    record: &mut RunRecord,
) -> Result<u64> {
    let first = QubitRange::leading(t);
    let mut state = match scratch.take() {
        Some(mut s) => {
            s.reset();
            s
        }
        None => StateVector::zero(t + n)?,
    };
    obs.step("psi0", &state);
    apply_hadamard_range(&mut state, first)?;
    obs.step("psi1", &state);
    apply_modexp(&mut state, base, modulus, t, n)?;
    record.oracle_calls += 1;
    obs.step("psi2", &state);
    let m = measure_register(state, QubitRange::new(t, n), "delta", rng, obs, record)?;
    let mut state = m.post_state;
    obs.step("psi3", &state);
    apply_qft(&mut state, first, false)?;
    obs.step("psi4", &state);
    let m = measure_register(state, first, "omega", rng, obs, record)?;
    *scratch = Some(m.post_state);
    Ok(m.outcome)
}

/// Multiplicative order of `x` modulo `N` by phase estimation. An attempt
/// that only yields a proper divisor `c` of the order continues with base
/// `x^c`, and the partial orders are multiplied.
pub fn shor_order(
    x: u64,
    modulus: u64,
    max_attempts: u64,
    rng: &mut RngStream,
    obs: &mut dyn StepObserver,
) -> Result<(OrderOutcome, RunRecord)> {
    check_modulus(modulus)?;
    if x <= 1 || x >= modulus {
        return Err(Error::Domain(format!("base {x} must satisfy 1 < x < {modulus}")));
    }
    if gcd_nonzero(x, modulus) != 1 {
        return Err(Error::NotCoprime(x, modulus));
    }
    let sizes = register_sizes(modulus)?;
    let t_bits = sizes.0 as u32;
    let mut record = RunRecord::new("shor_order", rng.seed());
    let mut omegas = Vec::new();
    let mut base = x;
    let mut partial = 1u64;
    let mut order = None;
    let mut attempts = 0;
    let mut scratch = None;
    while attempts < max_attempts {
        attempts += 1;
        let omega = order_round(base, modulus, sizes, &mut scratch, rng, obs, &mut record)?;
        omegas.push(omega);
        if let Some(c) = extract_order(omega, t_bits, base, modulus)? {
            order = Some(minimize_order(x, partial * c, modulus)?);
            break;
        }
        match best_denominator(omega, t_bits, modulus)? {
            Some(c) if c > 1 => {
                partial *= c;
                base = modpow(base, c, modulus)?;
                obs.note(&format!("omega = {omega}: divisor {c} of the order, continuing with base {base}"));
            }
            _ => obs.note(&format!("omega = {omega}: no information")),
        }
    }
    record.bump("attempts", attempts);
    record.result = json!({
        "status": status(order.is_some()),
        "x": x,
        "N": modulus,
        "t": sizes.0,
        "n": sizes.1,
        "order": order,
    });
    Ok((OrderOutcome { order, attempts, omegas }, record))
}

fn check_factor_input(modulus: u64) -> Result<()> {
    check_modulus(modulus)?;
    if modulus % 2 == 0 {
        return Err(Error::Domain(format!("{modulus} is even")));
    }
    if is_prime(modulus) {
        return Err(Error::Domain(format!("{modulus} is prime")));
    }
    if let Some((b, k)) = perfect_power(modulus) {
        return Err(Error::Domain(format!("{modulus} = {b}^{k} is a perfect power")));
    }
    Ok(())
}

/// Outcome of trying a single base.
enum BaseTrial {
    Factors(u64, u64),
    Rejected,
}

fn try_base(
    x: u64,
    modulus: u64,
    order_attempts: u64,
    rng: &mut RngStream,
    obs: &mut dyn StepObserver,
    record: &mut RunRecord,
    order_out: &mut Option<u64>,
) -> Result<BaseTrial> {
    let d = gcd_nonzero(x, modulus);
    if d > 1 {
        obs.note(&format!("gcd({x}, {modulus}) = {d} is already a factor"));
        return Ok(BaseTrial::Factors(d, modulus / d));
    }
    let (out, sub) = shor_order(x, modulus, order_attempts, rng, obs)?;
    record.absorb(sub);
    *order_out = out.order;
    let Some(r) = out.order else {
        obs.note(&format!("order of {x} not found"));
        return Ok(BaseTrial::Rejected);
    };
    if r % 2 == 1 {
        obs.note(&format!("order {r} of {x} is odd"));
        return Ok(BaseTrial::Rejected);
    }
    let half = modpow(x, r / 2, modulus)?;
    if half == modulus - 1 {
        obs.note(&format!("{x}^{} = -1 mod {modulus}", r / 2));
        return Ok(BaseTrial::Rejected);
    }
    let d1 = gcd_nonzero(half + 1, modulus);
    let d2 = gcd_nonzero(half - 1, modulus);
    let nontrivial = |d: u64| d > 1 && d < modulus && modulus % d == 0;
    if !nontrivial(d1) || !nontrivial(d2) {
        return Ok(BaseTrial::Rejected);
    }
    Ok(BaseTrial::Factors(d1, d2))
}

fn factor_loop(
    modulus: u64,
    mut next_base: impl FnMut(&mut RngStream) -> Option<u64>,
    order_attempts: u64,
    rng: &mut RngStream,
    obs: &mut dyn StepObserver,
) -> Result<(FactorOutcome, RunRecord)> {
    check_factor_input(modulus)?;
    let mut record = RunRecord::new("shor", rng.seed());
    let mut bases = Vec::new();
    let mut order = None;
    let mut factors = None;
    while let Some(x) = next_base(rng) {
        bases.push(x);
        record.measured("x", x);
        if let BaseTrial::Factors(a, b) = try_base(x, modulus, order_attempts, rng, obs, &mut record, &mut order)? {
            factors = Some((a, b));
            break;
        }
    }
    record.bump("bases", bases.len() as u64);
    record.result = json!({
        "status": status(factors.is_some()),
        "N": modulus,
        "x": bases.last(),
        "order": order,
        "factors": factors.map(|(a, b)| [a, b]),
    });
    Ok((FactorOutcome { factors, bases, order }, record))
}

/// Factor an odd composite that is not a prime power, drawing up to
/// `max_outer` random bases.
pub fn shor_factor(
    modulus: u64,
    max_outer: u64,
    order_attempts: u64,
    rng: &mut RngStream,
    obs: &mut dyn StepObserver,
) -> Result<(FactorOutcome, RunRecord)> {
    let mut drawn = 0;
    factor_loop(
        modulus,
        |rng| {
            drawn += 1;
            (drawn <= max_outer).then(|| rng.range(2, modulus))
        },
        order_attempts,
        rng,
        obs,
    )
}

/// As [`shor_factor`] with a single caller-chosen base.
pub fn shor_factor_with(
    modulus: u64,
    x: u64,
    order_attempts: u64,
    rng: &mut RngStream,
    obs: &mut dyn StepObserver,
) -> Result<(FactorOutcome, RunRecord)> {
    if x <= 1 || x >= modulus {
        return Err(Error::Domain(format!("base {x} must satisfy 1 < x < {modulus}")));
    }
    let mut pending = Some(x);
    factor_loop(modulus, |_| pending.take(), order_attempts, rng, obs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::NoObserver;

    #[test]
    fn register_widths() {
        assert_eq!(register_sizes(217).unwrap(), (16, 8));
        assert_eq!(register_sizes(15).unwrap(), (8, 4));
        assert_eq!(register_sizes(16).unwrap(), (8, 4));
        assert!(register_sizes(1 << 12).is_err());
    }

    #[test]
    fn order_of_seven_mod_fifteen() {
        // r = 4 divides 2^8, so ω is an exact multiple of 64.
        for seed in 0..20 {
            let (out, rec) = shor_order(7, 15, 30, &mut RngStream::new(seed), &mut NoObserver).unwrap();
            assert!(out.omegas.iter().all(|w| w % 64 == 0));
            assert_eq!(out.order, Some(4));
            assert_eq!(rec.oracle_calls, out.attempts);
        }
    }

    #[test]
    fn fifteen_factors() {
        for seed in 0..20 {
            let (out, rec) = shor_factor(15, 20, 8, &mut RngStream::new(seed), &mut NoObserver).unwrap();
            let (a, b) = out.factors.unwrap();
            let mut pair = [a, b];
            pair.sort_unstable();
            assert_eq!(pair, [3, 5], "seed {seed}");
            assert!(rec.succeeded());
        }
    }

    #[test]
    fn rejected_inputs() {
        let mut rng = RngStream::new(0);
        for n in [14, 13, 125, 9] {
            assert!(shor_factor(n, 5, 8, &mut rng, &mut NoObserver).is_err(), "{n}");
        }
        assert!(matches!(shor_order(6, 15, 8, &mut rng, &mut NoObserver), Err(Error::NotCoprime(6, 15))));
        assert!(shor_factor_with(15, 15, 8, &mut rng, &mut NoObserver).is_err());
    }

    #[test]
    fn lucky_gcd_short_circuits() {
        let (out, rec) = shor_factor_with(15, 6, 8, &mut RngStream::new(0), &mut NoObserver).unwrap();
        assert_eq!(out.factors, Some((3, 5)));
        assert_eq!(rec.oracle_calls, 0);
    }

    #[test]
    fn fourteen_is_bad_base_for_fifteen() {
        // 14 = -1 has order 2 and 14^1 = -1: rejected.
        let (out, rec) = shor_factor_with(15, 14, 8, &mut RngStream::new(1), &mut NoObserver).unwrap();
        assert_eq!(out.factors, None);
        assert_eq!(out.order, Some(2));
        assert!(!rec.succeeded());
    }
}
