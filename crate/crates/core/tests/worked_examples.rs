//! The textbook's worked examples, driven through the public API.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_1_SQRT_2;

use qwire::algorithms::{deutsch, grover_round, simon, GroverSchedule, NoObserver, Recorder, RunRecord};
use qwire::gates::{apply_hadamard_range, StandardGate};
use qwire::gf2::Gf2Basis;
use qwire::measure::postselect;
use qwire::numtheory::{continued_fraction, extract_order, gcd, modpow, multiplicative_order, DEFAULT_MAX_TERMS};
use qwire::transforms::{apply_diffusion, apply_modexp, apply_oracle, apply_qft};
use qwire::{ClassicalOracle, QubitRange, RngStream, StateVector, C64};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn simon_table() -> ClassicalOracle {
    ClassicalOracle::new(4, 4, vec![0, 1, 2, 3, 1, 0, 3, 2, 4, 5, 6, 7, 5, 4, 7, 6]).unwrap()
}

#[test]
fn twenty_nine_in_five_qubits() {
    let s = StateVector::basis(5, 29).unwrap();
    assert_eq!(s.amplitude(29), c(1.0));
    assert_eq!(s.argmax(), 0b11101);
}

#[test]
fn deutsch_register_before_measurement() {
    for (f0, f1) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let f = ClassicalOracle::new(1, 1, vec![f0, f1]).unwrap();
        let mut rec = Recorder::default();
        let (_, record) = deutsch(&f, &mut RngStream::new(0), &mut rec).unwrap();
        let sign = if f0 == 1 { -1.0 } else { 1.0 };
        // (-1)^f(0) |f(0) xor f(1)> ⊗ |->
        let first = StateVector::basis(1, f0 ^ f1).unwrap();
        let minus = StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)]).unwrap();
        let expect: Vec<C64> = first.tensor(&minus).unwrap().amps().iter().map(|a| a * sign).collect();
        let got = rec.last("psi3").unwrap();
        assert!(got.max_abs_diff(&StateVector::from_amplitudes(expect).unwrap()).unwrap() < 1e-12);
        assert_eq!(record.oracle_calls, 1);
    }
}

#[test]
fn simon_state_after_the_oracle() {
    let f = simon_table();
    let mut s = StateVector::zero(8).unwrap();
    apply_hadamard_range(&mut s, QubitRange::leading(4)).unwrap();
    apply_oracle(&mut s, &f).unwrap();
    for j in 0..16u64 {
        let idx = ((j << 4) | f.eval(j)) as usize;
        assert!((s.amplitude(idx) - c(0.25)).norm() < 1e-12);
    }
    assert_eq!(s.probabilities().iter().filter(|&&p| p > 0.0).count(), 16);
}

#[test]
fn simon_rows_two_seven_ten_give_five() {
    let mut b = Gf2Basis::new(4).unwrap();
    for w in [2, 7, 10] {
        assert!(b.add_if_independent(w).unwrap());
    }
    assert_eq!(b.nullspace_nontrivial().unwrap(), 5);
    let (out, _) = simon(&simon_table(), 40, &mut RngStream::new(11), &mut NoObserver).unwrap();
    assert_eq!(out.mask, Some(5));
}

#[test]
fn simon_rank_growth_rate() {
    // ω is uniform over the 2^(n-1) vectors orthogonal to s, so a draw at
    // rank r is new with probability (2^(n-1) - 2^r) / 2^(n-1).
    let mut seen = [0u32; 3];
    let mut grew = [0u32; 3];
    for seed in 0..4000 {
        let (out, _) = simon(&simon_table(), 40, &mut RngStream::new(seed), &mut NoObserver).unwrap();
        let mut b = Gf2Basis::new(4).unwrap();
        for w in out.omegas {
            let r = b.rank();
            seen[r] += 1;
            grew[r] += b.add_if_independent(w).unwrap() as u32;
        }
    }
    for r in 0..3 {
        let rate = grew[r] as f64 / seen[r] as f64;
        let expect = (8.0 - (1 << r) as f64) / 8.0;
        assert!((rate - expect).abs() < 0.03, "rank {r}: {rate} vs {expect}");
    }
}

#[test]
fn powers_of_five_mod_217() {
    assert_eq!(modpow(5, 3, 217).unwrap(), 125);
    assert_eq!(modpow(5, 4, 217).unwrap(), 191);
    assert_eq!(modpow(5, 6, 217).unwrap(), 1);
    assert_eq!(multiplicative_order(5, 217).unwrap(), 6);
    assert_eq!((gcd(126, 217).unwrap(), gcd(124, 217).unwrap()), (7, 31));
    let cf = continued_fraction(10915, 65536, DEFAULT_MAX_TERMS).unwrap();
    assert_eq!(cf.coefficients, vec![0, 6, 237, 3, 1, 1, 6]);
    assert_eq!(cf.convergents[1], (1, 6));
    assert_eq!(extract_order(10915, 16, 5, 217).unwrap(), Some(6));
    assert_eq!(extract_order(0, 16, 5, 217).unwrap(), None);
}

#[test]
fn shor_217_register_walkthrough() {
    let mut s = StateVector::zero(24).unwrap();
    apply_hadamard_range(&mut s, QubitRange::leading(16)).unwrap();
    apply_modexp(&mut s, 5, 217, 16, 8).unwrap();
    // |3>|125> is present with amplitude 2^-8.
    assert!((s.amplitude((3 << 8) | 125) - c(1.0 / 256.0)).norm() < 1e-14);
    let support: BTreeSet<usize> =
        s.amps().iter().enumerate().filter(|(_, a)| a.norm_sqr() > 0.0).map(|(i, _)| i & 0xff).collect();
    assert_eq!(support.into_iter().collect::<Vec<_>>(), vec![1, 5, 25, 87, 125, 191]);

    let second: Vec<usize> = (16..24).collect();
    let mut s = postselect(s, &second, 25).unwrap();
    let amp = 1.0 / 10923f64.sqrt();
    for a in [0usize, 1, 5000, 10922] {
        let j = 6 * a + 2;
        assert!((s.amplitude((j << 8) | 25) - c(amp)).norm() < 1e-12, "a = {a}");
        assert_eq!(s.amplitude(((j + 1) << 8) | 25), C64::new(0.0, 0.0));
    }

    apply_qft(&mut s, QubitRange::leading(16), false).unwrap();
    let probs = qwire::measure::marginal_probabilities(&s, &(0..16).collect::<Vec<_>>()).unwrap();
    let near_peak = |radius: i64| -> f64 {
        (0..=6)
            .flat_map(|k| {
                let centre = (k as f64 * 65536.0 / 6.0).round() as i64;
                (centre - radius..=centre + radius).map(|w| w.rem_euclid(65536) as usize)
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(|w| probs[w])
            .sum()
    };
    // Seven peaks at k 2^16 / 6, the last one wrapping onto 0.
    assert!(near_peak(0) > 0.6, "{}", near_peak(0));
    assert!(near_peak(3) > 0.95, "{}", near_peak(3));
}

#[test]
fn grover_reflection_of_the_marked_state() {
    // Γ4 (|γ> - ½|7>) = (3√15/16)|ρ> + (11/16)|7>
    let mut s = StateVector::uniform(4).unwrap();
    let mut amps: Vec<C64> = s.amps().to_vec();
    amps[7] = c(-0.25);
    s = StateVector::from_amplitudes(amps).unwrap();
    apply_diffusion(&mut s, QubitRange::leading(4)).unwrap();
    assert!((s.amplitude(7) - c(11.0 / 16.0)).norm() < 1e-12);
    let rho = 3.0 * 15f64.sqrt() / 16.0 / 15f64.sqrt();
    for j in (0..16).filter(|&j| j != 7) {
        assert!((s.amplitude(j) - c(rho)).norm() < 1e-12);
    }
}

#[test]
fn grover_probabilities_sixteen_entries() {
    let f = ClassicalOracle::marking(4, &[7]).unwrap();
    let expect = [0.4726, 0.9084, 0.9613, 0.5817];
    let exact = [121.0 / 256.0, 3721.0 / 4096.0, (251.0f64 / 256.0).powi(2), (1562.0f64 / 2048.0).powi(2)];
    for k in 1..=4u64 {
        let mut rec = Recorder::default();
        let mut record = RunRecord::new("grover", 0);
        grover_round(&f, k, &mut RngStream::new(0), &mut rec, &mut record).unwrap();
        let s = rec.last(&format!("iteration {k}")).unwrap();
        let p = s.amplitude(14).norm_sqr() + s.amplitude(15).norm_sqr();
        assert!((p - exact[k as usize - 1]).abs() < 1e-12);
        // Printed truncated to four decimals.
        assert!((p - expect[k as usize - 1]).abs() < 1e-4);
    }
}

#[test]
fn averaged_success_after_a_random_iteration_count() {
    // n = 6, t = 4, m = 5: k uniform in {0, .., m - 1}.
    let (n, t, m) = (6usize, 4u64, 5u64);
    let sched = GroverSchedule::new(n, t).unwrap();
    let th = sched.theta;
    let closed = 0.5 - (4.0 * m as f64 * th).sin() / (4.0 * m as f64 * (2.0 * th).sin());
    let exact: f64 = (0..m).map(|k| sched.success_probability(k)).sum::<f64>() / m as f64;
    assert!((exact - closed).abs() < 1e-12);

    let f = ClassicalOracle::marking(n, &[3, 17, 40, 63]).unwrap();
    let runs = 10_000;
    let mut hits = 0;
    for i in 0..runs {
        let mut rng = RngStream::derived(77, i);
        let k = rng.range(0, m);
        let mut record = RunRecord::new("grover", 0);
        let found = grover_round(&f, k, &mut rng, &mut NoObserver, &mut record).unwrap();
        hits += f.eval(found);
    }
    let freq = hits as f64 / runs as f64;
    assert!((freq - closed).abs() < 0.02, "{freq} vs {closed}");
}

#[test]
fn base_draws_for_105() {
    // 105 = 3·5·7: a random coprime base passes (r even, x^{r/2} != -1)
    // with probability at least 1 - 1/2^2.
    let mut rng = RngStream::new(105);
    let (mut drawn, mut passed) = (0, 0);
    while drawn < 1000 {
        let x = rng.range(2, 105);
        if gcd(x, 105).unwrap() != 1 {
            continue;
        }
        drawn += 1;
        let r = multiplicative_order(x, 105).unwrap();
        if r % 2 == 0 && modpow(x, r / 2, 105).unwrap() != 104 {
            passed += 1;
        }
    }
    assert!(passed as f64 / 1000.0 >= 0.75 - 0.04, "{passed}");
}

#[test]
fn hadamard_wall_on_four_qubits() {
    let mut s = StateVector::zero(4).unwrap();
    apply_hadamard_range(&mut s, QubitRange::leading(4)).unwrap();
    assert!(s.amps().iter().all(|a| (a - c(0.25)).norm() < 1e-15));
    let h = StandardGate::H.matrix();
    assert!((h.entries()[[1, 1]] - c(-FRAC_1_SQRT_2)).norm() < 1e-15);
}
