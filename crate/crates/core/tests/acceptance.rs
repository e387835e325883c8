//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;
use proptest::collection::vec;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

use qprod_core::arith::{divisors, KloostermanTable};
use qprod_core::asymptotics::{
    b_coeff_truncated, b_envelope_ln, check_bound, growth_fit, ols, BoundKind,
};
use qprod_core::forms::{self, build, builtin_spec, f_theta, level_data, FormSpec};
use qprod_core::prodexp::{extract, extract_oracle, reconstruct, vanishing_indices};
use qprod_core::{ExponentSeries, QSeries};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn spec(name: &str) -> FormSpec {
    builtin_spec(name).expect("builtin form")
}

/// Expansion with `order` exponents available (relative truncation `order + 1`).
fn exponents_of(name: &str, order: usize) -> Result<(QSeries, ExponentSeries), String> {
    let s = spec(name);
    let f = build(&s, order + 1).map_err(|e| e.to_string())?;
    let h = f.integer_lead().ok_or("non-integral lead")?;
    let e = extract(&f, h).map_err(|e| e.to_string())?.with_level(s.level);
    Ok((f, e))
}

fn timed<T>(limit: Duration, f: impl FnOnce() -> Result<T, String>) -> Result<(T, Duration), String> {
    let start = Instant::now();
    let out = f()?;
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))?;
    Ok((out, took))
}

fn delta_constancy() -> Outcome {
    let (e, took) = timed(Duration::from_secs(5), || {
        let f = forms::eta(1, 201)
            .and_then(|eta| eta.pow_int(24))
            .and_then(|d| d.truncate(201))
            .map_err(|e| e.to_string())?;
        extract(&f, 1).map_err(|e| e.to_string())
    })?;
    ensure(e.order() == 200, || format!("order {}", e.order()))?;
    if let Some(m) = (1..=200).find(|&m| *e.get(m).unwrap() != int(24)) {
        return Err(format!("c({m}) = {}", e.get(m).unwrap()));
    }
    Ok(format!("c(m) = 24 for m <= 200 in {took:.2?}"))
}

fn eta_quotient_law() -> Outcome {
    let (_, e) = exponents_of("eta11", 200)?;
    for m in 1..=200 {
        let want = if m % 11 == 0 { 4 } else { 2 };
        ensure(*e.get(m).unwrap() == int(want), || {
            format!("c({m}) = {}, expected {want}", e.get(m).unwrap())
        })?;
    }
    Ok("c(m) = 2 + 2[11 | m] for m <= 200".into())
}

fn oracle_equivalence() -> Outcome {
    const ORDER: usize = 32;
    let check = |label: &str, f: &QSeries, h: i64| -> Result<(), String> {
        let fast = extract(f, h)
            .and_then(|e| e.truncate(ORDER))
            .map_err(|e| format!("{label}: {e}"))?;
        let slow = extract_oracle(f, h, ORDER).map_err(|e| format!("{label}: {e}"))?;
        ensure(fast.values() == slow.values(), || format!("{label}: exponents differ"))
    };
    for name in ["delta", "e4", "e6", "eta11", "eta2"] {
        let f = build(&spec(name), ORDER + 1).map_err(|e| e.to_string())?;
        check(name, &f, f.integer_lead().unwrap())?;
    }
    let mut runner = TestRunner::deterministic();
    let tails = vec(-9i64..=9, ORDER + 1);
    for i in 0..50 {
        let tail = tails.new_tree(&mut runner).map_err(|e| e.to_string())?.current();
        let mut coeffs = vec![1];
        coeffs.extend(tail);
        let f = QSeries::from_integers(0, &coeffs).map_err(|e| e.to_string())?;
        check(&format!("random #{i}"), &f, 0)?;
    }
    Ok("5 named forms and 50 random series agree to order 32".into())
}

fn zero_height(name: &str, target: f64) -> Result<(f64, Duration), String> {
    let (fit, took) = timed(Duration::from_secs(30), || {
        let (_, e) = exponents_of(name, 60)?;
        growth_fit(&e, (20, 60)).map_err(|e| e.to_string())
    })?;
    let rel = (fit.y_hat - target).abs() / target;
    ensure(rel < 0.05, || {
        format!("{name}: y_hat {:.5} vs {target:.5} ({:.2}% off)", fit.y_hat, rel * 100.0)
    })?;
    Ok((fit.y_hat, took))
}

fn zero_height_recovery() -> Outcome {
    let (y4, t4) = zero_height("e4", 3f64.sqrt() / 2.0)?;
    let (y6, t6) = zero_height("e6", 1.0)?;
    Ok(format!("E4 y_hat {y4:.5} ({t4:.2?}), E6 y_hat {y6:.5} ({t6:.2?})"))
}

fn slope_checks() -> Outcome {
    let mut detail = Vec::new();
    for name in ["e4", "e6"] {
        let (_, e) = exponents_of(name, 60)?;
        let y = growth_fit(&e, (20, 60)).map_err(|e| e.to_string())?.y_hat;
        for kind in [BoundKind::Upper, BoundKind::Omega] {
            let r = check_bound(&e, kind, Some(y), (20, 60), 0.05).map_err(|e| e.to_string())?;
            ensure(r.verdict.passed(), || {
                format!("{name} {kind} at y_r = {y:.5}: log-slope {:.4}", r.log_slope)
            })?;
            detail.push(format!("{name} {kind} {:+.4}", r.log_slope));
        }
        if name == "e4" {
            let r = check_bound(&e, BoundKind::Upper, Some(0.5), (20, 60), 0.05)
                .map_err(|e| e.to_string())?;
            ensure(!r.verdict.passed(), || {
                format!("e4 upper at y_r = 0.5 passed with log-slope {:.4}", r.log_slope)
            })?;
            detail.push(format!("e4 upper@0.5 fails {:+.4}", r.log_slope));
        }
    }
    Ok(detail.join(", "))
}

fn kohnen_regime() -> Outcome {
    let mut detail = Vec::new();
    for name in ["delta", "eta11"] {
        let (_, e) = exponents_of(name, 200)?;
        let r = check_bound(&e, BoundKind::Kohnen, None, (16, 200), 0.0).map_err(|e| e.to_string())?;
        ensure(r.log_slope <= 0.0, || format!("{name}: log-slope {:.5}", r.log_slope))?;
        ensure(r.max_ratio <= 10.0, || format!("{name}: max ratio {:.4}", r.max_ratio))?;
        detail.push(format!("{name} max {:.3} slope {:+.5}", r.max_ratio, r.log_slope));
    }
    Ok(detail.join(", "))
}

fn weil_bound() -> Outcome {
    let mut checked = 0usize;
    let mut violations = Vec::new();
    for c in 1..=500u64 {
        let table = KloostermanTable::new(c).map_err(|e| e.to_string())?;
        let bound = divisors(c).unwrap().len() as f64 * (c as f64).sqrt();
        for m in 1..=50i64 {
            let k = table.sum(-m, 1);
            checked += 1;
            if k.value.norm() > bound * (1.0 + 1e-12) {
                violations.push((m, c, k.value.norm(), bound));
            }
        }
    }
    ensure(violations.is_empty(), || {
        format!("{} violations, first {:?}", violations.len(), violations[0])
    })?;
    Ok(format!("{checked} sums, zero violations"))
}

fn b_coefficients() -> Outcome {
    let mut detail = Vec::new();
    let mut failures = Vec::new();
    for level in [2u64, 11] {
        let mut ms = Vec::new();
        let mut ln_ratio = Vec::new();
        let mut worst = (0u64, 0.0f64);
        for m in 4..=30u64 {
            let b = b_coeff_truncated(level, m, 40 * level).map_err(|e| e.to_string())?;
            let b2 = b_coeff_truncated(level, m, 80 * level).map_err(|e| e.to_string())?;
            ms.push(m as f64);
            ln_ratio.push(b.value.abs().ln() - b_envelope_ln(m));
            let rel = ((b2.value - b.value) / b.value).abs();
            if rel > worst.1 {
                worst = (m, rel);
            }
        }
        let slope = ols(&ms, &ln_ratio).slope;
        if slope > 0.0 {
            failures.push(format!("N={level} envelope log-slope {slope:+.4}"));
        }
        if worst.1 >= 1e-6 {
            failures.push(format!(
                "N={level} doubling c_max moves b_{} by {:.3e} relative",
                worst.0, worst.1
            ));
        }
        detail.push(format!(
            "N={level} slope {slope:+.4}, max drift {:.3e} at m={}",
            worst.1, worst.0
        ));
    }
    if failures.is_empty() {
        Ok(detail.join("; "))
    } else {
        Err(format!("{} [{}]", failures.join("; "), detail.join("; ")))
    }
}

fn genus_table() -> Outcome {
    let zero = [1u64, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13, 16, 18, 25];
    let one = [11u64, 14, 15, 17, 19, 20, 21, 24, 27, 32, 36, 49];
    let expected = zero
        .iter()
        .map(|&n| (n, 0))
        .chain(one.iter().map(|&n| (n, 1)))
        .chain([(23, 2)]);
    let mut count = 0;
    for (n, g) in expected {
        let got = level_data(n).map_err(|e| e.to_string())?.genus;
        ensure(got == g, || format!("genus of X0({n}) = {got}, expected {g}"))?;
        count += 1;
    }
    Ok(format!("{count} levels match"))
}

fn vanishing_at_11() -> Outcome {
    let f = build(&spec("eta11"), 100).map_err(|e| e.to_string())?;
    let got = vanishing_indices(&f, 100).map_err(|e| e.to_string())?;
    // a(19) read straight off the expansion certifies every odd multiple of 19
    ensure(f.coeff(19).unwrap().is_zero(), || "a(19) != 0".into())?;
    let wanted: Vec<u64> = (19..=100).step_by(38).collect();
    for m in &wanted {
        ensure(got.contains(m), || format!("{m} missing from {got:?}"))?;
    }
    Ok(format!("indices {got:?} include {wanted:?}"))
}

fn structural_invariants() -> Outcome {
    let f = QSeries::from_integers(0, &[1, -3, 0, 7, 2, -1, 5, 0, 4, -9, 1]).unwrap();
    let g = QSeries::from_integers(1, &[2, 1, -4, 0, 3, 3, -2, 8, 1, 0, -5]).unwrap();
    let lhs = f.mul(&g).theta().unwrap();
    let rhs = f.theta().unwrap().mul(&g).add(&f.mul(&g.theta().unwrap())).unwrap();
    ensure(lhs == rhs, || "Leibniz rule fails".into())?;

    let inv = f.mul(&f.reciprocal().unwrap());
    ensure(inv == QSeries::one(f.trunc()), || format!("f * (1/f) = {inv}"))?;

    let d = forms::delta(500).unwrap();
    let log_deriv = d.theta().unwrap().div(&d).unwrap();
    let e2 = forms::eisenstein(2, 500).unwrap();
    ensure(log_deriv == e2, || "theta(Delta)/Delta != E2 to order 500".into())?;

    for name in ["eta11", "eta2", "eta4"] {
        let s = spec(name);
        let f = build(&s, 40).unwrap();
        let h = f.integer_lead().unwrap();
        let ft = f_theta(&f, s.weight, h, s.level, 40).map_err(|e| e.to_string())?;
        ensure(ft.coeff(0).map(|c| c.is_zero()).unwrap_or(true), || {
            format!("{name}: f_theta constant term {}", ft.coeff(0).unwrap())
        })?;
    }

    for name in ["delta", "e4", "e6", "eta11", "eta2"] {
        let (f, e) = exponents_of(name, 60)?;
        let back = reconstruct(&e).map_err(|e| e.to_string())?;
        ensure(back == f.truncate(e.order()).unwrap(), || format!("{name}: round trip differs"))?;
    }
    Ok("Leibniz, reciprocal, theta(Delta)/Delta = E2 to 500, f_theta constant terms, round trips".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("delta constancy", delta_constancy),
        ("eta-quotient exponent law", eta_quotient_law),
        ("oracle equivalence", oracle_equivalence),
        ("zero-height recovery", zero_height_recovery),
        ("upper/omega slope checks", slope_checks),
        ("kohnen regime", kohnen_regime),
        ("weil bound", weil_bound),
        ("b-coefficient envelope and stability", b_coefficients),
        ("genus table", genus_table),
        ("vanishing indices at level 11", vanishing_at_11),
        ("structural invariants", structural_invariants),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

