//! Acceptance suite: every identity the library claims, checked end to end
//! at its stated tolerance, one pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::process::Command;
use std::time::Instant;

use qverify::diagrams::tensors_equal;
use qverify::families::{
    check_method, is_complementary_direct, perturbed_family, ControlledFamily, Method,
};
use qverify::gf::{collisions, function_family, mub_family, SUPPORTED_DIMS};
use qverify::meanking::{
    build_scheme, check_mk_equation, check_orthonormal, function_overlap_lhs,
    function_overlap_rhs, mu_state, simulate, verify_support,
};
use qverify::numerics::{c, Complex64};
use qverify::qkd::{
    build_bb84_lhs, build_e91_lhs, build_ps_pattern, check_alpha_identity, check_bb84,
};

struct Criterion {
    name: &'static str,
    budget_s: f64,
    started: Instant,
}

impl Criterion {
    fn new(name: &'static str, budget_s: f64) -> Self {
        Self {
            name,
            budget_s,
            started: Instant::now(),
        }
    }

    fn finish(self, passed: bool, detail: String) {
        let elapsed = self.started.elapsed().as_secs_f64();
        let verdict = if passed { "PASS" } else { "FAIL" };
        println!(
            "acceptance {}: {verdict} ({detail}; {elapsed:.2}s of {:.0}s budget)",
            self.name, self.budget_s
        );
        assert!(passed, "{} failed: {detail}", self.name);
        assert!(
            elapsed < self.budget_s,
            "{} exceeded its runtime budget: {elapsed:.2}s",
            self.name
        );
    }
}

/// The twelve-family corpus: all shipped basis families, a repeated basis,
/// a bare unbiased pair, and three deterministic perturbations.
fn corpus() -> Vec<(String, ControlledFamily)> {
    let mut out: Vec<(String, ControlledFamily)> = SUPPORTED_DIMS
        .iter()
        .map(|&n| (format!("mub{n}"), mub_family(n).unwrap()))
        .collect();
    let z = qverify::numerics::ComplexMatrix::identity(2);
    let x = qverify::numerics::hadamard2();
    out.push((
        "zz".into(),
        ControlledFamily::new(2, vec![z.clone(), z.clone()]).unwrap(),
    ));
    out.push(("zx".into(), ControlledFamily::new(2, vec![z, x]).unwrap()));
    for n in [2usize, 3, 4] {
        out.push((
            format!("perturbed{n}"),
            perturbed_family(&mub_family(n).unwrap(), 0.1).unwrap(),
        ));
    }
    assert!(out.len() >= 12);
    out
}

#[test]
fn criterion_1_unbiasedness() {
    let crit = Criterion::new("1 (pairwise unbiasedness of shipped families)", 1.0);
    let mut worst = 0.0f64;
    for n in SUPPORTED_DIMS {
        let fam = mub_family(n).unwrap();
        assert_eq!(fam.count(), n + 1);
        for a in 0..fam.count() {
            for b in 0..a {
                let dev =
                    qverify::families::unbiased_deviation(fam.basis(a), fam.basis(b)).unwrap();
                worst = worst.max(dev);
            }
        }
    }
    crit.finish(worst <= 1e-9, format!("worst deviation {worst:.3e}"));
}

#[test]
fn criterion_2_characterization_agreement() {
    let crit = Criterion::new("2 (five characterizations agree on the corpus)", 5.0);
    let mut all_agree = true;
    let mut detail = String::new();
    for (name, family) in corpus() {
        let verdicts: Vec<bool> = Method::ALL
            .iter()
            .map(|m| check_method(&family, *m, 1e-9).unwrap().passed)
            .collect();
        if !verdicts.iter().all(|v| *v == verdicts[0]) {
            all_agree = false;
            detail = format!("{name}: {verdicts:?}");
        }
    }
    if detail.is_empty() {
        detail = format!("{} families, verdicts identical", corpus().len());
    }
    crit.finish(all_agree, detail);
}

#[test]
fn criterion_3_same_value_support_universality() {
    let crit = Criterion::new("3 (same-value support holds for every family)", 5.0);
    let mut worst = 0.0f64;
    for (_, family) in corpus() {
        let lhs = build_bb84_lhs(&family).unwrap().apply_ps("s", "e").unwrap();
        let pattern = build_ps_pattern(&family)
            .unwrap()
            .apply_ps("s", "e")
            .unwrap();
        let rep = tensors_equal(&lhs, &pattern, 1e-10).unwrap();
        worst = worst.max(rep.worst_deviation);
    }
    crit.finish(worst <= 1e-10, format!("worst deviation {worst:.3e}"));
}

#[test]
fn criterion_4_bb84_e91_equivalence() {
    let crit = Criterion::new("4 (BB84 and E91 tensors coincide)", 5.0);
    let mut worst = 0.0f64;
    for (_, family) in corpus() {
        let b = build_bb84_lhs(&family).unwrap();
        let e = build_e91_lhs(&family).unwrap();
        let rep = tensors_equal(&b, &e, 1e-12).unwrap();
        worst = worst.max(rep.worst_deviation);
    }
    crit.finish(worst <= 1e-12, format!("worst deviation {worst:.3e}"));
}

#[test]
fn criterion_5_qkd_iff_complementary() {
    let crit = Criterion::new("5 (key distribution iff complementary)", 10.0);
    let mut ok = true;
    let mut detail = String::from("verdicts match");
    for (name, family) in corpus() {
        let qkd = check_bb84(&family, 1e-9).unwrap();
        let direct = is_complementary_direct(&family, 1e-9);
        if qkd.passed != direct.passed {
            ok = false;
            detail = format!("{name}: qkd {} vs direct {}", qkd.passed, direct.passed);
            break;
        }
        if qkd.passed {
            let psi = qkd.psi.as_ref().unwrap();
            // unit modulus on the different-value support
            let unit_dev: f64 = psi
                .assignments()
                .into_iter()
                .filter(|a| a[0] != a[1])
                .map(|a| (psi.value(&a).norm() - 1.0).abs())
                .fold(0.0, f64::max);
            if unit_dev > 1e-9 {
                ok = false;
                detail = format!("{name}: |psi| deviates by {unit_dev:.3e}");
                break;
            }
            let alpha = check_alpha_identity(&family, psi, 1e-9).unwrap();
            if !alpha.holds {
                ok = false;
                detail = format!("{name}: alpha identity off by {:.3e}", alpha.worst_violation);
                break;
            }
        }
    }
    crit.finish(ok, detail);
}

#[test]
fn criterion_6_collision_identity() {
    let crit = Criterion::new("6 (collision identity over all ordered pairs)", 10.0);
    let mut worst = 0.0f64;
    let mut pairs = 0usize;
    for n in [2usize, 3, 4, 5] {
        let family = mub_family(n).unwrap();
        let funs = function_family(n).unwrap();
        let states: Vec<_> = funs
            .functions()
            .iter()
            .map(|f| mu_state(f, &family).unwrap())
            .collect();
        for (i, f) in funs.functions().iter().enumerate() {
            for (j, g) in funs.functions().iter().enumerate() {
                let want = collisions(f, g).unwrap() as f64;
                let got = states[i].inner(&states[j]) * c(n as f64, 0.0) + Complex64::ONE;
                worst = worst.max((got - c(want, 0.0)).norm());
                pairs += 1;
            }
        }
    }
    crit.finish(
        worst <= 1e-10,
        format!("{pairs} ordered pairs, worst deviation {worst:.3e}"),
    );
}

#[test]
fn criterion_7_orthonormality() {
    let crit = Criterion::new("7 (chain states form orthonormal bases)", 10.0);
    let mut worst = 0.0f64;
    for n in [2usize, 3, 4, 5] {
        let scheme = build_scheme(n).unwrap();
        let (_, dev) = check_orthonormal(&scheme, 1e-9);
        worst = worst.max(dev);
    }
    crit.finish(worst <= 1e-9, format!("worst Gram deviation {worst:.3e}"));
}

#[test]
fn criterion_8_mean_king_correctness() {
    let crit = Criterion::new("8 (Mean King schemes succeed exactly)", 30.0);
    let mut ok = true;
    let mut detail = String::new();
    for n in [2usize, 3, 4, 5] {
        let scheme = build_scheme(n).unwrap();
        let support = verify_support(&scheme, 1e-9);
        let rep = check_mk_equation(&scheme, 1e-9).unwrap();
        if !support.ok || !rep.equation_ok {
            ok = false;
            detail = format!("n={n}: support {} equation {}", support.ok, rep.equation_ok);
            break;
        }
        // exact simulation: success probability 1 for every basis/outcome
        for b in 0..scheme.family().count() {
            for k in 0..n {
                let rows = simulate(&scheme, b, k).unwrap();
                let success: f64 = rows
                    .iter()
                    .filter(|r| r.alice_guess == k)
                    .map(|r| r.probability)
                    .sum();
                if (success - 1.0).abs() > 1e-9 {
                    ok = false;
                    detail = format!("n={n} basis {b} outcome {k}: success {success}");
                }
            }
        }
        // corrupted lookups are detected with a witness
        let bad = scheme.with_corrupted_lookup();
        let bad_support = verify_support(&bad, 1e-9);
        let bad_rep = check_mk_equation(&bad, 1e-9).unwrap();
        if bad_support.ok || bad_support.witness.is_none() || bad_rep.equation_ok {
            ok = false;
            detail = format!("n={n}: corrupted lookup not detected");
            break;
        }
    }
    if detail.is_empty() {
        detail = "dimensions 2-5, all outcomes exact, corruptions detected".into();
    }
    crit.finish(ok, detail);
}

#[test]
fn criterion_9_function_overlap_identity() {
    let crit = Criterion::new("9 (function overlap identity)", 10.0);
    let mut worst = 0.0f64;
    for n in [2usize, 3] {
        let family = mub_family(n).unwrap();
        let mut seed = 0x5eedu64;
        for _ in 0..10 {
            let g: Vec<usize> = (0..family.count())
                .map(|_| {
                    seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (seed >> 33) as usize % n
                })
                .collect();
            let lhs = function_overlap_lhs(&family, &g).unwrap();
            let rhs = function_overlap_rhs(&family, &g).unwrap();
            let rep = tensors_equal(&lhs, &rhs, 1e-9).unwrap();
            worst = worst.max(rep.worst_deviation);
        }
    }
    crit.finish(worst <= 1e-9, format!("worst deviation {worst:.3e}"));
}

#[test]
fn criterion_10_report_determinism() {
    let crit = Criterion::new("10 (byte-identical reports)", 30.0);
    let bin = env!("CARGO_BIN_EXE_qverify");
    let cases: [&[&str]; 4] = [
        &["check-mub", "--dim", "5", "--quiet"],
        &["check-complementary", "--dim", "3", "--quiet"],
        &["check-qkd", "--protocol", "both", "--dim", "2", "--quiet"],
        &["mean-king", "--dim", "2", "--mode", "verify", "--quiet"],
    ];
    let mut ok = true;
    let mut detail = String::from("4 commands, two runs each");
    for args in cases {
        let run = || {
            Command::new(bin)
                .args(args)
                .env_remove("VERIFIER_TOL")
                .output()
                .expect("binary runs")
        };
        let first = run();
        let second = run();
        if first.stdout != second.stdout || first.stdout.is_empty() {
            ok = false;
            detail = format!("non-identical output for {args:?}");
            break;
        }
    }
    crit.finish(ok, detail);
}
