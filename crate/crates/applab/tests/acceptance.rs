//! End-to-end acceptance checks, one test per numbered criterion. Each test
//! prints a single `criterion NN ...: PASS` line on success (visible with
//! `--nocapture`); a failed assertion marks the criterion FAILED.

use std::process::Command;
use std::time::Instant;

use applab::appell::AppellPair;
use applab::engine::{EvalOptions, OperatorSpec};
use applab::functions::{FunctionHandle, PiecewisePoly};
use applab::kernel::{IntegrandHints, KernelParams};
use applab::moments::{
    aggregate_verdicts, central_from_raw, discrepancy_report, limit_estimate, raw_moment_numeric,
    raw_moment_oracle, raw_moments_oracle, DiscrepancyConfig, MomentOrder, Verdict,
};
use applab::numerics::{Accuracy, CompensatedSum};
use applab::rates::{
    dbv_bound_check, dt_bound_constant, korovkin_check, lipschitz_check, local_bound_check,
    steklov_bound_check, voronovskaja_check, weighted_convergence_check, DbvSpec, OperatorFamily,
};

const RHOS: [f64; 3] = [0.5, 1.0, 2.0];
const CS: [u32; 3] = [0, 1, 2];
const NS: [u32; 5] = [1, 4, 16, 64, 256];
const XS: [f64; 3] = [0.1, 1.0, 5.0];

fn matrix_pairs() -> Vec<(&'static str, AppellPair)> {
    vec![
        ("szasz", AppellPair::szasz()),
        ("one_sided", AppellPair::new(vec![1.0], vec![0.5]).unwrap()),
        ("two_term", AppellPair::new(vec![1.0, 2.0], vec![0.1]).unwrap()),
    ]
}

fn compensated(values: &[f64]) -> f64 {
    let mut s = CompensatedSum::default();
    for &v in values {
        s.add(v);
    }
    s.value()
}

fn rel_gap(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

fn pass(k: u32, what: &str) {
    println!("criterion {k:02} {what}: PASS");
}

#[test]
fn criterion_01_normalization_and_positivity() {
    let opts = EvalOptions::default();
    let one = FunctionHandle::one();
    for (name, pair) in matrix_pairs() {
        for &n in &NS {
            for &x in &XS {
                let nf = f64::from(n);
                let ws = pair.weights(nf, x, 1e-12).unwrap();
                assert!(
                    ws.weights.iter().all(|&w| w >= 0.0),
                    "{name} n={n} x={x}: negative weight"
                );
                let mass = compensated(&ws.weights);
                assert!(
                    (1.0 - 2e-12..=1.0).contains(&mass),
                    "{name} n={n} x={x}: mass {mass:.17e}"
                );
                for &rho in &RHOS {
                    for &c in &CS {
                        let spec = OperatorSpec::new(
                            pair.clone(),
                            KernelParams::new(nf, rho, c).unwrap(),
                        );
                        let s1 = spec.apply(&one, x, &opts).unwrap();
                        assert!(
                            (s1 - 1.0).abs() <= 1e-10,
                            "{name} rho={rho} c={c} n={n} x={x}: S(1) = {s1:.17e}"
                        );
                    }
                }
            }
        }
    }
    pass(1, "weights in [1-2e-12, 1], nonnegative, S(1;x) = 1");
}

#[test]
fn criterion_02_kernel_closed_moments_match_quadrature() {
    let t0 = Instant::now();
    let acc = Accuracy {
        rel_tol: 1e-11,
        abs_tol: 1e-15,
        max_refinements: 8,
    };
    let mut checked = 0usize;
    for &rho in &RHOS {
        for &c in &CS {
            for &n in &NS {
                let k = KernelParams::new(f64::from(n), rho, c).unwrap();
                for i in 1..=10u32 {
                    for r in 0..=4u32 {
                        if c > 0 && f64::from(n) * rho <= f64::from(r * c) {
                            continue;
                        }
                        let closed = k.raw_moment(i, r).unwrap();
                        let hints = IntegrandHints {
                            breakpoints: &[],
                            growth_order: f64::from(r),
                        };
                        let quad = k
                            .integrate(i, &|z| z.powi(r as i32), hints, &acc)
                            .unwrap();
                        let rel = rel_gap(quad.value, closed);
                        assert!(
                            rel <= 1e-8,
                            "rho={rho} c={c} n={n} i={i} r={r}: closed {closed:.17e} \
                             vs quadrature {:.17e} (rel {rel:.3e})",
                            quad.value
                        );
                        checked += 1;
                    }
                }
            }
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 30.0, "took {dt:?}");
    pass(2, &format!("kernel closed vs quadrature rel <= 1e-8 ({checked} cases, {dt:.1?})"));
}

#[test]
fn criterion_03_moment_routes_agree() {
    let opts = EvalOptions::default();
    for (name, pair) in matrix_pairs() {
        for &rho in &RHOS {
            for &c in &CS {
                for &n in &NS {
                    let nf = f64::from(n);
                    let spec =
                        OperatorSpec::new(pair.clone(), KernelParams::new(nf, rho, c).unwrap());
                    for &x in &XS {
                        for r in 0..=4u32 {
                            if spec.kernel().raw_moment(1, r).is_err() {
                                continue;
                            }
                            let oracle = raw_moment_oracle(&spec, x, r).unwrap();
                            let numeric = raw_moment_numeric(&spec, x, r, 1e-13).unwrap();
                            assert!(
                                rel_gap(numeric, oracle) <= 1e-11,
                                "{name} rho={rho} c={c} n={n} x={x} r={r}: \
                                 oracle {oracle:.17e} vs numeric {numeric:.17e}"
                            );
                            let quad = spec
                                .apply(&FunctionHandle::monomial(r), x, &opts)
                                .unwrap();
                            assert!(
                                rel_gap(quad, oracle) <= 1e-7,
                                "{name} rho={rho} c={c} n={n} x={x} r={r}: \
                                 oracle {oracle:.17e} vs quadrature {quad:.17e}"
                            );
                        }
                    }
                }
            }
        }
    }
    pass(3, "oracle vs numeric rel <= 1e-11, vs quadrature rel <= 1e-7");
}

/// Poisson mass by recurrence from the mode, gamma kernel moments as rising
/// factorials, everything summed straight from the definitions.
fn brute_phillips(n: f64, x: f64) -> (f64, f64) {
    let nx = n * x;
    let cap = (nx + 12.0 * (nx + 25.0).sqrt() + 60.0) as usize;
    let anchor = nx.floor() as usize;
    let mut w = vec![0.0_f64; cap];
    let mut logw = -nx;
    for k in 1..=anchor {
        logw += (nx / k as f64).ln();
    }
    w[anchor] = logw.exp();
    for i in anchor + 1..cap {
        w[i] = w[i - 1] * nx / i as f64;
    }
    for i in (0..anchor).rev() {
        w[i] = w[i + 1] * (i + 1) as f64 / nx;
    }
    let mut mass = CompensatedSum::default();
    let mut m1 = CompensatedSum::default();
    let mut mu2 = CompensatedSum::default();
    mass.add(w[0]);
    mu2.add(w[0] * x * x);
    for i in 1..cap {
        // index-i kernel: mean i/n, variance i/n^2
        let mean = i as f64 / n;
        mass.add(w[i]);
        m1.add(w[i] * mean);
        mu2.add(w[i] * (i as f64 / (n * n) + (mean - x) * (mean - x)));
    }
    (m1.value() / mass.value(), mu2.value() / mass.value())
}

#[test]
fn criterion_04_phillips_identities_against_brute_force() {
    for &n in &NS {
        let nf = f64::from(n);
        let spec = OperatorSpec::phillips(nf).unwrap();
        for &x in &XS {
            let m1 = raw_moment_oracle(&spec, x, 1).unwrap();
            let cm = central_from_raw(&raw_moments_oracle(&spec, x).unwrap(), x);
            assert!(rel_gap(m1, x) <= 1e-11, "n={n} x={x}: m1 {m1:.17e}");
            assert!(
                rel_gap(cm.mu2, 2.0 * x / nf) <= 1e-11,
                "n={n} x={x}: mu2 {:.17e}",
                cm.mu2
            );
            let (bm1, bmu2) = brute_phillips(nf, x);
            assert!(rel_gap(bm1, x) <= 1e-11, "n={n} x={x}: brute m1 {bm1:.17e}");
            assert!(
                rel_gap(bmu2, 2.0 * x / nf) <= 1e-11,
                "n={n} x={x}: brute mu2 {bmu2:.17e}"
            );
            assert!(rel_gap(m1, bm1) <= 1e-11);
            assert!(rel_gap(cm.mu2, bmu2) <= 1e-11);
        }
    }
    pass(4, "m1 = x and mu2 = 2x/n vs independent double summation, rel <= 1e-11");
}

#[test]
fn criterion_05_first_moment_limit() {
    for (name, pair) in matrix_pairs() {
        let d = pair.derivatives_at_one();
        for &rho in &RHOS {
            for &c in &CS {
                for x in [0.5, 1.0, 2.0] {
                    let fit = limit_estimate(&pair, rho, c, x, MomentOrder::One).unwrap();
                    let want = f64::from(c) * x / rho + d.a[1] / d.a[0];
                    assert!(
                        (fit.estimate - want).abs() <= 1e-3 * want.abs().max(1e-9),
                        "{name} rho={rho} c={c} x={x}: n*mu1 -> {:.17e}, closed {want:.17e}",
                        fit.estimate
                    );
                }
            }
        }
    }
    pass(5, "extrapolated n*mu1 matches cx/rho + A'(1)/A(1) within 0.1%");
}

#[test]
fn criterion_06_discrepancy_ledger_verdicts() {
    let cfg = DiscrepancyConfig::default();
    assert!(cfg.n_grid.contains(&10.0) && cfg.x_grid.contains(&1.0));
    let rows = discrepancy_report(&AppellPair::szasz(), 1.0, 0, &cfg).unwrap();

    let flagged = [
        "lemma22_m2",
        "lemma23_mu2",
        "lemma23_mu4",
        "lemma24_lim2",
        "lemma24_lim4",
        "thm33_rhs",
    ];
    let agreeing = [
        "lemma21_m0",
        "lemma21_m1",
        "lemma21_m2",
        "lemma21_m3",
        "lemma21_m4",
        "lemma22_m0",
        "lemma22_m1",
        "lemma24_lim1",
    ];
    let verdicts = aggregate_verdicts(&rows);
    let verdict_of = |q: &str| {
        verdicts
            .iter()
            .find(|v| v.quantity == q)
            .unwrap_or_else(|| panic!("missing quantity {q}"))
            .verdict
    };
    for q in flagged {
        assert_eq!(
            verdict_of(q),
            Verdict::PaperTypoSuspected,
            "{q} should be flagged"
        );
        // and the disagreement is visible at the headline point (n=10, x=1)
        let row = rows
            .iter()
            .find(|r| r.quantity == q && r.n.unwrap_or(10.0) == 10.0 && r.x == 1.0)
            .unwrap();
        assert_eq!(row.verdict, Verdict::PaperTypoSuspected, "{q} at (10, 1)");
    }
    for q in agreeing {
        assert_eq!(verdict_of(q), Verdict::Agree, "{q} should agree");
    }

    // the second-moment limit the ledger trusts instead of the printed one
    for (name, pair) in matrix_pairs() {
        for &rho in &RHOS {
            for &c in &CS {
                for x in [0.5, 1.0, 2.0] {
                    let fit = limit_estimate(&pair, rho, c, x, MomentOrder::Two).unwrap();
                    let want = x * (1.0 + rho + f64::from(c) * x) / rho;
                    assert!(
                        rel_gap(fit.estimate, want) <= 5e-3,
                        "{name} rho={rho} c={c} x={x}: n*mu2 -> {:.17e}, derived {want:.17e}",
                        fit.estimate
                    );
                }
            }
        }
    }
    pass(6, "ledger flags/agreements and the rederived n*mu2 limit");
}

#[test]
fn criterion_07_voronovskaja_limits() {
    let e = std::f64::consts::E;
    let families = [
        ("phillips", OperatorFamily::new(AppellPair::szasz(), 1.0, 0).unwrap()),
        (
            "one_sided_rho2_c1",
            OperatorFamily::new(AppellPair::new(vec![1.0], vec![0.5]).unwrap(), 2.0, 1).unwrap(),
        ),
    ];
    for (name, family) in &families {
        let r = voronovskaja_check(
            family,
            &FunctionHandle::exp_neg(),
            -1.0 / e,
            1.0 / e,
            1.0,
            4..=10,
            0.01,
        )
        .unwrap();
        assert!(r.all_hold(), "{name} exp_neg: {:?}", r.points);
        let r = voronovskaja_check(
            family,
            &FunctionHandle::monomial(3),
            3.0,
            6.0,
            1.0,
            4..=10,
            0.01,
        )
        .unwrap();
        assert!(r.all_hold(), "{name} cube: {:?}", r.points);
    }
    pass(7, "n(Sf - f) matches L1 f' + L2 f''/2 within 1% at x = 1");
}

#[test]
fn criterion_08_sup_error_halves_with_n() {
    let f_set = [FunctionHandle::monomial(2)];
    for (name, pair) in matrix_pairs() {
        for &rho in &RHOS {
            for &c in &CS {
                let family = OperatorFamily::new(pair.clone(), rho, c).unwrap();
                let r = korovkin_check(&family, (0.0, 2.0), &f_set, &[64, 128, 256]).unwrap();
                assert!(
                    r.all_hold(),
                    "{name} rho={rho} c={c}: halving ratio outside [0.35, 0.65]: {:?}",
                    r.points
                );
            }
        }
    }
    pass(8, "sup error on [0, 2] halves within [0.35, 0.65] per doubling, n >= 64");
}

#[test]
fn criterion_09_bound_suites_hold() {
    let families = [
        ("phillips", OperatorFamily::new(AppellPair::szasz(), 1.0, 0).unwrap()),
        (
            "one_sided_rho2_c1",
            OperatorFamily::new(AppellPair::new(vec![1.0], vec![0.5]).unwrap(), 2.0, 1).unwrap(),
        ),
    ];
    let ns = [16u32, 64, 256];
    let kink = DbvSpec::new(
        PiecewisePoly::new(vec![(0.0, vec![1.0, -1.0]), (1.0, vec![-1.0, 1.0])]).unwrap(),
        2.0,
    );
    let square = DbvSpec::new(PiecewisePoly::global(vec![0.0, 0.0, 1.0]).unwrap(), 1.0);
    for (name, family) in &families {
        let r = lipschitz_check(
            family,
            &FunctionHandle::sqrt(),
            1.0,
            1.0,
            &[0.25, 0.5, 1.0, 2.0, 4.0],
            &ns,
        )
        .unwrap();
        assert!(r.all_hold(), "{name} lipschitz: margin {}", r.margin);

        for (f, b) in [
            (FunctionHandle::monomial(2), 2.0),
            (FunctionHandle::monomial(2), 3.0),
            (FunctionHandle::sin(), 2.0),
            (FunctionHandle::sin(), 3.0),
        ] {
            let xs: Vec<f64> = [0.25, 0.5, 1.0, 2.0, 3.0]
                .into_iter()
                .filter(|&x| x <= b)
                .collect();
            let r = local_bound_check(family, &f, b, &xs, &ns).unwrap();
            assert!(
                r.all_hold(),
                "{name} local_bound {} b={b}: margin {}",
                f.name(),
                r.margin
            );
        }

        for f in [FunctionHandle::monomial(2), FunctionHandle::abs_dev(1.0)] {
            let r = steklov_bound_check(family, &f, 2.0, &[0.5, 1.0, 2.0], &ns).unwrap();
            assert!(
                r.all_hold(),
                "{name} steklov_3_5 {}: margin {}",
                f.name(),
                r.margin
            );
        }

        for dbv in [&kink, &square] {
            let r = dbv_bound_check(family, dbv, &[0.5, 1.0, 2.0], &[64, 256, 1024]).unwrap();
            assert!(
                r.all_hold(),
                "{name} dbv_5_1 {}: margin {}",
                dbv.handle().name(),
                r.margin
            );
        }

        let dt = dt_bound_constant(
            family,
            &FunctionHandle::exp_neg(),
            0.5,
            &[0.25, 1.0, 2.0],
            &[16, 64, 256, 1024],
        )
        .unwrap();
        assert!(
            dt.stabilization < 2.0,
            "{name} dt_3_5: per-n constants {:?}",
            dt.per_n
        );

        let r = weighted_convergence_check(
            family,
            &FunctionHandle::monomial(2),
            1.0,
            10.0,
            &[16, 32, 64, 128, 256],
        )
        .unwrap();
        assert!(r.all_hold(), "{name} weighted_4_1: margin {}", r.margin);
        let ratio = r.constant("final_over_initial").unwrap();
        assert!(ratio < 0.125, "{name} weighted_4_1: final/initial {ratio}");
    }
    pass(9, "lipschitz/local/steklov/dbv hold, dt constant stable, weighted sup decays 8x");
}

#[test]
fn criterion_10_byte_identical_output() {
    let bin = env!("CARGO_BIN_EXE_applab");
    let root = std::env::temp_dir().join(format!("applab_acceptance_{}", std::process::id()));
    std::fs::create_dir_all(&root).unwrap();

    let eval_cfg = root.join("eval.json");
    std::fs::write(
        &eval_cfg,
        r#"{
  "experiment": "eval",
  "operator": { "a": [1.0, 2.0], "b": [0.1], "rho": 2.0, "c": 1 },
  "grids": { "x": [0.25, 0.5, 1.0, 2.0, 4.0], "n": [10, 100] },
  "function": { "preset": "exp_neg" }
}"#,
    )
    .unwrap();
    let moments_cfg = root.join("moments.json");
    std::fs::write(
        &moments_cfg,
        r#"{
  "experiment": "moments",
  "operator": { "preset": "phillips" },
  "grids": { "x": [0.25, 1.0, 4.0], "n": [10, 100] }
}"#,
    )
    .unwrap();

    let run = |cfg: &std::path::Path, threads: &str, out: &str| {
        let dir = root.join(out);
        let output = Command::new(bin)
            .arg(cfg.file_stem().unwrap().to_str().unwrap())
            .arg("--config")
            .arg(cfg)
            .arg("--threads")
            .arg(threads)
            .arg("--out")
            .arg(&dir)
            .output()
            .unwrap();
        assert!(
            output.status.success(),
            "{cfg:?} --threads {threads}: {}",
            String::from_utf8_lossy(&output.stderr)
        );
        let name = format!("{}.csv", cfg.file_stem().unwrap().to_str().unwrap());
        std::fs::read(dir.join(name)).unwrap()
    };

    for cfg in [&eval_cfg, &moments_cfg] {
        let a = run(cfg, "2", "a");
        let b = run(cfg, "2", "b");
        assert_eq!(a, b, "{cfg:?}: repeat runs differ");
        let t1 = run(cfg, "1", "t1");
        let t8 = run(cfg, "8", "t8");
        assert_eq!(t1, t8, "{cfg:?}: --threads 1 vs 8 differ");
        assert_eq!(a, t1, "{cfg:?}: thread count changed the bytes");
    }
    let _ = std::fs::remove_dir_all(&root);
    pass(10, "byte-identical CSVs across repeats and --threads 1 vs 8");
}
