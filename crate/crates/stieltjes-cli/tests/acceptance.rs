//! The ten acceptance criteria, one test per criterion. Each prints a single
//! summary line; run with
//! `cargo test -p stieltjes-cli --test acceptance -- --nocapture` to see them.

use std::path::PathBuf;
use std::process::{Command, Output};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stieltjes::classify::{
    kernel_embedding_residual, lambda_polynomial_probe, limit_checks, pick_property_check,
    PickGrid,
};
use stieltjes::expr::FunctionSpec;
use stieltjes::hausdorff::{base_point_consistency, reconstruct, recover_measure, MomentSequence};
use stieltjes::measure::MeasureSpec;
use stieltjes::operators::{
    f_nk_measure_oracle, f_nk_operator_from_jet, f_nk_sum, f_nk_widder, WidderVariant,
};
use stieltjes::real::{Ext, Real};

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

fn criterion(number: usize, label: &str, body: impl FnOnce() -> Result<(), String>) {
    match body() {
        Ok(()) => println!("ACCEPTANCE {number}: PASS ({label})"),
        Err(msg) => {
            println!("ACCEPTANCE {number}: FAIL ({label}): {msg}");
            panic!("acceptance criterion {number} failed: {msg}");
        }
    }
}

/// Five measure-backed corpus functions with their orders.
fn corpus_measures() -> Vec<(MeasureSpec, f64)> {
    vec![
        (MeasureSpec::new(0.0, vec![(1.0, 1.0)], vec![]).unwrap(), 1.0),
        (MeasureSpec::new(0.5, vec![(0.0, 1.0)], vec![]).unwrap(), 0.5),
        (MeasureSpec::new(0.0, vec![], vec![(0.0, 1.0, 1.0)]).unwrap(), 1.0),
        (
            MeasureSpec::new(0.0, vec![(0.5, 0.3), (2.0, 1.7)], vec![(1.0, 3.0, 0.25)]).unwrap(),
            2.0,
        ),
        (
            MeasureSpec::new(1.0, vec![(1.0, 2.0)], vec![(0.5, 1.5, 1.0)]).unwrap(),
            3.5,
        ),
    ]
}

fn corpus_exprs() -> Vec<&'static str> {
    vec!["exp(-x)", "1/(x+1)", "log(1+1/x)", "x^(-0.5)", "exp(-x)/(x+2)"]
}

const GRID7: [f64; 7] = [1e-2, 1e-1, 0.5, 1.0, 2.0, 10.0, 100.0];

/// Sum route vs operator route for every function/λ pair, plus the three
/// Widder variants at order 1.
fn equivalence_pass<R: Real>(
    functions: &[(FunctionSpec, f64)],
    max_total: usize,
    eps_rel: f64,
) -> Result<(), String> {
    let eps = R::from_f64(eps_rel);
    for (f, lambda) in functions {
        for &x in &GRID7 {
            let xr = R::from_f64(x);
            let jet = f.jet(&xr, max_total).map_err(|e| e.to_string())?;
            for n in 0..=max_total {
                for k in 0..=(max_total - n) {
                    let sum = f_nk_sum(&jet, *lambda, n, k).map_err(|e| e.to_string())?;
                    let op = f_nk_operator_from_jet(&jet, *lambda, n, k)
                        .map_err(|e| e.to_string())?;
                    let diff = (sum.value.clone() - &op).abs();
                    ensure!(
                        diff <= eps.clone() * &sum.scale,
                        "sum/operator mismatch for {} at λ={lambda}, x={x}, (n,k)=({n},{k})",
                        f.describe()
                    );
                }
            }
        }
    }
    Ok(())
}

#[test]
fn acceptance_01_formula_equivalence() {
    criterion(1, "formula equivalence across routes and variants", || {
        let mut functions: Vec<(FunctionSpec, f64)> = Vec::new();
        for (m, lambda) in corpus_measures() {
            functions.push((FunctionSpec::from_measure(m, lambda).unwrap(), lambda));
        }
        for src in corpus_exprs() {
            for lambda in [0.5, 1.0] {
                functions.push((FunctionSpec::from_expr(src).unwrap(), lambda));
            }
        }
        ensure!(functions.len() >= 10, "corpus too small");
        equivalence_pass::<f64>(&functions, 10, 1e-8)?;
        equivalence_pass::<Ext>(&functions, 25, 1e-30)?;

        // three Widder variants agree at order one
        for (f, _) in &functions {
            for &x in &GRID7 {
                let jet = f.jet(&x, 10).map_err(|e| e.to_string())?;
                for n in 0..=5usize {
                    for k in 0..=(5 - n) {
                        let sum = f_nk_sum(&jet, 1.0, n, k).map_err(|e| e.to_string())?;
                        for variant in [WidderVariant::Sum, WidderVariant::Deriv1, WidderVariant::Deriv2] {
                            let v = f_nk_widder(f, n, k, &x, variant)
                                .map_err(|e| e.to_string())?;
                            ensure!(
                                (sum.value - v).abs() <= 1e-8 * sum.scale,
                                "variant {variant:?} disagrees for {} at x={x}, (n,k)=({n},{k})",
                                f.describe()
                            );
                        }
                    }
                }
            }
        }
        Ok(())
    });
}

#[test]
fn acceptance_02_measure_oracle() {
    criterion(2, "closed-form measure oracle matches the sum route", || {
        for (m, lambda) in corpus_measures() {
            let f = FunctionSpec::from_measure(m.clone(), lambda).unwrap();
            for &x in &GRID7 {
                let xr = Ext::from_f64(x);
                let jet = f.jet(&xr, 10).map_err(|e| e.to_string())?;
                for n in 0..=10usize {
                    for k in 0..=(10 - n) {
                        let sum = f_nk_sum(&jet, lambda, n, k).map_err(|e| e.to_string())?;
                        let oracle = f_nk_measure_oracle(&m, lambda, n, k, &xr)
                            .map_err(|e| e.to_string())?;
                        let diff = (sum.value - &oracle).abs();
                        let tol = Ext::from_f64(1e-10) * &oracle + Ext::from_f64(1e-40);
                        ensure!(
                            diff <= tol,
                            "oracle mismatch for {} at x={x}, (n,k)=({n},{k})",
                            m.describe()
                        );
                    }
                }
            }
        }
        // the dyadic special case is exact: F_{n,k}(1) = (n+k)!/2^{n+k+1}
        let f = FunctionSpec::from_measure(
            MeasureSpec::new(0.0, vec![(1.0, 1.0)], vec![]).unwrap(),
            1.0,
        )
        .unwrap();
        let jet = f.jet(&1.0f64, 10).map_err(|e| e.to_string())?;
        for n in 0..=5usize {
            for k in 0..=5usize {
                let got = f_nk_sum(&jet, 1.0, n, k).map_err(|e| e.to_string())?.value;
                let mut exact = 1.0f64;
                for i in 1..=(n + k) {
                    exact *= i as f64;
                }
                exact /= 2f64.powi((n + k + 1) as i32);
                ensure!(
                    (got - exact).abs() <= 1e-12,
                    "dyadic value off at (n,k)=({n},{k}): {got} vs {exact}"
                );
            }
        }
        Ok(())
    });
}

#[test]
fn acceptance_03_nonnegativity_on_random_measures() {
    criterion(3, "random measure-backed tables stay nonnegative", || {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..200 {
            let c = rng.gen_range(0.0..2.0);
            let n_atoms = rng.gen_range(0..=3);
            let atoms: Vec<(f64, f64)> = (0..n_atoms)
                .map(|_| (rng.gen_range(0.0..5.0), rng.gen_range(0.0..3.0)))
                .collect();
            let n_pieces = rng.gen_range(0..=2);
            let mut pieces = Vec::new();
            let mut edge = rng.gen_range(0.0..1.0);
            for _ in 0..n_pieces {
                let a = edge + rng.gen_range(0.0..1.0);
                let b = a + rng.gen_range(0.1..2.0);
                pieces.push((a, b, rng.gen_range(0.0..2.0)));
                edge = b;
            }
            let m = MeasureSpec::new(c, atoms, pieces)
                .map_err(|e| format!("trial {trial}: bad random measure: {e}"))?;
            let lambda = rng.gen_range(0.3..4.0);
            let f = FunctionSpec::from_measure(m, lambda).unwrap();
            for _ in 0..3 {
                let x = (rng.gen_range(0.05f64.ln()..50f64.ln())).exp();
                let n = rng.gen_range(0..=12usize);
                let k = rng.gen_range(0..=(12 - n));
                let jet = f.jet(&x, n + k).map_err(|e| e.to_string())?;
                let fv = f_nk_sum(&jet, lambda, n, k).map_err(|e| e.to_string())?;
                ensure!(
                    fv.value + 1e-8 * fv.scale >= 0.0,
                    "trial {trial}: violation at λ={lambda}, x={x}, (n,k)=({n},{k}): {}",
                    fv.value
                );
            }
        }
        Ok(())
    });
}

#[test]
fn acceptance_04_rejection_certificates() {
    criterion(4, "pinned rejection certificates", || {
        let exp = FunctionSpec::from_expr("exp(-x)").unwrap();
        let jet = exp.jet(&1.0f64, 2).map_err(|e| e.to_string())?;
        let f02 = f_nk_sum(&jet, 1.0, 0, 2).map_err(|e| e.to_string())?.value;
        ensure!(
            (f02 - (-(-1.0f64).exp())).abs() <= 1e-12,
            "F_02(1) = {f02}, want -e^-1"
        );

        let jet = exp.jet(&2.0f64, 3).map_err(|e| e.to_string())?;
        let f12 = f_nk_sum(&jet, 1.0, 1, 2).map_err(|e| e.to_string())?.value;
        ensure!(
            (f12 - (-2.0 * (-2.0f64).exp())).abs() <= 1e-12,
            "F_12(2) = {f12}, want -2e^-2"
        );

        let recip = FunctionSpec::from_expr("1/(x+1)").unwrap();
        let jet = recip.jet(&2.0f64, 1).map_err(|e| e.to_string())?;
        let f01 = f_nk_sum(&jet, 0.5, 0, 1).map_err(|e| e.to_string())?.value;
        ensure!(
            (f01 - (-1.0 / 18.0)).abs() <= 1e-12,
            "half-order F_01(2) = {f01}, want -1/18"
        );
        Ok(())
    });
}

#[test]
fn acceptance_05_hausdorff_identities() {
    criterion(5, "reconstruction mass and moment identities", || {
        let entries: Vec<Ext> = (0..65)
            .map(|n| Ext::from_f64(1.0) / Ext::from_usize(n + 1))
            .collect();
        let c = MomentSequence::new(entries).map_err(|e| e.to_string())?;
        let cs = c.as_slice();
        for depth in [4usize, 16, 64] {
            let nu = reconstruct(&c, depth).map_err(|e| e.to_string())?;
            let tol = Ext::from_f64(1e-55);
            let m0 = nu.moment(0);
            let m1 = nu.moment(1);
            let m2 = nu.moment(2);
            ensure!((m0 - &cs[0]).abs() <= tol, "K={depth}: m_0 != c_0");
            ensure!((m1 - &cs[1]).abs() <= tol, "K={depth}: m_1 != c_1");
            let lhs = m2 - &cs[2];
            let rhs = (cs[1].clone() - &cs[2]) / Ext::from_usize(depth);
            ensure!(
                (lhs - rhs).abs() <= Ext::from_f64(1e-55),
                "K={depth}: m_2 - c_2 identity broken"
            );
        }
        let nu = reconstruct(&c, 4).map_err(|e| e.to_string())?;
        ensure!(nu.atoms().len() == 5, "K=4 should give 5 masses");
        for (u, m) in nu.atoms() {
            ensure!(
                (m.to_f64() - 0.2).abs() <= 1e-12,
                "mass at u={} is {}, want 0.2",
                u.to_f64(),
                m.to_f64()
            );
        }
        Ok(())
    });
}

#[test]
fn acceptance_06_recovery_round_trip() {
    criterion(6, "measure recovery round trip", || {
        let measures = vec![
            MeasureSpec::new(0.0, vec![(1.0, 1.0)], vec![]).unwrap(),
            MeasureSpec::new(0.0, vec![], vec![(0.0, 1.0, 1.0)]).unwrap(),
            MeasureSpec::new(2.0, vec![], vec![]).unwrap(),
        ];
        for m in measures {
            for lambda in [0.5, 1.0, 2.0] {
                let f = FunctionSpec::from_measure(m.clone(), lambda).unwrap();
                let x = Ext::from_f64(1.0);
                let r64 = recover_measure::<Ext>(&f, lambda, &x, 64).map_err(|e| e.to_string())?;
                let r16 = recover_measure::<Ext>(&f, lambda, &x, 16).map_err(|e| e.to_string())?;
                ensure!(
                    r64.sup_error <= 1e-2,
                    "{} at λ={lambda}: K=64 sup error {}",
                    m.describe(),
                    r64.sup_error
                );
                // strict decrease, except when K=16 is already exact (the
                // constant function recovers with zero error at every depth)
                ensure!(
                    r64.sup_error < r16.sup_error || r16.sup_error <= 1e-12,
                    "{} at λ={lambda}: error did not shrink ({} vs {})",
                    m.describe(),
                    r64.sup_error,
                    r16.sup_error
                );
            }
        }
        // 1/x carries a constant moment sequence and recovers exactly
        let f = FunctionSpec::from_expr("1/x").unwrap();
        for depth in [4usize, 16, 64] {
            for x in [1.0, 2.0] {
                let rec = recover_measure::<Ext>(&f, 1.0, &Ext::from_f64(x), depth)
                    .map_err(|e| e.to_string())?;
                ensure!(
                    rec.atoms.len() == 1,
                    "1/x at K={depth}, x={x}: {} atoms",
                    rec.atoms.len()
                );
                let (t, w) = &rec.atoms[0];
                ensure!(t.to_f64() == 0.0, "1/x atom not at t=0");
                ensure!(
                    (w.to_f64() - 1.0).abs() <= 1e-12,
                    "1/x mass {} at K={depth}",
                    w.to_f64()
                );
                ensure!(rec.c_hat.to_f64() == 0.0, "1/x picked up a constant");
            }
        }
        Ok(())
    });
}

#[test]
fn acceptance_07_base_point_consistency() {
    criterion(7, "recovery agrees across base points", || {
        let f = FunctionSpec::from_expr("1/(x+1)").unwrap();
        let rep = base_point_consistency::<Ext>(
            &f,
            1.0,
            &Ext::from_f64(1.0),
            &Ext::from_f64(2.0),
            32,
        )
        .map_err(|e| e.to_string())?;
        let budget = rep.first.sup_error + rep.second.sup_error;
        ensure!(
            rep.sup_diff <= budget * (1.0 + 1e-12),
            "sup diff {} exceeds round-trip budget {}",
            rep.sup_diff,
            budget
        );
        Ok(())
    });
}

#[test]
fn acceptance_08_embedding_and_limits() {
    criterion(8, "embedding residuals, limit rates, λ-polynomial structure", || {
        for &(l, lp) in &[(1.0, 2.0), (0.5, 1.5)] {
            for &x in &[0.5, 1.0, 10.0] {
                for &t in &[0.0, 1.0, 10.0] {
                    let c =
                        kernel_embedding_residual(l, lp, x, t).map_err(|e| e.to_string())?;
                    ensure!(
                        c.residual.abs() <= 1e-10,
                        "residual {} at (λ={l}, λ'={lp}, x={x}, t={t})",
                        c.residual
                    );
                }
            }
        }

        let f = FunctionSpec::from_expr("exp(-x)").unwrap();
        let lambdas = [1e1, 1e2, 1e3, 1e4];
        for (n, k) in [(0usize, 1usize), (1, 2)] {
            let rep =
                limit_checks::<f64>(&f, &1.0, n, k, &lambdas).map_err(|e| e.to_string())?;
            for pair in rep.rows.windows(2) {
                let ratio = pair[1].gap_large / pair[0].gap_large;
                ensure!(
                    (ratio - 0.1).abs() < 0.03,
                    "(n,k)=({n},{k}): gap ratio {ratio} per decade, want about 0.1"
                );
            }
        }

        let f = FunctionSpec::from_expr("exp(-x)*1/(x+1)").unwrap();
        let x = Ext::from_f64(1.3);
        for k in 0..=5usize {
            let nodes: Vec<f64> = (0..=k).map(|i| 0.5 + i as f64).collect();
            let dev = lambda_polynomial_probe(&f, &x, 1, k, &nodes, &[0.25, 2.25, 7.5])
                .map_err(|e| e.to_string())?;
            ensure!(
                dev < Ext::from_f64(1e-40),
                "degree-{k} interpolation deviates by {}",
                dev.to_f64()
            );
        }
        Ok(())
    });
}

#[test]
fn acceptance_09_pick_check() {
    criterion(9, "complex half-plane check", || {
        let atom = FunctionSpec::from_measure(
            MeasureSpec::new(0.0, vec![(1.0, 1.0)], vec![]).unwrap(),
            1.0,
        )
        .unwrap();
        let rep = pick_property_check(&atom, &PickGrid::default(), 1e-12)
            .map_err(|e| e.to_string())?;
        ensure!(rep.consistent, "atom(1,1) failed the half-plane sweep");

        let exp = FunctionSpec::from_expr("exp(-x)").unwrap();
        let grid = PickGrid::new(0.1, 10.0, 0.1, 4.712, 20, 20).unwrap();
        let rep = pick_property_check(&exp, &grid, 1e-12).map_err(|e| e.to_string())?;
        ensure!(!rep.consistent, "exp(-z) slipped through");
        let hit = rep
            .violations
            .iter()
            .any(|v| v.re == 0.1 && (v.im - 4.712).abs() < 1e-9 && v.value > 0.9);
        ensure!(hit, "documented violation point not reported");
        Ok(())
    });
}

fn cli() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stieltjes"));
    c.env_remove("STIELTJES_PRECISION");
    c
}

fn run_twice(args: &[&str]) -> Result<(i32, Vec<u8>), String> {
    let go = || -> Output {
        cli().args(args).output().expect("binary runs")
    };
    let a = go();
    let b = go();
    if a.stdout != b.stdout || a.status.code() != b.status.code() {
        return Err(format!("nondeterministic output for {args:?}"));
    }
    Ok((a.status.code().unwrap_or(-1), a.stdout))
}

#[test]
fn acceptance_10_cli_end_to_end() {
    criterion(10, "CLI exit codes and byte-deterministic reports", || {
        let dir = std::env::temp_dir();
        let atom_path: PathBuf = dir.join(format!("acc-atom-{}.json", std::process::id()));
        let const_path: PathBuf = dir.join(format!("acc-const2-{}.json", std::process::id()));
        std::fs::write(&atom_path, r#"{"atoms":[[1,1]]}"#).map_err(|e| e.to_string())?;
        std::fs::write(&const_path, r#"{"C":2}"#).map_err(|e| e.to_string())?;

        let (code, out) = run_twice(&["classify", "--expr", "exp(-x)", "--lambda", "1"])?;
        ensure!(code == 1, "classify exp(-x): exit {code}, want 1");
        let doc: serde_json::Value =
            serde_json::from_slice(&out).map_err(|e| e.to_string())?;
        let cert = doc["violations"]
            .as_array()
            .unwrap()
            .iter()
            .any(|v| {
                v["x"] == 1.0
                    && v["n"] == 0
                    && v["k"] == 2
                    && (v["value"].as_f64().unwrap() + 0.36787944117144233).abs() < 1e-12
            });
        ensure!(cert, "missing certificate (1, 0, 2, -e^-1)");

        let (code, _) = run_twice(&[
            "classify", "--measure", atom_path.to_str().unwrap(), "--lambda", "1",
        ])?;
        ensure!(code == 0, "classify atom: exit {code}, want 0");

        let (code, _) = run_twice(&["classify", "--expr", "1/(x", "--lambda", "1"])?;
        ensure!(code == 2, "classify bad syntax: exit {code}, want 2");

        let (code, out32) = run_twice(&[
            "recover", "--expr", "1/(x+1)", "--lambda", "1", "--x", "1", "--K", "32",
        ])?;
        ensure!(code == 0, "recover K=32: exit {code}, want 0");
        let (code, out16) = run_twice(&[
            "recover", "--expr", "1/(x+1)", "--lambda", "1", "--x", "1", "--K", "16",
        ])?;
        ensure!(code == 0, "recover K=16: exit {code}, want 0");
        let e32 = serde_json::from_slice::<serde_json::Value>(&out32)
            .map_err(|e| e.to_string())?["diagnostics"]["sup_error"]
            .as_f64()
            .unwrap();
        let e16 = serde_json::from_slice::<serde_json::Value>(&out16)
            .map_err(|e| e.to_string())?["diagnostics"]["sup_error"]
            .as_f64()
            .unwrap();
        ensure!(e32 < e16, "sup_error {e32} not below the K=16 run's {e16}");

        let (code, _) = run_twice(&[
            "recover", "--expr", "exp(-x)", "--lambda", "1", "--x", "1", "--K", "16",
        ])?;
        ensure!(code == 1, "recover exp(-x): exit {code}, want 1");

        let (code, out) = run_twice(&[
            "recover", "--measure", const_path.to_str().unwrap(),
            "--lambda", "3", "--x", "5", "--K", "8",
        ])?;
        ensure!(code == 0, "recover constant: exit {code}, want 0");
        let doc: serde_json::Value =
            serde_json::from_slice(&out).map_err(|e| e.to_string())?;
        ensure!(doc["C"].as_f64() == Some(2.0), "constant not recovered");
        ensure!(
            doc["atoms"].as_array().unwrap().is_empty(),
            "phantom atoms in constant recovery"
        );
        Ok(())
    });
}
