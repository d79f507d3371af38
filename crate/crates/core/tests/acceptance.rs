//! The acceptance checklist. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thetahat_core::charforms::{curvature, omega, verify_closed};
use thetahat_core::chernweil::{chern_weil_form, classical_curvature, pullback_section_matrix};
use thetahat_core::connspace::{ChartTransition, ConnChart};
use thetahat_core::forms::Form;
use thetahat_core::numeric::{
    fd_closedness_residual, fubini_study_cp2, integrate_top, perturbed_t4, DensityField, Quadrature,
};
use thetahat_core::symkernel::{Expr, VarId};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exact_closedness() -> Outcome {
    let mut cases = vec![(2, 1), (3, 1), (4, 1), (4, 2)];
    for n in 1..=3 {
        for k in 1..=n {
            if !cases.contains(&(n, k)) {
                cases.push((n, k));
            }
        }
    }
    for &(n, k) in &cases {
        let d = verify_closed(n, k).map_err(|e| e.to_string())?;
        ensure(d.is_zero(), || format!("d(omega_{k}) at n={n} has {} terms", d.term_count()))?;
    }
    Ok(format!("{} (n,k) pairs structurally closed", cases.len()))
}

fn nonzeroness() -> Outcome {
    let mut counts = Vec::new();
    for n in 1..=4 {
        for k in 1..=n / 2 {
            let r = omega(n, k).map_err(|e| e.to_string())?;
            ensure(r.term_count >= 1, || format!("omega_{k} at n={n} is zero"))?;
            counts.push(format!("omega({n},{k})={}", r.term_count));
        }
    }
    Ok(counts.join(" "))
}

fn x(i: usize) -> Expr {
    Expr::x(i)
}

fn ints(rows: &[&[i64]]) -> Vec<Vec<Expr>> {
    rows.iter().map(|r| r.iter().map(|v| Expr::int(*v)).collect()).collect()
}

fn transitions() -> Vec<(String, ChartTransition)> {
    let sq = |e: &Expr| e.mul(e);
    let mut out = Vec::new();
    for n in [2, 3] {
        out.push((format!("identity n={n}"), ChartTransition::identity(n)));
    }
    out.push(("linear A n=2".into(), ChartTransition::linear(&ints(&[&[2, 1], &[1, 1]])).unwrap()));
    out.push(("linear B n=2".into(), ChartTransition::linear(&ints(&[&[1, -3], &[0, 2]])).unwrap()));
    out.push((
        "linear A n=3".into(),
        ChartTransition::linear(&ints(&[&[1, 2, 0], &[0, 1, 1], &[1, 0, 1]])).unwrap(),
    ));
    out.push((
        "linear B n=3".into(),
        ChartTransition::linear(&ints(&[&[2, 0, 0], &[1, 1, 0], &[0, 3, -1]])).unwrap(),
    ));
    out.push((
        "quadratic A n=2".into(),
        ChartTransition::new(vec![x(1), x(2).add(&sq(&x(1)))], vec![x(1), x(2).sub(&sq(&x(1)))]).unwrap(),
    ));
    out.push((
        "quadratic B n=2".into(),
        ChartTransition::new(
            vec![x(1).add(&sq(&x(2)).mul(&Expr::rational(1, 3))), x(2)],
            vec![x(1).sub(&sq(&x(2)).mul(&Expr::rational(1, 3))), x(2)],
        )
        .unwrap(),
    ));
    out.push((
        "quadratic A n=3".into(),
        ChartTransition::new(
            vec![x(1), x(2).add(&sq(&x(1))), x(3).add(&x(1).mul(&x(2)))],
            vec![
                x(1),
                x(2).sub(&sq(&x(1))),
                x(3).sub(&x(1).mul(&x(2).sub(&sq(&x(1))))),
            ],
        )
        .unwrap(),
    ));
    out.push((
        "quadratic B n=3".into(),
        ChartTransition::new(
            vec![x(1).add(&x(2).mul(&x(3))), x(2).add(&sq(&x(3))), x(3)],
            vec![
                x(1).sub(&x(2).sub(&sq(&x(3))).mul(&x(3))),
                x(2).sub(&sq(&x(3))),
                x(3),
            ],
        )
        .unwrap(),
    ));
    out
}

fn transition_law() -> Outcome {
    let ts = transitions();
    for (name, t) in &ts {
        let theta = t.theta_residual().map_err(|e| e.to_string())?;
        ensure(theta.is_zero(), || format!("{name}: theta residual {theta}"))?;
        let curv = t.curvature_residual().map_err(|e| e.to_string())?;
        ensure(curv.is_zero(), || format!("{name}: Theta residual {curv}"))?;
    }
    Ok(format!("{} transitions, both residuals structurally zero", ts.len()))
}

fn normal_coordinate_step() -> Outcome {
    for n in 1..=3 {
        let r = ConnChart::new(n).zero_section_d_curvature().map_err(|e| e.to_string())?;
        ensure(r.is_zero(), || format!("n={n}: dTheta at Gamma=0 is {r}"))?;
    }
    Ok("n = 1..3".into())
}

fn bianchi_and_trace() -> Outcome {
    for n in 1..=4 {
        let chart = ConnChart::new(n);
        let b = chart.bianchi_residual().map_err(|e| e.to_string())?;
        ensure(b.is_zero(), || format!("n={n}: Bianchi residual nonzero"))?;
        let t = chart.trace_residual().map_err(|e| e.to_string())?;
        ensure(t.is_zero(), || format!("n={n}: trace residual {t}"))?;
    }
    Ok("n = 1..4".into())
}

fn chern_weil_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (case, n) in [2, 3, 2, 3, 3].into_iter().enumerate() {
        let s = common::polynomial_section(&mut rng, n, 3, 2);
        let pulled = pullback_section_matrix(&curvature(n), &s).map_err(|e| e.to_string())?;
        ensure(pulled == classical_curvature(&s), || format!("section {case} (n={n}) disagrees"))?;
    }
    Ok("5 random polynomial sections at n = 2, 3".into())
}

fn pullbacks_are_closed() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = Vec::new();
    let points: Vec<Vec<f64>> = (0..20).map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    for _ in 0..3 {
        let s = common::quartic_section(&mut rng, 4, 8);
        let w = chern_weil_form(&s, 1).map_err(|e| e.to_string())?;
        ensure(!w.is_zero(), || "vacuous section: omega_1 is zero".into())?;
        ensure(w.d().is_zero(), || "symbolic d(s*omega_1) is nonzero".into())?;
        let r1 = fd_closedness_residual(&w, &points, 1e-3).map_err(|e| e.to_string())?;
        let r2 = fd_closedness_residual(&w, &points, 5e-4).map_err(|e| e.to_string())?;
        ensure(r1 < 1e-6, || format!("FD residual {r1:e} at h=1e-3"))?;
        let ratio = r1 / r2;
        ensure((3.5..=4.5).contains(&ratio), || format!("halving h reduced the residual by {ratio}, not ~4"))?;
        worst.push(format!("{r1:.1e} (x{ratio:.2})"));
    }
    let planted = Form::term(4, &[VarId::x(1), VarId::x(3)], Expr::x(2));
    let p1 = fd_closedness_residual(&planted, &points, 1e-3).map_err(|e| e.to_string())?;
    let p2 = fd_closedness_residual(&planted, &points, 5e-4).map_err(|e| e.to_string())?;
    ensure(p1 > 0.5 && (p1 - p2).abs() < 1e-6, || format!("planted control residuals {p1}, {p2}"))?;
    Ok(format!("FD residuals {}; planted control stalls at {p1:.3}", worst.join(", ")))
}

fn connection_independence() -> Outcome {
    let eps = 0.3;
    let mut runs: Vec<Quadrature> = Vec::new();
    for seed in 0..3 {
        let fx = perturbed_t4(seed, eps, 32).map_err(|e| e.to_string())?;
        let w = chern_weil_form(&fx.section, 2).map_err(|e| e.to_string())?;
        let q = integrate_top(&w, &fx.domain).map_err(|e| e.to_string())?;
        ensure(q.value.norm() <= 1e-3 * q.l1.max(1.0), || format!("seed {seed}: integral {}", q.value))?;
        ensure(q.max_abs > 1e-4 * eps * eps, || format!("seed {seed}: vacuous, max density {}", q.max_abs))?;
        if seed == 0 {
            let fine = integrate_top(&w, &fx.domain.clone().with_resolution(64).unwrap()).map_err(|e| e.to_string())?;
            ensure((fine.value - q.value).norm() < 1e-6, || "grid doubling moved the integral".into())?;
        }
        runs.push(q);
    }
    for a in 0..3 {
        for b in (a + 1)..3 {
            let scale = runs[a].l1.max(runs[b].l1).max(1.0);
            ensure((runs[a].value - runs[b].value).norm() < 2e-3 * scale, || format!("seeds {a},{b} disagree"))?;
        }
    }
    let shown: Vec<String> = runs
        .iter()
        .map(|q| format!("{:.1e} (L1 {:.3}, max {:.3})", q.value.norm(), q.l1, q.max_abs))
        .collect();
    Ok(format!("|integral| per seed: {}", shown.join(", ")))
}

fn characteristic_number() -> Outcome {
    let fx = fubini_study_cp2(48).map_err(|e| e.to_string())?;
    let w = chern_weil_form(&fx.section, 2).map_err(|e| e.to_string())?;
    let density = DensityField::new(&w).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut largest: f64 = 0.0;
    for _ in 0..100 {
        let p: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let ours = density.eval(&p).map_err(|e| e.to_string())?;
        let oracle = common::fubini_study_density(&p);
        largest = largest.max(oracle.norm());
        ensure((ours - oracle).norm() < 1e-8, || format!("density at {p:?}: {ours} vs oracle {oracle}"))?;
    }
    ensure(largest > 1e-3, || "oracle density vanishes on the sample".into())?;
    let q = density.integrate(&fx.domain).map_err(|e| e.to_string())?;
    let err = (q.value.norm() - 3.0).abs() / 3.0;
    ensure(err <= 0.02, || format!("|integral| = {} (relative error {err:e})", q.value.norm()))?;
    Ok(format!("integral = {} + {}i, relative error {err:.1e}; oracle agrees at 100 points", q.value.re, q.value.im))
}

fn infrastructure() -> Outcome {
    fn runner() -> TestRunner {
        let config = Config {
            cases: 200,
            failure_persistence: None,
            ..Config::default()
        };
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
    }
    fn fail<T: std::fmt::Debug>(what: &str, e: TestError<T>) -> String {
        format!("{what}: {e}")
    }
    runner()
        .run(&common::form_any(), |(_, f)| common::check_dd(&f))
        .map_err(|e| fail("d(d f) = 0", e))?;
    runner()
        .run(&(common::form_any(), common::form_any()), |((p, a), (q, b))| {
            common::check_graded_commutativity(p, &a, q, &b)
        })
        .map_err(|e| fail("graded commutativity", e))?;
    runner()
        .run(&(common::form_any(), common::form_any()), |((p, a), (_, b))| common::check_leibniz(p, &a, &b))
        .map_err(|e| fail("Leibniz", e))?;
    runner()
        .run(&(common::form_any(), common::substitution()), |((_, f), s)| {
            common::check_pullback_commutes_with_d(&f, &s)
        })
        .map_err(|e| fail("pullback commutes with d", e))?;
    runner()
        .run(&common::two_form_matrix(), |m| common::check_newton(&m))
        .map_err(|e| fail("Newton identities", e))?;
    Ok("5 suites x 200 cases".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exact closedness of omega_k", exact_closedness),
        ("omega_k nonzero for k <= n/2", nonzeroness),
        ("transition law for theta and Theta", transition_law),
        ("dTheta at the zero section", normal_coordinate_step),
        ("Bianchi and trace identities", bianchi_and_trace),
        ("Chern-Weil curvature agreement", chern_weil_agreement),
        ("pulled-back forms are closed", pullbacks_are_closed),
        ("independence of the connection on T^4", connection_independence),
        ("characteristic number of CP^2", characteristic_number),
        ("algebraic identities, randomized", infrastructure),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2}. {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2}. {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
