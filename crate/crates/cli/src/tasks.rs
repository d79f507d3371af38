//! Task execution.

use std::time::Instant;

use serde_json::{Map, Value};

use thetahat_core::charforms::omega;
use thetahat_core::chernweil::{chern_weil_form, pullback_section, ConnectionSection};
use thetahat_core::connspace::ChartTransition;
use thetahat_core::forms::{Form, FormMatrix};
use thetahat_core::numeric::{fixture, integrate_top, FixtureParams};
use thetahat_core::{Error, Result};

use crate::dsl::{render_expr, render_form};
use crate::manifest::{IntegrateTask, Manifest, PullbackTarget, Task};
use crate::report::{Record, Report, Status};

/// Default tolerance for integrals expected to vanish, relative to
/// `max(1, L¹ norm of the density)`.
pub const ZERO_TOLERANCE: f64 = 1e-3;
/// Default relative tolerance for nonzero characteristic numbers.
pub const NUMBER_TOLERANCE: f64 = 0.02;

/// Everything a task may draw on.
#[derive(Clone, Debug, Default)]
pub struct Context {
    pub n: Option<usize>,
    pub section: Option<ConnectionSection>,
    pub transition: Option<ChartTransition>,
    pub timings: bool,
}

impl Context {
    pub fn from_manifest(m: &Manifest, timings: bool) -> Result<Context> {
        Ok(Context {
            n: Some(m.n),
            section: m.section()?,
            transition: m.transition.clone(),
            timings,
        })
    }

    fn need_n(&self) -> Result<usize> {
        self.n.ok_or_else(|| Error::InvalidDomain("chart dimension not given".into()))
    }
}

pub fn run_all(ctx: &Context, tasks: &[Task]) -> Report {
    let mut report = Report::default();
    for t in tasks {
        report.push(run(ctx, t));
    }
    report
}

pub fn run(ctx: &Context, task: &Task) -> Record {
    let start = Instant::now();
    let mut rec = Record::new(task.name());
    let outcome = match task {
        Task::VerifyClosed { k } => verify_closed(ctx, *k, &mut rec),
        Task::TransitionCheck => transition_check(ctx, &mut rec),
        Task::Pullback { target } => pullback(ctx, target, &mut rec),
        Task::Integrate(t) => integrate(t, &mut rec),
    };
    if let Err(e) = outcome {
        rec.status = Status::Error;
        rec.text("message", e);
    }
    if ctx.timings {
        let key = if matches!(task, Task::Integrate(_)) { "runtime_s" } else { "wall_time" };
        rec.float(key, start.elapsed().as_secs_f64());
    }
    rec
}

fn verify_closed(ctx: &Context, k: usize, rec: &mut Record) -> Result<()> {
    let n = ctx.need_n()?;
    rec.set("n", n).set("k", k);
    let r = omega(n, k)?;
    let nonzero_required = !r.beyond_half_dimension();
    rec.set("term_count", r.term_count)
        .set("closed", r.is_closed())
        .set("beyond_half_dimension", r.beyond_half_dimension());
    rec.status = Status::from_check(r.is_closed() && (!nonzero_required || r.term_count >= 1));
    Ok(())
}

fn render_matrix(m: &FormMatrix) -> Value {
    if m.is_zero() {
        return Value::from("0");
    }
    let mut out = Map::new();
    let n = m.size();
    for r in 0..n {
        for c in 0..n {
            let f = m.get(r, c);
            if !f.is_zero() {
                out.insert(format!("[{}][{}]", r + 1, c + 1), Value::from(render_form(f)));
            }
        }
    }
    Value::Object(out)
}

fn transition_check(ctx: &Context, rec: &mut Record) -> Result<()> {
    let t = ctx
        .transition
        .as_ref()
        .ok_or_else(|| Error::InvalidDomain("no [transition] block given".into()))?;
    rec.set("n", t.dim());
    rec.set(
        "forward",
        Value::Array(t.forward().iter().map(|e| Value::from(render_expr(e))).collect()),
    );
    let theta = t.theta_residual()?;
    let curvature = t.curvature_residual()?;
    rec.set("theta_residual", render_matrix(&theta))
        .set("Theta_residual", render_matrix(&curvature));
    rec.status = Status::from_check(theta.is_zero() && curvature.is_zero());
    Ok(())
}

fn pullback(ctx: &Context, target: &PullbackTarget, rec: &mut Record) -> Result<()> {
    let s = ctx
        .section
        .as_ref()
        .ok_or_else(|| Error::InvalidDomain("no [connection] or [metric] given".into()))?;
    rec.set("n", s.dim());
    let result: Form = match target {
        PullbackTarget::Omega(k) => {
            rec.set("k", *k).set("form", format!("omega_{k}"));
            chern_weil_form(s, *k)?
        }
        PullbackTarget::Form(f) => {
            rec.set("form", render_form(f));
            pullback_section(f, s)?
        }
    };
    rec.set("result", render_form(&result)).set("closed", result.d().is_zero());
    rec.status = Status::Computed;
    Ok(())
}

enum Reference {
    Zero,
    Magnitude(f64),
}

fn reference(name: &str, k: usize) -> Option<Reference> {
    match (name, k) {
        ("flat_t4" | "perturbed_t4", 2) | ("round_s2", 1) => Some(Reference::Zero),
        ("fubini_study_cp2", 2) => Some(Reference::Magnitude(3.0)),
        _ => None,
    }
}

fn integrate(t: &IntegrateTask, rec: &mut Record) -> Result<()> {
    rec.set("fixture", t.fixture.as_str()).set("k", t.k).set("grid", t.grid);
    let params = FixtureParams {
        seed: t.seed,
        eps: t.eps,
        resolution: t.grid,
    };
    if t.fixture == "perturbed_t4" {
        rec.set("seed", t.seed).float("eps", t.eps);
    }
    let fx = fixture(&t.fixture, &params)?;
    let n = fx.section.dim();
    if 2 * t.k != n {
        return Err(Error::DegreeMismatch {
            expected: n,
            found: 2 * t.k,
        });
    }
    let density = chern_weil_form(&fx.section, t.k)?;
    let q = integrate_top(&density, &fx.domain)?;
    rec.float("value_re", q.value.re)
        .float("value_im", q.value.im)
        .float("l1", q.l1)
        .float("max_abs", q.max_abs);
    let Some(reference) = reference(&t.fixture, t.k) else {
        rec.status = Status::Computed;
        return Ok(());
    };
    let mut ok = match reference {
        Reference::Zero => {
            let tol = t.tol.unwrap_or(ZERO_TOLERANCE);
            rec.set("expected", "0").float("tol", tol);
            q.value.norm() <= tol * q.l1.max(1.0)
        }
        Reference::Magnitude(m) => {
            let tol = t.tol.unwrap_or(NUMBER_TOLERANCE);
            rec.text("expected_magnitude", m).float("tol", tol);
            (q.value.norm() - m).abs() <= tol * m
        }
    };
    if t.fixture == "perturbed_t4" && t.eps != 0.0 {
        let nonvacuous = q.max_abs > 1e-4 * t.eps * t.eps;
        rec.set("nonvacuous", nonvacuous);
        ok &= nonvacuous;
    }
    rec.status = Status::from_check(ok);
    Ok(())
}
