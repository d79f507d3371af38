//! Built-in manifolds with connections and integration domains.
//!
//! Orientation conventions:
//! - tori: `dx1∧…∧dxn` on `[0,1)^n`;
//! - `round_s2`: stereographic chart `R^2`, oriented by `dx1∧dx2`;
//! - `fubini_study_cp2`: affine chart `C^2` with `z1 = x1 + i x2`,
//!   `z2 = x3 + i x4`, oriented by the complex orientation
//!   `dx1∧dx2∧dx3∧dx4`.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::eval::{cos2pi, sin2pi};
use super::quadrature::IntegrationDomain;
use crate::chernweil::{levi_civita, symmetrize, ConnectionSection, MetricSpec, Provenance};
use crate::error::{Error, Result};
use crate::matrix::ExprMatrix;
use crate::symkernel::{Expr, VarId};

pub const FIXTURE_NAMES: [&str; 4] = ["flat_t4", "perturbed_t4", "round_s2", "fubini_study_cp2"];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixtureParams {
    pub seed: u64,
    pub eps: f64,
    pub resolution: usize,
}

impl Default for FixtureParams {
    fn default() -> Self {
        FixtureParams {
            seed: 0,
            eps: 0.3,
            resolution: 16,
        }
    }
}

#[derive(Clone, Debug)]
pub enum FixtureData {
    Section,
    Metric(MetricSpec),
}

/// A connection on a full-measure chart of a closed manifold.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub data: FixtureData,
    pub section: ConnectionSection,
    pub domain: IntegrationDomain,
}

pub fn fixture(name: &str, params: &FixtureParams) -> Result<Fixture> {
    match name {
        "flat_t4" => flat_t4(params.resolution),
        "perturbed_t4" => perturbed_t4(params.seed, params.eps, params.resolution),
        "round_s2" => round_s2(params.resolution),
        "fubini_study_cp2" => fubini_study_cp2(params.resolution),
        _ => Err(Error::UnknownFixture(name.to_string())),
    }
}

pub fn flat_t4(resolution: usize) -> Result<Fixture> {
    Ok(Fixture {
        name: "flat_t4".into(),
        data: FixtureData::Section,
        section: ConnectionSection::zero(4),
        domain: IntegrationDomain::unit_torus(4, resolution)?,
    })
}

/// `eps` rounded to a multiple of `1e-6`, exactly.
fn exact_eps(eps: f64) -> Result<Expr> {
    if !eps.is_finite() || eps.abs() > 1e6 {
        return Err(Error::InvalidDomain(format!("perturbation size {eps} out of range")));
    }
    Ok(Expr::rational((eps * 1e6).round() as i64, 1_000_000))
}

/// Flat torus connection plus periodic terms of size `eps`: always
/// `Γ^1_22 = ε sin(2πx3)` and `Γ^2_11 = ε cos(2πx4)`, then six seeded
/// terms `ε (m/4) trig(2πx_a)` in random (unsymmetrized) slots, all passed
/// through [`symmetrize`].
pub fn perturbed_t4(seed: u64, eps: f64, resolution: usize) -> Result<Fixture> {
    let e = exact_eps(eps)?;
    let mut raw: BTreeMap<(usize, usize, usize), Expr> = BTreeMap::new();
    let mut push = |slot: (usize, usize, usize), v: Expr| {
        let entry = raw.entry(slot).or_insert_with(Expr::zero);
        *entry = entry.add(&v.mul(&e));
    };
    push((1, 2, 2), sin2pi(VarId::x(3)));
    push((2, 1, 1), cos2pi(VarId::x(4)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..6 {
        let slot = (rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(1..=4));
        let axis = VarId::x(rng.gen_range(1..=4));
        let trig = if rng.gen_bool(0.5) { sin2pi(axis) } else { cos2pi(axis) };
        let mut m: i64 = rng.gen_range(1..=4);
        if rng.gen_bool(0.5) {
            m = -m;
        }
        push(slot, trig.mul(&Expr::rational(m, 4)));
    }
    let section = symmetrize(4, &raw)?.with_provenance(Provenance::Perturbation { seed, eps });
    Ok(Fixture {
        name: "perturbed_t4".into(),
        data: FixtureData::Section,
        section,
        domain: IntegrationDomain::unit_torus(4, resolution)?,
    })
}

/// Unit sphere in stereographic coordinates: `g = 4/(1+|x|²)² δ`.
pub fn round_s2(resolution: usize) -> Result<Fixture> {
    let x = Expr::x;
    let q = &(&Expr::one() + &(&x(1) * &x(1))) + &(&x(2) * &x(2));
    let conf = Expr::int(4).div(&q.pow(2)?)?;
    let metric = MetricSpec::conformal(2, conf)?;
    let section = levi_civita(&metric)?;
    Ok(Fixture {
        name: "round_s2".into(),
        data: FixtureData::Metric(metric),
        section,
        domain: IntegrationDomain::tan_chart(2, resolution)?,
    })
}

/// Real form of the Fubini–Study metric on the affine chart of `CP^2`,
/// from the Kähler potential `log(1 + |z|²)`, together with its inverse.
pub fn fubini_study_metric() -> Result<MetricSpec> {
    let x = Expr::x;
    let sq = |i| &x(i) * &x(i);
    let q = &(&(&(&Expr::one() + &sq(1)) + &sq(2)) + &sq(3)) + &sq(4);
    let a = &(&x(1) * &x(3)) + &(&x(2) * &x(4));
    let b = &(&x(1) * &x(4)) - &(&x(2) * &x(3));
    let p12 = &(&Expr::one() + &sq(1)) + &sq(2);
    let p34 = &(&Expr::one() + &sq(3)) + &sq(4);
    let z = Expr::zero();
    // h = ((1+|z|²)δ - z̄ zᵀ)/(1+|z|²)², realified
    let raw: ExprMatrix = vec![
        vec![p34.clone(), z.clone(), a.neg(), b.neg()],
        vec![z.clone(), p34.clone(), b.clone(), a.neg()],
        vec![a.neg(), b.clone(), p12.clone(), z.clone()],
        vec![b.neg(), a.neg(), z.clone(), p12.clone()],
    ];
    let q2 = q.pow(2)?;
    let g: ExprMatrix = raw
        .iter()
        .map(|row| row.iter().map(|e| e.div(&q2)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    // h⁻¹ = (1+|z|²)(δ + z zᴴ), realified
    let c = &(&(&x(1) * &x(3)) + &(&x(2) * &x(4))).clone();
    let d = &(&x(2) * &x(3)) - &(&x(1) * &x(4));
    let inv_raw: ExprMatrix = vec![
        vec![&Expr::one() + &(&sq(1) + &sq(2)), z.clone(), c.clone(), d.neg()],
        vec![z.clone(), &Expr::one() + &(&sq(1) + &sq(2)), d.clone(), c.clone()],
        vec![c.clone(), d.clone(), &Expr::one() + &(&sq(3) + &sq(4)), z.clone()],
        vec![d.neg(), c.clone(), z.clone(), &Expr::one() + &(&sq(3) + &sq(4))],
    ];
    let g_inv: ExprMatrix = inv_raw
        .iter()
        .map(|row| row.iter().map(|e| e.mul(&q)).collect())
        .collect();
    MetricSpec::with_inverse(g, g_inv)
}

pub fn fubini_study_cp2(resolution: usize) -> Result<Fixture> {
    let metric = fubini_study_metric()?;
    let section = levi_civita(&metric)?;
    Ok(Fixture {
        name: "fubini_study_cp2".into(),
        data: FixtureData::Metric(metric),
        section,
        domain: IntegrationDomain::tan_chart(4, resolution)?,
    })
}
