//! Numeric evaluation of forms on base charts: finite-difference
//! closedness residuals and integration of top-degree densities.

mod eval;
mod fixtures;
mod quadrature;

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::chernweil::chern_weil_form;
use crate::error::{Error, Result};
use crate::forms::{Form, Gen, GenTuple};
use crate::symkernel::VarId;

pub use eval::{cos2pi, sin2pi, CompiledExpr, GridValuation, COS_2PI, SIN_2PI};
pub use fixtures::{
    fixture, flat_t4, fubini_study_cp2, fubini_study_metric, perturbed_t4, round_s2, Fixture, FixtureData,
    FixtureParams, FIXTURE_NAMES,
};
pub use quadrature::{gauss_legendre, tensor_sum, Compactification, DomainKind, IntegrationDomain, Quadrature};

/// The top coefficient of an `n`-form on an `n`-dimensional base chart,
/// compiled for evaluation.
#[derive(Clone, Debug)]
pub struct DensityField {
    coefficient: Option<CompiledExpr>,
    n: usize,
}

impl DensityField {
    pub fn new(f: &Form) -> Result<DensityField> {
        let n = f.dim();
        if f.is_zero() {
            return Ok(DensityField { coefficient: None, n });
        }
        match f.degree() {
            Some(d) if d == n => {}
            Some(d) => return Err(Error::DegreeMismatch { expected: n, found: d }),
            None => {
                let found = f.terms().keys().map(|k| k.len()).find(|&d| d != n).unwrap_or(0);
                return Err(Error::DegreeMismatch { expected: n, found });
            }
        }
        let top: Vec<VarId> = (1..=n).map(VarId::x).collect();
        let c = f.coefficient(&top);
        if c.is_zero() {
            // degree n but built from fiber generators
            return Err(Error::InvalidDomain("top-degree form is not on the base chart".into()));
        }
        Ok(DensityField {
            coefficient: Some(CompiledExpr::new(&c, n)?),
            n,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.coefficient.is_none()
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        match &self.coefficient {
            None => Ok(Complex64::new(0.0, 0.0)),
            Some(c) => c.eval(x),
        }
    }

    fn eval_with(&self, x: &[f64], buf: &mut Vec<f64>) -> Result<Complex64> {
        match &self.coefficient {
            None => Ok(Complex64::new(0.0, 0.0)),
            Some(c) => c.eval_with(x, buf),
        }
    }

    /// Quadrature of the density over `domain`, with its orientation.
    pub fn integrate(&self, domain: &IntegrationDomain) -> Result<Quadrature> {
        if domain.dim() != self.n {
            return Err(Error::ChartMismatch {
                left: self.n,
                right: domain.dim(),
            });
        }
        let mut q = tensor_sum(&domain.axis_rules(), &|x: &[f64], buf: &mut Vec<f64>| self.eval_with(x, buf))?;
        if domain.orientation < 0 {
            q.value = -q.value;
        }
        Ok(q)
    }
}

/// `∫ f` for a top-degree form on the domain's chart.
pub fn integrate_top(f: &Form, domain: &IntegrationDomain) -> Result<Quadrature> {
    DensityField::new(f)?.integrate(domain)
}

/// Largest central-difference estimate of a coefficient of `df` over the
/// sample points.
pub fn fd_closedness_residual(f: &Form, points: &[Vec<f64>], h: f64) -> Result<f64> {
    let n = f.dim();
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidDomain(format!("step {h} must be positive")));
    }
    let mut compiled = Vec::with_capacity(f.term_count());
    for (t, c) in f.terms() {
        if t.iter().any(|g| g.0.is_fiber()) {
            return Err(Error::InvalidDomain("form has fiber generators".into()));
        }
        compiled.push((t.clone(), CompiledExpr::new(c, n)?));
    }
    let mut worst: f64 = 0.0;
    let mut shifted = vec![0.0; n];
    for p in points {
        if p.len() != n {
            return Err(Error::ChartMismatch { left: n, right: p.len() });
        }
        let mut acc: BTreeMap<GenTuple, Complex64> = BTreeMap::new();
        for (t, c) in &compiled {
            for v in 1..=n {
                let g = Gen(VarId::x(v));
                let Err(pos) = t.binary_search(&g) else {
                    continue;
                };
                shifted.copy_from_slice(p);
                shifted[v - 1] = p[v - 1] + h;
                let plus = c.eval(&shifted)?;
                shifted[v - 1] = p[v - 1] - h;
                let minus = c.eval(&shifted)?;
                let mut dv = (plus - minus) / (2.0 * h);
                if pos % 2 == 1 {
                    dv = -dv;
                }
                let mut key = t.clone();
                key.insert(pos, g);
                *acc.entry(key).or_insert(Complex64::new(0.0, 0.0)) += dv;
            }
        }
        for v in acc.values() {
            worst = worst.max(v.norm());
        }
    }
    Ok(worst)
}

/// `∫ (i/2π)^k σ_k(R)` for a fixture whose dimension is `2k`.
pub fn characteristic_number(fx: &Fixture, k: usize) -> Result<Quadrature> {
    let n = fx.section.dim();
    if 2 * k != n {
        return Err(Error::DegreeMismatch {
            expected: n,
            found: 2 * k,
        });
    }
    integrate_top(&chern_weil_form(&fx.section, k)?, &fx.domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::Expr;

    fn top(n: usize, c: Expr) -> Form {
        let vars: Vec<VarId> = (1..=n).map(VarId::x).collect();
        Form::term(n, &vars, c)
    }

    #[test]
    fn zero_form_integrates_to_zero() {
        let d = IntegrationDomain::unit_torus(4, 8).unwrap();
        assert_eq!(integrate_top(&Form::zero(4), &d).unwrap().value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn constant_density_on_unit_box() {
        let d = IntegrationDomain::unit_torus(4, 8).unwrap();
        let q = integrate_top(&top(4, Expr::rational(7, 3)), &d).unwrap();
        assert!((q.value.re - 7.0 / 3.0).abs() < 1e-14);
        let flipped = integrate_top(&top(4, Expr::rational(7, 3)), &d.flipped()).unwrap();
        assert_eq!(flipped.value, -q.value);
    }

    #[test]
    fn mean_zero_periodic_density() {
        let d = IntegrationDomain::unit_torus(4, 16).unwrap();
        let q = integrate_top(&top(4, sin2pi(VarId::x(1))), &d).unwrap();
        assert!(q.value.norm() < 1e-12);
    }

    #[test]
    fn degree_is_checked() {
        let d = IntegrationDomain::unit_torus(2, 8).unwrap();
        let r = integrate_top(&Form::dx(2, 1), &d);
        assert_eq!(r.err(), Some(Error::DegreeMismatch { expected: 2, found: 1 }));
    }

    #[test]
    fn fd_residual_of_exact_and_planted_forms() {
        let pts = vec![vec![0.1, 0.2, 0.3, 0.4], vec![0.5, -0.3, 0.2, 0.9]];
        assert_eq!(fd_closedness_residual(&Form::zero(4), &pts, 1e-3).unwrap(), 0.0);
        let exact = Form::scalar(4, Expr::x(1).mul(&Expr::x(2)).mul(&Expr::x(3))).d();
        assert!(fd_closedness_residual(&exact, &pts, 1e-3).unwrap() < 1e-9);
        let planted = Form::term(4, &[VarId::x(1), VarId::x(3)], Expr::x(2));
        let r = fd_closedness_residual(&planted, &pts, 1e-3).unwrap();
        assert!((r - 1.0).abs() < 1e-9);
    }
}
