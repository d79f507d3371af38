//! The forms `ω_k`: the degree-`2k` parts of `det(E + (i/2π)Θ̂)`.

use crate::connspace::{ChartTransition, ConnChart};
use crate::error::{Error, Result};
use crate::forms::{Form, FormMatrix};
use crate::symkernel::{Expr, Scalar};

/// `i/2π` as an expression.
pub fn chern_scale() -> Expr {
    Expr::scalar(&Scalar::i_over_two_pi())
}

/// `ω_k` on the `n`-dimensional chart together with its derivative.
#[derive(Clone, Debug)]
pub struct OmegaResult {
    pub n: usize,
    pub k: usize,
    pub omega: Form,
    pub term_count: usize,
    pub closed_residual: Form,
}

impl OmegaResult {
    pub fn is_closed(&self) -> bool {
        self.closed_residual.is_zero()
    }

    /// Whether `k` lies outside `1..=n/2`, where nonvanishing is not
    /// claimed.
    pub fn beyond_half_dimension(&self) -> bool {
        self.k > self.n / 2
    }
}

fn check_order(n: usize, k: usize) -> Result<()> {
    if k < 1 || k > n {
        return Err(Error::InvalidOrder { k, n });
    }
    Ok(())
}

/// `σ_k(Θ̂)`, the sum of principal `k×k` minors, without the scale factor.
pub fn sigma(n: usize, k: usize) -> Result<Form> {
    if k == 0 {
        return Ok(Form::one(n));
    }
    ConnChart::new(n).curvature().principal_minor_sum(k)
}

/// `ω_k = (i/2π)^k σ_k(Θ̂)`.
pub fn omega_form(n: usize, k: usize) -> Result<Form> {
    check_order(n, k)?;
    let s = Expr::scalar(&Scalar::i_over_two_pi().pow(k as u32));
    Ok(sigma(n, k)?.scale(&s))
}

/// Builds `ω_k` and expands `dω_k`.
pub fn omega(n: usize, k: usize) -> Result<OmegaResult> {
    check_order(n, k)?;
    if k > n / 2 {
        log::warn!("k = {k} exceeds n/2 = {}; nonvanishing is not expected", n / 2);
    }
    let omega = omega_form(n, k)?;
    let closed_residual = omega.d();
    Ok(OmegaResult {
        n,
        k,
        term_count: omega.term_count(),
        omega,
        closed_residual,
    })
}

/// `dω_k`.
pub fn verify_closed(n: usize, k: usize) -> Result<Form> {
    Ok(omega(n, k)?.closed_residual)
}

fn curvature_power_traces(n: usize, max: usize) -> Result<Vec<Form>> {
    let curv = ConnChart::new(n).curvature();
    let mut out = Vec::with_capacity(max);
    let mut power = curv.clone();
    for j in 1..=max {
        if j > 1 {
            power = power.wedge(&curv)?;
        }
        out.push(power.trace());
    }
    Ok(out)
}

/// `p_j = tr(Θ̂^j)`.
pub fn power_sum(n: usize, j: usize) -> Result<Form> {
    if j < 1 {
        return Err(Error::InvalidOrder { k: j, n });
    }
    Ok(curvature_power_traces(n, j)?.pop().expect("j >= 1"))
}

/// Newton's identity residual `k σ_k - Σ_{j=1..k} (-1)^{j-1} σ_{k-j} p_j`.
pub fn newton_check(n: usize, k: usize) -> Result<Form> {
    check_order(n, k)?;
    let p = curvature_power_traces(n, k)?;
    let mut rhs = Form::zero(n);
    for j in 1..=k {
        let term = sigma(n, k - j)?.wedge(&p[j - 1])?;
        rhs = if j % 2 == 1 { rhs.add(&term)? } else { rhs.sub(&term)? };
    }
    sigma(n, k)?.scale(&Expr::int(k as i64)).sub(&rhs)
}

/// `ω_1 - (i/2π) d tr θ̂`.
pub fn first_form_exactness_residual(n: usize) -> Result<Form> {
    let exact = ConnChart::new(n).theta().trace().d().scale(&chern_scale());
    omega_form(n, 1)?.sub(&exact)
}

/// Pullback of primed `ω_k` along a transition minus unprimed `ω_k`.
pub fn naturality_residual(t: &ChartTransition, k: usize) -> Result<Form> {
    let w = omega_form(t.dim(), k)?;
    w.pullback(&t.pullback_substitution()?)?.sub(&w)
}

/// `det(E + (i/2π)Θ̂)` in full.
pub fn total_form(n: usize) -> Result<Form> {
    ConnChart::new(n).curvature().det_expand(&chern_scale())
}

/// Curvature matrix helper for callers that only need `Θ̂`.
pub fn curvature(n: usize) -> FormMatrix {
    ConnChart::new(n).curvature()
}
