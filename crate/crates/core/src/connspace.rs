//! Charts of the bundle of torsion-free connections.
//!
//! A chart has base coordinates `x^i` and fiber coordinates `Γ^α_iβ`
//! (`i <= β`). On it live the tautological matrix `θ̂^α_β = Γ^α_iβ dx^i` and
//! its curvature `Θ̂ = dθ̂ + θ̂∧θ̂`.
//!
//! A [`ChartTransition`] `x ↦ x'` acts on the fiber by the usual connection
//! transformation law. With `M = ∂x/∂x'` (so `M⁻¹ = J = ∂x'/∂x`),
//!
//! ```text
//! θ̂' = M⁻¹ dM + M⁻¹ θ̂ M,        Θ̂' = M⁻¹ Θ̂ M.
//! ```
//!
//! Primed and unprimed charts reuse the same variable names; a primed form
//! is compared with unprimed data after pulling it back along
//! `{x → x'(x), Γ' → Γ'(x, Γ)}`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::forms::{Form, FormMatrix};
use crate::matrix::{self, ExprMatrix};
use crate::symkernel::{Expr, Substitution, VarId};

/// The coordinate chart `{x^i, Γ^k_ij}` over an `n`-dimensional base chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConnChart {
    n: usize,
}

impl ConnChart {
    pub fn new(n: usize) -> ConnChart {
        assert!((1..=8).contains(&n), "chart dimension {n} out of range");
        ConnChart { n }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn base_vars(&self) -> Vec<VarId> {
        (1..=self.n).map(VarId::x).collect()
    }

    /// Canonical fiber variables `Γ^α_iβ`, `i <= β`, in variable order.
    pub fn fiber_vars(&self) -> Vec<VarId> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n * (n + 1) / 2);
        for a in 1..=n {
            for i in 1..=n {
                for b in i..=n {
                    out.push(VarId::gamma(a, i, b));
                }
            }
        }
        out
    }

    /// `θ̂`, entry `(α, β) = Σ_i Γ^α_iβ dx^i`.
    pub fn theta(&self) -> FormMatrix {
        let n = self.n;
        FormMatrix::from_fn(n, |a, b| {
            let mut f = Form::zero(n);
            for i in 1..=n {
                let t = Form::term(n, &[VarId::x(i)], Expr::gamma(a + 1, i, b + 1));
                f = f.add(&t).expect("same chart");
            }
            f
        })
        .expect("degree-one entries")
    }

    /// `Θ̂ = dθ̂ + θ̂∧θ̂`.
    pub fn curvature(&self) -> FormMatrix {
        let theta = self.theta();
        theta
            .d()
            .add(&theta.wedge(&theta).expect("same size"))
            .expect("same size")
    }

    /// `Θ̂` assembled directly from index sums:
    /// `Θ̂^α_β = dΓ^α_iβ ∧ dx^i + Γ^α_ik Γ^k_jβ dx^i ∧ dx^j`.
    pub fn curvature_by_indices(&self) -> FormMatrix {
        let n = self.n;
        FormMatrix::from_fn(n, |a, b| {
            let (a, b) = (a + 1, b + 1);
            let mut f = Form::zero(n);
            for i in 1..=n {
                let t = Form::term(n, &[VarId::gamma(a, i, b), VarId::x(i)], Expr::one());
                f = f.add(&t).unwrap();
                for j in 1..=n {
                    for k in 1..=n {
                        let c = Expr::gamma(a, i, k).mul(&Expr::gamma(k, j, b));
                        let t = Form::term(n, &[VarId::x(i), VarId::x(j)], c);
                        f = f.add(&t).unwrap();
                    }
                }
            }
            f
        })
        .expect("degree-two entries")
    }

    /// `dΘ̂` with every `Γ` (but not `dΓ`) set to zero.
    pub fn zero_section_d_curvature(&self) -> Result<FormMatrix> {
        let sigma: Substitution = self
            .fiber_vars()
            .into_iter()
            .map(|v| (v, Expr::zero()))
            .collect();
        self.curvature().d().substitute_coefficients(&sigma)
    }

    /// `dΘ̂ - (Θ̂∧θ̂ - θ̂∧Θ̂)`.
    pub fn bianchi_residual(&self) -> Result<FormMatrix> {
        let theta = self.theta();
        let curv = self.curvature();
        let rhs = curv.wedge(&theta)?.sub(&theta.wedge(&curv)?)?;
        curv.d().sub(&rhs)
    }

    /// `tr Θ̂ - d tr θ̂`.
    pub fn trace_residual(&self) -> Result<Form> {
        self.curvature().trace().sub(&self.theta().trace().d())
    }
}

/// A change of base coordinates `x' = x'(x)` with its exact inverse.
#[derive(Clone, Debug)]
pub struct ChartTransition {
    n: usize,
    forward: Vec<Expr>,
    inverse: Vec<Expr>,
    jacobian: ExprMatrix,
    jacobian_inverse: ExprMatrix,
}

fn base_only(e: &Expr, n: usize, slot: &str) -> Result<()> {
    for v in e.free_vars() {
        if v.is_fiber() {
            return Err(Error::FiberInSection {
                slot: slot.to_string(),
                var: v.to_string(),
            });
        }
        if v.max_index() > n {
            return Err(Error::IndexOutOfRange {
                index: v.max_index(),
                n,
            });
        }
    }
    Ok(())
}

impl ChartTransition {
    /// `forward[i]` is `x'^{i+1}` in terms of `x`; `inverse[i]` is
    /// `x^{i+1}` in terms of `x'` (written with the same variable names).
    pub fn new(forward: Vec<Expr>, inverse: Vec<Expr>) -> Result<ChartTransition> {
        let n = forward.len();
        if inverse.len() != n {
            return Err(Error::SizeMismatch {
                left: n,
                right: inverse.len(),
            });
        }
        for (i, e) in forward.iter().enumerate() {
            base_only(e, n, &format!("forward[{}]", i + 1))?;
        }
        for (i, e) in inverse.iter().enumerate() {
            base_only(e, n, &format!("inverse[{}]", i + 1))?;
        }
        let to_forward = coordinate_substitution(&forward);
        let to_inverse = coordinate_substitution(&inverse);
        for i in 0..n {
            let x = Expr::x(i + 1);
            if inverse[i].substitute(&to_forward)? != x || forward[i].substitute(&to_inverse)? != x {
                return Err(Error::InverseMismatch(i + 1));
            }
        }
        let vars: Vec<VarId> = (1..=n).map(VarId::x).collect();
        let jacobian = matrix::jacobian(&forward, &vars);
        let jacobian_inverse = matrix::inverse(&jacobian).map_err(|_| Error::NonInvertible("jacobian"))?;
        if !matrix::is_identity(&matrix::mul(&jacobian, &jacobian_inverse)) {
            return Err(Error::NonInvertible("jacobian"));
        }
        Ok(ChartTransition {
            n,
            forward,
            inverse,
            jacobian,
            jacobian_inverse,
        })
    }

    pub fn identity(n: usize) -> ChartTransition {
        let xs: Vec<Expr> = (1..=n).map(Expr::x).collect();
        ChartTransition::new(xs.clone(), xs).expect("identity is invertible")
    }

    /// `x' = A x` for an invertible constant matrix.
    pub fn linear(a: &ExprMatrix) -> Result<ChartTransition> {
        let n = a.len();
        let ainv = matrix::inverse(a)?;
        let apply = |m: &ExprMatrix| -> Vec<Expr> {
            (0..n)
                .map(|r| {
                    crate::forms::sum_exprs((0..n).map(|c| m[r][c].mul(&Expr::x(c + 1))).collect())
                })
                .collect()
        };
        ChartTransition::new(apply(a), apply(&ainv))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn forward(&self) -> &[Expr] {
        &self.forward
    }

    pub fn inverse(&self) -> &[Expr] {
        &self.inverse
    }

    /// `J = ∂x'/∂x`, a function of `x`.
    pub fn jacobian(&self) -> &ExprMatrix {
        &self.jacobian
    }

    /// `J⁻¹ = ∂x/∂x'`, expressed in `x`.
    pub fn jacobian_inverse(&self) -> &ExprMatrix {
        &self.jacobian_inverse
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &ChartTransition) -> Result<ChartTransition> {
        if self.n != next.n {
            return Err(Error::ChartMismatch {
                left: self.n,
                right: next.n,
            });
        }
        let fwd = coordinate_substitution(&self.forward);
        let inv = coordinate_substitution(&next.inverse);
        let forward = next
            .forward
            .iter()
            .map(|e| e.substitute(&fwd))
            .collect::<Result<Vec<_>>>()?;
        let inverse = self
            .inverse
            .iter()
            .map(|e| e.substitute(&inv))
            .collect::<Result<Vec<_>>>()?;
        ChartTransition::new(forward, inverse)
    }

    /// Primed connection coefficients as functions of `(x, Γ)`:
    ///
    /// ```text
    /// Γ'^γ_μν = -Σ ∂_i J^γ_j G^i_μ G^j_ν + Σ J^γ_α Γ^α_iβ G^i_μ G^β_ν,   G = J⁻¹.
    /// ```
    ///
    /// Both `(μ, ν)` orders are computed and required to agree.
    pub fn transition_gamma(&self) -> Result<BTreeMap<VarId, Expr>> {
        let n = self.n;
        let j = &self.jacobian;
        let g = &self.jacobian_inverse;
        // dj[c][i][k] = ∂_i J^c_k
        let dj: Vec<Vec<Vec<Expr>>> = (0..n)
            .map(|c| {
                (0..n)
                    .map(|i| (0..n).map(|k| j[c][k].partial(VarId::x(i + 1))).collect())
                    .collect()
            })
            .collect();
        // conj[c][i][b] = Σ_a J^c_a Γ^a_ib
        let conj: Vec<Vec<Vec<Expr>>> = (0..n)
            .map(|c| {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|b| {
                                crate::forms::sum_exprs(
                                    (0..n).map(|a| j[c][a].mul(&Expr::gamma(a + 1, i + 1, b + 1))).collect(),
                                )
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let component = |c: usize, mu: usize, nu: usize| -> Expr {
            let mut parts = Vec::new();
            for i in 0..n {
                if g[i][mu].is_zero() {
                    continue;
                }
                for b in 0..n {
                    if g[b][nu].is_zero() {
                        continue;
                    }
                    let w = g[i][mu].mul(&g[b][nu]);
                    let inner = conj[c][i][b].sub(&dj[c][i][b]);
                    parts.push(inner.mul(&w));
                }
            }
            crate::forms::sum_exprs(parts)
        };
        let mut out = BTreeMap::new();
        for c in 0..n {
            for mu in 0..n {
                for nu in mu..n {
                    let e = component(c, mu, nu);
                    if mu != nu && e != component(c, nu, mu) {
                        return Err(Error::AsymmetricTransition {
                            up: c + 1,
                            i: mu + 1,
                            j: nu + 1,
                        });
                    }
                    out.insert(VarId::gamma(c + 1, mu + 1, nu + 1), e);
                }
            }
        }
        Ok(out)
    }

    /// The substitution carrying primed-chart data to the unprimed chart:
    /// `x → x'(x)` and `Γ' → Γ'(x, Γ)`.
    pub fn pullback_substitution(&self) -> Result<Substitution> {
        let mut sigma = coordinate_substitution(&self.forward);
        sigma.extend(self.transition_gamma()?);
        Ok(sigma)
    }

    fn jacobian_forms(&self, m: &ExprMatrix) -> FormMatrix {
        FormMatrix::from_exprs(self.n, m)
    }

    /// `M⁻¹ dM + M⁻¹ θ̂ M` with `M = J⁻¹`.
    pub fn expected_theta(&self) -> Result<FormMatrix> {
        let minv = self.jacobian_forms(&self.jacobian);
        let m = self.jacobian_forms(&self.jacobian_inverse);
        let theta = ConnChart::new(self.n).theta();
        minv.wedge(&m.d())?.add(&minv.wedge(&theta)?.wedge(&m)?)
    }

    /// `M⁻¹ Θ̂ M` with `M = J⁻¹`.
    pub fn expected_curvature(&self) -> Result<FormMatrix> {
        let minv = self.jacobian_forms(&self.jacobian);
        let m = self.jacobian_forms(&self.jacobian_inverse);
        minv.wedge(&ConnChart::new(self.n).curvature())?.wedge(&m)
    }

    /// Pulled-back primed `θ̂'` minus the transformation law; zero when the
    /// law holds.
    pub fn theta_residual(&self) -> Result<FormMatrix> {
        let sigma = self.pullback_substitution()?;
        let primed = ConnChart::new(self.n).theta().pullback(&sigma)?;
        primed.sub(&self.expected_theta()?)
    }

    /// Pulled-back primed `Θ̂'` minus `M⁻¹ Θ̂ M`.
    pub fn curvature_residual(&self) -> Result<FormMatrix> {
        let sigma = self.pullback_substitution()?;
        let primed = ConnChart::new(self.n).curvature().pullback(&sigma)?;
        primed.sub(&self.expected_curvature()?)
    }
}

/// `{x^i → e_i}`.
pub fn coordinate_substitution(exprs: &[Expr]) -> Substitution {
    exprs
        .iter()
        .enumerate()
        .map(|(i, e)| (VarId::x(i + 1), e.clone()))
        .collect()
}
