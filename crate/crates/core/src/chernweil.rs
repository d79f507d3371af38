//! Connection sections of the bundle and the classical Chern–Weil forms
//! they pull back to.

use std::collections::BTreeMap;

use crate::charforms::{chern_scale, omega_form};
use crate::connspace::ConnChart;
use crate::error::{Error, Result};
use crate::forms::{sum_exprs, Form, FormMatrix};
use crate::matrix::{self, ExprMatrix};
use crate::symkernel::{Expr, Scalar, Substitution, VarId};

/// Where a section came from.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Explicit,
    LeviCivita,
    Perturbation { seed: u64, eps: f64 },
}

/// A torsion-free connection `Γ^k_ij(x)` on an `n`-dimensional chart.
/// Slots are stored with `i <= j`; absent slots are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionSection {
    n: usize,
    gamma: BTreeMap<(usize, usize, usize), Expr>,
    provenance: Provenance,
}

fn check_base_expr(e: &Expr, n: usize, slot: &str) -> Result<()> {
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

fn check_index(index: usize, n: usize) -> Result<()> {
    if index < 1 || index > n {
        return Err(Error::IndexOutOfRange { index, n });
    }
    Ok(())
}

impl ConnectionSection {
    /// Entries keyed by `(k, i, j)`; `(k, j, i)` names the same slot and
    /// may be given only once.
    pub fn new(
        n: usize,
        entries: impl IntoIterator<Item = ((usize, usize, usize), Expr)>,
    ) -> Result<ConnectionSection> {
        let mut gamma = BTreeMap::new();
        for ((k, i, j), e) in entries {
            for idx in [k, i, j] {
                check_index(idx, n)?;
            }
            let key = (k, i.min(j), i.max(j));
            let slot = VarId::gamma(k, i, j).to_string();
            check_base_expr(&e, n, &slot)?;
            if gamma.contains_key(&key) {
                return Err(Error::DuplicateSlot(slot));
            }
            gamma.insert(key, e);
        }
        gamma.retain(|_, e| !e.is_zero());
        Ok(ConnectionSection {
            n,
            gamma,
            provenance: Provenance::Explicit,
        })
    }

    pub fn zero(n: usize) -> ConnectionSection {
        ConnectionSection {
            n,
            gamma: BTreeMap::new(),
            provenance: Provenance::Explicit,
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `Γ^k_ij(x)` for 1-based indices in any order of `i, j`.
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> Expr {
        self.gamma
            .get(&(k, i.min(j), i.max(j)))
            .cloned()
            .unwrap_or_else(Expr::zero)
    }

    /// Nonzero slots, `i <= j`.
    pub fn entries(&self) -> &BTreeMap<(usize, usize, usize), Expr> {
        &self.gamma
    }

    pub fn is_flat_chart(&self) -> bool {
        self.gamma.is_empty()
    }

    /// `{Γ^k_ij → Γ^k_ij(x)}` over every fiber variable.
    pub fn substitution(&self) -> Substitution {
        ConnChart::new(self.n)
            .fiber_vars()
            .into_iter()
            .map(|v| match v {
                VarId::Fiber { up, i, j } => (v, self.gamma(up as usize, i as usize, j as usize)),
                VarId::Base(_) => unreachable!("fiber variables only"),
            })
            .collect()
    }

    /// `θ_s`, entry `(α, β) = Σ_i Γ^α_iβ(x) dx^i`, built on the base.
    pub fn connection_matrix(&self) -> FormMatrix {
        let n = self.n;
        FormMatrix::from_fn(n, |a, b| {
            let mut f = Form::zero(n);
            for i in 1..=n {
                let t = Form::term(n, &[VarId::x(i)], self.gamma(a + 1, i, b + 1));
                f = f.add(&t).expect("same chart");
            }
            f
        })
        .expect("degree-one entries")
    }
}

/// Torsion-free part of an arbitrary connection:
/// `Γ^k_ij = (raw^k_ij + raw^k_ji)/2`.
pub fn symmetrize(
    n: usize,
    raw: &BTreeMap<(usize, usize, usize), Expr>,
) -> Result<ConnectionSection> {
    let half = Expr::rational(1, 2);
    let get = |k, i, j| raw.get(&(k, i, j)).cloned().unwrap_or_else(Expr::zero);
    for &(k, i, j) in raw.keys() {
        for idx in [k, i, j] {
            check_index(idx, n)?;
        }
    }
    let mut entries = Vec::new();
    for k in 1..=n {
        for i in 1..=n {
            for j in i..=n {
                let e = if i == j {
                    get(k, i, i)
                } else {
                    get(k, i, j).add(&get(k, j, i)).mul(&half)
                };
                if !e.is_zero() {
                    entries.push(((k, i, j), e));
                }
            }
        }
    }
    ConnectionSection::new(n, entries)
}

fn check_dim(f_dim: usize, s: &ConnectionSection) -> Result<()> {
    if f_dim != s.n {
        return Err(Error::ChartMismatch {
            left: f_dim,
            right: s.n,
        });
    }
    Ok(())
}

/// Pullback of a form on the connection chart along the section:
/// `Γ → Γ(x)`, `dΓ → dΓ(x)`, `x` unchanged.
pub fn pullback_section(f: &Form, s: &ConnectionSection) -> Result<Form> {
    check_dim(f.dim(), s)?;
    f.pullback(&s.substitution())
}

pub fn pullback_section_matrix(m: &FormMatrix, s: &ConnectionSection) -> Result<FormMatrix> {
    check_dim(m.size(), s)?;
    m.pullback(&s.substitution())
}

/// `R = dθ_s + θ_s∧θ_s`, computed on the base chart.
pub fn classical_curvature(s: &ConnectionSection) -> FormMatrix {
    let theta = s.connection_matrix();
    theta
        .d()
        .add(&theta.wedge(&theta).expect("same size"))
        .expect("same size")
}

/// `R^α_β = Σ_{i,j} (∂_i Γ^α_jβ + Γ^α_ik Γ^k_jβ) dx^i∧dx^j`.
pub fn classical_curvature_by_indices(s: &ConnectionSection) -> FormMatrix {
    let n = s.n;
    FormMatrix::from_fn(n, |a, b| {
        let (a, b) = (a + 1, b + 1);
        let mut f = Form::zero(n);
        for i in 1..=n {
            for j in 1..=n {
                if i == j {
                    continue;
                }
                let mut parts = vec![s.gamma(a, j, b).partial(VarId::x(i))];
                for k in 1..=n {
                    parts.push(s.gamma(a, i, k).mul(&s.gamma(k, j, b)));
                }
                let t = Form::term(n, &[VarId::x(i), VarId::x(j)], sum_exprs(parts));
                f = f.add(&t).unwrap();
            }
        }
        f
    })
    .expect("degree-two entries")
}

/// The Chern–Weil form `(i/2π)^k σ_k(R)` of the section.
pub fn chern_weil_form(s: &ConnectionSection, k: usize) -> Result<Form> {
    if k < 1 || k > s.n {
        return Err(Error::InvalidOrder { k, n: s.n });
    }
    let scale = Expr::scalar(&Scalar::i_over_two_pi().pow(k as u32));
    Ok(classical_curvature(s).principal_minor_sum(k)?.scale(&scale))
}

/// `s^*ω_k`, pulled back from the connection chart.
pub fn pulled_back_omega(s: &ConnectionSection, k: usize) -> Result<Form> {
    pullback_section(&omega_form(s.n, k)?, s)
}

/// `(i/2π) d tr θ_s`.
pub fn first_form_primitive_derivative(s: &ConnectionSection) -> Form {
    s.connection_matrix().trace().d().scale(&chern_scale())
}

/// A symmetric metric with its exact inverse.
#[derive(Clone, Debug)]
pub struct MetricSpec {
    n: usize,
    g: ExprMatrix,
    g_inv: ExprMatrix,
}

impl MetricSpec {
    /// Inverts `g` exactly.
    pub fn new(g: ExprMatrix) -> Result<MetricSpec> {
        let n = Self::validate(&g)?;
        let g_inv = matrix::inverse(&g).map_err(|_| Error::NonInvertible("metric"))?;
        Ok(MetricSpec { n, g, g_inv })
    }

    /// Uses a supplied inverse after checking `g · g_inv = E`.
    pub fn with_inverse(g: ExprMatrix, g_inv: ExprMatrix) -> Result<MetricSpec> {
        let n = Self::validate(&g)?;
        if g_inv.len() != n || !matrix::is_identity(&matrix::mul(&g, &g_inv)) {
            return Err(Error::NonInvertible("metric"));
        }
        Ok(MetricSpec { n, g, g_inv })
    }

    /// `c · E`.
    pub fn conformal(n: usize, c: Expr) -> Result<MetricSpec> {
        let g = (0..n)
            .map(|r| (0..n).map(|k| if r == k { c.clone() } else { Expr::zero() }).collect())
            .collect();
        MetricSpec::new(g)
    }

    fn validate(g: &ExprMatrix) -> Result<usize> {
        let n = g.len();
        for (r, row) in g.iter().enumerate() {
            if row.len() != n {
                return Err(Error::SizeMismatch {
                    left: n,
                    right: row.len(),
                });
            }
            for (c, e) in row.iter().enumerate() {
                check_base_expr(e, n, &format!("g[{}][{}]", r + 1, c + 1))?;
                if e != &g[c][r] {
                    return Err(Error::AsymmetricMetric(r + 1, c + 1));
                }
            }
        }
        Ok(n)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn g(&self) -> &ExprMatrix {
        &self.g
    }

    pub fn g_inv(&self) -> &ExprMatrix {
        &self.g_inv
    }
}

/// Christoffel symbols
/// `Γ^k_ij = ½ Σ_l g^{kl} (∂_i g_lj + ∂_j g_li - ∂_l g_ij)`.
pub fn levi_civita(m: &MetricSpec) -> Result<ConnectionSection> {
    let n = m.n;
    let g = &m.g;
    // dg[l][i][j] = ∂_l g_ij
    let dg: Vec<Vec<Vec<Expr>>> = (0..n)
        .map(|l| {
            (0..n)
                .map(|i| (0..n).map(|j| g[i][j].partial(VarId::x(l + 1))).collect())
                .collect()
        })
        .collect();
    let half = Expr::rational(1, 2);
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i..n {
            // first-kind symbols Γ_{l,ij}
            let first: Vec<Expr> = (0..n)
                .map(|l| dg[i][l][j].add(&dg[j][l][i]).sub(&dg[l][i][j]))
                .collect();
            for k in 0..n {
                let parts = (0..n).map(|l| m.g_inv[k][l].mul(&first[l])).collect();
                let e = sum_exprs(parts).mul(&half);
                if !e.is_zero() {
                    entries.push(((k + 1, i + 1, j + 1), e));
                }
            }
        }
    }
    Ok(ConnectionSection::new(n, entries)?.with_provenance(Provenance::LeviCivita))
}
