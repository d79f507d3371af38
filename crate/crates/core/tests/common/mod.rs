#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use thetahat_core::chernweil::ConnectionSection;
use thetahat_core::forms::{Form, FormMatrix};
use thetahat_core::symkernel::{Expr, Substitution, VarId};

/// Chart dimension for the randomized suites.
pub const N: usize = 3;

pub fn pool() -> Vec<VarId> {
    vec![
        VarId::x(1),
        VarId::x(2),
        VarId::x(3),
        VarId::gamma(1, 1, 2),
        VarId::gamma(2, 2, 3),
        VarId::gamma(3, 1, 1),
        VarId::gamma(1, 3, 3),
        VarId::gamma(2, 1, 3),
    ]
}

fn monomial() -> impl Strategy<Value = Expr> {
    (-3i64..=3, prop::collection::vec(prop::sample::select(pool()), 0..=3)).prop_map(|(c, vs)| {
        vs.into_iter().fold(Expr::int(c), |acc, v| acc.mul(&Expr::var(v)))
    })
}

/// Polynomials, and now and then a rational function with a `1 + v^2`
/// denominator.
pub fn expr() -> impl Strategy<Value = Expr> {
    (
        prop::collection::vec(monomial(), 1..=3),
        prop::option::weighted(0.2, prop::sample::select(pool())),
    )
        .prop_map(|(ms, den)| {
            let num = ms.iter().fold(Expr::zero(), |acc, m| acc.add(m));
            match den {
                Some(v) => num.div(&Expr::one().add(&Expr::var(v).pow(2).unwrap())).unwrap(),
                None => num,
            }
        })
}

/// Homogeneous forms of degree `p` on the chart of dimension [`N`].
pub fn form(p: usize) -> impl Strategy<Value = Form> {
    let term = (prop::sample::subsequence(pool(), p), expr()).prop_map(|(gens, c)| Form::term(N, &gens, c));
    prop::collection::vec(term, 1..=3).prop_map(|ts| ts.iter().fold(Form::zero(N), |acc, t| acc.add(t).unwrap()))
}

pub fn form_any() -> impl Strategy<Value = (usize, Form)> {
    (0usize..=3).prop_flat_map(|p| (Just(p), form(p)))
}

/// A polynomial self-map of the chart, moving some of the pool variables.
pub fn substitution() -> impl Strategy<Value = Substitution> {
    let poly = prop::collection::vec(monomial(), 1..=2)
        .prop_map(|ms| ms.iter().fold(Expr::zero(), |acc, m| acc.add(m)));
    prop::collection::vec((prop::sample::select(pool()), poly), 1..=3).prop_map(|pairs| pairs.into_iter().collect())
}

/// 3×3 matrices of 2-forms.
pub fn two_form_matrix() -> impl Strategy<Value = FormMatrix> {
    prop::collection::vec(prop::option::weighted(0.6, form(2)), N * N).prop_map(|es| {
        FormMatrix::new(N, es.into_iter().map(|e| e.unwrap_or_else(|| Form::zero(N))).collect()).unwrap()
    })
}

fn eq(a: &Form, b: &Form, what: &str) -> Result<(), TestCaseError> {
    if a == b {
        Ok(())
    } else {
        Err(TestCaseError::fail(format!("{what}: {a} != {b}")))
    }
}

pub fn check_dd(f: &Form) -> Result<(), TestCaseError> {
    eq(&f.d().d(), &Form::zero(N), "d(d f)")
}

pub fn check_graded_commutativity(p: usize, a: &Form, q: usize, b: &Form) -> Result<(), TestCaseError> {
    let ab = a.wedge(b).unwrap();
    let ba = b.wedge(a).unwrap();
    let ba = if p * q % 2 == 1 { ba.neg() } else { ba };
    eq(&ab, &ba, "a^b vs b^a")
}

pub fn check_leibniz(p: usize, a: &Form, b: &Form) -> Result<(), TestCaseError> {
    let lhs = a.wedge(b).unwrap().d();
    let second = a.wedge(&b.d()).unwrap();
    let second = if p % 2 == 1 { second.neg() } else { second };
    let rhs = a.d().wedge(b).unwrap().add(&second).unwrap();
    eq(&lhs, &rhs, "d(a^b)")
}

pub fn check_pullback_commutes_with_d(f: &Form, s: &Substitution) -> Result<(), TestCaseError> {
    eq(&f.pullback(s).unwrap().d(), &f.d().pullback(s).unwrap(), "d(F*f) vs F*(df)")
}

/// `k σ_k = Σ_{j=1..k} (-1)^{j-1} σ_{k-j} tr(M^j)` for `k = 1..=3`.
pub fn check_newton(m: &FormMatrix) -> Result<(), TestCaseError> {
    let mut powers = vec![m.clone()];
    for _ in 1..N {
        let next = powers.last().unwrap().wedge(m).unwrap();
        powers.push(next);
    }
    let traces: Vec<Form> = powers.iter().map(FormMatrix::trace).collect();
    let sigma = |k: usize| {
        if k == 0 {
            Form::one(N)
        } else {
            m.principal_minor_sum(k).unwrap()
        }
    };
    for k in 1..=N {
        let mut rhs = Form::zero(N);
        for j in 1..=k {
            let t = sigma(k - j).wedge(&traces[j - 1]).unwrap();
            rhs = if j % 2 == 1 { rhs.add(&t) } else { rhs.sub(&t) }.unwrap();
        }
        eq(&sigma(k).scale(&Expr::int(k as i64)), &rhs, &format!("Newton k={k}"))?;
    }
    Ok(())
}

/// Random section with polynomial entries of total degree at most
/// `degree` and coefficients `m/den`, `|m| <= 3`.
pub fn polynomial_section(rng: &mut ChaCha8Rng, n: usize, degree: usize, den: i64) -> ConnectionSection {
    let mut entries = Vec::new();
    for k in 1..=n {
        for i in 1..=n {
            for j in i..=n {
                if rng.gen_bool(0.4) {
                    continue;
                }
                let mut e = Expr::zero();
                for _ in 0..rng.gen_range(1..=3) {
                    let mut t = Expr::rational(rng.gen_range(-3..=3), den);
                    for _ in 0..rng.gen_range(0..=degree) {
                        t = t.mul(&Expr::x(rng.gen_range(1..=n)));
                    }
                    e = e.add(&t);
                }
                entries.push(((k, i, j), e));
            }
        }
    }
    ConnectionSection::new(n, entries).unwrap()
}

/// Random section whose entries are sums of `(m/den) x_a^3 x_b`, so the
/// third derivatives of `s^*ω_1` do not vanish identically.
pub fn quartic_section(rng: &mut ChaCha8Rng, n: usize, den: i64) -> ConnectionSection {
    let mut entries = Vec::new();
    for k in 1..=n {
        for i in 1..=n {
            for j in i..=n {
                let mut e = Expr::zero();
                for _ in 0..2 {
                    let (a, b) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
                    let m = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
                    e = e.add(&Expr::rational(m, den).mul(&Expr::x(a).pow(3).unwrap()).mul(&Expr::x(b)));
                }
                entries.push(((k, i, j), e));
            }
        }
    }
    ConnectionSection::new(n, entries).unwrap()
}

/// Top coefficient of `α∧β` for 2-forms on `R^4` given by their upper
/// triangular components `a[i][j]`, `i < j`.
fn wedge22(a: &[[Complex64; 4]; 4], b: &[[Complex64; 4]; 4]) -> Complex64 {
    a[0][1] * b[2][3] - a[0][2] * b[1][3] + a[0][3] * b[1][2] + a[1][2] * b[0][3] - a[1][3] * b[0][2]
        + a[2][3] * b[0][1]
}

type TwoForm = [[Complex64; 4]; 4];

fn zero2() -> TwoForm {
    [[Complex64::new(0.0, 0.0); 4]; 4]
}

/// `c · u∧v` for 1-forms `u, v` given by components.
fn add_wedge11(out: &mut TwoForm, c: Complex64, u: &[Complex64; 4], v: &[Complex64; 4]) {
    for i in 0..4 {
        for j in (i + 1)..4 {
            out[i][j] += c * (u[i] * v[j] - u[j] * v[i]);
        }
    }
}

/// `(i/2π)² σ₂(R)` for Fubini–Study on `C^2`, with `z1 = x1 + i x2`,
/// `z2 = x3 + i x4`, from the Chern connection
/// `Γ^i_kj = -(δ^i_k z̄_j + δ^i_j z̄_k)/(1+|z|²)`, its curvature
/// `Ω^i_j = Σ ∂_{z̄_l} Γ^i_kj dz̄_l∧dz_k`, and the real curvature
/// `R ≅ Ω ⊕ Ω̄` on `TM ⊗ C`.
pub fn fubini_study_density(x: &[f64]) -> Complex64 {
    let im = Complex64::new(0.0, 1.0);
    let z = [Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3])];
    let zb = [z[0].conj(), z[1].conj()];
    let q = 1.0 + z[0].norm_sqr() + z[1].norm_sqr();
    let one = Complex64::new(1.0, 0.0);
    let o = Complex64::new(0.0, 0.0);
    let dz = [[one, im, o, o], [o, o, one, im]];
    let dzb = [[one, -im, o, o], [o, o, one, -im]];
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    // ∂_{z̄_l} (z̄_j / q) = δ_jl / q - z̄_j z_l / q²
    let dbar = |j: usize, l: usize| delta(j, l) / q - zb[j] * z[l] / (q * q);
    let mut omega = [[zero2(), zero2()], [zero2(), zero2()]];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let c = -(delta(i, k) * dbar(j, l) + delta(i, j) * dbar(k, l));
                    add_wedge11(&mut omega[i][j], c, &dzb[l], &dz[k]);
                }
            }
        }
    }
    let conj2 = |f: &TwoForm| {
        let mut g = zero2();
        for i in 0..4 {
            for j in 0..4 {
                g[i][j] = f[i][j].conj();
            }
        }
        g
    };
    let omega_bar = [
        [conj2(&omega[0][0]), conj2(&omega[0][1])],
        [conj2(&omega[1][0]), conj2(&omega[1][1])],
    ];
    // block diagonal 4×4 curvature; σ₂ = Σ_{a<b} R_aa∧R_bb - R_ab∧R_ba
    let block = |a: usize, b: usize| -> TwoForm {
        match (a < 2, b < 2) {
            (true, true) => omega[a][b],
            (false, false) => omega_bar[a - 2][b - 2],
            _ => zero2(),
        }
    };
    let mut s2 = Complex64::new(0.0, 0.0);
    for a in 0..4 {
        for b in (a + 1)..4 {
            s2 += wedge22(&block(a, a), &block(b, b)) - wedge22(&block(a, b), &block(b, a));
        }
    }
    let scale = im / (2.0 * std::f64::consts::PI);
    scale * scale * s2
}

/// Christoffel symbols of the round sphere in stereographic coordinates,
/// from fourth-order central differences of `g = 4/(1+|x|²)² δ`.
pub fn round_sphere_christoffel(p: [f64; 2]) -> [[[f64; 2]; 2]; 2] {
    let g = |x: [f64; 2], i: usize, j: usize| {
        if i == j {
            4.0 / (1.0 + x[0] * x[0] + x[1] * x[1]).powi(2)
        } else {
            0.0
        }
    };
    let h = 1e-3;
    let dg = |l: usize, i: usize, j: usize| {
        let at = |t: f64| {
            let mut y = p;
            y[l] += t;
            g(y, i, j)
        };
        (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
    };
    let mut out = [[[0.0; 2]; 2]; 2];
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                // diagonal metric: g^{kk} = 1/g_kk
                let first = dg(i, k, j) + dg(j, k, i) - dg(k, i, j);
                out[k][i][j] = 0.5 * first / g(p, k, k);
            }
        }
    }
    out
}
