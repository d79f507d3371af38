//! Canonical rational functions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::atom::{Atom, FuncSym, Monomial, VarId};
use super::gcd::gcd;
use super::poly::Poly;
use super::scalar::{GaussRat, Scalar};
use crate::error::{Error, Result};

/// Simultaneous substitution of chart variables.
pub type Substitution = BTreeMap<VarId, Expr>;

/// Supplies numeric values for chart variables and opaque functions.
pub trait Valuation {
    fn var(&self, v: VarId) -> Option<f64>;
    fn func(&self, _f: &FuncSym) -> Option<f64> {
        None
    }
}

/// A plain table of values.
#[derive(Clone, Debug, Default)]
pub struct PointValuation {
    pub vars: BTreeMap<VarId, f64>,
    pub funcs: HashMap<FuncSym, f64>,
}

impl PointValuation {
    pub fn new(vars: impl IntoIterator<Item = (VarId, f64)>) -> Self {
        PointValuation {
            vars: vars.into_iter().collect(),
            funcs: HashMap::new(),
        }
    }

    pub fn with_func(mut self, f: FuncSym, value: f64) -> Self {
        self.funcs.insert(f, value);
        self
    }
}

impl Valuation for PointValuation {
    fn var(&self, v: VarId) -> Option<f64> {
        self.vars.get(&v).copied()
    }
    fn func(&self, f: &FuncSym) -> Option<f64> {
        self.funcs.get(f).copied()
    }
}

/// Denominators smaller than this in magnitude are reported as poles.
pub const POLE_EPSILON: f64 = 1e-300;

/// A rational function `num / den` in canonical form.
///
/// `num` and `den` are coprime, `den` has leading coefficient exactly 1 and
/// its leading monomial carries no power of π. Zero is `0 / 1`. Two values
/// are equal iff their canonical forms are identical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl Expr {
    pub fn zero() -> Expr {
        Expr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Expr {
        Expr::from_poly(Poly::one())
    }

    pub fn int(v: i64) -> Expr {
        Expr::from_poly(Poly::constant(GaussRat::from_int(v)))
    }

    pub fn rational(num: i64, den: i64) -> Expr {
        Expr::from_poly(Poly::constant(GaussRat::from_ratio(num, den)))
    }

    pub fn gauss(c: GaussRat) -> Expr {
        Expr::from_poly(Poly::constant(c))
    }

    pub fn imag_unit() -> Expr {
        Expr::gauss(GaussRat::imag_unit())
    }

    pub fn pi() -> Expr {
        Expr::from_poly(Poly::atom(Atom::Pi))
    }

    pub fn scalar(s: &Scalar) -> Expr {
        Expr::from_poly(Poly::term(Monomial::pi(s.pi_pow()), s.value().clone()))
    }

    pub fn var(v: VarId) -> Expr {
        Expr::from_poly(Poly::var(v))
    }

    pub fn x(i: usize) -> Expr {
        Expr::var(VarId::x(i))
    }

    pub fn gamma(up: usize, i: usize, j: usize) -> Expr {
        Expr::var(VarId::gamma(up, i, j))
    }

    pub fn func(f: FuncSym) -> Expr {
        Expr::from_poly(Poly::atom(Atom::Func(Arc::new(f))))
    }

    pub fn from_poly(num: Poly) -> Expr {
        Expr {
            num,
            den: Poly::one(),
        }
    }

    /// Reduces `num / den` to canonical form.
    pub fn from_fraction(num: Poly, den: Poly) -> Result<Expr> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Expr::zero());
        }
        if den.is_unit() {
            return Ok(Expr::normalized(num, den));
        }
        let g = gcd(&num, &den);
        if g.is_one() {
            Ok(Expr::normalized(num, den))
        } else {
            let n = num.div_exact(&g).expect("gcd divides numerator");
            let d = den.div_exact(&g).expect("gcd divides denominator");
            Ok(Expr::normalized(n, d))
        }
    }

    /// Scales a coprime pair by the unit that makes the denominator's leading
    /// term exactly `1·m` with `m` free of π.
    fn normalized(num: Poly, den: Poly) -> Expr {
        let (lm, lc) = den.leading().expect("nonzero denominator").clone();
        if lc.is_one() && lm.pi_exp() == 0 {
            return Expr { num, den };
        }
        let inv = lc.inv().expect("nonzero leading coefficient");
        let shift = Monomial::pi(-lm.pi_exp());
        Expr {
            num: num.mul_term(&shift, &inv),
            den: den.mul_term(&shift, &inv),
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The constant `c·π^p` when the expression is a single such term.
    pub fn as_scalar(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(Scalar::integer(0));
        }
        if self.den.is_one() && self.num.is_unit() {
            let (m, c) = &self.num.terms()[0];
            return Some(Scalar::new(c.clone(), m.pi_exp()));
        }
        None
    }

    /// The variable when the expression is exactly one chart variable.
    pub fn as_var(&self) -> Option<VarId> {
        if !self.den.is_one() || self.num.len() != 1 {
            return None;
        }
        let (m, c) = &self.num.terms()[0];
        if !c.is_one() {
            return None;
        }
        match m.factors() {
            [(Atom::Var(v), 1)] => Some(*v),
            _ => None,
        }
    }

    /// Number of monomials in numerator and denominator.
    pub fn size(&self) -> usize {
        self.num.len() + if self.den.is_one() { 0 } else { self.den.len() }
    }

    pub fn scale(&self, c: &GaussRat) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn neg(&self) -> Expr {
        Expr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.den.is_one() && other.den.is_one() {
            return Expr::from_poly(self.num.add(&other.num));
        }
        if self.den == other.den {
            let n = self.num.add(&other.num);
            return Expr::from_fraction(n, self.den.clone()).expect("denominator is nonzero");
        }
        let g = gcd(&self.den, &other.den);
        if g.is_one() {
            // coprime denominators: the cross sum is already reduced
            let n = self.num.mul(&other.den).add(&other.num.mul(&self.den));
            if n.is_zero() {
                return Expr::zero();
            }
            return Expr::normalized(n, self.den.mul(&other.den));
        }
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = other.den.div_exact(&g).expect("gcd divides");
        let n = self.num.mul(&d1).add(&other.num.mul(&b1));
        if n.is_zero() {
            return Expr::zero();
        }
        let g2 = gcd(&n, &g);
        let (n, g) = if g2.is_one() {
            (n, g)
        } else {
            (
                n.div_exact(&g2).expect("gcd divides"),
                g.div_exact(&g2).expect("gcd divides"),
            )
        };
        Expr::normalized(n, b1.mul(&d1).mul(&g))
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return Expr::from_poly(self.num.mul(&other.num));
        }
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let (a, d) = cancel(&self.num, &other.den, &g1);
        let (c, b) = cancel(&other.num, &self.den, &g2);
        Expr::normalized(a.mul(&c), b.mul(&d))
    }

    pub fn inv(&self) -> Result<Expr> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Expr::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Expr) -> Result<Expr> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<Expr> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let e = e as u32;
        if self.den.is_one() {
            return Ok(Expr::from_poly(self.num.pow(e)));
        }
        // powers of a coprime pair stay coprime
        Ok(Expr::normalized(self.num.pow(e), self.den.pow(e)))
    }

    /// Formal partial derivative `∂/∂v`.
    pub fn partial(&self, v: VarId) -> Expr {
        let dn = self.num.partial(v);
        if self.den.is_one() {
            return Expr::from_poly(dn);
        }
        let dd = self.den.partial(v);
        if dd.is_zero() {
            return Expr::from_fraction(dn, self.den.clone()).expect("nonzero denominator");
        }
        let n = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Expr::from_fraction(n, self.den.mul(&self.den)).expect("nonzero denominator")
    }

    /// Chart variables the expression depends on, including arguments of
    /// opaque functions.
    pub fn free_vars(&self) -> BTreeSet<VarId> {
        let mut s = self.num.vars();
        s.extend(self.den.vars());
        s
    }

    pub fn contains_fiber(&self) -> bool {
        self.free_vars().iter().any(|v| v.is_fiber())
    }

    /// Simultaneous substitution followed by canonicalisation. Variables
    /// missing from `sigma` are left in place.
    pub fn substitute(&self, sigma: &Substitution) -> Result<Expr> {
        if sigma.is_empty() || self.free_vars().iter().all(|v| !sigma.contains_key(v)) {
            return Ok(self.clone());
        }
        let num = substitute_poly(&self.num, sigma)?;
        if self.den.is_one() {
            return Ok(num);
        }
        let den = substitute_poly(&self.den, sigma)?;
        if den.is_zero() {
            return Err(Error::VanishedDenominator);
        }
        num.div(&den)
    }

    /// Evaluates in double precision; π is replaced by its float value.
    pub fn eval_numeric(&self, val: &dyn Valuation) -> Result<Complex64> {
        let n = eval_poly(&self.num, val)?;
        if self.den.is_one() {
            return Ok(n);
        }
        let d = eval_poly(&self.den, val)?;
        if d.norm() < POLE_EPSILON {
            return Err(Error::Pole);
        }
        Ok(n / d)
    }
}

fn cancel(num: &Poly, den: &Poly, g: &Poly) -> (Poly, Poly) {
    if g.is_one() {
        (num.clone(), den.clone())
    } else {
        (
            num.div_exact(g).expect("gcd divides"),
            den.div_exact(g).expect("gcd divides"),
        )
    }
}

fn atom_image(a: &Atom, sigma: &Substitution) -> Result<Option<Expr>> {
    match a {
        Atom::Var(v) => Ok(sigma.get(v).cloned()),
        Atom::Pi => Ok(None),
        Atom::Func(f) => {
            let mut changed = false;
            for arg in f.args().iter().chain(f.partials()) {
                if let Some(img) = sigma.get(arg) {
                    match img.as_var() {
                        Some(w) if w == *arg => {}
                        Some(_) => changed = true,
                        None => {
                            return Err(Error::OpaqueSubstitution {
                                func: f.name().to_string(),
                                var: arg.to_string(),
                            })
                        }
                    }
                }
            }
            if !changed {
                return Ok(None);
            }
            let renamed = f.renamed(|v| sigma.get(&v).and_then(|e| e.as_var()).unwrap_or(v));
            Ok(Some(Expr::func(renamed)))
        }
    }
}

fn substitute_poly(p: &Poly, sigma: &Substitution) -> Result<Expr> {
    let mut images: HashMap<Atom, Option<Expr>> = HashMap::new();
    for (m, _) in p.terms() {
        for a in m.atoms() {
            if !images.contains_key(a) {
                images.insert(a.clone(), atom_image(a, sigma)?);
            }
        }
    }
    let all_poly = images
        .values()
        .all(|img| img.as_ref().is_none_or(|e| e.is_polynomial()));
    let mut powers: HashMap<(Atom, i32), Expr> = HashMap::new();
    let mut power = |a: &Atom, e: i32, img: &Expr| -> Result<Expr> {
        if let Some(v) = powers.get(&(a.clone(), e)) {
            return Ok(v.clone());
        }
        let v = img.pow(e)?;
        powers.insert((a.clone(), e), v.clone());
        Ok(v)
    };
    if all_poly {
        let mut terms: Vec<Poly> = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let mut kept: Vec<(Atom, i32)> = Vec::new();
            let mut factor = Poly::one();
            for (a, e) in m.factors() {
                match &images[a] {
                    None => kept.push((a.clone(), *e)),
                    Some(img) => factor = factor.mul(power(a, *e, img)?.numer()),
                }
            }
            let mono = kept
                .into_iter()
                .fold(Monomial::one(), |acc, (a, e)| acc.mul(&Monomial::atom(a, e)));
            terms.push(factor.mul_term(&mono, c));
        }
        return Ok(Expr::from_poly(sum_polys(terms)));
    }
    let mut acc = Expr::zero();
    for (m, c) in p.terms() {
        let mut term = Expr::gauss(c.clone());
        for (a, e) in m.factors() {
            match &images[a] {
                None => term = term.mul(&Expr::from_poly(Poly::term(Monomial::atom(a.clone(), *e), GaussRat::one()))),
                Some(img) => term = term.mul(&power(a, *e, img)?),
            }
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Balanced summation keeps intermediate merges small.
pub(crate) fn sum_polys(mut v: Vec<Poly>) -> Poly {
    if v.is_empty() {
        return Poly::zero();
    }
    while v.len() > 1 {
        let mut next = Vec::with_capacity(v.len() / 2 + 1);
        let mut it = v.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a.add(&b)),
                None => next.push(a),
            }
        }
        v = next;
    }
    v.pop().unwrap()
}

fn eval_atom(a: &Atom, val: &dyn Valuation) -> Result<f64> {
    match a {
        Atom::Var(v) => val.var(*v).ok_or_else(|| Error::Unbound(v.to_string())),
        Atom::Func(f) => val.func(f).ok_or_else(|| Error::Unbound(f.to_string())),
        Atom::Pi => Ok(std::f64::consts::PI),
    }
}

fn eval_poly(p: &Poly, val: &dyn Valuation) -> Result<Complex64> {
    let mut cache: HashMap<&Atom, f64> = HashMap::new();
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, c) in p.terms() {
        let mut t = c.to_complex();
        for (a, e) in m.factors() {
            let x = match cache.get(a) {
                Some(x) => *x,
                None => {
                    let x = eval_atom(a, val)?;
                    cache.insert(a, x);
                    x
                }
            };
            t *= x.powi(*e);
        }
        acc += t;
    }
    Ok(acc)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$method(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}


impl From<i64> for Expr {
    fn from(v: i64) -> Expr {
        Expr::int(v)
    }
}

impl From<VarId> for Expr {
    fn from(v: VarId) -> Expr {
        Expr::var(v)
    }
}
