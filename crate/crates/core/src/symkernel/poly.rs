//! Sparse multivariate polynomials over Q(i) with a Laurent π.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use super::atom::{Atom, Monomial, VarId};
use num_traits::Zero;

use super::scalar::GaussRat;

/// Terms sorted ascending by monomial order (leading term last), no zero
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(Monomial, GaussRat)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(GaussRat::one())
    }

    pub fn constant(c: GaussRat) -> Self {
        Poly::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: GaussRat) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(m, c)],
            }
        }
    }

    pub fn atom(a: Atom) -> Self {
        Poly::term(Monomial::atom(a, 1), GaussRat::one())
    }

    pub fn var(v: VarId) -> Self {
        Poly::atom(Atom::Var(v))
    }

    /// Builds from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, GaussRat)>) -> Self {
        let mut acc: HashMap<Monomial, GaussRat> = HashMap::new();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            match acc.get_mut(&m) {
                Some(existing) => *existing = &*existing + &c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, GaussRat)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// A single term with no atom other than π: a unit of the ring.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_constant()
    }

    /// True when no atom other than π occurs.
    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_constant())
    }

    pub fn leading(&self) -> Option<&(Monomial, GaussRat)> {
        self.terms.last()
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &GaussRat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        Poly {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    /// Multiplication by a single term `c·m`.
    pub fn mul_term(&self, m: &Monomial, c: &GaussRat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        // the monomial order is multiplicative, so sortedness is preserved
        Poly {
            terms: self.terms.iter().map(|(x, k)| (x.mul(m), k * c)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.merge(other, true)
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { other.neg() } else { other.clone() };
        }
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0.clone(), c));
        }
        Poly { terms: out }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if other.terms.len() == 1 {
            return self.mul_term(&other.terms[0].0, &other.terms[0].1);
        }
        if self.terms.len() == 1 {
            return other.mul_term(&self.terms[0].0, &self.terms[0].1);
        }
        let mut acc: HashMap<Monomial, GaussRat> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(existing) => *existing = &*existing + &c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Poly { terms }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact quotient `self / other`, or `None` when `other` does not divide
    /// `self`. π powers are treated as units.
    pub fn div_exact(&self, other: &Poly) -> Option<Poly> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if other.is_unit() {
            let (m, c) = &other.terms[0];
            let inv = c.inv()?;
            let shift = Monomial::pi(-m.pi_exp());
            return Some(self.mul_term(&shift, &inv));
        }
        // Normalise π so both sides are honest polynomials; the quotient of
        // the shifted pair differs from the true one by a π power.
        let sa = self.min_pi();
        let sb = other.min_pi();
        let a = self.mul_term(&Monomial::pi(-sa), &GaussRat::one());
        let b = other.mul_term(&Monomial::pi(-sb), &GaussRat::one());
        let (lm_b, lc_b) = b.leading()?.clone();
        let lc_inv = lc_b.inv()?;
        let mut rem: BTreeMap<Monomial, GaussRat> = a.terms.into_iter().collect();
        let mut quot = Vec::new();
        while let Some((lm_r, lc_r)) = rem.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            let t = lm_r.div(&lm_b)?;
            if t.pi_exp() < 0 {
                return None;
            }
            let tc = &lc_r * &lc_inv;
            for (m, c) in &b.terms {
                let key = m.mul(&t);
                let delta = c * &tc;
                match rem.get_mut(&key) {
                    Some(existing) => {
                        let v = &*existing - &delta;
                        if v.is_zero() {
                            rem.remove(&key);
                        } else {
                            *existing = v;
                        }
                    }
                    None => {
                        rem.insert(key, -delta);
                    }
                }
            }
            quot.push((t, tc));
        }
        quot.reverse();
        let q = Poly { terms: quot };
        Some(q.mul_term(&Monomial::pi(sa - sb), &GaussRat::one()))
    }

    pub fn min_pi(&self) -> i32 {
        self.terms.iter().map(|(m, _)| m.pi_exp()).min().unwrap_or(0)
    }

    /// The largest monomial dividing every term (π included, possibly with a
    /// negative exponent).
    pub fn monomial_content(&self) -> Monomial {
        let Some((first, _)) = self.terms.first() else {
            return Monomial::one();
        };
        let mut res = first.clone();
        for (m, _) in &self.terms[1..] {
            if res.is_one() {
                break;
            }
            res = min_positive(&res, m);
        }
        let pi = self.min_pi();
        let (_, rest) = res.split_atom(&Atom::Pi);
        rest.mul(&Monomial::pi(pi))
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut s = BTreeSet::new();
        for (m, _) in &self.terms {
            for a in m.atoms() {
                if *a != Atom::Pi {
                    s.insert(a.clone());
                }
            }
        }
        s
    }

    pub fn degree_in(&self, a: &Atom) -> i32 {
        self.terms.iter().map(|(m, _)| m.exponent(a)).max().unwrap_or(0)
    }

    /// Splits into `Σ_e coeff_e · a^e`.
    pub fn coefficients_in(&self, a: &Atom) -> BTreeMap<i32, Poly> {
        let mut groups: BTreeMap<i32, Vec<(Monomial, GaussRat)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_atom(a);
            groups.entry(e).or_default().push((rest, c.clone()));
        }
        groups
            .into_iter()
            .map(|(e, mut ts)| {
                ts.sort_by(|x, y| x.0.cmp(&y.0));
                (e, Poly { terms: ts })
            })
            .collect()
    }

    /// Formal partial derivative with respect to a chart variable, including
    /// the chain rule through opaque functions that depend on it.
    pub fn partial(&self, v: VarId) -> Poly {
        let target = Atom::Var(v);
        let mut out = Vec::new();
        for (m, c) in &self.terms {
            for (a, e) in m.factors() {
                match a {
                    Atom::Var(_) if *a == target => {
                        let mm = m.div_unchecked(&Monomial::atom(a.clone(), 1));
                        out.push((mm, c * &GaussRat::from_int(*e as i64)));
                    }
                    Atom::Func(f) => {
                        if let Some(df) = f.differentiate(v) {
                            let mm = m
                                .div_unchecked(&Monomial::atom(a.clone(), 1))
                                .mul(&Monomial::atom(Atom::Func(Arc::new(df)), 1));
                            out.push((mm, c * &GaussRat::from_int(*e as i64)));
                        }
                    }
                    _ => {}
                }
            }
        }
        Poly::from_terms(out)
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut s = BTreeSet::new();
        for (m, _) in &self.terms {
            for a in m.atoms() {
                match a {
                    Atom::Var(v) => {
                        s.insert(*v);
                    }
                    Atom::Func(f) => s.extend(f.args().iter().copied()),
                    Atom::Pi => {}
                }
            }
        }
        s
    }
}

fn min_positive(a: &Monomial, b: &Monomial) -> Monomial {
    // minimum over atoms present in both; absent atoms count as exponent 0
    let mut out = smallvec::SmallVec::<[(Atom, i32); 4]>::new();
    for (atom, e) in a.factors() {
        let eb = b.exponent(atom);
        let m = (*e).min(eb);
        if m != 0 && *atom != Atom::Pi {
            out.push((atom.clone(), m.max(0)));
        }
    }
    out.retain(|(_, e)| *e != 0);
    Monomial::from_sorted(out)
}

impl fmt::Display for Poly {
    /// Leading term first, in the expression grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = (c.is_real() || c.re.is_zero()) && c.is_negative_leading();
            let mag = if neg { -c } else { c.clone() };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(VarId::x(i))
    }

    fn c(v: i64) -> Poly {
        Poly::constant(GaussRat::from_int(v))
    }

    #[test]
    fn difference_of_squares_divides() {
        let a = x(1).mul(&x(1)).sub(&x(2).mul(&x(2)));
        let b = x(1).sub(&x(2));
        let q = a.div_exact(&b).unwrap();
        assert_eq!(q, x(1).add(&x(2)));
        assert!(a.div_exact(&x(1).add(&c(1))).is_none());
    }

    #[test]
    fn partial_of_power() {
        let g = Poly::var(VarId::gamma(1, 1, 1));
        let sq = g.mul(&g);
        assert_eq!(sq.partial(VarId::gamma(1, 1, 1)), g.scale(&GaussRat::from_int(2)));
    }

    #[test]
    fn monomial_content_extracts_common_factor() {
        let p = x(1).mul(&x(1)).mul(&x(2)).add(&x(1).mul(&x(3)));
        let mc = p.monomial_content();
        assert_eq!(mc, Monomial::atom(Atom::Var(VarId::x(1)), 1));
    }

    #[test]
    fn pi_is_a_unit_for_division() {
        let pi = Poly::atom(Atom::Pi);
        let p = x(1).mul(&pi).add(&pi);
        let q = p.div_exact(&pi).unwrap();
        assert_eq!(q, x(1).add(&c(1)));
        // 1 + π is not a unit
        assert!(pi.div_exact(&pi.add(&pi.mul(&pi))).is_none());
    }

    #[test]
    fn renders_leading_first() {
        let p = x(1).mul(&x(1)).sub(&x(2).mul(&x(2))).add(&c(3));
        assert_eq!(p.to_string(), "x1^2 - x2^2 + 3");
    }
}
