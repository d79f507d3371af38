//! Multivariate polynomial gcd by recursive content / primitive-part
//! reduction with a primitive pseudo-remainder sequence.
//!
//! The result is determined up to a unit (a nonzero Gaussian rational times a
//! power of π); callers normalise.

use std::collections::{BTreeMap, BTreeSet};

use smallvec::SmallVec;

use super::atom::{Atom, Monomial};
use super::poly::Poly;
use super::scalar::GaussRat;

/// Greatest common divisor, monic (leading coefficient 1).
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return monic(b);
    }
    if b.is_zero() {
        return monic(a);
    }
    if a.is_unit() || b.is_unit() {
        return Poly::one();
    }
    let a = shift_pi(a);
    let b = shift_pi(b);
    monic(&gcd_rec(&a, &b))
}

/// Content of a polynomial list: the gcd of all entries, monic.
pub fn gcd_many<'a>(polys: impl IntoIterator<Item = &'a Poly>) -> Poly {
    let mut g = Poly::zero();
    for p in polys {
        g = gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    g
}

pub(crate) fn monic(p: &Poly) -> Poly {
    match p.leading() {
        None => Poly::zero(),
        Some((_, c)) if c.is_one() => p.clone(),
        Some((_, c)) => p.scale(&c.inv().expect("nonzero leading coefficient")),
    }
}

fn shift_pi(p: &Poly) -> Poly {
    let s = p.min_pi();
    if s == 0 {
        p.clone()
    } else {
        p.mul_term(&Monomial::pi(-s), &GaussRat::one())
    }
}

fn all_atoms(p: &Poly) -> BTreeSet<Atom> {
    let mut s = BTreeSet::new();
    for (m, _) in p.terms() {
        s.extend(m.atoms().cloned());
    }
    s
}

fn exact(a: &Poly, b: &Poly) -> Poly {
    a.div_exact(b).expect("gcd divides its arguments")
}

/// Both arguments have nonnegative exponents everywhere (π included).
fn gcd_rec(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg = nonneg_min(&ma, &mb);
    let a1 = if ma.is_one() { a.clone() } else { a.mul_term(&inverse(&ma), &GaussRat::one()) };
    let b1 = if mb.is_one() { b.clone() } else { b.mul_term(&inverse(&mb), &GaussRat::one()) };
    let g = gcd_no_monomial(&a1, &b1);
    if mg.is_one() {
        g
    } else {
        g.mul_term(&mg, &GaussRat::one())
    }
}

fn inverse(m: &Monomial) -> Monomial {
    Monomial::one().div_unchecked(m)
}

fn nonneg_min(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: SmallVec<[(Atom, i32); 4]> = SmallVec::new();
    for (atom, e) in a.factors() {
        let m = (*e).min(b.exponent(atom));
        if m > 0 {
            out.push((atom.clone(), m));
        }
    }
    Monomial::from_sorted(out)
}

fn same_up_to_scalar(a: &Poly, b: &Poly) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let (la, lb) = (&a.leading().unwrap().1, &b.leading().unwrap().1);
    a.terms()
        .iter()
        .zip(b.terms())
        .all(|((ma, ca), (mb, cb))| ma == mb && (ca * lb) == (cb * la))
}

/// Neither argument is divisible by any atom.
fn gcd_no_monomial(a: &Poly, b: &Poly) -> Poly {
    if a.len() == 1 || b.len() == 1 {
        return Poly::one();
    }
    if same_up_to_scalar(a, b) {
        return a.clone();
    }
    let atoms_a = all_atoms(a);
    let atoms_b = all_atoms(b);
    if atoms_a.is_disjoint(&atoms_b) {
        return Poly::one();
    }
    // Atoms private to one side cannot occur in the gcd: reduce that side to
    // the gcd of its coefficients with respect to the private atoms.
    let only_a: Vec<Atom> = atoms_a.difference(&atoms_b).cloned().collect();
    if !only_a.is_empty() {
        return gcd_with_coefficients(b, a, &only_a);
    }
    let only_b: Vec<Atom> = atoms_b.difference(&atoms_a).cloned().collect();
    if !only_b.is_empty() {
        return gcd_with_coefficients(a, b, &only_b);
    }
    // Cheap divisibility checks before the full sequence.
    if b.len() <= a.len() {
        if a.div_exact(b).is_some() {
            return b.clone();
        }
    } else if b.div_exact(a).is_some() {
        return a.clone();
    }
    let main = atoms_a
        .iter()
        .min_by_key(|x| a.degree_in(x).max(b.degree_in(x)))
        .expect("common atoms exist")
        .clone();
    let ua = to_univariate(a, &main);
    let ub = to_univariate(b, &main);
    let ca = content(&ua);
    let cb = content(&ub);
    let pa = divide_all(&ua, &ca);
    let pb = divide_all(&ub, &cb);
    let c = gcd_rec(&ca, &cb);
    if coprime_in_main(&ua, &ub, &main) {
        return c;
    }
    let g = primitive_prs(pa, pb);
    let g = from_univariate(&g, &main);
    if c.is_unit() {
        g
    } else {
        g.mul(&c)
    }
}

/// gcd(keep, p) where `private` atoms occur in `p` but not in `keep`.
fn gcd_with_coefficients(keep: &Poly, p: &Poly, private: &[Atom]) -> Poly {
    let mut groups: BTreeMap<Vec<i32>, Vec<(Monomial, GaussRat)>> = BTreeMap::new();
    for (m, c) in p.terms() {
        let mut key = Vec::with_capacity(private.len());
        let mut rest = m.clone();
        for atom in private {
            let (e, r) = rest.split_atom(atom);
            key.push(e);
            rest = r;
        }
        groups.entry(key).or_default().push((rest, c.clone()));
    }
    // Smallest coefficients first: they shrink the running gcd fastest.
    let mut coeffs: Vec<Poly> = groups.into_values().map(Poly::from_terms).collect();
    coeffs.sort_by_key(|c| c.len());
    let mut g = keep.clone();
    for c in &coeffs {
        g = gcd_rec(&g, c);
        if g.is_unit() {
            return Poly::one();
        }
    }
    g
}

const PROBE_VALUES: [i64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Specialising every other atom to an integer can only raise the degree of
/// the gcd in `main` while both leading coefficients stay nonzero, so a
/// constant univariate gcd proves the primitive parts coprime.
fn coprime_in_main(ua: &[Poly], ub: &[Poly], main: &Atom) -> bool {
    let mut others: BTreeSet<Atom> = BTreeSet::new();
    for c in ua.iter().chain(ub) {
        others.extend(all_atoms(c));
    }
    others.remove(main);
    for attempt in 0..2 {
        let point: BTreeMap<&Atom, GaussRat> = others
            .iter()
            .enumerate()
            .map(|(i, a)| (a, GaussRat::from_int(PROBE_VALUES[(3 * i + 5 * attempt) % PROBE_VALUES.len()])))
            .collect();
        let ea: Vec<GaussRat> = ua.iter().map(|c| eval_at(c, &point)).collect();
        let eb: Vec<GaussRat> = ub.iter().map(|c| eval_at(c, &point)).collect();
        if ea.last().map_or(true, |c| c.is_zero()) || eb.last().map_or(true, |c| c.is_zero()) {
            continue;
        }
        if univariate_gcd_degree(ea, eb) == 0 {
            return true;
        }
    }
    false
}

fn eval_at(p: &Poly, point: &BTreeMap<&Atom, GaussRat>) -> GaussRat {
    let mut acc = GaussRat::zero();
    for (m, c) in p.terms() {
        let mut t = c.clone();
        for (a, e) in m.factors() {
            let v = &point[a];
            for _ in 0..*e {
                t = &t * v;
            }
        }
        acc = &acc + &t;
    }
    acc
}

/// Degree of the gcd of two dense univariate polynomials over a field.
fn univariate_gcd_degree(mut a: Vec<GaussRat>, mut b: Vec<GaussRat>) -> usize {
    let strip = |u: &mut Vec<GaussRat>| {
        while u.last().map_or(false, |c| c.is_zero()) {
            u.pop();
        }
    };
    strip(&mut a);
    strip(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let inv = b.last().unwrap().inv().expect("nonzero leading coefficient");
        while a.len() >= b.len() {
            let f = &a[a.len() - 1] * &inv;
            let shift = a.len() - b.len();
            for (k, bc) in b.iter().enumerate() {
                a[k + shift] = &a[k + shift] - &(&f * bc);
            }
            a.pop();
            strip(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

fn to_univariate(p: &Poly, main: &Atom) -> Vec<Poly> {
    let coeffs = p.coefficients_in(main);
    let deg = *coeffs.keys().next_back().unwrap_or(&0) as usize;
    let mut out = vec![Poly::zero(); deg + 1];
    for (e, c) in coeffs {
        out[e as usize] = c;
    }
    out
}

fn from_univariate(u: &[Poly], main: &Atom) -> Poly {
    let mut acc = Poly::zero();
    for (e, c) in u.iter().enumerate() {
        if !c.is_zero() {
            acc = acc.add(&c.mul_term(&Monomial::atom(main.clone(), e as i32), &GaussRat::one()));
        }
    }
    acc
}

fn content(u: &[Poly]) -> Poly {
    let mut nonzero: Vec<&Poly> = u.iter().filter(|c| !c.is_zero()).collect();
    nonzero.sort_by_key(|c| c.len());
    let mut g = Poly::zero();
    for c in nonzero {
        g = gcd_rec(&g, c);
        if g.is_unit() {
            return Poly::one();
        }
    }
    g
}

fn divide_all(u: &[Poly], c: &Poly) -> Vec<Poly> {
    if c.is_unit() {
        let (m, k) = &c.terms()[0];
        let inv = k.inv().expect("unit");
        let shift = inverse(m);
        return u.iter().map(|p| p.mul_term(&shift, &inv)).collect();
    }
    u.iter().map(|p| exact(p, c)).collect()
}

fn trim(u: &mut Vec<Poly>) {
    while u.len() > 1 && u.last().map_or(false, |c| c.is_zero()) {
        u.pop();
    }
    if u.len() == 1 && u[0].is_zero() {
        u.clear();
    }
}

fn pseudo_remainder(p: &[Poly], q: &[Poly]) -> Vec<Poly> {
    let mut r: Vec<Poly> = p.to_vec();
    let dq = q.len() - 1;
    let lq = &q[dq];
    trim(&mut r);
    while !r.is_empty() && r.len() - 1 >= dq {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - dq;
        let mut next: Vec<Poly> = r.iter().map(|c| c.mul(lq)).collect();
        for (k, qc) in q.iter().enumerate() {
            let t = qc.mul(&lr);
            next[k + shift] = next[k + shift].sub(&t);
        }
        debug_assert!(next[dr].is_zero());
        next.pop();
        r = next;
        trim(&mut r);
    }
    r
}

fn primitive(u: Vec<Poly>) -> Vec<Poly> {
    let c = content(&u);
    let mut out = divide_all(&u, &c);
    // scale so the leading coefficient has leading coefficient 1
    if let Some(lead) = out.last().and_then(|p| p.leading()).map(|(_, k)| k.clone()) {
        if !lead.is_one() {
            let inv = lead.inv().expect("nonzero");
            out = out.iter().map(|p| p.scale(&inv)).collect();
        }
    }
    out
}

fn primitive_prs(a: Vec<Poly>, b: Vec<Poly>) -> Vec<Poly> {
    let (mut p, mut q) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    loop {
        if q.len() == 1 {
            // q is a nonzero element of the coefficient ring and both inputs
            // are primitive: the gcd is a unit.
            return vec![Poly::one()];
        }
        let r = pseudo_remainder(&p, &q);
        if r.is_empty() {
            return primitive(q);
        }
        if r.len() == 1 {
            return vec![Poly::one()];
        }
        p = q;
        q = primitive(r);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::atom::VarId;

    fn x(i: usize) -> Poly {
        Poly::var(VarId::x(i))
    }

    fn c(v: i64) -> Poly {
        Poly::constant(GaussRat::from_int(v))
    }

    #[test]
    fn gcd_of_products() {
        let f = x(1).add(&x(2)).add(&c(1));
        let g = x(1).sub(&x(3));
        let h = x(2).mul(&x(2)).add(&c(1));
        let a = f.mul(&g).mul(&g);
        let b = f.mul(&g).mul(&h);
        let d = gcd(&a, &b);
        assert_eq!(d, monic(&f.mul(&g)));
    }

    #[test]
    fn coprime_is_one() {
        let a = x(1).mul(&x(1)).add(&c(1));
        let b = x(1).add(&c(1));
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn monomial_factors() {
        let a = x(1).mul(&x(1)).mul(&x(2));
        let b = x(1).mul(&x(3).add(&c(2)));
        assert_eq!(gcd(&a, &b), x(1));
    }

    #[test]
    fn powers_of_a_quadric() {
        let q = c(1).add(&x(1).mul(&x(1))).add(&x(2).mul(&x(2))).add(&x(3).mul(&x(3)));
        let a = q.pow(4).mul(&x(1));
        let b = q.pow(3).mul(&x(2).add(&c(5)));
        assert_eq!(gcd(&a, &b), q.pow(3));
    }

    #[test]
    fn pi_factors_are_units() {
        let pi = Poly::atom(Atom::Pi);
        let a = x(1).mul_term(&Monomial::pi(-2), &GaussRat::one());
        let b = x(1).mul(&pi);
        assert_eq!(gcd(&a, &b), x(1));
        let onepi = c(1).add(&pi);
        assert_eq!(gcd(&onepi.mul(&x(2)), &onepi.mul(&x(1))), onepi);
    }
}
