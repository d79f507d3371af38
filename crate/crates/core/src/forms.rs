//! Graded exterior algebra over a chart of the connection space.
//!
//! Generators are the differentials `dx^i` and `dΓ^α_iβ`, ordered like their
//! variables (every `dx` before every `dΓ`). A [`Form`] may mix degrees; the
//! determinant expansion produces `1 + ω_1 + ω_2 + …` as one value.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::symkernel::{sum_polys, Expr, Poly, Substitution, VarId};

/// The differential `dv` of a chart variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gen(pub VarId);

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d{}", self.0)
    }
}

/// Strictly increasing generator tuple; its length is the degree.
pub type GenTuple = SmallVec<[Gen; 6]>;

/// Sorts `gens` in place, returning the permutation sign, or `None` when a
/// generator repeats.
pub fn sort_with_sign(gens: &mut [Gen]) -> Option<i32> {
    let mut sign = 1;
    // insertion sort: tuples are short
    for k in 1..gens.len() {
        let mut j = k;
        while j > 0 && gens[j - 1] > gens[j] {
            gens.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && gens[j - 1] == gens[j] {
            return None;
        }
    }
    if gens.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

fn merge_tuples(a: &[Gen], b: &[Gen]) -> Option<(GenTuple, bool)> {
    let mut out = GenTuple::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut inversions = 0usize;
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else if a[i] > b[j] {
            // b[j] jumps over the remaining elements of a
            inversions += a.len() - i;
            out.push(b[j]);
            j += 1;
        } else {
            return None;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, inversions % 2 == 1))
}

/// Collects coefficient contributions per generator tuple and sums each
/// group at once.
#[derive(Default)]
struct Accumulator {
    groups: BTreeMap<GenTuple, Vec<Expr>>,
}

impl Accumulator {
    fn push(&mut self, key: GenTuple, coef: Expr) {
        if !coef.is_zero() {
            self.groups.entry(key).or_default().push(coef);
        }
    }

    fn finish(self, n: usize) -> Form {
        let mut terms = BTreeMap::new();
        for (key, parts) in self.groups {
            let sum = sum_exprs(parts);
            if !sum.is_zero() {
                terms.insert(key, sum);
            }
        }
        Form { n, terms }
    }
}

/// Sums many expressions; polynomial inputs are merged in one pass.
pub fn sum_exprs(mut parts: Vec<Expr>) -> Expr {
    parts.retain(|e| !e.is_zero());
    if parts.is_empty() {
        return Expr::zero();
    }
    if parts.len() == 1 {
        return parts.into_iter().next().unwrap();
    }
    if parts.iter().all(|e| e.is_polynomial()) {
        let total: usize = parts.iter().map(|e| e.numer().len()).sum();
        if total > 64 {
            return Expr::from_poly(Poly::from_terms(
                parts.iter().flat_map(|e| e.numer().terms().iter().cloned()),
            ));
        }
        return Expr::from_poly(sum_polys(parts.into_iter().map(|e| e.numer().clone()).collect()));
    }
    // rational parts: group equal denominators first, then combine
    let mut by_den: BTreeMap<String, (Poly, Vec<Poly>)> = BTreeMap::new();
    for e in &parts {
        let key = e.denom().to_string();
        by_den
            .entry(key)
            .or_insert_with(|| (e.denom().clone(), Vec::new()))
            .1
            .push(e.numer().clone());
    }
    let mut acc = Expr::zero();
    for (_, (den, nums)) in by_den {
        let num = sum_polys(nums);
        if num.is_zero() {
            continue;
        }
        let e = Expr::from_fraction(num, den).expect("denominator is nonzero");
        acc = acc.add(&e);
    }
    acc
}

/// A differential form on an `n`-dimensional chart: a map from generator
/// tuples to nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Form {
    n: usize,
    terms: BTreeMap<GenTuple, Expr>,
}

impl Form {
    pub fn zero(n: usize) -> Form {
        Form {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(n: usize, c: Expr) -> Form {
        let mut f = Form::zero(n);
        if !c.is_zero() {
            f.terms.insert(GenTuple::new(), c);
        }
        f
    }

    pub fn one(n: usize) -> Form {
        Form::scalar(n, Expr::one())
    }

    /// The 1-form `dv`.
    pub fn gen(n: usize, v: VarId) -> Form {
        Form::term(n, &[v], Expr::one())
    }

    pub fn dx(n: usize, i: usize) -> Form {
        Form::gen(n, VarId::x(i))
    }

    /// `coef · dv_1 ∧ … ∧ dv_m` for generators in any order.
    pub fn term(n: usize, vars: &[VarId], coef: Expr) -> Form {
        assert!(
            vars.iter().all(|v| v.max_index() <= n),
            "generator index exceeds chart dimension {n}"
        );
        let mut gens: GenTuple = vars.iter().map(|&v| Gen(v)).collect();
        match sort_with_sign(&mut gens) {
            None => Form::zero(n),
            Some(sign) => {
                let c = if sign < 0 { coef.neg() } else { coef };
                let mut f = Form::zero(n);
                if !c.is_zero() {
                    f.terms.insert(gens, c);
                }
                f
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<GenTuple, Expr> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Total number of monomials across all coefficients.
    pub fn size(&self) -> usize {
        self.terms.values().map(|c| c.size()).sum()
    }

    /// The coefficient of the (sorted) tuple `vars`, zero if absent.
    pub fn coefficient(&self, vars: &[VarId]) -> Expr {
        let key: GenTuple = vars.iter().map(|&v| Gen(v)).collect();
        self.terms.get(&key).cloned().unwrap_or_else(Expr::zero)
    }

    /// The degree when every term has the same degree; `None` for zero or
    /// mixed forms.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|k| k.len());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    pub fn degree_part(&self, k: usize) -> Form {
        Form {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(t, _)| t.len() == k)
                .map(|(t, c)| (t.clone(), c.clone()))
                .collect(),
        }
    }

    fn check_chart(&self, other: &Form) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ChartMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        self.check_chart(other)?;
        let mut terms = self.terms.clone();
        for (t, c) in &other.terms {
            match terms.get_mut(t) {
                Some(existing) => {
                    let s = existing.add(c);
                    if s.is_zero() {
                        terms.remove(t);
                    } else {
                        *existing = s;
                    }
                }
                None => {
                    terms.insert(t.clone(), c.clone());
                }
            }
        }
        Ok(Form { n: self.n, terms })
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Form {
        Form {
            n: self.n,
            terms: self.terms.iter().map(|(t, c)| (t.clone(), c.neg())).collect(),
        }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &Expr) -> Form {
        if c.is_zero() {
            return Form::zero(self.n);
        }
        let mut terms = BTreeMap::new();
        for (t, k) in &self.terms {
            let v = k.mul(c);
            if !v.is_zero() {
                terms.insert(t.clone(), v);
            }
        }
        Form { n: self.n, terms }
    }

    /// Exterior product. Each pair of terms merges its sorted tuples; a
    /// repeated generator kills the pair and every transposition flips the
    /// sign.
    pub fn wedge(&self, other: &Form) -> Result<Form> {
        self.check_chart(other)?;
        let mut acc = Accumulator::default();
        for (ta, ca) in &self.terms {
            for (tb, cb) in &other.terms {
                if let Some((t, odd)) = merge_tuples(ta, tb) {
                    let c = ca.mul(cb);
                    acc.push(t, if odd { c.neg() } else { c });
                }
            }
        }
        Ok(acc.finish(self.n))
    }

    /// Exterior derivative: `d(f dG_I) = Σ_v ∂f/∂v dv ∧ dG_I` over every
    /// variable `f` depends on.
    pub fn d(&self) -> Form {
        let mut acc = Accumulator::default();
        for (t, c) in &self.terms {
            for v in c.free_vars() {
                let g = Gen(v);
                let pos = match t.binary_search(&g) {
                    Ok(_) => continue,
                    Err(p) => p,
                };
                let p = c.partial(v);
                if p.is_zero() {
                    continue;
                }
                let mut key = t.clone();
                key.insert(pos, g);
                acc.push(key, if pos % 2 == 1 { p.neg() } else { p });
            }
        }
        acc.finish(self.n)
    }

    /// Pulls back along the map whose coordinate functions are `sigma`:
    /// coefficients are substituted and every `dv` becomes `d(sigma(v))`.
    /// Variables absent from `sigma` map to themselves.
    pub fn pullback(&self, sigma: &Substitution) -> Result<Form> {
        let mut differentials: HashMap<VarId, Form> = HashMap::new();
        let mut acc = Accumulator::default();
        for (t, c) in &self.terms {
            let coef = c.substitute(sigma)?;
            if coef.is_zero() {
                continue;
            }
            let mut image = Form::scalar(self.n, coef);
            for g in t {
                let dv = differentials.entry(g.0).or_insert_with(|| match sigma.get(&g.0) {
                    Some(e) => Form::scalar(self.n, e.clone()).d(),
                    None => Form::gen(self.n, g.0),
                });
                image = image.wedge(dv)?;
                if image.is_zero() {
                    break;
                }
            }
            for (k, v) in image.terms {
                acc.push(k, v);
            }
        }
        Ok(acc.finish(self.n))
    }

    /// Substitutes into coefficients only, leaving generators untouched.
    pub fn substitute_coefficients(&self, sigma: &Substitution) -> Result<Form> {
        let mut terms = BTreeMap::new();
        for (t, c) in &self.terms {
            let v = c.substitute(sigma)?;
            if !v.is_zero() {
                terms.insert(t.clone(), v);
            }
        }
        Ok(Form { n: self.n, terms })
    }

    /// Applies `f` to every coefficient.
    pub fn map_coefficients(&self, f: impl Fn(&Expr) -> Expr) -> Form {
        let mut terms = BTreeMap::new();
        for (t, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                terms.insert(t.clone(), v);
            }
        }
        Form { n: self.n, terms }
    }

    /// True when no coefficient mentions a fiber coordinate and no `dΓ`
    /// appears: the form lives on the base chart.
    pub fn is_on_base(&self) -> bool {
        self.terms
            .iter()
            .all(|(t, c)| t.iter().all(|g| g.0.is_base()) && !c.contains_fiber())
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (t, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (j, g) in t.iter().enumerate() {
                write!(f, "{}{g}", if j == 0 { "*" } else { "^" })?;
            }
        }
        Ok(())
    }
}

/// An `n×n` matrix of forms sharing one degree (zero entries excepted).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormMatrix {
    n: usize,
    entries: Vec<Form>,
}

impl FormMatrix {
    /// Row-major entries.
    pub fn new(n: usize, entries: Vec<Form>) -> Result<FormMatrix> {
        if entries.len() != n * n {
            return Err(Error::SizeMismatch {
                left: n,
                right: (entries.len() as f64).sqrt() as usize,
            });
        }
        let mut degree: Option<usize> = None;
        for e in &entries {
            if e.dim() != n {
                return Err(Error::ChartMismatch {
                    left: n,
                    right: e.dim(),
                });
            }
            if e.is_zero() {
                continue;
            }
            let Some(d) = e.degree() else {
                let mut ds: Vec<usize> = e.terms().keys().map(|k| k.len()).collect();
                ds.dedup();
                return Err(Error::MixedDegree(ds[0], ds[1]));
            };
            match degree {
                None => degree = Some(d),
                Some(d0) if d0 != d => return Err(Error::MixedDegree(d0, d)),
                _ => {}
            }
        }
        Ok(FormMatrix { n, entries })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Form) -> Result<FormMatrix> {
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(f(r, c));
            }
        }
        FormMatrix::new(n, entries)
    }

    pub fn zeros(n: usize) -> FormMatrix {
        FormMatrix {
            n,
            entries: vec![Form::zero(n); n * n],
        }
    }

    /// The identity matrix `E` of degree-0 forms.
    pub fn identity(n: usize) -> FormMatrix {
        FormMatrix::from_fn(n, |r, c| if r == c { Form::one(n) } else { Form::zero(n) })
            .expect("uniform degree")
    }

    /// A matrix of functions (degree-0 forms).
    pub fn from_exprs(n: usize, m: &[Vec<Expr>]) -> FormMatrix {
        FormMatrix::from_fn(n, |r, c| Form::scalar(n, m[r][c].clone())).expect("uniform degree")
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Entry in row `r`, column `c` (0-based).
    pub fn get(&self, r: usize, c: usize) -> &Form {
        &self.entries[r * self.n + c]
    }

    pub fn entries(&self) -> &[Form] {
        &self.entries
    }

    /// Common entry degree, `None` for the zero matrix.
    pub fn degree(&self) -> Option<usize> {
        self.entries.iter().find_map(|e| e.degree())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    fn check(&self, other: &FormMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &FormMatrix) -> Result<FormMatrix> {
        self.check(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        FormMatrix::new(self.n, entries)
    }

    pub fn sub(&self, other: &FormMatrix) -> Result<FormMatrix> {
        self.check(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        FormMatrix::new(self.n, entries)
    }

    pub fn scale(&self, c: &Expr) -> FormMatrix {
        FormMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
        }
    }

    /// Matrix product with `∧` on entries, in the given order.
    pub fn wedge(&self, other: &FormMatrix) -> Result<FormMatrix> {
        self.check(other)?;
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = Accumulator::default();
                for k in 0..n {
                    let p = self.get(r, k).wedge(other.get(k, c))?;
                    for (t, v) in p.terms {
                        acc.push(t, v);
                    }
                }
                entries.push(acc.finish(n));
            }
        }
        FormMatrix::new(n, entries)
    }

    pub fn trace(&self) -> Form {
        let mut acc = Accumulator::default();
        for k in 0..self.n {
            for (t, v) in self.get(k, k).terms() {
                acc.push(t.clone(), v.clone());
            }
        }
        acc.finish(self.n)
    }

    pub fn d(&self) -> FormMatrix {
        FormMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| e.d()).collect(),
        }
    }

    pub fn pullback(&self, sigma: &Substitution) -> Result<FormMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.pullback(sigma))
            .collect::<Result<Vec<_>>>()?;
        FormMatrix::new(self.n, entries)
    }

    pub fn substitute_coefficients(&self, sigma: &Substitution) -> Result<FormMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.substitute_coefficients(sigma))
            .collect::<Result<Vec<_>>>()?;
        FormMatrix::new(self.n, entries)
    }

    fn require_even(&self) -> Result<()> {
        for e in &self.entries {
            for t in e.terms().keys() {
                if t.len() % 2 == 1 {
                    return Err(Error::OddDegree(t.len()));
                }
            }
        }
        Ok(())
    }

    /// Sum of all principal `k×k` minors (the elementary symmetric function
    /// `σ_k` of the matrix). Entries must have even degree so that they
    /// commute.
    pub fn principal_minor_sum(&self, k: usize) -> Result<Form> {
        self.require_even()?;
        let mut minors = MinorCache::new(self);
        let mut acc = Accumulator::default();
        for subset in subsets(self.n, k) {
            let det = minors.det(subset, subset)?;
            for (t, v) in det.terms {
                acc.push(t, v);
            }
        }
        Ok(acc.finish(self.n))
    }

    /// `det(E + s·A) = Σ_k s^k σ_k(A)`.
    pub fn det_expand(&self, s: &Expr) -> Result<Form> {
        self.require_even()?;
        let mut total = Form::one(self.n);
        let mut power = Expr::one();
        for k in 1..=self.n {
            power = power.mul(s);
            let part = self.principal_minor_sum(k)?.scale(&power);
            total = total.add(&part)?;
        }
        Ok(total)
    }
}

fn subsets(n: usize, k: usize) -> Vec<u32> {
    (0u32..(1u32 << n)).filter(|m| m.count_ones() as usize == k).collect()
}

/// Memoised cofactor expansion of minors indexed by row/column bitmasks.
struct MinorCache<'a> {
    m: &'a FormMatrix,
    memo: HashMap<(u32, u32), Form>,
}

impl<'a> MinorCache<'a> {
    fn new(m: &'a FormMatrix) -> Self {
        MinorCache {
            m,
            memo: HashMap::new(),
        }
    }

    fn det(&mut self, rows: u32, cols: u32) -> Result<Form> {
        let n = self.m.n;
        if rows == 0 {
            return Ok(Form::one(n));
        }
        if let Some(f) = self.memo.get(&(rows, cols)) {
            return Ok(f.clone());
        }
        let r = rows.trailing_zeros() as usize;
        let rest = rows & !(1 << r);
        let mut acc = Accumulator::default();
        let mut position = 0;
        for c in 0..n {
            if cols & (1 << c) == 0 {
                continue;
            }
            let entry = self.m.get(r, c);
            if !entry.is_zero() {
                let sub = self.det(rest, cols & !(1 << c))?;
                let prod = entry.wedge(&sub)?;
                let negate = position % 2 == 1;
                for (t, v) in prod.terms {
                    acc.push(t, if negate { v.neg() } else { v });
                }
            }
            position += 1;
        }
        let f = acc.finish(n);
        self.memo.insert((rows, cols), f.clone());
        Ok(f)
    }
}

impl fmt::Display for FormMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.n {
            for c in 0..self.n {
                writeln!(f, "[{}][{}] = {}", r + 1, c + 1, self.get(r, c))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::Scalar;

    fn x(i: usize) -> Expr {
        Expr::x(i)
    }

    #[test]
    fn wedge_of_repeated_generator_vanishes() {
        let dx1 = Form::dx(2, 1);
        assert!(dx1.wedge(&dx1).unwrap().is_zero());
    }

    #[test]
    fn wedge_anticommutes_one_forms() {
        let w = Form::dx(2, 2).wedge(&Form::dx(2, 1)).unwrap();
        assert_eq!(w, Form::term(2, &[VarId::x(1), VarId::x(2)], Expr::int(-1)));
    }

    #[test]
    fn wedge_mixed_generators() {
        // Γ dx1 ∧ dΓ = -Γ dΓ ∧ dx1, stored with dx1 first: +Γ dx1∧dΓ
        let g = VarId::gamma(1, 1, 1);
        let a = Form::term(1, &[VarId::x(1)], Expr::var(g));
        let b = Form::gen(1, g);
        let w = a.wedge(&b).unwrap();
        let expected = Form::term(1, &[g, VarId::x(1)], Expr::var(g).neg());
        assert_eq!(w, expected);
        assert_eq!(w.coefficient(&[VarId::x(1), g]), Expr::var(g));
    }

    #[test]
    fn chart_mismatch_is_reported() {
        assert_eq!(
            Form::dx(2, 1).wedge(&Form::dx(3, 1)),
            Err(Error::ChartMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn d_examples() {
        let g = VarId::gamma(1, 1, 1);
        let a = Form::term(1, &[VarId::x(1)], Expr::var(g));
        assert_eq!(a.d(), Form::term(1, &[g, VarId::x(1)], Expr::one()));

        let exact = Form::term(2, &[VarId::x(2)], x(1))
            .add(&Form::term(2, &[VarId::x(1)], x(2)))
            .unwrap();
        assert!(exact.d().is_zero());
    }

    #[test]
    fn pullback_examples() {
        let s: Substitution = [(VarId::x(1), &x(1) + &(&x(2) * &x(2)))].into();
        let p = Form::dx(2, 1).pullback(&s).unwrap();
        let expected = Form::dx(2, 1)
            .add(&Form::term(2, &[VarId::x(2)], &Expr::int(2) * &x(2)))
            .unwrap();
        assert_eq!(p, expected);

        let g = VarId::gamma(1, 1, 1);
        let s: Substitution = [(g, &x(1) * &x(2))].into();
        let p = Form::gen(2, g).pullback(&s).unwrap();
        let expected = Form::term(2, &[VarId::x(1)], x(2))
            .add(&Form::term(2, &[VarId::x(2)], x(1)))
            .unwrap();
        assert_eq!(p, expected);
    }

    #[test]
    fn trace_of_identity_is_n() {
        assert_eq!(FormMatrix::identity(3).trace(), Form::scalar(3, Expr::int(3)));
    }

    #[test]
    fn det_of_zero_matrix_is_one() {
        let s = Expr::scalar(&Scalar::i_over_two_pi());
        assert_eq!(FormMatrix::zeros(3).det_expand(&s).unwrap(), Form::one(3));
    }

    #[test]
    fn det_one_by_one() {
        let a = Form::term(1, &[VarId::x(1), VarId::gamma(1, 1, 1)], Expr::one());
        let m = FormMatrix::new(1, vec![a.clone()]).unwrap();
        let s = Expr::scalar(&Scalar::i_over_two_pi());
        let expected = Form::one(1).add(&a.scale(&s)).unwrap();
        assert_eq!(m.det_expand(&s).unwrap(), expected);
    }

    #[test]
    fn det_rejects_odd_entries() {
        let m = FormMatrix::new(1, vec![Form::dx(1, 1)]).unwrap();
        assert_eq!(m.det_expand(&Expr::one()), Err(Error::OddDegree(1)));
    }

    #[test]
    fn mixed_degree_matrix_rejected() {
        let r = FormMatrix::new(2, vec![Form::one(2), Form::dx(2, 1), Form::zero(2), Form::zero(2)]);
        assert_eq!(r, Err(Error::MixedDegree(0, 1)));
    }

    #[test]
    fn sort_with_sign_examples() {
        let mut t = [Gen(VarId::x(3)), Gen(VarId::x(1)), Gen(VarId::x(2))];
        assert_eq!(sort_with_sign(&mut t), Some(1));
        let mut t = [Gen(VarId::x(2)), Gen(VarId::x(1))];
        assert_eq!(sort_with_sign(&mut t), Some(-1));
        let mut t = [Gen(VarId::x(2)), Gen(VarId::x(2))];
        assert_eq!(sort_with_sign(&mut t), None);
    }

    #[test]
    fn renders_terms() {
        let f = Form::term(2, &[VarId::x(2), VarId::x(1)], x(1));
        assert_eq!(f.to_string(), "(-x1)*dx1^dx2");
        assert_eq!(Form::zero(2).to_string(), "0");
    }
}
