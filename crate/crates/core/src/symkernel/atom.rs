//! Variables, opaque function symbols and monomials.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

/// A chart coordinate on the connection space: a base coordinate `x^i` or a
/// fiber coordinate `Γ^k_ij`. Indices are 1-based.
///
/// Fiber coordinates are stored with `i <= j`; torsion-freeness makes
/// `Γ^k_ij` and `Γ^k_ji` the same coordinate. The derived ordering puts every
/// base variable before every fiber variable, then compares indices
/// lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarId {
    Base(u8),
    Fiber { up: u8, i: u8, j: u8 },
}

impl VarId {
    pub fn x(i: usize) -> VarId {
        assert!((1..=255).contains(&i), "coordinate index out of range");
        VarId::Base(i as u8)
    }

    /// `Γ^up_ij`, canonicalised to `i <= j`.
    pub fn gamma(up: usize, i: usize, j: usize) -> VarId {
        assert!(
            (1..=255).contains(&up) && (1..=255).contains(&i) && (1..=255).contains(&j),
            "connection index out of range"
        );
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        VarId::Fiber {
            up: up as u8,
            i: i as u8,
            j: j as u8,
        }
    }

    pub fn is_base(&self) -> bool {
        matches!(self, VarId::Base(_))
    }

    pub fn is_fiber(&self) -> bool {
        matches!(self, VarId::Fiber { .. })
    }

    /// Largest index used; the variable lives on any chart of at least this
    /// dimension.
    pub fn max_index(&self) -> usize {
        match *self {
            VarId::Base(i) => i as usize,
            VarId::Fiber { up, i, j } => up.max(i).max(j) as usize,
        }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarId::Base(i) => write!(f, "x{i}"),
            VarId::Fiber { up, i, j } => write!(f, "G[{up}][{i}][{j}]"),
        }
    }
}

/// An opaque smooth function of some chart variables, together with the
/// multiset of formal partial derivatives already applied to it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncSym {
    name: String,
    args: Vec<VarId>,
    partials: Vec<VarId>,
}

impl FuncSym {
    pub fn new(name: impl Into<String>, args: Vec<VarId>) -> Self {
        FuncSym {
            name: name.into(),
            args,
            partials: Vec::new(),
        }
    }

    pub fn with_partials(name: impl Into<String>, args: Vec<VarId>, mut partials: Vec<VarId>) -> Self {
        partials.sort();
        FuncSym {
            name: name.into(),
            args,
            partials,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn args(&self) -> &[VarId] {
        &self.args
    }

    pub fn partials(&self) -> &[VarId] {
        &self.partials
    }

    pub fn depends_on(&self, v: VarId) -> bool {
        self.args.contains(&v)
    }

    /// The formal derivative `∂f/∂v`; `None` when `f` does not depend on `v`.
    pub fn differentiate(&self, v: VarId) -> Option<FuncSym> {
        if !self.depends_on(v) {
            return None;
        }
        let mut partials = self.partials.clone();
        let pos = partials.partition_point(|p| *p <= v);
        partials.insert(pos, v);
        Some(FuncSym {
            name: self.name.clone(),
            args: self.args.clone(),
            partials,
        })
    }

    /// Renames arguments (and recorded partials) through `rename`.
    pub fn renamed(&self, rename: impl Fn(VarId) -> VarId) -> FuncSym {
        FuncSym::with_partials(
            self.name.clone(),
            self.args.iter().map(|&a| rename(a)).collect(),
            self.partials.iter().map(|&p| rename(p)).collect(),
        )
    }
}

impl fmt::Display for FuncSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.partials.is_empty() {
            write!(f, "{{")?;
            for (k, p) in self.partials.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "(")?;
        for (k, a) in self.args.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Indeterminates of the polynomial ring. π is carried as an indeterminate
/// that may appear with negative exponents (it is a unit).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Var(VarId),
    Func(Arc<FuncSym>),
    Pi,
}

impl Atom {
    pub fn as_var(&self) -> Option<VarId> {
        match self {
            Atom::Var(v) => Some(*v),
            _ => None,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Var(v) => write!(f, "{v}"),
            Atom::Func(s) => write!(f, "{s}"),
            Atom::Pi => write!(f, "pi"),
        }
    }
}

/// A power product of atoms, sorted by atom with nonzero exponents.
///
/// Ordered by total degree, then lexicographically with smaller atoms
/// weighing more. The order is compatible with multiplication, which the
/// division and gcd routines rely on.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[(Atom, i32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn atom(a: Atom, e: i32) -> Self {
        if e == 0 {
            return Monomial::one();
        }
        let mut v = SmallVec::new();
        v.push((a, e));
        Monomial(v)
    }

    pub fn pi(e: i32) -> Self {
        Monomial::atom(Atom::Pi, e)
    }

    pub(crate) fn from_sorted(v: SmallVec<[(Atom, i32); 4]>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(v.iter().all(|(_, e)| *e != 0));
        Monomial(v)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Atom, i32)] {
        &self.0
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|(_, e)| *e as i64).sum()
    }

    pub fn exponent(&self, a: &Atom) -> i32 {
        match self.0.binary_search_by(|(x, _)| x.cmp(a)) {
            Ok(k) => self.0[k].1,
            Err(_) => 0,
        }
    }

    pub fn pi_exp(&self) -> i32 {
        self.exponent(&Atom::Pi)
    }

    /// True when only π (or nothing) appears.
    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|(a, _)| *a == Atom::Pi)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.combine(other, 1)
    }

    /// `self / other` when every non-π exponent stays nonnegative.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let q = self.combine(other, -1);
        if q.0.iter().any(|(a, e)| *a != Atom::Pi && *e < 0) {
            None
        } else {
            Some(q)
        }
    }

    /// `self / other` allowing negative exponents; used internally for
    /// content extraction where the caller knows the result is valid.
    pub(crate) fn div_unchecked(&self, other: &Monomial) -> Monomial {
        self.combine(other, -1)
    }

    fn combine(&self, other: &Monomial, sign: i32) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out: SmallVec<[(Atom, i32); 4]> = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b[j].0.clone(), sign * b[j].1));
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1 + sign * b[j].1;
                    if e != 0 {
                        out.push((a[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(x, e)| (x.clone(), sign * e)));
        Monomial(out)
    }

    /// Elementwise minimum of exponents (atoms absent on one side count as 0).
    pub fn min_with(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out: SmallVec<[(Atom, i32); 4]> = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            let (atom, e) = match ord {
                Ordering::Less => {
                    i += 1;
                    (a[i - 1].0.clone(), a[i - 1].1.min(0))
                }
                Ordering::Greater => {
                    j += 1;
                    (b[j - 1].0.clone(), b[j - 1].1.min(0))
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (a[i - 1].0.clone(), a[i - 1].1.min(b[j - 1].1))
                }
            };
            if e != 0 {
                out.push((atom, e));
            }
        }
        Monomial(out)
    }

    /// Removes `atom`, returning its exponent and the remaining monomial.
    pub fn split_atom(&self, atom: &Atom) -> (i32, Monomial) {
        match self.0.binary_search_by(|(x, _)| x.cmp(atom)) {
            Ok(k) => {
                let mut rest = self.0.clone();
                let (_, e) = rest.remove(k);
                (e, Monomial(rest))
            }
            Err(_) => (0, self.clone()),
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.0.iter().map(|(a, _)| a)
    }

}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.degree().cmp(&other.degree());
        if d != Ordering::Equal {
            return d;
        }
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(x), None) => return x.1.cmp(&0),
                (None, Some(y)) => return 0.cmp(&y.1),
                (Some(x), Some(y)) => match x.0.cmp(&y.0) {
                    Ordering::Less => return x.1.cmp(&0),
                    Ordering::Greater => return 0.cmp(&y.1),
                    Ordering::Equal => {
                        if x.1 != y.1 {
                            return x.1.cmp(&y.1);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (a, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_is_symmetric() {
        assert_eq!(VarId::gamma(1, 2, 1), VarId::gamma(1, 1, 2));
        assert_eq!(VarId::gamma(1, 2, 1).to_string(), "G[1][1][2]");
    }

    #[test]
    fn base_before_fiber() {
        assert!(VarId::x(4) < VarId::gamma(1, 1, 1));
        assert!(VarId::gamma(1, 1, 2) < VarId::gamma(1, 2, 2));
        assert!(VarId::gamma(1, 2, 2) < VarId::gamma(2, 1, 1));
    }

    #[test]
    fn mixed_partials_commute() {
        let f = FuncSym::new("f", vec![VarId::x(1), VarId::x(2)]);
        let a = f.differentiate(VarId::x(1)).unwrap().differentiate(VarId::x(2)).unwrap();
        let b = f.differentiate(VarId::x(2)).unwrap().differentiate(VarId::x(1)).unwrap();
        assert_eq!(a, b);
        assert!(f.differentiate(VarId::x(3)).is_none());
    }

    #[test]
    fn monomial_order_is_multiplicative() {
        let x1 = Monomial::atom(Atom::Var(VarId::x(1)), 1);
        let x2 = Monomial::atom(Atom::Var(VarId::x(2)), 1);
        let x1sq = x1.mul(&x1);
        assert!(x1 > x2);
        assert!(x1sq > x1.mul(&x2));
        assert!(x1.mul(&x2) > x2.mul(&x2));
        let p = Monomial::pi(-3);
        assert_eq!(x1.mul(&p).cmp(&x2.mul(&p)), Ordering::Greater);
    }

    #[test]
    fn division_rejects_negative_exponents() {
        let x1 = Monomial::atom(Atom::Var(VarId::x(1)), 1);
        let x2 = Monomial::atom(Atom::Var(VarId::x(2)), 1);
        assert!(x1.div(&x2).is_none());
        assert_eq!(x1.mul(&x2).div(&x2), Some(x1.clone()));
        assert_eq!(x1.div(&Monomial::pi(1)).unwrap().pi_exp(), -1);
    }
}
