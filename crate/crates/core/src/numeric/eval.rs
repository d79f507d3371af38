//! Expressions compiled for fast repeated evaluation at real points.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symkernel::{Atom, Expr, FuncSym, Poly, VarId, POLE_EPSILON};

/// Built-in periodic function symbols.
pub const SIN_2PI: &str = "sin2pi";
pub const COS_2PI: &str = "cos2pi";

/// `sin(2πt)` as an opaque function of `v`.
pub fn sin2pi(v: VarId) -> Expr {
    Expr::func(FuncSym::new(SIN_2PI, vec![v]))
}

/// `cos(2πt)` as an opaque function of `v`.
pub fn cos2pi(v: VarId) -> Expr {
    Expr::func(FuncSym::new(COS_2PI, vec![v]))
}

#[derive(Clone, Copy, Debug)]
enum AtomEval {
    /// Base coordinate, 0-based.
    Coord(usize),
    /// `scale · sin(2πx_axis + phase)`.
    Trig { axis: usize, scale: f64, phase: f64 },
}

fn base_index(v: VarId, n: usize) -> Result<usize> {
    match v {
        VarId::Base(i) if (i as usize) <= n && i >= 1 => Ok(i as usize - 1),
        _ => Err(Error::Unbound(v.to_string())),
    }
}

fn compile_atom(a: &Atom, n: usize) -> Result<AtomEval> {
    match a {
        Atom::Var(v) => Ok(AtomEval::Coord(base_index(*v, n)?)),
        Atom::Func(f) => {
            let unbound = || Error::Unbound(f.to_string());
            let [arg] = f.args() else {
                return Err(unbound());
            };
            if f.partials().iter().any(|p| p != arg) {
                return Err(unbound());
            }
            let p = f.partials().len() as i32;
            // d^p/dt^p sin(ωt) = ω^p sin(ωt + pπ/2); cos(u) = sin(u + π/2)
            let base_phase = match f.name() {
                SIN_2PI => 0.0,
                COS_2PI => FRAC_PI_2,
                _ => return Err(unbound()),
            };
            Ok(AtomEval::Trig {
                axis: base_index(*arg, n)?,
                scale: (2.0 * PI).powi(p),
                phase: base_phase + p as f64 * FRAC_PI_2,
            })
        }
        Atom::Pi => unreachable!("π is folded into coefficients"),
    }
}

#[derive(Clone, Debug)]
struct CompiledPoly {
    terms: Vec<(Vec<(u16, i32)>, Complex64)>,
}

impl CompiledPoly {
    fn eval(&self, atoms: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (factors, c) in &self.terms {
            let mut t = 1.0;
            for &(a, e) in factors {
                t *= atoms[a as usize].powi(e);
            }
            acc += c * t;
        }
        acc
    }
}

/// An expression over base coordinates and built-in periodic functions,
/// ready for evaluation at points of `R^n`.
#[derive(Clone, Debug)]
pub struct CompiledExpr {
    n: usize,
    atoms: Vec<AtomEval>,
    num: CompiledPoly,
    den: Option<CompiledPoly>,
}

impl CompiledExpr {
    pub fn new(e: &Expr, n: usize) -> Result<CompiledExpr> {
        let mut index: HashMap<Atom, u16> = HashMap::new();
        let mut atoms = Vec::new();
        let mut compile = |p: &Poly| -> Result<CompiledPoly> {
            let mut terms = Vec::with_capacity(p.len());
            for (m, c) in p.terms() {
                let mut coef = c.to_complex();
                let mut factors = Vec::new();
                for (a, e) in m.factors() {
                    if let Atom::Pi = a {
                        coef *= PI.powi(*e);
                        continue;
                    }
                    let id = match index.get(a) {
                        Some(&id) => id,
                        None => {
                            let id = atoms.len() as u16;
                            atoms.push(compile_atom(a, n)?);
                            index.insert(a.clone(), id);
                            id
                        }
                    };
                    factors.push((id, *e));
                }
                terms.push((factors, coef));
            }
            Ok(CompiledPoly { terms })
        };
        let num = compile(e.numer())?;
        let den = if e.denom().is_one() {
            None
        } else {
            Some(compile(e.denom())?)
        };
        Ok(CompiledExpr { n, atoms, num, den })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of distinct atoms plus terms; a rough cost measure.
    pub fn cost(&self) -> usize {
        self.atoms.len() + self.num.terms.len() + self.den.as_ref().map_or(0, |d| d.terms.len())
    }

    fn atom_values(&self, x: &[f64], buf: &mut Vec<f64>) {
        buf.clear();
        for a in &self.atoms {
            buf.push(match *a {
                AtomEval::Coord(i) => x[i],
                AtomEval::Trig { axis, scale, phase } => scale * (2.0 * PI * x[axis] + phase).sin(),
            });
        }
    }

    /// Value at `x`; fails on a pole.
    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        let mut buf = Vec::with_capacity(self.atoms.len());
        self.eval_with(x, &mut buf)
    }

    /// As [`eval`](Self::eval) with a caller-owned scratch buffer.
    pub fn eval_with(&self, x: &[f64], buf: &mut Vec<f64>) -> Result<Complex64> {
        debug_assert_eq!(x.len(), self.n);
        self.atom_values(x, buf);
        let num = self.num.eval(buf);
        match &self.den {
            None => Ok(num),
            Some(d) => {
                let dv = d.eval(buf);
                if dv.norm() < POLE_EPSILON {
                    return Err(Error::Pole);
                }
                Ok(num / dv)
            }
        }
    }
}

/// Point valuation for the generic evaluator that also knows the built-in
/// periodic functions.
pub struct GridValuation<'a> {
    pub x: &'a [f64],
}

impl crate::symkernel::Valuation for GridValuation<'_> {
    fn var(&self, v: VarId) -> Option<f64> {
        base_index(v, self.x.len()).ok().map(|i| self.x[i])
    }

    fn func(&self, f: &FuncSym) -> Option<f64> {
        match compile_atom(&Atom::Func(std::sync::Arc::new(f.clone())), self.x.len()).ok()? {
            AtomEval::Trig { axis, scale, phase } => Some(scale * (2.0 * PI * self.x[axis] + phase).sin()),
            AtomEval::Coord(_) => None,
        }
    }
}
