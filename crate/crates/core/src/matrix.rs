//! Small dense matrices of exact scalars: products, determinants and exact
//! inverses by cofactors.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::forms::sum_exprs;
use crate::symkernel::{Expr, Substitution, VarId};

/// Row-major square matrix of expressions.
pub type ExprMatrix = Vec<Vec<Expr>>;

pub fn identity(n: usize) -> ExprMatrix {
    (0..n)
        .map(|r| (0..n).map(|c| if r == c { Expr::one() } else { Expr::zero() }).collect())
        .collect()
}

pub fn is_identity(m: &ExprMatrix) -> bool {
    m.iter().enumerate().all(|(r, row)| {
        row.iter()
            .enumerate()
            .all(|(c, e)| if r == c { e.is_one() } else { e.is_zero() })
    })
}

pub fn mul(a: &ExprMatrix, b: &ExprMatrix) -> ExprMatrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    (0..n)
        .map(|r| {
            (0..m)
                .map(|c| sum_exprs((0..b.len()).map(|k| a[r][k].mul(&b[k][c])).collect()))
                .collect()
        })
        .collect()
}

pub fn transpose(a: &ExprMatrix) -> ExprMatrix {
    let n = a.len();
    (0..n).map(|r| (0..n).map(|c| a[c][r].clone()).collect()).collect()
}

/// Jacobian `∂f_r/∂v_c`.
pub fn jacobian(f: &[Expr], vars: &[VarId]) -> ExprMatrix {
    f.iter()
        .map(|e| vars.iter().map(|&v| e.partial(v)).collect())
        .collect()
}

pub fn substitute(a: &ExprMatrix, sigma: &Substitution) -> Result<ExprMatrix> {
    a.iter()
        .map(|row| row.iter().map(|e| e.substitute(sigma)).collect())
        .collect()
}

struct Minors<'a> {
    a: &'a ExprMatrix,
    memo: HashMap<(u32, u32), Expr>,
}

impl Minors<'_> {
    /// Determinant of the submatrix on the given row and column sets
    /// (equal sizes), by cofactor expansion along its first row.
    fn det(&mut self, rows: u32, cols: u32) -> Expr {
        if rows == 0 {
            return Expr::one();
        }
        if let Some(e) = self.memo.get(&(rows, cols)) {
            return e.clone();
        }
        let r = rows.trailing_zeros() as usize;
        let rest = rows & !(1 << r);
        let mut parts = Vec::new();
        let mut position = 0;
        for c in 0..self.a.len() {
            if cols & (1 << c) == 0 {
                continue;
            }
            let entry = &self.a[r][c];
            if !entry.is_zero() {
                let sub = self.det(rest, cols & !(1 << c));
                let p = entry.mul(&sub);
                parts.push(if position % 2 == 1 { p.neg() } else { p });
            }
            position += 1;
        }
        let d = sum_exprs(parts);
        self.memo.insert((rows, cols), d.clone());
        d
    }
}

pub fn det(a: &ExprMatrix) -> Expr {
    let n = a.len();
    let full = (1u32 << n) - 1;
    Minors {
        a,
        memo: HashMap::new(),
    }
    .det(full, full)
}

/// Exact inverse via adjugate and determinant.
pub fn inverse(a: &ExprMatrix) -> Result<ExprMatrix> {
    let n = a.len();
    let full = (1u32 << n) - 1;
    let mut minors = Minors {
        a,
        memo: HashMap::new(),
    };
    let d = minors.det(full, full);
    if d.is_zero() {
        return Err(Error::NonInvertible("matrix"));
    }
    let dinv = d.inv()?;
    let mut out = vec![vec![Expr::zero(); n]; n];
    for r in 0..n {
        for c in 0..n {
            // inverse[c][r] = (-1)^{r+c} minor(r, c) / det
            let m = minors.det(full & !(1 << r), full & !(1 << c));
            let m = if (r + c) % 2 == 1 { m.neg() } else { m };
            out[c][r] = m.mul(&dinv);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_unipotent() {
        let x1 = Expr::x(1);
        let a = vec![
            vec![Expr::one(), Expr::zero()],
            vec![&Expr::int(2) * &x1, Expr::one()],
        ];
        let inv = inverse(&a).unwrap();
        assert_eq!(inv[1][0], (&Expr::int(-2) * &x1));
        assert!(is_identity(&mul(&a, &inv)));
    }

    #[test]
    fn rational_inverse() {
        let x1 = Expr::x(1);
        let x2 = Expr::x(2);
        let a = vec![vec![x1.clone(), x2.clone()], vec![Expr::one(), x1.clone()]];
        assert_eq!(det(&a), &(&x1 * &x1) - &x2);
        let inv = inverse(&a).unwrap();
        assert!(is_identity(&mul(&a, &inv)));
        assert!(is_identity(&mul(&inv, &a)));
    }

    #[test]
    fn singular_is_rejected() {
        let x1 = Expr::x(1);
        let a = vec![vec![x1.clone(), x1.clone()], vec![Expr::one(), Expr::one()]];
        assert_eq!(inverse(&a), Err(Error::NonInvertible("matrix")));
    }
}
