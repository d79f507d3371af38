//! Tensor-product quadrature with a fixed pairwise summation tree.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_m and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[m - 1 - i] = (x, w);
    }
    out
}

/// Change of variables mapping a bounded parameter onto the real line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Compactification {
    /// `x = scale · tan(t)`, `t ∈ (-π/2, π/2)`.
    Tan { scale: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum DomainKind {
    /// `[0, L_1) × … × [0, L_n)` with periodic integrands.
    PeriodicBox { periods: Vec<f64> },
    /// `R^n` reached through one compactifying substitution per axis.
    TransformedChart { axes: Vec<Compactification> },
}

/// Where and how finely a top-degree density is integrated.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegrationDomain {
    pub kind: DomainKind,
    pub resolution: usize,
    pub orientation: i8,
}

impl IntegrationDomain {
    pub fn periodic_box(periods: Vec<f64>, resolution: usize) -> Result<Self> {
        IntegrationDomain {
            kind: DomainKind::PeriodicBox { periods },
            resolution,
            orientation: 1,
        }
        .validated()
    }

    pub fn unit_torus(n: usize, resolution: usize) -> Result<Self> {
        Self::periodic_box(vec![1.0; n], resolution)
    }

    /// `R^n` through `x_i = tan(t_i)` on every axis.
    pub fn tan_chart(n: usize, resolution: usize) -> Result<Self> {
        IntegrationDomain {
            kind: DomainKind::TransformedChart {
                axes: vec![Compactification::Tan { scale: 1.0 }; n],
            },
            resolution,
            orientation: 1,
        }
        .validated()
    }

    pub fn with_resolution(mut self, resolution: usize) -> Result<Self> {
        self.resolution = resolution;
        self.validated()
    }

    pub fn flipped(mut self) -> Self {
        self.orientation = -self.orientation;
        self
    }

    fn validated(self) -> Result<Self> {
        if self.resolution < 8 {
            return Err(Error::InvalidDomain(format!(
                "resolution {} below the minimum of 8",
                self.resolution
            )));
        }
        if self.orientation != 1 && self.orientation != -1 {
            return Err(Error::InvalidDomain("orientation must be +1 or -1".into()));
        }
        match &self.kind {
            DomainKind::PeriodicBox { periods } => {
                if periods.is_empty() || periods.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
                    return Err(Error::InvalidDomain("periods must be positive".into()));
                }
            }
            DomainKind::TransformedChart { axes } => {
                if axes.is_empty()
                    || axes
                        .iter()
                        .any(|Compactification::Tan { scale }| !(scale.is_finite() && *scale > 0.0))
                {
                    return Err(Error::InvalidDomain("substitution scales must be positive".into()));
                }
            }
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            DomainKind::PeriodicBox { periods } => periods.len(),
            DomainKind::TransformedChart { axes } => axes.len(),
        }
    }

    /// Nodes and weights per axis, Jacobians of the substitution included.
    pub fn axis_rules(&self) -> Vec<Vec<(f64, f64)>> {
        let m = self.resolution;
        match &self.kind {
            DomainKind::PeriodicBox { periods } => periods
                .iter()
                .map(|&l| (0..m).map(|j| (l * j as f64 / m as f64, l / m as f64)).collect())
                .collect(),
            DomainKind::TransformedChart { axes } => {
                let gl = gauss_legendre(m);
                axes.iter()
                    .map(|Compactification::Tan { scale }| {
                        gl.iter()
                            .map(|&(u, w)| {
                                let t = FRAC_PI_2 * u;
                                let c = t.cos();
                                (scale * t.tan(), w * FRAC_PI_2 * scale / (c * c))
                            })
                            .collect()
                    })
                    .collect()
            }
        }
    }
}

/// Integral together with the size of the integrand.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    /// `Σ w |f|`, the discrete L¹ norm.
    pub l1: f64,
    /// Largest `|f|` over the grid.
    pub max_abs: f64,
}

impl Quadrature {
    fn zero() -> Self {
        Quadrature {
            value: Complex64::new(0.0, 0.0),
            l1: 0.0,
            max_abs: 0.0,
        }
    }

    fn combine(a: Self, b: Self) -> Self {
        Quadrature {
            value: a.value + b.value,
            l1: a.l1 + b.l1,
            max_abs: a.max_abs.max(b.max_abs),
        }
    }
}

const LEAF: usize = 512;

/// Sums `w · f(x)` over the tensor grid. The flat index range is split in
/// halves down to fixed-size leaves, so the rounding pattern does not depend
/// on how many threads run.
pub fn tensor_sum<F>(rules: &[Vec<(f64, f64)>], f: &F) -> Result<Quadrature>
where
    F: Fn(&[f64], &mut Vec<f64>) -> Result<Complex64> + Sync,
{
    let total: usize = rules.iter().map(|r| r.len()).product();
    if total == 0 {
        return Ok(Quadrature::zero());
    }
    sum_range(rules, f, 0, total)
}

fn sum_range<F>(rules: &[Vec<(f64, f64)>], f: &F, lo: usize, hi: usize) -> Result<Quadrature>
where
    F: Fn(&[f64], &mut Vec<f64>) -> Result<Complex64> + Sync,
{
    if hi - lo <= LEAF {
        return sum_leaf(rules, f, lo, hi);
    }
    let mid = lo + (hi - lo) / 2;
    let (a, b) = rayon::join(|| sum_range(rules, f, lo, mid), || sum_range(rules, f, mid, hi));
    Ok(Quadrature::combine(a?, b?))
}

fn sum_leaf<F>(rules: &[Vec<(f64, f64)>], f: &F, lo: usize, hi: usize) -> Result<Quadrature>
where
    F: Fn(&[f64], &mut Vec<f64>) -> Result<Complex64> + Sync,
{
    let n = rules.len();
    let mut x = vec![0.0; n];
    let mut scratch = Vec::new();
    let mut q = Quadrature::zero();
    for flat in lo..hi {
        let mut rest = flat;
        let mut w = 1.0;
        for axis in (0..n).rev() {
            let m = rules[axis].len();
            let (node, weight) = rules[axis][rest % m];
            rest /= m;
            x[axis] = node;
            w *= weight;
        }
        let v = f(&x, &mut scratch)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite {
                value: format!("{v}"),
                point: x,
            });
        }
        q.value += v * w;
        q.l1 += v.norm() * w;
        q.max_abs = q.max_abs.max(v.norm());
    }
    Ok(q)
}
