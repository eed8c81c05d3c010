//! Critical points of one- and two-dimensional polynomial systems and their
//! linear stability class.

use std::fmt;

use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::model::{Monomial, PolyVectorField, Polynomial};

/// Largest residual `‖f(x*)‖` accepted for a returned fixed point.
pub const ROOT_RESIDUAL: f64 = 1e-10;
/// Largest residual accepted by [`classify`].
pub const CLASSIFY_RESIDUAL: f64 = 1e-8;
/// Roots closer than this are merged.
pub const DEDUP_DISTANCE: f64 = 1e-6;
pub const DEFAULT_GRID: usize = 25;

const NEWTON_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    StableNode,
    UnstableNode,
    Saddle,
    StableSpiral,
    UnstableSpiral,
    /// Purely imaginary eigenvalues; linearization cannot decide stability.
    CenterLinear,
    Degenerate,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::StableNode => "stable-node",
            Classification::UnstableNode => "unstable-node",
            Classification::Saddle => "saddle",
            Classification::StableSpiral => "stable-spiral",
            Classification::UnstableSpiral => "unstable-spiral",
            Classification::CenterLinear => "center-linear",
            Classification::Degenerate => "degenerate",
        })
    }
}

/// Eigenvalue thresholds used by [`classify_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// `|λ|` below this counts as a zero eigenvalue.
    pub zero: f64,
    /// Eigenvalues closer than this (relative to their size) are repeated.
    pub repeated: f64,
    /// `|Re λ| < center · |Im λ|` counts as purely imaginary.
    pub center: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            zero: 1e-9,
            repeated: 1e-9,
            center: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub location: Vec<f64>,
    pub eigenvalues: Vec<Complex64>,
    pub classification: Classification,
    pub residual: f64,
}

/// Axis-aligned search region, one `(lo, hi)` interval per dimension.
pub type SearchBox = Vec<(f64, f64)>;

/// Finds the fixed points of `field` inside `search_box` by Newton's method
/// seeded on a `grid`-per-dimension lattice, and classifies each.
///
/// Fields of Lotka-Volterra shape (`f_i = x_i · linear_i(x)`) also get the
/// closed-form candidates where each `x_i` or `linear_i` vanishes as seeds.
/// Results are sorted lexicographically by location.
pub fn fixed_points(field: &PolyVectorField, search_box: &[(f64, f64)], grid: usize) -> Result<Vec<CriticalPoint>> {
    let n = field.dim();
    if !(1..=2).contains(&n) {
        return Err(Error::InvalidInput(format!("fixed-point search supports 1 or 2 dimensions, got {n}")));
    }
    check_dim(n, search_box.len())?;
    if grid < 1 {
        return Err(Error::InvalidInput("grid must have at least one point".into()));
    }

    let mut seeds = lotka_volterra_candidates(field);
    let axis = |lo: f64, hi: f64| -> Vec<f64> {
        if grid == 1 {
            vec![0.5 * (lo + hi)]
        } else {
            (0..grid).map(|k| lo + (hi - lo) * k as f64 / (grid - 1) as f64).collect()
        }
    };
    let axes: Vec<Vec<f64>> = search_box.iter().map(|&(lo, hi)| axis(lo, hi)).collect();
    if n == 1 {
        seeds.extend(axes[0].iter().map(|&x| vec![x]));
    } else {
        for &x in &axes[0] {
            for &y in &axes[1] {
                seeds.push(vec![x, y]);
            }
        }
    }

    let jac = field.jacobian();
    let mut roots: Vec<Vec<f64>> = Vec::new();
    for seed in seeds {
        let Some(root) = newton(field, &jac, seed) else {
            continue;
        };
        let inside = root.iter().zip(search_box).all(|(&v, &(lo, hi))| {
            let pad = 1e-9 * (hi - lo).abs().max(1.0);
            v >= lo - pad && v <= hi + pad
        });
        if inside && !roots.iter().any(|r| dist(r, &root) < DEDUP_DISTANCE) {
            roots.push(root);
        }
    }
    roots.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    roots.iter().map(|r| classify(field, r)).collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Newton iteration; `None` when it diverges, hits a singular Jacobian
/// away from a root, or fails to reach the residual bound.
fn newton(field: &PolyVectorField, jac: &crate::model::Jacobian, mut x: Vec<f64>) -> Option<Vec<f64>> {
    let mut fx = field.eval(&x).ok()?;
    for _ in 0..NEWTON_MAX_ITER {
        let res = norm(&fx);
        if !res.is_finite() {
            return None;
        }
        let j = jac.eval(&x).ok()?;
        let Some(step) = solve(&j, &fx) else {
            return (res < ROOT_RESIDUAL).then_some(x);
        };
        let scale = norm(&x).max(1.0);
        for (xi, si) in x.iter_mut().zip(&step) {
            *xi -= si;
        }
        fx = field.eval(&x).ok()?;
        if norm(&step) <= 1e-15 * scale && norm(&fx) < ROOT_RESIDUAL {
            return Some(x);
        }
    }
    (norm(&fx) < ROOT_RESIDUAL).then_some(x)
}

/// Solves `J s = r` for n ≤ 2.
fn solve(j: &[Vec<f64>], r: &[f64]) -> Option<Vec<f64>> {
    match r.len() {
        1 => (j[0][0] != 0.0).then(|| vec![r[0] / j[0][0]]),
        2 => {
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det == 0.0 || !det.is_finite() {
                return None;
            }
            Some(vec![
                (r[0] * j[1][1] - j[0][1] * r[1]) / det,
                (j[0][0] * r[1] - j[1][0] * r[0]) / det,
            ])
        }
        _ => None,
    }
}

/// Splits `f_i = x_i · g_i` with `g_i` affine, when every component has
/// that shape.
fn lotka_volterra_factors(field: &PolyVectorField) -> Option<Vec<(f64, Vec<f64>)>> {
    let n = field.dim();
    field
        .components()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut constant = 0.0;
            let mut linear = vec![0.0; n];
            for (m, c) in p.terms() {
                let e = m.exponents();
                if e[i] == 0 {
                    return None;
                }
                let mut rest = e.to_vec();
                rest[i] -= 1;
                match rest.iter().sum::<u32>() {
                    0 => constant += c,
                    1 => linear[rest.iter().position(|&v| v == 1)?] += c,
                    _ => return None,
                }
            }
            Some((constant, linear))
        })
        .collect()
}

/// Closed-form equilibria of a Lotka-Volterra field: for every subset of
/// species kept alive, solve their affine factors with the rest at zero.
fn lotka_volterra_candidates(field: &PolyVectorField) -> Vec<Vec<f64>> {
    let Some(factors) = lotka_volterra_factors(field) else {
        return Vec::new();
    };
    let n = field.dim();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let alive: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let m = alive.len();
        let mat: Vec<Vec<f64>> = alive.iter().map(|&i| alive.iter().map(|&k| factors[i].1[k]).collect()).collect();
        let rhs: Vec<f64> = alive.iter().map(|&i| factors[i].0).collect();
        let sol = if m == 0 { Some(Vec::new()) } else { solve(&mat, &rhs) };
        if let Some(s) = sol {
            let mut x = vec![0.0; n];
            for (&i, v) in alive.iter().zip(s) {
                x[i] = -v;
            }
            out.push(x);
        }
    }
    out
}

/// `[-0.1 S, S]` per dimension with `S = 2 max |b_i / a_ii|` for
/// Lotka-Volterra fields, `[-10, 10]` otherwise.
pub fn default_search_box(field: &PolyVectorField) -> SearchBox {
    let n = field.dim();
    let fallback = vec![(-10.0, 10.0); n];
    let Some(factors) = lotka_volterra_factors(field) else {
        return fallback;
    };
    let s = 2.0
        * factors
            .iter()
            .enumerate()
            .filter(|(i, (_, lin))| lin[*i] != 0.0)
            .map(|(i, (b, lin))| (b / lin[i]).abs())
            .fold(0.0, f64::max);
    if s > 0.0 && s.is_finite() {
        vec![(-0.1 * s, s); n]
    } else {
        fallback
    }
}

pub fn classify(field: &PolyVectorField, location: &[f64]) -> Result<CriticalPoint> {
    classify_with(field, location, &Thresholds::default())
}

/// Linear stability class of the fixed point at `location`.
pub fn classify_with(field: &PolyVectorField, location: &[f64], th: &Thresholds) -> Result<CriticalPoint> {
    let n = field.dim();
    if !(1..=2).contains(&n) {
        return Err(Error::InvalidInput(format!("classification supports 1 or 2 dimensions, got {n}")));
    }
    let residual = norm(&field.eval(location)?);
    if !(residual < CLASSIFY_RESIDUAL) {
        return Err(Error::NotAFixedPoint(residual));
    }
    let j = field.jacobian().eval(location)?;
    let eigenvalues = if n == 1 {
        vec![Complex64::new(j[0][0], 0.0)]
    } else {
        eigenvalues_2x2(&j)
    };
    Ok(CriticalPoint {
        location: location.to_vec(),
        classification: class_of(&eigenvalues, th),
        eigenvalues,
        residual,
    })
}

fn eigenvalues_2x2(j: &[Vec<f64>]) -> Vec<Complex64> {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let half = 0.5 * tr;
    let disc = 0.25 * (j[0][0] - j[1][1]).powi(2) + j[0][1] * j[1][0];
    if disc >= 0.0 {
        let s = disc.sqrt();
        // avoid cancellation in the smaller root
        let big = if half >= 0.0 { half + s } else { half - s };
        let small = if big != 0.0 { det / big } else { half - s };
        let (mut l1, mut l2) = (big, small);
        if l1 > l2 {
            std::mem::swap(&mut l1, &mut l2);
        }
        vec![Complex64::new(l1, 0.0), Complex64::new(l2, 0.0)]
    } else {
        let s = (-disc).sqrt();
        vec![Complex64::new(half, -s), Complex64::new(half, s)]
    }
}

fn class_of(ev: &[Complex64], th: &Thresholds) -> Classification {
    if ev.iter().any(|l| l.norm() < th.zero) {
        return Classification::Degenerate;
    }
    if ev.len() == 1 {
        return if ev[0].re < 0.0 {
            Classification::StableNode
        } else {
            Classification::UnstableNode
        };
    }
    let (l1, l2) = (ev[0], ev[1]);
    if (l1 - l2).norm() < th.repeated * l1.norm().max(l2.norm()) {
        return Classification::Degenerate;
    }
    if l1.im != 0.0 {
        return if l1.re.abs() < th.center * l1.im.abs() {
            Classification::CenterLinear
        } else if l1.re < 0.0 {
            Classification::StableSpiral
        } else {
            Classification::UnstableSpiral
        };
    }
    match (l1.re < 0.0, l2.re < 0.0) {
        (true, true) => Classification::StableNode,
        (false, false) => Classification::UnstableNode,
        _ => Classification::Saddle,
    }
}

/// Linear polynomial `Σ c_k x_k + c`, used in tests and by callers building
/// Lotka-Volterra systems directly.
pub fn affine(dim: usize, constant: f64, linear: &[f64]) -> Polynomial {
    let mut p = Polynomial::zero(dim);
    if constant != 0.0 {
        p.add_term(Monomial::constant(dim), constant);
    }
    for (k, &c) in linear.iter().enumerate() {
        if c != 0.0 {
            p.add_term(Monomial::var(dim, k, 1), c);
        }
    }
    p
}
