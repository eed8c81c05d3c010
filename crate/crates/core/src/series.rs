//! Truncated power series in time and the two routes to the series solution
//! of `x' = f(x)`: the direct Taylor recursion and the homotopy perturbation
//! expansion in a formal parameter λ of `x' = λ f(x)`.
//!
//! Both routes produce the same coefficients (the HPM corrections are single
//! monomials `x_j t^j`); [`hpm_collapse_check`] verifies this numerically.

use std::fmt;

use crate::error::{check_dim, Error, Result};
use crate::model::{InitialValueProblem, Polynomial};

/// Coefficients below this magnitude are treated as zero by the radius
/// estimators.
pub const NEAR_ZERO: f64 = 1e-300;

/// Number of trailing ratios used by the ratio-test extrapolation.
pub const RATIO_WINDOW: usize = 5;

/// Smallest usable ratio count for the ratio test.
pub const MIN_RATIOS: usize = 4;

/// Smallest order accepted by the root test.
pub const MIN_ROOT_ORDER: usize = 8;

pub const DEFAULT_ORDER: usize = 10;

/// `c_0 + c_1 t + ... + c_K t^K`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<f64>,
}

impl TruncatedSeries {
    /// Panics on an empty coefficient list; a series always has `c_0`.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        TruncatedSeries { coeffs }
    }

    pub fn zeros(order: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![0.0; order + 1],
        }
    }

    pub fn constant(c: f64, order: usize) -> Self {
        let mut s = Self::zeros(order);
        s.coeffs[0] = c;
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> f64 {
        self.coeffs.get(j).copied().unwrap_or(0.0)
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// Partial sum at `t` (Horner).
    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// Term-wise derivative, one order lower (order 0 stays a zero constant).
    pub fn derivative(&self) -> TruncatedSeries {
        if self.coeffs.len() == 1 {
            return TruncatedSeries::zeros(0);
        }
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &c)| j as f64 * c)
                .collect(),
        }
    }

    /// Same series re-truncated (or zero-padded) to `order`.
    pub fn truncated(&self, order: usize) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: (0..=order).map(|j| self.coeff(j)).collect(),
        }
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Cauchy product truncated at order `order`.
pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries, order: usize) -> TruncatedSeries {
    let mut out = vec![0.0; order + 1];
    for (j, o) in out.iter_mut().enumerate() {
        let lo = j.saturating_sub(b.order());
        let hi = j.min(a.order());
        if lo > hi {
            continue;
        }
        *o = (lo..=hi).map(|i| a.coeffs[i] * b.coeffs[j - i]).sum();
    }
    TruncatedSeries { coeffs: out }
}

/// Partial sum `Σ c_j t^j`.
pub fn series_eval(s: &TruncatedSeries, t: f64) -> f64 {
    s.eval(t)
}

/// Composes `p` with series arguments, truncated at `order`.
pub fn poly_apply_series(
    p: &Polynomial,
    vars: &[TruncatedSeries],
    order: usize,
) -> Result<TruncatedSeries> {
    check_dim(p.dim(), vars.len())?;
    let mut powers = PowerCache::new(vars, order);
    let mut out = TruncatedSeries::zeros(order);
    for (m, c) in p.terms() {
        let mut term = TruncatedSeries::constant(1.0, order);
        for (v, &e) in m.exponents().iter().enumerate() {
            if e > 0 {
                term = series_mul(&term, powers.get(v, e), order);
            }
        }
        for (o, t) in out.coeffs.iter_mut().zip(&term.coeffs) {
            *o += c * t;
        }
    }
    Ok(out)
}

/// Memoized powers `vars[v]^e` for one composition.
struct PowerCache {
    order: usize,
    cache: Vec<Vec<TruncatedSeries>>,
}

impl PowerCache {
    fn new(vars: &[TruncatedSeries], order: usize) -> Self {
        PowerCache {
            order,
            cache: vars.iter().map(|v| vec![v.truncated(order)]).collect(),
        }
    }

    fn get(&mut self, v: usize, e: u32) -> &TruncatedSeries {
        let e = e as usize;
        while self.cache[v].len() < e {
            let last = self.cache[v].last().expect("first power present");
            let next = series_mul(last, &self.cache[v][0], self.order);
            self.cache[v].push(next);
        }
        &self.cache[v][e - 1]
    }
}

/// Time-series solution of an initial-value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSolution {
    series: Vec<TruncatedSeries>,
    ivp: InitialValueProblem,
    overflow_order: Option<usize>,
}

impl TaylorSolution {
    pub fn order(&self) -> usize {
        self.series[0].order()
    }

    pub fn series(&self) -> &[TruncatedSeries] {
        &self.series
    }

    pub fn variable(&self, i: usize) -> &TruncatedSeries {
        &self.series[i]
    }

    pub fn ivp(&self) -> &InitialValueProblem {
        &self.ivp
    }

    /// First order at which a coefficient became non-finite, if any.
    pub fn overflow_order(&self) -> Option<usize> {
        self.overflow_order
    }

    /// Partial sums of every variable at `t`.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.series.iter().map(|s| s.eval(t)).collect()
    }
}

/// Taylor coefficients of the solution through `order`, from the recursion
/// `(j+1) x_{j+1} = [f(x(t))]_j`.
pub fn taylor_solve(ivp: &InitialValueProblem, order: usize) -> Result<TaylorSolution> {
    if order < 1 {
        return Err(Error::InvalidInput("series order must be at least 1".into()));
    }
    let n = ivp.dim();
    let mut coeffs: Vec<Vec<f64>> = ivp.x0.iter().map(|&x| vec![x]).collect();
    let mut overflow_order = None;
    for j in 0..order {
        // coefficient j of f(x(t)) only needs x_0..x_j
        let partial: Vec<TruncatedSeries> =
            coeffs.iter().map(|c| TruncatedSeries::new(c.clone())).collect();
        for i in 0..n {
            let fi = poly_apply_series(&ivp.field.components()[i], &partial, j)?;
            let next = fi.coeffs[j] / (j + 1) as f64;
            if !next.is_finite() && overflow_order.is_none() {
                overflow_order = Some(j + 1);
            }
            coeffs[i].push(next);
        }
    }
    if let Some(k) = overflow_order {
        log::debug!("series coefficients overflowed at order {k}");
    }
    Ok(TaylorSolution {
        series: coeffs.into_iter().map(TruncatedSeries::new).collect(),
        ivp: ivp.clone(),
        overflow_order,
    })
}

/// Homotopy perturbation expansion `x(λ, t) = Σ_j x^{(j)}(t) λ^j` of
/// `x' = λ f(x)`, evaluated at λ = 1 by summing the corrections.
#[derive(Debug, Clone, PartialEq)]
pub struct HpmExpansion {
    /// `corrections[j][i]` is `x_i^{(j)}(t)`, a polynomial of degree ≤ j.
    corrections: Vec<Vec<TruncatedSeries>>,
}

impl HpmExpansion {
    pub fn from_corrections(corrections: Vec<Vec<TruncatedSeries>>) -> Self {
        assert!(!corrections.is_empty());
        HpmExpansion { corrections }
    }

    pub fn order(&self) -> usize {
        self.corrections.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.corrections[0].len()
    }

    pub fn correction(&self, j: usize, i: usize) -> &TruncatedSeries {
        &self.corrections[j][i]
    }

    pub fn correction_mut(&mut self, j: usize, i: usize) -> &mut TruncatedSeries {
        &mut self.corrections[j][i]
    }

    /// `Σ_j x^{(j)}(t)`, the expansion at λ = 1.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.corrections.iter().map(|c| c[i].eval(t)).sum())
            .collect()
    }
}

/// Series in λ whose coefficients are polynomials in t.
type LambdaSeries = Vec<Vec<f64>>;

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (k, &y) in b.iter().enumerate() {
            out[i + k] += x * y;
        }
    }
    out
}

fn poly_add_scaled(acc: &mut Vec<f64>, p: &[f64], s: f64) {
    if acc.len() < p.len() {
        acc.resize(p.len(), 0.0);
    }
    for (a, &v) in acc.iter_mut().zip(p) {
        *a += s * v;
    }
}

fn lambda_mul(a: &LambdaSeries, b: &LambdaSeries, order: usize) -> LambdaSeries {
    (0..=order)
        .map(|k| {
            let mut acc = Vec::new();
            for i in 0..=k {
                if i < a.len() && k - i < b.len() {
                    poly_add_scaled(&mut acc, &poly_mul(&a[i], &b[k - i]), 1.0);
                }
            }
            acc
        })
        .collect()
}

fn lambda_compose(p: &Polynomial, vars: &[LambdaSeries], order: usize) -> LambdaSeries {
    let mut out: LambdaSeries = vec![Vec::new(); order + 1];
    for (m, c) in p.terms() {
        let mut term: LambdaSeries = vec![Vec::new(); order + 1];
        term[0] = vec![1.0];
        for (v, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                term = lambda_mul(&term, &vars[v], order);
            }
        }
        for (o, t) in out.iter_mut().zip(&term) {
            poly_add_scaled(o, t, c);
        }
    }
    out
}

/// Literal order-by-order HPM recursion: the λ^j part of `λ f(Σ x^{(i)} λ^i)`
/// is integrated in t from 0, with `x^{(0)} = x0` and `x^{(j)}(0) = 0`.
pub fn hpm_solve(ivp: &InitialValueProblem, order: usize) -> Result<HpmExpansion> {
    if order < 1 {
        return Err(Error::InvalidInput("series order must be at least 1".into()));
    }
    let n = ivp.dim();
    // vars[i][j] = polynomial in t of x_i^{(j)}
    let mut vars: Vec<LambdaSeries> = ivp.x0.iter().map(|&x| vec![vec![x]]).collect();
    for j in 1..=order {
        let rhs: Vec<Vec<f64>> = ivp
            .field
            .components()
            .iter()
            .map(|p| {
                let mut g = lambda_compose(p, &vars, j - 1);
                g.swap_remove(j - 1)
            })
            .collect();
        for i in 0..n {
            // ∫_0^t g(s) ds
            let mut integrated = vec![0.0; j + 1];
            for (m, &c) in rhs[i].iter().enumerate() {
                if m < j {
                    integrated[m + 1] = c / (m + 1) as f64;
                } else {
                    debug_assert!(c == 0.0, "correction degree exceeds order");
                }
            }
            vars[i].push(integrated);
        }
    }
    let corrections = (0..=order)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let mut c = vars[i][j].clone();
                    c.resize(j + 1, 0.0);
                    TruncatedSeries::new(c)
                })
                .collect()
        })
        .collect();
    Ok(HpmExpansion { corrections })
}

/// Outcome of comparing an HPM expansion with a Taylor solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseReport {
    pub passed: bool,
    /// Largest relative deviation over all orders, variables and powers of t.
    pub max_deviation: f64,
}

/// Checks that each correction `x^{(j)}(t)` is the single monomial
/// `x_j t^j`. Deviations are relative to the larger of `|x_j|` and the
/// correction's own largest coefficient.
pub fn hpm_collapse_check(
    h: &HpmExpansion,
    t: &TaylorSolution,
    tol: f64,
) -> Result<CollapseReport> {
    check_dim(t.series.len(), h.dim())?;
    check_dim(t.order(), h.order())?;
    let mut max_dev: f64 = 0.0;
    for j in 0..=h.order() {
        for i in 0..h.dim() {
            let corr = h.correction(j, i);
            let xj = t.series[i].coeff(j);
            let scale = corr
                .coeffs()
                .iter()
                .fold(xj.abs(), |m, c| m.max(c.abs()));
            let len = corr.coeffs().len().max(j + 1);
            for m in 0..len {
                let expect = if m == j { xj } else { 0.0 };
                let diff = (corr.coeff(m) - expect).abs();
                let dev = if diff == 0.0 { 0.0 } else { diff / scale };
                if dev.is_nan() {
                    max_dev = f64::INFINITY;
                } else {
                    max_dev = max_dev.max(dev);
                }
            }
        }
    }
    Ok(CollapseReport {
        passed: max_dev <= tol,
        max_deviation: max_dev,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusMethod {
    Ratio,
    Root,
}

impl fmt::Display for RadiusMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RadiusMethod::Ratio => "ratio",
            RadiusMethod::Root => "root",
        })
    }
}

/// Convergence-radius estimate from series coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusEstimate {
    /// Positive, possibly `+inf` when the tail is identically zero.
    pub value: f64,
    pub method: RadiusMethod,
    /// Per-order diagnostic `(j, value)`: ratios `|c_j/c_{j-1}|` for the
    /// ratio test, `ln|c_j|` for the root test.
    pub diagnostics: Vec<(usize, f64)>,
    /// Set when a coefficient overflowed; `value` is then the smallest
    /// positive double.
    pub overflow: bool,
}

/// Estimates the convergence radius of `s`.
///
/// The ratio test fits the last five ratios against `1/j` and inverts the
/// intercept. The root test fits `ln|c_j|` against `j` over the upper half
/// of the orders and inverts `exp(slope)`. Coefficients below
/// [`NEAR_ZERO`] are skipped; a gap of `g` orders between usable
/// coefficients contributes the geometric-mean ratio `|c_k/c_j|^{1/g}`.
pub fn radius_estimate(s: &TruncatedSeries, method: RadiusMethod) -> Result<RadiusEstimate> {
    let k = s.order();
    let min_order = match method {
        RadiusMethod::Ratio => MIN_RATIOS,
        RadiusMethod::Root => MIN_ROOT_ORDER,
    };
    if k < min_order {
        return Err(Error::InsufficientOrder(format!(
            "{method} test needs order >= {min_order}, got {k}"
        )));
    }

    if let Some(j) = s.coeffs.iter().position(|c| !c.is_finite()) {
        let lo = j.saturating_sub(1);
        return Ok(RadiusEstimate {
            value: f64::MIN_POSITIVE,
            method,
            diagnostics: vec![(lo, s.coeffs[lo].abs()), (j, f64::INFINITY)],
            overflow: true,
        });
    }

    let tail_start = k.div_ceil(2);
    if s.coeffs[tail_start..].iter().all(|c| c.abs() < NEAR_ZERO) {
        return Ok(RadiusEstimate {
            value: f64::INFINITY,
            method,
            diagnostics: (tail_start..=k).map(|j| (j, 0.0)).collect(),
            overflow: false,
        });
    }

    match method {
        RadiusMethod::Ratio => ratio_estimate(s),
        RadiusMethod::Root => root_estimate(s, tail_start),
    }
}

fn ratio_estimate(s: &TruncatedSeries) -> Result<RadiusEstimate> {
    let usable: Vec<usize> = (0..=s.order())
        .rev()
        .filter(|&j| s.coeffs[j].abs() >= NEAR_ZERO)
        .take(RATIO_WINDOW + 1)
        .collect();
    // usable is descending; pair each index with the next lower one
    let mut diagnostics: Vec<(usize, f64)> = usable
        .windows(2)
        .map(|w| {
            let (hi, lo) = (w[0], w[1]);
            let r = (s.coeffs[hi] / s.coeffs[lo]).abs().powf(1.0 / (hi - lo) as f64);
            (hi, r)
        })
        .collect();
    diagnostics.reverse();
    if diagnostics.len() < MIN_RATIOS {
        return Err(Error::InsufficientOrder(format!(
            "ratio test found {} usable ratios, needs {MIN_RATIOS}",
            diagnostics.len()
        )));
    }
    let xs: Vec<f64> = diagnostics.iter().map(|&(j, _)| 1.0 / j as f64).collect();
    let ys: Vec<f64> = diagnostics.iter().map(|&(_, r)| r).collect();
    let (intercept, _) = least_squares(&xs, &ys);
    let limit = if intercept > 0.0 && intercept.is_finite() {
        intercept
    } else {
        // extrapolation overshot; fall back to the last raw ratio
        *ys.last().expect("non-empty")
    };
    Ok(RadiusEstimate {
        value: 1.0 / limit,
        method: RadiusMethod::Ratio,
        diagnostics,
        overflow: false,
    })
}

fn root_estimate(s: &TruncatedSeries, tail_start: usize) -> Result<RadiusEstimate> {
    let diagnostics: Vec<(usize, f64)> = (tail_start..=s.order())
        .filter(|&j| s.coeffs[j].abs() >= NEAR_ZERO)
        .map(|j| (j, s.coeffs[j].abs().ln()))
        .collect();
    if diagnostics.len() < 2 {
        return Err(Error::InsufficientOrder(
            "root test needs at least two nonzero coefficients in the upper half".into(),
        ));
    }
    let xs: Vec<f64> = diagnostics.iter().map(|&(j, _)| j as f64).collect();
    let ys: Vec<f64> = diagnostics.iter().map(|&(_, l)| l).collect();
    let (_, slope) = least_squares(&xs, &ys);
    Ok(RadiusEstimate {
        value: (-slope).exp(),
        method: RadiusMethod::Root,
        diagnostics,
        overflow: false,
    })
}

/// Ordinary least squares `y = intercept + slope x`.
fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}
