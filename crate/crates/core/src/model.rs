//! Sparse polynomial vector fields and the three model presets.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{check_dim, Error, Result};

/// Exponent vector of a monomial `x_1^e_1 ... x_n^e_n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn constant(dim: usize) -> Self {
        Monomial(vec![0; dim])
    }

    /// The monomial `x_var^power` in `dim` variables.
    pub fn var(dim: usize, var: usize, power: u32) -> Self {
        let mut e = vec![0; dim];
        e[var] = power;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, &xi)| xi.powi(e as i32))
            .product()
    }
}

/// Real polynomial in `dim` variables stored as a sparse term map.
///
/// Zero coefficients are never stored, so two polynomials compare equal
/// exactly when they have the same nonzero terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs. Repeated
    /// monomials are summed.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, Vec<u32>)>,
    {
        let mut p = Polynomial::zero(dim);
        for (c, e) in terms {
            check_dim(dim, e.len())?;
            if !c.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite coefficient {c}")));
            }
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }

    pub fn add_term(&mut self, m: Monomial, c: f64) {
        assert_eq!(m.dim(), self.dim, "monomial dimension");
        let v = self.terms.get(&m).copied().unwrap_or(0.0) + c;
        if v == 0.0 {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, v);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn coefficient(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.terms.iter().map(|(m, c)| c * m.eval(x)).sum())
    }

    /// Exact partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for (m, &c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut lowered = m.0.clone();
            lowered[var] -= 1;
            out.add_term(Monomial(lowered), c * e as f64);
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        if factor != 0.0 {
            for (m, &c) in &self.terms {
                out.add_term(m.clone(), c * factor);
            }
        }
        out
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        check_dim(self.dim, other.dim)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (v, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", v + 1)?,
                    _ => write!(f, "*x{}^{}", v + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

/// Right-hand side `f(x)` of an autonomous system, one polynomial per
/// component.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyVectorField {
    components: Vec<Polynomial>,
}

impl PolyVectorField {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::InvalidInput("vector field needs at least one component".into()));
        }
        for c in &components {
            check_dim(n, c.dim())?;
        }
        Ok(PolyVectorField { components })
    }

    pub fn zero(dim: usize) -> Self {
        PolyVectorField {
            components: vec![Polynomial::zero(dim); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn degree(&self) -> u32 {
        self.components.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    /// `f(x)`.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        self.components.iter().map(|p| p.eval(x)).collect()
    }

    /// Allocation-free evaluation used in integrator inner loops.
    pub(crate) fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.components) {
            *o = p.terms.iter().map(|(m, c)| c * m.eval(x)).sum();
        }
    }

    /// Matrix of exact partial derivatives, `jacobian()[i][j] = ∂f_i/∂x_j`.
    pub fn jacobian(&self) -> Jacobian {
        let n = self.dim();
        Jacobian {
            entries: self
                .components
                .iter()
                .map(|p| (0..n).map(|j| p.partial(j)).collect())
                .collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> PolyVectorField {
        PolyVectorField {
            components: self.components.iter().map(|p| p.scaled(factor)).collect(),
        }
    }

    pub fn add(&self, other: &PolyVectorField) -> Result<PolyVectorField> {
        check_dim(self.dim(), other.dim())?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(PolyVectorField { components })
    }
}

/// Polynomial Jacobian of a vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    entries: Vec<Vec<Polynomial>>,
}

impl Jacobian {
    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i][j]
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Numeric Jacobian matrix at `x`, row-major.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        check_dim(self.dim(), x.len())?;
        self.entries
            .iter()
            .map(|row| row.iter().map(|p| p.eval(x)).collect())
            .collect()
    }
}

/// `f(x)` for a field and a state of matching length.
pub fn eval_field(field: &PolyVectorField, x: &[f64]) -> Result<Vec<f64>> {
    field.eval(x)
}

pub fn field_jacobian(field: &PolyVectorField) -> Jacobian {
    field.jacobian()
}

/// Autonomous initial-value problem `x' = f(x), x(0) = x0`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialValueProblem {
    pub field: PolyVectorField,
    pub x0: Vec<f64>,
}

impl InitialValueProblem {
    pub fn new(field: PolyVectorField, x0: Vec<f64>) -> Result<Self> {
        check_dim(field.dim(), x0.len())?;
        Ok(InitialValueProblem { field, x0 })
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }
}

/// The three models studied: logistic growth, two-species competition and
/// the exactly solvable planar spiral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelPreset {
    /// `x' = x (b + a x)`.
    Logistic { b: f64, a: f64 },
    /// `x' = x (b1 + a11 x + a12 y)`, `y' = y (b2 + a21 x + a22 y)`.
    TwoSpecies {
        b1: f64,
        b2: f64,
        a11: f64,
        a12: f64,
        a21: f64,
        a22: f64,
    },
    /// `x' = -y + a x (x² + y²)`, `y' = x + a y (x² + y²)`.
    Spiral { a: f64 },
}

impl ModelPreset {
    /// Logistic parameters used in the one-dimensional experiments.
    pub const DEFAULT_LOGISTIC: ModelPreset = ModelPreset::Logistic { b: 1.0, a: -3.0 };

    pub const DEFAULT_TWO_SPECIES: ModelPreset = ModelPreset::TwoSpecies {
        b1: 0.1,
        b2: 0.08,
        a11: -0.0014,
        a12: -0.0012,
        a21: -0.0009,
        a22: -0.001,
    };

    pub const DEFAULT_SPIRAL: ModelPreset = ModelPreset::Spiral { a: -0.5 };

    pub fn dim(&self) -> usize {
        match self {
            ModelPreset::Logistic { .. } => 1,
            ModelPreset::TwoSpecies { .. } | ModelPreset::Spiral { .. } => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelPreset::Logistic { .. } => "logistic",
            ModelPreset::TwoSpecies { .. } => "two_species",
            ModelPreset::Spiral { .. } => "spiral",
        }
    }

    /// True when the parameters leave the regime the models were posed in
    /// (logistic with `b < 0` or `a >= 0`). Such presets still work.
    pub fn out_of_regime(&self) -> bool {
        match *self {
            ModelPreset::Logistic { b, a } => b < 0.0 || a >= 0.0,
            _ => false,
        }
    }

    /// Expanded polynomial form of the preset.
    pub fn field(&self) -> PolyVectorField {
        let terms = |dim: usize, list: Vec<(f64, Vec<u32>)>| {
            Polynomial::from_terms(dim, list.into_iter().filter(|(c, _)| *c != 0.0))
                .expect("preset terms are well formed")
        };
        let components = match *self {
            ModelPreset::Logistic { b, a } => vec![terms(1, vec![(b, vec![1]), (a, vec![2])])],
            ModelPreset::TwoSpecies {
                b1,
                b2,
                a11,
                a12,
                a21,
                a22,
            } => vec![
                terms(2, vec![(b1, vec![1, 0]), (a11, vec![2, 0]), (a12, vec![1, 1])]),
                terms(2, vec![(b2, vec![0, 1]), (a21, vec![1, 1]), (a22, vec![0, 2])]),
            ],
            ModelPreset::Spiral { a } => vec![
                terms(2, vec![(-1.0, vec![0, 1]), (a, vec![3, 0]), (a, vec![1, 2])]),
                terms(2, vec![(1.0, vec![1, 0]), (a, vec![2, 1]), (a, vec![0, 3])]),
            ],
        };
        PolyVectorField { components }
    }
}

/// Expands a preset into an initial-value problem.
pub fn preset_ivp(preset: ModelPreset, x0: &[f64]) -> Result<InitialValueProblem> {
    check_dim(preset.dim(), x0.len())?;
    if preset.out_of_regime() {
        log::warn!("{} parameters outside the usual regime: {:?}", preset.name(), preset);
    }
    InitialValueProblem::new(preset.field(), x0.to_vec())
}
