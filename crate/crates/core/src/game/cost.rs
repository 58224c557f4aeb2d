use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::autodiff::{Dual, HyperDual, Scalar};
use crate::error::{Error, Result};

/// One term `coeff * prod_k u_k^exponents[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, Vec<u32>)", into = "(f64, Vec<u32>)")]
pub struct Monomial {
    pub coeff: f64,
    pub exponents: Vec<u32>,
}

impl From<(f64, Vec<u32>)> for Monomial {
    fn from((coeff, exponents): (f64, Vec<u32>)) -> Self {
        Self { coeff, exponents }
    }
}

impl From<Monomial> for (f64, Vec<u32>) {
    fn from(m: Monomial) -> Self {
        (m.coeff, m.exponents)
    }
}

/// A real polynomial in a fixed number of variables.
///
/// Used for player costs and, in the open-loop module, for dynamics
/// components over the stacked `(state, controls)` vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    nvars: usize,
    monomials: Vec<Monomial>,
}

pub type PolynomialCost = Polynomial;

impl Polynomial {
    pub fn new(nvars: usize, monomials: Vec<Monomial>) -> Result<Self> {
        for (idx, mono) in monomials.iter().enumerate() {
            if mono.exponents.len() != nvars {
                return Err(Error::InvalidGame(format!(
                    "monomial {idx} has {} exponents, expected {nvars}",
                    mono.exponents.len()
                )));
            }
            if !mono.coeff.is_finite() {
                return Err(Error::InvalidGame(format!(
                    "monomial {idx} has a non-finite coefficient"
                )));
            }
        }
        Ok(Self { nvars, monomials })
    }

    /// Build from `(coeff, exponents)` pairs.
    pub fn from_terms<I, E>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, E)>,
        E: Into<Vec<u32>>,
    {
        let monomials = terms
            .into_iter()
            .map(|(coeff, e)| Monomial {
                coeff,
                exponents: e.into(),
            })
            .collect();
        Self::new(nvars, monomials)
    }

    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            monomials: Vec::new(),
        }
    }

    /// The polynomial equal to `u_k`.
    pub fn coordinate(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        Self {
            nvars,
            monomials: vec![Monomial {
                coeff: 1.0,
                exponents: e,
            }],
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn eval<T: Scalar>(&self, u: &[T]) -> T {
        debug_assert_eq!(u.len(), self.nvars);
        let mut acc = T::constant(0.0);
        for mono in &self.monomials {
            let mut term = T::constant(mono.coeff);
            for (x, &e) in u.iter().zip(&mono.exponents) {
                if e > 0 {
                    term = term * x.pow_u32(e);
                }
            }
            acc = acc + term;
        }
        acc
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        self.eval(u)
    }

    /// Exact `df/du_k`.
    pub fn partial(&self, u: &[f64], k: usize) -> f64 {
        let mut acc = 0.0;
        for mono in &self.monomials {
            let ek = mono.exponents[k];
            if ek == 0 {
                continue;
            }
            let mut term = mono.coeff * f64::from(ek);
            for (j, (&x, &e)) in u.iter().zip(&mono.exponents).enumerate() {
                let e = if j == k { e - 1 } else { e };
                if e > 0 {
                    term *= x.powi(e as i32);
                }
            }
            acc += term;
        }
        acc
    }

    /// Exact `d2f/(du_a du_b)`.
    pub fn second_partial(&self, u: &[f64], a: usize, b: usize) -> f64 {
        let mut acc = 0.0;
        for mono in &self.monomials {
            let mut e = mono.exponents.clone();
            let mut factor = mono.coeff;
            for &k in &[a, b] {
                if e[k] == 0 {
                    factor = 0.0;
                    break;
                }
                factor *= f64::from(e[k]);
                e[k] -= 1;
            }
            if factor == 0.0 {
                continue;
            }
            for (&x, &ek) in u.iter().zip(&e) {
                if ek > 0 {
                    factor *= x.powi(ek as i32);
                }
            }
            acc += factor;
        }
        acc
    }

    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        (0..self.nvars).map(|k| self.partial(u, k)).collect()
    }

    pub fn hessian(&self, u: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.nvars, self.nvars, |a, b| self.second_partial(u, a, b))
    }

    /// Sum of two polynomials in the same variables (terms are concatenated).
    pub fn plus(&self, other: &Polynomial) -> Result<Polynomial> {
        if other.nvars != self.nvars {
            return Err(Error::InvalidGame(format!(
                "cannot add polynomials in {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        let mut monomials = self.monomials.clone();
        monomials.extend(other.monomials.iter().cloned());
        Ok(Polynomial {
            nvars: self.nvars,
            monomials,
        })
    }

    pub fn scaled(&self, k: f64) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            monomials: self
                .monomials
                .iter()
                .map(|m| Monomial {
                    coeff: m.coeff * k,
                    exponents: m.exponents.clone(),
                })
                .collect(),
        }
    }

    /// Expand `1/2 u'Au + b'u + c` into monomials.
    pub fn from_quadratic(q: &QuadraticCost) -> Polynomial {
        let m = q.dim();
        let mut monomials = Vec::new();
        for i in 0..m {
            for j in i..m {
                let coeff = if i == j { 0.5 * q.a[(i, i)] } else { q.a[(i, j)] };
                if coeff != 0.0 {
                    let mut e = vec![0; m];
                    e[i] += 1;
                    e[j] += 1;
                    monomials.push(Monomial { coeff, exponents: e });
                }
            }
        }
        for i in 0..m {
            if q.b[i] != 0.0 {
                let mut e = vec![0; m];
                e[i] = 1;
                monomials.push(Monomial {
                    coeff: q.b[i],
                    exponents: e,
                });
            }
        }
        if q.c != 0.0 {
            monomials.push(Monomial {
                coeff: q.c,
                exponents: vec![0; m],
            });
        }
        Polynomial { nvars: m, monomials }
    }
}

/// `f(u) = 1/2 u'Au + b'u + c` with `A` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticCost {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: f64,
}

impl QuadraticCost {
    /// Rejects any `A` that is not exactly symmetric, naming the first offending entry.
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: f64) -> Result<Self> {
        let m = b.len();
        if a.nrows() != m || a.ncols() != m {
            return Err(Error::InvalidGame(format!(
                "quadratic A is {}x{}, expected {m}x{m}",
                a.nrows(),
                a.ncols()
            )));
        }
        if a.iter().chain(b.iter()).any(|x| !x.is_finite()) || !c.is_finite() {
            return Err(Error::InvalidGame(
                "quadratic cost has non-finite coefficients".into(),
            ));
        }
        for i in 0..m {
            for j in (i + 1)..m {
                if a[(i, j)] != a[(j, i)] {
                    return Err(Error::NonSymmetric {
                        name: "A".into(),
                        row: i,
                        col: j,
                        upper: a[(i, j)],
                        lower: a[(j, i)],
                    });
                }
            }
        }
        Ok(Self { a, b, c })
    }

    pub fn from_rows(a: &[Vec<f64>], b: &[f64], c: f64) -> Result<Self> {
        let m = b.len();
        if a.len() != m || a.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidGame(format!(
                "quadratic A must be {m}x{m} to match b"
            )));
        }
        let mat = DMatrix::from_fn(m, m, |i, j| a[i][j]);
        Self::new(mat, DVector::from_column_slice(b), c)
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn eval<T: Scalar>(&self, u: &[T]) -> T {
        let m = self.dim();
        let mut acc = T::constant(self.c);
        for i in 0..m {
            let mut row = T::constant(0.0);
            for j in 0..m {
                let aij = self.a[(i, j)];
                if aij != 0.0 {
                    row = row + u[j].scale(aij);
                }
            }
            acc = acc + (u[i] * row).scale(0.5) + u[i].scale(self.b[i]);
        }
        acc
    }

    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let m = self.dim();
        (0..m)
            .map(|i| {
                let mut g = self.b[i];
                for j in 0..m {
                    g += self.a[(i, j)] * u[j];
                }
                g
            })
            .collect()
    }
}

/// A user-supplied cost, optionally with derivative providers.
///
/// Only `value` is required. Implementations must be pure.
pub trait CostFunction: Send + Sync {
    fn value(&self, u: &[f64]) -> f64;

    /// Full gradient with respect to all joint coordinates.
    fn gradient(&self, _u: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Full Hessian with respect to all joint coordinates.
    fn hessian(&self, _u: &[f64]) -> Option<DMatrix<f64>> {
        None
    }

    fn value_dual(&self, _u: &[Dual]) -> Option<Dual> {
        None
    }

    fn value_hyper(&self, _u: &[HyperDual]) -> Option<HyperDual> {
        None
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type HessFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;

/// Closure-backed [`CostFunction`].
pub struct FnCost {
    value: Box<ValueFn>,
    gradient: Option<Box<GradFn>>,
    hessian: Option<Box<HessFn>>,
}

impl FnCost {
    pub fn new(value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            value: Box::new(value),
            gradient: None,
            hessian: None,
        }
    }

    pub fn with_gradient(
        mut self,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Box::new(gradient));
        self
    }

    pub fn with_hessian(
        mut self,
        hessian: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        self.hessian = Some(Box::new(hessian));
        self
    }
}

impl CostFunction for FnCost {
    fn value(&self, u: &[f64]) -> f64 {
        (self.value)(u)
    }

    fn gradient(&self, u: &[f64]) -> Option<Vec<f64>> {
        self.gradient.as_ref().map(|g| g(u))
    }

    fn hessian(&self, u: &[f64]) -> Option<DMatrix<f64>> {
        self.hessian.as_ref().map(|h| h(u))
    }
}

/// A player's cost function.
#[derive(Clone)]
pub enum Cost {
    Polynomial(Polynomial),
    Quadratic(QuadraticCost),
    /// `sum_k w_k * cost_k`; perturbed games `f + s * zeta` are built this way.
    Combination(Vec<(f64, Cost)>),
    Custom(Arc<dyn CostFunction>),
}

impl fmt::Debug for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Polynomial(p) => f.debug_tuple("Polynomial").field(p).finish(),
            Cost::Quadratic(q) => f.debug_tuple("Quadratic").field(q).finish(),
            Cost::Combination(terms) => f.debug_tuple("Combination").field(terms).finish(),
            Cost::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Cost {
    pub fn custom(c: impl CostFunction + 'static) -> Self {
        Cost::Custom(Arc::new(c))
    }

    pub fn from_fn(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Cost::custom(FnCost::new(f))
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        match self {
            Cost::Polynomial(p) => p.value(u),
            Cost::Quadratic(q) => q.eval(u),
            Cost::Combination(terms) => terms.iter().map(|(w, c)| w * c.value(u)).sum(),
            Cost::Custom(c) => c.value(u),
        }
    }

    pub fn value_dual(&self, u: &[Dual]) -> Option<Dual> {
        match self {
            Cost::Polynomial(p) => Some(p.eval(u)),
            Cost::Quadratic(q) => Some(q.eval(u)),
            Cost::Combination(terms) => terms.iter().try_fold(Dual::constant(0.0), |acc, (w, c)| {
                c.value_dual(u).map(|v| acc + v.scale(*w))
            }),
            Cost::Custom(c) => c.value_dual(u),
        }
    }

    pub fn value_hyper(&self, u: &[HyperDual]) -> Option<HyperDual> {
        match self {
            Cost::Polynomial(p) => Some(p.eval(u)),
            Cost::Quadratic(q) => Some(q.eval(u)),
            Cost::Combination(terms) => terms
                .iter()
                .try_fold(HyperDual::constant(0.0), |acc, (w, c)| {
                    c.value_hyper(u).map(|v| acc + v.scale(*w))
                }),
            Cost::Custom(c) => c.value_hyper(u),
        }
    }

    pub fn analytic_gradient(&self, u: &[f64]) -> Option<Vec<f64>> {
        match self {
            Cost::Polynomial(p) => Some(p.gradient(u)),
            Cost::Quadratic(q) => Some(q.gradient(u)),
            Cost::Combination(terms) => {
                let mut acc = vec![0.0; u.len()];
                for (w, c) in terms {
                    let g = c.analytic_gradient(u)?;
                    acc.iter_mut().zip(g).for_each(|(a, gk)| *a += w * gk);
                }
                Some(acc)
            }
            Cost::Custom(c) => c.gradient(u),
        }
    }

    pub fn analytic_hessian(&self, u: &[f64]) -> Option<DMatrix<f64>> {
        match self {
            Cost::Polynomial(p) => Some(p.hessian(u)),
            Cost::Quadratic(q) => Some(q.a().clone()),
            Cost::Combination(terms) => {
                let mut acc = DMatrix::zeros(u.len(), u.len());
                for (w, c) in terms {
                    acc += c.analytic_hessian(u)? * *w;
                }
                Some(acc)
            }
            Cost::Custom(c) => c.hessian(u),
        }
    }

    /// `None` if the cost was not built for a joint vector of known length.
    pub(crate) fn declared_dim(&self) -> Option<usize> {
        match self {
            Cost::Polynomial(p) => Some(p.nvars()),
            Cost::Quadratic(q) => Some(q.dim()),
            Cost::Combination(terms) => {
                let dims: Vec<usize> = terms.iter().filter_map(|(_, c)| c.declared_dim()).collect();
                dims.first().copied()
            }
            Cost::Custom(_) => None,
        }
    }

    /// `self + s * other`.
    pub fn perturbed_by(&self, other: &Cost, s: f64) -> Cost {
        if s == 0.0 {
            return self.clone();
        }
        Cost::Combination(vec![(1.0, self.clone()), (s, other.clone())])
    }
}
