use super::{Monomial, PolyError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Coefficients with magnitude below this are pruned on construction.
pub const PRUNE_EPS: f64 = 1e-300;

/// A sparse multivariate polynomial with `f64` coefficients.
///
/// Terms are stored in a map keyed by [`Monomial`] in graded-lex order, with
/// no zero coefficients; the zero polynomial has an empty map. The degree of
/// the zero polynomial is `None` (standing in for minus infinity).
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    dimension: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero(dimension: usize) -> Self {
        Polynomial {
            dimension,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dimension: usize, c: f64) -> Self {
        let mut p = Polynomial::zero(dimension);
        p.add_term(Monomial::constant(dimension), c);
        p
    }

    /// The coordinate polynomial `a_{i+1}`.
    pub fn variable(dimension: usize, i: usize) -> Self {
        assert!(i < dimension);
        let mut p = Polynomial::zero(dimension);
        p.add_term(Monomial::variable(dimension, i), 1.0);
        p
    }

    pub fn from_terms<I>(dimension: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, f64)>,
    {
        let mut p = Polynomial::zero(dimension);
        for (m, c) in terms {
            assert_eq!(m.dimension(), dimension, "monomial dimension mismatch");
            p.add_term(m, c);
        }
        p
    }

    /// `||a||^2` in `n` variables.
    pub fn norm_squared(dimension: usize) -> Self {
        let mut p = Polynomial::zero(dimension);
        for i in 0..dimension {
            let mut exps = vec![0u16; dimension];
            exps[i] = 2;
            p.add_term(Monomial::new(exps), 1.0);
        }
        p
    }

    /// Accumulate `c` onto the coefficient of `m`, pruning if the result is
    /// negligible.
    pub fn add_term(&mut self, m: Monomial, c: f64) {
        use std::collections::btree_map::Entry;
        if c == 0.0 {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                let v = *e.get() + c;
                if v.abs() < PRUNE_EPS {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                if c.abs() >= PRUNE_EPS {
                    e.insert(c);
                }
            }
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    /// Largest absolute coefficient (0 for the zero polynomial).
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        let mut p = Polynomial::zero(self.dimension);
        for (m, c) in self.terms() {
            p.add_term(m.clone(), c * s);
        }
        p
    }

    /// Partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Polynomial {
        let mut p = Polynomial::zero(self.dimension);
        for (m, c) in self.terms() {
            if let Some((dm, k)) = m.derivative(i) {
                p.add_term(dm, c * k);
            }
        }
        p
    }

    /// Gradient: one polynomial per variable.
    pub fn grad(&self) -> Vec<Polynomial> {
        (0..self.dimension).map(|i| self.partial(i)).collect()
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.dimension);
        let pows = PowerTable::new(self, point);
        self.eval_with(&pows)
    }

    /// Value and gradient at `point` in one pass over the terms.
    pub fn eval_grad(&self, point: &[f64]) -> (f64, Vec<f64>) {
        debug_assert_eq!(point.len(), self.dimension);
        let pows = PowerTable::new(self, point);
        let mut value = 0.0;
        let mut grad = vec![0.0; self.dimension];
        for (m, c) in self.terms() {
            value += c * pows.monomial(m);
            for i in 0..self.dimension {
                let e = m.exponent(i);
                if e > 0 {
                    // d/da_i of the monomial: e * a_i^(e-1) * rest
                    let mut g = c * e as f64 * pows.power(i, e - 1);
                    for j in 0..self.dimension {
                        if j != i {
                            g *= pows.power(j, m.exponent(j));
                        }
                    }
                    grad[i] += g;
                }
            }
        }
        (value, grad)
    }

    fn eval_with(&self, pows: &PowerTable) -> f64 {
        self.terms().map(|(m, c)| c * pows.monomial(m)).sum()
    }

    fn check_dim(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.dimension != other.dimension {
            return Err(PolyError::DimensionMismatch {
                expected: self.dimension,
                got: other.dimension,
            });
        }
        Ok(())
    }
}

/// Per-point table of variable powers, shared by value and gradient loops.
struct PowerTable {
    n: usize,
    max_exp: usize,
    pows: Vec<f64>,
}

impl PowerTable {
    fn new(p: &Polynomial, point: &[f64]) -> Self {
        let max_exp = p
            .terms
            .keys()
            .flat_map(|m| m.exponents().iter().copied())
            .max()
            .unwrap_or(0) as usize;
        let n = p.dimension;
        let mut pows = vec![1.0; n * (max_exp + 1)];
        for i in 0..n {
            for e in 1..=max_exp {
                pows[i * (max_exp + 1) + e] = pows[i * (max_exp + 1) + e - 1] * point[i];
            }
        }
        PowerTable { n, max_exp, pows }
    }

    #[inline]
    fn power(&self, var: usize, exp: u16) -> f64 {
        self.pows[var * (self.max_exp + 1) + exp as usize]
    }

    fn monomial(&self, m: &Monomial) -> f64 {
        let mut v = 1.0;
        for i in 0..self.n {
            let e = m.exponent(i);
            if e > 0 {
                v *= self.power(i, e);
            }
        }
        v
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.check_dim(rhs).expect("polynomial dimension mismatch");
        let mut p = self.clone();
        for (m, c) in rhs.terms() {
            p.add_term(m.clone(), c);
        }
        p
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.check_dim(rhs).expect("polynomial dimension mismatch");
        let mut p = self.clone();
        for (m, c) in rhs.terms() {
            p.add_term(m.clone(), -c);
        }
        p
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.check_dim(rhs).expect("polynomial dimension mismatch");
        let mut p = Polynomial::zero(self.dimension);
        for (ma, ca) in self.terms() {
            for (mb, cb) in rhs.terms() {
                p.add_term(ma.mul(mb), ca * cb);
            }
        }
        p
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

/// The Lie derivative `f · grad(V)`, the time derivative of `V` along
/// trajectories of `da/dt = f(a)`.
pub fn lie_derivative(f: &[Polynomial], v: &Polynomial) -> Result<Polynomial, PolyError> {
    if f.len() != v.dimension() {
        return Err(PolyError::DimensionMismatch {
            expected: v.dimension(),
            got: f.len(),
        });
    }
    let mut out = Polynomial::zero(v.dimension());
    for (i, fi) in f.iter().enumerate() {
        if fi.dimension() != v.dimension() {
            return Err(PolyError::DimensionMismatch {
                expected: v.dimension(),
                got: fi.dimension(),
            });
        }
        out = &out + &(fi * &v.partial(i));
    }
    Ok(out)
}

/// Evaluate `p` at a batch of points, optionally with gradients.
pub fn eval_batch(
    p: &Polynomial,
    points: &[Vec<f64>],
    with_gradient: bool,
) -> Result<Vec<(f64, Option<Vec<f64>>)>, PolyError> {
    let mut out = Vec::with_capacity(points.len());
    for pt in points {
        if pt.len() != p.dimension() {
            return Err(PolyError::DimensionMismatch {
                expected: p.dimension(),
                got: pt.len(),
            });
        }
        if let Some(i) = pt.iter().position(|x| !x.is_finite()) {
            return Err(PolyError::NonFiniteInput(i));
        }
        if with_gradient {
            let (v, g) = p.eval_grad(pt);
            out.push((v, Some(g)));
        } else {
            out.push((p.eval(pt), None));
        }
    }
    Ok(out)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Highest-degree terms first.
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let (sign, mag) = if *c < 0.0 { ("-", -c) } else { ("+", *c) };
            if k == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            if m.is_constant() {
                write!(f, "{}", mag)?;
            } else if mag == 1.0 {
                write!(f, "{}", m)?;
            } else {
                write!(f, "{}*{}", mag, m)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
