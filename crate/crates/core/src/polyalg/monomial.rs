use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// A monomial in `n` variables, stored as its exponent tuple.
///
/// The ambient dimension is the length of the tuple. Total degree is the sum
/// of the exponents. Monomials order graded-lexicographically: first by
/// total degree, ties broken by the exponent tuple with `a1` most
/// significant.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    exps: Vec<u16>,
}

impl Monomial {
    pub fn new(exps: Vec<u16>) -> Self {
        Monomial { exps }
    }

    pub fn constant(n: usize) -> Self {
        Monomial { exps: vec![0; n] }
    }

    /// The monomial `a_{i+1}` (unit exponent on variable index `i`).
    pub fn variable(n: usize, i: usize) -> Self {
        let mut exps = vec![0; n];
        exps[i] = 1;
        Monomial { exps }
    }

    pub fn dimension(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> usize {
        self.exps.iter().map(|&e| e as usize).sum()
    }

    pub fn exponent(&self, i: usize) -> u16 {
        self.exps[i]
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    pub fn is_constant(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Product of two monomials (exponent-wise sum).
    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Partial derivative with respect to variable `i`: returns the
    /// downshifted monomial and the integer factor, or `None` when the
    /// exponent is zero.
    pub fn derivative(&self, i: usize) -> Option<(Monomial, f64)> {
        let e = self.exps[i];
        if e == 0 {
            return None;
        }
        let mut exps = self.exps.clone();
        exps[i] = e - 1;
        Some((Monomial { exps }, e as f64))
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        let mut v = 1.0;
        for (x, &e) in point.iter().zip(&self.exps) {
            if e > 0 {
                v *= x.powi(e as i32);
            }
        }
        v
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "a{}", i + 1)?;
            } else {
                write!(f, "a{}^{}", i + 1, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let c = Monomial::constant(2);
        let x = Monomial::new(vec![1, 0]);
        let y = Monomial::new(vec![0, 1]);
        let x2 = Monomial::new(vec![2, 0]);
        let xy = Monomial::new(vec![1, 1]);
        let mut v = vec![x2.clone(), y.clone(), xy.clone(), c.clone(), x.clone()];
        v.sort();
        assert_eq!(v, vec![c, y, x, xy, x2]);
    }

    #[test]
    fn derivative_and_degree() {
        let m = Monomial::new(vec![2, 1]);
        assert_eq!(m.degree(), 3);
        let (d, k) = m.derivative(0).unwrap();
        assert_eq!(k, 2.0);
        assert_eq!(d, Monomial::new(vec![1, 1]));
        assert!(Monomial::new(vec![0, 1]).derivative(0).is_none());
    }

    #[test]
    fn display() {
        assert_eq!(Monomial::new(vec![2, 0, 1]).to_string(), "a1^2*a3");
        assert_eq!(Monomial::constant(3).to_string(), "1");
    }
}
