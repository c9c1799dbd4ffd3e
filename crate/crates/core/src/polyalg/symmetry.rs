use super::{Monomial, PolyError, Polynomial};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// An invertible linear map `a -> T a` restricted to signed permutations:
/// `(T a)_i = sign_i * a_{perm_i}` with `perm` a permutation of the
/// coordinates and `sign_i` in `{+1, -1}`.
///
/// Signed permutations are closed under composition without roundoff, which
/// keeps symmetry-group closure and polynomial symmetrization exact. The
/// shear-flow sign symmetries, the Lorenz `(x, y) -> (-x, -y)` symmetry and
/// the van der Pol point symmetry are all of this form.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSymmetry {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl LinearSymmetry {
    pub fn identity(n: usize) -> Self {
        LinearSymmetry {
            perm: (0..n).collect(),
            signs: vec![1; n],
        }
    }

    /// Pure sign flip: `(T a)_i = signs_i * a_i`.
    pub fn signs(signs: Vec<i8>) -> Result<Self, PolyError> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(PolyError::NotSignedPermutation);
        }
        let n = signs.len();
        Ok(LinearSymmetry {
            perm: (0..n).collect(),
            signs,
        })
    }

    pub fn negation(n: usize) -> Self {
        LinearSymmetry {
            perm: (0..n).collect(),
            signs: vec![-1; n],
        }
    }

    /// General signed permutation: `(T a)_i = signs_i * a_{perm_i}`.
    pub fn signed_permutation(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self, PolyError> {
        let n = perm.len();
        if signs.len() != n || signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(PolyError::NotSignedPermutation);
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(PolyError::NotSignedPermutation);
            }
            seen[p] = true;
        }
        Ok(LinearSymmetry { perm, signs })
    }

    /// Build from a dense row-major `n x n` matrix; rejects anything that is
    /// not a signed permutation (entries in {-1, 0, +1}, one nonzero per row
    /// and column).
    pub fn from_matrix(n: usize, matrix: &[f64]) -> Result<Self, PolyError> {
        if matrix.len() != n * n {
            return Err(PolyError::NotSignedPermutation);
        }
        let mut perm = vec![0usize; n];
        let mut signs = vec![0i8; n];
        for i in 0..n {
            let mut found = false;
            for j in 0..n {
                let v = matrix[i * n + j];
                if v == 0.0 {
                    continue;
                }
                if (v - 1.0).abs() > 1e-12 && (v + 1.0).abs() > 1e-12 || found {
                    return Err(PolyError::NotSignedPermutation);
                }
                perm[i] = j;
                signs[i] = if v > 0.0 { 1 } else { -1 };
                found = true;
            }
            if !found {
                return Err(PolyError::NotSignedPermutation);
            }
        }
        Self::signed_permutation(perm, signs)
    }

    pub fn dimension(&self) -> usize {
        self.perm.len()
    }

    pub fn is_identity(&self) -> bool {
        self.signs.iter().all(|&s| s == 1) && self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// True when the permutation part is trivial (pure sign flips).
    pub fn is_diagonal(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Dense row-major matrix representation.
    pub fn matrix(&self) -> Vec<f64> {
        let n = self.dimension();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + self.perm[i]] = self.signs[i] as f64;
        }
        m
    }

    /// Composition `self ∘ other`: the map `a -> self(other(a))`.
    pub fn compose(&self, other: &LinearSymmetry) -> LinearSymmetry {
        let n = self.dimension();
        debug_assert_eq!(n, other.dimension());
        let mut perm = vec![0usize; n];
        let mut signs = vec![1i8; n];
        for i in 0..n {
            // (self∘other a)_i = s_i * (other a)_{p_i} = s_i * t_{p_i} * a_{q_{p_i}}
            perm[i] = other.perm[self.perm[i]];
            signs[i] = self.signs[i] * other.signs[self.perm[i]];
        }
        LinearSymmetry { perm, signs }
    }

    /// Apply to a point: `T a`.
    pub fn apply(&self, a: &[f64]) -> Vec<f64> {
        self.perm
            .iter()
            .zip(&self.signs)
            .map(|(&p, &s)| s as f64 * a[p])
            .collect()
    }

    /// Smallest `k >= 1` with `T^k = I`. Always finite for signed
    /// permutations (bounded by twice the lcm of the cycle lengths).
    pub fn order(&self) -> usize {
        let mut t = self.clone();
        let mut k = 1;
        while !t.is_identity() {
            t = t.compose(self);
            k += 1;
        }
        k
    }

    /// Component `i` of the pushforward `T f`: `sign_i * f_{perm_i}` for a
    /// signed permutation.
    pub fn image_component(&self, f: &[Polynomial], i: usize) -> Polynomial {
        f[self.perm[i]].scale(self.signs[i] as f64)
    }

    /// Image of a monomial under precomposition: `m(T a) = sign * m'(a)`.
    pub fn apply_monomial(&self, m: &Monomial) -> (Monomial, f64) {
        let n = self.dimension();
        let mut exps = vec![0u16; n];
        let mut sign = 1.0;
        for i in 0..n {
            let e = m.exponent(i);
            if e == 0 {
                continue;
            }
            exps[self.perm[i]] += e;
            if self.signs[i] < 0 && e % 2 == 1 {
                sign = -sign;
            }
        }
        (Monomial::new(exps), sign)
    }
}

impl fmt::Debug for LinearSymmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearSymmetry(")?;
        for i in 0..self.dimension() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(
                f,
                "{}a{}",
                if self.signs[i] < 0 { "-" } else { "" },
                self.perm[i] + 1
            )?;
        }
        write!(f, ")")
    }
}

/// A finite group of [`LinearSymmetry`] elements, closed under composition
/// and containing the identity (both verified on construction).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryGroup {
    elements: Vec<LinearSymmetry>,
}

const MAX_GROUP_ORDER: usize = 4096;

impl SymmetryGroup {
    pub fn trivial(n: usize) -> Self {
        SymmetryGroup {
            elements: vec![LinearSymmetry::identity(n)],
        }
    }

    /// Close a generating set under composition.
    pub fn generate(generators: &[LinearSymmetry]) -> Result<Self, PolyError> {
        assert!(!generators.is_empty(), "need at least one generator");
        let n = generators[0].dimension();
        let key = |t: &LinearSymmetry| (t.perm.clone(), t.signs.clone());
        let mut seen = BTreeSet::new();
        let mut elements = vec![LinearSymmetry::identity(n)];
        seen.insert(key(&elements[0]));
        let mut frontier = elements.clone();
        while let Some(t) = frontier.pop() {
            for g in generators {
                if g.dimension() != n {
                    return Err(PolyError::DimensionMismatch {
                        expected: n,
                        got: g.dimension(),
                    });
                }
                let u = g.compose(&t);
                if seen.insert(key(&u)) {
                    if elements.len() >= MAX_GROUP_ORDER {
                        return Err(PolyError::GroupTooLarge(MAX_GROUP_ORDER));
                    }
                    elements.push(u.clone());
                    frontier.push(u);
                }
            }
        }
        // Deterministic element order: identity first, then by (perm, signs).
        elements.sort_by_key(|t| (usize::from(!t.is_identity()), key(t)));
        Ok(SymmetryGroup { elements })
    }

    /// Validate that `elements` already form a group.
    pub fn from_elements(elements: Vec<LinearSymmetry>) -> Result<Self, PolyError> {
        let g = Self::generate(&elements)?;
        if g.elements.len() != elements.len() {
            return Err(PolyError::NotAGroup);
        }
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dimension(&self) -> usize {
        self.elements[0].dimension()
    }

    pub fn elements(&self) -> &[LinearSymmetry] {
        &self.elements
    }

    /// True when every element is a pure sign flip (acts diagonally on
    /// monomials), which is what the Gram parity-block reduction requires.
    pub fn is_diagonal(&self) -> bool {
        self.elements.iter().all(|t| t.is_diagonal())
    }

    /// Signature of a monomial under each group element: the character
    /// vector `(sign of m∘T)` with entries in {-1, +1}. Only meaningful for
    /// diagonal groups, where `m∘T = ±m`.
    pub fn monomial_signature(&self, m: &Monomial) -> Vec<i8> {
        self.elements
            .iter()
            .map(|t| {
                let (_, s) = t.apply_monomial(m);
                if s >= 0.0 {
                    1
                } else {
                    -1
                }
            })
            .collect()
    }

    /// True when `p(T a) = p(a)` for every element, to coefficient
    /// tolerance `tol` relative to the largest coefficient.
    pub fn leaves_invariant(&self, p: &Polynomial, tol: f64) -> bool {
        let scale = p.max_abs_coefficient().max(1.0);
        self.elements.iter().all(|t| {
            let q = compose_linear(p, t);
            (&q - p).max_abs_coefficient() <= tol * scale
        })
    }
}

/// The polynomial `a -> p(T a)`; exact for signed permutations.
pub fn compose_linear(p: &Polynomial, t: &LinearSymmetry) -> Polynomial {
    assert_eq!(
        p.dimension(),
        t.dimension(),
        "polynomial/symmetry dimension mismatch"
    );
    let mut out = Polynomial::zero(p.dimension());
    for (m, c) in p.terms() {
        let (m2, s) = t.apply_monomial(m);
        out.add_term(m2, c * s);
    }
    out
}

/// Group average `(1/K) sum_k p(T^k a)` over all elements of `g`.
///
/// The result is invariant under every element of the group; invariant
/// inputs are returned unchanged and the operator is idempotent.
pub fn symmetrize(p: &Polynomial, g: &SymmetryGroup) -> Polynomial {
    let k = g.order() as f64;
    let mut out = Polynomial::zero(p.dimension());
    for t in g.elements() {
        out = &out + &compose_linear(p, t);
    }
    out.scale(1.0 / k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_negation() {
        let x = Polynomial::variable(2, 0);
        let t = LinearSymmetry::negation(2);
        assert_eq!(compose_linear(&x, &t), x.scale(-1.0));
        assert_eq!(t.order(), 2);
    }

    #[test]
    fn sign_squares_away() {
        // p = a4^2 under the shear-flow T1 action (a4 -> -a4) is unchanged.
        let mut signs = vec![1i8; 9];
        for i in 3..8 {
            signs[i] = -1;
        }
        let t1 = LinearSymmetry::signs(signs).unwrap();
        let a4 = Polynomial::variable(9, 3);
        let p = &a4 * &a4;
        assert_eq!(compose_linear(&p, &t1), p);
    }

    #[test]
    fn coordinate_swap_fixes_symmetric_poly() {
        let t = LinearSymmetry::signed_permutation(vec![1, 0], vec![1, 1]).unwrap();
        let x = Polynomial::variable(2, 0);
        let y = Polynomial::variable(2, 1);
        let p = &x + &y;
        assert_eq!(compose_linear(&p, &t), p);
        assert_eq!(compose_linear(&x, &t), y);
    }

    #[test]
    fn symmetrize_parity() {
        let g = SymmetryGroup::generate(&[LinearSymmetry::negation(1)]).unwrap();
        assert_eq!(g.order(), 2);
        let x = Polynomial::variable(1, 0);
        let x2 = &x * &x;
        assert!(symmetrize(&x, &g).is_zero());
        assert_eq!(symmetrize(&x2, &g), x2);
        let mixed = &(&x * &(&x * &x)) + &x2; // x^3 + x^2
        assert_eq!(symmetrize(&mixed, &g), x2);
    }

    #[test]
    fn symmetrize_is_idempotent() {
        let g = SymmetryGroup::generate(&[
            LinearSymmetry::signed_permutation(vec![1, 0], vec![1, -1]).unwrap()
        ])
        .unwrap();
        let x = Polynomial::variable(2, 0);
        let y = Polynomial::variable(2, 1);
        let p = &(&x * &(&x + &y)) + &y.scale(0.75);
        let s1 = symmetrize(&p, &g);
        let s2 = symmetrize(&s1, &g);
        assert!((&s1 - &s2).max_abs_coefficient() <= 1e-14);
        assert!(g.leaves_invariant(&s1, 1e-14));
    }

    #[test]
    fn four_group_closure() {
        let mut s1 = vec![1i8; 9];
        for i in 3..8 {
            s1[i] = -1;
        }
        let mut s2 = vec![1i8; 9];
        for i in [1, 2, 5, 6, 7] {
            s2[i] = -1;
        }
        let t1 = LinearSymmetry::signs(s1).unwrap();
        let t2 = LinearSymmetry::signs(s2).unwrap();
        let g = SymmetryGroup::generate(&[t1, t2]).unwrap();
        assert_eq!(g.order(), 4);
        assert!(g.is_diagonal());
        assert!(g.elements()[0].is_identity());
    }

    #[test]
    fn rejects_non_signed_permutation() {
        let m = vec![1.0, 1.0, 0.0, 1.0];
        assert!(LinearSymmetry::from_matrix(2, &m).is_err());
        let m = vec![0.5, 0.0, 0.0, 1.0];
        assert!(LinearSymmetry::from_matrix(2, &m).is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let t = LinearSymmetry::signed_permutation(vec![2, 0, 1], vec![-1, 1, -1]).unwrap();
        let m = t.matrix();
        let t2 = LinearSymmetry::from_matrix(3, &m).unwrap();
        assert_eq!(t, t2);
        // order of a 3-cycle with signs divides 6
        assert!([2, 3, 6].contains(&t.order()));
    }
}
