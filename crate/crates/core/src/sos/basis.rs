use crate::polyalg::{symmetrize, Monomial, Polynomial, SymmetryGroup};
use std::collections::BTreeMap;

/// All monomials in `n` variables with `min_deg <= degree <= max_deg`, in
/// graded-lex order.
pub fn monomials_up_to(n: usize, min_deg: usize, max_deg: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = vec![0u16; n];
    fn rec(out: &mut Vec<Monomial>, exps: &mut Vec<u16>, var: usize, remaining: usize) {
        if var + 1 == exps.len() {
            exps[var] = remaining as u16;
            out.push(Monomial::new(exps.clone()));
            return;
        }
        for e in 0..=remaining {
            exps[var] = e as u16;
            rec(out, exps, var + 1, remaining - e);
        }
        exps[var] = 0;
    }
    for d in min_deg..=max_deg {
        rec(&mut out, &mut exps, 0, d);
    }
    out.sort();
    out
}

/// Group-invariant polynomial basis spanned by symmetrized monomials of
/// degree `min_deg..=max_deg`, deduplicated by leading monomial and
/// normalized to unit leading coefficient.
pub fn invariant_basis(
    n: usize,
    min_deg: usize,
    max_deg: usize,
    group: &SymmetryGroup,
) -> Vec<Polynomial> {
    let mut by_lead: BTreeMap<Monomial, Polynomial> = BTreeMap::new();
    for m in monomials_up_to(n, min_deg, max_deg) {
        let mut p = Polynomial::zero(n);
        p.add_term(m, 1.0);
        let s = symmetrize(&p, group);
        if s.is_zero() {
            continue;
        }
        let lead = s.terms().map(|(m, _)| m.clone()).max().unwrap();
        if by_lead.contains_key(&lead) {
            continue;
        }
        let lead_coeff = s.coefficient(&lead);
        by_lead.insert(lead, s.scale(1.0 / lead_coeff));
    }
    by_lead.into_values().collect()
}

/// Options for Gram-basis construction.
#[derive(Clone, Copy, Debug, Default)]
pub struct GramBasisOptions {
    /// Restrict the degree-truncated basis using total-degree and
    /// per-variable bounds implied by the achievable support (a cheap sound
    /// relaxation of Newton-polytope pruning).
    pub prune: bool,
}

/// Degree-truncated Gram basis for an SOS multiplier of half-degree
/// `half_deg`, optionally pruned against the achievable support.
pub fn gram_basis(
    n: usize,
    half_deg: usize,
    support: &[Monomial],
    options: GramBasisOptions,
) -> Vec<Monomial> {
    let all = monomials_up_to(n, 0, half_deg);
    if !options.prune || support.is_empty() {
        return all;
    }
    let min_total = support.iter().map(|m| m.degree()).min().unwrap_or(0);
    let mut var_max = vec![0u16; n];
    for m in support {
        for i in 0..n {
            var_max[i] = var_max[i].max(m.exponent(i));
        }
    }
    all.into_iter()
        .filter(|m| {
            if 2 * m.degree() < min_total {
                return false;
            }
            (0..n).all(|i| 2 * m.exponent(i) <= var_max[i])
        })
        .collect()
}

/// Partition a Gram basis into sign classes under a diagonal group: two
/// basis monomials interact only when they transform with the same
/// character, so the Gram matrix is block-diagonal across classes.
pub fn parity_classes(
    basis: &[Monomial],
    group: &SymmetryGroup,
) -> Vec<(Vec<i8>, Vec<Monomial>)> {
    let mut classes: BTreeMap<Vec<i8>, Vec<Monomial>> = BTreeMap::new();
    for m in basis {
        classes
            .entry(group.monomial_signature(m))
            .or_default()
            .push(m.clone());
    }
    classes.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::LinearSymmetry;

    #[test]
    fn counts_binomial() {
        // C(2+2, 2) = 6 monomials of degree <= 2 in two variables
        assert_eq!(monomials_up_to(2, 0, 2).len(), 6);
        // C(9+3, 3) = 220 of degree <= 3 in nine variables
        assert_eq!(monomials_up_to(9, 0, 3).len(), 220);
    }

    #[test]
    fn invariant_basis_under_negation() {
        let g = SymmetryGroup::generate(&[LinearSymmetry::negation(2)]).unwrap();
        let basis = invariant_basis(2, 1, 2, &g);
        // degree-1 monomials vanish; x^2, xy, y^2 survive
        assert_eq!(basis.len(), 3);
        assert!(basis.iter().all(|p| p.degree() == Some(2)));
    }

    #[test]
    fn parity_split_1d() {
        let g = SymmetryGroup::generate(&[LinearSymmetry::negation(1)]).unwrap();
        let basis = monomials_up_to(1, 0, 2); // {1, x, x^2}
        let classes = parity_classes(&basis, &g);
        assert_eq!(classes.len(), 2);
        let sizes: Vec<usize> = classes.iter().map(|(_, c)| c.len()).collect();
        assert!(sizes.contains(&2) && sizes.contains(&1));
    }

    #[test]
    fn pruning_respects_support_box() {
        // support {x^2 y^2}: basis must satisfy 2*e <= (2,2), degree >= 2
        let support = vec![Monomial::new(vec![2, 2])];
        let basis = gram_basis(2, 2, &support, GramBasisOptions { prune: true });
        assert_eq!(basis, vec![Monomial::new(vec![1, 1])]);
    }
}
