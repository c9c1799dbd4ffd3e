use super::basis::{gram_basis, invariant_basis, monomials_up_to, parity_classes, GramBasisOptions};
use super::{AnsatzMode, SemialgebraicSet, SosError, VAnsatz};
use crate::polyalg::{
    compose_linear, lie_derivative, Monomial, Polynomial, SymmetryGroup,
};
use crate::sdp::{
    solve_sdp, MatEntry, Objective, ProblemMetadata, Row, SdpProblem, SolveStatus, SolverSettings,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// `r(d) = max(deg Phi, deg f + d - 1)`: the degree of the matched
/// polynomial identity when `V` has degree `d`. Callers round up to the
/// next even integer for the Gram half-degree.
pub fn degree_r(deg_phi: usize, deg_f: usize, d: usize) -> usize {
    deg_phi.max(deg_f + d - 1)
}

/// One Gram (PSD) block: which multiplier it belongs to, which SDP block
/// index carries it, and its monomial basis. `multiplier` 0 is the plain
/// SOS term; `multiplier` k >= 1 pairs with constraint `g_k` of the set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramForm {
    pub multiplier: usize,
    pub sdp_block: usize,
    pub basis: Vec<Monomial>,
    /// Character signature of the block under a diagonal symmetry group.
    pub signature: Option<Vec<i8>>,
}

/// Coefficient scalings applied before SDP assembly; certificates are
/// mapped back to the original frame on extraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub phi: f64,
    pub f: f64,
    pub constraints: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SosProblemKind {
    /// minimize lambda with `lambda - Phi - f·grad(V)` in the cone.
    Bound,
    /// minimize t with `(C - W - rate*f·grad(W)) + t` in the cone;
    /// feasible absorbing check iff the optimal t is nonpositive.
    AbsorbingCheck { rate: f64, level: f64 },
}

/// Everything needed to reconstruct polynomials from SDP decision
/// variables: the compiled problem's semantic structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SosStructure {
    pub kind: SosProblemKind,
    pub dimension: usize,
    /// Original (unscaled) vector field.
    pub f: Vec<Polynomial>,
    /// Original (unscaled) target polynomial: `Phi` for bound problems, the
    /// absorbing-condition polynomial for checks.
    pub target: Polynomial,
    pub omega: Option<SemialgebraicSet>,
    pub group: Option<SymmetryGroup>,
    /// Basis polynomials for the free part of `V` (free variables 1..).
    pub v_basis: Vec<Polynomial>,
    pub fixed_tail: Option<Polynomial>,
    pub free_tail_coefficient: bool,
    pub grams: Vec<GramForm>,
    pub scaling: Scaling,
    pub ansatz_degree: usize,
}

/// A compiled SOS program: the conic data plus the semantic structure used
/// for symmetry reduction and certificate extraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompiledSosProblem {
    pub sdp: SdpProblem,
    pub structure: SosStructure,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CompileOptions {
    /// Use weighted SOS multipliers on the supplied semialgebraic set.
    pub weighted: bool,
    /// Prune Gram bases against the achievable support.
    pub prune_basis: bool,
}

fn scale_of(p: &Polynomial) -> f64 {
    let s = p.max_abs_coefficient();
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

fn scale_of_field(f: &[Polynomial]) -> f64 {
    let s = f.iter().map(Polynomial::max_abs_coefficient).fold(0.0, f64::max);
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

pub(crate) fn check_group_compatibility(
    f: &[Polynomial],
    invariants: &[(&str, &Polynomial)],
    group: &SymmetryGroup,
    tol: f64,
) -> Result<(), SosError> {
    let n = f.len();
    let f_scale = scale_of_field(f);
    for (idx, t) in group.elements().iter().enumerate() {
        if t.is_identity() {
            continue;
        }
        // f(T a) = T f(a), i.e. f_i(T a) = sign_i * f_{perm_i}(a).
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let lhs = compose_linear(&f[i], t);
            let rhs = t.image_component(f, i);
            worst = worst.max((&lhs - &rhs).max_abs_coefficient());
        }
        if worst > tol * f_scale {
            return Err(SosError::NotEquivariant {
                element: idx,
                residual: worst,
            });
        }
        for (what, p) in invariants {
            let res = (&compose_linear(p, t) - *p).max_abs_coefficient();
            if res > tol * scale_of(p) {
                return Err(SosError::NotInvariant {
                    what: (*what).to_string(),
                    element: idx,
                    residual: res,
                });
            }
        }
    }
    Ok(())
}

/// Compile `minimize lambda s.t. lambda - Phi - f·grad(V)` in the SOS cone
/// (or the weighted cone over `omega`) into a standard-form SDP.
///
/// Minimal-sign convention: to bound the minimal average, negate `Phi`
/// before calling and negate the resulting bound.
pub fn compile_bound_problem(
    f: &[Polynomial],
    phi: &Polynomial,
    ansatz: &VAnsatz,
    omega: Option<&SemialgebraicSet>,
    options: CompileOptions,
) -> Result<CompiledSosProblem, SosError> {
    let n = f.len();
    if phi.dimension() != n {
        return Err(SosError::Dimension {
            expected: n,
            got: phi.dimension(),
        });
    }
    if options.weighted && omega.is_none() {
        return Err(SosError::WeightedNeedsSet);
    }
    let omega = if options.weighted { omega } else { None };
    if let Some(set) = omega {
        if set.dimension() != n {
            return Err(SosError::Dimension {
                expected: n,
                got: set.dimension(),
            });
        }
    }
    let group = ansatz.symmetry_group.as_ref();
    if let Some(g) = group {
        let mut invs: Vec<(&str, &Polynomial)> = vec![("Phi", phi)];
        if let Some(set) = omega {
            for gi in set.constraints() {
                invs.push(("constraint", gi));
            }
        }
        if let Some(tail) = &ansatz.fixed_tail {
            invs.push(("tail", tail));
        }
        check_group_compatibility(f, &invs, g, 1e-10)?;
    }

    // Scaled data.
    let s_phi = scale_of(phi);
    let s_f = scale_of_field(f);
    let phi_s = phi.scale(1.0 / s_phi);
    let f_s: Vec<Polynomial> = f.iter().map(|fi| fi.scale(1.0 / s_f)).collect();
    let s_g: Vec<f64> = omega
        .map(|set| set.constraints().iter().map(scale_of).collect())
        .unwrap_or_default();

    // V basis.
    let mut v_basis: Vec<Polynomial> = match &ansatz.mode {
        AnsatzMode::FullDegree => monomials_up_to(n, 1, ansatz.degree)
            .into_iter()
            .map(|m| Polynomial::from_terms(n, [(m, 1.0)]))
            .collect(),
        AnsatzMode::InvariantDegree => {
            let g = group.expect("invariant ansatz requires a symmetry group");
            invariant_basis(n, 1, ansatz.degree, g)
        }
        AnsatzMode::CustomBasis(basis) => {
            for b in basis {
                if b.dimension() != n {
                    return Err(SosError::Dimension {
                        expected: n,
                        got: b.dimension(),
                    });
                }
                if let Some(g) = group {
                    if !g.leaves_invariant(b, 1e-10) {
                        return Err(SosError::NotInvariant {
                            what: format!("custom basis element {b}"),
                            element: 0,
                            residual: f64::NAN,
                        });
                    }
                }
            }
            basis.clone()
        }
    };
    if ansatz.free_tail_coefficient {
        if let Some(tail) = &ansatz.fixed_tail {
            v_basis.push(tail.clone());
        }
    }
    if v_basis.is_empty() {
        return Err(SosError::EmptyAnsatz);
    }

    // Degrees.
    let deg_f = f.iter().filter_map(Polynomial::degree).max().unwrap_or(0);
    let deg_phi = phi.degree().unwrap_or(0);
    let d_eff = v_basis
        .iter()
        .filter_map(Polynomial::degree)
        .max()
        .unwrap_or(ansatz.degree)
        .max(match (&ansatz.fixed_tail, ansatz.free_tail_coefficient) {
            (Some(t), false) => t.degree().unwrap_or(0),
            _ => 0,
        });
    let r = degree_r(deg_phi, deg_f, d_eff);

    // Lie derivatives of the basis against the scaled field.
    let lie_basis: Vec<Polynomial> = v_basis
        .iter()
        .map(|b| lie_derivative(&f_s, b))
        .collect::<Result<_, _>>()?;
    // Fixed-tail contribution enters the right-hand side with the exact
    // unit coefficient: -(1/s_phi) * f·grad(tail).
    let tail_rhs: Option<Polynomial> = match (&ansatz.fixed_tail, ansatz.free_tail_coefficient) {
        (Some(tail), false) => Some(lie_derivative(f, tail)?.scale(1.0 / s_phi)),
        _ => None,
    };

    // Achievable support (for pruning and coverage checks).
    let mut support: Vec<Monomial> = vec![Monomial::constant(n)];
    support.extend(phi_s.terms().map(|(m, _)| m.clone()));
    for l in &lie_basis {
        support.extend(l.terms().map(|(m, _)| m.clone()));
    }
    if let Some(t) = &tail_rhs {
        support.extend(t.terms().map(|(m, _)| m.clone()));
    }
    support.sort();
    support.dedup();

    let gram_opts = GramBasisOptions {
        prune: options.prune_basis,
    };
    let s_deg = omega.map(|s| s.max_constraint_degree()).unwrap_or(0);
    if omega.is_some() && r < s_deg {
        return Err(SosError::DegreeBookkeeping { r, s: s_deg });
    }

    let mut grams: Vec<GramForm> = Vec::new();
    let mut block_dims: Vec<usize> = Vec::new();
    let mut block_names: Vec<String> = Vec::new();
    let add_gram = |mult: usize,
                        half: usize,
                        grams: &mut Vec<GramForm>,
                        block_dims: &mut Vec<usize>,
                        block_names: &mut Vec<String>| {
        let base = gram_basis(n, half, &support, gram_opts);
        let name = if mult == 0 {
            "sigma0".to_string()
        } else {
            format!("sigma{mult}")
        };
        match group {
            Some(g) if g.is_diagonal() && g.order() > 1 => {
                for (sig, class) in parity_classes(&base, g) {
                    if class.is_empty() {
                        continue;
                    }
                    let label: String = sig
                        .iter()
                        .map(|&s| if s > 0 { '+' } else { '-' })
                        .collect();
                    block_dims.push(class.len());
                    block_names.push(format!("{name}[{label}]"));
                    grams.push(GramForm {
                        multiplier: mult,
                        sdp_block: block_dims.len() - 1,
                        basis: class,
                        signature: Some(sig),
                    });
                }
            }
            _ => {
                block_dims.push(base.len());
                block_names.push(name);
                grams.push(GramForm {
                    multiplier: mult,
                    sdp_block: block_dims.len() - 1,
                    basis: base,
                    signature: None,
                });
            }
        }
    };

    let half0 = r.div_ceil(2);
    add_gram(0, half0, &mut grams, &mut block_dims, &mut block_names);
    if let Some(set) = omega {
        let half_i = (r - s_deg) / 2;
        for k in 1..=set.constraints().len() {
            add_gram(k, half_i, &mut grams, &mut block_dims, &mut block_names);
        }
    }

    // Monomial rows: union of the data support and all Gram products.
    let mut row_monomials: Vec<Monomial> = support.clone();
    for gf in &grams {
        let basis = &gf.basis;
        for (pi, bp) in basis.iter().enumerate() {
            for bq in &basis[pi..] {
                let prod = bp.mul(bq);
                if gf.multiplier == 0 {
                    row_monomials.push(prod);
                } else {
                    let g = &omega.unwrap().constraints()[gf.multiplier - 1];
                    for (nu, _) in g.terms() {
                        row_monomials.push(prod.mul(nu));
                    }
                }
            }
        }
    }
    row_monomials.sort();
    row_monomials.dedup();
    let row_index: BTreeMap<Monomial, usize> = row_monomials
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();

    let n_free = 1 + v_basis.len();
    let mut rows: Vec<Row> = row_monomials
        .iter()
        .map(|m| Row {
            mat: Vec::new(),
            lin: Vec::new(),
            rhs: -phi_s.coefficient(m) - tail_rhs.as_ref().map_or(0.0, |t| t.coefficient(m)),
        })
        .collect();

    // lambda column.
    let const_row = row_index[&Monomial::constant(n)];
    rows[const_row].lin.push((0, -1.0));
    // V columns.
    for (j, l) in lie_basis.iter().enumerate() {
        for (m, c) in l.terms() {
            let Some(&ri) = row_index.get(m) else {
                return Err(SosError::BasisCannotCover {
                    monomial: m.to_string(),
                });
            };
            rows[ri].lin.push((1 + j, c));
        }
    }
    // Gram entries.
    for gf in &grams {
        let basis = &gf.basis;
        for (pi, bp) in basis.iter().enumerate() {
            for (qo, bq) in basis[pi..].iter().enumerate() {
                let qi = pi + qo;
                let prod = bp.mul(bq);
                if gf.multiplier == 0 {
                    let ri = row_index[&prod];
                    rows[ri]
                        .mat
                        .push(MatEntry::new(gf.sdp_block, pi, qi, 1.0));
                } else {
                    let g = &omega.unwrap().constraints()[gf.multiplier - 1];
                    let sg = s_g[gf.multiplier - 1];
                    for (nu, c) in g.terms() {
                        let ri = row_index[&prod.mul(nu)];
                        rows[ri]
                            .mat
                            .push(MatEntry::new(gf.sdp_block, pi, qi, c / sg));
                    }
                }
            }
        }
    }

    // Coverage check: a monomial with data but neither Gram entries nor
    // free-variable columns is structurally unsatisfiable. Only reachable
    // with aggressive pruning or custom bases.
    for (ri, row) in rows.iter().enumerate() {
        if row.mat.is_empty() && row.lin.is_empty() && row.rhs != 0.0 {
            return Err(SosError::BasisCannotCover {
                monomial: row_monomials[ri].to_string(),
            });
        }
    }

    let mut free_names = vec!["lambda".to_string()];
    for b in &v_basis {
        free_names.push(format!("V[{b}]"));
    }
    let metadata = ProblemMetadata {
        free_names,
        block_names,
        row_names: row_monomials.iter().map(|m| m.to_string()).collect(),
    };
    let sdp = SdpProblem {
        block_dims,
        n_free,
        rows,
        objective: Objective {
            lin: vec![(0, 1.0)],
            mat: vec![],
        },
        metadata,
    };
    sdp.validate()?;

    Ok(CompiledSosProblem {
        sdp,
        structure: SosStructure {
            kind: SosProblemKind::Bound,
            dimension: n,
            f: f.to_vec(),
            target: phi.clone(),
            omega: omega.cloned(),
            group: group.cloned(),
            v_basis,
            fixed_tail: ansatz.fixed_tail.clone(),
            free_tail_coefficient: ansatz.free_tail_coefficient,
            grams,
            scaling: Scaling {
                phi: s_phi,
                f: s_f,
                constraints: s_g,
            },
            ansatz_degree: ansatz.degree,
        },
    })
}

/// Compile the absorbing-set feasibility check
/// `rate * f·grad(W) <= level - W` everywhere (or on `omega`), posed as
/// `minimize t s.t. (level - W - rate*f·grad(W)) + t` in the SOS cone.
/// The condition holds iff the optimal `t` is nonpositive, in which case
/// `{W <= level}` is eventually entered and never left by every
/// trajectory.
pub fn compile_absorbing_check(
    f: &[Polynomial],
    w: &Polynomial,
    lambda_rate: f64,
    level: f64,
    omega: Option<&SemialgebraicSet>,
    group: Option<&SymmetryGroup>,
) -> Result<CompiledSosProblem, SosError> {
    assert!(lambda_rate > 0.0, "absorbing rate must be positive");
    let n = f.len();
    if w.dimension() != n {
        return Err(SosError::Dimension {
            expected: n,
            got: w.dimension(),
        });
    }
    if let Some(g) = group {
        let mut invs: Vec<(&str, &Polynomial)> = vec![("W", w)];
        if let Some(set) = omega {
            for gi in set.constraints() {
                invs.push(("constraint", gi));
            }
        }
        check_group_compatibility(f, &invs, g, 1e-10)?;
    }
    let target = &(&Polynomial::constant(n, level) - w)
        - &lie_derivative(f, w)?.scale(lambda_rate);
    let s_t = scale_of(&target);
    let target_s = target.scale(1.0 / s_t);
    let s_g: Vec<f64> = omega
        .map(|set| set.constraints().iter().map(scale_of).collect())
        .unwrap_or_default();

    let r = target.degree().unwrap_or(0);
    let s_deg = omega.map(|s| s.max_constraint_degree()).unwrap_or(0);
    if omega.is_some() && r < s_deg {
        return Err(SosError::DegreeBookkeeping { r, s: s_deg });
    }

    let support: Vec<Monomial> = {
        let mut s: Vec<Monomial> = target_s.terms().map(|(m, _)| m.clone()).collect();
        s.push(Monomial::constant(n));
        s.sort();
        s.dedup();
        s
    };
    let mut grams: Vec<GramForm> = Vec::new();
    let mut block_dims: Vec<usize> = Vec::new();
    let mut block_names: Vec<String> = Vec::new();
    let add_gram = |mult: usize, half: usize, grams: &mut Vec<GramForm>, block_dims: &mut Vec<usize>, block_names: &mut Vec<String>| {
        let base = gram_basis(n, half, &support, GramBasisOptions::default());
        let name = if mult == 0 {
            "sigma0".to_string()
        } else {
            format!("sigma{mult}")
        };
        match group {
            Some(g) if g.is_diagonal() && g.order() > 1 => {
                for (sig, class) in parity_classes(&base, g) {
                    let label: String = sig
                        .iter()
                        .map(|&s| if s > 0 { '+' } else { '-' })
                        .collect();
                    block_dims.push(class.len());
                    block_names.push(format!("{name}[{label}]"));
                    grams.push(GramForm {
                        multiplier: mult,
                        sdp_block: block_dims.len() - 1,
                        basis: class,
                        signature: Some(sig),
                    });
                }
            }
            _ => {
                block_dims.push(base.len());
                block_names.push(name);
                grams.push(GramForm {
                    multiplier: mult,
                    sdp_block: block_dims.len() - 1,
                    basis: base,
                    signature: None,
                });
            }
        }
    };
    add_gram(0, r.div_ceil(2), &mut grams, &mut block_dims, &mut block_names);
    if let Some(set) = omega {
        for k in 1..=set.constraints().len() {
            add_gram(k, (r - s_deg) / 2, &mut grams, &mut block_dims, &mut block_names);
        }
    }

    let mut row_monomials: Vec<Monomial> = support.clone();
    for gf in &grams {
        for (pi, bp) in gf.basis.iter().enumerate() {
            for bq in &gf.basis[pi..] {
                let prod = bp.mul(bq);
                if gf.multiplier == 0 {
                    row_monomials.push(prod);
                } else {
                    for (nu, _) in omega.unwrap().constraints()[gf.multiplier - 1].terms() {
                        row_monomials.push(prod.mul(nu));
                    }
                }
            }
        }
    }
    row_monomials.sort();
    row_monomials.dedup();
    let row_index: BTreeMap<Monomial, usize> = row_monomials
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let mut rows: Vec<Row> = row_monomials
        .iter()
        .map(|m| Row {
            mat: Vec::new(),
            lin: Vec::new(),
            rhs: target_s.coefficient(m),
        })
        .collect();
    rows[row_index[&Monomial::constant(n)]].lin.push((0, -1.0));
    for gf in &grams {
        for (pi, bp) in gf.basis.iter().enumerate() {
            for (qo, bq) in gf.basis[pi..].iter().enumerate() {
                let qi = pi + qo;
                let prod = bp.mul(bq);
                if gf.multiplier == 0 {
                    rows[row_index[&prod]]
                        .mat
                        .push(MatEntry::new(gf.sdp_block, pi, qi, 1.0));
                } else {
                    let g = &omega.unwrap().constraints()[gf.multiplier - 1];
                    let sg = s_g[gf.multiplier - 1];
                    for (nu, c) in g.terms() {
                        rows[row_index[&prod.mul(nu)]]
                            .mat
                            .push(MatEntry::new(gf.sdp_block, pi, qi, c / sg));
                    }
                }
            }
        }
    }

    let metadata = ProblemMetadata {
        free_names: vec!["margin_shift".to_string()],
        block_names,
        row_names: row_monomials.iter().map(|m| m.to_string()).collect(),
    };
    let sdp = SdpProblem {
        block_dims,
        n_free: 1,
        rows,
        objective: Objective {
            lin: vec![(0, 1.0)],
            mat: vec![],
        },
        metadata,
    };
    sdp.validate()?;
    Ok(CompiledSosProblem {
        sdp,
        structure: SosStructure {
            kind: SosProblemKind::AbsorbingCheck {
                rate: lambda_rate,
                level,
            },
            dimension: n,
            f: f.to_vec(),
            target,
            omega: omega.cloned(),
            group: group.cloned(),
            v_basis: Vec::new(),
            fixed_tail: None,
            free_tail_coefficient: false,
            grams,
            scaling: Scaling {
                phi: s_t,
                f: 1.0,
                constraints: s_g,
            },
            ansatz_degree: 0,
        },
    })
}

/// Outcome of an absorbing-set check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AbsorbingOutcome {
    pub feasible: bool,
    /// `-t*`, the slack of the certified inequality (nonnegative when
    /// feasible up to solver tolerance).
    pub margin: f64,
    pub status: SolveStatus,
}

/// Compile, solve and interpret an absorbing-set check in one call.
pub fn verify_absorbing(
    f: &[Polynomial],
    w: &Polynomial,
    lambda_rate: f64,
    level: f64,
    omega: Option<&SemialgebraicSet>,
    group: Option<&SymmetryGroup>,
    settings: &SolverSettings,
) -> Result<AbsorbingOutcome, SosError> {
    let compiled = compile_absorbing_check(f, w, lambda_rate, level, omega, group)?;
    let sol = solve_sdp(&compiled.sdp, settings)?;
    let t = sol.free_values.first().copied().unwrap_or(f64::INFINITY) * compiled.structure.scaling.phi;
    let feasible = sol.status.is_usable() && t <= 1e-7 * compiled.structure.scaling.phi.max(1.0);
    Ok(AbsorbingOutcome {
        feasible,
        margin: -t,
        status: sol.status,
    })
}
