//! Compile auxiliary-function bound problems and absorbing-set checks into
//! standard-form semidefinite programs, reduce them under symmetry, and
//! extract verified certificates.
//!
//! The central operation turns
//!
//! ```text
//! minimize lambda  s.t.  lambda - Phi - f·grad(V)  is SOS (or weighted SOS on Omega)
//! ```
//!
//! into coefficient-matching equality constraints between the free
//! variables `(lambda, coefficients of V)` and Gram-matrix PSD blocks. The
//! optimal `lambda` upper-bounds the maximal infinite-time average of `Phi`
//! over trajectories that eventually stay in the absorbing set; minimal
//! averages are bounded by negating `Phi` at the call site.

mod basis;
mod certificate;
mod compile;
mod reduce;

pub use basis::{invariant_basis, monomials_up_to, GramBasisOptions};
pub use certificate::{
    extract_certificate, BoundCertificate, BoundSense, CertificateOptions, SolverSummary,
    SosMultiplier,
};
pub use compile::{
    compile_absorbing_check, compile_bound_problem, degree_r, verify_absorbing,
    AbsorbingOutcome, CompileOptions, CompiledSosProblem, GramForm, Scaling, SosProblemKind,
    SosStructure,
};
pub use reduce::symmetry_reduce;

use crate::polyalg::Polynomial;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A basic closed semialgebraic set `{a : g_1(a) >= 0, ..., g_m(a) >= 0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemialgebraicSet {
    dimension: usize,
    constraints: Vec<Polynomial>,
}

impl SemialgebraicSet {
    pub fn new(dimension: usize, constraints: Vec<Polynomial>) -> Result<Self, SosError> {
        if constraints.is_empty() {
            return Err(SosError::EmptyConstraintSet);
        }
        for g in &constraints {
            if g.dimension() != dimension {
                return Err(SosError::Dimension {
                    expected: dimension,
                    got: g.dimension(),
                });
            }
            if g.is_zero() {
                return Err(SosError::EmptyConstraintSet);
            }
        }
        Ok(SemialgebraicSet {
            dimension,
            constraints,
        })
    }

    /// The ball `{ L - ||a||^2 >= 0 }`.
    pub fn ball(dimension: usize, radius_squared: f64) -> Self {
        let g = &Polynomial::constant(dimension, radius_squared)
            - &Polynomial::norm_squared(dimension);
        SemialgebraicSet {
            dimension,
            constraints: vec![g],
        }
    }

    /// Append `L - ||a||^2 >= 0` if no constraint of that shape is present;
    /// the hypothesis behind degree-convergence of the weighted hierarchy.
    pub fn with_ball(mut self, radius_squared: f64) -> Self {
        let ball = &Polynomial::constant(self.dimension, radius_squared)
            - &Polynomial::norm_squared(self.dimension);
        if !self.constraints.contains(&ball) {
            self.constraints.push(ball);
        }
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn constraints(&self) -> &[Polynomial] {
        &self.constraints
    }

    pub fn max_constraint_degree(&self) -> usize {
        self.constraints
            .iter()
            .filter_map(|g| g.degree())
            .max()
            .unwrap_or(0)
    }

    /// Membership report for a point: the most negative constraint value
    /// (nonnegative means inside).
    pub fn membership_margin(&self, point: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|g| g.eval(point))
            .fold(f64::INFINITY, f64::min)
    }
}

/// How the auxiliary-function coefficient space is generated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum AnsatzMode {
    /// All monomials of degree 1..=d (constant pinned to zero).
    FullDegree,
    /// All group-invariant combinations of monomials of degree 1..=d.
    InvariantDegree,
    /// User-supplied basis polynomials.
    CustomBasis(Vec<Polynomial>),
}

/// Search space for the auxiliary function `V`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VAnsatz {
    pub mode: AnsatzMode,
    pub degree: usize,
    pub symmetry_group: Option<crate::polyalg::SymmetryGroup>,
    /// Optional fixed polynomial added to `V` with unit coefficient, e.g.
    /// `||a||^10`; set `free_tail_coefficient` to let the solver scale it.
    pub fixed_tail: Option<Polynomial>,
    pub free_tail_coefficient: bool,
}

impl VAnsatz {
    pub fn full(degree: usize) -> Self {
        VAnsatz {
            mode: AnsatzMode::FullDegree,
            degree,
            symmetry_group: None,
            fixed_tail: None,
            free_tail_coefficient: false,
        }
    }

    pub fn invariant(degree: usize, group: crate::polyalg::SymmetryGroup) -> Self {
        VAnsatz {
            mode: AnsatzMode::InvariantDegree,
            degree,
            symmetry_group: Some(group),
            fixed_tail: None,
            free_tail_coefficient: false,
        }
    }

    pub fn with_tail(mut self, tail: Polynomial) -> Self {
        self.fixed_tail = Some(tail);
        self
    }
}

#[derive(Debug, Error)]
pub enum SosError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("semialgebraic set needs at least one nonzero constraint")]
    EmptyConstraintSet,
    #[error("weighted SOS requires a semialgebraic set")]
    WeightedNeedsSet,
    #[error("degree bookkeeping inconsistent: r(d) = {r} < max constraint degree {s}")]
    DegreeBookkeeping { r: usize, s: usize },
    #[error("the V ansatz produced no basis elements")]
    EmptyAnsatz,
    #[error(
        "Gram basis cannot cover residual monomial {monomial}; enlarge the basis or disable pruning"
    )]
    BasisCannotCover { monomial: String },
    #[error("equivariance check failed for group element {element}: residual {residual:.3e}")]
    NotEquivariant { element: usize, residual: f64 },
    #[error("invariance check failed for {what} under group element {element}: residual {residual:.3e}")]
    NotInvariant {
        what: String,
        element: usize,
        residual: f64,
    },
    #[error("symmetry reduction requires a problem compiled with SOS structure")]
    MissingStructure,
    #[error("certificate rejected: {0}")]
    CertificateRejected(String),
    #[error("solver status {0:?} is not usable for certificate extraction")]
    SolverStatus(crate::sdp::SolveStatus),
    #[error(transparent)]
    Poly(#[from] crate::polyalg::PolyError),
    #[error(transparent)]
    Sdp(#[from] crate::sdp::SdpError),
}
