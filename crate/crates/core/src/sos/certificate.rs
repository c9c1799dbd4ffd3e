use super::{CompiledSosProblem, SosError, SosProblemKind};
use crate::polyalg::{lie_derivative, Polynomial};
use crate::sdp::linalg::min_eigenvalue_sym;
use crate::sdp::{SdpSolution, SolveStatus};
use serde::{Deserialize, Serialize};

/// Which side of the extremal average the certificate bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundSense {
    UpperBoundOfMax,
    LowerBoundOfMin,
}

/// One SOS multiplier with its Gram factor: `sigma = b' Q b` over the
/// stored monomial basis (possibly split into several parity blocks, in
/// which case the polynomial is the sum over its blocks).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SosMultiplier {
    /// 0 for the plain SOS term, k >= 1 for the multiplier of constraint
    /// `g_k`.
    pub multiplier: usize,
    /// The expanded polynomial (original, unscaled frame).
    pub sigma: Polynomial,
    /// The paired constraint, when any.
    pub constraint: Option<Polynomial>,
    /// Gram blocks as (basis, dense row-major matrix), solver frame.
    pub gram_blocks: Vec<(Vec<crate::polyalg::Monomial>, Vec<f64>)>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SolverSummary {
    pub status: SolveStatus,
    pub gap: f64,
    pub pinf: f64,
    pub dinf: f64,
    pub iterations: usize,
}

/// A verified one-sided bound on an extremal infinite-time average:
/// `(lambda, V)` plus the SOS multipliers proving the polynomial identity,
/// with the identity residual recomputed by direct expansion.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub sense: BoundSense,
    /// The bound on the extremal average, in the stated sense.
    pub lambda: f64,
    pub v: Polynomial,
    pub multipliers: Vec<SosMultiplier>,
    /// Max absolute coefficient of the re-expanded identity mismatch,
    /// relative to the data scaling.
    pub identity_residual: f64,
    /// Smallest eigenvalue over all Gram blocks (solver frame).
    pub gram_min_eig: f64,
    pub solver: SolverSummary,
    /// Degree of the auxiliary-function ansatz that produced this bound.
    pub ansatz_degree: usize,
}

impl BoundCertificate {
    /// Reinterpret an upper bound on `max avg(-Phi)` as a lower bound on
    /// `min avg(Phi)`: the bound value flips sign, `V` is unchanged.
    pub fn into_min_sense(mut self) -> BoundCertificate {
        assert_eq!(self.sense, BoundSense::UpperBoundOfMax);
        self.sense = BoundSense::LowerBoundOfMin;
        self.lambda = -self.lambda;
        self
    }

    /// The bound in the internal max-sense frame: `lambda` such that
    /// `lambda - phi_int - f·grad(V)` is certified nonnegative, where
    /// `phi_int` is the observable as compiled (negated for min-sense).
    pub fn lambda_internal(&self) -> f64 {
        match self.sense {
            BoundSense::UpperBoundOfMax => self.lambda,
            BoundSense::LowerBoundOfMin => -self.lambda,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CertificateOptions {
    /// Max allowed identity residual (scaled frame).
    pub residual_tol: f64,
    /// Allowed Gram eigenvalue deficit.
    pub eig_tol: f64,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions {
            residual_tol: 1e-6,
            eig_tol: 1e-6,
        }
    }
}

/// Reconstruct `(lambda, V, sigma_i)` from a solved bound problem and
/// verify the polynomial identity by direct term-by-term expansion,
/// independent of everything the solver reported.
pub fn extract_certificate(
    compiled: &CompiledSosProblem,
    solution: &SdpSolution,
    options: CertificateOptions,
) -> Result<BoundCertificate, SosError> {
    let st = &compiled.structure;
    assert!(
        matches!(st.kind, SosProblemKind::Bound),
        "certificates are extracted from bound problems"
    );
    if !solution.status.is_usable() {
        return Err(SosError::SolverStatus(solution.status));
    }

    let s_phi = st.scaling.phi;
    let s_f = st.scaling.f;
    let lambda_int = solution.free_values[0] * s_phi;

    // V = (s_phi / s_f) * sum c_j B_j (+ fixed tail).
    let mut v = Polynomial::zero(st.dimension);
    for (j, basis) in st.v_basis.iter().enumerate() {
        let c = solution.free_values[1 + j] * s_phi / s_f;
        if c != 0.0 {
            v = &v + &basis.scale(c);
        }
    }
    if let (Some(tail), false) = (&st.fixed_tail, st.free_tail_coefficient) {
        v = &v + tail;
    }

    // Multipliers, grouped over parity blocks.
    let n_mults = st.grams.iter().map(|g| g.multiplier).max().unwrap_or(0) + 1;
    let mut mults: Vec<SosMultiplier> = (0..n_mults)
        .map(|k| SosMultiplier {
            multiplier: k,
            sigma: Polynomial::zero(st.dimension),
            constraint: if k == 0 {
                None
            } else {
                st.omega
                    .as_ref()
                    .map(|set| set.constraints()[k - 1].clone())
            },
            gram_blocks: Vec::new(),
        })
        .collect();
    let mut gram_min_eig = f64::INFINITY;
    for gf in &st.grams {
        let q = &solution.primal_blocks[gf.sdp_block];
        let dim = gf.basis.len();
        gram_min_eig = gram_min_eig.min(min_eigenvalue_sym(q, dim));
        // sigma_tilde = b' Q b; unscale by s_phi (and the constraint
        // scaling for weighted blocks).
        let unscale = if gf.multiplier == 0 {
            s_phi
        } else {
            s_phi / st.scaling.constraints[gf.multiplier - 1]
        };
        let mut sigma = Polynomial::zero(st.dimension);
        for (pi, bp) in gf.basis.iter().enumerate() {
            for (qo, bq) in gf.basis[pi..].iter().enumerate() {
                let qi = pi + qo;
                let coeff = if pi == qi {
                    q[pi * dim + qi]
                } else {
                    2.0 * q[pi * dim + qi]
                };
                if coeff != 0.0 {
                    sigma.add_term(bp.mul(bq), coeff * unscale);
                }
            }
        }
        let m = &mut mults[gf.multiplier];
        m.sigma = &m.sigma + &sigma;
        m.gram_blocks.push((gf.basis.clone(), q.clone()));
    }
    if gram_min_eig == f64::INFINITY {
        gram_min_eig = 0.0;
    }

    // Identity residual: lambda - Phi - f·grad(V) - sigma0 - sum sigma_k g_k,
    // re-expanded from the reconstructed polynomials.
    let mut residual = &(&Polynomial::constant(st.dimension, lambda_int) - &st.target)
        - &lie_derivative(&st.f, &v)?;
    for m in &mults {
        match &m.constraint {
            None => residual = &residual - &m.sigma,
            Some(g) => residual = &residual - &(&m.sigma * g),
        }
    }
    let identity_residual = residual.max_abs_coefficient() / s_phi;

    if identity_residual > options.residual_tol {
        return Err(SosError::CertificateRejected(format!(
            "identity residual {identity_residual:.3e} exceeds tolerance {:.3e}",
            options.residual_tol
        )));
    }
    if gram_min_eig < -options.eig_tol {
        return Err(SosError::CertificateRejected(format!(
            "Gram minimum eigenvalue {gram_min_eig:.3e} below -{:.3e}",
            options.eig_tol
        )));
    }

    Ok(BoundCertificate {
        sense: BoundSense::UpperBoundOfMax,
        lambda: lambda_int,
        v,
        multipliers: mults,
        identity_residual,
        gram_min_eig,
        solver: SolverSummary {
            status: solution.status,
            gap: solution.gap,
            pinf: solution.pinf,
            dinf: solution.dinf,
            iterations: solution.iterations,
        },
        ansatz_degree: st.ansatz_degree,
    })
}
