//! Standard-form semidefinite programs and a primal-dual interior-point
//! solver.
//!
//! The problem class is
//!
//! ```text
//! minimize    sum_k <C_k, X_k> + g'y
//! subject to  sum_k <A_{i,k}, X_k> + (B y)_i = b_i     (i = 1..m)
//!             X_k psd,  y free
//! ```
//!
//! with symmetric sparse coefficient matrices. This is exactly what a
//! sum-of-squares constraint compiles to: the PSD blocks are Gram matrices,
//! the free variables are the bound `lambda` and the auxiliary-function
//! coefficients, and each equality row matches the coefficient of one
//! monomial.
//!
//! One solve is single-threaded at the algorithmic level and owns its
//! workspace; the dense kernels use data parallelism that does not change
//! results across runs. Independent solves can run concurrently.

pub mod linalg;
mod residuals;
mod sdpa;
mod solver;

pub use residuals::{check_residuals, ResidualReport};
pub use sdpa::{read_sdpa, to_sdpa, write_sdpa, write_sdpa_file, SdpaEntry, SdpaFile};
pub use solver::solve_sdp;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One entry of a symmetric coefficient matrix: value `value` at positions
/// `(i, j)` and `(j, i)` of block `block`, with `i <= j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatEntry {
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

impl MatEntry {
    pub fn new(block: usize, i: usize, j: usize, value: f64) -> Self {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        MatEntry { block, i, j, value }
    }

    /// `<A, X>` contribution of this entry against a dense symmetric block.
    #[inline]
    pub fn inner(&self, x: &[f64], dim: usize) -> f64 {
        if self.i == self.j {
            self.value * x[self.i * dim + self.j]
        } else {
            2.0 * self.value * x[self.i * dim + self.j]
        }
    }
}

/// One equality row: `sum mat-entries + sum lin-entries = rhs`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub mat: Vec<MatEntry>,
    pub lin: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// Linear objective; `mat` is usually empty for SOS problems.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub lin: Vec<(usize, f64)>,
    pub mat: Vec<MatEntry>,
}

/// Names for decision variables and rows, for diagnostics and file dumps.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProblemMetadata {
    pub free_names: Vec<String>,
    pub block_names: Vec<String>,
    pub row_names: Vec<String>,
}

/// A standard-form conic program with block PSD variables and free scalars.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem {
    pub block_dims: Vec<usize>,
    pub n_free: usize,
    pub rows: Vec<Row>,
    pub objective: Objective,
    pub metadata: ProblemMetadata,
}

impl SdpProblem {
    pub fn new(block_dims: Vec<usize>, n_free: usize) -> Self {
        SdpProblem {
            block_dims,
            n_free,
            rows: Vec::new(),
            objective: Objective::default(),
            metadata: ProblemMetadata::default(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn max_block_dim(&self) -> usize {
        self.block_dims.iter().copied().max().unwrap_or(0)
    }

    /// Structural sanity: entry indices within bounds, no stored zeros,
    /// upper-triangle convention respected.
    pub fn validate(&self) -> Result<(), SdpError> {
        for (r, row) in self.rows.iter().enumerate() {
            for e in &row.mat {
                if e.block >= self.block_dims.len()
                    || e.i > e.j
                    || e.j >= self.block_dims[e.block]
                {
                    return Err(SdpError::Malformed(format!("row {r}: bad matrix entry")));
                }
                if e.value == 0.0 {
                    return Err(SdpError::Malformed(format!("row {r}: stored zero entry")));
                }
            }
            for &(v, c) in &row.lin {
                if v >= self.n_free {
                    return Err(SdpError::Malformed(format!("row {r}: bad free index")));
                }
                if c == 0.0 {
                    return Err(SdpError::Malformed(format!("row {r}: stored zero entry")));
                }
            }
        }
        for e in &self.objective.mat {
            if e.block >= self.block_dims.len() || e.i > e.j || e.j >= self.block_dims[e.block] {
                return Err(SdpError::Malformed("bad objective entry".into()));
            }
        }
        for &(v, _) in &self.objective.lin {
            if v >= self.n_free {
                return Err(SdpError::Malformed("bad objective free index".into()));
            }
        }
        Ok(())
    }

    /// Primal objective at a candidate point.
    pub fn primal_objective(&self, blocks: &[Vec<f64>], free: &[f64]) -> f64 {
        let mut v = 0.0;
        for e in &self.objective.mat {
            v += e.inner(&blocks[e.block], self.block_dims[e.block]);
        }
        for &(j, c) in &self.objective.lin {
            v += c * free[j];
        }
        v
    }
}

/// Termination status of a solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    NearOptimal,
    PrimalInfeasible,
    DualInfeasible,
    IterationLimit,
    NumericalFailure,
}

impl SolveStatus {
    pub fn is_usable(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::NearOptimal)
    }
}

/// Per-iterate statistics, kept for diagnostics and the weak-duality
/// property check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IterateStats {
    pub mu: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub pinf: f64,
    pub dinf: f64,
    pub step_primal: f64,
    pub step_dual: f64,
}

/// Solution of an [`SdpProblem`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SdpSolution {
    /// Dense row-major PSD blocks.
    pub primal_blocks: Vec<Vec<f64>>,
    pub free_values: Vec<f64>,
    /// One dual multiplier per equality row.
    pub dual_vector: Vec<f64>,
    pub status: SolveStatus,
    /// Relative duality gap.
    pub gap: f64,
    pub pinf: f64,
    pub dinf: f64,
    pub iterations: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub history: Vec<IterateStats>,
}

/// Interior-point settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iterations: usize,
    /// Fraction of the step to the PSD-cone boundary.
    pub step_fraction: f64,
    /// Relative floor for the adaptive Schur-complement regularization.
    pub regularization_floor: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            gap_tol: 1e-8,
            feas_tol: 1e-8,
            max_iterations: 200,
            step_fraction: 0.99,
            regularization_floor: 1e-12,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<(), SdpError> {
        if self.gap_tol <= 0.0
            || self.feas_tol <= 0.0
            || self.step_fraction <= 0.0
            || self.step_fraction >= 1.0
            || self.regularization_floor <= 0.0
        {
            return Err(SdpError::Malformed("solver settings out of range".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("solver failed: {0}")]
    Solve(String),
    #[error("SDPA format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
