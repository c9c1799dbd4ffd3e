use super::linalg::min_eigenvalue_sym;
use super::{SdpProblem, SdpSolution};
use serde::{Deserialize, Serialize};

/// Residuals recomputed from scratch out of problem data and a candidate
/// solution, independent of anything the solver reported.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualReport {
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub pinf: f64,
    pub dinf: f64,
    /// Smallest eigenvalue over all primal blocks (0 when there are none).
    pub min_block_eigenvalue: f64,
    /// Human-readable discrepancy flags; empty when everything agrees.
    pub flags: Vec<String>,
}

/// Recompute objectives, residual norms and the duality gap.
pub fn compute(problem: &SdpProblem, solution: &SdpSolution) -> ResidualReport {
    let pobj = problem.primal_objective(&solution.primal_blocks, &solution.free_values);
    let dobj: f64 = problem
        .rows
        .iter()
        .zip(&solution.dual_vector)
        .map(|(r, z)| r.rhs * z)
        .sum();

    // Primal feasibility: b - A(X) - By.
    let mut norm_b = 0.0f64;
    let mut pres = 0.0f64;
    for row in &problem.rows {
        norm_b += row.rhs * row.rhs;
        let mut v = row.rhs;
        for e in &row.mat {
            v -= e.inner(&solution.primal_blocks[e.block], problem.block_dims[e.block]);
        }
        for &(j, c) in &row.lin {
            v -= c * solution.free_values[j];
        }
        pres += v * v;
    }
    let pinf = pres.sqrt() / (1.0 + norm_b.sqrt());

    // Dual feasibility: the implied slack C - A'(z) must be PSD and the
    // free-variable equality B'z = g must hold.
    let mut slack: Vec<Vec<f64>> = problem
        .block_dims
        .iter()
        .map(|&d| vec![0.0; d * d])
        .collect();
    for e in &problem.objective.mat {
        let d = problem.block_dims[e.block];
        slack[e.block][e.i * d + e.j] += e.value;
        if e.i != e.j {
            slack[e.block][e.j * d + e.i] += e.value;
        }
    }
    for (row, &z) in problem.rows.iter().zip(&solution.dual_vector) {
        if z == 0.0 {
            continue;
        }
        for e in &row.mat {
            let d = problem.block_dims[e.block];
            slack[e.block][e.i * d + e.j] -= z * e.value;
            if e.i != e.j {
                slack[e.block][e.j * d + e.i] -= z * e.value;
            }
        }
    }
    let mut g = vec![0.0f64; problem.n_free];
    for &(j, c) in &problem.objective.lin {
        g[j] += c;
    }
    for (row, &z) in problem.rows.iter().zip(&solution.dual_vector) {
        for &(j, c) in &row.lin {
            g[j] -= c * z;
        }
    }
    let norm_g: f64 = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut c_norm = 0.0f64;
    for e in &problem.objective.mat {
        c_norm += e.value * e.value;
    }
    for &(_, c) in &problem.objective.lin {
        c_norm += c * c;
    }
    let slack_viol = slack
        .iter()
        .zip(&problem.block_dims)
        .map(|(s, &d)| (-min_eigenvalue_sym(s, d)).max(0.0))
        .fold(0.0f64, f64::max);
    let dinf = (norm_g.max(slack_viol)) / (1.0 + c_norm.sqrt());

    let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());

    let min_block_eigenvalue = solution
        .primal_blocks
        .iter()
        .zip(&problem.block_dims)
        .map(|(x, &d)| min_eigenvalue_sym(x, d))
        .fold(f64::INFINITY, f64::min);
    let min_block_eigenvalue = if min_block_eigenvalue.is_finite() {
        min_block_eigenvalue
    } else {
        0.0
    };

    ResidualReport {
        primal_objective: pobj,
        dual_objective: dobj,
        gap,
        pinf,
        dinf,
        min_block_eigenvalue,
        flags: Vec::new(),
    }
}

/// Recompute residuals and flag disagreements with the solver-reported
/// values above ten times the reference tolerance (1e-8).
pub fn check_residuals(problem: &SdpProblem, solution: &SdpSolution) -> ResidualReport {
    let mut report = compute(problem, solution);
    let tol = 1e-8;
    if (report.pinf - solution.pinf).abs() > 10.0 * tol {
        report.flags.push(format!(
            "pinf mismatch: recomputed {:.3e}, reported {:.3e}",
            report.pinf, solution.pinf
        ));
    }
    if (report.dinf - solution.dinf).abs() > 10.0 * tol {
        report.flags.push(format!(
            "dinf mismatch: recomputed {:.3e}, reported {:.3e}",
            report.dinf, solution.dinf
        ));
    }
    if (report.gap - solution.gap).abs() > 10.0 * tol {
        report.flags.push(format!(
            "gap mismatch: recomputed {:.3e}, reported {:.3e}",
            report.gap, solution.gap
        ));
    }
    report
}
