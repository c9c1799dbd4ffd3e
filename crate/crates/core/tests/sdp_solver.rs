mod common;

use common::{jacobi_eigenvalues, random_symmetric, TestRng};
use orbit_bounds::sdp::{
    check_residuals, read_sdpa, solve_sdp, write_sdpa, MatEntry, Objective, Row, SdpProblem,
    SdpSolution, SolveStatus, SolverSettings,
};

fn lambda_max_problem(a: &[f64], n: usize) -> SdpProblem {
    // min lambda  s.t.  lambda*I - A psd, encoded entrywise as
    // <E_ij, S> - lambda*delta_ij = -(multiplicity)*A_ij.
    let mut p = SdpProblem::new(vec![n], 1);
    p.objective = Objective {
        lin: vec![(0, 1.0)],
        mat: vec![],
    };
    for i in 0..n {
        for j in i..n {
            let mult = if i == j { 1.0 } else { 2.0 };
            let mut row = Row {
                mat: vec![MatEntry::new(0, i, j, 1.0)],
                lin: vec![],
                rhs: -mult * a[i * n + j],
            };
            if i == j {
                row.lin.push((0, -1.0));
            }
            p.rows.push(row);
        }
    }
    p
}

fn solve(p: &SdpProblem) -> SdpSolution {
    solve_sdp(p, &SolverSettings::default()).unwrap()
}

#[test]
fn lambda_max_of_diagonal() {
    let a = vec![1.0, 0.0, 0.0, 2.0];
    let p = lambda_max_problem(&a, 2);
    let sol = solve(&p);
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!(
        (sol.free_values[0] - 2.0).abs() <= 1e-7,
        "lambda = {}",
        sol.free_values[0]
    );
}

#[test]
fn trace_one_feasibility() {
    let mut p = SdpProblem::new(vec![2], 0);
    p.rows.push(Row {
        mat: vec![MatEntry::new(0, 0, 0, 1.0), MatEntry::new(0, 1, 1, 1.0)],
        lin: vec![],
        rhs: 1.0,
    });
    let sol = solve(&p);
    assert!(sol.status.is_usable());
    let x = &sol.primal_blocks[0];
    assert!((x[0] + x[3] - 1.0).abs() <= 1e-7);
    let report = check_residuals(&p, &sol);
    assert!(report.min_block_eigenvalue >= -1e-8);
}

#[test]
fn matches_jacobi_oracle_on_random_matrices() {
    let mut rng = TestRng::new(0x5eed);
    for trial in 0..20 {
        let a = random_symmetric(5, &mut rng);
        let oracle = *jacobi_eigenvalues(&a, 5).last().unwrap();
        let p = lambda_max_problem(&a, 5);
        let sol = solve(&p);
        assert!(sol.status.is_usable(), "trial {trial}: status {:?}", sol.status);
        assert!(
            (sol.free_values[0] - oracle).abs() <= 1e-6,
            "trial {trial}: solver {} vs oracle {}",
            sol.free_values[0],
            oracle
        );
    }
}

#[test]
fn weak_duality_on_feasible_iterates() {
    let mut rng = TestRng::new(42);
    let a = random_symmetric(6, &mut rng);
    let p = lambda_max_problem(&a, 6);
    // Push well past the default tolerances so several iterates are
    // essentially feasible.
    let settings = SolverSettings {
        gap_tol: 1e-12,
        feas_tol: 1e-12,
        ..SolverSettings::default()
    };
    let sol = solve_sdp(&p, &settings).unwrap();
    assert!(sol.status.is_usable());
    let mut checked = 0;
    for it in &sol.history {
        if it.pinf <= 1e-11 && it.dinf <= 1e-11 {
            assert!(
                it.primal_objective >= it.dual_objective - 1e-10,
                "pobj {} < dobj {}",
                it.primal_objective,
                it.dual_objective
            );
            checked += 1;
        }
    }
    assert!(
        sol.primal_objective >= sol.dual_objective - 1e-10,
        "final weak duality"
    );
    assert!(checked > 0, "no feasible iterates reached 1e-11 residuals");
}

#[test]
fn determinism_across_runs() {
    let mut rng = TestRng::new(7);
    let a = random_symmetric(5, &mut rng);
    let p = lambda_max_problem(&a, 5);
    let s1 = solve(&p);
    let s2 = solve(&p);
    assert_eq!(s1.iterations, s2.iterations);
    assert!((s1.primal_objective - s2.primal_objective).abs() <= 1e-12);
}

#[test]
fn corrupted_primal_is_flagged() {
    let a = vec![1.0, 0.0, 0.0, 2.0];
    let p = lambda_max_problem(&a, 2);
    let mut sol = solve(&p);
    let clean = check_residuals(&p, &sol);
    assert!(clean.flags.is_empty(), "flags: {:?}", clean.flags);
    sol.primal_blocks[0][0] += 1e-3;
    let report = check_residuals(&p, &sol);
    assert!(
        report.flags.iter().any(|f| f.contains("pinf")),
        "flags: {:?}",
        report.flags
    );
}

#[test]
fn zero_problem_has_zero_residuals() {
    let p = SdpProblem::new(vec![3], 0);
    let sol = solve(&p);
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert_eq!(sol.gap, 0.0);
    assert_eq!(sol.pinf, 0.0);
    assert_eq!(sol.dinf, 0.0);
}

#[test]
fn primal_infeasibility_detected() {
    // X psd scalar with X = -1 is infeasible.
    let mut p = SdpProblem::new(vec![1], 0);
    p.rows.push(Row {
        mat: vec![MatEntry::new(0, 0, 0, 1.0)],
        lin: vec![],
        rhs: -1.0,
    });
    let sol = solve(&p);
    assert_eq!(sol.status, SolveStatus::PrimalInfeasible);
}

#[test]
fn sdpa_round_trip_reproduces_optimum() {
    let a = vec![1.0, 0.25, 0.25, 2.0];
    let p = lambda_max_problem(&a, 2);
    let oracle = *jacobi_eigenvalues(&a, 2).last().unwrap();

    let mut buf = Vec::new();
    write_sdpa(&p, &mut buf).unwrap();
    let parsed = read_sdpa(&buf[..]).unwrap();
    let imported = parsed.to_problem().unwrap();
    let sol = solve(&imported);
    assert!(sol.status.is_usable());
    assert!(
        (sol.primal_objective - oracle).abs() <= 1e-6,
        "imported optimum {} vs oracle {}",
        sol.primal_objective,
        oracle
    );
}
