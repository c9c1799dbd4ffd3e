mod common;

use orbit_bounds::polyalg::{parse_polynomial, LinearSymmetry, Monomial, Polynomial, SymmetryGroup};
use orbit_bounds::sdp::{solve_sdp, SolveStatus, SolverSettings};
use orbit_bounds::sos::{
    compile_bound_problem, degree_r, extract_certificate, symmetry_reduce, verify_absorbing,
    BoundCertificate, CertificateOptions, CompileOptions, SemialgebraicSet, VAnsatz,
};

fn poly(src: &str, n: usize) -> Polynomial {
    parse_polynomial(src, n).unwrap()
}

fn solve_bound(
    f: &[Polynomial],
    phi: &Polynomial,
    ansatz: &VAnsatz,
    omega: Option<&SemialgebraicSet>,
    weighted: bool,
) -> BoundCertificate {
    let compiled = compile_bound_problem(
        f,
        phi,
        ansatz,
        omega,
        CompileOptions {
            weighted,
            prune_basis: false,
        },
    )
    .unwrap();
    let sol = solve_sdp(&compiled.sdp, &SolverSettings::default()).unwrap();
    assert!(sol.status.is_usable(), "status {:?}", sol.status);
    extract_certificate(&compiled, &sol, CertificateOptions::default()).unwrap()
}

#[test]
fn degree_r_formula() {
    assert_eq!(degree_r(2, 2, 10), 11);
    assert_eq!(degree_r(2, 2, 2), 3);
    assert_eq!(degree_r(8, 2, 2), 8);
}

#[test]
fn gram_shape_small_linear_system() {
    // n = 2, deg f = 1, deg Phi = 2, d = 2: basis {1, a1, a2}, one 3x3
    // block, 6 equality rows (all monomials of degree <= 2).
    let f = vec![poly("-a1", 2), poly("-a2", 2)];
    let phi = poly("a1^2 + a2^2", 2);
    let compiled =
        compile_bound_problem(&f, &phi, &VAnsatz::full(2), None, CompileOptions::default())
            .unwrap();
    assert_eq!(compiled.sdp.block_dims, vec![3]);
    assert_eq!(compiled.sdp.rows.len(), 6);
    assert_eq!(compiled.structure.grams[0].basis.len(), 3);
}

#[test]
fn decay_bound_is_zero_with_expected_v() {
    // All trajectories of xdot = -x decay to the origin, so the maximal
    // average of x^2 is 0; the certifying V is x^2/2 up to any additional
    // multiple of x^2 (hand analysis: lambda - x^2 + 2c x^2 - b x is SOS
    // iff b = 0, c >= 1/2, lambda >= 0).
    let f = vec![poly("-a1", 1)];
    let phi = poly("a1^2", 1);
    let cert = solve_bound(&f, &phi, &VAnsatz::full(2), None, false);
    assert!(cert.lambda.abs() <= 1e-6, "lambda = {}", cert.lambda);
    assert!(cert.identity_residual <= 1e-8);
    let c2 = cert.v.coefficient(&Monomial::new(vec![2]));
    let c1 = cert.v.coefficient(&Monomial::new(vec![1]));
    assert!(c2 >= 0.5 - 1e-6, "x^2 coefficient {c2}");
    assert!(c1.abs() <= 1e-5, "x coefficient {c1}");
}

#[test]
fn bistable_bound_converges_to_one() {
    // xdot = x - x^3 has fixed points 0, +1, -1 and every trajectory
    // converges to one of them; averages of x^2 are 0 or 1, so the maximum
    // is 1 (fixed-point enumeration oracle).
    let f = vec![poly("a1 - a1^3", 1)];
    let phi = poly("a1^2", 1);
    let mut lambdas = Vec::new();
    for d in [2usize, 4, 6] {
        let cert = solve_bound(&f, &phi, &VAnsatz::full(d), None, false);
        assert!(cert.identity_residual <= 1e-6);
        assert!(cert.gram_min_eig >= -1e-6);
        lambdas.push(cert.lambda);
    }
    // nonincreasing in d
    assert!(lambdas[0] >= lambdas[1] - 1e-7);
    assert!(lambdas[1] >= lambdas[2] - 1e-7);
    let l6 = lambdas[2];
    assert!(
        (1.0 - 1e-3..=1.0 + 1e-6).contains(&l6),
        "degree-6 lambda = {l6}"
    );
}

#[test]
fn bistable_symmetry_reduction_matches_full() {
    let f = vec![poly("a1 - a1^3", 1)];
    let phi = poly("a1^2", 1);
    let compiled =
        compile_bound_problem(&f, &phi, &VAnsatz::full(6), None, CompileOptions::default())
            .unwrap();
    let full = solve_sdp(&compiled.sdp, &SolverSettings::default()).unwrap();
    let group = SymmetryGroup::generate(&[LinearSymmetry::negation(1)]).unwrap();
    let reduced = symmetry_reduce(&compiled, &group).unwrap();
    // Parity split: more, smaller blocks.
    assert!(reduced.sdp.block_dims.len() > compiled.sdp.block_dims.len());
    let rsol = solve_sdp(&reduced.sdp, &SolverSettings::default()).unwrap();
    let lf = full.free_values[0] * compiled.structure.scaling.phi;
    let lr = rsol.free_values[0] * reduced.structure.scaling.phi;
    assert!((lf - lr).abs() <= 1e-6, "full {lf} vs reduced {lr}");
}

#[test]
fn parity_split_shape_1d() {
    // Gram basis {1, x, x^2} under {I, -I} splits into {1, x^2} and {x}.
    let f = vec![poly("-a1", 1)];
    let phi = poly("a1^2", 1);
    let group = SymmetryGroup::generate(&[LinearSymmetry::negation(1)]).unwrap();
    let ansatz = VAnsatz::invariant(4, group);
    let compiled =
        compile_bound_problem(&f, &phi, &ansatz, None, CompileOptions::default()).unwrap();
    let mut dims = compiled.sdp.block_dims.clone();
    dims.sort();
    assert_eq!(dims, vec![1, 2]);
}

#[test]
fn tail_is_pinned_at_unit_coefficient() {
    let f = vec![poly("-a1", 1)];
    let phi = poly("a1^2", 1);
    let ansatz = VAnsatz::full(2).with_tail(poly("a1^4", 1));
    let cert = solve_bound(&f, &phi, &ansatz, None, false);
    assert_eq!(cert.v.coefficient(&Monomial::new(vec![4])), 1.0);
    assert!(cert.lambda.abs() <= 1e-6);
}

#[test]
fn non_equivariant_field_is_rejected() {
    // Lorenz with a symmetry-breaking +0.1 in xdot.
    let f = vec![
        poly("10*a2 - 10*a1 + 0.1", 3),
        poly("28*a1 - a2 - a1*a3", 3),
        poly("a1*a2 - 2.6666666666666665*a3", 3),
    ];
    let phi = poly("a3", 3);
    let t = LinearSymmetry::signs(vec![-1, -1, 1]).unwrap();
    let group = SymmetryGroup::generate(&[t]).unwrap();
    let ansatz = VAnsatz::invariant(2, group);
    let err = compile_bound_problem(&f, &phi, &ansatz, None, CompileOptions::default());
    assert!(matches!(
        err,
        Err(orbit_bounds::sos::SosError::NotEquivariant { .. })
    ));
}

#[test]
fn rejects_unusable_solver_status() {
    let f = vec![poly("-a1", 1)];
    let phi = poly("a1^2", 1);
    let compiled =
        compile_bound_problem(&f, &phi, &VAnsatz::full(2), None, CompileOptions::default())
            .unwrap();
    let mut sol = solve_sdp(&compiled.sdp, &SolverSettings::default()).unwrap();
    sol.status = SolveStatus::PrimalInfeasible;
    let err = extract_certificate(&compiled, &sol, CertificateOptions::default());
    assert!(err.is_err());
}

#[test]
fn absorbing_check_1d_decay() {
    // level - W - (1/2) f·grad(W) = 1 - x^2 + x^2 = 1 >= 0.
    let f = vec![poly("-a1", 1)];
    let w = poly("a1^2", 1);
    let out = verify_absorbing(&f, &w, 0.5, 1.0, None, None, &SolverSettings::default()).unwrap();
    assert!(out.feasible, "margin {}", out.margin);
}

#[test]
fn absorbing_check_conservative_rotation() {
    // f = (y, -x) conserves W = x^2 + y^2: the global condition fails for
    // any level (here 0 and 1), but restricted to the disk {W <= 1} the
    // level-1 inequality holds trivially.
    let f = vec![poly("a2", 2), poly("-a1", 2)];
    let w = poly("a1^2 + a2^2", 2);
    let s = SolverSettings::default();
    let out0 = verify_absorbing(&f, &w, 1.0, 0.0, None, None, &s).unwrap();
    assert!(!out0.feasible);
    let out1 = verify_absorbing(&f, &w, 1.0, 1.0, None, None, &s).unwrap();
    assert!(!out1.feasible);
    let disk = SemialgebraicSet::new(2, vec![poly("1 - a1^2 - a2^2", 2)]).unwrap();
    let out_disk = verify_absorbing(&f, &w, 1.0, 1.0, Some(&disk), None, &s).unwrap();
    assert!(out_disk.feasible, "margin {}", out_disk.margin);
}

#[test]
fn weighted_bound_no_worse_than_plain() {
    let f = vec![poly("a1 - a1^3", 1)];
    let phi = poly("a1^2", 1);
    let plain = solve_bound(&f, &phi, &VAnsatz::full(4), None, false);
    let ball = SemialgebraicSet::ball(1, 4.0);
    let weighted = solve_bound(&f, &phi, &VAnsatz::full(4), Some(&ball), true);
    assert!(weighted.lambda <= plain.lambda + 1e-7);
    assert!(weighted.identity_residual <= 1e-6);
}

#[test]
fn min_sense_certificate_flips_sign() {
    // min average of x^2 over trajectories of the bistable system is 0; the
    // lower bound is -(upper bound of max of -x^2).
    let f = vec![poly("a1 - a1^3", 1)];
    let neg_phi = poly("-a1^2", 1);
    let cert = solve_bound(&f, &neg_phi, &VAnsatz::full(6), None, false).into_min_sense();
    assert!(cert.lambda <= 1e-6);
    assert!(cert.lambda >= -1e-3, "lower bound {}", cert.lambda);
}
