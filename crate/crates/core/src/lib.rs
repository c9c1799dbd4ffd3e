//! Bounds on extremal infinite-time averages of polynomial ODE systems, and
//! localization of the periodic orbits that attain them.
//!
//! The pipeline has three stages:
//!
//! 1. **bound** — optimize a polynomial auxiliary function `V` so that
//!    `lambda - Phi - f·grad(V)` is a (weighted) sum of squares. The optimal
//!    `lambda` is a one-sided bound on the extremal infinite-time average of
//!    the observable `Phi` over all trajectories of `da/dt = f(a)`. The SOS
//!    condition is compiled to a semidefinite program and solved with the
//!    bundled primal-dual interior-point solver ([`sdp`]), or exported in
//!    SDPA sparse format for external solvers.
//! 2. **localize** — the nonnegative indicator polynomial
//!    `P = lambda - f·grad(V) - Phi` is close to zero along near-extremal
//!    trajectories. Points in its epsilon-sublevel set are harvested by BFGS
//!    minimization from random starts ([`localize`]).
//! 3. **converge** — harvested points seed recurrence detection and a
//!    single-shooting Newton iteration that converges the periodic orbit,
//!    its Floquet multipliers and its observable averages ([`upo`]).
//!
//! Each major capability has a runnable example under `examples/`; start
//! with `cargo run --release --example pipeline_vanderpol`. The thin
//! `orbit-bounds` binary exposes the same stages as subcommands for
//! config-driven runs.

pub mod polyalg;
pub mod sdp;
pub mod sos;

pub use polyalg::{LinearSymmetry, Monomial, Polynomial, SymmetryGroup};
