//! Primal-dual interior-point method: HKM-style symmetrized Newton
//! direction with Mehrotra predictor-corrector, dense Schur complement with
//! Cholesky and adaptive diagonal regularization, free variables eliminated
//! through a second (small) Schur complement.

use super::linalg::*;
use super::{
    IterateStats, Row, SdpError, SdpProblem, SdpSolution, SolveStatus, SolverSettings,
};
use rayon::prelude::*;

/// Rows with at least this many entries in a block form a dense
/// `X * A_i * Zinv` product once instead of entry-by-entry Schur terms.
const FAT_ROW_THRESHOLD: usize = 24;

struct BlockRow {
    row: usize,
    ent: Vec<(u32, u32, f64)>,
}

/// Raw pointer wrapper for the disjoint-row parallel writes in
/// [`Work::form_schur`].
#[derive(Clone, Copy)]
struct SendPtr(*mut f64);
unsafe impl Send for SendPtr {}
unsafe impl Sync for SendPtr {}
impl SendPtr {
    fn get(self) -> *mut f64 {
        self.0
    }
}

struct Work {
    m: usize,
    nfree: usize,
    dims: Vec<usize>,
    ntot: f64,
    /// Rows grouped per block, ascending row index.
    block_rows: Vec<Vec<BlockRow>>,
    /// Dense objective blocks.
    c_blocks: Vec<Vec<f64>>,
    g: Vec<f64>,
    b: Vec<f64>,
    /// Dense `m x nfree` free-variable coefficient matrix.
    bmat: Vec<f64>,
    rows: Vec<Row>,
    row_scale: Vec<f64>,
}

impl Work {
    fn new(prob: &SdpProblem) -> Self {
        let m = prob.rows.len();
        let nfree = prob.n_free;
        let dims = prob.block_dims.clone();
        // Row equilibration: divide each row by its largest coefficient.
        let mut rows = prob.rows.clone();
        let mut row_scale = vec![1.0f64; m];
        for (i, row) in rows.iter_mut().enumerate() {
            let mut s: f64 = 0.0;
            for e in &row.mat {
                s = s.max(e.value.abs());
            }
            for &(_, c) in &row.lin {
                s = s.max(c.abs());
            }
            if s > 0.0 {
                row_scale[i] = s;
                let inv = 1.0 / s;
                for e in &mut row.mat {
                    e.value *= inv;
                }
                for (_, c) in &mut row.lin {
                    *c *= inv;
                }
                row.rhs *= inv;
            }
        }
        let mut block_rows: Vec<Vec<BlockRow>> = dims.iter().map(|_| Vec::new()).collect();
        for (i, row) in rows.iter().enumerate() {
            let mut per: Vec<Vec<(u32, u32, f64)>> = dims.iter().map(|_| Vec::new()).collect();
            for e in &row.mat {
                per[e.block].push((e.i as u32, e.j as u32, e.value));
            }
            for (k, ent) in per.into_iter().enumerate() {
                if !ent.is_empty() {
                    block_rows[k].push(BlockRow { row: i, ent });
                }
            }
        }
        let mut c_blocks: Vec<Vec<f64>> = dims.iter().map(|&d| vec![0.0; d * d]).collect();
        for e in &prob.objective.mat {
            let d = dims[e.block];
            c_blocks[e.block][e.i * d + e.j] = e.value;
            c_blocks[e.block][e.j * d + e.i] = e.value;
        }
        let mut g = vec![0.0; nfree];
        for &(j, c) in &prob.objective.lin {
            g[j] += c;
        }
        let b: Vec<f64> = rows.iter().map(|r| r.rhs).collect();
        let mut bmat = vec![0.0; m * nfree];
        for (i, row) in rows.iter().enumerate() {
            for &(j, c) in &row.lin {
                bmat[i * nfree + j] += c;
            }
        }
        let ntot = dims.iter().map(|&d| d as f64).sum::<f64>().max(1.0);
        Work {
            m,
            nfree,
            dims,
            ntot,
            block_rows,
            c_blocks,
            g,
            b,
            bmat,
            rows,
            row_scale,
        }
    }

    /// `<A_i, G>` for every row, with `G` one dense (not necessarily
    /// symmetric) matrix per block.
    fn apply_a(&self, gmats: &[Vec<f64>]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for (k, rows) in self.block_rows.iter().enumerate() {
            let d = self.dims[k];
            let gm = &gmats[k];
            for br in rows {
                let mut acc = 0.0;
                for &(p, q, v) in &br.ent {
                    let (p, q) = (p as usize, q as usize);
                    if p == q {
                        acc += v * gm[p * d + q];
                    } else {
                        acc += v * (gm[p * d + q] + gm[q * d + p]);
                    }
                }
                out[br.row] += acc;
            }
        }
        out
    }

    /// `mat(A^T z)`: dense symmetric block accumulation.
    fn apply_at(&self, z: &[f64]) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = self.dims.iter().map(|&d| vec![0.0; d * d]).collect();
        for (k, rows) in self.block_rows.iter().enumerate() {
            let d = self.dims[k];
            let om = &mut out[k];
            for br in rows {
                let zi = z[br.row];
                if zi == 0.0 {
                    continue;
                }
                for &(p, q, v) in &br.ent {
                    let (p, q) = (p as usize, q as usize);
                    om[p * d + q] += zi * v;
                    if p != q {
                        om[q * d + p] += zi * v;
                    }
                }
            }
        }
        out
    }

    fn apply_b(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        if self.nfree == 0 {
            return out;
        }
        for i in 0..self.m {
            let mut acc = 0.0;
            let row = &self.bmat[i * self.nfree..(i + 1) * self.nfree];
            for (c, &v) in row.iter().enumerate() {
                acc += v * y[c];
            }
            out[i] = acc;
        }
        out
    }

    fn apply_bt(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.nfree];
        for (i, row) in self.rows.iter().enumerate() {
            let zi = z[i];
            if zi == 0.0 {
                continue;
            }
            for &(j, c) in &row.lin {
                out[j] += c * zi;
            }
        }
        out
    }

    /// Dense Schur complement `M[i][j] = sum_k tr(A_i X_k A_j Zinv_k)`,
    /// lower triangle; mirrored before factorization.
    fn form_schur(&self, xs: &[Vec<f64>], zinvs: &[Vec<f64>], mmat: &mut [f64]) {
        let m = self.m;
        mmat.fill(0.0);
        for (k, rows) in self.block_rows.iter().enumerate() {
            if rows.is_empty() {
                continue;
            }
            let d = self.dims[k];
            let x = &xs[k];
            let zi = &zinvs[k];
            //

            // Tasks own disjoint output rows of M (row indices are unique
            // within a block), so the parallel loop is deterministic.
            let mptr = SendPtr(mmat.as_mut_ptr());
            (0..rows.len()).into_par_iter().for_each(|ri| {
                let br = &rows[ri];
                let i = br.row;
                let mrow = unsafe { std::slice::from_raw_parts_mut(mptr.get().add(i * m), m) };
                if br.ent.len() >= FAT_ROW_THRESHOLD {
                    // T = X A_i Zinv, then <A_j, T> for all j <= i.
                    let mut t = vec![0.0f64; d * d];
                    for &(p, q, v) in &br.ent {
                        let (p, q) = (p as usize, q as usize);
                        let xcol = &x[p * d..(p + 1) * d];
                        let zrow = &zi[q * d..(q + 1) * d];
                        for a in 0..d {
                            let xa = v * xcol[a];
                            if xa != 0.0 {
                                let trow = &mut t[a * d..(a + 1) * d];
                                for bidx in 0..d {
                                    trow[bidx] += xa * zrow[bidx];
                                }
                            }
                        }
                        if p != q {
                            let xcol = &x[q * d..(q + 1) * d];
                            let zrow = &zi[p * d..(p + 1) * d];
                            for a in 0..d {
                                let xa = v * xcol[a];
                                if xa != 0.0 {
                                    let trow = &mut t[a * d..(a + 1) * d];
                                    for bidx in 0..d {
                                        trow[bidx] += xa * zrow[bidx];
                                    }
                                }
                            }
                        }
                    }
                    for bj in rows[..=ri].iter() {
                        let j = bj.row;
                        let mut acc = 0.0;
                        for &(r, s, w) in &bj.ent {
                            let (r, s) = (r as usize, s as usize);
                            if r == s {
                                acc += w * t[r * d + s];
                            } else {
                                acc += w * (t[r * d + s] + t[s * d + r]);
                            }
                        }
                        mrow[j] += acc;
                    }
                } else {
                    for bj in rows[..=ri].iter() {
                        let j = bj.row;
                        let mut acc = 0.0;
                        for &(p, q, v) in &br.ent {
                            let (p, q) = (p as usize, q as usize);
                            for &(r, s, w) in &bj.ent {
                                let (r, s) = (r as usize, s as usize);
                                let vw = v * w;
                                // tr(S_pq X S_rs Zinv) expanded over the
                                // symmetrized entries.
                                let mut term = x[q * d + r] * zi[s * d + p];
                                if r != s {
                                    term += x[q * d + s] * zi[r * d + p];
                                }
                                if p != q {
                                    term += x[p * d + r] * zi[s * d + q];
                                    if r != s {
                                        term += x[p * d + s] * zi[r * d + q];
                                    }
                                }
                                acc += vw * term;
                            }
                        }
                        mrow[j] += acc;
                    }
                }
            });
        }
        for i in 0..m {
            for j in (i + 1)..m {
                mmat[i * m + j] = mmat[j * m + i];
            }
        }
    }
}

fn frob_norm(blocks: &[Vec<f64>]) -> f64 {
    blocks
        .iter()
        .flat_map(|b| b.iter())
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn inner_blocks(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .sum()
}

/// Largest step `alpha` with `S + alpha * D` still PSD, given the Cholesky
/// factor of `S`.
fn max_psd_step(l: &[f64], d: usize, delta: &[f64]) -> f64 {
    if d == 0 {
        return f64::INFINITY;
    }
    let mut t = delta.to_vec();
    solve_lower_multi(l, d, &mut t, d);
    // y = L^{-1} delta L^{-T} = L^{-1} (L^{-1} delta)^T by symmetry of delta
    let mut tt = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            tt[i * d + j] = t[j * d + i];
        }
    }
    solve_lower_multi(l, d, &mut tt, d);
    for i in 0..d {
        for j in 0..i {
            let v = 0.5 * (tt[i * d + j] + tt[j * d + i]);
            tt[i * d + j] = v;
            tt[j * d + i] = v;
        }
    }
    let lam = min_eigenvalue_sym(&tt, d);
    if lam >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lam
    }
}

struct KktFactors {
    lm: Vec<f64>,
    u: Vec<f64>,
    ls: Vec<f64>,
}

/// Solve the KKT system `[M B; B' 0] [dz; dy] = [h; rg]` given the factored
/// Schur complement.
fn kkt_solve(work: &Work, f: &KktFactors, h: &[f64], rg: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = work.m;
    let nf = work.nfree;
    let mut u_h = h.to_vec();
    solve_lower_multi(&f.lm, m, &mut u_h, 1);
    let mut dy = vec![0.0; nf];
    if nf > 0 {
        // rhs_y = U' u_h - rg
        for c in 0..nf {
            let mut acc = 0.0;
            for i in 0..m {
                acc += f.u[i * nf + c] * u_h[i];
            }
            dy[c] = acc - rg[c];
        }
        cholesky_solve(&f.ls, nf, &mut dy);
        // u_h <- u_h - U dy
        for i in 0..m {
            let urow = &f.u[i * nf..(i + 1) * nf];
            let mut acc = 0.0;
            for c in 0..nf {
                acc += urow[c] * dy[c];
            }
            u_h[i] -= acc;
        }
    }
    solve_lower_transpose_multi(&f.lm, m, &mut u_h, 1);
    (u_h, dy)
}

/// Solve a standard-form SDP with the bundled interior-point method.
pub fn solve_sdp(problem: &SdpProblem, settings: &SolverSettings) -> Result<SdpSolution, SdpError> {
    problem.validate()?;
    settings.validate()?;
    if problem.rows.is_empty() && problem.objective.mat.is_empty() {
        // Nothing constrains the PSD blocks; return identity blocks.
        return Ok(trivial_solution(problem));
    }
    let work = Work::new(problem);
    let m = work.m;
    let nf = work.nfree;
    let dims = work.dims.clone();

    let beta_p = 1.0 + norm2(&work.b) / (m as f64).sqrt().max(1.0);
    let beta_d = 1.0 + frob_norm(&work.c_blocks).max(norm2(&work.g));
    let mut xs: Vec<Vec<f64>> = dims.iter().map(|&d| eye(d, beta_p)).collect();
    let mut zs: Vec<Vec<f64>> = dims.iter().map(|&d| eye(d, beta_d)).collect();
    let mut y = vec![0.0; nf];
    let mut z = vec![0.0; m];

    let norm_b = 1.0 + norm2(&work.b);
    let norm_c = 1.0 + frob_norm(&work.c_blocks).max(norm2(&work.g));

    let mut history: Vec<IterateStats> = Vec::new();
    let mut mmat = vec![0.0f64; m * m];
    let mut status = SolveStatus::IterationLimit;
    let mut steps = 0usize;

    for _iter in 0..settings.max_iterations {
        // residuals
        let ax = work.apply_a(&xs);
        let by = work.apply_b(&y);
        let rp: Vec<f64> = (0..m).map(|i| work.b[i] - ax[i] - by[i]).collect();
        let atz = work.apply_at(&z);
        let rd: Vec<Vec<f64>> = (0..dims.len())
            .map(|k| {
                let d = dims[k];
                let mut r = vec![0.0; d * d];
                for idx in 0..d * d {
                    r[idx] = work.c_blocks[k][idx] - zs[k][idx] - atz[k][idx];
                }
                r
            })
            .collect();
        let btz = work.apply_bt(&z);
        let rg: Vec<f64> = (0..nf).map(|j| work.g[j] - btz[j]).collect();

        let mu = inner_blocks(&xs, &zs) / work.ntot;
        let pobj = inner_blocks(&work.c_blocks, &xs)
            + work.g.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
        let dobj = work.b.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>();
        let pinf = norm2(&rp) / norm_b;
        let dinf = (frob_norm(&rd).powi(2) + norm2(&rg).powi(2)).sqrt() / norm_c;
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());

        if !mu.is_finite() || !pinf.is_finite() || !dinf.is_finite() {
            status = SolveStatus::NumericalFailure;
            break;
        }
        let gap_like = gap.max(mu / (1.0 + pobj.abs() + dobj.abs()));
        if gap_like <= settings.gap_tol && pinf <= settings.feas_tol && dinf <= settings.feas_tol {
            status = SolveStatus::Optimal;
            break;
        }

        // Divergence-based infeasibility heuristics.
        let zn = norm2(&z);
        if zn > 1e9 {
            let zh: Vec<f64> = z.iter().map(|v| v / zn).collect();
            let atzh = work.apply_at(&zh);
            let lam_max = atzh
                .iter()
                .zip(&dims)
                .map(|(mk, &d)| -min_eigenvalue_sym(&mk.iter().map(|v| -v).collect::<Vec<_>>(), d))
                .fold(f64::NEG_INFINITY, f64::max);
            let btzh = work.apply_bt(&zh);
            let bz = work.b.iter().zip(&zh).map(|(a, b)| a * b).sum::<f64>();
            if bz > 1e-8
                && lam_max <= 1e-7
                && btzh.iter().all(|v| v.abs() <= 1e-7)
            {
                status = SolveStatus::PrimalInfeasible;
                break;
            }
        }
        let xn = frob_norm(&xs).max(norm2(&y));
        if xn > 1e9 {
            let obj_dir = (inner_blocks(&work.c_blocks, &xs)
                + work.g.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>())
                / xn;
            let feas_dir: f64 = (0..m)
                .map(|i| (ax[i] + by[i]) / xn)
                .map(f64::abs)
                .fold(0.0, f64::max);
            if obj_dir < -1e-8 && feas_dir <= 1e-7 {
                status = SolveStatus::DualInfeasible;
                break;
            }
        }

        // Factorizations of the current iterate.
        let mut lz: Vec<Vec<f64>> = Vec::with_capacity(dims.len());
        let mut lx: Vec<Vec<f64>> = Vec::with_capacity(dims.len());
        let mut zinvs: Vec<Vec<f64>> = Vec::with_capacity(dims.len());
        let mut factor_ok = true;
        for k in 0..dims.len() {
            let d = dims[k];
            let mut l = zs[k].clone();
            if cholesky_in_place(&mut l, d).is_err() {
                factor_ok = false;
                break;
            }
            zinvs.push(spd_inverse_from_cholesky(&l, d));
            lz.push(l);
            let mut l = xs[k].clone();
            if cholesky_in_place(&mut l, d).is_err() {
                factor_ok = false;
                break;
            }
            lx.push(l);
        }
        if !factor_ok {
            status = SolveStatus::NumericalFailure;
            break;
        }

        // Schur complement and its Cholesky, with adaptive regularization.
        work.form_schur(&xs, &zinvs, &mut mmat);
        let trace_m = (0..m).map(|i| mmat[i * m + i]).sum::<f64>().max(1.0);
        let mut reg = settings.regularization_floor * trace_m / m as f64;
        let mut lm = Vec::new();
        for attempt in 0..8 {
            let mut trial = mmat.clone();
            for i in 0..m {
                trial[i * m + i] += reg;
            }
            if cholesky_in_place(&mut trial, m).is_ok() {
                lm = trial;
                break;
            }
            reg *= 100.0;
            if attempt == 7 {
                status = SolveStatus::NumericalFailure;
            }
        }
        if lm.is_empty() {
            break;
        }
        let mut u = work.bmat.clone();
        solve_lower_multi(&lm, m, &mut u, nf);
        let ls = if nf > 0 {
            let mut s = gram_of_columns(&u, m, nf);
            let trace_s = (0..nf).map(|i| s[i * nf + i]).sum::<f64>().max(1.0);
            let mut reg_s = settings.regularization_floor * trace_s / nf as f64;
            loop {
                let mut trial = s.clone();
                for i in 0..nf {
                    trial[i * nf + i] += reg_s;
                }
                if cholesky_in_place(&mut trial, nf).is_ok() {
                    break trial;
                }
                reg_s *= 100.0;
                if reg_s > trace_s {
                    s.clear();
                    break s;
                }
            }
        } else {
            Vec::new()
        };
        if nf > 0 && ls.is_empty() {
            status = SolveStatus::NumericalFailure;
            break;
        }
        let factors = KktFactors { lm, u, ls };

        // Predictor (affine scaling) direction.
        let xrz: Vec<Vec<f64>> = (0..dims.len())
            .map(|k| {
                let d = dims[k];
                let xr = matmul(&xs[k], &rd[k], d);
                matmul(&xr, &zinvs[k], d)
            })
            .collect();
        let a_xrz = work.apply_a(&xrz);
        let a_zinv = work.apply_a(&zinvs);
        let h_aff: Vec<f64> = (0..m)
            .map(|i| work.b[i] - by[i] + a_xrz[i])
            .collect();
        let (dz_aff, _dy_aff) = kkt_solve(&work, &factors, &h_aff, &rg);
        let (dx_aff, dzm_aff) = directions_from_dz(&work, &dims, &rd, &xs, &zinvs, &dz_aff, 0.0, None);

        let mut alpha_p = 1.0f64;
        let mut alpha_d = 1.0f64;
        for k in 0..dims.len() {
            alpha_p = alpha_p.min(max_psd_step(&lx[k], dims[k], &dx_aff[k]));
            alpha_d = alpha_d.min(max_psd_step(&lz[k], dims[k], &dzm_aff[k]));
        }
        alpha_p = alpha_p.min(1.0);
        alpha_d = alpha_d.min(1.0);

        // Mehrotra centering parameter.
        let mu_aff = {
            let mut acc = 0.0;
            for k in 0..dims.len() {
                let d = dims[k];
                for a in 0..d * d {
                    acc += (xs[k][a] + alpha_p * dx_aff[k][a]) * (zs[k][a] + alpha_d * dzm_aff[k][a]);
                }
            }
            acc / work.ntot
        };
        let sigma = ((mu_aff / mu).powi(3)).clamp(1e-8, 1.0);

        // Corrector.
        let corr: Vec<Vec<f64>> = (0..dims.len())
            .map(|k| {
                let d = dims[k];
                let t = matmul(&dx_aff[k], &dzm_aff[k], d);
                matmul(&t, &zinvs[k], d)
            })
            .collect();
        let a_corr = work.apply_a(&corr);
        let h: Vec<f64> = (0..m)
            .map(|i| work.b[i] - by[i] + a_xrz[i] - sigma * mu * a_zinv[i] + a_corr[i])
            .collect();
        let (dz, dy) = kkt_solve(&work, &factors, &h, &rg);
        let (dx, dzm) =
            directions_from_dz(&work, &dims, &rd, &xs, &zinvs, &dz, sigma * mu, Some(&corr));

        let mut ap = 1.0f64;
        let mut ad = 1.0f64;
        for k in 0..dims.len() {
            ap = ap.min(max_psd_step(&lx[k], dims[k], &dx[k]));
            ad = ad.min(max_psd_step(&lz[k], dims[k], &dzm[k]));
        }
        let tau = settings.step_fraction;
        let ap = (tau * ap).min(1.0);
        let ad = (tau * ad).min(1.0);
        if !ap.is_finite() || !ad.is_finite() || ap <= 0.0 || ad <= 0.0 {
            status = SolveStatus::NumericalFailure;
            break;
        }

        for k in 0..dims.len() {
            let d = dims[k];
            for a in 0..d * d {
                xs[k][a] += ap * dx[k][a];
                zs[k][a] += ad * dzm[k][a];
            }
        }
        for j in 0..nf {
            y[j] += ap * dy[j];
        }
        for i in 0..m {
            z[i] += ad * dz[i];
        }
        steps += 1;

        history.push(IterateStats {
            mu,
            primal_objective: pobj,
            dual_objective: dobj,
            pinf,
            dinf,
            step_primal: ap,
            step_dual: ad,
        });
    }

    // Final stats in the original (unscaled) row frame.
    let z_unscaled: Vec<f64> = z
        .iter()
        .zip(&work.row_scale)
        .map(|(v, s)| v / s)
        .collect();
    let mut solution = SdpSolution {
        primal_blocks: xs,
        free_values: y,
        dual_vector: z_unscaled,
        status,
        gap: 0.0,
        pinf: 0.0,
        dinf: 0.0,
        iterations: steps,
        primal_objective: 0.0,
        dual_objective: 0.0,
        history,
    };
    let rr = super::residuals::compute(problem, &solution);
    solution.gap = rr.gap;
    solution.pinf = rr.pinf;
    solution.dinf = rr.dinf;
    solution.primal_objective = rr.primal_objective;
    solution.dual_objective = rr.dual_objective;
    // Classify by the actual quality of the returned point; a late-stage
    // factorization breakdown still leaves the previous iterate, which is
    // usually well past the requested tolerances.
    if !matches!(
        solution.status,
        SolveStatus::PrimalInfeasible | SolveStatus::DualInfeasible
    ) {
        if rr.gap <= settings.gap_tol
            && rr.pinf <= settings.feas_tol
            && rr.dinf <= settings.feas_tol
        {
            solution.status = SolveStatus::Optimal;
        } else if rr.gap <= 100.0 * settings.gap_tol
            && rr.pinf <= 100.0 * settings.feas_tol
            && rr.dinf <= 100.0 * settings.feas_tol
        {
            solution.status = SolveStatus::NearOptimal;
        }
    }
    Ok(solution)
}

fn eye(d: usize, s: f64) -> Vec<f64> {
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        m[i * d + i] = s;
    }
    m
}

fn trivial_solution(problem: &SdpProblem) -> SdpSolution {
    SdpSolution {
        primal_blocks: problem.block_dims.iter().map(|&d| eye(d, 1.0)).collect(),
        free_values: vec![0.0; problem.n_free],
        dual_vector: vec![0.0; problem.rows.len()],
        status: SolveStatus::Optimal,
        gap: 0.0,
        pinf: 0.0,
        dinf: 0.0,
        iterations: 0,
        primal_objective: 0.0,
        dual_objective: 0.0,
        history: Vec::new(),
    }
}

/// Recover `(dX, dZ)` from the row direction `dz`:
/// `dZ = Rd - A'(dz)`, `dX = sigma*mu*Zinv - X - X dZ Zinv - corr`,
/// symmetrized.
#[allow(clippy::too_many_arguments)]
fn directions_from_dz(
    work: &Work,
    dims: &[usize],
    rd: &[Vec<f64>],
    xs: &[Vec<f64>],
    zinvs: &[Vec<f64>],
    dz: &[f64],
    sigma_mu: f64,
    corr: Option<&[Vec<f64>]>,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let atdz = work.apply_at(dz);
    let mut dxs = Vec::with_capacity(dims.len());
    let mut dzs = Vec::with_capacity(dims.len());
    for k in 0..dims.len() {
        let d = dims[k];
        let mut dzm = vec![0.0; d * d];
        for a in 0..d * d {
            dzm[a] = rd[k][a] - atdz[k][a];
        }
        let xdz = matmul(&xs[k], &dzm, d);
        let xdzzi = matmul(&xdz, &zinvs[k], d);
        let mut dx = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut v =
                    sigma_mu * zinvs[k][i * d + j] - xs[k][i * d + j] - xdzzi[i * d + j];
                if let Some(c) = corr {
                    v -= c[k][i * d + j];
                }
                dx[i * d + j] = v;
            }
        }
        // symmetrize
        for i in 0..d {
            for j in 0..i {
                let v = 0.5 * (dx[i * d + j] + dx[j * d + i]);
                dx[i * d + j] = v;
                dx[j * d + i] = v;
            }
        }
        dxs.push(dx);
        dzs.push(dzm);
    }
    (dxs, dzs)
}
