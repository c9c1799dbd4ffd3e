//! Dense kernels for the interior-point solver: blocked Cholesky, blocked
//! triangular solves with many right-hand sides, and small symmetric-matrix
//! helpers.
//!
//! All matrices are row-major `Vec<f64>`. The Schur complement of a paper-
//! scale SOS problem is a few thousand rows, so the Cholesky and the
//! multi-RHS solves are the hot path; they are tiled for cache reuse and
//! parallelized over independent output tiles so results do not depend on
//! thread scheduling.

use rayon::prelude::*;

/// Tile size for the blocked Cholesky.
const NB: usize = 128;
/// Column-chunk width for multi-RHS triangular solves.
const RHS_CHUNK: usize = 32;

/// In-place Cholesky `A = L L^T` of a symmetric positive-definite matrix,
/// writing `L` into the lower triangle. Returns the failing pivot index if
/// the matrix is not positive definite.
pub fn cholesky_in_place(a: &mut [f64], n: usize) -> Result<(), usize> {
    debug_assert_eq!(a.len(), n * n);
    let nblk = n.div_ceil(NB);
    for kb in 0..nblk {
        let k0 = kb * NB;
        let kn = (k0 + NB).min(n);
        // Unblocked factorization of the diagonal tile.
        for j in k0..kn {
            let mut d = a[j * n + j];
            for p in k0..j {
                d -= a[j * n + p] * a[j * n + p];
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(j);
            }
            let dj = d.sqrt();
            a[j * n + j] = dj;
            let inv = 1.0 / dj;
            for i in (j + 1)..kn {
                let mut s = a[i * n + j];
                for p in k0..j {
                    s -= a[i * n + p] * a[j * n + p];
                }
                a[i * n + j] = s * inv;
            }
        }
        if kn == n {
            break;
        }
        // Panel solve: rows below the tile against L_kk^T.
        let (top, bottom) = a.split_at_mut(kn * n);
        let lkk = &top[k0 * n..];
        bottom.par_chunks_mut(n).for_each(|row| {
            for j in k0..kn {
                let mut s = row[j];
                for p in k0..j {
                    s -= row[p] * lkk[(j - k0) * n + p];
                }
                row[j] = s / lkk[(j - k0) * n + j];
            }
        });
        // Trailing update A[i][j] -= <L[i][k0..kn], L[j][k0..kn]> with the
        // panel gathered contiguously and 2x2 register tiling.
        let w = kn - k0;
        let nrows = n - kn;
        let mut panel = vec![0.0f64; nrows * w];
        {
            let (_, bot) = a.split_at(kn * n);
            for i in 0..nrows {
                panel[i * w..(i + 1) * w].copy_from_slice(&bot[i * n + k0..i * n + kn]);
            }
        }
        let (_, bottom) = a.split_at_mut(kn * n);
        let lp = &panel;
        bottom
            .par_chunks_mut(2 * n)
            .enumerate()
            .for_each(|(blk, rows)| {
                let i0 = 2 * blk;
                let two = rows.len() == 2 * n;
                let (r0, r1) = rows.split_at_mut(n.min(rows.len()));
                let li0 = &lp[i0 * w..(i0 + 1) * w];
                let li1 = if two {
                    &lp[(i0 + 1) * w..(i0 + 2) * w]
                } else {
                    li0
                };
                let mut jj = 0;
                while jj + 2 <= i0 + 1 {
                    let lj0 = &lp[jj * w..(jj + 1) * w];
                    let lj1 = &lp[(jj + 1) * w..(jj + 2) * w];
                    let (mut a00, mut a01, mut a10, mut a11) = (0.0, 0.0, 0.0, 0.0);
                    for p in 0..w {
                        let x0 = li0[p];
                        let x1 = li1[p];
                        let y0 = lj0[p];
                        let y1 = lj1[p];
                        a00 += x0 * y0;
                        a01 += x0 * y1;
                        a10 += x1 * y0;
                        a11 += x1 * y1;
                    }
                    r0[kn + jj] -= a00;
                    r0[kn + jj + 1] -= a01;
                    if two {
                        r1[kn + jj] -= a10;
                        r1[kn + jj + 1] -= a11;
                    }
                    jj += 2;
                }
                for j in jj..=i0 {
                    let ljv = &lp[j * w..(j + 1) * w];
                    let mut s = 0.0;
                    for p in 0..w {
                        s += li0[p] * ljv[p];
                    }
                    r0[kn + j] -= s;
                }
                if two {
                    for j in jj..=(i0 + 1) {
                        let ljv = &lp[j * w..(j + 1) * w];
                        let mut s = 0.0;
                        for p in 0..w {
                            s += li1[p] * ljv[p];
                        }
                        r1[kn + j] -= s;
                    }
                }
            });
    }
    Ok(())
}

/// Solve `L W = RHS` in place for `W`, with `L` lower triangular (`n x n`)
/// and `W` row-major `n x k`. Parallel over column chunks.
pub fn solve_lower_multi(l: &[f64], n: usize, w: &mut [f64], k: usize) {
    debug_assert_eq!(w.len(), n * k);
    if k == 0 || n == 0 {
        return;
    }
    let chunks: Vec<(usize, usize)> = (0..k)
        .step_by(RHS_CHUNK)
        .map(|c0| (c0, (c0 + RHS_CHUNK).min(k)))
        .collect();
    // Split W into per-chunk column strips so tasks own disjoint data.
    let mut strips: Vec<Vec<f64>> = chunks
        .iter()
        .map(|&(c0, c1)| {
            let mut s = vec![0.0; n * (c1 - c0)];
            for i in 0..n {
                s[i * (c1 - c0)..(i + 1) * (c1 - c0)].copy_from_slice(&w[i * k + c0..i * k + c1]);
            }
            s
        })
        .collect();
    strips
        .par_iter_mut()
        .zip(&chunks)
        .for_each(|(strip, &(c0, c1))| {
            let cw = c1 - c0;
            for i in 0..n {
                let (done, cur) = strip.split_at_mut(i * cw);
                let xi = &mut cur[..cw];
                let lrow = &l[i * n..i * n + i];
                for (j, &lij) in lrow.iter().enumerate() {
                    if lij != 0.0 {
                        let xj = &done[j * cw..(j + 1) * cw];
                        for c in 0..cw {
                            xi[c] -= lij * xj[c];
                        }
                    }
                }
                let inv = 1.0 / l[i * n + i];
                for v in xi.iter_mut() {
                    *v *= inv;
                }
            }
        });
    for (strip, &(c0, c1)) in strips.iter().zip(&chunks) {
        let cw = c1 - c0;
        for i in 0..n {
            w[i * k + c0..i * k + c1].copy_from_slice(&strip[i * cw..(i + 1) * cw]);
        }
    }
}

/// Solve `L^T W = RHS` in place for `W` (backward substitution), `W`
/// row-major `n x k`. Parallel over column chunks.
pub fn solve_lower_transpose_multi(l: &[f64], n: usize, w: &mut [f64], k: usize) {
    debug_assert_eq!(w.len(), n * k);
    if k == 0 || n == 0 {
        return;
    }
    let chunks: Vec<(usize, usize)> = (0..k)
        .step_by(RHS_CHUNK)
        .map(|c0| (c0, (c0 + RHS_CHUNK).min(k)))
        .collect();
    let mut strips: Vec<Vec<f64>> = chunks
        .iter()
        .map(|&(c0, c1)| {
            let mut s = vec![0.0; n * (c1 - c0)];
            for i in 0..n {
                s[i * (c1 - c0)..(i + 1) * (c1 - c0)].copy_from_slice(&w[i * k + c0..i * k + c1]);
            }
            s
        })
        .collect();
    strips
        .par_iter_mut()
        .zip(&chunks)
        .for_each(|(strip, &(c0, c1))| {
            let cw = c1 - c0;
            for i in (0..n).rev() {
                let (cur, done) = strip.split_at_mut((i + 1) * cw);
                let xi = &mut cur[i * cw..];
                // x_i -= sum_{j>i} L[j][i] x_j
                for jj in 0..(n - i - 1) {
                    let j = i + 1 + jj;
                    let lji = l[j * n + i];
                    if lji != 0.0 {
                        let xj = &done[jj * cw..(jj + 1) * cw];
                        for c in 0..cw {
                            xi[c] -= lji * xj[c];
                        }
                    }
                }
                let inv = 1.0 / l[i * n + i];
                for v in xi.iter_mut() {
                    *v *= inv;
                }
            }
        });
    for (strip, &(c0, c1)) in strips.iter().zip(&chunks) {
        let cw = c1 - c0;
        for i in 0..n {
            w[i * k + c0..i * k + c1].copy_from_slice(&strip[i * cw..(i + 1) * cw]);
        }
    }
}

/// Solve `L L^T x = b` for a single right-hand side, in place.
pub fn cholesky_solve(l: &[f64], n: usize, x: &mut [f64]) {
    for i in 0..n {
        let mut s = x[i];
        for j in 0..i {
            s -= l[i * n + j] * x[j];
        }
        x[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in (i + 1)..n {
            s -= l[j * n + i] * x[j];
        }
        x[i] = s / l[i * n + i];
    }
}

/// `S = U^T U` (lower triangle filled, then mirrored), with `U` row-major
/// `m x k`. Parallel over output row pairs.
pub fn gram_of_columns(u: &[f64], m: usize, k: usize) -> Vec<f64> {
    // Transpose once so columns are contiguous.
    let mut ut = vec![0.0f64; k * m];
    for i in 0..m {
        for c in 0..k {
            ut[c * m + i] = u[i * k + c];
        }
    }
    let mut s = vec![0.0f64; k * k];
    s.par_chunks_mut(k)
        .enumerate()
        .for_each(|(a, srow)| {
            let ca = &ut[a * m..(a + 1) * m];
            for b in 0..=a {
                let cb = &ut[b * m..(b + 1) * m];
                let mut acc0 = 0.0;
                let mut acc1 = 0.0;
                let mut i = 0;
                while i + 2 <= m {
                    acc0 += ca[i] * cb[i];
                    acc1 += ca[i + 1] * cb[i + 1];
                    i += 2;
                }
                if i < m {
                    acc0 += ca[i] * cb[i];
                }
                srow[b] = acc0 + acc1;
            }
        });
    for a in 0..k {
        for b in (a + 1)..k {
            s[a * k + b] = s[b * k + a];
        }
    }
    s
}

/// Dense `C = A * B` with all matrices row-major `n x n`.
pub fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0f64; n * n];
    for i in 0..n {
        let crow = &mut c[i * n..(i + 1) * n];
        for p in 0..n {
            let aip = a[i * n + p];
            if aip != 0.0 {
                let brow = &b[p * n..(p + 1) * n];
                for j in 0..n {
                    crow[j] += aip * brow[j];
                }
            }
        }
    }
    c
}

/// Inverse of an SPD matrix from its Cholesky factor: `A^{-1} = L^{-T} L^{-1}`.
pub fn spd_inverse_from_cholesky(l: &[f64], n: usize) -> Vec<f64> {
    let mut inv = vec![0.0f64; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    solve_lower_multi(l, n, &mut inv, n);
    solve_lower_transpose_multi(l, n, &mut inv, n);
    // Symmetrize against rounding.
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (inv[i * n + j] + inv[j * n + i]);
            inv[i * n + j] = v;
            inv[j * n + i] = v;
        }
    }
    inv
}

/// Smallest eigenvalue of a symmetric matrix (row-major full storage).
pub fn min_eigenvalue_sym(a: &[f64], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let m = nalgebra::DMatrix::from_row_slice(n, n, a);
    let sym = nalgebra::SymmetricEigen::new(m);
    sym.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize, seed: u64) -> Vec<f64> {
        let mut s = seed;
        let mut rnd = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = rnd() * 0.1;
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
            a[i * n + i] += 2.0;
        }
        a
    }

    #[test]
    fn cholesky_reconstructs() {
        let n = 217; // not a multiple of the tile size
        let a = spd(n, 7);
        let mut l = a.clone();
        cholesky_in_place(&mut l, n).unwrap();
        let mut maxerr: f64 = 0.0;
        for i in 0..n {
            for j in 0..=i {
                let mut s = 0.0;
                for p in 0..=j {
                    s += l[i * n + p] * l[j * n + p];
                }
                maxerr = maxerr.max((s - a[i * n + j]).abs());
            }
        }
        assert!(maxerr < 1e-12, "maxerr={maxerr}");
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let n = 3;
        let mut a = vec![1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0];
        assert_eq!(cholesky_in_place(&mut a, n), Err(1));
    }

    #[test]
    fn triangular_solves_invert() {
        let n = 143;
        let k = 37;
        let a = spd(n, 3);
        let mut l = a.clone();
        cholesky_in_place(&mut l, n).unwrap();
        // random rhs
        let mut s = 99u64;
        let mut rnd = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let b: Vec<f64> = (0..n * k).map(|_| rnd()).collect();
        let mut w = b.clone();
        solve_lower_multi(&l, n, &mut w, k);
        solve_lower_transpose_multi(&l, n, &mut w, k);
        // A w == b
        let mut maxerr: f64 = 0.0;
        for i in 0..n {
            for c in 0..k {
                let mut s = 0.0;
                for j in 0..n {
                    s += a[i * n + j] * w[j * k + c];
                }
                maxerr = maxerr.max((s - b[i * k + c]).abs());
            }
        }
        assert!(maxerr < 1e-10, "maxerr={maxerr}");
    }

    #[test]
    fn single_rhs_solve_matches_multi() {
        let n = 64;
        let a = spd(n, 11);
        let mut l = a.clone();
        cholesky_in_place(&mut l, n).unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut x1 = b.clone();
        cholesky_solve(&l, n, &mut x1);
        let mut x2 = b.clone();
        solve_lower_multi(&l, n, &mut x2, 1);
        solve_lower_transpose_multi(&l, n, &mut x2, 1);
        for i in 0..n {
            assert!((x1[i] - x2[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn gram_and_inverse() {
        let n = 37;
        let a = spd(n, 21);
        let mut l = a.clone();
        cholesky_in_place(&mut l, n).unwrap();
        let inv = spd_inverse_from_cholesky(&l, n);
        let prod = matmul(&a, &inv, n);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod[i * n + j] - want).abs() < 1e-10);
            }
        }

        let u: Vec<f64> = (0..n * 5).map(|i| (i as f64 * 0.11).cos()).collect();
        let s = gram_of_columns(&u, n, 5);
        for a_ in 0..5 {
            for b_ in 0..5 {
                let mut want = 0.0;
                for i in 0..n {
                    want += u[i * 5 + a_] * u[i * 5 + b_];
                }
                assert!((s[a_ * 5 + b_] - want).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn min_eig_of_diag() {
        let a = vec![3.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, 5.0];
        assert!((min_eigenvalue_sym(&a, 3) + 2.0).abs() < 1e-12);
    }
}
