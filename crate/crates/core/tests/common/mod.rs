//! Shared test oracles, written independently of the library
//! implementations they are used to check.

#![allow(dead_code)]

/// Eigenvalues of a symmetric matrix by the classical Jacobi rotation
/// method. Independent of the eigensolver used inside the library.
pub fn jacobi_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    let scale: f64 = m.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    for _sweep in 0..200 {
        let mut off: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i * n + j] * m[i * n + j];
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Minimal standalone SDPA sparse-format parser, independent of the
/// library reader. Returns (block_struct, c, entries) with entries as
/// (matno, blkno, i, j, value), all 1-based as in the file.
pub type SdpaParse = (Vec<i64>, Vec<f64>, Vec<(usize, usize, usize, usize, f64)>);

pub fn parse_sdpa_text(text: &str) -> SdpaParse {
    let mut tokens: Vec<&str> = Vec::new();
    for line in text.lines() {
        let t = line.trim_start();
        if t.starts_with('*') || t.starts_with('"') {
            continue;
        }
        tokens.extend(
            line.split(|c: char| c.is_whitespace() || ",(){}".contains(c))
                .filter(|s| !s.is_empty()),
        );
    }
    let mut it = tokens.into_iter();
    let m: usize = it.next().unwrap().parse().unwrap();
    let nblocks: usize = it.next().unwrap().parse().unwrap();
    let block_struct: Vec<i64> = (0..nblocks)
        .map(|_| it.next().unwrap().parse().unwrap())
        .collect();
    let c: Vec<f64> = (0..m)
        .map(|_| it.next().unwrap().parse().unwrap())
        .collect();
    let mut entries = Vec::new();
    while let Some(tok) = it.next() {
        let mat: usize = tok.parse().unwrap();
        let blk: usize = it.next().unwrap().parse().unwrap();
        let i: usize = it.next().unwrap().parse().unwrap();
        let j: usize = it.next().unwrap().parse().unwrap();
        let v: f64 = it.next().unwrap().parse().unwrap();
        entries.push((mat, blk, i, j, v));
    }
    (block_struct, c, entries)
}

/// Deterministic xorshift-style RNG for test data, so the oracles do not
/// depend on the library's RNG choices.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform in [-1, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (self.uniform() + 1.0) * 0.5 * (hi - lo)
    }
}

/// Random symmetric matrix with entries in [-1, 1).
pub fn random_symmetric(n: usize, rng: &mut TestRng) -> Vec<f64> {
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = rng.uniform();
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    a
}
