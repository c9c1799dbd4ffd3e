//! SDPA sparse format (`.dat-s`) writer and reader.
//!
//! The exported file encodes the problem in the SDPA standard pair
//!
//! ```text
//! (P)  min  c'x   s.t.  sum_i x_i F_i - F0  psd
//! (D)  max  tr(F0 Y)  s.t.  tr(F_i Y) = c_i,  Y psd
//! ```
//!
//! with our primal mapped onto (D): `Y` carries the PSD blocks plus one
//! diagonal block holding the free variables split as `y = u - v`, `c` is
//! our right-hand side, `F_i` our row matrices and `F0` the negated
//! objective. Output ordering is deterministic (ascending constraint index,
//! then block, then upper-triangle position) and values are printed with
//! the shortest round-tripping decimal representation, so identical
//! problems always serialize to identical bytes.

use super::{MatEntry, Row, SdpError, SdpProblem};
use std::collections::BTreeMap;
use std::io::{BufRead, Write};

/// In-memory model of a `.dat-s` file.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpaFile {
    /// Block structure; negative entries are diagonal blocks.
    pub block_struct: Vec<i64>,
    /// Right-hand side / SDPA primal objective vector (length = mDIM).
    pub c: Vec<f64>,
    /// Entries `(matno, blkno, i, j, value)`, 0 = F0, all 1-based in file.
    pub entries: Vec<SdpaEntry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpaEntry {
    pub mat: usize,
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Convert a problem into the SDPA file model.
pub fn to_sdpa(problem: &SdpProblem) -> SdpaFile {
    let nf = problem.n_free;
    let mut block_struct: Vec<i64> = problem.block_dims.iter().map(|&d| d as i64).collect();
    if nf > 0 {
        block_struct.push(-(2 * nf as i64));
    }
    let free_block = problem.block_dims.len();
    let c: Vec<f64> = problem.rows.iter().map(|r| r.rhs).collect();

    let mut entries: Vec<SdpaEntry> = Vec::new();
    let push_mat = |entries: &mut Vec<SdpaEntry>, mat: usize, mats: &[MatEntry], sign: f64| {
        let mut acc: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
        for e in mats {
            *acc.entry((e.block, e.i, e.j)).or_insert(0.0) += sign * e.value;
        }
        for ((b, i, j), v) in acc {
            if v != 0.0 {
                entries.push(SdpaEntry {
                    mat,
                    block: b,
                    i,
                    j,
                    value: v,
                });
            }
        }
    };
    let push_lin = |entries: &mut Vec<SdpaEntry>, mat: usize, lin: &[(usize, f64)], sign: f64| {
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for &(v, cf) in lin {
            *acc.entry(v).or_insert(0.0) += sign * cf;
        }
        for (v, cf) in acc {
            if cf != 0.0 {
                entries.push(SdpaEntry {
                    mat,
                    block: free_block,
                    i: v,
                    j: v,
                    value: cf,
                });
                entries.push(SdpaEntry {
                    mat,
                    block: free_block,
                    i: nf + v,
                    j: nf + v,
                    value: -cf,
                });
            }
        }
    };

    // F0 = -C.
    push_mat(&mut entries, 0, &problem.objective.mat, -1.0);
    if nf > 0 {
        push_lin(&mut entries, 0, &problem.objective.lin, -1.0);
    }
    for (r, row) in problem.rows.iter().enumerate() {
        push_mat(&mut entries, r + 1, &row.mat, 1.0);
        if nf > 0 {
            push_lin(&mut entries, r + 1, &row.lin, 1.0);
        }
    }
    entries.sort_by(|a, b| {
        (a.mat, a.block, a.i, a.j)
            .partial_cmp(&(b.mat, b.block, b.i, b.j))
            .unwrap()
    });
    SdpaFile {
        block_struct,
        c,
        entries,
    }
}

/// Serialize the file model; deterministic bytes for identical input.
pub fn write_sdpa_file<W: Write>(file: &SdpaFile, w: &mut W) -> Result<(), SdpError> {
    writeln!(w, "{}", file.c.len())?;
    writeln!(w, "{}", file.block_struct.len())?;
    let bs: Vec<String> = file.block_struct.iter().map(|b| b.to_string()).collect();
    writeln!(w, "{}", bs.join(" "))?;
    let cs: Vec<String> = file.c.iter().map(|v| format_float(*v)).collect();
    writeln!(w, "{}", cs.join(" "))?;
    for e in &file.entries {
        writeln!(
            w,
            "{} {} {} {} {}",
            e.mat,
            e.block + 1,
            e.i + 1,
            e.j + 1,
            format_float(e.value)
        )?;
    }
    Ok(())
}

/// Export a problem in SDPA sparse format.
pub fn write_sdpa<W: Write>(problem: &SdpProblem, w: &mut W) -> Result<(), SdpError> {
    write_sdpa_file(&to_sdpa(problem), w)
}

fn format_float(v: f64) -> String {
    format!("{}", v)
}

/// Parse a `.dat-s` stream into the file model. Comment lines starting with
/// `*` or `"` are ignored; separators may be whitespace or `,(){}`.
pub fn read_sdpa<R: BufRead>(r: R) -> Result<SdpaFile, SdpError> {
    let mut tokens: Vec<String> = Vec::new();
    for line in r.lines() {
        let line = line?;
        let t = line.trim_start();
        if t.starts_with('*') || t.starts_with('"') {
            continue;
        }
        tokens.extend(
            line.split(|c: char| c.is_whitespace() || ",(){}".contains(c))
                .filter(|s| !s.is_empty())
                .map(str::to_string),
        );
    }
    let mut pos = 0usize;
    let next = |pos: &mut usize, what: &str| -> Result<&str, SdpError> {
        let t = tokens
            .get(*pos)
            .ok_or_else(|| SdpError::Format(format!("unexpected end of file reading {what}")))?;
        *pos += 1;
        Ok(t.as_str())
    };
    let m: usize = next(&mut pos, "mDIM")?
        .parse()
        .map_err(|_| SdpError::Format("bad mDIM".into()))?;
    let nblocks: usize = next(&mut pos, "nBLOCK")?
        .parse()
        .map_err(|_| SdpError::Format("bad nBLOCK".into()))?;
    let mut block_struct = Vec::with_capacity(nblocks);
    for _ in 0..nblocks {
        let b: i64 = next(&mut pos, "block structure")?
            .parse()
            .map_err(|_| SdpError::Format("bad block size".into()))?;
        block_struct.push(b);
    }
    let mut c = Vec::with_capacity(m);
    for _ in 0..m {
        let v: f64 = next(&mut pos, "c vector")?
            .parse()
            .map_err(|_| SdpError::Format("bad c entry".into()))?;
        c.push(v);
    }
    let mut entries = Vec::new();
    while pos < tokens.len() {
        let mat: usize = next(&mut pos, "matno")?
            .parse()
            .map_err(|_| SdpError::Format("bad matno".into()))?;
        let block: usize = next(&mut pos, "blkno")?
            .parse()
            .map_err(|_| SdpError::Format("bad blkno".into()))?;
        let i: usize = next(&mut pos, "i")?
            .parse()
            .map_err(|_| SdpError::Format("bad i".into()))?;
        let j: usize = next(&mut pos, "j")?
            .parse()
            .map_err(|_| SdpError::Format("bad j".into()))?;
        let value: f64 = next(&mut pos, "value")?
            .parse()
            .map_err(|_| SdpError::Format("bad value".into()))?;
        if mat > m {
            return Err(SdpError::Format(format!("matno {mat} exceeds mDIM {m}")));
        }
        if block == 0 || block > nblocks {
            return Err(SdpError::Format(format!("blkno {block} out of range")));
        }
        let dim = block_struct[block - 1].unsigned_abs() as usize;
        if i == 0 || j == 0 || i > dim || j > dim || i > j {
            return Err(SdpError::Format(format!(
                "entry ({i},{j}) not in upper triangle of block {block}"
            )));
        }
        if block_struct[block - 1] < 0 && i != j {
            return Err(SdpError::Format(
                "off-diagonal entry in diagonal block".into(),
            ));
        }
        entries.push(SdpaEntry {
            mat,
            block: block - 1,
            i: i - 1,
            j: j - 1,
            value,
        });
    }
    Ok(SdpaFile {
        block_struct,
        c,
        entries,
    })
}

impl SdpaFile {
    /// Interpret the file as the SDPA dual `max tr(F0 Y)` over PSD `Y` with
    /// `tr(F_i Y) = c_i`, i.e. our primal form `min <-F0, Y>`. Diagonal
    /// blocks expand into unit PSD blocks.
    pub fn to_problem(&self) -> Result<SdpProblem, SdpError> {
        // Map (file block, index) -> (problem block, dim) with diagonal
        // blocks expanded to 1x1 blocks.
        let mut block_dims: Vec<usize> = Vec::new();
        let mut offsets: Vec<usize> = Vec::new();
        for &b in &self.block_struct {
            offsets.push(block_dims.len());
            if b >= 0 {
                block_dims.push(b as usize);
            } else {
                for _ in 0..(-b) as usize {
                    block_dims.push(1);
                }
            }
        }
        let mut problem = SdpProblem::new(block_dims, 0);
        problem.rows = vec![Row::default(); self.c.len()];
        for (r, row) in problem.rows.iter_mut().enumerate() {
            row.rhs = self.c[r];
        }
        for e in &self.entries {
            let diag = self.block_struct[e.block] < 0;
            let (blk, i, j) = if diag {
                (offsets[e.block] + e.i, 0, 0)
            } else {
                (offsets[e.block], e.i, e.j)
            };
            if e.mat == 0 {
                // F0: objective is <-F0, Y>
                problem
                    .objective
                    .mat
                    .push(MatEntry::new(blk, i, j, -e.value));
            } else {
                problem.rows[e.mat - 1]
                    .mat
                    .push(MatEntry::new(blk, i, j, e.value));
            }
        }
        problem.validate()?;
        Ok(problem)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::Objective;

    fn lambda_max_problem(a: &[f64], n: usize) -> SdpProblem {
        // min lambda  s.t.  lambda*I - A = S psd
        let mut p = SdpProblem::new(vec![n], 1);
        p.objective = Objective {
            lin: vec![(0, 1.0)],
            mat: vec![],
        };
        for i in 0..n {
            for j in i..n {
                let mut row = Row {
                    mat: vec![MatEntry::new(0, i, j, 1.0)],
                    lin: vec![],
                    rhs: -a[i * n + j],
                };
                if i == j {
                    row.lin.push((0, -1.0));
                }
                p.rows.push(row);
            }
        }
        p
    }

    #[test]
    fn writes_expected_shape() {
        // 1-block 2x2 feasibility problem: one row tr(X) = 1.
        let mut p = SdpProblem::new(vec![2], 0);
        p.rows.push(Row {
            mat: vec![MatEntry::new(0, 0, 0, 1.0), MatEntry::new(0, 1, 1, 1.0)],
            lin: vec![],
            rhs: 1.0,
        });
        let mut buf = Vec::new();
        write_sdpa(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0], "1");
        assert_eq!(lines[1], "1");
        assert_eq!(lines[2], "2");
        assert_eq!(lines[3], "1");
        assert_eq!(lines[4], "1 1 1 1 1");
        assert_eq!(lines[5], "1 1 2 2 1");
    }

    #[test]
    fn import_then_reexport_is_byte_identical() {
        let a = vec![1.0, 0.25, 0.25, 2.0];
        let p = lambda_max_problem(&a, 2);
        let mut buf = Vec::new();
        write_sdpa(&p, &mut buf).unwrap();
        let parsed = read_sdpa(&buf[..]).unwrap();
        let mut buf2 = Vec::new();
        write_sdpa_file(&parsed, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_sdpa("1\n1\n".as_bytes()).is_err());
        // off-diagonal entry in diagonal block
        let text = "1\n1\n-2\n1\n1 1 1 2 1\n";
        assert!(read_sdpa(text.as_bytes()).is_err());
    }
}
