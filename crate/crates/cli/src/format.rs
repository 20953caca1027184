//! Whitespace text formats for matrices, vectors and stored factorizations.
//! Lines starting with `#` are comments.

use std::fmt::Write as _;

use num_bigint::BigInt;
use refrou::{integerize, Error, IntMatrix, IntVector, Permutation, REFFactorization, Rational, Result};

const FACT_MAGIC: &str = "REF-LU";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Tokens with their 1-based line numbers, comments removed.
fn tokens(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim_start().starts_with('#'))
        .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)))
        .collect()
}

fn header_dims(text: &str) -> Result<(usize, Option<usize>, usize)> {
    let first = text
        .lines()
        .enumerate()
        .find(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .ok_or_else(|| parse_err(1, "empty input"))?;
    let dims: Vec<usize> = first
        .1
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(first.0 + 1, format!("bad dimension '{t}'"))))
        .collect::<Result<_>>()?;
    match dims[..] {
        [n] => Ok((n, None, first.0 + 1)),
        [n, m] => Ok((n, Some(m), first.0 + 1)),
        _ => Err(parse_err(first.0 + 1, "header must be 'n' or 'n m'")),
    }
}

fn parse_numbers(text: &str, header_line: usize, expected: usize) -> Result<Vec<Rational>> {
    let body: Vec<(usize, &str)> = tokens(text).into_iter().filter(|(l, _)| *l > header_line).collect();
    if body.len() != expected {
        let line = body.last().map_or(header_line, |t| t.0);
        return Err(parse_err(line, format!("expected {expected} entries, found {}", body.len())));
    }
    body.into_iter()
        .map(|(l, t)| t.parse::<Rational>().map_err(|_| parse_err(l, format!("invalid number '{t}'"))))
        .collect()
}

/// A parsed matrix; `scale` is 1 unless fractional entries were cleared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFile {
    pub matrix: IntMatrix,
    pub scale: BigInt,
}

/// Header `n m` (or `n` for square), then the entries row by row.
pub fn parse_matrix(text: &str) -> Result<MatrixFile> {
    let (n, m, hl) = header_dims(text)?;
    let m = m.unwrap_or(n);
    let nums = parse_numbers(text, hl, n * m)?;
    let rows: Vec<Vec<Rational>> = nums.chunks(m.max(1)).map(<[Rational]>::to_vec).collect();
    let rows = if m == 0 { vec![Vec::new(); n] } else { rows };
    let (matrix, scale) = integerize(&rows)?;
    Ok(MatrixFile { matrix, scale })
}

/// Header `n`, then `n` entries.
pub fn parse_vector(text: &str) -> Result<(IntVector, BigInt)> {
    let (n, m, hl) = header_dims(text)?;
    if m.is_some_and(|m| m != 1) {
        return Err(parse_err(hl, "vector header must be a single length"));
    }
    let nums = parse_numbers(text, hl, n)?;
    let (matrix, scale) = integerize(&[nums])?;
    Ok((matrix.row(0).to_vec().into(), scale))
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub fn write_factorization(f: &REFFactorization) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{FACT_MAGIC} {}", f.n());
    let _ = writeln!(s, "symmetric {}", u8::from(f.is_symmetric()));
    let _ = writeln!(s, "row_perm {}", join(f.row_perm().map()));
    let _ = writeln!(s, "col_perm {}", join(f.col_perm().map()));
    let _ = writeln!(s, "det {}", f.determinant());
    let _ = writeln!(s, "pivots {}", join(f.pivots()));
    let _ = writeln!(s, "merged\n{}original\n{}", f.merged(), f.original());
    s
}

pub fn is_factorization(text: &str) -> bool {
    text.split_whitespace().next() == Some(FACT_MAGIC)
}

/// Reads the format written by [`write_factorization`], checking that the
/// stored pivots and determinant agree with the merged array.
pub fn parse_factorization(text: &str) -> Result<REFFactorization> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut next = |what: &str| lines.next().ok_or_else(|| parse_err(0, format!("missing {what}")));
    let field = |(ln, l): (usize, &str), key: &str| -> Result<Vec<String>> {
        let mut it = l.split_whitespace();
        if it.next() != Some(key) {
            return Err(parse_err(ln, format!("expected '{key}'")));
        }
        Ok(it.map(str::to_owned).collect())
    };
    let int = |ln: usize, t: &str| t.parse::<BigInt>().map_err(|_| parse_err(ln, format!("invalid integer '{t}'")));
    let idx = |ln: usize, t: &str| t.parse::<usize>().map_err(|_| parse_err(ln, format!("invalid index '{t}'")));

    let head = next("header")?;
    let n = match field(head, FACT_MAGIC)?.as_slice() {
        [n] => idx(head.0, n)?,
        _ => return Err(parse_err(head.0, "expected 'REF-LU <n>'")),
    };
    let sym = next("symmetric")?;
    let symmetric = match field(sym, "symmetric")?.as_slice() {
        [s] if s == "0" || s == "1" => s == "1",
        _ => return Err(parse_err(sym.0, "expected 'symmetric 0|1'")),
    };
    let mut perm = |key: &str| -> Result<Permutation> {
        let l = next(key)?;
        let map = field(l, key)?.iter().map(|t| idx(l.0, t)).collect::<Result<Vec<_>>>()?;
        if map.len() != n {
            return Err(parse_err(l.0, format!("{key} needs {n} entries")));
        }
        Permutation::from_map(map).map_err(|_| parse_err(l.0, format!("{key} is not a permutation")))
    };
    let row_perm = perm("row_perm")?;
    let col_perm = perm("col_perm")?;
    let dl = next("det")?;
    let det = match field(dl, "det")?.as_slice() {
        [d] => int(dl.0, d)?,
        _ => return Err(parse_err(dl.0, "expected 'det <d>'")),
    };
    let pl = next("pivots")?;
    let pivots = field(pl, "pivots")?.iter().map(|t| int(pl.0, t)).collect::<Result<Vec<_>>>()?;
    let mut block = |key: &str| -> Result<IntMatrix> {
        let l = next(key)?;
        field(l, key)?;
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let r = next("matrix row")?;
            let row = r.1.split_whitespace().map(|t| int(r.0, t)).collect::<Result<Vec<_>>>()?;
            if row.len() != n {
                return Err(parse_err(r.0, format!("row needs {n} entries")));
            }
            rows.push(row);
        }
        IntMatrix::from_rows(rows)
    };
    let merged = block("merged")?;
    let original = block("original")?;
    let f = REFFactorization::from_parts(merged, original, row_perm, col_perm, symmetric)?;
    if f.pivots() != pivots.as_slice() {
        return Err(parse_err(pl.0, "pivots disagree with the merged diagonal"));
    }
    if f.determinant() != det {
        return Err(parse_err(dl.0, "det disagrees with the last pivot and permutation parities"));
    }
    Ok(f)
}
