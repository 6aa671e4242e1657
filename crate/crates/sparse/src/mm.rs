//! Matrix Market coordinate format (`general` symmetry, 1-based indices).
//!
//! Values are written with Rust's shortest round-trip float formatting, so
//! `read(write(A))` reproduces every value bit for bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::{CsrMatrix, Scalar, SparseError, TripletBuilder};

pub fn write_to<T: Scalar, W: Write>(a: &CsrMatrix<T>, mut out: W) -> Result<(), SparseError> {
    writeln!(out, "%%MatrixMarket matrix coordinate {} general", T::FIELD)?;
    writeln!(out, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for i in 0..a.nrows() {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            writeln!(out, "{} {} {}", i + 1, j + 1, v.mm_format())?;
        }
    }
    Ok(())
}

pub fn write<T: Scalar>(a: &CsrMatrix<T>, path: impl AsRef<Path>) -> Result<(), SparseError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_to(a, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_from<T: Scalar, R: BufRead>(input: R) -> Result<CsrMatrix<T>, SparseError> {
    let err = |line: usize, msg: &str| SparseError::MatrixMarket { line, msg: msg.to_string() };
    let mut lines = input.lines().enumerate();

    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let header = header?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if fields.len() != 5
        || fields[0] != "%%matrixmarket"
        || fields[1] != "matrix"
        || fields[2] != "coordinate"
        || fields[4] != "general"
    {
        return Err(err(1, "expected '%%MatrixMarket matrix coordinate <field> general'"));
    }
    if fields[3] != T::FIELD {
        return Err(err(1, &format!("field '{}' does not match '{}'", fields[3], T::FIELD)));
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut builder: Option<TripletBuilder<T>> = None;
    let mut seen = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let tok: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                if tok.len() != 3 {
                    return Err(err(lineno, "size line must have three integers"));
                }
                let p = |s: &str| s.parse::<usize>().map_err(|_| err(lineno, "bad size"));
                let (m, n, nnz) = (p(tok[0])?, p(tok[1])?, p(tok[2])?);
                size = Some((m, n, nnz));
                builder = Some(TripletBuilder::with_capacity(m, n, nnz));
            }
            Some((m, n, _)) => {
                if tok.len() != 2 + T::mm_tokens() {
                    return Err(err(lineno, "wrong number of tokens in entry"));
                }
                let i: usize = tok[0].parse().map_err(|_| err(lineno, "bad row index"))?;
                let j: usize = tok[1].parse().map_err(|_| err(lineno, "bad column index"))?;
                if i == 0 || j == 0 || i > m || j > n {
                    return Err(err(lineno, &format!("index ({i}, {j}) out of bounds")));
                }
                let v = T::mm_parse(&tok[2..]).ok_or_else(|| err(lineno, "bad value"))?;
                builder.as_mut().expect("size line read").push(i - 1, j - 1, v);
                seen += 1;
            }
        }
    }
    let (_, _, nnz) = size.ok_or_else(|| err(2, "missing size line"))?;
    if seen != nnz {
        return Err(err(0, &format!("expected {nnz} entries, found {seen}")));
    }
    Ok(builder.expect("size line read").build())
}

pub fn read<T: Scalar>(path: impl AsRef<Path>) -> Result<CsrMatrix<T>, SparseError> {
    read_from(BufReader::new(File::open(path)?))
}
