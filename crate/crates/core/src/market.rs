//! Matrix Market reading and writing for dense square matrices.
//!
//! Both `array` and `coordinate` layouts are accepted with `real`, `integer` or
//! `complex` fields and `general`, `symmetric` or `hermitian` symmetry.
//! Symmetric storage is expanded to the full matrix. The writer always emits
//! `array complex general` with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line_no: usize, line: &str) -> Result<(Layout, Field, Symmetry)> {
    let mut tok = line.split_whitespace();
    if tok.next() != Some("%%MatrixMarket") {
        return Err(perr(line_no, "header must start with %%MatrixMarket"));
    }
    let words: Vec<String> = tok.map(str::to_ascii_lowercase).collect();
    if words.len() != 4 {
        return Err(perr(line_no, "header must have the form `%%MatrixMarket matrix <layout> <field> <symmetry>`"));
    }
    if words[0] != "matrix" {
        return Err(perr(line_no, format!("unsupported object `{}`", words[0])));
    }
    let layout = match words[1].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(perr(line_no, format!("unsupported layout `{other}`"))),
    };
    let field = match words[2].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        other => return Err(perr(line_no, format!("unsupported field `{other}`"))),
    };
    let symmetry = match words[3].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(perr(line_no, format!("unsupported symmetry `{other}`"))),
    };
    if symmetry == Symmetry::Hermitian && field != Field::Complex {
        return Err(perr(line_no, "hermitian symmetry requires the complex field"));
    }
    Ok((layout, field, symmetry))
}

fn parse_usize(line_no: usize, s: &str, what: &str) -> Result<usize> {
    s.parse::<usize>()
        .map_err(|_| perr(line_no, format!("invalid {what} `{s}`")))
}

fn parse_value(line_no: usize, field: Field, toks: &[&str]) -> Result<Complex64> {
    let want = if field == Field::Complex { 2 } else { 1 };
    if toks.len() != want {
        return Err(perr(
            line_no,
            format!("expected {want} value token(s), found {}", toks.len()),
        ));
    }
    let num = |s: &str| -> Result<f64> {
        let v = match field {
            Field::Integer => s
                .parse::<i64>()
                .map(|v| v as f64)
                .map_err(|_| perr(line_no, format!("invalid integer `{s}`")))?,
            _ => s
                .parse::<f64>()
                .map_err(|_| perr(line_no, format!("invalid number `{s}`")))?,
        };
        if !v.is_finite() {
            return Err(perr(line_no, format!("non-finite value `{s}`")));
        }
        Ok(v)
    };
    let re = num(toks[0])?;
    let im = if want == 2 { num(toks[1])? } else { 0.0 };
    Ok(Complex64::new(re, im))
}

/// Places `v` at `(i, j)` and its mirror image according to `symmetry`.
fn place(
    data: &mut [Complex64],
    n: usize,
    symmetry: Symmetry,
    i: usize,
    j: usize,
    v: Complex64,
    line_no: usize,
) -> Result<()> {
    data[i * n + j] = v;
    if i != j {
        match symmetry {
            Symmetry::General => {}
            Symmetry::Symmetric => data[j * n + i] = v,
            Symmetry::Hermitian => data[j * n + i] = v.conj(),
        }
    } else if symmetry == Symmetry::Hermitian && v.im != 0.0 {
        return Err(perr(line_no, "hermitian diagonal entry must be real"));
    }
    Ok(())
}

/// Parses Matrix Market text into a dense square matrix.
pub fn parse_matrix_market(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));

    let (line_no, header) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    let (layout, field, symmetry) = parse_header(line_no, header)?;

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });

    let (size_line, size) = body.next().ok_or_else(|| perr(line_no, "missing size line"))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    let want = if layout == Layout::Array { 2 } else { 3 };
    if dims.len() != want {
        return Err(perr(
            size_line,
            format!("size line must have {want} integers, found {}", dims.len()),
        ));
    }
    let rows = parse_usize(size_line, dims[0], "row count")?;
    let cols = parse_usize(size_line, dims[1], "column count")?;
    if rows != cols {
        return Err(perr(size_line, format!("matrix is not square ({rows}x{cols})")));
    }
    let n = rows;
    if n == 0 {
        return Err(perr(size_line, "matrix dimension must be positive"));
    }

    let mut data = vec![ZERO; n * n];
    let mut last_line = size_line;

    match layout {
        Layout::Array => {
            // column-major; symmetric storage lists the lower triangle only
            let slots: Vec<(usize, usize)> = (0..n)
                .flat_map(|j| {
                    let start = if symmetry == Symmetry::General { 0 } else { j };
                    (start..n).map(move |i| (i, j))
                })
                .collect();
            let mut k = 0;
            for (ln, line) in body {
                last_line = ln;
                if k == slots.len() {
                    return Err(perr(ln, format!("too many entries (expected {})", slots.len())));
                }
                let toks: Vec<&str> = line.split_whitespace().collect();
                let v = parse_value(ln, field, &toks)?;
                let (i, j) = slots[k];
                place(&mut data, n, symmetry, i, j, v, ln)?;
                k += 1;
            }
            if k != slots.len() {
                return Err(perr(
                    last_line,
                    format!("expected {} entries, found {k}", slots.len()),
                ));
            }
        }
        Layout::Coordinate => {
            let nnz = parse_usize(size_line, dims[2], "entry count")?;
            let mut seen = HashSet::with_capacity(nnz);
            let mut count = 0;
            for (ln, line) in body {
                last_line = ln;
                if count == nnz {
                    return Err(perr(ln, format!("too many entries (expected {nnz})")));
                }
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() < 2 {
                    return Err(perr(ln, "coordinate entry needs row and column indices"));
                }
                let i = parse_usize(ln, toks[0], "row index")?;
                let j = parse_usize(ln, toks[1], "column index")?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(perr(ln, format!("index ({i}, {j}) out of range 1..={n}")));
                }
                let (i, j) = (i - 1, j - 1);
                let v = parse_value(ln, field, &toks[2..])?;
                let key = if symmetry == Symmetry::General {
                    (i, j)
                } else {
                    (i.max(j), i.min(j))
                };
                if !seen.insert(key) {
                    return Err(perr(ln, format!("duplicate entry ({}, {})", i + 1, j + 1)));
                }
                // an upper-triangle entry in symmetric storage describes its mirror
                if symmetry == Symmetry::Hermitian && i < j {
                    place(&mut data, n, symmetry, j, i, v.conj(), ln)?;
                } else {
                    place(&mut data, n, symmetry, i, j, v, ln)?;
                }
                count += 1;
            }
            if count != nnz {
                return Err(perr(last_line, format!("expected {nnz} entries, found {count}")));
            }
        }
    }

    ComplexMatrix::from_row_major(n, data)
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_matrix_market(&text)
}

/// Serializes as `array complex general`, column-major, 17 significant digits.
pub fn to_matrix_market(a: &ComplexMatrix) -> String {
    let n = a.n();
    let mut out = String::with_capacity(48 * n * n + 64);
    out.push_str("%%MatrixMarket matrix array complex general\n");
    let _ = writeln!(out, "{n} {n}");
    for j in 0..n {
        for i in 0..n {
            let z = a[(i, j)];
            let _ = writeln!(out, "{:.16e} {:.16e}", z.re, z.im);
        }
    }
    out
}

pub fn write_matrix_market(a: &ComplexMatrix, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_matrix_market(a))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{I, ONE};

    fn line_of(e: Error) -> usize {
        match e {
            Error::Parse { line, .. } => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn array_real_identity() {
        let text = "%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n1\n";
        assert_eq!(parse_matrix_market(text).unwrap(), ComplexMatrix::identity(2));
    }

    #[test]
    fn array_is_column_major() {
        let text = "%%MatrixMarket matrix array integer general\n% comment\n2 2\n1\n2\n3\n4\n";
        let a = parse_matrix_market(text).unwrap();
        assert_eq!(a, ComplexMatrix::from_real_rows(&[[1.0, 3.0], [2.0, 4.0]]));
    }

    #[test]
    fn array_symmetric_expands_lower_triangle() {
        let text = "%%MatrixMarket matrix array real symmetric\n3 3\n2\n2\n1\n2\n1\n1\n";
        assert_eq!(parse_matrix_market(text).unwrap(), crate::matrix::example_matrix());
    }

    #[test]
    fn coordinate_hermitian_expands_with_conjugate() {
        // lower triangle of [[0, i], [-i, 0]]: a21 = -i
        let text = "%%MatrixMarket matrix coordinate complex hermitian\n2 2 1\n2 1 0 -1\n";
        let a = parse_matrix_market(text).unwrap();
        assert_eq!(a[(0, 1)], I);
        assert_eq!(a[(1, 0)], -I);
        assert_eq!(a[(0, 0)], ZERO);
        let back = parse_matrix_market(&to_matrix_market(&a)).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn coordinate_general_fills_zeros() {
        let text = "%%MatrixMarket matrix coordinate real general\n3 3 2\n1 1 1.5\n3 2 -2\n";
        let a = parse_matrix_market(text).unwrap();
        assert_eq!(a[(0, 0)], Complex64::new(1.5, 0.0));
        assert_eq!(a[(2, 1)], Complex64::new(-2.0, 0.0));
        assert_eq!(a[(1, 2)], ZERO);
    }

    #[test]
    fn non_square_rejected() {
        let text = "%%MatrixMarket matrix array complex general\n3 2\n";
        let e = parse_matrix_market(text).unwrap_err();
        assert_eq!(line_of(e.clone()), 2);
        assert!(e.to_string().contains("not square"));
    }

    #[test]
    fn malformed_inputs_name_the_line() {
        assert_eq!(line_of(parse_matrix_market("%%MatrixMarket matrix\n").unwrap_err()), 1);
        assert_eq!(
            line_of(parse_matrix_market("%%MatrixMarket matrix array real skew-symmetric\n1 1\n1\n").unwrap_err()),
            1
        );
        let oob = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n";
        assert_eq!(line_of(parse_matrix_market(oob).unwrap_err()), 3);
        let dup = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n1 1 2.0\n";
        assert_eq!(line_of(parse_matrix_market(dup).unwrap_err()), 4);
        let mirror_dup = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n2 1 1.0\n1 2 1.0\n";
        assert_eq!(line_of(parse_matrix_market(mirror_dup).unwrap_err()), 4);
        let short = "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n";
        assert!(parse_matrix_market(short).unwrap_err().to_string().contains("expected 4"));
        let long = "%%MatrixMarket matrix array real general\n1 1\n1\n2\n";
        assert_eq!(line_of(parse_matrix_market(long).unwrap_err()), 4);
        let bad_num = "%%MatrixMarket matrix array real general\n1 1\nabc\n";
        assert_eq!(line_of(parse_matrix_market(bad_num).unwrap_err()), 3);
        let nan = "%%MatrixMarket matrix array real general\n1 1\nNaN\n";
        assert_eq!(line_of(parse_matrix_market(nan).unwrap_err()), 3);
        let herm_diag = "%%MatrixMarket matrix coordinate complex hermitian\n1 1 1\n1 1 1 1\n";
        assert_eq!(line_of(parse_matrix_market(herm_diag).unwrap_err()), 3);
        let float_int = "%%MatrixMarket matrix array integer general\n1 1\n1.5\n";
        assert_eq!(line_of(parse_matrix_market(float_int).unwrap_err()), 3);
    }

    #[test]
    fn writer_round_trip_is_exact() {
        let a = ComplexMatrix::from_rows(&[
            [Complex64::new(0.1, -1.0 / 3.0), ONE],
            [Complex64::new(1e-300, 7.0e200), Complex64::new(-std::f64::consts::PI, 0.0)],
        ]);
        let text = to_matrix_market(&a);
        assert!(text.starts_with("%%MatrixMarket matrix array complex general\n2 2\n"));
        assert_eq!(parse_matrix_market(&text).unwrap(), a);
    }
}
