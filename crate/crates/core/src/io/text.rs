use std::io::{BufRead, Write};

use super::{check_finite, finish};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::WordVectors;
use crate::Real;

// Preallocation cap for counts taken from a header.
const PREALLOC_ROWS: usize = 1 << 16;

/// `vocab_size dim` header, then one `word v1 … vd` line per word.
///
/// Values are written with 17 significant digits, enough to read back the
/// identical `f32` or `f64`.
pub fn write_text<F: Real, W: Write>(vectors: &WordVectors<F>, w: &mut W) -> Result<()> {
    check_finite(vectors.vectors.as_slice())?;
    writeln!(w, "{} {}", vectors.len(), vectors.dim())?;
    for (word, row) in vectors.words.iter().zip(vectors.vectors.iter_rows()) {
        w.write_all(word.as_bytes())?;
        for x in row {
            write!(w, " {:.16e}", x.as_f64())?;
        }
        w.write_all(b"\n")?;
    }
    finish(w)
}

/// Parse a text vector file. With `header = false` (GloVe style) the
/// dimension is inferred from the first row.
pub fn read_text<F: Real, R: BufRead>(r: R, header: bool) -> Result<WordVectors<F>> {
    let mut expected_rows = None;
    let mut dim = None;
    let mut words = Vec::new();
    let mut data: Vec<F> = Vec::new();

    for (n, line) in r.split(b'\n').enumerate() {
        let line_no = n + 1;
        let bytes = line?;
        let line = std::str::from_utf8(&bytes).map_err(|_| Error::Utf8 { line: line_no })?;
        let line = line.strip_suffix('\r').unwrap_or(line);
        let parse_err = |msg: String| Error::Parse { line: line_no, msg };

        if header && n == 0 {
            let mut it = line.split_ascii_whitespace();
            let (Some(rows), Some(d), None) = (it.next(), it.next(), it.next()) else {
                return Err(parse_err("expected header \"<vocab_size> <dim>\"".into()));
            };
            let rows: usize = rows
                .parse()
                .map_err(|_| parse_err(format!("bad vocab size {rows:?}")))?;
            let d: usize = d
                .parse()
                .map_err(|_| parse_err(format!("bad dimension {d:?}")))?;
            if d == 0 {
                return Err(parse_err("dimension must be at least 1".into()));
            }
            expected_rows = Some(rows);
            dim = Some(d);
            words.reserve(rows.min(PREALLOC_ROWS));
            data.reserve(rows.min(PREALLOC_ROWS) * d);
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }

        let mut fields = line.split_ascii_whitespace();
        let word = fields.next().expect("non-empty line has a field");
        let before = data.len();
        for f in fields {
            let x = F::from_str_radix(f, 10)
                .map_err(|_| parse_err(format!("non-numeric field {f:?}")))?;
            data.push(x);
        }
        let got = data.len() - before;
        match dim {
            None if got == 0 => return Err(parse_err("row has no values".into())),
            None => dim = Some(got),
            Some(d) if d != got => {
                return Err(parse_err(format!("expected {d} values, found {got}")));
            }
            Some(_) => {}
        }
        words.push(word.to_string());
        if let Some(rows) = expected_rows {
            if words.len() > rows {
                return Err(parse_err(format!(
                    "more rows than the {rows} in the header"
                )));
            }
        }
    }

    let dim = dim.ok_or_else(|| Error::Format("empty vector file".into()))?;
    if let Some(rows) = expected_rows {
        if words.len() != rows {
            return Err(Error::Format(format!(
                "header declares {rows} rows, file has {}",
                words.len()
            )));
        }
    }
    if words.is_empty() {
        return Err(Error::Format("vector file has no rows".into()));
    }
    let rows = words.len();
    Ok(WordVectors::new(words, Matrix::from_vec(rows, dim, data)))
}
