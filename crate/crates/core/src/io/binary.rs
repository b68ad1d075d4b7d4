use std::io::{Read, Write};

use byteorder::{LittleEndian, WriteBytesExt};

use super::{check_finite, finish};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::WordVectors;
use crate::Real;

/// word2vec binary layout: `"<vocab_size> <dim>\n"`, then per word its
/// UTF-8 bytes, a space, `dim` little-endian `f32` values and `\n`.
pub fn write_binary<F: Real, W: Write>(vectors: &WordVectors<F>, w: &mut W) -> Result<()> {
    check_finite(vectors.vectors.as_slice())?;
    writeln!(w, "{} {}", vectors.len(), vectors.dim())?;
    for (word, row) in vectors.words.iter().zip(vectors.vectors.iter_rows()) {
        w.write_all(word.as_bytes())?;
        w.write_all(b" ")?;
        for x in row {
            w.write_f32::<LittleEndian>(x.to_f32().expect("finite"))?;
        }
        w.write_all(b"\n")?;
    }
    finish(w)
}

pub fn read_binary<F: Real, R: Read>(mut r: R) -> Result<WordVectors<F>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    parse(&bytes)
}

fn parse<F: Real>(bytes: &[u8]) -> Result<WordVectors<F>> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Format("missing header line".into()))?;
    let header = std::str::from_utf8(&bytes[..nl]).map_err(|_| Error::Utf8 { line: 1 })?;
    let mut it = header.split_ascii_whitespace();
    let (Some(n), Some(dim), None) = (it.next(), it.next(), it.next()) else {
        return Err(Error::Parse {
            line: 1,
            msg: "expected header \"<vocab_size> <dim>\"".into(),
        });
    };
    let bad = |what: &str| Error::Parse {
        line: 1,
        msg: format!("bad {what}"),
    };
    let n: usize = n.parse().map_err(|_| bad("vocab size"))?;
    let dim: usize = dim.parse().map_err(|_| bad("dimension"))?;
    if n == 0 || dim == 0 {
        return Err(Error::Format(
            "vocab size and dimension must be at least 1".into(),
        ));
    }

    let mut cur = &bytes[nl + 1..];
    // Every row needs at least one word byte, a space, the values and a newline.
    let min_row = dim
        .checked_mul(4)
        .and_then(|v| v.checked_add(3))
        .ok_or_else(|| Error::Format("dimension too large".into()))?;
    if n.checked_mul(min_row).is_none_or(|need| need > cur.len()) {
        return Err(Error::Format(format!(
            "header declares {n} x {dim} but the file holds only {} bytes",
            cur.len()
        )));
    }

    let mut words = Vec::with_capacity(n);
    let mut data = Vec::with_capacity(n * dim);
    for idx in 0..n {
        let truncated = || Error::Format(format!("file truncated at word index {idx}"));
        let sp = cur.iter().position(|&b| b == b' ').ok_or_else(truncated)?;
        let word = std::str::from_utf8(&cur[..sp])
            .map_err(|_| Error::Format(format!("word index {idx} is not valid UTF-8")))?;
        // Tolerate files that omit the trailing newline after each vector.
        let word = word.trim_start_matches('\n');
        if word.is_empty() {
            return Err(Error::Format(format!("empty word at index {idx}")));
        }
        words.push(word.to_string());
        cur = &cur[sp + 1..];
        if cur.len() < 4 * dim {
            return Err(truncated());
        }
        for chunk in cur[..4 * dim].chunks_exact(4) {
            let v = f32::from_le_bytes(chunk.try_into().expect("4-byte chunk"));
            data.push(F::of(v as f64));
        }
        cur = &cur[4 * dim..];
        if cur.first() == Some(&b'\n') {
            cur = &cur[1..];
        }
    }
    if !cur.is_empty() {
        return Err(Error::Format(format!(
            "{} trailing bytes after {n} rows",
            cur.len()
        )));
    }
    Ok(WordVectors::new(words, Matrix::from_vec(n, dim, data)))
}
