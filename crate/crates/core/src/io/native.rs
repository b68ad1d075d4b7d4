//! Native model layout, all integers little-endian:
//!
//! ```text
//! "UZV1"
//! u32 header length, header bytes     config as key=value lines
//! u64 total_tokens, u64 vocab size
//!   per word: u32 byte length, UTF-8 bytes, u64 count
//! u64 rows, u64 cols, rows*cols f32   input matrix
//! u64 rows, u64 cols, rows*cols f32   output matrix
//! ```

use std::io::{Read, Write};

use byteorder::{LittleEndian, WriteBytesExt};

use super::{check_finite, finish};
use crate::config::{Algorithm, TrainConfig};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::EmbeddingModel;
use crate::vocab::Vocabulary;
use crate::Real;

pub const MAGIC: [u8; 4] = *b"UZV1";

pub fn write_native<F: Real, W: Write>(model: &EmbeddingModel<F>, w: &mut W) -> Result<()> {
    check_finite(model.input.as_slice())?;
    check_finite(model.output.as_slice())?;
    w.write_all(&MAGIC)?;
    let header = model.config.to_text();
    w.write_u32::<LittleEndian>(header.len() as u32)?;
    w.write_all(header.as_bytes())?;

    w.write_u64::<LittleEndian>(model.vocab.total_tokens())?;
    w.write_u64::<LittleEndian>(model.vocab.len() as u64)?;
    for (word, count) in model.vocab.entries() {
        w.write_u32::<LittleEndian>(word.len() as u32)?;
        w.write_all(word.as_bytes())?;
        w.write_u64::<LittleEndian>(*count)?;
    }
    for m in [&model.input, &model.output] {
        w.write_u64::<LittleEndian>(m.rows() as u64)?;
        w.write_u64::<LittleEndian>(m.cols() as u64)?;
        for x in m.as_slice() {
            w.write_f32::<LittleEndian>(x.to_f32().expect("finite"))?;
        }
    }
    finish(w)
}

/// Bounds-checked cursor over the file contents.
struct Cursor<'a>(&'a [u8]);

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if n > self.0.len() {
            return Err(Error::Format(format!(
                "truncated native model: {what} needs {n} bytes, {} left",
                self.0.len()
            )));
        }
        let (head, tail) = self.0.split_at(n);
        self.0 = tail;
        Ok(head)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4, what)?.try_into().expect("4 bytes"),
        ))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(
            self.take(8, what)?.try_into().expect("8 bytes"),
        ))
    }

    /// A count whose elements each occupy at least `min_bytes`.
    fn count(&mut self, min_bytes: usize, what: &str) -> Result<usize> {
        let n = self.u64(what)?;
        let n = usize::try_from(n).map_err(|_| Error::Format(format!("{what} too large")))?;
        if n.checked_mul(min_bytes).is_none_or(|b| b > self.0.len()) {
            return Err(Error::Format(format!(
                "{what} {n} exceeds the remaining {} bytes",
                self.0.len()
            )));
        }
        Ok(n)
    }

    fn matrix<F: Real>(&mut self, what: &str) -> Result<Matrix<F>> {
        let rows = self.count(0, what)?;
        let cols = self.count(0, what)?;
        let len = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(4))
            .ok_or_else(|| Error::Format(format!("{what} shape overflows")))?;
        let bytes = self.take(len, what)?;
        let data = bytes
            .chunks_exact(4)
            .map(|c| F::of(f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64))
            .collect();
        Ok(Matrix::from_vec(rows, cols, data))
    }
}

pub fn read_native<F: Real, R: Read>(mut r: R) -> Result<EmbeddingModel<F>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut c = Cursor(&bytes);

    let magic = c.take(4, "magic")?;
    if magic[..3] != MAGIC[..3] {
        return Err(Error::Format("not a native model file (bad magic)".into()));
    }
    if magic[3] != MAGIC[3] {
        return Err(Error::Format(format!(
            "unsupported native model version {:?}",
            magic[3] as char
        )));
    }

    let header_len = c.u32("header length")? as usize;
    let header = std::str::from_utf8(c.take(header_len, "header")?)
        .map_err(|_| Error::Format("header is not valid UTF-8".into()))?;
    let config = TrainConfig::from_text(header)?;

    let total_tokens = c.u64("total tokens")?;
    let n = c.count(12, "vocabulary size")?;
    let mut entries = Vec::with_capacity(n);
    for idx in 0..n {
        let len = c.u32("word length")? as usize;
        let word = std::str::from_utf8(c.take(len, "word")?)
            .map_err(|_| Error::Format(format!("word {idx} is not valid UTF-8")))?;
        let count = c.u64("word count")?;
        entries.push((word.to_string(), count));
    }
    let vocab = Vocabulary::from_entries(entries, total_tokens)?;

    let input: Matrix<F> = c.matrix("input matrix")?;
    let output: Matrix<F> = c.matrix("output matrix")?;
    if !c.0.is_empty() {
        return Err(Error::Format(format!("{} trailing bytes", c.0.len())));
    }
    let (v, rows) = (vocab.len(), input.rows());
    let rows_ok =
        rows == v || (config.algorithm == Algorithm::FastText && rows == v + config.bucket);
    if !rows_ok {
        return Err(Error::Format(format!(
            "input matrix has {rows} rows for {v} words"
        )));
    }
    if input.cols() != config.dim || (output.rows() > 0 && output.cols() != config.dim) {
        return Err(Error::Format(
            "matrix width disagrees with configured dim".into(),
        ));
    }
    Ok(EmbeddingModel {
        config,
        vocab,
        input,
        output,
    })
}
