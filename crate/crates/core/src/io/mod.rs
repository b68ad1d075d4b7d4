//! Model serialization: word2vec-style text and binary vector files, and a
//! native format that keeps subword rows, output weights and the training
//! configuration.

mod binary;
mod native;
mod text;

pub use binary::{read_binary, write_binary};
pub use native::{read_native, write_native, MAGIC};
pub use text::{read_text, write_text};

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::EmbeddingModel;
use crate::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Binary,
    Native,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Binary => "binary",
            Format::Native => "native",
        })
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" | "txt" | "vec" => Ok(Format::Text),
            "binary" | "bin" => Ok(Format::Binary),
            "native" => Ok(Format::Native),
            other => Err(Error::Config(format!("unknown model format {other:?}"))),
        }
    }
}

/// Write through a temporary file in the destination directory, then
/// rename over `path`.
pub fn write_atomic<P, F>(path: P, body: F) -> Result<()>
where
    P: AsRef<Path>,
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let path = path.as_ref();
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut w = BufWriter::new(File::create(&tmp)?);
        body(&mut w)?;
        let file = w.into_inner().map_err(|e| e.into_error())?;
        file.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Save a model. Text and binary keep only the per-word vectors.
pub fn save<F: Real>(
    model: &EmbeddingModel<F>,
    path: impl AsRef<Path>,
    format: Format,
) -> Result<()> {
    write_atomic(path, |w| match format {
        Format::Text => write_text(&model.to_word_vectors(), w),
        Format::Binary => write_binary(&model.to_word_vectors(), w),
        Format::Native => write_native(model, w),
    })
}

/// Load a model; text and binary files become imported models.
pub fn load<F: Real>(path: impl AsRef<Path>, format: Format) -> Result<EmbeddingModel<F>> {
    let bytes = fs::read(path)?;
    load_bytes(&bytes, format)
}

fn load_bytes<F: Real>(bytes: &[u8], format: Format) -> Result<EmbeddingModel<F>> {
    match format {
        Format::Text => read_text(bytes, true)?.into_model(),
        Format::Binary => read_binary(bytes)?.into_model(),
        Format::Native => read_native(bytes),
    }
}

/// Guess the format of a model file: native by magic, otherwise text if
/// the body parses as text, otherwise binary.
pub fn detect_format(bytes: &[u8]) -> Format {
    if bytes.starts_with(&MAGIC[..3]) {
        Format::Native
    } else if read_text::<f32, _>(bytes, true).is_ok() {
        Format::Text
    } else {
        Format::Binary
    }
}

/// Load a model of any supported format.
pub fn load_any<F: Real>(path: impl AsRef<Path>) -> Result<EmbeddingModel<F>> {
    let bytes = fs::read(path)?;
    load_bytes(&bytes, detect_format(&bytes))
}

/// Copy a model file between formats.
pub fn convert(from: &Path, from_format: Format, to: &Path, to_format: Format) -> Result<()> {
    let model: EmbeddingModel<f32> = load(from, from_format)?;
    save(&model, to, to_format)
}

pub(crate) fn check_finite<F: Real>(data: &[F]) -> Result<()> {
    if data.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Flush helper so writers can be used with `&mut W` of any kind.
pub(crate) fn finish<W: Write>(w: &mut W) -> Result<()> {
    w.flush()?;
    Ok(())
}
