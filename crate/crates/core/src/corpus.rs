use std::io::BufRead;

use crate::error::{Error, Result};
use crate::vocab::Vocabulary;

/// A token stream mapped to vocabulary ids, one sentence per input line.
///
/// Out-of-vocabulary tokens are dropped before windows are formed, and
/// lines left empty are skipped.
#[derive(Clone, Debug)]
pub struct EncodedCorpus {
    ids: Vec<u32>,
    offsets: Vec<usize>,
}

impl Default for EncodedCorpus {
    fn default() -> Self {
        EncodedCorpus {
            ids: Vec::new(),
            offsets: vec![0],
        }
    }
}

impl EncodedCorpus {
    pub fn from_reader<R: BufRead>(reader: R, vocab: &Vocabulary) -> Result<Self> {
        let mut ids = Vec::new();
        let mut offsets = vec![0];
        for (n, line) in reader.split(b'\n').enumerate() {
            let bytes = line?;
            let line = std::str::from_utf8(&bytes).map_err(|_| Error::Utf8 { line: n + 1 })?;
            let before = ids.len();
            ids.extend(
                line.split_ascii_whitespace()
                    .filter_map(|t| vocab.id(t))
                    .map(|id| id as u32),
            );
            if ids.len() > before {
                offsets.push(ids.len());
            }
        }
        Ok(EncodedCorpus { ids, offsets })
    }

    pub fn from_text(text: &str, vocab: &Vocabulary) -> Result<Self> {
        Self::from_reader(text.as_bytes(), vocab)
    }

    pub fn from_sentences(sentences: &[Vec<u32>]) -> Self {
        let mut ids = Vec::new();
        let mut offsets = vec![0];
        for s in sentences.iter().filter(|s| !s.is_empty()) {
            ids.extend_from_slice(s);
            offsets.push(ids.len());
        }
        EncodedCorpus { ids, offsets }
    }

    pub fn num_sentences(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_tokens(&self) -> usize {
        self.ids.len()
    }

    pub fn sentence(&self, i: usize) -> &[u32] {
        &self.ids[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn sentences(&self) -> impl Iterator<Item = &[u32]> {
        (0..self.num_sentences()).map(move |i| self.sentence(i))
    }

    /// Sentence index ranges for `parts` workers, balanced by token count.
    pub(crate) fn partition(&self, parts: usize) -> Vec<std::ops::Range<usize>> {
        let n = self.num_sentences();
        let parts = parts.clamp(1, n.max(1));
        let total = self.num_tokens();
        let mut ranges = Vec::with_capacity(parts);
        let mut start = 0;
        for p in 1..=parts {
            let target = total * p / parts;
            let mut end = start;
            while end < n && (self.offsets[end + 1] <= target || end == start) {
                end += 1;
            }
            if p == parts {
                end = n;
            }
            ranges.push(start..end);
            start = end;
        }
        ranges
    }
}
