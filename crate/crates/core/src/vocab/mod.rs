//! Frequency-ranked vocabulary and the sampling structures derived from it.

mod huffman;
mod sampler;

pub use huffman::{build_huffman, huffman_from_counts, HuffmanCoding};
pub use sampler::{build_negative_sampler, NegativeSampler, DEFAULT_NS_POWER};

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Default minimum count; the rarest published words all occur exactly five times.
pub const DEFAULT_MIN_COUNT: u64 = 5;

/// Word/id mapping sorted by descending count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    entries: Vec<(String, u64)>,
    index: HashMap<String, usize>,
    total_tokens: u64,
}

impl Vocabulary {
    /// Build from entries already in id order.
    ///
    /// Counts must be positive and non-increasing, words unique. Ties may
    /// appear in any order, so vocabularies loaded from files keep their ids.
    pub fn from_entries(entries: Vec<(String, u64)>, total_tokens: u64) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Format("vocabulary has no entries".into()));
        }
        let mut index = HashMap::with_capacity(entries.len());
        for (id, (word, count)) in entries.iter().enumerate() {
            if *count == 0 {
                return Err(Error::Format(format!("word {word:?} has zero count")));
            }
            if id > 0 && entries[id - 1].1 < *count {
                return Err(Error::Format(format!(
                    "counts must be non-increasing (word {word:?} at id {id})"
                )));
            }
            if index.insert(word.clone(), id).is_some() {
                return Err(Error::Format(format!("duplicate word {word:?}")));
            }
        }
        Ok(Vocabulary {
            entries,
            index,
            total_tokens,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: usize) -> &str {
        &self.entries[id].0
    }

    pub fn count(&self, id: usize) -> u64 {
        self.entries[id].1
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(w, _)| w.as_str())
    }

    /// Token count of the stream before min-count filtering.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    /// Sum of the counts of retained words.
    pub fn retained_tokens(&self) -> u64 {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    /// Write the `#total_tokens=N` header followed by `word\tcount` lines.
    pub fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "#total_tokens={}", self.total_tokens)?;
        for (word, count) in &self.entries {
            writeln!(w, "{word}\t{count}")?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let mut total = None;
        let mut entries = Vec::new();
        for (n, line) in r.split(b'\n').enumerate() {
            let line_no = n + 1;
            let bytes = line?;
            let line = std::str::from_utf8(&bytes).map_err(|_| Error::Utf8 { line: line_no })?;
            let line = line.strip_suffix('\r').unwrap_or(line);
            if n == 0 {
                let v = line
                    .strip_prefix("#total_tokens=")
                    .ok_or_else(|| Error::Parse {
                        line: 1,
                        msg: "expected #total_tokens=<N> header".into(),
                    })?;
                total = Some(v.parse::<u64>().map_err(|e| Error::Parse {
                    line: 1,
                    msg: e.to_string(),
                })?);
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let (word, count) = line.split_once('\t').ok_or_else(|| Error::Parse {
                line: line_no,
                msg: "expected word<TAB>count".into(),
            })?;
            let count = count.parse::<u64>().map_err(|e| Error::Parse {
                line: line_no,
                msg: e.to_string(),
            })?;
            entries.push((word.to_string(), count));
        }
        let total = total.ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        Vocabulary::from_entries(entries, total)
    }
}

/// Exact token counts of a space-separated token stream.
pub fn count_tokens<R: BufRead>(stream: R) -> Result<HashMap<String, u64>> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for (n, line) in stream.split(b'\n').enumerate() {
        let bytes = line?;
        let line = std::str::from_utf8(&bytes).map_err(|_| Error::Utf8 { line: n + 1 })?;
        for tok in line.split_ascii_whitespace() {
            match counts.get_mut(tok) {
                Some(c) => *c += 1,
                None => {
                    counts.insert(tok.to_string(), 1);
                }
            }
        }
    }
    Ok(counts)
}

/// Drop words under `min_count` and order the rest by count, then by word.
pub fn build_vocab<'a, I>(counts: I, min_count: u64) -> Result<Vocabulary>
where
    I: IntoIterator<Item = (&'a String, &'a u64)>,
{
    let mut total = 0u64;
    let mut entries: Vec<(String, u64)> = counts
        .into_iter()
        .inspect(|(_, &c)| total += c)
        .filter(|(_, &c)| c >= min_count && c > 0)
        .map(|(w, &c)| (w.clone(), c))
        .collect();
    if entries.is_empty() {
        return Err(Error::EmptyVocabulary(min_count));
    }
    entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Vocabulary::from_entries(entries, total)
}

/// A ranked slice of the vocabulary.
pub type FreqList = Vec<(String, u64)>;

/// The `k` most and `k` least frequent entries.
pub fn freq_table(vocab: &Vocabulary, k: usize) -> Result<(FreqList, FreqList)> {
    if k > vocab.len() {
        return Err(Error::TooManyEntries {
            k,
            size: vocab.len(),
        });
    }
    let e = vocab.entries();
    Ok((e[..k].to_vec(), e[e.len() - k..].to_vec()))
}

/// Probability of keeping one occurrence of a word during subsampling.
///
/// `min(1, (sqrt(c / (s·T)) + 1) · s·T / c)`. A non-positive threshold
/// disables subsampling.
pub fn keep_probability(count: u64, total_tokens: u64, sample: f64) -> f64 {
    if sample <= 0.0 {
        return 1.0;
    }
    let threshold = sample * total_tokens as f64;
    let ratio = count as f64 / threshold;
    ((ratio.sqrt() + 1.0) / ratio).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn counts(pairs: &[(&str, u64)]) -> HashMap<String, u64> {
        pairs.iter().map(|(w, c)| (w.to_string(), *c)).collect()
    }

    #[test]
    fn count_examples() {
        assert_eq!(
            count_tokens("а б а\n".as_bytes()).unwrap(),
            counts(&[("а", 2), ("б", 1)])
        );
        assert!(count_tokens("".as_bytes()).unwrap().is_empty());
        assert_eq!(
            count_tokens("а\nа\n".as_bytes()).unwrap(),
            counts(&[("а", 2)])
        );
    }

    #[test]
    fn count_rejects_bad_utf8() {
        let bytes: &[u8] = b"ok\n\xff\xfe\n";
        assert!(matches!(count_tokens(bytes), Err(Error::Utf8 { line: 2 })));
    }

    #[test]
    fn build_examples() {
        let v = build_vocab(&counts(&[("x", 5), ("y", 4)]), 5).unwrap();
        assert_eq!(v.entries(), &[("x".to_string(), 5)]);
        assert_eq!(v.total_tokens(), 9);

        let v = build_vocab(&counts(&[("b", 2), ("a", 2)]), 1).unwrap();
        assert_eq!(v.entries(), &[("a".to_string(), 2), ("b".to_string(), 2)]);

        let v = build_vocab(&counts(&[("ва", 3), ("бир", 2), ("шу", 1)]), 1).unwrap();
        assert_eq!(
            (v.id("ва"), v.id("бир"), v.id("шу")),
            (Some(0), Some(1), Some(2))
        );
    }

    #[test]
    fn build_empty_errors() {
        let err = build_vocab(&counts(&[("x", 1)]), 5).unwrap_err();
        assert_eq!(err.to_string(), "vocabulary empty at min_count 5");
        assert!(build_vocab(&HashMap::new(), 1).is_err());
    }

    #[test]
    fn freq_table_examples() {
        let v = build_vocab(&counts(&[("ва", 3), ("бир", 2), ("шу", 1)]), 1).unwrap();
        let (top, bottom) = freq_table(&v, 2).unwrap();
        assert_eq!(top, vec![("ва".to_string(), 3), ("бир".to_string(), 2)]);
        assert_eq!(bottom, vec![("бир".to_string(), 2), ("шу".to_string(), 1)]);
        assert_eq!(freq_table(&v, 0).unwrap(), (vec![], vec![]));
        assert!(freq_table(&v, 4).is_err());
    }

    #[test]
    fn keep_probability_examples() {
        assert_eq!(keep_probability(100, 100_000, 1e-3), 1.0);
        assert!((keep_probability(10_000, 100_000, 1e-3) - 0.11).abs() < 1e-12);
        assert_eq!(keep_probability(50, 100_000, 1e-3), 1.0);
        assert_eq!(keep_probability(10_000, 100_000, 0.0), 1.0);
    }

    #[test]
    fn vocab_file_round_trip() {
        let v = build_vocab(&counts(&[("ва", 3), ("бир", 2), ("шу", 2)]), 1).unwrap();
        let mut buf = Vec::new();
        v.write(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "#total_tokens=7\nва\t3\nбир\t2\nшу\t2\n"
        );
        assert_eq!(Vocabulary::read(&buf[..]).unwrap(), v);
    }

    #[test]
    fn vocab_file_errors() {
        assert!(Vocabulary::read("ва\t3\n".as_bytes()).is_err());
        assert!(matches!(
            Vocabulary::read("#total_tokens=3\nва 3\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(Vocabulary::read("#total_tokens=3\nа\t1\nб\t2\n".as_bytes()).is_err());
        assert!(Vocabulary::read("#total_tokens=3\nа\t1\nа\t1\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn build_is_insertion_order_independent(
            map in prop::collection::hash_map("[a-e]{1,3}", 1u64..20, 1..30),
            min_count in 1u64..5,
        ) {
            let mut forward: Vec<(String, u64)> = map.into_iter().collect();
            forward.sort();
            let mut backward = forward.clone();
            backward.reverse();
            let a = build_vocab(forward.iter().map(|(w, c)| (w, c)), min_count);
            let b = build_vocab(backward.iter().map(|(w, c)| (w, c)), min_count);
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    prop_assert_eq!(&a, &b);
                    for w in a.entries().windows(2) {
                        prop_assert!(w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0));
                    }
                    for (id, (word, c)) in a.entries().iter().enumerate() {
                        prop_assert!(*c >= min_count);
                        prop_assert_eq!(a.id(word), Some(id));
                    }
                }
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "insertion order changed the outcome"),
            }
        }

        #[test]
        fn keep_probability_monotone(total in 1000u64..1_000_000, c1 in 1u64..1_000_000, c2 in 1u64..1_000_000) {
            let sample = 1e-3;
            let threshold = (sample * total as f64).ceil() as u64;
            let (lo, hi) = if c1 < c2 { (c1, c2) } else { (c2, c1) };
            if lo >= threshold {
                prop_assert!(keep_probability(hi, total, sample) <= keep_probability(lo, total, sample));
            }
        }
    }
}
