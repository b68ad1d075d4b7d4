//! Subword-aware training: every word is the mean of its own row and the
//! rows of its hashed character n-grams.

use crate::config::{Algorithm, TrainConfig};
use crate::corpus::EncodedCorpus;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::EmbeddingModel;
use crate::scalar::axpy;
use crate::sgd::{worker_rng, Engine, InputSets, OutputLayer, TrainReport};
use crate::vocab::{build_negative_sampler, Vocabulary};
use crate::word2vec::check_corpus;
use crate::Real;

pub const BOW: char = '<';
pub const EOW: char = '>';

/// Character n-grams of `<word>` with `minn <= n <= maxn`, shortest first
/// and left to right within a length. The whole wrapped word is excluded.
pub fn subwords(word: &str, minn: usize, maxn: usize) -> Vec<String> {
    let wrapped: Vec<char> = std::iter::once(BOW)
        .chain(word.chars())
        .chain(std::iter::once(EOW))
        .collect();
    let len = wrapped.len();
    let mut out = Vec::new();
    for n in minn.max(1)..=maxn.min(len) {
        if n == len {
            // the only n-gram of this length is the full wrapped word
            continue;
        }
        for start in 0..=len - n {
            out.push(wrapped[start..start + n].iter().collect());
        }
    }
    out
}

/// 32-bit FNV-1a over the UTF-8 bytes of an n-gram.
pub fn ngram_hash(ngram: &[u8]) -> u32 {
    let mut h: u32 = 2_166_136_261;
    for &b in ngram {
        h ^= b as u32;
        h = h.wrapping_mul(16_777_619);
    }
    h
}

/// Input-matrix row of an n-gram.
#[inline]
pub fn bucket_row(ngram: &str, vocab_size: usize, bucket: usize) -> u32 {
    (vocab_size + (ngram_hash(ngram.as_bytes()) as usize % bucket)) as u32
}

/// Bucket rows of every n-gram of `word`, in [`subwords`] order.
pub fn ngram_rows(word: &str, vocab_size: usize, config: &TrainConfig) -> Vec<u32> {
    subwords(word, config.minn, config.maxn)
        .iter()
        .map(|g| bucket_row(g, vocab_size, config.bucket))
        .collect()
}

/// Input rows representing every vocabulary word: its own row first, then
/// its n-gram rows.
pub fn subword_index(vocab: &Vocabulary, config: &TrainConfig) -> Vec<Vec<u32>> {
    vocab
        .words()
        .enumerate()
        .map(|(id, w)| {
            let mut rows = vec![id as u32];
            rows.extend(ngram_rows(w, vocab.len(), config));
            rows
        })
        .collect()
}

fn mean_rows<F: Real>(m: &Matrix<F>, rows: &[u32]) -> Vec<F> {
    let mut v = vec![F::zero(); m.cols()];
    if rows.is_empty() {
        return v;
    }
    for &r in rows {
        axpy(F::one(), m.row(r as usize), &mut v);
    }
    let inv = F::one() / F::of(rows.len() as f64);
    v.iter_mut().for_each(|x| *x *= inv);
    v
}

/// Mean of the word's own row and its n-gram rows.
pub fn word_representation<F: Real>(model: &EmbeddingModel<F>, id: usize) -> Vec<F> {
    let mut rows = vec![id as u32];
    rows.extend(ngram_rows(
        model.vocab.word(id),
        model.vocab.len(),
        &model.config,
    ));
    mean_rows(&model.input, &rows)
}

/// Composed vector of an out-of-vocabulary word: mean of its n-gram rows,
/// or zeros when it has none.
pub fn oov_vector<F: Real>(model: &EmbeddingModel<F>, word: &str) -> Vec<F> {
    mean_rows(
        &model.input,
        &ngram_rows(word, model.vocab.len(), &model.config),
    )
}

/// Train subword vectors. See [`train_fasttext_with_report`].
pub fn train_fasttext<F: Real>(
    corpus: &EncodedCorpus,
    vocab: &Vocabulary,
    config: &TrainConfig,
) -> Result<EmbeddingModel<F>> {
    train_fasttext_with_report(corpus, vocab, config).map(|(m, _)| m)
}

/// Negative-sampling training where the input side of a word is the row
/// set from [`subword_index`]. Skipgram predicts each context word from the
/// center word's set; CBOW predicts the center from the union of the
/// context words' sets. Input rows start uniform in `[-1/dim, 1/dim)`.
pub fn train_fasttext_with_report<F: Real>(
    corpus: &EncodedCorpus,
    vocab: &Vocabulary,
    config: &TrainConfig,
) -> Result<(EmbeddingModel<F>, TrainReport)> {
    if config.algorithm != Algorithm::FastText {
        return Err(Error::Config(format!(
            "expected a fasttext config, got {}",
            config.algorithm
        )));
    }
    config.validate()?;
    check_corpus(corpus, vocab)?;

    let dim = config.dim;
    let mut rng = worker_rng(config.seed, 0);
    let input = Matrix::uniform(vocab.len() + config.bucket, dim, 1.0 / dim as f64, &mut rng);
    let sets = subword_index(vocab, config);
    let sampler = build_negative_sampler(vocab, config.ns_power);
    let engine = Engine {
        corpus,
        vocab,
        config,
        layer: OutputLayer::Negative {
            sampler: &sampler,
            negatives: config.negatives,
        },
        sets: InputSets::Subwords(&sets),
    };
    let (input, output, report) = engine.run(input, Matrix::zeros(vocab.len(), dim));
    let model = EmbeddingModel {
        config: config.clone(),
        vocab: vocab.clone(),
        input,
        output,
    };
    if !model.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Architecture;
    use crate::vocab::{build_vocab, count_tokens};
    use proptest::prelude::*;

    #[test]
    fn subword_examples() {
        assert_eq!(
            subwords("сув", 2, 5),
            vec!["<с", "су", "ув", "в>", "<су", "сув", "ув>", "<сув", "сув>"]
        );
        assert_eq!(subwords("а", 2, 5), vec!["<а", "а>"]);
        assert!(subwords("аб", 4, 4).is_empty());
    }

    #[test]
    fn hash_vectors() {
        assert_eq!(ngram_hash(b""), 2_166_136_261);
        assert_eq!(ngram_hash(b"a"), 0xE40C_292C);
        assert_eq!(ngram_hash(b"foobar"), 0xBF9C_F968);
        assert_eq!(ngram_hash("су".as_bytes()), ngram_hash("су".as_bytes()));
    }

    // Independent enumerator over all (start, len) pairs.
    fn enumerate(word: &str, minn: usize, maxn: usize) -> Vec<String> {
        let w: Vec<char> = format!("<{word}>").chars().collect();
        let mut v = Vec::new();
        for n in minn..=maxn {
            for s in 0..w.len() {
                if s + n <= w.len() && !(s == 0 && n == w.len()) {
                    v.push(w[s..s + n].iter().collect::<String>());
                }
            }
        }
        v
    }

    proptest! {
        #[test]
        fn subwords_match_enumerator(word in "[а-яўқғҳ-]{1,12}", minn in 1usize..4, extra in 0usize..4) {
            let maxn = minn + extra;
            let got = subwords(&word, minn, maxn);
            prop_assert_eq!(&got, &enumerate(&word, minn, maxn));
            let l = word.chars().count() + 2;
            let mut expected: usize = (minn..=maxn).map(|n| (l + 1).saturating_sub(n)).sum();
            if (minn..=maxn).contains(&l) {
                expected -= 1;
            }
            prop_assert_eq!(got.len(), expected);
        }
    }

    fn tiny_model() -> EmbeddingModel<f64> {
        let text = "сув тоза сувни\n";
        let vocab = build_vocab(&count_tokens(text.as_bytes()).unwrap(), 1).unwrap();
        let mut config = TrainConfig::fasttext(Architecture::Skipgram);
        config.dim = 3;
        config.bucket = 11;
        let mut rng = worker_rng(5, 0);
        EmbeddingModel {
            input: Matrix::uniform(vocab.len() + 11, 3, 1.0, &mut rng),
            output: Matrix::zeros(vocab.len(), 3),
            vocab,
            config,
        }
    }

    #[test]
    fn representation_is_gathered_mean() {
        let m = tiny_model();
        for id in 0..m.vocab.len() {
            let w = m.vocab.word(id);
            let mut rows = vec![m.input.row(id).to_vec()];
            for g in enumerate(w, 2, 5) {
                let h = ngram_hash(g.as_bytes()) as usize % 11;
                rows.push(m.input.row(m.vocab.len() + h).to_vec());
            }
            let got = word_representation(&m, id);
            for k in 0..3 {
                let mean = rows.iter().map(|r| r[k]).sum::<f64>() / rows.len() as f64;
                assert!((got[k] - mean).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn representation_without_ngrams_is_own_row() {
        let mut m = tiny_model();
        m.config.minn = 9;
        m.config.maxn = 9;
        assert_eq!(word_representation(&m, 1), m.input.row(1).to_vec());
        assert_eq!(oov_vector(&m, "қуш"), vec![0.0; 3]);
    }

    #[test]
    fn equal_rows_compose_to_themselves() {
        let mut m = tiny_model();
        let v = [0.25, -0.5, 1.0];
        for r in 0..m.input.rows() {
            m.input.row_mut(r).copy_from_slice(&v);
        }
        assert_eq!(word_representation(&m, 0), v.to_vec());
        assert_eq!(oov_vector(&m, "қушлар"), v.to_vec());
    }

    #[test]
    fn oov_matches_oracle() {
        let m = tiny_model();
        let grams = enumerate("қушлар", 2, 5);
        let mut mean = [0.0; 3];
        for g in &grams {
            let r = m.vocab.len() + ngram_hash(g.as_bytes()) as usize % 11;
            for (acc, x) in mean.iter_mut().zip(m.input.row(r)) {
                *acc += x / grams.len() as f64;
            }
        }
        let got = oov_vector(&m, "қушлар");
        for k in 0..3 {
            assert!((got[k] - mean[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn training_shapes_and_determinism() {
        let text = "сув тоза сувни ер\nтоза ер сув\n".repeat(40);
        let vocab = build_vocab(&count_tokens(text.as_bytes()).unwrap(), 1).unwrap();
        let corpus = EncodedCorpus::from_text(&text, &vocab).unwrap();
        for arch in [Architecture::Cbow, Architecture::Skipgram] {
            let mut cfg = TrainConfig::fasttext(arch);
            cfg.dim = 6;
            cfg.bucket = 100;
            cfg.epochs = 2;
            let a: EmbeddingModel<f32> = train_fasttext(&corpus, &vocab, &cfg).unwrap();
            let b: EmbeddingModel<f32> = train_fasttext(&corpus, &vocab, &cfg).unwrap();
            assert_eq!(a.input.rows(), vocab.len() + 100);
            assert_eq!(a.output.rows(), vocab.len());
            assert_eq!(a, b);
        }
    }
}
