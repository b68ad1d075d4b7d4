//! CBOW and skipgram training with negative sampling or hierarchical softmax.

use crate::config::{Algorithm, Loss, TrainConfig};
use crate::corpus::EncodedCorpus;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::EmbeddingModel;
use crate::sgd::{worker_rng, Engine, InputSets, OutputLayer, TrainReport};
use crate::vocab::{build_huffman, build_negative_sampler, Vocabulary};
use crate::Real;

pub(crate) fn check_corpus(corpus: &EncodedCorpus, vocab: &Vocabulary) -> Result<()> {
    if corpus.num_tokens() == 0 {
        return Err(Error::EmptyInput(
            "no in-vocabulary tokens in the stream".into(),
        ));
    }
    if corpus
        .sentences()
        .flatten()
        .any(|&id| id as usize >= vocab.len())
    {
        return Err(Error::Config(
            "corpus ids exceed the vocabulary size".into(),
        ));
    }
    Ok(())
}

/// Train word2vec vectors. See [`train_word2vec_with_report`].
pub fn train_word2vec<F: Real>(
    corpus: &EncodedCorpus,
    vocab: &Vocabulary,
    config: &TrainConfig,
) -> Result<EmbeddingModel<F>> {
    train_word2vec_with_report(corpus, vocab, config).map(|(m, _)| m)
}

/// Train word2vec vectors and report the mean loss of every epoch.
///
/// Input rows start uniform in `[-0.5/dim, 0.5/dim)`, output rows at zero.
/// With `workers = 1` the result is a deterministic function of the
/// inputs and the seed.
pub fn train_word2vec_with_report<F: Real>(
    corpus: &EncodedCorpus,
    vocab: &Vocabulary,
    config: &TrainConfig,
) -> Result<(EmbeddingModel<F>, TrainReport)> {
    if config.algorithm != Algorithm::Word2Vec {
        return Err(Error::Config(format!(
            "expected a word2vec config, got {}",
            config.algorithm
        )));
    }
    config.validate()?;
    check_corpus(corpus, vocab)?;

    let dim = config.dim;
    let input = init_input(vocab.len(), dim, config.seed);

    let (input, output, report) = match config.loss {
        Loss::NegativeSampling => {
            let sampler = build_negative_sampler(vocab, config.ns_power);
            let engine = Engine {
                corpus,
                vocab,
                config,
                layer: OutputLayer::Negative {
                    sampler: &sampler,
                    negatives: config.negatives,
                },
                sets: InputSets::Words((0..vocab.len() as u32).collect()),
            };
            engine.run(input, Matrix::zeros(vocab.len(), dim))
        }
        Loss::HierarchicalSoftmax => {
            let huffman = build_huffman(vocab);
            let engine = Engine {
                corpus,
                vocab,
                config,
                layer: OutputLayer::Hierarchical { huffman: &huffman },
                sets: InputSets::Words((0..vocab.len() as u32).collect()),
            };
            engine.run(input, Matrix::zeros(huffman.inner_nodes(), dim))
        }
    };

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

/// Initial input matrix: uniform in `[-0.5/dim, 0.5/dim)` under `seed`.
pub fn init_input<F: Real>(rows: usize, dim: usize, seed: u64) -> Matrix<F> {
    let mut rng = worker_rng(seed, 0);
    Matrix::uniform(rows, dim, 0.5 / dim as f64, &mut rng)
}
