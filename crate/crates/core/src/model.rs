use crate::config::{Algorithm, TrainConfig};
use crate::error::{Error, Result};
use crate::fasttext;
use crate::matrix::Matrix;
use crate::vocab::Vocabulary;
use crate::Real;

/// A trained (or imported) embedding model.
///
/// `input` holds one row per vocabulary word, followed by the hashed
/// n-gram rows for fastText models (a fastText model stored without its
/// bucket rows answers whole-word queries only). `output` holds the negative-sampling
/// rows (one per word), the hierarchical-softmax inner nodes
/// (`vocab_size - 1` rows), or nothing for GloVe and imported vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingModel<F> {
    pub config: TrainConfig,
    pub vocab: Vocabulary,
    pub input: Matrix<F>,
    pub output: Matrix<F>,
}

impl<F: Real> EmbeddingModel<F> {
    pub fn dim(&self) -> usize {
        self.input.cols()
    }

    /// True for fastText models that carry their n-gram bucket rows.
    pub fn is_subword(&self) -> bool {
        self.config.algorithm == Algorithm::FastText
            && self.input.rows() == self.vocab.len() + self.config.bucket
    }

    pub fn is_finite(&self) -> bool {
        self.input.is_finite() && self.output.is_finite()
    }

    /// Published vector of an in-vocabulary word.
    pub fn word_vector(&self, id: usize) -> Vec<F> {
        if self.is_subword() {
            fasttext::word_representation(self, id)
        } else {
            self.input.row(id).to_vec()
        }
    }

    /// Vector for any word: in-vocabulary lookup, or subword composition for
    /// fastText models.
    pub fn vector(&self, word: &str) -> Result<Vec<F>> {
        match self.vocab.id(word) {
            Some(id) => Ok(self.word_vector(id)),
            None if self.is_subword() => Ok(fasttext::oov_vector(self, word)),
            None => Err(Error::OutOfVocabulary(word.to_string())),
        }
    }

    /// Plain word vectors in vocabulary order; n-gram bucket rows are not
    /// exported, they only contribute through the composed word vectors.
    pub fn to_word_vectors(&self) -> WordVectors<F> {
        let dim = self.dim();
        let mut data = Vec::with_capacity(self.vocab.len() * dim);
        for id in 0..self.vocab.len() {
            data.extend(self.word_vector(id));
        }
        WordVectors {
            words: self.vocab.words().map(str::to_string).collect(),
            vectors: Matrix::from_vec(self.vocab.len(), dim, data),
        }
    }

    pub fn cast<G: Real>(&self) -> EmbeddingModel<G> {
        EmbeddingModel {
            config: self.config.clone(),
            vocab: self.vocab.clone(),
            input: self.input.cast(),
            output: self.output.cast(),
        }
    }
}

/// Words with one vector each, as stored by the text and binary formats.
#[derive(Clone, Debug, PartialEq)]
pub struct WordVectors<F> {
    pub words: Vec<String>,
    pub vectors: Matrix<F>,
}

impl<F: Real> WordVectors<F> {
    pub fn new(words: Vec<String>, vectors: Matrix<F>) -> Self {
        assert_eq!(words.len(), vectors.rows(), "one vector per word");
        WordVectors { words, vectors }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    /// Wrap as an imported model. Counts are unknown, so every word gets
    /// count 1 and keeps its file position as id.
    pub fn into_model(self) -> Result<EmbeddingModel<F>> {
        let n = self.words.len() as u64;
        let vocab = Vocabulary::from_entries(self.words.into_iter().map(|w| (w, 1)).collect(), n)?;
        let mut config = TrainConfig::defaults_for(Algorithm::Imported);
        config.dim = self.vectors.cols();
        Ok(EmbeddingModel {
            config,
            vocab,
            output: Matrix::zeros(0, self.vectors.cols()),
            input: self.vectors,
        })
    }
}
