//! Exact cosine nearest-neighbor search.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{EmbeddingModel, WordVectors};
use crate::scalar::dot;
use crate::Real;

/// `u·v / (‖u‖ ‖v‖)`.
pub fn cosine<F: Real>(u: &[F], v: &[F]) -> Result<F> {
    let nu = dot(u, u).sqrt();
    let nv = dot(v, v).sqrt();
    if nu == F::zero() || nv == F::zero() {
        return Err(Error::ZeroVector);
    }
    Ok(dot(u, v) / (nu * nv))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Neighbor<F> {
    pub id: usize,
    pub word: String,
    pub similarity: F,
}

/// Neighbors ordered by descending similarity.
pub type NeighborResult<F> = Vec<Neighbor<F>>;

/// Unit-normalized copy of a model's word vectors.
///
/// Zero vectors have no direction and never appear in results.
#[derive(Clone, Debug)]
pub struct NeighborIndex<F> {
    words: Vec<String>,
    unit: Matrix<F>,
    nonzero: Vec<bool>,
}

impl<F: Real> NeighborIndex<F> {
    pub fn new(vectors: &WordVectors<F>) -> Self {
        let mut unit = vectors.vectors.clone();
        let mut nonzero = Vec::with_capacity(unit.rows());
        for i in 0..unit.rows() {
            let row = unit.row_mut(i);
            let norm = dot(row, row).sqrt();
            nonzero.push(norm > F::zero());
            if norm > F::zero() {
                row.iter_mut().for_each(|x| *x /= norm);
            }
        }
        NeighborIndex {
            words: vectors.words.clone(),
            unit,
            nonzero,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// The `k` rows most similar to `query`, skipping `exclude`. Ties go to
    /// the lower id.
    pub fn search(
        &self,
        query: &[F],
        k: usize,
        exclude: Option<usize>,
    ) -> Result<NeighborResult<F>> {
        let norm = dot(query, query).sqrt();
        if norm == F::zero() {
            return Err(Error::ZeroVector);
        }
        let q: Vec<F> = query.iter().map(|&x| x / norm).collect();
        let mut scored: Vec<(F, usize)> = (0..self.len())
            .filter(|&id| Some(id) != exclude && self.nonzero[id])
            .map(|id| (dot(&q, self.unit.row(id)), id))
            .collect();
        let by_rank = |a: &(F, usize), b: &(F, usize)| {
            b.0.partial_cmp(&a.0)
                .unwrap_or(Ordering::Equal)
                .then(a.1.cmp(&b.1))
        };
        let k = k.min(scored.len());
        if k == 0 {
            return Ok(Vec::new());
        }
        if k < scored.len() {
            scored.select_nth_unstable_by(k - 1, by_rank);
            scored.truncate(k);
        }
        scored.sort_unstable_by(by_rank);
        Ok(scored
            .into_iter()
            .map(|(s, id)| Neighbor {
                id,
                word: self.words[id].clone(),
                similarity: s.min(F::one()).max(-F::one()),
            })
            .collect())
    }
}

/// The `k` nearest vocabulary words to `word`.
///
/// Out-of-vocabulary words are composed from subwords on fastText models
/// and rejected otherwise.
pub fn nearest_neighbors<F: Real>(
    model: &EmbeddingModel<F>,
    index: &NeighborIndex<F>,
    word: &str,
    k: usize,
) -> Result<NeighborResult<F>> {
    let exclude = model.vocab.id(word);
    let query = model.vector(word)?;
    index.search(&query, k, exclude)
}
