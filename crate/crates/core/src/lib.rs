//! Word-embedding toolkit for Cyrillic Uzbek.
//!
//! The pipeline runs corpus cleaning ([`textpipe`]), vocabulary
//! construction ([`vocab`]), training ([`word2vec`], [`glove`],
//! [`fasttext`]), serialization ([`io`]) and nearest-neighbor queries
//! ([`query`]). Numeric code is generic over [`Real`]; the aliases below
//! fix the scalar for the common cases.

pub mod config;
pub mod corpus;
pub mod error;
pub mod fasttext;
pub mod glove;
pub mod hogwild;
pub mod io;
pub mod matrix;
pub mod model;
pub mod query;
mod scalar;
pub mod sgd;
pub mod textpipe;
pub mod vocab;
pub mod word2vec;

pub use config::{Algorithm, Architecture, Loss, TrainConfig};
pub use corpus::EncodedCorpus;
pub use error::{Error, Result};
pub use matrix::{Matrix, ParamRows};
pub use model::{EmbeddingModel, WordVectors};
pub use scalar::Real;
pub use vocab::Vocabulary;

/// Single-precision model, the storage precision of every file format.
pub type Model = EmbeddingModel<f32>;
/// Double-precision model.
pub type Model64 = EmbeddingModel<f64>;
pub type Vectors = WordVectors<f32>;
pub type Vectors64 = WordVectors<f64>;
