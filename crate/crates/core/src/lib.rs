//! Learn orthogonal transformations of word embedding spaces that gather a
//! lexical property (sentiment, concreteness, frequency, ...) into a few
//! designated coordinates, and turn those coordinates into scored lexicons.
//!
//! The usual flow:
//!
//! 1. load embeddings ([`embeddings`]) and a labelled resource ([`lexicon`]),
//!    intersect and split them into a [`TrainingTable`];
//! 2. train a [`TransformMatrix`] with [`trainer::train`];
//! 3. emit an [`OutputLexicon`] ([`projection`]) and score it against gold
//!    values with [`eval::evaluate`].

pub mod embeddings;
pub mod error;
pub mod eval;
pub mod lexicon;
pub mod linalg;
pub mod objective;
pub mod projection;
pub mod synthetic;
pub mod trainer;
pub mod transform;

pub use embeddings::{EmbeddingFormat, EmbeddingSet};
pub use error::{Error, Result};
pub use eval::{EvalReport, TauVariant};
pub use lexicon::{LabelKind, LexiconResource, Property, Split, TrainingTable};
pub use linalg::Matrix;
pub use objective::SubspaceSpec;
pub use projection::OutputLexicon;
pub use trainer::{TrainConfig, TrainResult};
pub use transform::{Orientation, TransformMatrix};
