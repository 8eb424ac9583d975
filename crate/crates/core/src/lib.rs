//! Offensive-language token scoring and attention-mask redistribution.
//!
//! The pipeline runs in stages: social-media text is normalized
//! ([`preprocess`]), WordPiece-encoded against a vocabulary ([`tokenizer`]),
//! and scored per token by Laplace-smoothed Multinomial Naive Bayes
//! ([`scoring`]). The resulting score table drives a family of
//! attention-mask strategies ([`masking`]) that are injected into a small
//! masked-attention classifier ([`attention`]) and compared fold-by-fold
//! with macro-F1 ([`eval`]).

pub mod attention;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod masking;
pub mod preprocess;
pub mod scoring;
pub mod tokenizer;

pub use corpus::{Label, LabeledCorpus, LabeledDocument, RawDocument};
pub use error::{Error, Result};
