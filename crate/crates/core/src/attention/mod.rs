//! Masked scaled-dot-product attention and a single-layer attention encoder
//! with a trainable classification head.
//!
//! The mask enters exactly the way BERT applies it: the complement of the
//! mask vector, scaled by a large negative constant, is added to every row
//! of the attention score matrix before the softmax. A value of 0 therefore
//! silences a column (its weight underflows to zero), equal values across
//! all columns are a no-op thanks to softmax shift invariance, and any value
//! above the rest tilts attention toward that column.

mod encoder;
mod optimizer;
mod synthetic;

pub use encoder::{
    encode_and_classify, load_model, loss_and_gradients, mean_loss, model_to_text, parse_model,
    predict_label, save_model, train, ToyEncoderGrads, ToyEncoderParams, TrainConfig,
};
pub use optimizer::{optimizer_by_name, Adam, Optimizer, OptimizerKind, Sgd};
pub use synthetic::{make_synthetic_corpus, synthetic_vocabulary};

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::masking::AttentionMask;

/// The additive shift applied to masked-out columns.
pub const DEFAULT_MASK_SHIFT: f64 = 10_000.0;

/// Row-stochastic attention weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionWeights(Array2<f64>);

impl AttentionWeights {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> Array2<f64> {
        self.0
    }
}

/// Query/key/value matrices plus the mask they are attended under.
pub struct AttentionInputs<'a> {
    pub queries: &'a Array2<f64>,
    pub keys: &'a Array2<f64>,
    pub values: &'a Array2<f64>,
    pub mask: &'a AttentionMask,
}

impl<'a> AttentionInputs<'a> {
    pub fn new(
        queries: &'a Array2<f64>,
        keys: &'a Array2<f64>,
        values: &'a Array2<f64>,
        mask: &'a AttentionMask,
    ) -> Result<Self> {
        let (l, d) = queries.dim();
        if keys.dim() != (l, d) || values.dim() != (l, d) {
            return Err(Error::ShapeMismatch(format!(
                "queries {:?}, keys {:?}, values {:?}",
                queries.dim(),
                keys.dim(),
                values.dim()
            )));
        }
        if mask.len() != l {
            return Err(Error::ShapeMismatch(format!(
                "mask length {} vs sequence length {l}",
                mask.len()
            )));
        }
        Ok(AttentionInputs {
            queries,
            keys,
            values,
            mask,
        })
    }

    /// `1 / sqrt(model dimension)`.
    pub fn scale(&self) -> f64 {
        1.0 / (self.queries.ncols() as f64).sqrt()
    }

    /// Scaled dot-product scores `Q K^T / sqrt(d)`.
    pub fn scores(&self) -> Array2<f64> {
        let mut scores = self.queries.dot(&self.keys.t());
        scores *= self.scale();
        scores
    }

    /// Masked attention weights and the attended value matrix.
    pub fn attend(&self) -> Result<(AttentionWeights, Array2<f64>)> {
        let weights = attention_probabilities(&self.scores(), self.mask)?;
        let output = weights.matrix().dot(self.values);
        Ok((weights, output))
    }
}

/// Softmax of `scores - shift * (1 - mask)`, with the mask broadcast across
/// rows; every output row sums to 1.
pub fn attention_probabilities_with_shift(
    scores: &Array2<f64>,
    mask: &AttentionMask,
    shift: f64,
) -> Result<AttentionWeights> {
    let (rows, cols) = scores.dim();
    if rows != cols {
        return Err(Error::ShapeMismatch(format!(
            "attention scores must be square, got {rows}x{cols}"
        )));
    }
    if mask.len() != cols {
        return Err(Error::ShapeMismatch(format!(
            "mask length {} vs score columns {cols}",
            mask.len()
        )));
    }
    let mut shifted = scores.clone();
    for (k, &m) in mask.values().iter().enumerate() {
        let delta = -shift * (1.0 - m);
        shifted.column_mut(k).mapv_inplace(|v| v + delta);
    }
    softmax_rows_inplace(&mut shifted);
    Ok(AttentionWeights(shifted))
}

/// [`attention_probabilities_with_shift`] at the standard -10,000 shift.
pub fn attention_probabilities(
    scores: &Array2<f64>,
    mask: &AttentionMask,
) -> Result<AttentionWeights> {
    attention_probabilities_with_shift(scores, mask, DEFAULT_MASK_SHIFT)
}

pub(crate) fn softmax_rows_inplace(m: &mut Array2<f64>) {
    for mut row in m.rows_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
}
