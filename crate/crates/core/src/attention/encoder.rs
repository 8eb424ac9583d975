//! Single-layer attention encoder with a sigmoid classification head, plus
//! analytic gradients and a small training loop.
//!
//! The forward pass embeds the token ids, projects queries/keys/values,
//! applies masked attention, mean-pools the attended vectors over the
//! non-padding positions, and squashes a linear readout through a sigmoid.
//! Gradients are exact and are validated against central finite differences
//! in the test suite.

use std::path::Path;

use ndarray::{Array1, Array2, Axis};
use rand::distributions::{Distribution, Uniform};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::masking::AttentionMask;
use crate::tokenizer::TokenSequence;

use super::{attention_probabilities, optimizer_by_name, OptimizerKind};

/// All trainable parameters of the toy encoder.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyEncoderParams {
    /// Token embeddings, `|vocab| x d`.
    pub embedding: Array2<f64>,
    pub wq: Array2<f64>,
    pub wk: Array2<f64>,
    pub wv: Array2<f64>,
    pub w_out: Array1<f64>,
    pub b_out: f64,
    pub seed: u64,
}

impl ToyEncoderParams {
    /// Deterministic initialization: every block drawn uniformly from
    /// [-0.1, 0.1] using a counter-based generator seeded with `seed`.
    pub fn init(vocab_size: usize, d: usize, seed: u64) -> ToyEncoderParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = Uniform::new_inclusive(-0.1, 0.1);
        let mut draw2 = |rows: usize, cols: usize| {
            Array2::from_shape_fn((rows, cols), |_| dist.sample(&mut rng))
        };
        let embedding = draw2(vocab_size, d);
        let wq = draw2(d, d);
        let wk = draw2(d, d);
        let wv = draw2(d, d);
        let w_out = Array1::from_shape_fn(d, |_| dist.sample(&mut rng));
        let b_out = dist.sample(&mut rng);
        ToyEncoderParams {
            embedding,
            wq,
            wk,
            wv,
            w_out,
            b_out,
            seed,
        }
    }

    pub fn model_dim(&self) -> usize {
        self.wq.nrows()
    }

    pub fn vocab_size(&self) -> usize {
        self.embedding.nrows()
    }
}

/// Gradient (or moment) storage shaped like [`ToyEncoderParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct ToyEncoderGrads {
    pub embedding: Array2<f64>,
    pub wq: Array2<f64>,
    pub wk: Array2<f64>,
    pub wv: Array2<f64>,
    pub w_out: Array1<f64>,
    pub b_out: f64,
}

impl ToyEncoderGrads {
    pub fn zeros_like(params: &ToyEncoderParams) -> ToyEncoderGrads {
        ToyEncoderGrads {
            embedding: Array2::zeros(params.embedding.dim()),
            wq: Array2::zeros(params.wq.dim()),
            wk: Array2::zeros(params.wk.dim()),
            wv: Array2::zeros(params.wv.dim()),
            w_out: Array1::zeros(params.w_out.dim()),
            b_out: 0.0,
        }
    }
}

struct Forward {
    x: Array2<f64>,
    q: Array2<f64>,
    k: Array2<f64>,
    v: Array2<f64>,
    weights: Array2<f64>,
    pooled: Array1<f64>,
    logit: f64,
    prob: f64,
}

fn forward(
    params: &ToyEncoderParams,
    seq: &TokenSequence,
    mask: &AttentionMask,
) -> Result<Forward> {
    let l = seq.len();
    let d = params.model_dim();
    if mask.len() != l {
        return Err(Error::ShapeMismatch(format!(
            "mask length {} vs sequence length {l}",
            mask.len()
        )));
    }
    let mut x = Array2::zeros((l, d));
    for (pos, &id) in seq.ids.iter().enumerate() {
        if id as usize >= params.vocab_size() {
            return Err(Error::ShapeMismatch(format!(
                "token id {id} outside embedding table of {} rows",
                params.vocab_size()
            )));
        }
        x.row_mut(pos).assign(&params.embedding.row(id as usize));
    }
    let q = x.dot(&params.wq);
    let k = x.dot(&params.wk);
    let v = x.dot(&params.wv);
    let scale = 1.0 / (d as f64).sqrt();
    let scores = q.dot(&k.t()) * scale;
    let weights = attention_probabilities(&scores, mask)?.into_matrix();
    let attended = weights.dot(&v);
    let n_real = seq.n_real.max(1);
    let pooled = attended
        .slice(ndarray::s![..n_real, ..])
        .mean_axis(Axis(0))
        .expect("n_real >= 1");
    let logit = params.w_out.dot(&pooled) + params.b_out;
    let prob = 1.0 / (1.0 + (-logit).exp());
    Ok(Forward {
        x,
        q,
        k,
        v,
        weights,
        pooled,
        logit,
        prob,
    })
}

/// Probability that the sequence belongs to the `OFF` class.
pub fn encode_and_classify(
    params: &ToyEncoderParams,
    seq: &TokenSequence,
    mask: &AttentionMask,
) -> Result<f64> {
    forward(params, seq, mask).map(|f| f.prob)
}

/// Numerically stable binary cross-entropy from the logit.
fn bce_from_logit(logit: f64, target: f64) -> f64 {
    logit.max(0.0) - logit * target + (-logit.abs()).exp().ln_1p()
}

fn target_of(label: Label) -> f64 {
    match label {
        Label::Not => 0.0,
        Label::Off => 1.0,
    }
}

/// Mean binary cross-entropy over the batch and its exact gradients.
pub fn loss_and_gradients(
    params: &ToyEncoderParams,
    batch: &[(&TokenSequence, &AttentionMask, Label)],
) -> Result<(f64, ToyEncoderGrads)> {
    if batch.is_empty() {
        return Err(Error::InvalidParameter("empty batch".into()));
    }
    let scale = 1.0 / (params.model_dim() as f64).sqrt();
    let inv_b = 1.0 / batch.len() as f64;
    let mut loss = 0.0;
    let mut grads = ToyEncoderGrads::zeros_like(params);
    for (seq, mask, label) in batch {
        let f = forward(params, seq, mask)?;
        let target = target_of(*label);
        loss += bce_from_logit(f.logit, target) * inv_b;

        // d loss / d logit for sigmoid + BCE.
        let dlogit = (f.prob - target) * inv_b;
        grads.w_out.scaled_add(dlogit, &f.pooled);
        grads.b_out += dlogit;

        let l = seq.len();
        let n_real = seq.n_real.max(1);
        let dpooled = &params.w_out * dlogit;
        let mut d_attended = Array2::zeros((l, params.model_dim()));
        let per_row = 1.0 / n_real as f64;
        for row in 0..n_real {
            d_attended.row_mut(row).assign(&(&dpooled * per_row));
        }

        let d_weights = d_attended.dot(&f.v.t());
        let dv = f.weights.t().dot(&d_attended);

        // Softmax backward, row by row.
        let mut d_scores = Array2::zeros((l, l));
        for j in 0..l {
            let p_row = f.weights.row(j);
            let dp_row = d_weights.row(j);
            let dot = p_row.dot(&dp_row);
            for k in 0..l {
                d_scores[[j, k]] = p_row[k] * (dp_row[k] - dot);
            }
        }

        let dq = d_scores.dot(&f.k) * scale;
        let dk = d_scores.t().dot(&f.q) * scale;

        grads.wq = grads.wq + f.x.t().dot(&dq);
        grads.wk = grads.wk + f.x.t().dot(&dk);
        grads.wv = grads.wv + f.x.t().dot(&dv);

        let dx = dq.dot(&params.wq.t()) + dk.dot(&params.wk.t()) + dv.dot(&params.wv.t());
        for (pos, &id) in seq.ids.iter().enumerate() {
            let mut row = grads.embedding.row_mut(id as usize);
            row += &dx.row(pos);
        }
    }
    Ok((loss, grads))
}

/// Mean binary cross-entropy of the whole corpus under fixed parameters.
pub fn mean_loss(
    params: &ToyEncoderParams,
    docs: &[(TokenSequence, Label)],
    masks: &[AttentionMask],
) -> Result<f64> {
    if docs.is_empty() || docs.len() != masks.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} documents vs {} masks",
            docs.len(),
            masks.len()
        )));
    }
    let mut total = 0.0;
    for ((seq, label), mask) in docs.iter().zip(masks) {
        let f = forward(params, seq, mask)?;
        total += bce_from_logit(f.logit, target_of(*label));
    }
    Ok(total / docs.len() as f64)
}

/// Training hyperparameters; all randomness flows from `seed`.
#[derive(Debug, Clone, Copy)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    pub optimizer: OptimizerKind,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 30,
            learning_rate: 0.01,
            batch_size: 64,
            seed: 0,
            optimizer: OptimizerKind::Adam,
        }
    }
}

/// Minibatch gradient descent with a deterministic, seed-driven shuffle.
pub fn train(
    params: &ToyEncoderParams,
    docs: &[(TokenSequence, Label)],
    masks: &[AttentionMask],
    config: &TrainConfig,
) -> Result<ToyEncoderParams> {
    if docs.len() != masks.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} documents vs {} masks",
            docs.len(),
            masks.len()
        )));
    }
    for label in [Label::Not, Label::Off] {
        if !docs.iter().any(|(_, l)| *l == label) {
            return Err(Error::MissingClass(label));
        }
    }
    if config.learning_rate <= 0.0 {
        return Err(Error::InvalidParameter(
            "learning rate must be positive".into(),
        ));
    }
    if config.batch_size == 0 {
        return Err(Error::InvalidParameter("batch size must be >= 1".into()));
    }
    let mut params = params.clone();
    let mut optimizer = optimizer_by_name(config.optimizer.as_str())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..docs.len()).collect();
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<(&TokenSequence, &AttentionMask, Label)> = chunk
                .iter()
                .map(|&i| (&docs[i].0, &masks[i], docs[i].1))
                .collect();
            let (_, grads) = loss_and_gradients(&params, &batch)?;
            optimizer.step(&mut params, &grads, config.learning_rate);
        }
    }
    Ok(params)
}

/// Hard decision at the 0.5 cut.
pub fn predict_label(
    params: &ToyEncoderParams,
    seq: &TokenSequence,
    mask: &AttentionMask,
) -> Result<Label> {
    let prob = encode_and_classify(params, seq, mask)?;
    Ok(if prob >= 0.5 { Label::Off } else { Label::Not })
}

const MODEL_MAGIC: &str = "offmask-toy-encoder v1";

fn push_matrix(out: &mut String, name: &str, m: &Array2<f64>) {
    out.push_str(name);
    out.push('\n');
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
}

/// Versioned text dump of the parameters; floats carry 17 significant
/// digits, so parsing restores them exactly.
pub fn model_to_text(params: &ToyEncoderParams) -> String {
    let mut out = String::new();
    out.push_str(MODEL_MAGIC);
    out.push('\n');
    out.push_str(&format!("vocab {}\n", params.vocab_size()));
    out.push_str(&format!("d {}\n", params.model_dim()));
    out.push_str(&format!("seed {}\n", params.seed));
    push_matrix(&mut out, "embedding", &params.embedding);
    push_matrix(&mut out, "wq", &params.wq);
    push_matrix(&mut out, "wk", &params.wk);
    push_matrix(&mut out, "wv", &params.wv);
    out.push_str("w_out\n");
    let line: Vec<String> = params.w_out.iter().map(|v| format!("{v:.16e}")).collect();
    out.push_str(&line.join(" "));
    out.push('\n');
    out.push_str("b_out\n");
    out.push_str(&format!("{:.16e}\n", params.b_out));
    out
}

pub fn save_model(params: &ToyEncoderParams, path: &Path) -> Result<()> {
    std::fs::write(path, model_to_text(params))
        .map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn parse_model(content: &str) -> Result<ToyEncoderParams> {
    let mut lines = content.lines();
    let bad = |msg: &str| Error::MalformedModelFile(msg.to_string());
    if lines.next() != Some(MODEL_MAGIC) {
        return Err(bad("missing or unsupported header"));
    }
    let mut header_value = |prefix: &str| -> Result<String> {
        let line = lines
            .next()
            .ok_or_else(|| bad(&format!("missing {prefix} line")))?;
        line.strip_prefix(prefix)
            .and_then(|s| s.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| bad(&format!("expected {prefix} line, got {line:?}")))
    };
    let vocab: usize = header_value("vocab")?
        .parse()
        .map_err(|_| bad("bad vocab count"))?;
    let d: usize = header_value("d")?.parse().map_err(|_| bad("bad d"))?;
    let seed: u64 = header_value("seed")?.parse().map_err(|_| bad("bad seed"))?;

    let mut read_matrix = |name: &str, rows: usize, cols: usize| -> Result<Array2<f64>> {
        if lines.next() != Some(name) {
            return Err(bad(&format!("expected section {name:?}")));
        }
        let mut m = Array2::zeros((rows, cols));
        for r in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| bad(&format!("truncated section {name:?}")))?;
            let values: Vec<&str> = line.split(' ').collect();
            if values.len() != cols {
                return Err(bad(&format!(
                    "section {name:?} row {r}: expected {cols} values, got {}",
                    values.len()
                )));
            }
            for (c, v) in values.iter().enumerate() {
                m[[r, c]] = v
                    .parse()
                    .map_err(|_| bad(&format!("section {name:?}: bad float {v:?}")))?;
            }
        }
        Ok(m)
    };

    let embedding = read_matrix("embedding", vocab, d)?;
    let wq = read_matrix("wq", d, d)?;
    let wk = read_matrix("wk", d, d)?;
    let wv = read_matrix("wv", d, d)?;

    if lines.next() != Some("w_out") {
        return Err(bad("expected section \"w_out\""));
    }
    let line = lines.next().ok_or_else(|| bad("truncated w_out"))?;
    let values: Result<Vec<f64>> = line
        .split(' ')
        .map(|v| v.parse().map_err(|_| bad(&format!("bad float {v:?}"))))
        .collect();
    let w_out = Array1::from_vec(values?);
    if w_out.len() != d {
        return Err(bad("w_out has wrong length"));
    }
    if lines.next() != Some("b_out") {
        return Err(bad("expected section \"b_out\""));
    }
    let b_out: f64 = lines
        .next()
        .ok_or_else(|| bad("truncated b_out"))?
        .parse()
        .map_err(|_| bad("bad b_out"))?;
    if lines.next().is_some() {
        return Err(bad("trailing content"));
    }
    Ok(ToyEncoderParams {
        embedding,
        wq,
        wk,
        wv,
        w_out,
        b_out,
        seed,
    })
}

pub fn load_model(path: &Path) -> Result<ToyEncoderParams> {
    let content =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_model(&content)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::masking::classic_mask;
    use crate::tokenizer::{TokenSequence, Vocabulary, CLS, PAD, SEP, UNK};

    fn vocab() -> Vocabulary {
        let mut tokens: Vec<String> = [PAD, UNK, CLS, SEP].iter().map(|s| s.to_string()).collect();
        for i in 0..8 {
            tokens.push(format!("w{i}"));
        }
        Vocabulary::from_tokens(tokens).unwrap()
    }

    fn seq(words: &[&str], max: usize) -> TokenSequence {
        let pieces: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        TokenSequence::from_pieces(&pieces, &vocab(), max).unwrap()
    }

    #[test]
    fn init_is_deterministic_and_bounded() {
        let a = ToyEncoderParams::init(12, 16, 7);
        let b = ToyEncoderParams::init(12, 16, 7);
        let c = ToyEncoderParams::init(12, 16, 8);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.embedding.iter().all(|v| v.abs() <= 0.1));
        assert!(a.wq.iter().all(|v| v.abs() <= 0.1));
    }

    #[test]
    fn output_is_a_probability() {
        let params = ToyEncoderParams::init(12, 16, 1);
        let s = seq(&["w0", "w3", "w5"], 8);
        let mask = classic_mask(&s);
        let p = encode_and_classify(&params, &s, &mask).unwrap();
        assert!(p > 0.0 && p < 1.0);
    }

    #[test]
    fn padding_tail_length_is_invisible() {
        let params = ToyEncoderParams::init(12, 16, 1);
        let short = seq(&["w0", "w3"], 6);
        let long = seq(&["w0", "w3"], 12);
        let p_short = encode_and_classify(&params, &short, &classic_mask(&short)).unwrap();
        let p_long = encode_and_classify(&params, &long, &classic_mask(&long)).unwrap();
        assert!((p_short - p_long).abs() < 1e-12);
    }

    #[test]
    fn all_zero_mask_equals_all_one_mask() {
        let params = ToyEncoderParams::init(12, 16, 2);
        let s = seq(&["w1", "w2", "w4"], 6);
        let zeros = AttentionMask::new(vec![0.0; 6]);
        let ones = AttentionMask::new(vec![1.0; 6]);
        let p0 = encode_and_classify(&params, &s, &zeros).unwrap();
        let p1 = encode_and_classify(&params, &s, &ones).unwrap();
        assert!((p0 - p1).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range_ids() {
        let params = ToyEncoderParams::init(4, 8, 1);
        let s = seq(&["w7"], 6);
        let mask = classic_mask(&s);
        assert!(matches!(
            encode_and_classify(&params, &s, &mask),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn bce_at_half_is_ln_two() {
        // logit 0 -> p = 0.5 regardless of the target.
        assert!((bce_from_logit(0.0, 1.0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((bce_from_logit(0.0, 0.0) - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn duplicating_batch_leaves_loss_and_grads_unchanged() {
        let params = ToyEncoderParams::init(12, 8, 3);
        let s1 = seq(&["w0", "w1"], 6);
        let s2 = seq(&["w2", "w3", "w4"], 6);
        let m1 = classic_mask(&s1);
        let m2 = classic_mask(&s2);
        let batch = vec![
            (&s1, &m1, Label::Off),
            (&s2, &m2, Label::Not),
        ];
        let doubled: Vec<_> = batch.iter().chain(batch.iter()).cloned().collect();
        let (l1, g1) = loss_and_gradients(&params, &batch).unwrap();
        let (l2, g2) = loss_and_gradients(&params, &doubled).unwrap();
        assert!((l1 - l2).abs() < 1e-12);
        for (a, b) in g1.wq.iter().zip(g2.wq.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in g1.embedding.iter().zip(g2.embedding.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((g1.b_out - g2.b_out).abs() < 1e-12);
    }

    #[test]
    fn zero_epochs_is_identity() {
        let params = ToyEncoderParams::init(12, 8, 3);
        let docs = vec![
            (seq(&["w0"], 6), Label::Off),
            (seq(&["w1"], 6), Label::Not),
        ];
        let masks: Vec<_> = docs.iter().map(|(s, _)| classic_mask(s)).collect();
        let config = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        let trained = train(&params, &docs, &masks, &config).unwrap();
        assert_eq!(trained, params);
    }

    #[test]
    fn training_is_seed_deterministic() {
        let params = ToyEncoderParams::init(12, 8, 3);
        let docs = vec![
            (seq(&["w0", "w2"], 6), Label::Off),
            (seq(&["w1"], 6), Label::Not),
            (seq(&["w0", "w5"], 6), Label::Off),
            (seq(&["w3", "w4"], 6), Label::Not),
        ];
        let masks: Vec<_> = docs.iter().map(|(s, _)| classic_mask(s)).collect();
        let config = TrainConfig {
            epochs: 5,
            batch_size: 2,
            seed: 9,
            ..TrainConfig::default()
        };
        let a = train(&params, &docs, &masks, &config).unwrap();
        let b = train(&params, &docs, &masks, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn training_needs_both_classes() {
        let params = ToyEncoderParams::init(12, 8, 3);
        let docs = vec![(seq(&["w0"], 6), Label::Off)];
        let masks = vec![classic_mask(&docs[0].0)];
        assert!(matches!(
            train(&params, &docs, &masks, &TrainConfig::default()),
            Err(Error::MissingClass(Label::Not))
        ));
    }

    #[test]
    fn model_file_round_trip() {
        let params = ToyEncoderParams::init(12, 16, 42);
        let text = model_to_text(&params);
        let loaded = parse_model(&text).unwrap();
        assert_eq!(loaded, params);
    }

    #[test]
    fn model_file_rejects_corruption() {
        let params = ToyEncoderParams::init(4, 4, 1);
        let text = model_to_text(&params);
        assert!(parse_model(&text.replace("offmask-toy-encoder v1", "v0")).is_err());
        assert!(parse_model(&text.replace("wq", "xx")).is_err());
        let truncated: String = text.lines().take(6).collect::<Vec<_>>().join("\n");
        assert!(parse_model(&truncated).is_err());
    }
}
