//! Attention-mask construction strategies.
//!
//! Every strategy builds one real-valued mask vector per token sequence:
//! padding positions always get 0, and the treatment of real tokens is what
//! distinguishes the family members. Strategies live behind the
//! [`MaskStrategy`] trait and are selected by name at runtime (`classic`,
//! `additive`, `threshold`).

use crate::error::{Error, Result};
use crate::scoring::ScoreTable;
use crate::tokenizer::TokenSequence;

/// A per-position attention mask, one value per sequence position.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionMask(Vec<f64>);

impl AttentionMask {
    pub fn new(values: Vec<f64>) -> AttentionMask {
        AttentionMask(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// What a threshold mask does when no non-special token clears the bar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegenerateFallback {
    /// Keep the all-zero token span; softmax shift invariance makes it
    /// equivalent to uniform attention over the full row.
    #[default]
    KeepZeros,
    /// Substitute the classic mask.
    FallBackToClassic,
}

/// A mask-building algorithm, selectable by name.
pub trait MaskStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn build(&self, seq: &TokenSequence, table: &ScoreTable) -> AttentionMask;
}

/// 1 on real positions, 0 on padding.
#[derive(Debug, Clone, Copy, Default)]
pub struct Classic;

/// 1 plus the token's offensive score when the token is in the database,
/// plain 1 otherwise.
#[derive(Debug, Clone, Copy, Default)]
pub struct AdditiveScore;

/// 1 only where the token's score clears the threshold; `[CLS]`/`[SEP]`
/// always stay at 1.
#[derive(Debug, Clone, Copy)]
pub struct Threshold {
    pub threshold: f64,
    pub fallback: DegenerateFallback,
}

impl Threshold {
    pub fn new(threshold: f64, fallback: DegenerateFallback) -> Result<Threshold> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "threshold must be in (0,1), got {threshold}"
            )));
        }
        Ok(Threshold {
            threshold,
            fallback,
        })
    }
}

impl MaskStrategy for Classic {
    fn name(&self) -> &'static str {
        "classic"
    }

    fn build(&self, seq: &TokenSequence, _table: &ScoreTable) -> AttentionMask {
        classic_mask(seq)
    }
}

impl MaskStrategy for AdditiveScore {
    fn name(&self) -> &'static str {
        "additive"
    }

    fn build(&self, seq: &TokenSequence, table: &ScoreTable) -> AttentionMask {
        additive_score_mask(seq, table)
    }
}

impl MaskStrategy for Threshold {
    fn name(&self) -> &'static str {
        "threshold"
    }

    fn build(&self, seq: &TokenSequence, table: &ScoreTable) -> AttentionMask {
        threshold_mask(seq, table, self)
    }
}

pub const STRATEGY_NAMES: [&str; 3] = ["classic", "additive", "threshold"];

/// Looks a strategy up by name. `threshold` and `fallback` only matter for
/// the threshold strategy.
pub fn strategy_by_name(
    name: &str,
    threshold: f64,
    fallback: DegenerateFallback,
) -> Result<Box<dyn MaskStrategy>> {
    match name {
        "classic" => Ok(Box::new(Classic)),
        "additive" => Ok(Box::new(AdditiveScore)),
        "threshold" => Ok(Box::new(Threshold::new(threshold, fallback)?)),
        other => Err(Error::UnknownStrategy(other.to_string())),
    }
}

/// The classic binary mask: padding tokens are 0 and the others are 1.
pub fn classic_mask(seq: &TokenSequence) -> AttentionMask {
    AttentionMask(
        (0..seq.len())
            .map(|k| if k < seq.n_real { 1.0 } else { 0.0 })
            .collect(),
    )
}

/// Adds each in-database token's offensive score on top of the classic mask;
/// out-of-database tokens (special tokens included) keep their classic value.
pub fn additive_score_mask(seq: &TokenSequence, table: &ScoreTable) -> AttentionMask {
    AttentionMask(
        (0..seq.len())
            .map(|k| {
                if k >= seq.n_real {
                    0.0
                } else {
                    match table.get(&seq.tokens[k]) {
                        Some(score) => 1.0 + score,
                        None => 1.0,
                    }
                }
            })
            .collect(),
    )
}

/// Attends only to tokens whose score clears the threshold.
///
/// `[CLS]` and `[SEP]` keep mask 1; out-of-database tokens fall in the
/// zeroed "otherwise" branch. When every position between `[CLS]` and
/// `[SEP]` ends up 0, the configured fallback decides whether the mask is
/// kept or replaced by the classic one.
pub fn threshold_mask(
    seq: &TokenSequence,
    table: &ScoreTable,
    strategy: &Threshold,
) -> AttentionMask {
    let mut values = vec![0.0; seq.len()];
    let mut any_inner_one = false;
    for k in 0..seq.n_real {
        let is_boundary = k == 0 || k == seq.n_real - 1;
        if is_boundary {
            values[k] = 1.0;
            continue;
        }
        if let Some(score) = table.get(&seq.tokens[k]) {
            if score >= strategy.threshold {
                values[k] = 1.0;
                any_inner_one = true;
            }
        }
    }
    if !any_inner_one
        && seq.n_real > 2
        && strategy.fallback == DegenerateFallback::FallBackToClassic
    {
        return classic_mask(seq);
    }
    AttentionMask(values)
}

/// Result of a threshold grid sweep: all evaluated points and the argmax
/// (ties resolved toward the lowest threshold).
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSweep {
    pub points: Vec<(f64, f64)>,
    pub best: (f64, f64),
}

/// Evaluates the threshold strategy over the grid `min, min+step, ..., max`.
///
/// For each grid point this builds the per-sequence threshold masks and
/// hands them, with the threshold, to the supplied end-to-end evaluator,
/// which returns a macro-F1.
pub fn sweep_thresholds(
    seqs: &[TokenSequence],
    table: &ScoreTable,
    min: f64,
    max: f64,
    step: f64,
    mut evaluator: impl FnMut(f64, &[AttentionMask]) -> Result<f64>,
) -> Result<ThresholdSweep> {
    if !(min > 0.0 && min < max && max < 1.0) {
        return Err(Error::InvalidGrid(format!(
            "need 0 < min < max < 1, got min={min} max={max}"
        )));
    }
    if step <= 0.0 {
        return Err(Error::InvalidGrid(format!("step must be > 0, got {step}")));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize + 1;
    let mut points = Vec::with_capacity(n);
    for k in 0..n {
        let threshold = min + k as f64 * step;
        let strategy = Threshold::new(threshold, DegenerateFallback::KeepZeros)?;
        let masks: Vec<AttentionMask> = seqs
            .iter()
            .map(|seq| threshold_mask(seq, table, &strategy))
            .collect();
        let f1 = evaluator(threshold, &masks)?;
        points.push((threshold, f1));
    }
    let best = points
        .iter()
        .copied()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(b.0.partial_cmp(&a.0).unwrap()))
        .expect("grid has at least one point");
    Ok(ThresholdSweep { points, best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::{CountMode, Provenance, ScoreTable};
    use crate::tokenizer::{TokenSequence, Vocabulary, CLS, PAD, SEP, UNK};

    fn vocab() -> Vocabulary {
        Vocabulary::from_tokens(
            [PAD, UNK, CLS, SEP, "idiots", "mild", "stranger"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        )
        .unwrap()
    }

    fn table() -> ScoreTable {
        ScoreTable::from_entries(
            [
                ("idiots".to_string(), 0.8843),
                ("mild".to_string(), 0.53),
                ("strong".to_string(), 0.7),
            ],
            Provenance {
                fingerprint: "test".into(),
                mode: CountMode::RawCount,
                created: None,
            },
        )
        .unwrap()
    }

    fn seq(words: &[&str], max: usize) -> TokenSequence {
        let pieces: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        TokenSequence::from_pieces(&pieces, &vocab(), max).unwrap()
    }

    #[test]
    fn classic_is_binary_with_padding_zeros() {
        let s = seq(&["idiots"], 6);
        assert_eq!(classic_mask(&s).values(), &[1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        let s = seq(&["idiots", "mild", "stranger", "mild"], 6);
        assert_eq!(classic_mask(&s).values(), &[1.0; 6]);
        let s = seq(&[], 4);
        assert_eq!(classic_mask(&s).values(), &[1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn additive_adds_in_database_scores() {
        let s = seq(&["idiots", "stranger"], 6);
        let mask = additive_score_mask(&s, &table());
        // [CLS], idiots (0.8843), stranger (not in db), [SEP], pad, pad
        assert_eq!(mask.values(), &[1.0, 1.0 + 0.8843, 1.0, 1.0, 0.0, 0.0]);
        assert!((mask.values()[1] - 1.8843).abs() < 1e-12);
    }

    #[test]
    fn additive_with_empty_table_equals_classic() {
        let s = seq(&["idiots", "mild"], 8);
        assert_eq!(
            additive_score_mask(&s, &ScoreTable::empty()),
            classic_mask(&s)
        );
    }

    #[test]
    fn additive_dominates_classic_pointwise() {
        let s = seq(&["idiots", "mild", "stranger"], 8);
        let add = additive_score_mask(&s, &table());
        let classic = classic_mask(&s);
        for k in 0..s.len() {
            assert!(add.values()[k] >= classic.values()[k]);
            let in_db = k < s.n_real && table().get(&s.tokens[k]).is_some();
            if !in_db {
                assert_eq!(add.values()[k], classic.values()[k]);
            }
        }
    }

    #[test]
    fn threshold_keeps_only_high_scores() {
        let strategy = Threshold::new(0.6, DegenerateFallback::KeepZeros).unwrap();
        let s = seq(&["idiots", "mild", "stranger"], 8);
        let mask = threshold_mask(&s, &table(), &strategy);
        // CLS=1, idiots 0.8843>=0.6 -> 1, mild 0.53 -> 0, stranger (no db) -> 0, SEP=1
        assert_eq!(mask.values(), &[1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn threshold_degenerate_keep_zeros() {
        let strategy = Threshold::new(0.6, DegenerateFallback::KeepZeros).unwrap();
        let s = seq(&["mild", "stranger"], 6);
        let mask = threshold_mask(&s, &table(), &strategy);
        assert_eq!(mask.values(), &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn threshold_degenerate_fallback_to_classic() {
        let strategy = Threshold::new(0.6, DegenerateFallback::FallBackToClassic).unwrap();
        let s = seq(&["mild", "stranger"], 6);
        let mask = threshold_mask(&s, &table(), &strategy);
        assert_eq!(mask, classic_mask(&s));
    }

    #[test]
    fn threshold_monotone_in_threshold() {
        let s = seq(&["idiots", "mild", "stranger", "mild"], 10);
        let t = table();
        let grid = [0.5, 0.55, 0.6, 0.7, 0.8, 0.9];
        for pair in grid.windows(2) {
            let low = threshold_mask(
                &s,
                &t,
                &Threshold::new(pair[0], DegenerateFallback::KeepZeros).unwrap(),
            );
            let high = threshold_mask(
                &s,
                &t,
                &Threshold::new(pair[1], DegenerateFallback::KeepZeros).unwrap(),
            );
            for k in 0..s.len() {
                assert!(high.values()[k] <= low.values()[k]);
            }
        }
    }

    #[test]
    fn threshold_rejects_out_of_range() {
        assert!(Threshold::new(0.0, DegenerateFallback::KeepZeros).is_err());
        assert!(Threshold::new(1.0, DegenerateFallback::KeepZeros).is_err());
        assert!(Threshold::new(1.5, DegenerateFallback::KeepZeros).is_err());
    }

    #[test]
    fn registry_resolves_names() {
        for name in STRATEGY_NAMES {
            let strategy = strategy_by_name(name, 0.6, DegenerateFallback::KeepZeros).unwrap();
            assert_eq!(strategy.name(), name);
        }
        assert!(matches!(
            strategy_by_name("bogus", 0.6, DegenerateFallback::KeepZeros),
            Err(Error::UnknownStrategy(_))
        ));
    }

    #[test]
    fn all_strategies_zero_padding() {
        let s = seq(&["idiots"], 9);
        let t = table();
        for name in STRATEGY_NAMES {
            let strategy = strategy_by_name(name, 0.6, DegenerateFallback::KeepZeros).unwrap();
            let mask = strategy.build(&s, &t);
            assert_eq!(mask.len(), s.len());
            for k in s.n_real..s.len() {
                assert_eq!(mask.values()[k], 0.0, "{name} at {k}");
            }
        }
    }

    #[test]
    fn sweep_grid_arithmetic() {
        let s = vec![seq(&["idiots", "mild"], 6)];
        let t = table();
        let sweep = sweep_thresholds(&s, &t, 0.5, 0.8, 0.05, |th, masks| {
            assert_eq!(masks.len(), 1);
            Ok(1.0 - th) // favor the lowest threshold
        })
        .unwrap();
        assert_eq!(sweep.points.len(), 7);
        assert!((sweep.points[0].0 - 0.5).abs() < 1e-12);
        assert!((sweep.points[6].0 - 0.8).abs() < 1e-12);
        assert!((sweep.best.0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let s = vec![seq(&["idiots"], 6)];
        let t = table();
        assert!(matches!(
            sweep_thresholds(&s, &t, 0.8, 0.5, 0.05, |_, _| Ok(0.0)),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            sweep_thresholds(&s, &t, 0.5, 0.8, 0.0, |_, _| Ok(0.0)),
            Err(Error::InvalidGrid(_))
        ));
    }
}
