//! Evaluation machinery: label homogenization, the lexicon baseline,
//! confusion-matrix metrics with macro-F1, stratified k-fold splitting, and
//! the strategy-comparison harness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::attention::{predict_label, train, ToyEncoderParams, TrainConfig};
use crate::corpus::{Label, LabeledCorpus, RawDocument};
use crate::error::{Error, Result};
use crate::masking::{AttentionMask, MaskStrategy};
use crate::scoring::{
    build_score_table, corpus_fingerprint, fit_nb, CountMode, ScoreTable, TfIdfConfig,
};
use crate::tokenizer::{encode, TokenSequence, Vocabulary};

/// Total map from raw source labels to the binary scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    map: BTreeMap<String, Label>,
}

impl LabelMap {
    /// The stock homogenization: binary labels pass through, HatEval's HS
    /// values 0/1 become NOT/OFF, and the aggression labels map NAG to NOT
    /// and CAG/OAG to OFF.
    pub fn standard() -> LabelMap {
        let mut map = BTreeMap::new();
        map.insert("NOT".into(), Label::Not);
        map.insert("OFF".into(), Label::Off);
        map.insert("0".into(), Label::Not);
        map.insert("1".into(), Label::Off);
        map.insert("NAG".into(), Label::Not);
        map.insert("CAG".into(), Label::Off);
        map.insert("OAG".into(), Label::Off);
        LabelMap { map }
    }

    /// Parses `source_label<TAB>NOT|OFF` lines.
    pub fn parse(content: &str) -> Result<LabelMap> {
        let mut map = BTreeMap::new();
        for (lineno, line) in content.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (source, target) = line.split_once('\t').ok_or_else(|| {
                Error::MalformedRecord(format!("label map line {}: missing tab", lineno + 1))
            })?;
            map.insert(source.to_string(), target.parse()?);
        }
        Ok(LabelMap { map })
    }

    pub fn load(path: &Path) -> Result<LabelMap> {
        let content =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        LabelMap::parse(&content)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Maps one raw label; unmapped labels are an error, never a guess.
pub fn homogenize_labels(raw: &str, map: &LabelMap) -> Result<Label> {
    map.map
        .get(raw)
        .copied()
        .ok_or_else(|| Error::UnknownLabel(raw.to_string()))
}

/// Parses a corpus TSV and homogenizes whatever raw labels it carries.
pub fn ingest_corpus_tsv(content: &str, map: &LabelMap) -> Result<Vec<RawDocument>> {
    crate::corpus::parse_corpus_records(content)?
        .into_iter()
        .map(|r| {
            let label = r
                .label
                .map(|raw| homogenize_labels(&raw, map))
                .transpose()?;
            Ok(RawDocument::new(r.id, r.text, label))
        })
        .collect()
}

/// `OFF` if any lexicon entry occurs as a whole whitespace token of the
/// (already preprocessed) text.
pub fn lexicon_classify(doc: &RawDocument, lexicon: &BTreeSet<String>) -> Result<Label> {
    if lexicon.is_empty() {
        return Err(Error::EmptyLexicon);
    }
    let hit = doc
        .text
        .split_whitespace()
        .any(|token| lexicon.contains(token));
    Ok(if hit { Label::Off } else { Label::Not })
}

/// Binary confusion counts; `OFF` is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub tnc: usize,
    pub fpc: usize,
    pub fnc: usize,
    pub tpc: usize,
}

impl ConfusionMatrix {
    pub fn from_pairs(preds: &[Label], golds: &[Label]) -> Result<ConfusionMatrix> {
        if preds.len() != golds.len() {
            return Err(Error::LengthMismatch {
                preds: preds.len(),
                golds: golds.len(),
            });
        }
        if preds.is_empty() {
            return Err(Error::EmptyEval);
        }
        let mut m = ConfusionMatrix {
            tnc: 0,
            fpc: 0,
            fnc: 0,
            tpc: 0,
        };
        for (&p, &g) in preds.iter().zip(golds) {
            match (g, p) {
                (Label::Not, Label::Not) => m.tnc += 1,
                (Label::Not, Label::Off) => m.fpc += 1,
                (Label::Off, Label::Not) => m.fnc += 1,
                (Label::Off, Label::Off) => m.tpc += 1,
            }
        }
        Ok(m)
    }

    pub fn total(&self) -> usize {
        self.tnc + self.fpc + self.fnc + self.tpc
    }
}

/// Precision/recall/F1 for one class, with 0/0 defined as 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn class_metrics(tp: usize, fp: usize, fn_count: usize) -> ClassMetrics {
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_count);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    ClassMetrics {
        precision,
        recall,
        f1,
    }
}

/// Unweighted arithmetic mean of per-class F1 scores.
pub fn macro_average(class_f1s: &[f64]) -> f64 {
    class_f1s.iter().sum::<f64>() / class_f1s.len() as f64
}

/// Per-class metrics plus the macro-F1 headline number.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub not: ClassMetrics,
    pub off: ClassMetrics,
    pub macro_f1: f64,
    pub confusion: ConfusionMatrix,
}

impl fmt::Display for ClassificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "class  precision  recall  f1")?;
        writeln!(
            f,
            "NOT    {:<9.4}  {:<6.4}  {:.4}",
            self.not.precision, self.not.recall, self.not.f1
        )?;
        writeln!(
            f,
            "OFF    {:<9.4}  {:<6.4}  {:.4}",
            self.off.precision, self.off.recall, self.off.f1
        )?;
        writeln!(f, "macro-F1 {:.4}", self.macro_f1)?;
        write!(
            f,
            "confusion tn={} fp={} fn={} tp={}",
            self.confusion.tnc, self.confusion.fpc, self.confusion.fnc, self.confusion.tpc
        )
    }
}

/// Standard binary classification report over aligned predictions and gold
/// labels.
pub fn classification_report(preds: &[Label], golds: &[Label]) -> Result<ClassificationReport> {
    let confusion = ConfusionMatrix::from_pairs(preds, golds)?;
    let off = class_metrics(confusion.tpc, confusion.fpc, confusion.fnc);
    let not = class_metrics(confusion.tnc, confusion.fnc, confusion.fpc);
    Ok(ClassificationReport {
        macro_f1: macro_average(&[not.f1, off.f1]),
        not,
        off,
        confusion,
    })
}

/// One cross-validation fold: disjoint train/validation index sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Seeded stratified k-fold split.
///
/// Each class's indices are shuffled once and dealt round-robin into the k
/// validation folds, so per-fold class counts stay within one document of
/// the global ratio.
pub fn stratified_kfold(labels: &[Label], k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    for label in [Label::Not, Label::Off] {
        let count = labels.iter().filter(|&&l| l == label).count();
        if count < k {
            return Err(Error::TooFewPerClass { label, count, k });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut validation_sets: Vec<Vec<usize>> = vec![Vec::new(); k];
    for label in [Label::Not, Label::Off] {
        let mut indices: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(i, _)| i)
            .collect();
        indices.shuffle(&mut rng);
        for (pos, idx) in indices.into_iter().enumerate() {
            validation_sets[pos % k].push(idx);
        }
    }
    let mut folds = Vec::with_capacity(k);
    for f in 0..k {
        let mut validation = validation_sets[f].clone();
        validation.sort_unstable();
        let in_validation: BTreeSet<usize> = validation.iter().copied().collect();
        let train: Vec<usize> = (0..labels.len())
            .filter(|i| !in_validation.contains(i))
            .collect();
        folds.push(Fold { train, validation });
    }
    Ok(folds)
}

/// Exact one-sided sign test: probability of at least `wins` successes in
/// `wins + losses` fair coin flips. Ties must be excluded by the caller.
pub fn sign_test_p_one_sided(wins: usize, losses: usize) -> f64 {
    let n = wins + losses;
    if n == 0 {
        return 1.0;
    }
    // Binomial tail; n is small here, so direct summation is exact enough.
    let mut coeff = 1.0f64; // C(n, 0)
    let mut tail = 0.0;
    for i in 0..=n {
        if i >= wins {
            tail += coeff;
        }
        coeff = coeff * (n - i) as f64 / (i + 1) as f64;
    }
    tail / 2f64.powi(n as i32)
}

/// Configuration of the strategy-comparison experiment.
#[derive(Debug, Clone)]
pub struct CompareConfig {
    pub folds: usize,
    pub fold_seed: u64,
    pub seeds: Vec<u64>,
    pub max_tokens: usize,
    pub lowercase: bool,
    pub count_mode: CountMode,
    pub tfidf: TfIdfConfig,
    pub model_dim: usize,
    pub train: TrainConfig,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            folds: 5,
            fold_seed: 0,
            seeds: vec![1, 2, 3, 4, 5],
            max_tokens: 16,
            lowercase: true,
            count_mode: CountMode::RawCount,
            tfidf: TfIdfConfig::default(),
            model_dim: 16,
            train: TrainConfig::default(),
        }
    }
}

/// One experiment cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareCell {
    pub strategy: String,
    pub fold: usize,
    pub seed: u64,
    pub macro_f1: f64,
}

/// All cells of a comparison run, in canonical (strategy, fold, seed) order,
/// plus the per-fold score-table fingerprints for leakage audits.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareTable {
    pub cells: Vec<CompareCell>,
    pub fold_fingerprints: Vec<String>,
}

impl CompareTable {
    /// Mean macro-F1 of a strategy across all its cells.
    pub fn mean_for(&self, strategy: &str) -> Option<f64> {
        let values: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| c.strategy == strategy)
            .map(|c| c.macro_f1)
            .collect();
        if values.is_empty() {
            None
        } else {
            Some(values.iter().sum::<f64>() / values.len() as f64)
        }
    }

    /// Per-cell macro-F1s of one strategy keyed by (fold, seed).
    pub fn cells_for(&self, strategy: &str) -> BTreeMap<(usize, u64), f64> {
        self.cells
            .iter()
            .filter(|c| c.strategy == strategy)
            .map(|c| ((c.fold, c.seed), c.macro_f1))
            .collect()
    }

    /// TSV rendering: per-cell rows, then per-strategy means as trailing
    /// comment lines.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("strategy\tfold\tseed\tmacro_f1\n");
        for cell in &self.cells {
            out.push_str(&format!(
                "{}\t{}\t{}\t{:.6}\n",
                cell.strategy, cell.fold, cell.seed, cell.macro_f1
            ));
        }
        let mut seen = Vec::new();
        for cell in &self.cells {
            if !seen.contains(&cell.strategy) {
                seen.push(cell.strategy.clone());
            }
        }
        for strategy in seen {
            if let Some(mean) = self.mean_for(&strategy) {
                out.push_str(&format!("# mean\t{strategy}\t{mean:.6}\n"));
            }
        }
        out
    }
}

/// Runs the full fold x seed x strategy grid.
///
/// Per fold, the score table is fitted on the training split only. Per cell,
/// the toy encoder starts from the same seed-determined initialization for
/// every strategy, is trained on the training split with that strategy's
/// masks, and is scored on the validation split by macro-F1.
pub fn compare_strategies(
    corpus: &LabeledCorpus,
    vocab: &Vocabulary,
    strategies: &[Box<dyn MaskStrategy>],
    config: &CompareConfig,
) -> Result<CompareTable> {
    let mut encoded: Vec<(TokenSequence, Label)> = Vec::with_capacity(corpus.len());
    for doc in &corpus.docs {
        let seq = encode(&doc.text, vocab, config.max_tokens, config.lowercase)?;
        encoded.push((seq, doc.label));
    }
    let labels = corpus.labels();
    let folds = stratified_kfold(&labels, config.folds, config.fold_seed)?;

    let mut cells = Vec::new();
    let mut fold_fingerprints = Vec::with_capacity(folds.len());
    let mut fold_tables: Vec<ScoreTable> = Vec::with_capacity(folds.len());
    for fold in &folds {
        let train_docs: Vec<(TokenSequence, Label)> = fold
            .train
            .iter()
            .map(|&i| encoded[i].clone())
            .collect();
        let model = fit_nb(&train_docs, vocab, config.count_mode, &config.tfidf)?;
        let table = build_score_table(&model);
        fold_fingerprints.push(table.provenance.fingerprint.clone());
        fold_tables.push(table);
    }

    for strategy in strategies {
        for (fold_idx, fold) in folds.iter().enumerate() {
            let table = &fold_tables[fold_idx];
            let masks: Vec<AttentionMask> = encoded
                .iter()
                .map(|(seq, _)| strategy.build(seq, table))
                .collect();
            let train_docs: Vec<(TokenSequence, Label)> = fold
                .train
                .iter()
                .map(|&i| encoded[i].clone())
                .collect();
            let train_masks: Vec<AttentionMask> =
                fold.train.iter().map(|&i| masks[i].clone()).collect();
            for &seed in &config.seeds {
                let init = ToyEncoderParams::init(vocab.len(), config.model_dim, seed);
                let train_config = TrainConfig {
                    seed,
                    ..config.train
                };
                let trained = train(&init, &train_docs, &train_masks, &train_config)?;
                let mut preds = Vec::with_capacity(fold.validation.len());
                let mut golds = Vec::with_capacity(fold.validation.len());
                for &i in &fold.validation {
                    preds.push(predict_label(&trained, &encoded[i].0, &masks[i])?);
                    golds.push(encoded[i].1);
                }
                let report = classification_report(&preds, &golds)?;
                cells.push(CompareCell {
                    strategy: strategy.name().to_string(),
                    fold: fold_idx,
                    seed,
                    macro_f1: report.macro_f1,
                });
            }
        }
    }
    Ok(CompareTable {
        cells,
        fold_fingerprints,
    })
}

/// Fingerprint of a fold's training split, for leakage checks against
/// [`CompareTable::fold_fingerprints`].
pub fn fold_train_fingerprint(
    corpus: &LabeledCorpus,
    vocab: &Vocabulary,
    fold: &Fold,
    max_tokens: usize,
    lowercase: bool,
) -> Result<String> {
    let mut docs = Vec::with_capacity(fold.train.len());
    for &i in &fold.train {
        let doc = &corpus.docs[i];
        docs.push((encode(&doc.text, vocab, max_tokens, lowercase)?, doc.label));
    }
    Ok(corpus_fingerprint(&docs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_map_covers_source_labels() {
        let map = LabelMap::standard();
        assert_eq!(homogenize_labels("CAG", &map).unwrap(), Label::Off);
        assert_eq!(homogenize_labels("OAG", &map).unwrap(), Label::Off);
        assert_eq!(homogenize_labels("NAG", &map).unwrap(), Label::Not);
        assert_eq!(homogenize_labels("0", &map).unwrap(), Label::Not);
        assert_eq!(homogenize_labels("1", &map).unwrap(), Label::Off);
        assert!(matches!(
            homogenize_labels("XYZ", &map),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn label_map_parses_tsv() {
        let map = LabelMap::parse("hate\tOFF\nclean\tNOT\n").unwrap();
        assert_eq!(homogenize_labels("hate", &map).unwrap(), Label::Off);
        assert_eq!(map.len(), 2);
    }

    #[test]
    fn lexicon_rules() {
        let lexicon: BTreeSet<String> = ["fool".to_string()].into();
        let off = RawDocument::new("a", "you fool you", None);
        let not = RawDocument::new("b", "fooling around", None);
        assert_eq!(lexicon_classify(&off, &lexicon).unwrap(), Label::Off);
        assert_eq!(lexicon_classify(&not, &lexicon).unwrap(), Label::Not);
        assert!(matches!(
            lexicon_classify(&off, &BTreeSet::new()),
            Err(Error::EmptyLexicon)
        ));
    }

    #[test]
    fn report_matches_hand_confusion_arithmetic() {
        // tn=50, fp=10, fn=5, tp=35
        let mut preds = Vec::new();
        let mut golds = Vec::new();
        let push = |preds: &mut Vec<Label>, golds: &mut Vec<Label>, p, g, n| {
            for _ in 0..n {
                preds.push(p);
                golds.push(g);
            }
        };
        push(&mut preds, &mut golds, Label::Not, Label::Not, 50);
        push(&mut preds, &mut golds, Label::Off, Label::Not, 10);
        push(&mut preds, &mut golds, Label::Not, Label::Off, 5);
        push(&mut preds, &mut golds, Label::Off, Label::Off, 35);
        let report = classification_report(&preds, &golds).unwrap();
        assert_eq!(report.confusion.total(), 100);
        assert!((report.off.precision - 35.0 / 45.0).abs() < 1e-12);
        assert!((report.off.recall - 0.875).abs() < 1e-12);
        // Exact fractions: OFF F1 = 98/119, NOT F1 = 20/23.
        assert!((report.off.f1 - 98.0 / 119.0).abs() < 1e-12);
        assert!((report.not.f1 - 20.0 / 23.0).abs() < 1e-12);
        assert!((report.macro_f1 - (98.0 / 119.0 + 20.0 / 23.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_predictions_score_one() {
        let golds = vec![Label::Not, Label::Off, Label::Off, Label::Not];
        let report = classification_report(&golds, &golds).unwrap();
        assert_eq!(report.macro_f1, 1.0);
        assert_eq!(report.off.precision, 1.0);
        assert_eq!(report.not.recall, 1.0);
    }

    #[test]
    fn zero_division_is_zero() {
        // Everything predicted NOT: OFF precision and recall are 0/..
        let preds = vec![Label::Not, Label::Not];
        let golds = vec![Label::Off, Label::Not];
        let report = classification_report(&preds, &golds).unwrap();
        assert_eq!(report.off.precision, 0.0);
        assert_eq!(report.off.f1, 0.0);
    }

    #[test]
    fn report_rejects_bad_inputs() {
        assert!(matches!(
            classification_report(&[Label::Not], &[]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            classification_report(&[], &[]),
            Err(Error::EmptyEval)
        ));
    }

    #[test]
    fn report_is_permutation_equivariant() {
        let preds = vec![Label::Not, Label::Off, Label::Off, Label::Not, Label::Off];
        let golds = vec![Label::Off, Label::Off, Label::Not, Label::Not, Label::Off];
        let base = classification_report(&preds, &golds).unwrap();
        let perm = [4, 2, 0, 3, 1];
        let p2: Vec<Label> = perm.iter().map(|&i| preds[i]).collect();
        let g2: Vec<Label> = perm.iter().map(|&i| golds[i]).collect();
        assert_eq!(classification_report(&p2, &g2).unwrap(), base);
    }

    #[test]
    fn macro_f1_invariant_under_class_swap() {
        let preds = vec![Label::Not, Label::Off, Label::Off, Label::Not, Label::Off];
        let golds = vec![Label::Off, Label::Off, Label::Not, Label::Not, Label::Off];
        let swapped_p: Vec<Label> = preds.iter().map(|l| l.flipped()).collect();
        let swapped_g: Vec<Label> = golds.iter().map(|l| l.flipped()).collect();
        let a = classification_report(&preds, &golds).unwrap();
        let b = classification_report(&swapped_p, &swapped_g).unwrap();
        assert!((a.macro_f1 - b.macro_f1).abs() < 1e-12);
    }

    #[test]
    fn kfold_balanced_exact() {
        let labels: Vec<Label> = (0..100)
            .map(|i| if i < 50 { Label::Not } else { Label::Off })
            .collect();
        let folds = stratified_kfold(&labels, 5, 7).unwrap();
        assert_eq!(folds.len(), 5);
        for fold in &folds {
            assert_eq!(fold.validation.len(), 20);
            let off = fold
                .validation
                .iter()
                .filter(|&&i| labels[i] == Label::Off)
                .count();
            assert_eq!(off, 10);
        }
    }

    #[test]
    fn kfold_partitions_cover_everything_once() {
        let labels: Vec<Label> = (0..52)
            .map(|i| if i % 13 == 0 { Label::Off } else { Label::Not })
            .collect();
        let folds = stratified_kfold(&labels, 4, 3).unwrap();
        let mut seen = vec![0usize; labels.len()];
        for fold in &folds {
            for &i in &fold.validation {
                seen[i] += 1;
            }
            let train: BTreeSet<usize> = fold.train.iter().copied().collect();
            assert!(fold.validation.iter().all(|i| !train.contains(i)));
            assert_eq!(fold.train.len() + fold.validation.len(), labels.len());
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn kfold_within_one_of_global_ratio() {
        let labels: Vec<Label> = (0..52)
            .map(|i| if i < 27 { Label::Not } else { Label::Off })
            .collect();
        let folds = stratified_kfold(&labels, 5, 1).unwrap();
        for fold in &folds {
            let not = fold
                .validation
                .iter()
                .filter(|&&i| labels[i] == Label::Not)
                .count();
            let off = fold.validation.len() - not;
            assert!((5..=6).contains(&not), "{not}");
            assert!((5..=5).contains(&off), "{off}");
        }
    }

    #[test]
    fn kfold_is_seed_deterministic() {
        let labels: Vec<Label> = (0..30)
            .map(|i| if i % 3 == 0 { Label::Off } else { Label::Not })
            .collect();
        assert_eq!(
            stratified_kfold(&labels, 3, 5).unwrap(),
            stratified_kfold(&labels, 3, 5).unwrap()
        );
        assert_ne!(
            stratified_kfold(&labels, 3, 5).unwrap(),
            stratified_kfold(&labels, 3, 6).unwrap()
        );
    }

    #[test]
    fn kfold_rejects_small_classes() {
        let labels = vec![Label::Not, Label::Not, Label::Off];
        assert!(matches!(
            stratified_kfold(&labels, 2, 0),
            Err(Error::TooFewPerClass {
                label: Label::Off,
                count: 1,
                k: 2
            })
        ));
    }

    #[test]
    fn sign_test_reference_values() {
        // 18 wins of 25: p ~ 0.0216; 17 of 25: p ~ 0.0539.
        let p18 = sign_test_p_one_sided(18, 7);
        let p17 = sign_test_p_one_sided(17, 8);
        assert!((p18 - 726206.0 / 33554432.0).abs() < 1e-12);
        assert!((p17 - 1807781.0 / 33554432.0).abs() < 1e-12);
        assert!(p18 < 0.05 && p17 > 0.05);
        assert_eq!(sign_test_p_one_sided(0, 0), 1.0);
        assert!((sign_test_p_one_sided(1, 0) - 0.5).abs() < 1e-12);
    }
}
