//! Per-token offensive scores from Laplace-smoothed Multinomial Naive Bayes
//! over raw or TF-IDF token masses.
//!
//! A fitted [`NBModel`] holds, per class, the accumulated mass of every
//! vocabulary token. The smoothed likelihood of token `i` under class `y` is
//! `(N_yi + 1) / (N_y + |V|)` where `|V|` counts the non-special vocabulary
//! entries; the offensive score of a token is the sigmoid of the
//! log-likelihood ratio, which lands in `[0, 1]` and grows with how
//! indicative the token is of the `OFF` class. Scores are persisted as a TSV
//! "database" and looked up by the masking stage.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::tokenizer::{TokenSequence, Vocabulary};

/// How token mass is accumulated before smoothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    /// Raw occurrence counts; kept exact so the brute-force oracle applies.
    RawCount,
    /// Smoothed-idf TF-IDF masses, optionally L2-normalized per document.
    TfIdf,
}

impl CountMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CountMode::RawCount => "raw",
            CountMode::TfIdf => "tfidf",
        }
    }
}

impl fmt::Display for CountMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CountMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<CountMode> {
        match s {
            "raw" => Ok(CountMode::RawCount),
            "tfidf" => Ok(CountMode::TfIdf),
            other => Err(Error::InvalidParameter(format!(
                "unknown count mode {other:?} (expected raw|tfidf)"
            ))),
        }
    }
}

/// TF-IDF variant switches; the defaults are the standard smoothed-idf,
/// L2-normalized form.
#[derive(Debug, Clone, Copy)]
pub struct TfIdfConfig {
    pub idf_smoothing: bool,
    pub per_document_l2_normalize: bool,
}

impl Default for TfIdfConfig {
    fn default() -> Self {
        TfIdfConfig {
            idf_smoothing: true,
            per_document_l2_normalize: true,
        }
    }
}

fn class_index(label: Label) -> usize {
    match label {
        Label::Not => 0,
        Label::Off => 1,
    }
}

/// Fitted per-class token masses plus everything needed for smoothing.
#[derive(Debug, Clone)]
pub struct NBModel {
    /// Token mass per class, indexed `[class][token id]`.
    mass: [Vec<f64>; 2],
    /// Total mass per class.
    class_total: [f64; 2],
    vocab: Vocabulary,
    mode: CountMode,
    fingerprint: String,
}

impl NBModel {
    pub fn mode(&self) -> CountMode {
        self.mode
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// `|V|`: number of non-special vocabulary entries.
    pub fn vocab_size(&self) -> usize {
        self.vocab.real_token_count()
    }

    pub fn class_total(&self, label: Label) -> f64 {
        self.class_total[class_index(label)]
    }

    pub fn feature_mass(&self, token: &str, label: Label) -> f64 {
        match self.vocab.id_of(token) {
            Some(id) => self.mass[class_index(label)][id as usize],
            None => 0.0,
        }
    }

    /// Content hash of the corpus the model was fitted on.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }
}

/// Canonical content hash of a tokenized, labeled corpus.
pub fn corpus_fingerprint(docs: &[(TokenSequence, Label)]) -> String {
    let mut hasher = Sha256::new();
    for (seq, label) in docs {
        hasher.update(label.as_str().as_bytes());
        hasher.update(b"\t");
        for (i, id) in seq.ids[..seq.n_real].iter().enumerate() {
            if i > 0 {
                hasher.update(b",");
            }
            hasher.update(id.to_string().as_bytes());
        }
        hasher.update(b"\n");
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Occurrence counts of the non-special tokens of one sequence, in token-id
/// order.
fn real_token_counts(seq: &TokenSequence, vocab: &Vocabulary) -> BTreeMap<u32, usize> {
    let mut counts = BTreeMap::new();
    for &id in &seq.ids[..seq.n_real] {
        if !vocab.is_special_id(id) {
            *counts.entry(id).or_insert(0) += 1;
        }
    }
    counts
}

/// Fits the per-class token masses.
///
/// Raw mode accumulates plain occurrence counts. TF-IDF mode weights each
/// document's counts by `idf_i = ln((1 + n_docs) / (1 + df_i)) + 1` (or the
/// unsmoothed variant) and optionally L2-normalizes the document vector
/// before accumulation. Summation is document-order then token-id-order, so
/// refits are bit-identical.
pub fn fit_nb(
    docs: &[(TokenSequence, Label)],
    vocab: &Vocabulary,
    mode: CountMode,
    config: &TfIdfConfig,
) -> Result<NBModel> {
    for label in [Label::Not, Label::Off] {
        if !docs.iter().any(|(_, l)| *l == label) {
            return Err(Error::MissingClass(label));
        }
    }
    if vocab.real_token_count() == 0 {
        return Err(Error::InvalidParameter(
            "vocabulary has no non-special tokens".into(),
        ));
    }
    let mut mass = [vec![0.0; vocab.len()], vec![0.0; vocab.len()]];

    match mode {
        CountMode::RawCount => {
            for (seq, label) in docs {
                let y = class_index(*label);
                for (id, count) in real_token_counts(seq, vocab) {
                    mass[y][id as usize] += count as f64;
                }
            }
        }
        CountMode::TfIdf => {
            let n_docs = docs.len();
            let mut df = vec![0usize; vocab.len()];
            for (seq, _) in docs {
                for id in real_token_counts(seq, vocab).keys() {
                    df[*id as usize] += 1;
                }
            }
            let idf = |id: u32| -> f64 {
                let d = df[id as usize] as f64;
                let n = n_docs as f64;
                if config.idf_smoothing {
                    ((1.0 + n) / (1.0 + d)).ln() + 1.0
                } else {
                    (n / d).ln() + 1.0
                }
            };
            for (seq, label) in docs {
                let y = class_index(*label);
                let counts = real_token_counts(seq, vocab);
                let mut weights: Vec<(u32, f64)> = counts
                    .iter()
                    .map(|(&id, &tf)| (id, tf as f64 * idf(id)))
                    .collect();
                if config.per_document_l2_normalize {
                    let norm = weights.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
                    if norm > 0.0 {
                        for (_, w) in &mut weights {
                            *w /= norm;
                        }
                    }
                }
                for (id, w) in weights {
                    mass[y][id as usize] += w;
                }
            }
        }
    }

    let class_total = [mass[0].iter().sum(), mass[1].iter().sum()];
    Ok(NBModel {
        mass,
        class_total,
        vocab: vocab.clone(),
        mode,
        fingerprint: corpus_fingerprint(docs),
    })
}

/// `(N_yi + 1) / (N_y + |V|)`; tokens never seen (or outside the vocabulary)
/// have `N_yi = 0`.
pub fn smoothed_likelihood(model: &NBModel, token: &str, label: Label) -> f64 {
    let mass = model.feature_mass(token, label);
    (mass + 1.0) / (model.class_total(label) + model.vocab_size() as f64)
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Sigmoid of the log-likelihood ratio of a pair of smoothed likelihoods.
pub fn score_from_likelihoods(theta_off: f64, theta_not: f64) -> f64 {
    sigmoid((theta_off / theta_not).ln())
}

/// Offensive score of a token in `[0, 1]`; smoothing keeps both likelihoods
/// positive, so the log ratio is always finite.
pub fn offensive_score(model: &NBModel, token: &str) -> f64 {
    score_from_likelihoods(
        smoothed_likelihood(model, token, Label::Off),
        smoothed_likelihood(model, token, Label::Not),
    )
}

/// Provenance recorded with a score table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub fingerprint: String,
    pub mode: CountMode,
    pub created: Option<String>,
}

/// The persisted token -> offensive score "database".
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    entries: BTreeMap<String, f64>,
    pub provenance: Provenance,
}

impl ScoreTable {
    pub fn empty() -> ScoreTable {
        ScoreTable {
            entries: BTreeMap::new(),
            provenance: Provenance {
                fingerprint: String::new(),
                mode: CountMode::RawCount,
                created: None,
            },
        }
    }

    /// Builds a table from explicit entries, enforcing the range and
    /// special-token invariants.
    pub fn from_entries(
        entries: impl IntoIterator<Item = (String, f64)>,
        provenance: Provenance,
    ) -> Result<ScoreTable> {
        let mut map = BTreeMap::new();
        for (token, score) in entries {
            if !(0.0..=1.0).contains(&score) {
                return Err(Error::MalformedScoreFile(format!(
                    "score {score} for {token:?} outside [0,1]"
                )));
            }
            if Vocabulary::is_special_token(&token) {
                return Err(Error::MalformedScoreFile(format!(
                    "special token {token:?} not allowed"
                )));
            }
            if map.insert(token.clone(), score).is_some() {
                return Err(Error::MalformedScoreFile(format!(
                    "duplicate token {token:?}"
                )));
            }
        }
        Ok(ScoreTable {
            entries: map,
            provenance,
        })
    }

    pub fn get(&self, token: &str) -> Option<f64> {
        self.entries.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(t, &s)| (t.as_str(), s))
    }

    /// How many entries score at or above `threshold`; reported by the CLI
    /// next to every built table.
    pub fn count_at_or_above(&self, threshold: f64) -> usize {
        self.entries.values().filter(|&&s| s >= threshold).count()
    }
}

/// One entry per non-special token with nonzero training mass.
pub fn build_score_table(model: &NBModel) -> ScoreTable {
    let mut entries = BTreeMap::new();
    for id in 0..model.vocab.len() as u32 {
        if model.vocab.is_special_id(id) {
            continue;
        }
        let mass = model.mass[0][id as usize] + model.mass[1][id as usize];
        if mass > 0.0 {
            let token = model.vocab.token(id).to_string();
            entries.insert(token.clone(), offensive_score(model, &token));
        }
    }
    ScoreTable {
        entries,
        provenance: Provenance {
            fingerprint: model.fingerprint.clone(),
            mode: model.mode,
            created: None,
        },
    }
}

/// Renders a table to its TSV form: provenance header comments, then one
/// `token<TAB>score` line per entry with 17 significant digits.
pub fn score_table_to_tsv(table: &ScoreTable) -> String {
    let mut out = String::new();
    out.push_str("# offmask-scores v1\n");
    out.push_str(&format!("# fingerprint: {}\n", table.provenance.fingerprint));
    out.push_str(&format!("# mode: {}\n", table.provenance.mode));
    if let Some(created) = &table.provenance.created {
        out.push_str(&format!("# created: {created}\n"));
    }
    for (token, score) in &table.entries {
        out.push_str(&format!("{token}\t{score:.16e}\n"));
    }
    out
}

pub fn save_score_table(table: &ScoreTable, path: &Path) -> Result<()> {
    std::fs::write(path, score_table_to_tsv(table))
        .map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn parse_score_table(content: &str) -> Result<ScoreTable> {
    let mut fingerprint = String::new();
    let mut mode = CountMode::RawCount;
    let mut created = None;
    let mut entries = BTreeMap::new();
    for line in content.lines() {
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("fingerprint:") {
                fingerprint = v.trim().to_string();
            } else if let Some(v) = rest.strip_prefix("mode:") {
                mode = v.trim().parse()?;
            } else if let Some(v) = rest.strip_prefix("created:") {
                created = Some(v.trim().to_string());
            }
            continue;
        }
        let (token, score_str) = line
            .split_once('\t')
            .ok_or_else(|| Error::MalformedScoreFile(format!("missing tab in {line:?}")))?;
        let score: f64 = score_str
            .parse()
            .map_err(|_| Error::MalformedScoreFile(format!("non-numeric score {score_str:?}")))?;
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::MalformedScoreFile(format!(
                "score {score} for {token:?} outside [0,1]"
            )));
        }
        if Vocabulary::is_special_token(token) {
            return Err(Error::MalformedScoreFile(format!(
                "special token {token:?} not allowed"
            )));
        }
        if entries.insert(token.to_string(), score).is_some() {
            return Err(Error::MalformedScoreFile(format!(
                "duplicate token {token:?}"
            )));
        }
    }
    Ok(ScoreTable {
        entries,
        provenance: Provenance {
            fingerprint,
            mode,
            created,
        },
    })
}

pub fn load_score_table(path: &Path) -> Result<ScoreTable> {
    let content =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_score_table(&content)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::{encode, PAD, UNK, CLS, SEP};

    fn toy_vocab() -> Vocabulary {
        Vocabulary::from_tokens(
            [PAD, UNK, CLS, SEP, "bad", "dog", "good"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        )
        .unwrap()
    }

    /// OFF docs {"bad bad", "bad dog"}, NOT docs {"good dog"}.
    fn toy_corpus(vocab: &Vocabulary) -> Vec<(TokenSequence, Label)> {
        [
            ("bad bad", Label::Off),
            ("bad dog", Label::Off),
            ("good dog", Label::Not),
        ]
        .iter()
        .map(|(text, label)| (encode(text, vocab, 8, true).unwrap(), *label))
        .collect()
    }

    #[test]
    fn raw_counts_match_hand_arithmetic() {
        let vocab = toy_vocab();
        let model = fit_nb(
            &toy_corpus(&vocab),
            &vocab,
            CountMode::RawCount,
            &TfIdfConfig::default(),
        )
        .unwrap();
        assert_eq!(model.feature_mass("bad", Label::Off), 3.0);
        assert_eq!(model.class_total(Label::Off), 4.0);
        assert_eq!(model.vocab_size(), 3);
        assert!((smoothed_likelihood(&model, "bad", Label::Off) - 4.0 / 7.0).abs() < 1e-15);
        assert!((smoothed_likelihood(&model, "good", Label::Not) - 0.4).abs() < 1e-15);
        assert!((smoothed_likelihood(&model, "bad", Label::Not) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn likelihoods_sum_to_one_per_class() {
        let vocab = toy_vocab();
        for mode in [CountMode::RawCount, CountMode::TfIdf] {
            let model = fit_nb(&toy_corpus(&vocab), &vocab, mode, &TfIdfConfig::default()).unwrap();
            for label in [Label::Not, Label::Off] {
                let total: f64 = ["bad", "dog", "good"]
                    .iter()
                    .map(|t| smoothed_likelihood(&model, t, label))
                    .sum();
                assert!((total - 1.0).abs() < 1e-9, "{mode:?}/{label}: {total}");
            }
        }
    }

    #[test]
    fn missing_class_is_rejected() {
        let vocab = toy_vocab();
        let docs: Vec<_> = toy_corpus(&vocab)
            .into_iter()
            .filter(|(_, l)| *l == Label::Off)
            .collect();
        let err = fit_nb(&docs, &vocab, CountMode::RawCount, &TfIdfConfig::default()).unwrap_err();
        assert!(matches!(err, Error::MissingClass(Label::Not)));
    }

    #[test]
    fn offensive_score_closed_form() {
        let vocab = toy_vocab();
        let model = fit_nb(
            &toy_corpus(&vocab),
            &vocab,
            CountMode::RawCount,
            &TfIdfConfig::default(),
        )
        .unwrap();
        let score = offensive_score(&model, "bad");
        assert!((score - 20.0 / 27.0).abs() < 1e-12, "{score}");
        // theta_off == theta_not for a never-seen token happens only when the
        // denominators agree; check the direct identity instead.
        assert!((score_from_likelihoods(0.3, 0.3) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unseen_token_with_empty_class() {
        // A class can have zero mass only when every one of its documents is
        // all specials; force it through the direct formula.
        let vocab = toy_vocab();
        let model = fit_nb(
            &toy_corpus(&vocab),
            &vocab,
            CountMode::RawCount,
            &TfIdfConfig::default(),
        )
        .unwrap();
        // Unseen token: mass 0 under both classes.
        assert_eq!(model.feature_mass("zzz", Label::Off), 0.0);
        let l = smoothed_likelihood(&model, "zzz", Label::Off);
        assert!((l - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn score_table_has_training_tokens_only() {
        let vocab = toy_vocab();
        let model = fit_nb(
            &toy_corpus(&vocab),
            &vocab,
            CountMode::RawCount,
            &TfIdfConfig::default(),
        )
        .unwrap();
        let table = build_score_table(&model);
        assert_eq!(table.len(), 3);
        assert!(table.get("bad").is_some());
        assert!(table.get("[CLS]").is_none());
        assert!(table.iter().all(|(_, s)| (0.0..=1.0).contains(&s)));
        assert_eq!(table.count_at_or_above(0.6), 1); // only "bad"
    }

    #[test]
    fn save_load_round_trip() {
        let vocab = toy_vocab();
        let model = fit_nb(
            &toy_corpus(&vocab),
            &vocab,
            CountMode::RawCount,
            &TfIdfConfig::default(),
        )
        .unwrap();
        let table = build_score_table(&model);
        let tsv = score_table_to_tsv(&table);
        let loaded = parse_score_table(&tsv).unwrap();
        assert_eq!(loaded, table);
    }

    #[test]
    fn malformed_score_files_rejected() {
        assert!(matches!(
            parse_score_table("tok\t1.5\n"),
            Err(Error::MalformedScoreFile(_))
        ));
        assert!(matches!(
            parse_score_table("tok\tabc\n"),
            Err(Error::MalformedScoreFile(_))
        ));
        assert!(matches!(
            parse_score_table("tok\t0.5\ntok\t0.5\n"),
            Err(Error::MalformedScoreFile(_))
        ));
        assert!(matches!(
            parse_score_table("[CLS]\t0.5\n"),
            Err(Error::MalformedScoreFile(_))
        ));
    }

    #[test]
    fn label_swap_flips_scores() {
        let vocab = toy_vocab();
        let docs = toy_corpus(&vocab);
        let swapped: Vec<_> = docs
            .iter()
            .map(|(s, l)| (s.clone(), l.flipped()))
            .collect();
        let m1 = fit_nb(&docs, &vocab, CountMode::RawCount, &TfIdfConfig::default()).unwrap();
        let m2 = fit_nb(&swapped, &vocab, CountMode::RawCount, &TfIdfConfig::default()).unwrap();
        for token in ["bad", "dog", "good"] {
            let s1 = offensive_score(&m1, token);
            let s2 = offensive_score(&m2, token);
            assert!((s1 + s2 - 1.0).abs() < 1e-12, "{token}: {s1} + {s2}");
        }
    }

    #[test]
    fn tfidf_mass_sums_to_class_total() {
        let vocab = toy_vocab();
        let model = fit_nb(
            &toy_corpus(&vocab),
            &vocab,
            CountMode::TfIdf,
            &TfIdfConfig::default(),
        )
        .unwrap();
        for label in [Label::Not, Label::Off] {
            let total: f64 = ["bad", "dog", "good"]
                .iter()
                .map(|t| model.feature_mass(t, label))
                .sum();
            let rel = (total - model.class_total(label)).abs() / model.class_total(label).max(1e-30);
            assert!(rel < 1e-9);
        }
    }

    #[test]
    fn fingerprint_distinguishes_corpora() {
        let vocab = toy_vocab();
        let docs = toy_corpus(&vocab);
        let fp_all = corpus_fingerprint(&docs);
        let fp_head = corpus_fingerprint(&docs[..2]);
        assert_ne!(fp_all, fp_head);
        assert_eq!(fp_all.len(), 64);
    }
}
