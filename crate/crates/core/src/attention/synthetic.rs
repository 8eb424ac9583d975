//! Planted-token synthetic corpora: a desk-scale stand-in for the real
//! offensive-language datasets.
//!
//! Documents are random token sequences over a synthetic vocabulary; a
//! document is labeled `OFF` exactly when it contains at least one of the
//! planted "offensive" tokens, after which a fixed fraction of labels is
//! flipped as noise. Because ground truth is constructed, a lexicon baseline
//! over the planted tokens is perfect at zero noise, and a fitted score
//! table must rank every planted token above every ordinary one.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Label, LabeledCorpus, LabeledDocument};
use crate::error::{Error, Result};
use crate::tokenizer::{Vocabulary, CLS, PAD, SEP, UNK};

const MIN_DOC_LEN: usize = 5;
const MAX_DOC_LEN: usize = 14;

/// A vocabulary of `n_tokens` synthetic words `w000, w001, ...` plus the
/// four special tokens.
pub fn synthetic_vocabulary(n_tokens: usize) -> Vocabulary {
    let mut tokens: Vec<String> = [PAD, UNK, CLS, SEP].iter().map(|s| s.to_string()).collect();
    for i in 0..n_tokens {
        tokens.push(format!("w{i:03}"));
    }
    Vocabulary::from_tokens(tokens).expect("synthetic tokens are distinct")
}

/// Generates `n_docs` random documents over the vocabulary's non-special
/// tokens, labels them by planted-token presence, and flips
/// `floor(noise_rate * n_docs)` labels.
pub fn make_synthetic_corpus(
    n_docs: usize,
    vocab: &Vocabulary,
    planted_offensive_tokens: &[String],
    noise_rate: f64,
    seed: u64,
) -> Result<LabeledCorpus> {
    if !(0.0..=1.0).contains(&noise_rate) {
        return Err(Error::InvalidParameter(format!(
            "noise_rate must be in [0,1], got {noise_rate}"
        )));
    }
    for token in planted_offensive_tokens {
        match vocab.id_of(token) {
            Some(id) if !vocab.is_special_id(id) => {}
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "planted token {token:?} is not an ordinary vocabulary token"
                )))
            }
        }
    }
    let word_pool: Vec<&str> = vocab
        .tokens()
        .iter()
        .enumerate()
        .filter(|(id, _)| !vocab.is_special_id(*id as u32))
        .map(|(_, t)| t.as_str())
        .collect();
    if word_pool.is_empty() {
        return Err(Error::InvalidParameter(
            "vocabulary has no non-special tokens".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = Vec::with_capacity(n_docs);
    for i in 0..n_docs {
        let len = rng.gen_range(MIN_DOC_LEN..=MAX_DOC_LEN);
        let words: Vec<&str> = (0..len)
            .map(|_| *word_pool.choose(&mut rng).expect("non-empty pool"))
            .collect();
        let is_off = words
            .iter()
            .any(|w| planted_offensive_tokens.iter().any(|p| p == w));
        docs.push(LabeledDocument {
            id: format!("synth-{i:06}"),
            text: words.join(" "),
            label: if is_off { Label::Off } else { Label::Not },
        });
    }

    let n_flips = (noise_rate * n_docs as f64).floor() as usize;
    if n_flips > 0 {
        let mut indices: Vec<usize> = (0..n_docs).collect();
        indices.shuffle(&mut rng);
        for &i in indices.iter().take(n_flips) {
            docs[i].label = docs[i].label.flipped();
        }
    }
    Ok(LabeledCorpus::new(docs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_follow_planted_tokens_at_zero_noise() {
        let vocab = synthetic_vocabulary(40);
        let planted = vec!["w000".to_string(), "w001".to_string()];
        let corpus = make_synthetic_corpus(300, &vocab, &planted, 0.0, 11).unwrap();
        assert_eq!(corpus.len(), 300);
        for doc in &corpus.docs {
            let has_planted = doc
                .text
                .split_whitespace()
                .any(|w| planted.iter().any(|p| p == w));
            assert_eq!(doc.label == Label::Off, has_planted, "{}", doc.id);
        }
        assert!(corpus.class_count(Label::Off) > 0);
        assert!(corpus.class_count(Label::Not) > 0);
    }

    #[test]
    fn noise_flips_exact_fraction() {
        let vocab = synthetic_vocabulary(40);
        let planted = vec!["w000".to_string()];
        let clean = make_synthetic_corpus(200, &vocab, &planted, 0.0, 5).unwrap();
        let noisy = make_synthetic_corpus(200, &vocab, &planted, 0.1, 5).unwrap();
        let flipped = clean
            .docs
            .iter()
            .zip(&noisy.docs)
            .filter(|(a, b)| a.label != b.label)
            .count();
        assert_eq!(flipped, 20);
        // Texts are identical; only labels differ.
        for (a, b) in clean.docs.iter().zip(&noisy.docs) {
            assert_eq!(a.text, b.text);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let vocab = synthetic_vocabulary(30);
        let planted = vec!["w002".to_string()];
        let a = make_synthetic_corpus(50, &vocab, &planted, 0.05, 3).unwrap();
        let b = make_synthetic_corpus(50, &vocab, &planted, 0.05, 3).unwrap();
        let c = make_synthetic_corpus(50, &vocab, &planted, 0.05, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_planted_tokens_outside_vocab() {
        let vocab = synthetic_vocabulary(10);
        let planted = vec!["zebra".to_string()];
        assert!(make_synthetic_corpus(10, &vocab, &planted, 0.0, 1).is_err());
        let planted = vec!["[CLS]".to_string()];
        assert!(make_synthetic_corpus(10, &vocab, &planted, 0.0, 1).is_err());
    }
}
