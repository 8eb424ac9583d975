//! WordPiece tokenization against a line-ordered vocabulary file.
//!
//! Words are matched greedily, longest prefix first; word-internal pieces
//! carry the `##` continuation prefix, and a word with no match at some
//! position collapses to `[UNK]`. Encoded sequences are wrapped with
//! `[CLS]`/`[SEP]`, truncated to `max_tokens`, and right-padded with `[PAD]`.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

pub const PAD: &str = "[PAD]";
pub const UNK: &str = "[UNK]";
pub const CLS: &str = "[CLS]";
pub const SEP: &str = "[SEP]";

const CONTINUATION_PREFIX: &str = "##";

/// Token string <-> integer id map; ids are line indices of the vocab file.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
    pad_id: u32,
    unk_id: u32,
    cls_id: u32,
    sep_id: u32,
}

impl Vocabulary {
    pub fn from_tokens(tokens: Vec<String>) -> Result<Vocabulary> {
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, tok) in tokens.iter().enumerate() {
            if tok.is_empty() {
                return Err(Error::MalformedRecord(format!(
                    "vocabulary line {} is empty",
                    i + 1
                )));
            }
            if index.insert(tok.clone(), i as u32).is_some() {
                return Err(Error::DuplicateToken {
                    token: tok.clone(),
                    line: i + 1,
                });
            }
        }
        let special = |name: &'static str| -> Result<u32> {
            index.get(name).copied().ok_or(Error::MissingSpecialToken(name))
        };
        Ok(Vocabulary {
            pad_id: special(PAD)?,
            unk_id: special(UNK)?,
            cls_id: special(CLS)?,
            sep_id: special(SEP)?,
            tokens,
            index,
        })
    }

    pub fn parse(content: &str) -> Result<Vocabulary> {
        Vocabulary::from_tokens(content.lines().map(str::to_string).collect())
    }

    pub fn load(path: &Path) -> Result<Vocabulary> {
        let content =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Vocabulary::parse(&content)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Vocabulary size excluding the four special tokens; the `|V|` of the
    /// smoothed likelihood denominator.
    pub fn real_token_count(&self) -> usize {
        self.tokens.len() - 4
    }

    pub fn id_of(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn pad_id(&self) -> u32 {
        self.pad_id
    }

    pub fn unk_id(&self) -> u32 {
        self.unk_id
    }

    pub fn cls_id(&self) -> u32 {
        self.cls_id
    }

    pub fn sep_id(&self) -> u32 {
        self.sep_id
    }

    pub fn is_special_id(&self, id: u32) -> bool {
        id == self.pad_id || id == self.unk_id || id == self.cls_id || id == self.sep_id
    }

    pub fn is_special_token(token: &str) -> bool {
        matches!(token, PAD | UNK | CLS | SEP)
    }
}

/// A fixed-length encoded document: ids and parallel token strings, with
/// `n_real` counting the non-`[PAD]` prefix (which starts with `[CLS]` and
/// ends with `[SEP]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub ids: Vec<u32>,
    pub tokens: Vec<String>,
    pub n_real: usize,
}

impl TokenSequence {
    /// Wraps already-tokenized word pieces with `[CLS]`/`[SEP]` and pads to
    /// `max_tokens`. Pieces beyond `max_tokens - 2` are dropped.
    pub fn from_pieces(pieces: &[String], vocab: &Vocabulary, max_tokens: usize) -> Result<Self> {
        if max_tokens < 2 {
            return Err(Error::InvalidParameter("max_tokens must be >= 2".into()));
        }
        let keep = pieces.len().min(max_tokens - 2);
        let mut tokens = Vec::with_capacity(max_tokens);
        tokens.push(CLS.to_string());
        tokens.extend_from_slice(&pieces[..keep]);
        tokens.push(SEP.to_string());
        let n_real = tokens.len();
        tokens.resize(max_tokens, PAD.to_string());
        let ids = tokens
            .iter()
            .map(|t| vocab.id_of(t).unwrap_or(vocab.unk_id()))
            .collect();
        Ok(TokenSequence {
            ids,
            tokens,
            n_real,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn is_padding(&self, position: usize) -> bool {
        position >= self.n_real
    }
}

/// Greedy longest-match-first subword split of a single word.
///
/// Returns `["[UNK]"]` when any position has no vocabulary match, or when
/// the word would produce more than `piece_budget` pieces.
pub fn wordpiece_tokenize(word: &str, vocab: &Vocabulary) -> Vec<String> {
    wordpiece_with_budget(word, vocab, usize::MAX)
}

fn wordpiece_with_budget(word: &str, vocab: &Vocabulary, piece_budget: usize) -> Vec<String> {
    debug_assert!(!word.is_empty());
    let chars: Vec<char> = word.chars().collect();
    let mut pieces = Vec::new();
    let mut start = 0;
    while start < chars.len() {
        let mut matched = None;
        for end in (start + 1..=chars.len()).rev() {
            let mut candidate: String = chars[start..end].iter().collect();
            if start > 0 {
                candidate.insert_str(0, CONTINUATION_PREFIX);
            }
            if vocab.id_of(&candidate).is_some() {
                matched = Some((candidate, end));
                break;
            }
        }
        match matched {
            Some((piece, end)) => {
                pieces.push(piece);
                start = end;
            }
            None => return vec![UNK.to_string()],
        }
        if pieces.len() > piece_budget {
            return vec![UNK.to_string()];
        }
    }
    pieces
}

/// Renders encoded documents to the tokenized interchange TSV: one row per
/// document with the full padded token and id sequences space-joined.
pub fn tokenized_to_tsv(docs: &[(String, TokenSequence)]) -> String {
    let mut out = String::from("id\ttokens\tids\n");
    for (id, seq) in docs {
        let ids: Vec<String> = seq.ids.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("{id}\t{}\t{}\n", seq.tokens.join(" "), ids.join(" ")));
    }
    out
}

/// Parses the tokenized interchange TSV back into sequences; `n_real` is
/// recovered from the position of the first `[PAD]`.
pub fn parse_tokenized_tsv(content: &str) -> Result<Vec<(String, TokenSequence)>> {
    let mut lines = content.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MalformedRecord("empty tokenized file".into()))?;
    if header != "id\ttokens\tids" {
        return Err(Error::MalformedRecord(format!(
            "expected header 'id\\ttokens\\tids', got {header:?}"
        )));
    }
    let mut docs = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::MalformedRecord(format!(
                "line {}: expected 3 tab-separated fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let tokens: Vec<String> = fields[1].split(' ').map(str::to_string).collect();
        let ids: Result<Vec<u32>> = fields[2]
            .split(' ')
            .map(|v| {
                v.parse().map_err(|_| {
                    Error::MalformedRecord(format!("line {}: bad token id {v:?}", lineno + 2))
                })
            })
            .collect();
        let ids = ids?;
        if ids.len() != tokens.len() {
            return Err(Error::MalformedRecord(format!(
                "line {}: {} tokens vs {} ids",
                lineno + 2,
                tokens.len(),
                ids.len()
            )));
        }
        let n_real = tokens.iter().position(|t| t == PAD).unwrap_or(tokens.len());
        docs.push((
            fields[0].to_string(),
            TokenSequence {
                ids,
                tokens,
                n_real,
            },
        ));
    }
    Ok(docs)
}

fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(c as u32,
            0x00A1..=0x00BF
            | 0x060C | 0x061B | 0x061F          // Arabic comma, semicolon, question mark
            | 0x066A..=0x066D
            | 0x2000..=0x206F
            | 0x2E00..=0x2E7F
            | 0x3000..=0x303F
            | 0xFE30..=0xFE6F
            | 0xFF01..=0xFF0F
            | 0xFF1A..=0xFF20
            | 0xFF3B..=0xFF40
            | 0xFF5B..=0xFF65)
}

/// Splits on whitespace, detaching punctuation characters as their own words.
pub fn basic_tokenize(text: &str) -> Vec<String> {
    let mut words = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_whitespace() {
            if !current.is_empty() {
                words.push(std::mem::take(&mut current));
            }
        } else if is_punctuation(c) {
            if !current.is_empty() {
                words.push(std::mem::take(&mut current));
            }
            words.push(c.to_string());
        } else {
            current.push(c);
        }
    }
    if !current.is_empty() {
        words.push(current);
    }
    words
}

/// Encodes preprocessed text to a fixed-length [`TokenSequence`].
///
/// `lowercase` is set for English-like corpora and left off for Persian.
pub fn encode(
    text: &str,
    vocab: &Vocabulary,
    max_tokens: usize,
    lowercase: bool,
) -> Result<TokenSequence> {
    if max_tokens < 3 {
        return Err(Error::InvalidParameter(
            "max_tokens must be >= 3 to fit [CLS], a token, and [SEP]".into(),
        ));
    }
    let text = if lowercase {
        text.to_lowercase()
    } else {
        text.to_string()
    };
    let mut pieces = Vec::new();
    for word in basic_tokenize(&text) {
        pieces.extend(wordpiece_with_budget(&word, vocab, max_tokens));
        if pieces.len() >= max_tokens - 2 {
            break;
        }
    }
    if pieces.is_empty() {
        return Err(Error::EmptyInput);
    }
    TokenSequence::from_pieces(&pieces, vocab, max_tokens)
}

/// Reconstructs the word span of a sequence: specials dropped, continuation
/// pieces glued to their predecessor.
pub fn decode(seq: &TokenSequence) -> String {
    let mut words: Vec<String> = Vec::new();
    for token in &seq.tokens[..seq.n_real] {
        if Vocabulary::is_special_token(token) {
            continue;
        }
        if let Some(rest) = token.strip_prefix(CONTINUATION_PREFIX) {
            if let Some(last) = words.last_mut() {
                last.push_str(rest);
                continue;
            }
        }
        words.push(token.clone());
    }
    words.join(" ")
}
