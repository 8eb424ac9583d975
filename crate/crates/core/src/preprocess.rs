//! Deterministic text normalization for English-style and Persian-style
//! social-media corpora.
//!
//! The full pipeline applies, in order: emoji handling, hashtag segmentation,
//! the user/URL policy, character normalization (Persian mode), elongation
//! normalization, and whitespace collapse. Each stage is a pure function of
//! `(text, policy)` and the composition is idempotent. Sequence truncation is
//! not done here; the policy records `max_tokens` and the tokenizer enforces
//! it.

use std::collections::HashMap;
use std::path::Path;

use crate::corpus::RawDocument;
use crate::error::{Error, Result};

pub const USER_TOKEN: &str = "@USER";
pub const COLLAPSED_USER_TOKEN: &str = "@USERS";

/// Language-specific policy selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LanguageMode {
    EnglishLike,
    PersianLike,
}

/// Configuration for the preprocessing pipeline.
///
/// `EnglishLike` replaces emoji with textual descriptors (and therefore needs
/// an emoji map as soon as an emoji is actually encountered), collapses
/// repeated `@USER` mentions and rewrites `URL` tokens. `PersianLike` deletes
/// emoji, user ids, bare numbers and hyperlinks, and normalizes Arabic
/// character variants.
#[derive(Debug, Clone)]
pub struct PreprocessPolicy {
    pub language_mode: LanguageMode,
    pub max_tokens: usize,
    pub emoji_map: Option<EmojiMap>,
}

impl PreprocessPolicy {
    pub fn new(
        language_mode: LanguageMode,
        max_tokens: usize,
        emoji_map: Option<EmojiMap>,
    ) -> Result<Self> {
        if max_tokens == 0 {
            return Err(Error::InvalidParameter("max_tokens must be >= 1".into()));
        }
        Ok(PreprocessPolicy {
            language_mode,
            max_tokens,
            emoji_map,
        })
    }

    pub fn english(emoji_map: Option<EmojiMap>) -> Self {
        PreprocessPolicy {
            language_mode: LanguageMode::EnglishLike,
            max_tokens: 64,
            emoji_map,
        }
    }

    pub fn persian() -> Self {
        PreprocessPolicy {
            language_mode: LanguageMode::PersianLike,
            max_tokens: 64,
            emoji_map: None,
        }
    }
}

/// Emoji-to-descriptor lookup loaded from a TSV file.
///
/// Each line is `CODEPOINTS<TAB>descriptor`, where `CODEPOINTS` is one or
/// more uppercase hex codepoints joined by `-` (for example
/// `1F642<TAB>slightly smiling face` or `1F44D-1F3FB<TAB>thumbs up light
/// skin tone`). Longer sequences win over their prefixes.
#[derive(Debug, Clone, Default)]
pub struct EmojiMap {
    entries: HashMap<Vec<char>, String>,
    max_len: usize,
}

impl EmojiMap {
    pub fn parse(content: &str) -> Result<EmojiMap> {
        let mut entries = HashMap::new();
        let mut max_len = 0;
        for (lineno, line) in content.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (codes, descriptor) = line.split_once('\t').ok_or_else(|| {
                Error::MalformedRecord(format!("emoji map line {}: missing tab", lineno + 1))
            })?;
            let mut seq = Vec::new();
            for code in codes.split('-') {
                let cp = u32::from_str_radix(code, 16).map_err(|_| {
                    Error::MalformedRecord(format!(
                        "emoji map line {}: bad codepoint {code:?}",
                        lineno + 1
                    ))
                })?;
                seq.push(char::from_u32(cp).ok_or_else(|| {
                    Error::MalformedRecord(format!(
                        "emoji map line {}: invalid codepoint U+{cp:X}",
                        lineno + 1
                    ))
                })?);
            }
            if seq.is_empty() {
                return Err(Error::MalformedRecord(format!(
                    "emoji map line {}: empty codepoint sequence",
                    lineno + 1
                )));
            }
            max_len = max_len.max(seq.len());
            entries.insert(seq, descriptor.to_string());
        }
        Ok(EmojiMap { entries, max_len })
    }

    pub fn load(path: &Path) -> Result<EmojiMap> {
        let content =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        EmojiMap::parse(&content)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// True for codepoints treated as emoji: the pictograph blocks plus the
/// variation selector and zero-width joiner that glue sequences together.
pub fn is_emoji_char(c: char) -> bool {
    matches!(c, '\u{1F300}'..='\u{1FAFF}' | '\u{2600}'..='\u{27BF}' | '\u{FE0F}' | '\u{200D}')
}

/// Replaces every `#`-prefixed token with its constituent words.
///
/// Words are split on underscores, digit boundaries, and lower-to-upper
/// camel-case transitions; the `#` itself never survives.
pub fn segment_hashtags(text: &str) -> String {
    if !text.contains('#') {
        return text.to_string();
    }
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '#' {
            let mut j = i + 1;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let body: String = chars[i + 1..j].iter().collect();
            let words = split_hashtag_body(&body);
            if !words.is_empty() {
                if !out.is_empty() && !out.ends_with(char::is_whitespace) {
                    out.push(' ');
                }
                out.push_str(&words.join(" "));
                if j < chars.len() && !chars[j].is_whitespace() {
                    out.push(' ');
                }
            }
            i = j;
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    out
}

fn split_hashtag_body(body: &str) -> Vec<String> {
    let mut words = Vec::new();
    for piece in body.split('_') {
        let chars: Vec<char> = piece.chars().collect();
        let mut start = 0;
        for k in 1..chars.len() {
            let boundary = (chars[k - 1].is_lowercase() && chars[k].is_uppercase())
                || (chars[k - 1].is_numeric() != chars[k].is_numeric());
            if boundary {
                words.push(chars[start..k].iter().collect());
                start = k;
            }
        }
        if start < chars.len() {
            words.push(chars[start..].iter().collect());
        }
    }
    words
}

/// Reduces every run of more than two identical consecutive characters to
/// exactly two.
pub fn normalize_elongation(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut prev: Option<char> = None;
    let mut run = 0usize;
    for c in text.chars() {
        if Some(c) == prev {
            run += 1;
        } else {
            prev = Some(c);
            run = 1;
        }
        if run <= 2 {
            out.push(c);
        }
    }
    out
}

/// Applies the mention/URL policy for the configured language mode.
///
/// EnglishLike: if the text contains two or more whole `@USER` tokens they
/// are all removed and a single `@USERS` is prepended; every `URL` token
/// becomes `http`. PersianLike: user ids (`@...`), bare numbers, and
/// hyperlinks are deleted.
pub fn apply_user_url_policy(text: &str, policy: &PreprocessPolicy) -> String {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    match policy.language_mode {
        LanguageMode::EnglishLike => {
            let mentions = tokens.iter().filter(|t| **t == USER_TOKEN).count();
            let collapse = mentions >= 2;
            let mut out: Vec<&str> = Vec::with_capacity(tokens.len() + 1);
            if collapse {
                out.push(COLLAPSED_USER_TOKEN);
            }
            for tok in tokens {
                if collapse && tok == USER_TOKEN {
                    continue;
                }
                out.push(if tok == "URL" { "http" } else { tok });
            }
            out.join(" ")
        }
        LanguageMode::PersianLike => {
            let kept: Vec<&str> = tokens
                .into_iter()
                .filter(|tok| !persian_deletes(tok))
                .collect();
            kept.join(" ")
        }
    }
}

/// Digits recognized by the bare-number deletion: ASCII, Arabic-Indic, and
/// Extended Arabic-Indic.
fn is_policy_digit(c: char) -> bool {
    c.is_ascii_digit() || matches!(c, '\u{0660}'..='\u{0669}' | '\u{06F0}'..='\u{06F9}')
}

// The deletion checks also run on the diacritic-stripped and
// elongation-normalized form of the token: char normalization and elongation
// run after this policy, so a kept token must not become deletable once they
// have been applied.
fn persian_deletes(token: &str) -> bool {
    let stripped: String = token
        .chars()
        .filter(|&c| !is_tatweel_or_diacritic(c))
        .collect();
    let canon = normalize_elongation(&stripped);
    stripped.starts_with('@')
        || (!stripped.is_empty() && stripped.chars().all(is_policy_digit))
        || is_hyperlink(token)
        || is_hyperlink(&stripped)
        || is_hyperlink(&canon)
}

fn is_hyperlink(token: &str) -> bool {
    token.starts_with("http") || token.starts_with("www.") || token.contains("://")
}

/// Replaces (EnglishLike) or removes (PersianLike) emoji.
///
/// EnglishLike resolves each mapped codepoint sequence, longest first, to its
/// space-delimited descriptor and drops unmapped emoji; an emoji map is
/// required as soon as the text actually contains an emoji. PersianLike
/// removes every emoji codepoint.
pub fn handle_emoji(text: &str, policy: &PreprocessPolicy) -> Result<String> {
    let chars: Vec<char> = text.chars().collect();
    if !chars.iter().any(|&c| is_emoji_char(c)) {
        return Ok(text.to_string());
    }
    let map = match policy.language_mode {
        LanguageMode::EnglishLike => {
            Some(policy.emoji_map.as_ref().ok_or(Error::MissingEmojiMap)?)
        }
        LanguageMode::PersianLike => None,
    };
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        if let Some(map) = map {
            let limit = map.max_len.min(chars.len() - i);
            let mut matched = 0;
            for len in (1..=limit).rev() {
                if let Some(descriptor) = map.entries.get(&chars[i..i + len]) {
                    out.push(' ');
                    out.push_str(descriptor);
                    out.push(' ');
                    matched = len;
                    break;
                }
            }
            if matched > 0 {
                i += matched;
                continue;
            }
        }
        if is_emoji_char(chars[i]) {
            out.push(' ');
        } else {
            out.push(chars[i]);
        }
        i += 1;
    }
    Ok(collapse_whitespace(&out))
}

fn is_tatweel_or_diacritic(c: char) -> bool {
    matches!(c,
        '\u{0640}'                  // tatweel
        | '\u{064B}'..='\u{065F}'   // harakat and related marks
        | '\u{0670}'                // superscript alef
        | '\u{0610}'..='\u{061A}'
        | '\u{06D6}'..='\u{06DC}'
        | '\u{06DF}'..='\u{06E4}'
        | '\u{06E7}' | '\u{06E8}'
        | '\u{06EA}'..='\u{06ED}')
}

/// Maps Arabic character variants to their Persian forms, converts
/// Arabic-Indic digits to ASCII, and strips tatweel and combining
/// diacritics. Idempotent.
pub fn normalize_persian_chars(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\u{064A}' => out.push('\u{06CC}'), // Arabic yeh -> Persian yeh
            '\u{0643}' => out.push('\u{06A9}'), // Arabic kaf -> Persian kaf
            '\u{0660}'..='\u{0669}' => {
                out.push(char::from(b'0' + (c as u32 - 0x0660) as u8));
            }
            '\u{06F0}'..='\u{06F9}' => {
                out.push(char::from(b'0' + (c as u32 - 0x06F0) as u8));
            }
            c if is_tatweel_or_diacritic(c) => {}
            c => out.push(c),
        }
    }
    out
}

fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Runs the full pipeline over one document.
///
/// Rejects documents whose text is empty once everything has been stripped.
pub fn preprocess_document(doc: &RawDocument, policy: &PreprocessPolicy) -> Result<RawDocument> {
    let text = handle_emoji(&doc.text, policy)?;
    let text = segment_hashtags(&text);
    let text = apply_user_url_policy(&text, policy);
    let text = match policy.language_mode {
        LanguageMode::PersianLike => normalize_persian_chars(&text),
        LanguageMode::EnglishLike => text,
    };
    let text = normalize_elongation(&text);
    let text = collapse_whitespace(&text);
    if text.is_empty() {
        return Err(Error::EmptyAfterPreprocess(doc.id.clone()));
    }
    Ok(RawDocument {
        id: doc.id.clone(),
        text,
        label: doc.label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Label;

    fn en_policy() -> PreprocessPolicy {
        let map = EmojiMap::parse("1F642\tslightly smiling face\n2600\tsun\n").unwrap();
        PreprocessPolicy::english(Some(map))
    }

    #[test]
    fn hashtag_camel_case() {
        assert_eq!(
            segment_hashtags("#BeckyLynch is beautiful"),
            "Becky Lynch is beautiful"
        );
    }

    #[test]
    fn hashtag_identity() {
        assert_eq!(segment_hashtags("no hashtags here"), "no hashtags here");
    }

    #[test]
    fn hashtag_underscores() {
        assert_eq!(segment_hashtags("#free_speech_now"), "free speech now");
    }

    #[test]
    fn hashtag_digit_boundaries() {
        assert_eq!(segment_hashtags("#win2024now"), "win 2024 now");
    }

    #[test]
    fn hashtag_all_caps_kept_whole() {
        assert_eq!(segment_hashtags("#HIAC"), "HIAC");
    }

    #[test]
    fn hashtag_output_has_no_hash() {
        for text in ["#a#b", "x#y", "# #", "##double", "tail#", "#_"] {
            assert!(!segment_hashtags(text).contains('#'), "input {text:?}");
        }
    }

    #[test]
    fn elongation_reduces_long_runs() {
        assert_eq!(normalize_elongation("loooool!!!"), "lool!!");
        assert_eq!(normalize_elongation("good"), "good");
        let run: String = std::iter::repeat('\u{0648}').take(8).collect();
        assert_eq!(normalize_elongation(&run), "\u{0648}\u{0648}");
    }

    #[test]
    fn user_url_policy_english_collapse() {
        let policy = en_policy();
        assert_eq!(
            apply_user_url_policy("@USER @USER stop it URL", &policy),
            "@USERS stop it http"
        );
        assert_eq!(apply_user_url_policy("@USER hello", &policy), "@USER hello");
    }

    #[test]
    fn user_url_policy_english_does_not_count_prefixes() {
        let policy = en_policy();
        // @USERS contains @USER as a prefix but is not a mention token.
        assert_eq!(
            apply_user_url_policy("@USERS @USER hi", &policy),
            "@USERS @USER hi"
        );
    }

    #[test]
    fn user_url_policy_persian_deletions() {
        let policy = PreprocessPolicy::persian();
        assert_eq!(
            apply_user_url_policy("تماس 0912 @ali http://x.y", &policy),
            "تماس"
        );
        // Digits embedded in words survive.
        assert_eq!(apply_user_url_policy("مدل x42 خوب", &policy), "مدل x42 خوب");
    }

    #[test]
    fn persian_deletes_arabic_indic_numbers() {
        let policy = PreprocessPolicy::persian();
        assert_eq!(apply_user_url_policy("سلام ٠٩١٢", &policy), "سلام");
        assert_eq!(apply_user_url_policy("سلام ۴۲", &policy), "سلام");
    }

    #[test]
    fn emoji_english_replacement() {
        let policy = en_policy();
        assert_eq!(
            handle_emoji("🙂", &policy).unwrap(),
            "slightly smiling face"
        );
        assert_eq!(handle_emoji("no emoji", &policy).unwrap(), "no emoji");
    }

    #[test]
    fn emoji_english_unmapped_removed() {
        let policy = en_policy();
        assert_eq!(handle_emoji("a \u{1F9FF} b", &policy).unwrap(), "a b");
    }

    #[test]
    fn emoji_english_requires_map() {
        let policy = PreprocessPolicy::english(None);
        assert_eq!(handle_emoji("plain text", &policy).unwrap(), "plain text");
        assert!(matches!(
            handle_emoji("🙂", &policy),
            Err(Error::MissingEmojiMap)
        ));
    }

    #[test]
    fn emoji_persian_removed() {
        let policy = PreprocessPolicy::persian();
        assert_eq!(handle_emoji("🙂 سلام", &policy).unwrap(), "سلام");
    }

    #[test]
    fn persian_char_normalization() {
        assert_eq!(normalize_persian_chars("\u{064A}"), "\u{06CC}");
        assert_eq!(normalize_persian_chars("\u{0643}"), "\u{06A9}");
        assert_eq!(normalize_persian_chars("٤٢"), "42");
        assert_eq!(normalize_persian_chars("۴۲"), "42");
        let already = "سلام خوبی";
        assert_eq!(normalize_persian_chars(already), already);
    }

    #[test]
    fn persian_char_normalization_idempotent() {
        let input = "كيـف حَالُك ٤٢";
        let once = normalize_persian_chars(input);
        assert_eq!(normalize_persian_chars(&once), once);
    }

    #[test]
    fn pipeline_composes_english() {
        let policy = en_policy();
        let doc = RawDocument::new(
            "t1",
            "#BeckyLynch @USER @USER soooo beautiful URL 🙂",
            Some(Label::Not),
        );
        let out = preprocess_document(&doc, &policy).unwrap();
        assert_eq!(
            out.text,
            "@USERS Becky Lynch soo beautiful http slightly smiling face"
        );
        assert_eq!(out.label, Some(Label::Not));
    }

    #[test]
    fn pipeline_composes_persian() {
        let policy = PreprocessPolicy::persian();
        let doc = RawDocument::new("t2", "🙂 هوا خیلی خووووووووبه", None);
        let out = preprocess_document(&doc, &policy).unwrap();
        assert_eq!(out.text, "هوا خیلی خووبه");
    }

    #[test]
    fn pipeline_rejects_empty() {
        let policy = PreprocessPolicy::persian();
        let doc = RawDocument::new("t3", "🙂 0912 @ali", None);
        assert!(matches!(
            preprocess_document(&doc, &policy),
            Err(Error::EmptyAfterPreprocess(id)) if id == "t3"
        ));
    }

    #[test]
    fn pipeline_idempotent_on_tricky_inputs() {
        let en = en_policy();
        let fa = PreprocessPolicy::persian();
        let inputs = [
            "#free_speech @USER @USER loooool URL 🙂 x",
            "mixed \u{064A}\u{06CC}\u{064A} runs ٠ـ٠ httttpx wwww.site",
            "@USERS kept @USER alone",
            "#a1b2C3 ### @x ٤٢",
            "h\u{0640}ttp://x \u{0640}@u w\u{0640}ww.z :\u{0640}:://y s",
        ];
        for input in inputs {
            for policy in [&en, &fa] {
                let doc = RawDocument::new("d", input, None);
                let Ok(once) = preprocess_document(&doc, policy) else {
                    continue;
                };
                let twice = preprocess_document(&once, policy).unwrap();
                assert_eq!(twice.text, once.text, "input {input:?}");
            }
        }
    }

    #[test]
    fn policy_validates_max_tokens() {
        assert!(PreprocessPolicy::new(LanguageMode::EnglishLike, 0, None).is_err());
    }

    #[test]
    fn emoji_map_rejects_garbage() {
        assert!(EmojiMap::parse("nottab").is_err());
        assert!(EmojiMap::parse("ZZZZ\tname").is_err());
        assert!(EmojiMap::parse("110000\tout of range").is_err());
    }
}
