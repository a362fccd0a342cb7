//! Normalization and tokenization of raw social-media text.
//!
//! Every stage that looks at message content (heuristic matching, mention
//! detection, featurization, lexicon scoring) goes through [`normalize`] so
//! the whole pipeline agrees on one token sequence per message.
//!
//! The pipeline, applied in this order:
//!
//! 1. replace each URL (`http://` / `https://` scheme up to whitespace) with
//!    the `<url>` placeholder
//! 2. replace each `@`-handle with the `<user>` placeholder
//! 3. strip the leading `#` from hashtags, keeping the word
//! 4. lowercase
//! 5. collapse any run of 3 or more identical characters to exactly 3
//! 6. split on whitespace
//! 7. detach punctuation into single-character punct tokens, preserving a
//!    fixed emoticon list

use std::fmt;

/// Surface of the URL placeholder token.
pub const URL_PLACEHOLDER: &str = "<url>";
/// Surface of the user-handle placeholder token.
pub const USER_PLACEHOLDER: &str = "<user>";

/// Emoticons kept as single tokens, in their lowercased form (`:D` is stored
/// as `:d` because lowercasing runs before token splitting).
const EMOTICONS: [&str; 6] = [":)", ":(", ":d", ";)", ":/", "<3"];

/// What a token is, beyond its surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    /// A regular word (includes numbers).
    Word,
    /// The `<url>` placeholder.
    UrlPlaceholder,
    /// The `<user>` placeholder.
    UserPlaceholder,
    /// A word that was written as a hashtag (the `#` sigil is stripped).
    HashtagWord,
    /// One of the preserved emoticons.
    Emoticon,
    /// A single punctuation character.
    Punct,
}

/// One normalized token: a nonempty, lowercase, whitespace-free surface plus
/// its kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    surface: String,
    kind: TokenKind,
}

impl Token {
    fn new(surface: String, kind: TokenKind) -> Self {
        debug_assert!(!surface.is_empty());
        Token { surface, kind }
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn kind(&self) -> TokenKind {
        self.kind
    }

    pub fn is_word_like(&self) -> bool {
        matches!(
            self.kind,
            TokenKind::Word | TokenKind::HashtagWord | TokenKind::Emoticon
        )
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surface)
    }
}

/// Normalizes a raw message into its canonical token sequence.
///
/// Total function: any input, including the empty string, yields a (possibly
/// empty) token list. Deterministic.
pub fn normalize(raw: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    for chunk in raw.split_whitespace() {
        normalize_chunk(chunk, &mut tokens);
    }
    tokens
}

/// Convenience wrapper returning only surfaces.
pub fn normalize_surfaces(raw: &str) -> Vec<String> {
    normalize(raw)
        .into_iter()
        .map(|t| t.surface)
        .collect()
}

/// Joins tokens with single spaces, restoring the `#` sigil on hashtag
/// words so every token re-enters with its kind intact.
///
/// `normalize(canonical_join(normalize(s))) == normalize(s)` for every `s`,
/// kinds included.
pub fn canonical_join(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        if t.kind == TokenKind::HashtagWord {
            out.push('#');
        }
        out.push_str(&t.surface);
    }
    out
}

fn normalize_chunk(chunk: &str, out: &mut Vec<Token>) {
    // Placeholders survive re-normalization as themselves.
    let lowered = chunk.to_lowercase();
    if lowered == URL_PLACEHOLDER {
        out.push(Token::new(URL_PLACEHOLDER.to_string(), TokenKind::UrlPlaceholder));
        return;
    }
    if lowered == USER_PLACEHOLDER {
        out.push(Token::new(USER_PLACEHOLDER.to_string(), TokenKind::UserPlaceholder));
        return;
    }

    // Step 1: a URL swallows everything from its scheme to the end of the
    // whitespace-delimited chunk.
    if let Some(pos) = find_url_scheme(chunk) {
        if pos > 0 {
            normalize_piece(&chunk[..pos], out);
        }
        out.push(Token::new(URL_PLACEHOLDER.to_string(), TokenKind::UrlPlaceholder));
        return;
    }

    normalize_piece(chunk, out);
}

/// Steps 2-3 on a chunk (or the pre-URL prefix of one), then the
/// lowercase/collapse/split tail of the pipeline on each resulting piece.
fn normalize_piece(piece: &str, out: &mut Vec<Token>) {
    let bytes = piece.as_bytes();
    let mut plain_start = 0;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'@' && i + 1 < bytes.len() && is_handle_byte(bytes[i + 1]) {
            if plain_start < i {
                emit_word_and_punct(&piece[plain_start..i], plain_start == 0, out);
            }
            let mut j = i + 1;
            while j < bytes.len() && is_handle_byte(bytes[j]) {
                j += 1;
            }
            out.push(Token::new(USER_PLACEHOLDER.to_string(), TokenKind::UserPlaceholder));
            i = j;
            plain_start = i;
        } else {
            i += 1;
        }
    }
    if plain_start < bytes.len() {
        emit_word_and_punct(&piece[plain_start..], plain_start == 0, out);
    }
}

/// Steps 3-7 on one handle-free piece. `may_be_hashtag` holds only when the
/// piece starts the whitespace-delimited chunk, so `#` is a sigil there and
/// plain punctuation anywhere else.
fn emit_word_and_punct(piece: &str, may_be_hashtag: bool, out: &mut Vec<Token>) {
    let mut rest = piece;
    let mut hashtag = false;
    if may_be_hashtag {
        let mut chars = piece.chars();
        if chars.next() == Some('#') {
            if let Some(c) = chars.next() {
                if c.is_alphanumeric() {
                    hashtag = true;
                    rest = &piece[1..];
                }
            }
        }
    }

    let collapsed = collapse_runs(&rest.to_lowercase());
    split_tokens(&collapsed, hashtag, out);
}

/// Collapses every run of 3 or more identical characters to exactly 3.
fn collapse_runs(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut prev: Option<char> = None;
    let mut run = 0usize;
    for c in s.chars() {
        if Some(c) == prev {
            run += 1;
        } else {
            prev = Some(c);
            run = 1;
        }
        if run <= 3 {
            out.push(c);
        }
    }
    out
}

/// Splits a lowercased, run-collapsed piece into word, emoticon and punct
/// tokens. Punct runs are dropped to their first character.
fn split_tokens(piece: &str, hashtag: bool, out: &mut Vec<Token>) {
    let chars: Vec<char> = piece.chars().collect();
    let word_kind = if hashtag {
        TokenKind::HashtagWord
    } else {
        TokenKind::Word
    };
    let mut i = 0;
    while i < chars.len() {
        if let Some(emo) = emoticon_at(&chars, i) {
            out.push(Token::new(emo.to_string(), TokenKind::Emoticon));
            i += emo.chars().count();
        } else if chars[i].is_alphanumeric() {
            let start = i;
            while i < chars.len() && chars[i].is_alphanumeric() {
                i += 1;
            }
            let surface: String = chars[start..i].iter().collect();
            out.push(Token::new(surface, word_kind));
        } else {
            let first = chars[i];
            i += 1;
            while i < chars.len()
                && !chars[i].is_alphanumeric()
                && emoticon_at(&chars, i).is_none()
            {
                i += 1;
            }
            out.push(Token::new(first.to_string(), TokenKind::Punct));
        }
    }
}

/// All emoticons start with a non-alphanumeric character, so word runs can
/// never hide one.
fn emoticon_at(chars: &[char], i: usize) -> Option<&'static str> {
    for emo in EMOTICONS {
        let pat: Vec<char> = emo.chars().collect();
        if chars[i..].starts_with(&pat) {
            return Some(emo);
        }
    }
    None
}

/// Earliest case-insensitive occurrence of `http://` or `https://`, as a byte
/// offset into `chunk`.
fn find_url_scheme(chunk: &str) -> Option<usize> {
    let lower = chunk.to_ascii_lowercase();
    let http = lower.find("http://");
    let https = lower.find("https://");
    match (http, https) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    }
}

fn is_handle_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surfaces(raw: &str) -> Vec<String> {
        normalize_surfaces(raw)
    }

    #[test]
    fn lowercases_and_splits() {
        assert_eq!(surfaces("I LOVE Uber"), ["i", "love", "uber"]);
    }

    #[test]
    fn replaces_urls() {
        assert_eq!(surfaces("check http://t.co/abc"), ["check", "<url>"]);
        assert_eq!(surfaces("see https://example.com/x?q=1"), ["see", "<url>"]);
        // Scheme mid-chunk swallows the rest of the chunk.
        assert_eq!(surfaces("(http://a.com)"), ["(", "<url>"]);
        assert_eq!(surfaces("HTTP://SHOUTY.COM"), ["<url>"]);
    }

    #[test]
    fn replaces_handles_and_collapses_elongation() {
        assert_eq!(surfaces("@john sooooo good"), ["<user>", "sooo", "good"]);
        assert_eq!(surfaces("@a@b"), ["<user>", "<user>"]);
        assert_eq!(surfaces("mail me @ noon"), ["mail", "me", "@", "noon"]);
    }

    #[test]
    fn strips_hashtags() {
        let toks = normalize("#Uber протест #greve2016");
        assert_eq!(toks[0].surface(), "uber");
        assert_eq!(toks[0].kind(), TokenKind::HashtagWord);
        assert_eq!(toks[2].surface(), "greve2016");
        assert_eq!(toks[2].kind(), TokenKind::HashtagWord);
        // bare '#' stays punctuation
        assert_eq!(surfaces("# yes ##no"), ["#", "yes", "#", "no"]);
    }

    #[test]
    fn detaches_punct_and_keeps_emoticons() {
        assert_eq!(surfaces("GOOD!!! :)"), ["good", "!", ":)"]);
        assert_eq!(surfaces("bad :( day"), ["bad", ":(", "day"]);
        assert_eq!(surfaces("love<3it"), ["love", "<3", "it"]);
        assert_eq!(surfaces("hm :/ ok"), ["hm", ":/", "ok"]);
        let toks = normalize(":D");
        assert_eq!(toks[0].surface(), ":d");
        assert_eq!(toks[0].kind(), TokenKind::Emoticon);
    }

    #[test]
    fn punct_runs_drop_to_one_character() {
        assert_eq!(surfaces("what?!?!"), ["what", "?"]);
        assert_eq!(surfaces("!!:)"), ["!", ":)"]);
        assert_eq!(surfaces("a--b"), ["a", "-", "b"]);
    }

    #[test]
    fn placeholders_survive_renormalization() {
        assert_eq!(surfaces("<url> <user>"), ["<url>", "<user>"]);
        let toks = normalize("<url> <user>");
        assert_eq!(toks[0].kind(), TokenKind::UrlPlaceholder);
        assert_eq!(toks[1].kind(), TokenKind::UserPlaceholder);
        // not placeholders when embedded in other text
        assert_eq!(surfaces("x<url>"), ["x", "<", "url", ">"]);
    }

    #[test]
    fn keeps_accents() {
        assert_eq!(surfaces("Ótimo serviço"), ["ótimo", "serviço"]);
    }

    #[test]
    fn empty_and_whitespace_inputs() {
        assert!(normalize("").is_empty());
        assert!(normalize(" \t\n ").is_empty());
        assert_eq!(canonical_join(&[]), "");
    }

    #[test]
    fn canonical_join_uses_single_spaces() {
        let toks = normalize("I love Uber");
        assert_eq!(canonical_join(&toks), "i love uber");
    }

    #[test]
    fn canonical_join_restores_hashtag_sigils() {
        let toks = normalize("greve #UberChega já!");
        assert_eq!(canonical_join(&toks), "greve #uberchega já !");
        assert_eq!(normalize(&canonical_join(&toks)), toks);
    }

    #[test]
    fn idempotence_spot_check() {
        let t = "GOOD!!! :)";
        let once = normalize(t);
        let twice = normalize(&canonical_join(&once));
        assert_eq!(once, twice);
    }

    /// Strings biased toward the constructs the pipeline rewrites.
    fn message_strategy() -> impl Strategy<Value = String> {
        let piece = prop_oneof![
            "[a-zA-Z]{1,8}",
            "[A-ZÀ-ÿ]{1,6}",
            Just("http://t.co/Ab1".to_string()),
            Just("HTTPS://x.y/Z".to_string()),
            "@[a-zA-Z_0-9]{1,6}",
            "#[a-zA-Z0-9]{1,6}",
            "[a-z]{1,3}[!?.,:;()<>3/@#-]{1,4}",
            "[!?.]{1,5}",
            Just(":)".to_string()),
            Just(":D".to_string()),
            Just("<3".to_string()),
            Just("<url>".to_string()),
            Just("soooooo".to_string()),
            "[a-zA-Z0-9!?.:;@#<>/()-]{1,5}",
        ];
        proptest::collection::vec(piece, 0..8).prop_map(|v| v.join(" "))
    }

    proptest! {
        #[test]
        fn idempotent_over_join(raw in message_strategy()) {
            let once = normalize(&raw);
            let twice = normalize(&canonical_join(&once));
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn tokens_are_lowercase_and_bounded(raw in message_strategy()) {
            for tok in normalize(&raw) {
                prop_assert!(!tok.surface().is_empty());
                prop_assert!(!tok.surface().chars().any(char::is_whitespace));
                prop_assert!(!tok.surface().chars().any(char::is_uppercase));
                let chars: Vec<char> = tok.surface().chars().collect();
                let max_run = chars
                    .windows(4)
                    .any(|w| w.iter().all(|&c| c == w[0]));
                prop_assert!(!max_run, "4-run in {:?}", tok.surface());
            }
        }

        #[test]
        fn idempotent_over_join_arbitrary(raw in "\\PC{0,60}") {
            let once = normalize(&raw);
            let twice = normalize(&canonical_join(&once));
            prop_assert_eq!(once, twice);
        }
    }
}
