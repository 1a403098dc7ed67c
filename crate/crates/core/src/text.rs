//! Keyword normalization shared by the case base, interpreter and similarity.

/// Lowercase, trim and collapse internal whitespace. Multiword phrases stay
/// intact.
pub fn normalize_keyword(raw: &str) -> String {
    raw.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Whether `raw` is already in normalized form.
pub fn is_normalized(raw: &str) -> bool {
    normalize_keyword(raw) == raw
}

/// Parse a line-oriented word list: one entry per line, `#` starts a comment,
/// blank lines ignored. Entries are normalized.
pub fn parse_word_list(text: &str) -> Vec<String> {
    text.lines()
        .map(|line| match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        })
        .map(normalize_keyword)
        .filter(|s| !s.is_empty())
        .collect()
}
