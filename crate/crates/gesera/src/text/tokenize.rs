//! Lowercasing word tokenizer shared by indexing and query reformulation.

/// Splits text into lowercased word tokens.
///
/// A token is a maximal run of alphanumeric characters; hyphens and
/// apostrophes are kept when they sit between such characters, so
/// "state-of-the-art" and "don't" stay whole. Every other character
/// separates tokens. Leading and trailing hyphens or apostrophes are
/// stripped.
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in lowered.chars() {
        if ch.is_alphanumeric() || ((ch == '-' || ch == '\'') && !current.is_empty()) {
            current.push(ch);
        } else {
            flush(&mut current, &mut tokens);
        }
    }
    flush(&mut current, &mut tokens);
    tokens
}

fn flush(current: &mut String, tokens: &mut Vec<String>) {
    let trimmed = current.trim_matches(|c| c == '-' || c == '\'');
    if !trimmed.is_empty() {
        tokens.push(trimmed.to_string());
    }
    current.clear();
}
