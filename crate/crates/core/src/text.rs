//! Text normalization shared by the graph index and the extraction pipeline.

/// Lowercases, trims and collapses internal whitespace runs to one space.
///
/// No stemming: distinct biomedical terms often differ only by suffix.
pub fn normalize(text: &str) -> String {
    collapse_whitespace(text).to_lowercase()
}

/// Trims and collapses internal whitespace runs, keeping the original case.
pub fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}
