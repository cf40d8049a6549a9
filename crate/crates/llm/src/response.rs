/// Returns the body of the first triple-backtick block, or the trimmed
/// text when there is none. A language tag after the opening fence is
/// dropped; an unterminated block runs to the end.
pub fn strip_fences(text: &str) -> &str {
    let Some(open) = text.find("```") else {
        return text.trim();
    };
    let after = &text[open + 3..];
    let body_start = after.find('\n').map_or(after.len(), |i| i + 1);
    let body = &after[body_start..];
    match body.find("```") {
        Some(close) => body[..close].trim(),
        None => body.trim(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fences() {
        assert_eq!(strip_fences("  plain  "), "plain");
        assert_eq!(strip_fences("Here:\n```systemverilog\nassert(a);\n```\nDone."), "assert(a);");
        assert_eq!(strip_fences("```\n[1]\n```"), "[1]");
        assert_eq!(strip_fences("```json\n{\"a\":1}"), "{\"a\":1}");
    }
}
