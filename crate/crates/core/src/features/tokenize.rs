use unicode_segmentation::UnicodeSegmentation;

/// Lowercased word and punctuation tokens.
///
/// Words follow Unicode word boundaries, so internal apostrophes stay
/// attached ("i've"); typographic apostrophes are folded to ASCII first.
/// Every punctuation mark becomes its own token and whitespace is dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    let folded = text.replace(['\u{2019}', '\u{02bc}'], "'").to_lowercase();
    folded
        .split_word_bounds()
        // A combining mark after a space joins the space's segment.
        .flat_map(str::split_whitespace)
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn keeps_apostrophes_and_splits_punctuation() {
        assert_eq!(tokenize("I've seen, honestly."), ["i've", "seen", ",", "honestly", "."]);
        assert_eq!(tokenize("I\u{2019}ve"), ["i've"]);
        assert_eq!(tokenize("wait..."), ["wait", ".", ".", "."]);
    }

    #[test]
    fn trivial_cases() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  \n\t ").is_empty());
        assert_eq!(tokenize("A a A"), ["a", "a", "a"]);
        assert_eq!(tokenize("x \u{0301}y"), ["x", "\u{0301}", "y"]);
    }

    proptest! {
        #[test]
        fn idempotent_under_rejoin(text in "[a-zA-Z0-9 ,.;:!?'\"()\\-]{0,80}") {
            let once = tokenize(&text);
            let twice = tokenize(&once.join(" "));
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn idempotent_on_arbitrary_text(text in "\\PC{0,60}") {
            let once = tokenize(&text);
            prop_assert_eq!(tokenize(&once.join(" ")), once);
        }
    }
}
