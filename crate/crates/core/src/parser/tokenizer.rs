use super::Token;

const CLITICS: &[&str] = &["'s", "'m", "'re", "'ve", "'ll", "'d"];
const CLOSERS: &[char] = &['"', '\'', '”', '’', ')', ']'];
const OPENERS: &[char] = &['"', '\'', '“', '‘', '(', '['];

struct Piece {
    text: String,
    space_after: bool,
}

/// Splits text into sentences of untagged tokens.
///
/// Punctuation is split from words, contractions are split into clitics, and
/// sentences break after terminal punctuation followed by whitespace and a
/// capital letter or digit.
pub fn tokenize(text: &str) -> Vec<Vec<Token>> {
    let mut pieces = Vec::new();
    for chunk in text.split_whitespace() {
        let start = pieces.len();
        split_chunk(chunk, &mut pieces);
        if pieces.len() > start {
            pieces.last_mut().unwrap().space_after = true;
        }
    }

    let mut sentences = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    let mut i = 0;
    while i < pieces.len() {
        let position = current.len();
        current.push(Token::new(pieces[i].text.clone(), position));
        if is_terminal(&pieces[i].text) {
            // absorb closing quotes and brackets glued to the terminator
            let mut end = i;
            while !pieces[end].space_after
                && end + 1 < pieces.len()
                && is_closer(&pieces[end + 1].text)
            {
                end += 1;
                let position = current.len();
                current.push(Token::new(pieces[end].text.clone(), position));
            }
            if pieces[end].space_after && starts_sentence(&pieces[end + 1..]) {
                sentences.push(std::mem::take(&mut current));
            }
            i = end;
        }
        i += 1;
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    sentences
}

fn is_terminal(piece: &str) -> bool {
    !piece.is_empty() && piece.chars().all(|c| matches!(c, '.' | '!' | '?'))
}

fn is_closer(piece: &str) -> bool {
    piece.chars().all(|c| CLOSERS.contains(&c))
}

fn starts_sentence(rest: &[Piece]) -> bool {
    rest.iter()
        .find(|p| !p.text.chars().all(|c| OPENERS.contains(&c)))
        .and_then(|p| p.text.chars().next())
        .is_some_and(|c| c.is_uppercase() || c.is_ascii_digit())
}

fn split_chunk(chunk: &str, out: &mut Vec<Piece>) {
    let chars: Vec<char> = chunk.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if is_word_char(&chars, i) {
            let start = i;
            while i < chars.len() && is_word_char(&chars, i) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            split_clitics(&word, out);
        } else {
            let c = chars[i];
            let start = i;
            while i < chars.len() && chars[i] == c && !is_word_char(&chars, i) {
                i += 1;
            }
            out.push(Piece {
                text: chars[start..i].iter().collect(),
                space_after: false,
            });
        }
    }
}

fn is_word_char(chars: &[char], i: usize) -> bool {
    let c = chars[i];
    if c.is_alphanumeric() {
        return true;
    }
    let prev = i.checked_sub(1).map(|p| chars[p]);
    let next = chars.get(i + 1).copied();
    match c {
        '\'' | '’' | '-' => {
            prev.is_some_and(char::is_alphanumeric) && next.is_some_and(char::is_alphanumeric)
        }
        '.' | ',' => {
            prev.is_some_and(|p| p.is_ascii_digit()) && next.is_some_and(|n| n.is_ascii_digit())
        }
        _ => false,
    }
}

fn split_clitics(word: &str, out: &mut Vec<Piece>) {
    let mut push = |text: &str| {
        out.push(Piece {
            text: text.to_string(),
            space_after: false,
        })
    };
    let folded = word.to_lowercase().replace('’', "'");
    let n_chars = word.chars().count();
    let split_at = |suffix_chars: usize| -> (String, String) {
        let cut = n_chars - suffix_chars;
        (
            word.chars().take(cut).collect(),
            word.chars().skip(cut).collect(),
        )
    };
    if folded.len() > 3 && folded.ends_with("n't") {
        let (stem, clitic) = split_at(3);
        push(&stem);
        push(&clitic);
        return;
    }
    for clitic in CLITICS {
        let len = clitic.chars().count();
        if n_chars > len && folded.ends_with(clitic) {
            let (stem, tail) = split_at(len);
            push(&stem);
            push(&tail);
            return;
        }
    }
    push(word);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(text: &str) -> Vec<Vec<String>> {
        tokenize(text)
            .into_iter()
            .map(|s| s.into_iter().map(|t| t.surface).collect())
            .collect()
    }

    #[test]
    fn single_sentence() {
        assert_eq!(surfaces("Read the verse."), vec![vec!["Read", "the", "verse", "."]]);
    }

    #[test]
    fn empty_text() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("   \n ").is_empty());
    }

    #[test]
    fn two_sentences() {
        assert_eq!(
            surfaces("It is sad. We know."),
            vec![vec!["It", "is", "sad", "."], vec!["We", "know", "."]]
        );
    }

    #[test]
    fn no_break_before_lowercase() {
        assert_eq!(surfaces("e.g. this one.").len(), 1);
        assert_eq!(surfaces("Wait... what?").len(), 1);
    }

    #[test]
    fn ellipsis_and_quotes() {
        let s = surfaces("dirty work.... How typical. \"If you are not pleased,\" she said.");
        assert_eq!(s.len(), 3);
        assert_eq!(s[0], vec!["dirty", "work", "...."]);
        assert_eq!(s[2][0], "\"");
    }

    #[test]
    fn closing_quote_stays_with_sentence() {
        let s = surfaces("She said \"go.\" Then left.");
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].last().unwrap(), "\"");
    }

    #[test]
    fn contractions_and_numbers() {
        assert_eq!(
            surfaces("I don't want 4,000.5 years of John's rules, it's fine")[0],
            vec!["I", "do", "n't", "want", "4,000.5", "years", "of", "John", "'s", "rules", ",", "it", "'s", "fine"]
        );
        assert_eq!(surfaces("can't")[0], vec!["ca", "n't"]);
        assert_eq!(surfaces("I'm well-known")[0], vec!["I", "'m", "well-known"]);
    }

    #[test]
    fn positions_are_contiguous_and_normalized_is_folded() {
        for sentence in tokenize("The Theory WAS observed. Then It Stopped!") {
            for (i, t) in sentence.iter().enumerate() {
                assert_eq!(t.position, i);
                assert_eq!(t.normalized, t.surface.to_lowercase());
            }
        }
    }
}
