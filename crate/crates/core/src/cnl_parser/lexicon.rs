//! Tokens and the trailing time/place adjuncts shared by facts and questions.

use crate::fact_store::Place;
use crate::time::{Qualifier, Timestamp, MONTHS};

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub text: String,
    pub lower: String,
    /// Preceded by a/an/the (the article itself is dropped).
    pub after_article: bool,
}

impl Token {
    pub fn is_capitalized(&self) -> bool {
        self.text.chars().next().is_some_and(char::is_uppercase)
    }
}

const ARTICLES: [&str; 3] = ["a", "an", "the"];
pub(crate) const PRONOUNS: [&str; 6] = ["he", "she", "it", "they", "him", "her"];

/// Split a sentence into tokens: drops parenthesized groups, sentence
/// punctuation and articles.
pub(crate) fn tokenize(text: &str) -> Vec<Token> {
    let mut cleaned = String::with_capacity(text.len());
    let mut depth = 0usize;
    for ch in text.chars() {
        match ch {
            '(' => {
                depth += 1;
                cleaned.push(' ');
            }
            ')' => {
                depth = depth.saturating_sub(1);
                cleaned.push(' ');
            }
            _ if depth > 0 => {}
            '?' | '!' | ',' | ';' => cleaned.push(' '),
            _ => cleaned.push(ch),
        }
    }
    let mut out = Vec::new();
    let mut article = false;
    for raw in cleaned.split_whitespace() {
        let word = raw.trim_end_matches('.');
        if word.is_empty() {
            continue;
        }
        let lower = word.to_lowercase();
        if ARTICLES.contains(&lower.as_str()) {
            article = true;
            continue;
        }
        out.push(Token { text: word.to_string(), lower, after_article: article });
        article = false;
    }
    out
}

/// Split a line into sentences at full stops followed by whitespace.
pub(crate) fn split_sentences(line: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'.' && bytes.get(i + 1).is_none_or(|n| n.is_ascii_whitespace()) {
            let s = line[start..=i].trim();
            if !s.is_empty() {
                out.push(s);
            }
            start = i + 1;
        }
    }
    let rest = line[start..].trim();
    if !rest.is_empty() {
        out.push(rest);
    }
    out
}

const CARDINALS: [&str; 20] = [
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve", "thirteen",
    "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty",
];
const ORDINALS: [&str; 20] = [
    "first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth", "eleventh",
    "twelfth", "thirteenth", "fourteenth", "fifteenth", "sixteenth", "seventeenth", "eighteenth", "nineteenth",
    "twentieth",
];

fn unit_word(w: &str) -> Option<u8> {
    let pos = CARDINALS.iter().position(|c| *c == w).or_else(|| ORDINALS.iter().position(|c| *c == w))?;
    Some(pos as u8 + 1)
}

fn digits(w: &str) -> Option<u8> {
    let w = ["st", "nd", "rd", "th"].iter().find_map(|s| w.strip_suffix(s)).unwrap_or(w);
    if w.is_empty() || !w.bytes().all(|b| b.is_ascii_digit()) || w.len() > 2 {
        return None;
    }
    w.parse().ok()
}

/// Day of month in words or digits; returns the value and tokens consumed.
fn day_number(tokens: &[Token]) -> Option<(u8, usize)> {
    let first = &tokens.first()?.lower;
    if let Some(n) = digits(first) {
        return Some((n, 1));
    }
    let tens = match first.split_once('-').map(|(a, _)| a).unwrap_or(first) {
        "twenty" => Some(20),
        "thirty" => Some(30),
        _ => None,
    };
    if let Some(tens) = tens {
        if let Some((_, unit)) = first.split_once('-') {
            return Some((tens + unit_word(unit)?, 1));
        }
        if let Some(unit) = tokens.get(1).and_then(|t| unit_word(&t.lower)).filter(|u| *u < 10) {
            return Some((tens + unit, 2));
        }
        return Some((tens, 1));
    }
    match first.as_str() {
        "thirtieth" => Some((30, 1)),
        _ => unit_word(first).map(|n| (n, 1)),
    }
}

fn month_number(w: &str) -> Option<u8> {
    MONTHS.iter().position(|m| m.eq_ignore_ascii_case(w)).map(|p| p as u8 + 1)
}

/// Parse "H o'clock", "H:MM" or "H:MM o'clock".
fn clock(tokens: &[Token]) -> Option<((u8, u8), usize)> {
    let first = &tokens.first()?.lower;
    let (h, m) = match first.split_once(':') {
        Some((h, m)) => (h.parse::<u8>().ok()?, m.parse::<u8>().ok()?),
        None => (first.parse::<u8>().ok()?, 0),
    };
    let has_oclock = tokens.get(1).is_some_and(|t| t.lower == "o'clock");
    if !has_oclock && !first.contains(':') {
        return None;
    }
    Some(((h, m), if has_oclock { 2 } else { 1 }))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Adjuncts {
    pub hour: Option<(u8, u8, Qualifier)>,
    pub date: Option<(Option<u8>, u8)>,
    pub place: Option<Place>,
}

impl Adjuncts {
    pub fn timestamp(&self) -> Result<Option<Timestamp>, ParseError> {
        if self.hour.is_none() && self.date.is_none() {
            return Ok(None);
        }
        let (day, month) = match self.date {
            Some((d, m)) => (d, Some(m)),
            None => (None, None),
        };
        let (hour, minute, qualifier) = match self.hour {
            Some((h, m, q)) => (Some(h), m, q),
            None => (None, 0, Qualifier::None),
        };
        Timestamp::new(day, month, hour, minute, qualifier).map(Some).map_err(ParseError::Time)
    }
}

enum Adjunct {
    Hour(u8, u8, Qualifier),
    Date(Option<u8>, u8),
    Place(Place),
}

fn one_adjunct(tokens: &[Token]) -> Option<(Adjunct, usize)> {
    let head = tokens.first()?.lower.as_str();
    let rest = &tokens[1..];
    match head {
        "at" | "after" | "before" => {
            let q = match head {
                "at" => Qualifier::At,
                "after" => Qualifier::After,
                _ => Qualifier::Before,
            };
            let ((h, m), n) = clock(rest)?;
            Some((Adjunct::Hour(h, m, q), n + 1))
        }
        "on" => {
            let (day, n) = day_number(rest)?;
            if rest.get(n).map(|t| t.lower.as_str()) != Some("of") {
                return None;
            }
            let month = month_number(&rest.get(n + 1)?.lower)?;
            Some((Adjunct::Date(Some(day), month), n + 3))
        }
        "in" => {
            if let Some(month) = rest.first().and_then(|t| month_number(&t.lower)) {
                if rest.len() == 1 || one_adjunct(&rest[1..]).is_some() {
                    return Some((Adjunct::Date(None, month), 2));
                }
            }
            let street_end = rest.iter().position(|t| t.lower == "street")?;
            let (number, name) = match rest.first().and_then(|t| t.lower.parse::<u32>().ok()) {
                Some(n) if n > 0 => (Some(n), &rest[1..street_end]),
                _ => (None, &rest[..street_end]),
            };
            if name.is_empty() {
                return None;
            }
            let street: Vec<&str> = name.iter().map(|t| t.lower.as_str()).collect();
            let place = Place::new(number, &street.join(" ")).ok()?;
            Some((Adjunct::Place(place), street_end + 2))
        }
        _ => None,
    }
}

/// Parse `tokens` entirely as adjuncts; `None` if anything is left over or
/// an adjunct kind repeats.
pub(crate) fn adjuncts(tokens: &[Token]) -> Option<Adjuncts> {
    let mut out = Adjuncts::default();
    let mut i = 0;
    while i < tokens.len() {
        let (adj, n) = one_adjunct(&tokens[i..])?;
        match adj {
            Adjunct::Hour(h, m, q) if out.hour.is_none() => out.hour = Some((h, m, q)),
            Adjunct::Date(d, m) if out.date.is_none() => out.date = Some((d, m)),
            Adjunct::Place(p) if out.place.is_none() => out.place = Some(p),
            _ => return None,
        }
        i += n;
    }
    Some(out)
}

/// Earliest split `i` such that `tokens[i..]` is all adjuncts.
pub(crate) fn split_adjuncts(tokens: &[Token]) -> (usize, Adjuncts) {
    for i in 0..=tokens.len() {
        if let Some(a) = adjuncts(&tokens[i..]) {
            return (i, a);
        }
    }
    unreachable!("empty suffix always parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer_drops_articles_and_parentheses() {
        let t = tokenize("Who plans (intends, wants) to rob the office?");
        let words: Vec<_> = t.iter().map(|t| t.lower.as_str()).collect();
        assert_eq!(words, ["who", "plans", "to", "rob", "office"]);
        assert!(t[4].after_article);
        let t = tokenize("Which(what) operation");
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn day_words() {
        let t = tokenize("seven twenty-one twenty one 21st thirtieth");
        assert_eq!(day_number(&t[0..]), Some((7, 1)));
        assert_eq!(day_number(&t[1..]), Some((21, 1)));
        assert_eq!(day_number(&t[2..]), Some((21, 2)));
        assert_eq!(day_number(&t[4..]), Some((21, 1)));
        assert_eq!(day_number(&t[5..]), Some((30, 1)));
    }

    #[test]
    fn adjunct_tail() {
        let t = tokenize("a girl at 20 o'clock on the seven of November in 9 Street1 Street");
        let (i, a) = split_adjuncts(&t);
        assert_eq!(i, 1);
        assert_eq!(a.hour, Some((20, 0, Qualifier::At)));
        assert_eq!(a.date, Some((Some(7), 11)));
        assert_eq!(a.place.unwrap().to_string(), "9 Street1 Street");
    }

    #[test]
    fn sentence_split() {
        assert_eq!(
            split_sentences("Petrov met a friend in 9 Street1 Street.   He bought a cheese after 19 o'clock."),
            vec!["Petrov met a friend in 9 Street1 Street.", "He bought a cheese after 19 o'clock."]
        );
    }

    #[test]
    fn on_ship_is_not_an_adjunct() {
        let t = tokenize("on the ship");
        assert_eq!(split_adjuncts(&t).0, 2);
    }
}
