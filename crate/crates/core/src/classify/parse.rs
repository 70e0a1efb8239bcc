//! Text format for automorphisms and words.
//!
//! ```text
//! e1: a -> a b ; b -> a ; c -> c
//! ```
//!
//! Clauses are separated by `;` or newlines, `#` starts a comment, and a
//! trailing `'` marks an inverse letter. The leading `name:` is optional.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::{Basis, CyclicWord, FreeAutomorphism, Letter, ReducedWord};

pub const INVERSION_EFFORT: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomorphismTextError {
    #[error("syntax error at {0}")]
    Syntax(#[from] ParseError),
    #[error("{0}")]
    NotAnAutomorphism(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedAutomorphism {
    pub name: Option<String>,
    pub phi: FreeAutomorphism,
}

/// A token with its 1-based position.
#[derive(Clone, Debug)]
struct Tok<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Tok<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }
}

/// Splits into clauses, each a list of whitespace-separated tokens; `->`
/// and `:` are always tokens of their own.
fn clauses<'a>(text: &'a str) -> Vec<Vec<Tok<'a>>> {
    let mut out = vec![Vec::new()];
    for (li, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut start: Option<usize> = None;
        let push = |out: &mut Vec<Vec<Tok<'a>>>, s: usize, e: usize| {
            if s < e {
                out.last_mut().unwrap().push(Tok {
                    text: &line[s..e],
                    line: li + 1,
                    column: s + 1,
                });
            }
        };
        let bytes = line.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let special = if c == b';' || c == b':' {
                1
            } else if c == b'-' && bytes.get(i + 1) == Some(&b'>') {
                2
            } else {
                0
            };
            if c.is_ascii_whitespace() || special > 0 {
                if let Some(s) = start.take() {
                    push(&mut out, s, i);
                }
                if c == b';' {
                    out.push(Vec::new());
                } else if special > 0 {
                    push(&mut out, i, i + special);
                }
                i += special.max(1);
                continue;
            }
            start.get_or_insert(i);
            i += 1;
        }
        if let Some(s) = start {
            push(&mut out, s, bytes.len());
        }
        out.push(Vec::new());
    }
    out.retain(|c| !c.is_empty());
    out
}

fn generator_index(name: &str) -> Option<usize> {
    let b = name.as_bytes();
    if b.len() == 1 && b[0].is_ascii_lowercase() {
        return Some((b[0] - b'a') as usize + 1);
    }
    name.strip_prefix('x')
        .and_then(|n| n.parse::<usize>().ok())
        .filter(|&n| n > 26)
}

fn letter_of(tok: &Tok<'_>, rank: Option<usize>) -> Result<Letter, ParseError> {
    let (name, inv) = match tok.text.strip_suffix('\'') {
        Some(n) => (n, true),
        None => (tok.text, false),
    };
    let g = generator_index(name)
        .ok_or_else(|| tok.error(format!("`{}` is not a generator name", tok.text)))?;
    if let Some(r) = rank {
        if g > r {
            return Err(tok.error(format!("generator `{name}` exceeds rank {r}")));
        }
    }
    Ok(Letter::new(g, inv))
}

fn word_of(toks: &[Tok<'_>], rank: Option<usize>) -> Result<ReducedWord, ParseError> {
    if toks.len() == 1 && toks[0].text == "1" {
        return Ok(ReducedWord::identity());
    }
    let letters = toks
        .iter()
        .map(|t| letter_of(t, rank))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ReducedWord::from_letters(letters))
}

/// Parses a word such as `a b' c`; `1` is the identity.
pub fn parse_word(text: &str, rank: usize) -> Result<ReducedWord, ParseError> {
    let cs = clauses(text);
    match cs.as_slice() {
        [] => Err(ParseError {
            line: 1,
            column: 1,
            message: "empty word".into(),
        }),
        [one] => word_of(one, Some(rank)),
        [_, second, ..] => Err(second[0].error("unexpected clause separator")),
    }
}

pub fn parse_class(text: &str, rank: usize) -> Result<CyclicWord, ParseError> {
    parse_word(text, rank).map(|w| CyclicWord::from_word(&w))
}

/// Parses and inverts; the rank is the largest generator mentioned.
pub fn parse_automorphism(text: &str) -> Result<ParsedAutomorphism, AutomorphismTextError> {
    parse_automorphism_in(text, None)
}

/// As [`parse_automorphism`], with the rank fixed in advance.
pub fn parse_automorphism_in(
    text: &str,
    rank: Option<usize>,
) -> Result<ParsedAutomorphism, AutomorphismTextError> {
    let mut cs = clauses(text);
    let mut name = None;
    if let Some(first) = cs.first_mut() {
        if first.len() >= 2 && first[1].text == ":" {
            name = Some(first[0].text.to_string());
            first.drain(..2);
        }
    }
    cs.retain(|c| !c.is_empty());
    if cs.is_empty() {
        return Err(ParseError {
            line: 1,
            column: 1,
            message: "no generator images".into(),
        }
        .into());
    }
    let mut entries: Vec<(usize, ReducedWord)> = Vec::new();
    let mut last = cs[0][0].clone();
    for c in &cs {
        last = c.last().unwrap().clone();
        if c.len() < 3 || c[1].text != "->" {
            let at = c.get(1).unwrap_or(&c[0]);
            return Err(at.error("expected `generator -> word`").into());
        }
        let lhs = letter_of(&c[0], rank)?;
        if lhs.is_inverse() {
            return Err(c[0]
                .error("left side must be a generator, not an inverse")
                .into());
        }
        if entries.iter().any(|(g, _)| *g == lhs.generator()) {
            return Err(c[0]
                .error(format!("second image for `{}`", c[0].text))
                .into());
        }
        if let Some(t) = c[2..].iter().find(|t| t.text == "->" || t.text == ":") {
            return Err(t.error(format!("unexpected `{}`", t.text)).into());
        }
        entries.push((lhs.generator(), word_of(&c[2..], rank)?));
    }
    let mentioned = entries
        .iter()
        .map(|(g, w)| (*g).max(w.max_generator()))
        .max()
        .unwrap_or(0)
        .max(entries.len());
    let n = rank.unwrap_or(mentioned);
    let mut images = vec![None; n];
    for (g, w) in entries {
        images[g - 1] = Some(w);
    }
    if let Some(g) = images.iter().position(|w| w.is_none()) {
        let err = ParseError {
            line: last.line,
            column: last.column + last.text.len(),
            message: format!(
                "missing image for generator `{}`",
                Basis::default_name(g + 1)
            ),
        };
        return Err(err.into());
    }
    let images: Vec<ReducedWord> = images.into_iter().map(Option::unwrap).collect();
    let phi = FreeAutomorphism::new(images)
        .and_then(|p| p.invert(INVERSION_EFFORT))
        .map_err(|e| AutomorphismTextError::NotAnAutomorphism(e.to_string()))?;
    Ok(ParsedAutomorphism { name, phi })
}

/// Inverse of the parser on its own output.
pub fn format_automorphism(phi: &FreeAutomorphism) -> String {
    let b = Basis::standard(phi.rank());
    (1..=phi.rank())
        .map(|g| format!("{} -> {}", Basis::default_name(g), b.format(phi.image(g))))
        .collect::<Vec<_>>()
        .join(" ; ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci() {
        let p = parse_automorphism("a -> a b ; b -> a").unwrap();
        assert_eq!(
            p.phi,
            FreeAutomorphism::from_signed(&[&[1, 2], &[1]])
                .unwrap()
                .invert(100)
                .unwrap()
        );
        assert_eq!(p.name, None);
    }

    #[test]
    fn named_multiline_with_comments() {
        let p = parse_automorphism("e1:\n a -> a b   # top\n b -> a\n c -> c\n").unwrap();
        assert_eq!(p.name.as_deref(), Some("e1"));
        assert_eq!(format_automorphism(&p.phi), "a -> a b ; b -> a ; c -> c");
    }

    #[test]
    fn missing_generator_in_rank_two() {
        let e = parse_automorphism_in("a -> a a", Some(2)).unwrap_err();
        match e {
            AutomorphismTextError::Syntax(p) => {
                assert!(p.message.contains("missing image for generator `b`"), "{p}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rank_one_collapse_is_not_an_automorphism() {
        assert!(matches!(
            parse_automorphism("a -> a a"),
            Err(AutomorphismTextError::NotAnAutomorphism(_))
        ));
    }

    #[test]
    fn plastic_inverse_is_verified() {
        let p = parse_automorphism("a -> b ; b -> c ; c -> a b").unwrap();
        let inv = p.phi.inverse().unwrap();
        assert_eq!(format_automorphism(&inv), "a -> c a' ; b -> a ; c -> b");
        // oracle: both composites fix the basis letter by letter
        for g in 1..=3 {
            let x = ReducedWord::letter(Letter::new(g, false));
            assert_eq!(p.phi.apply(&inv.apply(&x)), x);
            assert_eq!(inv.apply(&p.phi.apply(&x)), x);
        }
    }

    #[test]
    fn positions_are_reported() {
        let e = parse_automorphism("a -> a b ; b => a").unwrap_err();
        let AutomorphismTextError::Syntax(p) = e else {
            panic!()
        };
        assert_eq!((p.line, p.column), (1, 14));
        let e = parse_automorphism("a -> a Q").unwrap_err();
        let AutomorphismTextError::Syntax(p) = e else {
            panic!()
        };
        assert_eq!((p.line, p.column), (1, 8));
    }

    #[test]
    fn words_roundtrip() {
        let w = parse_word("a b' c c", 3).unwrap();
        assert_eq!(w, ReducedWord::from_signed(&[1, -2, 3, 3], 3).unwrap());
        assert_eq!(parse_word("1", 2).unwrap(), ReducedWord::identity());
        assert_eq!(parse_word("a a'", 2).unwrap(), ReducedWord::identity());
        assert!(parse_word("d", 3).is_err());
    }
}
