//! Text syntax for every kind of word the engine reads or prints.
//!
//! Tokens are separated by whitespace; `[`, `]` and `|` are tokens on their
//! own even without surrounding spaces.
//!
//! Group words (normal forms and raw products):
//!
//! ```text
//! word     := "1" | syllable* [ "|" tail ]
//! syllable := side ":" int          side in {e, u, a} (Left) or {f, v, b} (Right)
//! tail     := ("d" | "tail") ":" int
//! ```
//!
//! Printed form: `e:1 f:2` with the group's side letters, then ` | d:m` when
//! the tail is nonzero; the identity prints as `1`.
//!
//! Formal words over `{ac0, bc}` with central element `c~ = (bc)^m`:
//!
//! ```text
//! formal := "1" | item*
//! item   := "(bc)" ["^" int] | "[" letter* "]" | letter
//! letter := "(ac0)" ["^" int] | "c~" ["^" int]
//! ```
//!
//! Consecutive bare letters form one block; brackets delimit blocks
//! explicitly. The printer always brackets blocks so that adjacent blocks
//! survive a round trip.
//!
//! Two-generator words for sign-change statistics:
//!
//! ```text
//! twogen := ( base ["^" int] | second ["^" int] )*
//! base   := "e" | "f" | "(bc)"
//! second := "X" | "(ac0)"
//! ```

use std::fmt;

use thiserror::Error;

use crate::amalgam::{AmalgamGroup, FactorSide, NormalForm, SideLabels};
use crate::formal::{BlockLetter, FormalWord, Generator, Phrase, TwoGeneratorWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }
}

fn tokenize(input: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    for (li, line) in input.lines().enumerate() {
        let mut start: Option<usize> = None;
        let chars = line.char_indices().peekable();
        for (i, c) in chars {
            let single = matches!(c, '[' | ']' | '|');
            if c.is_whitespace() || single {
                if let Some(s) = start.take() {
                    tokens.push(Token {
                        text: &line[s..i],
                        line: li + 1,
                        column: line[..s].chars().count() + 1,
                    });
                }
                if single {
                    tokens.push(Token {
                        text: &line[i..i + 1],
                        line: li + 1,
                        column: line[..i].chars().count() + 1,
                    });
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            tokens.push(Token {
                text: &line[s..],
                line: li + 1,
                column: line[..s].chars().count() + 1,
            });
        }
    }
    tokens
}

fn parse_int(tok: &Token<'_>, text: &str) -> Result<i64, ParseError> {
    text.parse::<i64>()
        .map_err(|_| tok.error(format!("expected a signed integer, found `{text}`")))
}

/// A product of factor elements as written, before normalization.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawWord {
    pub letters: Vec<(FactorSide, i64)>,
    pub tail: i64,
}

impl RawWord {
    /// The product in `group`.
    pub fn evaluate(&self, group: &AmalgamGroup) -> crate::Result<NormalForm> {
        if self.tail != 0 && group.has_trivial_amalgam() {
            return Err(crate::Error::MalformedWord(
                "a tail is only meaningful when the amalgamated subgroup is nontrivial".into(),
            ));
        }
        let body = group.normalize_exponents(self.letters.iter().copied());
        Ok(group.mul(&body, &group.tail_element(self.tail)))
    }
}

/// Parses and evaluates a group word.
pub fn read_word(group: &AmalgamGroup, input: &str) -> crate::Result<NormalForm> {
    parse_word(input)?.evaluate(group)
}

fn side_of(letter: &str) -> Option<FactorSide> {
    match letter {
        "e" | "u" | "a" => Some(FactorSide::Left),
        "f" | "v" | "b" => Some(FactorSide::Right),
        _ => None,
    }
}

pub fn parse_word(input: &str) -> Result<RawWord, ParseError> {
    let tokens = tokenize(input);
    let mut word = RawWord::default();
    if tokens.len() == 1 && tokens[0].text == "1" {
        return Ok(word);
    }
    let mut iter = tokens.iter();
    while let Some(tok) = iter.next() {
        if tok.text == "|" {
            let tail = iter.next().ok_or_else(|| tok.error("expected `d:<int>` after `|`"))?;
            let (name, value) = tail
                .text
                .split_once(':')
                .ok_or_else(|| tail.error(format!("expected `d:<int>`, found `{}`", tail.text)))?;
            if name != "d" && name != "tail" {
                return Err(tail.error(format!("unknown tail symbol `{name}`")));
            }
            word.tail = parse_int(tail, value)?;
            if let Some(extra) = iter.next() {
                return Err(extra.error("unexpected token after the tail"));
            }
            break;
        }
        let (name, value) = tok
            .text
            .split_once(':')
            .ok_or_else(|| tok.error(format!("expected `side:exponent`, found `{}`", tok.text)))?;
        let side = side_of(name).ok_or_else(|| tok.error(format!("unknown side `{name}`")))?;
        word.letters.push((side, parse_int(tok, value)?));
    }
    Ok(word)
}

/// Canonical printed form of a normal form.
pub fn format_word(x: &NormalForm, labels: SideLabels) -> String {
    if x.is_identity() {
        return "1".to_string();
    }
    let mut out = x
        .syllables()
        .iter()
        .map(|s| format!("{}:{}", labels.label(s.side), s.transversal))
        .collect::<Vec<_>>()
        .join(" ");
    if x.tail() != 0 {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&format!("| {}:{}", labels.tail, x.tail()));
    }
    out
}

/// Splits `name^exp` (or bare `name`) into its parts.
fn split_power<'a>(tok: &Token<'a>) -> Result<(&'a str, i64), ParseError> {
    match tok.text.split_once('^') {
        Some((name, exp)) => Ok((name, parse_int(tok, exp)?)),
        None => Ok((tok.text, 1)),
    }
}

fn block_letter(tok: &Token<'_>) -> Result<Option<BlockLetter>, ParseError> {
    let (name, exp) = split_power(tok)?;
    Ok(match name {
        "(ac0)" => Some(BlockLetter::Ac0(exp)),
        "c~" => Some(BlockLetter::CTilde(exp)),
        _ => None,
    })
}

pub fn parse_formal_word(input: &str, m: u32) -> Result<FormalWord, ParseError> {
    let tokens = tokenize(input);
    let mut phrases = Vec::new();
    if tokens.len() == 1 && tokens[0].text == "1" {
        return Ok(FormalWord::new(phrases, m));
    }
    let mut bare: Option<Vec<BlockLetter>> = None;
    let mut iter = tokens.iter();
    while let Some(tok) = iter.next() {
        if tok.text == "[" {
            if let Some(b) = bare.take() {
                phrases.push(Phrase::Block(b));
            }
            let mut letters = Vec::new();
            loop {
                let t = iter.next().ok_or_else(|| tok.error("unclosed `[`"))?;
                if t.text == "]" {
                    break;
                }
                let l =
                    block_letter(t)?.ok_or_else(|| t.error(format!("`{}` cannot appear inside a block", t.text)))?;
                letters.push(l);
            }
            phrases.push(Phrase::Block(letters));
            continue;
        }
        if let Some(l) = block_letter(tok)? {
            bare.get_or_insert_with(Vec::new).push(l);
            continue;
        }
        let (name, exp) = split_power(tok)?;
        if name != "(bc)" {
            return Err(tok.error(format!("unknown formal symbol `{}`", tok.text)));
        }
        if let Some(b) = bare.take() {
            phrases.push(Phrase::Block(b));
        }
        phrases.push(Phrase::Power(exp));
    }
    if let Some(b) = bare.take() {
        phrases.push(Phrase::Block(b));
    }
    Ok(FormalWord::new(phrases, m))
}

impl fmt::Display for BlockLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockLetter::Ac0(e) => write!(f, "(ac0)^{e}"),
            BlockLetter::CTilde(e) => write!(f, "c~^{e}"),
        }
    }
}

impl fmt::Display for Phrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phrase::Power(e) => write!(f, "(bc)^{e}"),
            Phrase::Block(letters) => {
                f.write_str("[")?;
                for l in letters {
                    write!(f, " {l}")?;
                }
                f.write_str(" ]")
            }
        }
    }
}

impl fmt::Display for FormalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phrases().is_empty() {
            return f.write_str("1");
        }
        for (i, p) in self.phrases().iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

pub fn parse_two_generator_word(input: &str) -> Result<TwoGeneratorWord, ParseError> {
    let mut letters = Vec::new();
    for tok in tokenize(input) {
        let (name, exp) = split_power(&tok)?;
        let g = match name {
            "e" | "f" | "(bc)" => Generator::Base,
            "X" | "(ac0)" => Generator::Second,
            _ => return Err(tok.error(format!("unknown generator `{name}`"))),
        };
        letters.push((g, exp));
    }
    Ok(TwoGeneratorWord { letters })
}

impl fmt::Display for TwoGeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (g, e)) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match g {
                Generator::Base => write!(f, "e^{e}")?,
                Generator::Second => write!(f, "X^{e}")?,
            }
        }
        Ok(())
    }
}
