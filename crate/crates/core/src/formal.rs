//! Symbolic words over the generating pair `{ac0, bc}` of an abstract
//! amalgam `A *_C B`, where `c~ = (bc)^m` is central.
//!
//! Nothing here knows how to multiply in `A`. Blocks are uninterpreted words
//! over `ac0` and `c~`; the only algebra used is that `c~` commutes with `bc`
//! and that powers of one symbol combine.

use serde::{Deserialize, Serialize};

use crate::amalgam::{FactorSide, NormalForm};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockLetter {
    Ac0(i64),
    CTilde(i64),
}

impl BlockLetter {
    fn exponent(self) -> i64 {
        match self {
            BlockLetter::Ac0(e) | BlockLetter::CTilde(e) => e,
        }
    }

    fn with_exponent(self, e: i64) -> Self {
        match self {
            BlockLetter::Ac0(_) => BlockLetter::Ac0(e),
            BlockLetter::CTilde(_) => BlockLetter::CTilde(e),
        }
    }

    fn same_symbol(self, other: Self) -> bool {
        matches!(
            (self, other),
            (BlockLetter::Ac0(_), BlockLetter::Ac0(_)) | (BlockLetter::CTilde(_), BlockLetter::CTilde(_))
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phrase {
    /// `(bc)^n`
    Power(i64),
    /// A word in `ac0` and `c~`.
    Block(Vec<BlockLetter>),
}

impl Phrase {
    /// `Some(s)` when the phrase is a block that is syntactically `c~^s`
    /// (no `ac0` letters; the empty block is `c~^0`).
    pub fn central_exponent(&self) -> Option<i64> {
        match self {
            Phrase::Block(letters) => letters.iter().try_fold(0, |acc, l| match l {
                BlockLetter::CTilde(e) => Some(acc + e),
                BlockLetter::Ac0(_) => None,
            }),
            Phrase::Power(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormalWord {
    phrases: Vec<Phrase>,
    m: u32,
}

impl FormalWord {
    pub fn new(phrases: Vec<Phrase>, m: u32) -> Self {
        FormalWord { phrases, m }
    }

    pub fn phrases(&self) -> &[Phrase] {
        &self.phrases
    }

    /// The central power: `(bc)^m = c~`.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// The word as a single `c~` exponent, if it is one.
    pub fn central_exponent(&self) -> Option<i64> {
        match self.phrases.as_slice() {
            [] => Some(0),
            [p] => p.central_exponent(),
            _ => None,
        }
    }

    pub fn shape(&self) -> FixedPointShape {
        let m = self.m.max(1) as i64;
        match self.phrases.as_slice() {
            [] => FixedPointShape::CentralPower(0),
            [Phrase::Power(p)] if p % m == 0 => FixedPointShape::CentralPower(p / m),
            [p @ Phrase::Block(_)] => match p.central_exponent() {
                Some(s) => FixedPointShape::CentralPower(s),
                None => FixedPointShape::SingleBlock,
            },
            _ => FixedPointShape::Reduced,
        }
    }
}

/// Shapes a rewritten word can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedPointShape {
    /// `(bc)^{sm}` written as `c~^s`.
    CentralPower(i64),
    /// `(bc)^0 w_2`: one block that is not a pure power of `c~`.
    SingleBlock,
    /// Anything else; contains a `bc` power that is not a multiple of `m`.
    Reduced,
}

/// Outcome of [`rewrite_central_powers`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rewrite {
    pub word: FormalWord,
    /// Number of passes that changed the word.
    pub steps: usize,
}

/// Rewrites `w` to its canonical form:
///
/// 1. `(bc)^p` with `m | p` becomes the block `c~^{p/m}`; `(bc)^0` disappears;
/// 2. adjacent `bc` powers add and adjacent blocks concatenate, with
///    neighbouring letters of the same symbol combined;
/// 3. a block that is a pure `c~` power moves left past a preceding `bc` power,
///    so `(bc)^a c~^s (bc)^b` becomes `c~^s (bc)^{a+b}`.
///
/// Every pass either lowers the number of phrases, lowers the number of
/// `bc` powers that are multiples of `m`, or moves a pure block left, so the
/// loop reaches a fixed point.
pub fn rewrite_central_powers(w: &FormalWord) -> Rewrite {
    let mut word = w.clone();
    let mut steps = 0;
    loop {
        let next = rewrite_pass(&word);
        if next == word {
            return Rewrite { word, steps };
        }
        word = next;
        steps += 1;
    }
}

fn push_letter(letters: &mut Vec<BlockLetter>, l: BlockLetter) {
    if l.exponent() == 0 {
        return;
    }
    match letters.last_mut() {
        Some(last) if last.same_symbol(l) => {
            let e = last.exponent() + l.exponent();
            if e == 0 {
                letters.pop();
            } else {
                *last = last.with_exponent(e);
            }
        }
        _ => letters.push(l),
    }
}

fn push_phrase(out: &mut Vec<Phrase>, phrase: Phrase) {
    match (out.last_mut(), phrase) {
        (_, Phrase::Power(0)) => {}
        (Some(Phrase::Power(a)), Phrase::Power(b)) => {
            *a += b;
            if *a == 0 {
                out.pop();
            }
        }
        (Some(Phrase::Block(prev)), Phrase::Block(letters)) => {
            for l in letters {
                push_letter(prev, l);
            }
        }
        (_, Phrase::Block(letters)) => {
            let mut merged = Vec::with_capacity(letters.len());
            for l in letters {
                push_letter(&mut merged, l);
            }
            out.push(Phrase::Block(merged));
        }
        (_, p) => out.push(p),
    }
}

fn rewrite_pass(w: &FormalWord) -> FormalWord {
    let m = w.m.max(1) as i64;
    let mut out: Vec<Phrase> = Vec::with_capacity(w.phrases.len());
    for phrase in &w.phrases {
        let phrase = match phrase {
            Phrase::Power(p) if *p != 0 && p % m == 0 => Phrase::Block(vec![BlockLetter::CTilde(p / m)]),
            p => p.clone(),
        };
        match phrase.central_exponent() {
            Some(0) => continue,
            Some(_) if matches!(out.last(), Some(Phrase::Power(_))) => {
                let power = out.pop().unwrap();
                push_phrase(&mut out, phrase);
                // Re-pushed after the block; merges with a following power later.
                out.push(power);
            }
            _ => push_phrase(&mut out, phrase),
        }
    }
    // An empty block left by cancellation is the identity.
    out.retain(|p| p.central_exponent() != Some(0));
    FormalWord::new(out, w.m)
}

/// Checks the canonical-form invariants of a rewritten word: no `bc` power is
/// zero or a multiple of `m`, phrases alternate between powers and blocks,
/// and a pure `c~` block can only stand first.
pub fn is_canonical(w: &FormalWord) -> bool {
    let m = w.m.max(1) as i64;
    let phrases = &w.phrases;
    for (i, p) in phrases.iter().enumerate() {
        match p {
            Phrase::Power(e) if *e == 0 || e % m == 0 => return false,
            Phrase::Block(letters) => {
                if letters.is_empty() {
                    return false;
                }
                if letters.windows(2).any(|l| l[0].same_symbol(l[1])) {
                    return false;
                }
                if i > 0 && p.central_exponent().is_some() {
                    return false;
                }
            }
            _ => {}
        }
        if i > 0 && std::mem::discriminant(&phrases[i - 1]) == std::mem::discriminant(p) {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    /// The factor element (`e'`, or `bc`).
    Base,
    /// The designated second generator (`X = h(x^k)`, or `ac0`).
    Second,
}

/// A word in two generators, as written.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoGeneratorWord {
    pub letters: Vec<(Generator, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PSequence {
    /// Exponents of the second generator, in order.
    pub values: Vec<i64>,
    /// Number of sign changes along `values`.
    pub sigma: usize,
}

impl PSequence {
    pub fn from_values(values: Vec<i64>) -> Self {
        let sigma = sign_changes(&values);
        PSequence { values, sigma }
    }

    /// `j`, the number of second-generator phrases.
    pub fn j(&self) -> usize {
        self.values.len()
    }

    /// Junction sign pairs `(sign p_{2i}, sign p_{2i+2})`.
    pub fn junction_signs(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.values.windows(2).map(|w| (w[0].signum(), w[1].signum()))
    }
}

pub fn sign_changes(values: &[i64]) -> usize {
    values.windows(2).filter(|w| (w[0] > 0) != (w[1] > 0)).count()
}

/// Extracts the exponent sequence of the second generator from a word of
/// shape `B^{p1} X^{p2} B^{p3} ... X^{p2j} B^{p2j+1}`.
///
/// Generators must alternate, and every exponent other than a leading or
/// trailing `B` exponent must be nonzero.
pub fn p_sequence(w: &TwoGeneratorWord) -> Result<PSequence> {
    let letters = &w.letters;
    for (i, (g, e)) in letters.iter().enumerate() {
        if i > 0 && letters[i - 1].0 == *g {
            return Err(Error::MalformedWord(format!(
                "letters {} and {i} use the same generator",
                i - 1
            )));
        }
        let boundary_base = *g == Generator::Base && (i == 0 || i + 1 == letters.len());
        if *e == 0 && !boundary_base {
            return Err(Error::MalformedWord(format!("letter {i} has exponent zero")));
        }
    }
    Ok(PSequence::from_values(
        letters
            .iter()
            .filter(|(g, _)| *g == Generator::Second)
            .map(|&(_, e)| e)
            .collect(),
    ))
}

/// Normal-form silhouette of a group element: its length and end sides.
/// `Left` plays `A`, `Right` plays `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShapeDescriptor {
    pub length: usize,
    pub begins: Option<FactorSide>,
    pub ends: Option<FactorSide>,
}

impl ShapeDescriptor {
    pub fn identity() -> Self {
        ShapeDescriptor {
            length: 0,
            begins: None,
            ends: None,
        }
    }

    /// A word `x_1 ... x_len` beginning on `begins`; the end side follows
    /// from alternation.
    pub fn alternating(begins: FactorSide, length: usize) -> Self {
        assert!(length > 0);
        let ends = if length % 2 == 1 { begins } else { begins.other() };
        ShapeDescriptor {
            length,
            begins: Some(begins),
            ends: Some(ends),
        }
    }

    pub fn of(x: &NormalForm) -> Self {
        let (begins, ends) = x.begins_ends();
        ShapeDescriptor {
            length: x.length(),
            begins,
            ends,
        }
    }

    /// The silhouette of the inverse: the same length with ends swapped.
    pub fn inverted(self) -> Self {
        ShapeDescriptor {
            length: self.length,
            begins: self.ends,
            ends: self.begins,
        }
    }

    /// Shape is consistent with strict alternation.
    pub fn is_valid(&self) -> bool {
        match (self.length, self.begins, self.ends) {
            (0, None, None) => true,
            (n, Some(b), Some(e)) if n > 0 => (b == e) == (n % 2 == 1),
            _ => false,
        }
    }

    fn is(&self, length: usize, begins: FactorSide) -> bool {
        *self == ShapeDescriptor::alternating(begins, length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairType {
    P1,
    P2,
    P3,
    P4,
    Q2,
    Q3,
    Q4,
    Q5,
    Other,
}

impl PairType {
    pub fn name(self) -> &'static str {
        match self {
            PairType::P1 => "p1",
            PairType::P2 => "p2",
            PairType::P3 => "p3",
            PairType::P4 => "p4",
            PairType::Q2 => "q2",
            PairType::Q3 => "q3",
            PairType::Q4 => "q4",
            PairType::Q5 => "q5",
            PairType::Other => "other",
        }
    }
}

/// Matches an ordered pair of silhouettes against the generating-pair types.
fn classify_ordered(g1: ShapeDescriptor, g2: ShapeDescriptor) -> PairType {
    use FactorSide::{Left as A, Right as B};

    let a_letter = g1.is(1, A);
    let b_letter = g1.is(1, B);
    let n = g2.length;

    if a_letter && g2.is(1, B) {
        return PairType::P1;
    }
    if g1.length == 0 && g2.is(2, A) {
        return PairType::P2;
    }
    if b_letter && g2.is(2, A) {
        return PairType::P3;
    }
    if b_letter && g2.is(3, A) {
        return PairType::P4;
    }
    if a_letter && n >= 2 {
        return match (g2.begins, n % 2) {
            (Some(A), 1) => PairType::Q2,
            (Some(A), 0) => PairType::Q3,
            (Some(B), 0) => PairType::Q4,
            (Some(B), 1) => PairType::Q5,
            _ => PairType::Other,
        };
    }
    PairType::Other
}

/// Type of the generating pair `{g1, g2}`, trying both orders.
pub fn classify_pair(g1: ShapeDescriptor, g2: ShapeDescriptor) -> PairType {
    if !g1.is_valid() || !g2.is_valid() {
        return PairType::Other;
    }
    match classify_ordered(g1, g2) {
        PairType::Other => classify_ordered(g2, g1),
        t => t,
    }
}
