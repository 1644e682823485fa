//! Normal forms in a free product with amalgamation `A *_C B` of two cyclic
//! factors.
//!
//! Every element is stored as `x_1 x_2 ... x_m c`: a strictly alternating
//! sequence of nontrivial right-coset transversals followed by a tail `c` in
//! the amalgamated subgroup. Transversals of `C` in a factor `<u>` embedded
//! with index `k` are `u^0, ..., u^{k-1}`; `u^0` never appears in a word.
//!
//! Because both factors are abelian, `C` is central in each factor and hence
//! in the whole amalgam. Moving a tail rightward through a word therefore never
//! changes the transversals it passes, and tails simply add.
//!
//! A free product `Z_p * Z_q` is the degenerate case where `C` is trivial:
//! each factor `Z_n` is embedded with index `n`, so every nonzero residue is
//! its own transversal and the tail is always zero.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cyclic::{subgroup_of_powers, CyclicElement, CyclicGroup, EmbeddingSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FactorSide {
    Left,
    Right,
}

impl FactorSide {
    pub fn other(self) -> Self {
        match self {
            FactorSide::Left => FactorSide::Right,
            FactorSide::Right => FactorSide::Left,
        }
    }
}

impl fmt::Display for FactorSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FactorSide::Left => "Left",
            FactorSide::Right => "Right",
        })
    }
}

/// One transversal entry of a normal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Syllable {
    pub side: FactorSide,
    /// Exponent of the factor generator, in `[1, k-1]`.
    pub transversal: i64,
}

impl Syllable {
    pub fn new(side: FactorSide, transversal: i64) -> Self {
        Syllable { side, transversal }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalForm {
    syllables: Vec<Syllable>,
    /// Exponent of the amalgamated-subgroup generator `d`.
    tail: i64,
}

impl NormalForm {
    pub fn identity() -> Self {
        NormalForm::default()
    }

    /// Builds a normal form without checking it against a group. Use
    /// [`AmalgamGroup::validate`] before trusting the result.
    pub fn from_parts(syllables: Vec<Syllable>, tail: i64) -> Self {
        NormalForm { syllables, tail }
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn tail(&self) -> i64 {
        self.tail
    }

    /// Number of syllables; the tail does not count.
    pub fn length(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty() && self.tail == 0
    }

    pub fn begins_ends(&self) -> (Option<FactorSide>, Option<FactorSide>) {
        (
            self.syllables.first().map(|s| s.side),
            self.syllables.last().map(|s| s.side),
        )
    }

    pub fn begins(&self) -> Option<FactorSide> {
        self.begins_ends().0
    }

    pub fn ends(&self) -> Option<FactorSide> {
        self.begins_ends().1
    }
}

pub fn length(x: &NormalForm) -> usize {
    x.length()
}

pub fn begins_ends(x: &NormalForm) -> (Option<FactorSide>, Option<FactorSide>) {
    x.begins_ends()
}

/// What happens where two normal forms meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Junction {
    /// Sides differ (or an operand is empty): lengths add.
    None,
    /// The junction product leaves the amalgamated subgroup: length drops by one.
    Amalgamation,
    /// The junction product lands in the amalgamated subgroup: length drops by
    /// at least two.
    Cancellation,
}

/// Letters used when printing syllables of each side and the tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideLabels {
    pub left: char,
    pub right: char,
    pub tail: char,
}

impl SideLabels {
    pub const FREE: SideLabels = SideLabels {
        left: 'e',
        right: 'f',
        tail: 'd',
    };
    pub const TORUS: SideLabels = SideLabels {
        left: 'u',
        right: 'v',
        tail: 'd',
    };

    pub fn label(&self, side: FactorSide) -> char {
        match side {
            FactorSide::Left => self.left,
            FactorSide::Right => self.right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub group: CyclicGroup,
    pub embedding: EmbeddingSpec,
}

impl Factor {
    fn index(&self) -> i64 {
        self.embedding.index() as i64
    }
}

/// `A *_C B` for cyclic `A`, `B`, with `C` the subgroup of `k_A`-th powers in
/// `A` identified with the subgroup of `k_B`-th powers in `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamGroup {
    left: Factor,
    right: Factor,
    amalgamated: CyclicGroup,
    labels: SideLabels,
}

impl AmalgamGroup {
    pub fn new(left: Factor, right: Factor, labels: SideLabels) -> Result<Self> {
        for (name, f) in [("left", &left), ("right", &right)] {
            if f.embedding.index() < 2 {
                return Err(Error::InvalidParameters(format!(
                    "{name} factor: amalgamated subgroup must be proper (index >= 2)"
                )));
            }
            if let Some(n) = f.group.order() {
                if n % f.embedding.index() != 0 {
                    return Err(Error::InvalidParameters(format!(
                        "{name} factor: index {} does not divide the order {n}",
                        f.embedding.index()
                    )));
                }
            }
        }
        let c_left = subgroup_of_powers(left.group, left.embedding);
        let c_right = subgroup_of_powers(right.group, right.embedding);
        if c_left != c_right {
            return Err(Error::InvalidParameters(format!(
                "amalgamated subgroups differ: order {:?} vs {:?}",
                c_left.order(),
                c_right.order()
            )));
        }
        Ok(AmalgamGroup {
            left,
            right,
            amalgamated: c_left,
            labels,
        })
    }

    /// `Z_p * Z_q`, the amalgam over the trivial group.
    pub fn free_product(p: u64, q: u64) -> Result<Self> {
        if p < 2 || q < 2 {
            return Err(Error::InvalidParameters(format!(
                "free factors must be nontrivial, got Z_{p} * Z_{q}"
            )));
        }
        Self::new(
            Factor {
                group: CyclicGroup::finite(p),
                embedding: EmbeddingSpec::new(p)?,
            },
            Factor {
                group: CyclicGroup::finite(q),
                embedding: EmbeddingSpec::new(q)?,
            },
            SideLabels::FREE,
        )
    }

    /// `<u, v | u^p = v^q>` as `Z *_Z Z` with indices `p` and `q`.
    pub fn torus_amalgam(p: u64, q: u64) -> Result<Self> {
        Self::new(
            Factor {
                group: CyclicGroup::infinite(),
                embedding: EmbeddingSpec::proper(p)?,
            },
            Factor {
                group: CyclicGroup::infinite(),
                embedding: EmbeddingSpec::proper(q)?,
            },
            SideLabels::TORUS,
        )
    }

    pub fn factor(&self, side: FactorSide) -> &Factor {
        match side {
            FactorSide::Left => &self.left,
            FactorSide::Right => &self.right,
        }
    }

    pub fn amalgamated(&self) -> CyclicGroup {
        self.amalgamated
    }

    pub fn has_trivial_amalgam(&self) -> bool {
        self.amalgamated == CyclicGroup::TRIVIAL
    }

    pub fn labels(&self) -> SideLabels {
        self.labels
    }

    /// Number of nontrivial transversals on `side` (`k - 1`).
    pub fn transversal_count(&self, side: FactorSide) -> i64 {
        self.factor(side).index() - 1
    }

    /// Splits a factor exponent into `(transversal, tail)`.
    fn split(&self, side: FactorSide, value: i64) -> (i64, i64) {
        let f = self.factor(side);
        let v = f.group.reduce(value);
        let k = f.index();
        (v.rem_euclid(k), self.amalgamated.reduce(v.div_euclid(k)))
    }

    fn add_tail(&self, a: i64, b: i64) -> i64 {
        self.amalgamated.reduce(a + b)
    }

    /// Embeds the amalgamated-subgroup element `d^m` into a factor.
    pub fn embed_tail(&self, side: FactorSide, m: i64) -> CyclicElement {
        let f = self.factor(side);
        f.group.element(m * f.index())
    }

    pub fn identity(&self) -> NormalForm {
        NormalForm::identity()
    }

    /// Normal form of the single factor element `g^value` on `side`.
    pub fn factor_element(&self, side: FactorSide, value: i64) -> NormalForm {
        let (r, m) = self.split(side, value);
        let syllables = if r == 0 {
            Vec::new()
        } else {
            vec![Syllable::new(side, r)]
        };
        NormalForm { syllables, tail: m }
    }

    /// Normal form of `d^m`.
    pub fn tail_element(&self, m: i64) -> NormalForm {
        NormalForm {
            syllables: Vec::new(),
            tail: self.amalgamated.reduce(m),
        }
    }

    /// Checks that `x` is a normal form of this group.
    pub fn validate(&self, x: &NormalForm) -> Result<()> {
        for (i, s) in x.syllables.iter().enumerate() {
            let k = self.factor(s.side).index();
            if !(1..k).contains(&s.transversal) {
                return Err(Error::GroupMismatch(format!(
                    "syllable {i} has transversal {} outside [1, {}]",
                    s.transversal,
                    k - 1
                )));
            }
            if i > 0 && x.syllables[i - 1].side == s.side {
                return Err(Error::GroupMismatch(format!(
                    "syllables {} and {i} do not alternate",
                    i - 1
                )));
            }
        }
        if self.amalgamated.reduce(x.tail) != x.tail {
            return Err(Error::GroupMismatch(format!(
                "tail {} is not canonical in the amalgamated subgroup",
                x.tail
            )));
        }
        Ok(())
    }

    /// Normal form of a product of factor elements.
    pub fn normalize(&self, raw: &[(FactorSide, CyclicElement)]) -> Result<NormalForm> {
        for (i, (side, g)) in raw.iter().enumerate() {
            if g.group() != self.factor(*side).group {
                return Err(Error::GroupMismatch(format!(
                    "entry {i}: element of Z_{} given for the {side} factor",
                    g.group().modulus()
                )));
            }
        }
        Ok(self.normalize_exponents(raw.iter().map(|(s, g)| (*s, g.value()))))
    }

    /// Like [`normalize`](Self::normalize) with raw exponents; any integer is
    /// accepted and reduced in its factor.
    pub fn normalize_exponents<I>(&self, raw: I) -> NormalForm
    where
        I: IntoIterator<Item = (FactorSide, i64)>,
    {
        raw.into_iter().fold(NormalForm::identity(), |acc, (side, v)| {
            self.mul(&acc, &self.factor_element(side, v))
        })
    }

    pub fn multiply(&self, x: &NormalForm, y: &NormalForm) -> Result<NormalForm> {
        self.validate(x)?;
        self.validate(y)?;
        Ok(self.mul(x, y))
    }

    /// Product of two normal forms, assumed valid for this group.
    ///
    /// The junction `x_n y_1` is resolved first; on cancellation the worklist
    /// moves outward to `x_{n-1} y_2`, stopping at the first amalgamation or
    /// side change. At most `min(m, n)` junction steps are taken.
    pub fn mul(&self, x: &NormalForm, y: &NormalForm) -> NormalForm {
        debug_assert!(self.validate(x).is_ok() && self.validate(y).is_ok());
        let mut tail = self.add_tail(x.tail, y.tail);
        let mut left = Vec::with_capacity(x.syllables.len() + y.syllables.len());
        left.extend_from_slice(&x.syllables);
        let mut rest = y.syllables.as_slice();

        while let (Some(a), Some(b)) = (left.last().copied(), rest.first()) {
            if a.side != b.side {
                break;
            }
            rest = &rest[1..];
            let (r, m) = self.split(a.side, a.transversal + b.transversal);
            tail = self.add_tail(tail, m);
            if r != 0 {
                left.last_mut().unwrap().transversal = r;
                break;
            }
            left.pop();
        }
        left.extend_from_slice(rest);
        NormalForm { syllables: left, tail }
    }

    pub fn invert(&self, x: &NormalForm) -> NormalForm {
        let mut tail = self.amalgamated.reduce(-x.tail);
        let syllables = x
            .syllables
            .iter()
            .rev()
            .map(|s| {
                let (r, m) = self.split(s.side, -s.transversal);
                tail = self.add_tail(tail, m);
                Syllable::new(s.side, r)
            })
            .collect();
        NormalForm { syllables, tail }
    }

    pub fn power(&self, x: &NormalForm, n: i64) -> NormalForm {
        let base = if n < 0 { self.invert(x) } else { x.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = NormalForm::identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    /// `g x g^{-1}`.
    pub fn conjugate(&self, g: &NormalForm, x: &NormalForm) -> NormalForm {
        self.mul(&self.mul(g, x), &self.invert(g))
    }

    pub fn product<'a, I>(&self, factors: I) -> NormalForm
    where
        I: IntoIterator<Item = &'a NormalForm>,
    {
        factors
            .into_iter()
            .fold(NormalForm::identity(), |acc, f| self.mul(&acc, f))
    }

    pub fn classify_junction(&self, x: &NormalForm, y: &NormalForm) -> Junction {
        match (x.syllables.last(), y.syllables.first()) {
            (Some(a), Some(b)) if a.side == b.side => {
                if self.split(a.side, a.transversal + b.transversal).0 == 0 {
                    Junction::Cancellation
                } else {
                    Junction::Amalgamation
                }
            }
            _ => Junction::None,
        }
    }

    /// All normal forms with identity tail and at most `max_len` syllables,
    /// shortest first.
    pub fn words_up_to(&self, max_len: usize) -> Vec<NormalForm> {
        let mut out = vec![NormalForm::identity()];
        let mut layer = vec![NormalForm::identity()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                let sides: &[FactorSide] = match w.ends() {
                    None => &[FactorSide::Left, FactorSide::Right],
                    Some(FactorSide::Left) => &[FactorSide::Right],
                    Some(FactorSide::Right) => &[FactorSide::Left],
                };
                for &side in sides {
                    for t in 1..=self.transversal_count(side) {
                        let mut s = w.syllables.clone();
                        s.push(Syllable::new(side, t));
                        next.push(NormalForm::from_parts(s, 0));
                    }
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    /// A uniformly random syllable sequence of exactly `len` syllables, with
    /// an optional first side and a tail drawn from `tail_range`.
    pub fn random_word<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        len: usize,
        first: Option<FactorSide>,
        tail_range: i64,
    ) -> NormalForm {
        let mut side = first.unwrap_or(if rng.gen() { FactorSide::Left } else { FactorSide::Right });
        let mut syllables = Vec::with_capacity(len);
        for _ in 0..len {
            let t = rng.gen_range(1..=self.transversal_count(side));
            syllables.push(Syllable::new(side, t));
            side = side.other();
        }
        let tail = if tail_range > 0 && !self.has_trivial_amalgam() {
            self.amalgamated.reduce(rng.gen_range(-tail_range..=tail_range))
        } else {
            0
        };
        NormalForm { syllables, tail }
    }
}
