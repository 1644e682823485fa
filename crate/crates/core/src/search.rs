//! Bounded breadth-first search in the subgroup generated by a set of
//! elements.
//!
//! The ball is explored level by level over the alphabet of generators and
//! their inverses. An element is retained only when its normal length is
//! within `max_normal_length`; this keeps the ball finite but means an
//! element reachable only through a longer intermediate is missed. Every
//! report is therefore "not found within budget", never "not in the
//! subgroup".

use std::fmt;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amalgam::{AmalgamGroup, FactorSide, NormalForm};
use crate::error::{Error, Result};
use crate::torus::TorusKnotGroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Maximum number of generator letters in an expression.
    pub max_expression_length: usize,
    /// Maximum syllable length of a retained element.
    pub max_normal_length: usize,
}

impl SearchBudget {
    pub fn new(max_expression_length: usize, max_normal_length: usize) -> Result<Self> {
        if max_expression_length == 0 || max_normal_length == 0 {
            return Err(Error::InvalidParameters(
                "both budget components must be at least 1".into(),
            ));
        }
        Ok(SearchBudget {
            max_expression_length,
            max_normal_length,
        })
    }
}

impl fmt::Display for SearchBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.max_expression_length, self.max_normal_length)
    }
}

/// One letter of a witness expression: generator `generator`, or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "g{}^-1", self.generator)
        } else {
            write!(f, "g{}", self.generator)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchStatus {
    Found,
    ExhaustedBudget,
}

impl fmt::Display for SearchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchStatus::Found => "Found",
            SearchStatus::ExhaustedBudget => "ExhaustedBudget",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub target: NormalForm,
    pub status: SearchStatus,
    /// Shortest expression for the target, when found.
    pub witness: Option<Vec<Letter>>,
    pub ball_size: usize,
    /// Newly reached elements per expression length, starting at length 0.
    pub frontier_profile: Vec<usize>,
}

impl SearchReport {
    /// Evaluates the witness with `generators`; `None` when there is none.
    pub fn evaluate_witness(&self, group: &AmalgamGroup, generators: &[NormalForm]) -> Option<NormalForm> {
        let witness = self.witness.as_ref()?;
        Some(evaluate_expression(group, generators, witness))
    }
}

pub fn evaluate_expression(group: &AmalgamGroup, generators: &[NormalForm], letters: &[Letter]) -> NormalForm {
    letters.iter().fold(NormalForm::identity(), |acc, l| {
        let g = &generators[l.generator];
        if l.inverse {
            group.mul(&acc, &group.invert(g))
        } else {
            group.mul(&acc, g)
        }
    })
}

#[derive(Debug, Clone, Copy)]
struct Origin {
    parent: u32,
    letter: Letter,
}

const ROOT: u32 = u32::MAX;

/// The explored ball: elements in discovery order with the letter that
/// first reached each one.
#[derive(Debug, Clone)]
pub struct Ball {
    elements: IndexMap<NormalForm, Origin>,
    frontier_profile: Vec<usize>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &NormalForm) -> bool {
        self.elements.contains_key(x)
    }

    /// Elements in breadth-first discovery order.
    pub fn elements(&self) -> impl Iterator<Item = &NormalForm> {
        self.elements.keys()
    }

    pub fn frontier_profile(&self) -> &[usize] {
        &self.frontier_profile
    }

    /// Minimal expression length of a retained element.
    pub fn depth(&self, x: &NormalForm) -> Option<usize> {
        self.witness(x).map(|w| w.len())
    }

    pub fn witness(&self, x: &NormalForm) -> Option<Vec<Letter>> {
        let mut idx = self.elements.get_index_of(x)? as u32;
        let mut letters = Vec::new();
        loop {
            let (_, origin) = self.elements.get_index(idx as usize).unwrap();
            if origin.parent == ROOT {
                break;
            }
            letters.push(origin.letter);
            idx = origin.parent;
        }
        letters.reverse();
        Some(letters)
    }

    fn report(&self, target: &NormalForm) -> SearchReport {
        let witness = self.witness(target);
        SearchReport {
            target: target.clone(),
            status: if witness.is_some() {
                SearchStatus::Found
            } else {
                SearchStatus::ExhaustedBudget
            },
            witness,
            ball_size: self.len(),
            frontier_profile: self.frontier_profile.clone(),
        }
    }
}

/// Generators and their inverses, without repeats.
fn alphabet(group: &AmalgamGroup, generators: &[NormalForm]) -> Vec<(NormalForm, Letter)> {
    let mut out: Vec<(NormalForm, Letter)> = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        for (x, inverse) in [(g.clone(), false), (group.invert(g), true)] {
            if !out.iter().any(|(y, _)| *y == x) {
                out.push((x, Letter { generator: i, inverse }));
            }
        }
    }
    out
}

fn explore(
    group: &AmalgamGroup,
    generators: &[NormalForm],
    budget: SearchBudget,
    mut done: impl FnMut(&Ball) -> bool,
) -> Result<Ball> {
    for (i, g) in generators.iter().enumerate() {
        group.validate(g)?;
        if g.is_identity() {
            return Err(Error::InvalidParameters(format!("generator {i} is the identity")));
        }
    }
    let letters = alphabet(group, generators);
    let mut ball = Ball {
        elements: IndexMap::new(),
        frontier_profile: vec![1],
    };
    ball.elements.insert(
        NormalForm::identity(),
        Origin {
            parent: ROOT,
            letter: Letter {
                generator: 0,
                inverse: false,
            },
        },
    );
    let mut frontier = 0..1usize;
    for _ in 0..budget.max_expression_length {
        if done(&ball) || frontier.is_empty() {
            break;
        }
        // Products are computed in parallel; insertion stays in index order
        // so the ball does not depend on the number of workers.
        let candidates: Vec<Vec<(NormalForm, Origin)>> = frontier
            .clone()
            .into_par_iter()
            .map(|i| {
                let (x, _) = ball.elements.get_index(i).unwrap();
                letters
                    .iter()
                    .filter_map(|(a, letter)| {
                        let y = group.mul(x, a);
                        (y.length() <= budget.max_normal_length).then_some((
                            y,
                            Origin {
                                parent: i as u32,
                                letter: *letter,
                            },
                        ))
                    })
                    .collect()
            })
            .collect();
        let start = ball.elements.len();
        for (y, origin) in candidates.into_iter().flatten() {
            ball.elements.entry(y).or_insert(origin);
        }
        let end = ball.elements.len();
        ball.frontier_profile.push(end - start);
        frontier = start..end;
    }
    Ok(ball)
}

pub fn enumerate_ball(group: &AmalgamGroup, generators: &[NormalForm], budget: SearchBudget) -> Result<Ball> {
    explore(group, generators, budget, |_| false)
}

/// Searches for `target`, stopping at the first level that reaches it.
pub fn membership(
    group: &AmalgamGroup,
    generators: &[NormalForm],
    target: &NormalForm,
    budget: SearchBudget,
) -> Result<SearchReport> {
    group.validate(target)?;
    let ball = explore(group, generators, budget, |b| b.contains(target))?;
    let report = ball.report(target);
    check_witness(group, generators, &report);
    Ok(report)
}

/// One exploration, one report per target. Stops early once every target
/// has been reached.
pub fn membership_many(
    group: &AmalgamGroup,
    generators: &[NormalForm],
    targets: &[NormalForm],
    budget: SearchBudget,
) -> Result<Vec<SearchReport>> {
    for t in targets {
        group.validate(t)?;
    }
    let ball = explore(group, generators, budget, |b| targets.iter().all(|t| b.contains(t)))?;
    let reports: Vec<SearchReport> = targets.iter().map(|t| ball.report(t)).collect();
    for r in &reports {
        check_witness(group, generators, r);
    }
    Ok(reports)
}

fn check_witness(group: &AmalgamGroup, generators: &[NormalForm], report: &SearchReport) {
    if let Some(value) = report.evaluate_witness(group, generators) {
        assert_eq!(value, report.target, "witness does not evaluate to its target");
    }
}

/// Outcome of checking one choice of `h(bc)` against the targets
/// `h(x)^j`, `1 <= j < k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verify314Report {
    pub p: u64,
    pub q: u64,
    pub k: u64,
    /// `h(bc)`, generator `g0`.
    pub bc_image: NormalForm,
    /// `h(x)^k`, generator `g1`.
    pub x_power: NormalForm,
    pub budget: SearchBudget,
    pub reports: Vec<SearchReport>,
}

impl Verify314Report {
    /// True when no target was reached.
    pub fn consistent(&self) -> bool {
        self.reports.iter().all(|r| r.status == SearchStatus::ExhaustedBudget)
    }
}

/// Searches the subgroup of `Z_p * Z_q` generated by `h(bc)` and
/// `h(x)^k` for `h(x)^j`, `1 <= j < k`.
///
/// `h(bc)` is `g e' g^{-1}` where `e'` is the factor element `(side, value)`
/// and `g` the conjugator (identity when absent).
pub fn verify_314(
    p: u64,
    q: u64,
    k: u64,
    factor_element: (FactorSide, i64),
    conjugator: Option<&NormalForm>,
    budget: SearchBudget,
) -> Result<Verify314Report> {
    let torus = TorusKnotGroup::new(p, q)?;
    let quotient = torus.quotient_group();
    let e = quotient.factor_element(factor_element.0, factor_element.1);
    if e.is_identity() {
        return Err(Error::InvalidParameters("the factor element must be nontrivial".into()));
    }
    let bc = match conjugator {
        Some(g) => {
            quotient.validate(g)?;
            quotient.conjugate(g, &e)
        }
        None => e,
    };
    verify_314_with(&torus, k, bc, budget)
}

fn verify_314_with(torus: &TorusKnotGroup, k: u64, bc: NormalForm, budget: SearchBudget) -> Result<Verify314Report> {
    if k < 2 {
        return Err(Error::InvalidParameters(format!("k must be at least 2, got {k}")));
    }
    let quotient = torus.quotient_group();
    let hx = torus.seifert_quotient(&torus.meridian());
    let x_power = quotient.power(&hx, k as i64);
    let targets: Vec<NormalForm> = (1..k as i64).map(|j| quotient.power(&hx, j)).collect();
    let generators = [bc.clone(), x_power.clone()];
    let reports = membership_many(quotient, &generators, &targets, budget)?;
    Ok(Verify314Report {
        p: torus.p(),
        q: torus.q(),
        k,
        bc_image: bc,
        x_power,
        budget,
        reports,
    })
}

/// Every distinct `g e' g^{-1}` with `e'` a nontrivial element of either
/// factor and `length(g) <= max_conjugator_length`.
pub fn conjugates_of_factor_elements(group: &AmalgamGroup, max_conjugator_length: usize) -> Vec<NormalForm> {
    let conjugators = group.words_up_to(max_conjugator_length);
    let mut seen = indexmap::IndexSet::new();
    for side in [FactorSide::Left, FactorSide::Right] {
        for t in 1..=group.transversal_count(side) {
            let e = group.factor_element(side, t);
            for g in &conjugators {
                seen.insert(group.conjugate(g, &e));
            }
        }
    }
    seen.into_iter().collect()
}

/// [`verify_314`] for every `h(bc)` from [`conjugates_of_factor_elements`].
pub fn verify_314_sweep(
    p: u64,
    q: u64,
    k: u64,
    max_conjugator_length: usize,
    budget: SearchBudget,
) -> Result<Vec<Verify314Report>> {
    let torus = TorusKnotGroup::new(p, q)?;
    conjugates_of_factor_elements(torus.quotient_group(), max_conjugator_length)
        .into_par_iter()
        .map(|bc| verify_314_with(&torus, k, bc, budget))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationReport {
    /// Transversal exponents of left-factor syllables seen in the generators.
    pub transversals: Vec<i64>,
    /// Generators used for the search: the transversals, then `d` when the
    /// amalgamated subgroup is nontrivial.
    pub search_generators: Vec<NormalForm>,
    pub status: SearchStatus,
    /// First left-factor element not reached, in order of `|exponent|`.
    pub first_unreached: Option<NormalForm>,
    pub ball_size: usize,
    pub frontier_profile: Vec<usize>,
}

/// Checks, within budget, that the left-factor transversals occurring in
/// `generators`, together with the amalgamated subgroup, generate the left
/// factor.
///
/// Targets are every element of a finite left factor, or `u^i` with
/// `|i| <= max_normal_length` for an infinite one.
pub fn transversal_generation_check(
    group: &AmalgamGroup,
    generators: &[NormalForm],
    budget: SearchBudget,
) -> Result<GenerationReport> {
    let mut transversals: Vec<i64> = Vec::new();
    for g in generators {
        group.validate(g)?;
        for s in g.syllables() {
            if s.side == FactorSide::Left && !transversals.contains(&s.transversal) {
                transversals.push(s.transversal);
            }
        }
    }
    transversals.sort_unstable();
    let mut search_generators: Vec<NormalForm> = transversals
        .iter()
        .map(|&t| group.factor_element(FactorSide::Left, t))
        .collect();
    if !group.has_trivial_amalgam() {
        search_generators.push(group.tail_element(1));
    }

    let left = group.factor(FactorSide::Left).group;
    let targets: Vec<NormalForm> = match left.order() {
        Some(n) => (0..n as i64).collect::<Vec<_>>(),
        None => {
            let r = budget.max_normal_length as i64;
            let mut v = vec![0];
            for i in 1..=r {
                v.extend([i, -i]);
            }
            v
        }
    }
    .into_iter()
    .map(|i| group.factor_element(FactorSide::Left, i))
    .collect();

    let (ball_size, profile, first_unreached) = if search_generators.is_empty() {
        (1, vec![1], targets.iter().find(|t| !t.is_identity()).cloned())
    } else {
        let ball = explore(group, &search_generators, budget, |b| {
            targets.iter().all(|t| b.contains(t))
        })?;
        let miss = targets.iter().find(|t| !ball.contains(t)).cloned();
        (ball.len(), ball.frontier_profile.clone(), miss)
    };
    Ok(GenerationReport {
        transversals,
        search_generators,
        status: if first_unreached.is_none() {
            SearchStatus::Found
        } else {
            SearchStatus::ExhaustedBudget
        },
        first_unreached,
        ball_size,
        frontier_profile: profile,
    })
}
