//! Randomized audit of the length lower bounds against exact normal forms
//! in `Z_p * Z_q`, plus an exhaustive survey of junction reductions.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amalgam::{AmalgamGroup, FactorSide, NormalForm};
use crate::bounds::{junction_reduction, lower_bound_for_sequence, ConjugateShape, Family, Sign};
use crate::error::{Error, Result};
use crate::formal::{Generator, PSequence, TwoGeneratorWord};
use crate::torus::TorusKnotGroup;

pub const DEFAULT_SEED: u64 = 0x5EED_3145;

/// Which conjugators `g` count as normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConjugatorRule {
    /// Shape ii: `e'_1 != e_1`. Shape iv: `f'_1 != f_2^{-1}`.
    /// Exactly the conditions that rule out cancellation where `h(bc)`
    /// meets `X` or `X^{-1}`.
    Junction,
    /// Shape ii: `e'_1 != e_1^{-1}`. Shape iv: `f'_1 != f_2^{-1}`.
    Literal,
}

impl fmt::Display for ConjugatorRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConjugatorRule::Junction => "junction",
            ConjugatorRule::Literal => "literal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditParams {
    pub p: u64,
    pub q: u64,
    pub k: u64,
    pub family: Family,
    pub trials: u64,
    /// Largest number of `X` phrases.
    pub max_j: u64,
    pub seed: u64,
    /// Exponents are drawn from `[-max_exponent, max_exponent]`.
    pub max_exponent: i64,
    /// Longest conjugator `g`; conjugate families only.
    pub max_conjugator_length: usize,
    pub rule: ConjugatorRule,
    /// Free factor holding `h(bc)`; both when `None`. Free-factor family only.
    pub factor: Option<FactorSide>,
}

impl AuditParams {
    pub fn new(p: u64, q: u64, k: u64, family: Family) -> Self {
        AuditParams {
            p,
            q,
            k,
            family,
            trials: 10_000,
            max_j: 4,
            seed: DEFAULT_SEED,
            max_exponent: 3,
            max_conjugator_length: 4,
            rule: ConjugatorRule::Junction,
            factor: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    /// Exact length below the closed-form bound.
    Bound,
    /// An element shorter than `2k - 1` that is not a power of `h(bc)`.
    Consequence,
    /// A power of `h(bc)` of even length, or `h(x)^j` not of length `2j`.
    Parity,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::Bound => "bound",
            ViolationKind::Consequence => "consequence",
            ViolationKind::Parity => "parity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub trial: u64,
    /// `h(bc)` for the trial.
    pub bc: NormalForm,
    /// The word, with `e` standing for `h(bc)`.
    pub word: TwoGeneratorWord,
    pub element: NormalForm,
    pub exact: i64,
    pub bound: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub params: AuditParams,
    /// Set when no word satisfies the hypotheses, e.g. no admissible
    /// conjugator exists.
    pub skipped: Option<String>,
    pub sampled: u64,
    pub min_margin: Option<i64>,
    /// Count of trials per margin `exact - bound`.
    pub margins: BTreeMap<i64, u64>,
    pub parity_checks: u64,
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

struct Setup {
    group: AmalgamGroup,
    /// `h(x)` and its first two syllables.
    hx: NormalForm,
    x_power: NormalForm,
    e1: i64,
    f2: i64,
}

impl Setup {
    fn new(p: u64, q: u64, k: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameters(format!("k must be at least 2, got {k}")));
        }
        let torus = TorusKnotGroup::new(p, q)?;
        let group = torus.quotient_group().clone();
        let hx = torus.seifert_quotient(&torus.meridian());
        let s = hx.syllables();
        let (e1, f2) = (s[0].transversal, s[1].transversal);
        let x_power = group.power(&hx, k as i64);
        Ok(Setup {
            group,
            hx,
            x_power,
            e1,
            f2,
        })
    }

    /// Conjugators of the given shape, length at most `max_len`, normalized
    /// under `rule`.
    fn conjugators(&self, shape: ConjugateShape, max_len: usize, rule: ConjugatorRule) -> Vec<NormalForm> {
        let g = &self.group;
        let (p, q) = (
            g.transversal_count(FactorSide::Left) + 1,
            g.transversal_count(FactorSide::Right) + 1,
        );
        g.words_up_to(max_len)
            .into_iter()
            .filter(|w| w.ends() == Some(FactorSide::Right))
            .filter(|w| {
                let first = w.syllables()[0];
                match shape {
                    ConjugateShape::Ii => {
                        first.side == FactorSide::Left
                            && match rule {
                                ConjugatorRule::Junction => first.transversal != self.e1,
                                ConjugatorRule::Literal => (first.transversal + self.e1) % p != 0,
                            }
                    }
                    ConjugateShape::Iv => first.side == FactorSide::Right && (first.transversal + self.f2) % q != 0,
                }
            })
            .collect()
    }
}

fn exponent<R: Rng>(rng: &mut R, max: i64) -> i64 {
    rng.gen_range(-max..=max)
}

fn nonzero_exponent<R: Rng>(rng: &mut R, max: i64) -> i64 {
    let v = rng.gen_range(1..=max);
    if rng.gen() {
        v
    } else {
        -v
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

struct TrialOutcome {
    margin: i64,
    parity_checks: u64,
    violations: Vec<Violation>,
}

/// Samples `params.trials` words in `h(bc)` and `X = h(x)^k`, each with
/// `1 <= j <= max_j` nonzero `X` exponents and nontrivial interior powers of
/// `h(bc)`, and compares exact length with the bound for its sign sequence.
///
/// Free factor: `h(bc)` is a nontrivial element of `params.factor`, or of
/// either factor.
/// Conjugate: `h(bc) = g e' g^{-1}` with `e'` in the left factor and `g` a
/// normalized conjugator of the requested shape.
pub fn bound_audit(params: &AuditParams) -> Result<AuditReport> {
    if params.max_j < 1 || params.max_exponent < 1 {
        return Err(Error::InvalidParameters(
            "max_j and max_exponent must be at least 1".into(),
        ));
    }
    let setup = Setup::new(params.p, params.q, params.k)?;
    let conjugators = match params.family {
        Family::FreeFactor => Vec::new(),
        Family::Conjugate(shape) => setup.conjugators(shape, params.max_conjugator_length, params.rule),
    };
    let mut report = AuditReport {
        params: *params,
        skipped: None,
        sampled: 0,
        min_margin: None,
        margins: BTreeMap::new(),
        parity_checks: 0,
        violations: Vec::new(),
    };
    if matches!(params.family, Family::Conjugate(_)) && conjugators.is_empty() {
        report.skipped = Some(format!(
            "no {} conjugator of length <= {} under the {} rule",
            params.family, params.max_conjugator_length, params.rule
        ));
        return Ok(report);
    }

    let outcomes: Vec<TrialOutcome> = (0..params.trials)
        .into_par_iter()
        .map(|trial| run_trial(params, &setup, &conjugators, trial))
        .collect::<Result<_>>()?;
    for o in outcomes {
        report.sampled += 1;
        *report.margins.entry(o.margin).or_default() += 1;
        report.min_margin = Some(report.min_margin.map_or(o.margin, |m| m.min(o.margin)));
        report.parity_checks += o.parity_checks;
        report.violations.extend(o.violations);
    }
    Ok(report)
}

fn run_trial(params: &AuditParams, setup: &Setup, conjugators: &[NormalForm], trial: u64) -> Result<TrialOutcome> {
    let g = &setup.group;
    let mut rng = trial_rng(params.seed, trial);

    let (base, n) = match params.family {
        Family::FreeFactor => {
            let coin: bool = rng.gen();
            let side = params
                .factor
                .unwrap_or(if coin { FactorSide::Left } else { FactorSide::Right });
            let order = g.transversal_count(side) + 1;
            (g.factor_element(side, rng.gen_range(1..order)), None)
        }
        Family::Conjugate(_) => {
            let c = conjugators.choose(&mut rng).unwrap();
            let order = g.transversal_count(FactorSide::Left) + 1;
            let e = g.factor_element(FactorSide::Left, rng.gen_range(1..order));
            (g.conjugate(c, &e), Some(c.length() as u64))
        }
    };
    let base_order =
        crate::torus::free_product_order(g, &base).expect("conjugates of factor elements have finite order") as i64;

    let j = rng.gen_range(1..=params.max_j) as usize;
    let mut word = TwoGeneratorWord::default();
    let mut p_values = Vec::with_capacity(j);
    for i in 0..=j {
        let e = if i == 0 || i == j {
            exponent(&mut rng, params.max_exponent)
        } else {
            loop {
                let e = nonzero_exponent(&mut rng, params.max_exponent);
                if e.rem_euclid(base_order) != 0 {
                    break e;
                }
            }
        };
        if e != 0 || (i != 0 && i != j) {
            word.letters.push((Generator::Base, e));
        }
        if i < j {
            let x = nonzero_exponent(&mut rng, params.max_exponent);
            word.letters.push((Generator::Second, x));
            p_values.push(x);
        }
    }

    let element = word.letters.iter().fold(NormalForm::identity(), |acc, &(gen, e)| {
        let piece = match gen {
            Generator::Base => g.power(&base, e),
            Generator::Second => g.power(&setup.x_power, e),
        };
        g.mul(&acc, &piece)
    });
    let exact = element.length() as i64;
    let pseq = PSequence::from_values(p_values);
    let bound = lower_bound_for_sequence(params.family, params.k, n, &pseq)?;

    let mut violations = Vec::new();
    let violation = |kind, element: NormalForm, exact: i64, bound: i64| Violation {
        kind,
        trial,
        bc: base.clone(),
        word: word.clone(),
        element,
        exact,
        bound,
    };
    if exact < bound {
        violations.push(violation(ViolationKind::Bound, element.clone(), exact, bound));
    }
    let floor = 2 * params.k as i64 - 1;
    let in_base = || (0..base_order).any(|i| g.power(&base, i) == element);
    if exact < floor && !in_base() {
        violations.push(violation(ViolationKind::Consequence, element.clone(), exact, floor));
    }

    let mut parity_checks = 0;
    for &(gen, e) in &word.letters {
        if gen == Generator::Base && e.rem_euclid(base_order) != 0 {
            parity_checks += 1;
            let pw = g.power(&base, e);
            if pw.length().is_multiple_of(2) {
                violations.push(violation(ViolationKind::Parity, pw.clone(), pw.length() as i64, 1));
            }
        }
    }
    for jj in 1..params.k as i64 {
        parity_checks += 1;
        let pw = g.power(&setup.hx, jj);
        if pw.length() as i64 != 2 * jj {
            violations.push(violation(ViolationKind::Parity, pw.clone(), pw.length() as i64, 2 * jj));
        }
    }

    Ok(TrialOutcome {
        margin: exact - bound,
        parity_checks,
        violations,
    })
}

/// Observed length reductions for one junction configuration
/// `X^{left} m X^{right}`, `m` the middle `h(bc)` power.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JunctionObservation {
    pub family: Family,
    pub left: Sign,
    pub right: Sign,
    pub table: i64,
    pub samples: u64,
    pub min: Option<i64>,
    pub max: Option<i64>,
}

impl JunctionObservation {
    fn record(&mut self, reduction: i64) {
        self.samples += 1;
        self.min = Some(self.min.map_or(reduction, |m| m.min(reduction)));
        self.max = Some(self.max.map_or(reduction, |m| m.max(reduction)));
    }

    /// Table entries stated as exact must match every sample; the free
    /// factor same-sign entries are maxima.
    pub fn is_exact_entry(&self) -> bool {
        !(self.family == Family::FreeFactor && self.left == self.right)
    }

    pub fn agrees(&self) -> bool {
        match (self.min, self.max) {
            (Some(lo), Some(hi)) => {
                if self.is_exact_entry() {
                    lo == self.table && hi == self.table
                } else {
                    hi == self.table
                }
            }
            _ => false,
        }
    }
}

pub const JUNCTION_FAMILIES: [Family; 3] = [
    Family::FreeFactor,
    Family::Conjugate(ConjugateShape::Ii),
    Family::Conjugate(ConjugateShape::Iv),
];

/// Exhaustive survey of `length(X^{s1}) + length(m) + length(X^{s2}) -
/// length(X^{s1} m X^{s2})` over `groups`, `ks`, every nontrivial left
/// factor `e'` and, for conjugate shapes, every normalized conjugator of
/// length at most `max_conjugator_length`.
///
/// Returns the twelve configurations in the order free factor, ii, iv, and
/// within each `(+,+), (+,-), (-,+), (-,-)`.
pub fn junction_observations(
    groups: &[(u64, u64)],
    ks: &[u64],
    max_conjugator_length: usize,
    rule: ConjugatorRule,
) -> Result<Vec<JunctionObservation>> {
    let mut out: Vec<JunctionObservation> = JUNCTION_FAMILIES
        .iter()
        .flat_map(|&family| {
            Sign::ALL.iter().flat_map(move |&left| {
                Sign::ALL.iter().map(move |&right| JunctionObservation {
                    family,
                    left,
                    right,
                    table: junction_reduction(left, right, family),
                    samples: 0,
                    min: None,
                    max: None,
                })
            })
        })
        .collect();
    for &(p, q) in groups {
        for &k in ks {
            let setup = Setup::new(p, q, k)?;
            let g = &setup.group;
            let x_inv = g.invert(&setup.x_power);
            let lx = setup.x_power.length() as i64;
            let lefts: Vec<NormalForm> = (1..=g.transversal_count(FactorSide::Left))
                .map(|t| g.factor_element(FactorSide::Left, t))
                .collect();
            for (fi, family) in JUNCTION_FAMILIES.iter().enumerate() {
                let middles: Vec<NormalForm> = match family {
                    Family::FreeFactor => lefts.clone(),
                    Family::Conjugate(shape) => setup
                        .conjugators(*shape, max_conjugator_length, rule)
                        .iter()
                        .flat_map(|c| lefts.iter().map(move |e| g.conjugate(c, e)))
                        .collect(),
                };
                for m in &middles {
                    for (si, (a, b)) in [(1, 1), (1, -1), (-1, 1), (-1, -1)].into_iter().enumerate() {
                        let xa = if a > 0 { &setup.x_power } else { &x_inv };
                        let xb = if b > 0 { &setup.x_power } else { &x_inv };
                        let w = g.mul(&g.mul(xa, m), xb);
                        let reduction = 2 * lx + m.length() as i64 - w.length() as i64;
                        out[fi * 4 + si].record(reduction);
                    }
                }
            }
        }
    }
    Ok(out)
}
