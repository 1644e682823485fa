//! Lower bounds on the normal-form length of words in `e'` (or a conjugate
//! `g e' g^{-1}`) and `X = h(x)^k` inside `Z_p * Z_q`.
//!
//! Each bound is evaluated twice: once by walking the inequality chain from
//! the uncancelled length and subtracting the junction reductions, and once
//! by the closed form. Tests hold the two routes equal.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formal::PSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConjugateShape {
    /// `g = e'_1 ... f'_n`
    Ii,
    /// `g = f'_1 ... f'_n`
    Iv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `h(bc) = e'` lies in a free factor.
    FreeFactor,
    /// `h(bc) = g e' g^{-1}`.
    Conjugate(ConjugateShape),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::FreeFactor => f.write_str("free-factor"),
            Family::Conjugate(ConjugateShape::Ii) => f.write_str("conjugate-ii"),
            Family::Conjugate(ConjugateShape::Iv) => f.write_str("conjugate-iv"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SigmaBranch {
    Even,
    /// `sigma` odd, more `X^+ . X^-` junctions than `X^- . X^+`.
    OddMorePlusMinus,
    /// `sigma` odd, more `X^- . X^+` junctions than `X^+ . X^-`.
    OddMoreMinusPlus,
}

impl SigmaBranch {
    /// Branches consistent with a sign sequence. Signs alternate, so with
    /// `sigma` odd the two mixed junction counts differ by exactly one and
    /// a single branch comes back; both odd branches are returned only for a
    /// tie, which cannot arise from a real sequence.
    pub fn candidates(p: &PSequence) -> Vec<SigmaBranch> {
        if p.sigma.is_multiple_of(2) {
            return vec![SigmaBranch::Even];
        }
        let (mut plus_minus, mut minus_plus) = (0usize, 0usize);
        for (a, b) in p.junction_signs() {
            match (a > 0, b > 0) {
                (true, false) => plus_minus += 1,
                (false, true) => minus_plus += 1,
                _ => {}
            }
        }
        match plus_minus.cmp(&minus_plus) {
            std::cmp::Ordering::Greater => vec![SigmaBranch::OddMorePlusMinus],
            std::cmp::Ordering::Less => vec![SigmaBranch::OddMoreMinusPlus],
            std::cmp::Ordering::Equal => {
                vec![SigmaBranch::OddMorePlusMinus, SigmaBranch::OddMoreMinusPlus]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundCase {
    pub family: Family,
    pub branch: SigmaBranch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub k: u64,
    pub j: u64,
    /// Length of the conjugator `g`; conjugate family only.
    pub n: Option<u64>,
    pub sigma: u64,
    /// Lengths of the first and last `e'` phrases; default 0.
    pub eps_first: Option<u64>,
    pub eps_last: Option<u64>,
}

impl BoundInputs {
    pub fn new(k: u64, j: u64, sigma: u64) -> Self {
        BoundInputs {
            k,
            j,
            n: None,
            sigma,
            eps_first: None,
            eps_last: None,
        }
    }

    pub fn with_n(mut self, n: u64) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_eps(mut self, first: u64, last: u64) -> Self {
        self.eps_first = Some(first);
        self.eps_last = Some(last);
        self
    }

    fn eps(&self) -> i64 {
        (self.eps_first.unwrap_or(0) + self.eps_last.unwrap_or(0)) as i64
    }

    fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidParameters(format!(
                "k must be at least 2, got {}",
                self.k
            )));
        }
        if self.j < 1 {
            return Err(Error::InvalidParameters("j must be at least 1".into()));
        }
        if self.sigma > self.j - 1 {
            return Err(Error::InvalidParameters(format!(
                "sigma = {} exceeds j - 1 = {}",
                self.sigma,
                self.j - 1
            )));
        }
        if self.n == Some(0) {
            return Err(Error::InvalidParameters("n must be at least 1".into()));
        }
        Ok(())
    }
}

/// Uncancelled length with every `|p_{2i}| = 1` and interior `e'` phrases of
/// length one (free factor) or `2n + 1` (conjugate):
/// `2kj + (j - 1) * phrase + eps_first + eps_last`.
pub fn uncancelled_length(inputs: &BoundInputs) -> Result<i64> {
    inputs.validate()?;
    let (k, j) = (inputs.k as i64, inputs.j as i64);
    let phrase = inputs.n.map_or(1, |n| 2 * n as i64 + 1);
    Ok(2 * k * j + (j - 1) * phrase + inputs.eps())
}

/// Uncancelled length of a concrete word: `sum |p_{2i}| * 2k + sum eps`.
pub fn uncancelled_length_exact(k: u64, p: &[i64], odd_phrase_lengths: &[u64]) -> i64 {
    let x: i64 = p.iter().map(|v| v.abs() * 2 * k as i64).sum();
    x + odd_phrase_lengths.iter().sum::<u64>() as i64
}

/// The steps of one bound: `leading` keeps the end-phrase lengths, `closed`
/// is the stated closed form and `weakest` the final simplification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundChain {
    pub leading: i64,
    pub closed: i64,
    pub weakest: i64,
}

fn check_case(case: &BoundCase, inputs: &BoundInputs) -> Result<()> {
    inputs.validate()?;
    match (case.family, inputs.n) {
        (Family::FreeFactor, Some(_)) => return Err(Error::CaseMismatch("n given for the free-factor family".into())),
        (Family::Conjugate(_), None) => return Err(Error::CaseMismatch("the conjugate family needs n".into())),
        _ => {}
    }
    let odd = inputs.sigma % 2 == 1;
    if odd == (case.branch == SigmaBranch::Even) {
        return Err(Error::CaseMismatch(format!(
            "branch {:?} does not match sigma = {}",
            case.branch, inputs.sigma
        )));
    }
    Ok(())
}

pub fn bound_chain(case: &BoundCase, inputs: &BoundInputs) -> Result<BoundChain> {
    check_case(case, inputs)?;
    let (k, j, s) = (inputs.k as i64, inputs.j as i64, inputs.sigma as i64);
    let same_sign = j - 1 - s;
    Ok(match case.family {
        Family::FreeFactor => {
            let start = 2 * k * j + (j - 1);
            // Mixed junctions reduce by 0 or 2; same-sign ones by at most 5.
            // The end phrases are charged -1, -2 or 0 depending on branch.
            let (mixed, ends) = match case.branch {
                SigmaBranch::Even => (s, 1),
                SigmaBranch::OddMorePlusMinus => (s - 1, 2),
                SigmaBranch::OddMoreMinusPlus => (s - 1 + 2, 0),
            };
            let leading = start + inputs.eps() - mixed - 5 * same_sign;
            let substituted = start - ends - mixed - 5 * same_sign;
            let closed = 2 * k * j - 4 * j + 4 * s + 3;
            debug_assert_eq!(substituted, closed);
            BoundChain {
                leading,
                closed: substituted,
                weakest: 2 * j * (k - 2) + 3,
            }
        }
        Family::Conjugate(shape) => {
            let n = inputs.n.unwrap() as i64;
            let start = 2 * k * j + (j - 1) * (2 * n + 1);
            let mixed = match (shape, case.branch) {
                (_, SigmaBranch::Even) => s,
                (ConjugateShape::Ii, SigmaBranch::OddMorePlusMinus)
                | (ConjugateShape::Iv, SigmaBranch::OddMoreMinusPlus) => s - 1,
                (ConjugateShape::Ii, SigmaBranch::OddMoreMinusPlus)
                | (ConjugateShape::Iv, SigmaBranch::OddMorePlusMinus) => s - 1 + 2,
            };
            let leading = start - mixed - same_sign;
            BoundChain {
                leading,
                closed: leading,
                weakest: 2 * k * j + 2 * n * (j - 1) - 1,
            }
        }
    })
}

/// Closed-form lower bound for the case.
///
/// Free factor: `2kj - 4j + 4 sigma + 3` on every branch.
/// Conjugate: `2kj + 2n(j - 1) + delta` with `delta` in `{-1, 0, 1}`.
pub fn lower_bound(case: &BoundCase, inputs: &BoundInputs) -> Result<i64> {
    check_case(case, inputs)?;
    let (k, j, s) = (inputs.k as i64, inputs.j as i64, inputs.sigma as i64);
    Ok(match case.family {
        Family::FreeFactor => 2 * k * j - 4 * j + 4 * s + 3,
        Family::Conjugate(shape) => {
            let n = inputs.n.unwrap() as i64;
            let delta = match (shape, case.branch) {
                (_, SigmaBranch::Even) => 0,
                (ConjugateShape::Ii, SigmaBranch::OddMorePlusMinus) => 1,
                (ConjugateShape::Ii, SigmaBranch::OddMoreMinusPlus) => -1,
                (ConjugateShape::Iv, SigmaBranch::OddMorePlusMinus) => -1,
                (ConjugateShape::Iv, SigmaBranch::OddMoreMinusPlus) => 1,
            };
            2 * k * j + 2 * n * (j - 1) + delta
        }
    })
}

/// Bound for a concrete exponent sequence; on a branch tie the smaller of
/// the two odd-branch bounds is used.
pub fn lower_bound_for_sequence(family: Family, k: u64, n: Option<u64>, p: &PSequence) -> Result<i64> {
    let inputs = BoundInputs {
        k,
        j: p.j() as u64,
        n,
        sigma: p.sigma as u64,
        eps_first: None,
        eps_last: None,
    };
    SigmaBranch::candidates(p)
        .into_iter()
        .map(|branch| lower_bound(&BoundCase { family, branch }, &inputs))
        .try_fold(i64::MAX, |acc, b| b.map(|b| acc.min(b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(v: i64) -> Sign {
        if v < 0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub const ALL: [Sign; 2] = [Sign::Plus, Sign::Minus];
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Largest length reduction at the junction `X^{left} (middle) X^{right}`.
pub fn junction_reduction(left: Sign, right: Sign, family: Family) -> i64 {
    use Sign::{Minus, Plus};
    match (family, left, right) {
        (Family::FreeFactor, Plus, Plus) | (Family::FreeFactor, Minus, Minus) => 5,
        (Family::FreeFactor, Plus, Minus) => 0,
        (Family::FreeFactor, Minus, Plus) => 2,
        (Family::Conjugate(_), Plus, Plus) | (Family::Conjugate(_), Minus, Minus) => 1,
        (Family::Conjugate(ConjugateShape::Ii), Plus, Minus) => 0,
        (Family::Conjugate(ConjugateShape::Ii), Minus, Plus) => 2,
        (Family::Conjugate(ConjugateShape::Iv), Plus, Minus) => 2,
        (Family::Conjugate(ConjugateShape::Iv), Minus, Plus) => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BRANCHES: [SigmaBranch; 3] = [
        SigmaBranch::Even,
        SigmaBranch::OddMorePlusMinus,
        SigmaBranch::OddMoreMinusPlus,
    ];

    fn free(branch: SigmaBranch) -> BoundCase {
        BoundCase {
            family: Family::FreeFactor,
            branch,
        }
    }

    fn conj(shape: ConjugateShape, branch: SigmaBranch) -> BoundCase {
        BoundCase {
            family: Family::Conjugate(shape),
            branch,
        }
    }

    #[test]
    fn uncancelled_examples() {
        assert_eq!(
            uncancelled_length(&BoundInputs::new(2, 1, 0).with_eps(0, 0)).unwrap(),
            4
        );
        assert_eq!(
            uncancelled_length(&BoundInputs::new(2, 2, 0).with_eps(0, 0)).unwrap(),
            9
        );
        assert_eq!(
            uncancelled_length(&BoundInputs::new(3, 1, 0).with_eps(1, 0)).unwrap(),
            7
        );
        assert_eq!(uncancelled_length(&BoundInputs::new(2, 2, 0).with_n(1)).unwrap(), 11);
        assert_eq!(
            uncancelled_length_exact(2, &[4, 227, -88, 1], &[1, 1, 1, 1, 1]),
            4 * 320 + 5
        );
    }

    #[test]
    fn free_factor_examples() {
        let b = lower_bound(&free(SigmaBranch::Even), &BoundInputs::new(2, 1, 0)).unwrap();
        assert_eq!(b, 3);
        let chain = bound_chain(&free(SigmaBranch::Even), &BoundInputs::new(2, 1, 0)).unwrap();
        assert_eq!(chain.weakest, 3);
    }

    #[test]
    fn conjugate_examples() {
        let even = conj(ConjugateShape::Ii, SigmaBranch::Even);
        assert_eq!(lower_bound(&even, &BoundInputs::new(2, 2, 0).with_n(1)).unwrap(), 10);
        let odd = conj(ConjugateShape::Iv, SigmaBranch::OddMorePlusMinus);
        assert_eq!(lower_bound(&odd, &BoundInputs::new(2, 2, 1).with_n(1)).unwrap(), 9);
    }

    #[test]
    fn free_factor_branches_share_a_closed_form() {
        for k in 2..6 {
            for j in 1..8 {
                for s in 0..j {
                    let inputs = BoundInputs::new(k, j, s);
                    let mut values = Vec::new();
                    for branch in BRANCHES {
                        if let Ok(v) = lower_bound(&free(branch), &inputs) {
                            let chain = bound_chain(&free(branch), &inputs).unwrap();
                            assert_eq!(chain.closed, v);
                            assert!(chain.leading >= chain.closed);
                            assert!(chain.closed >= chain.weakest);
                            values.push(v);
                        }
                    }
                    assert!(!values.is_empty());
                    let (k, j, s) = (k as i64, j as i64, s as i64);
                    assert!(values.iter().all(|&v| v == 2 * k * j - 4 * j + 4 * s + 3));
                }
            }
        }
    }

    #[test]
    fn conjugate_chain_matches_closed_form() {
        for shape in [ConjugateShape::Ii, ConjugateShape::Iv] {
            for k in 2..5 {
                for j in 1..7 {
                    for s in 0..j {
                        for n in 1..5 {
                            let inputs = BoundInputs::new(k, j, s).with_n(n);
                            for branch in BRANCHES {
                                let case = conj(shape, branch);
                                let Ok(v) = lower_bound(&case, &inputs) else {
                                    continue;
                                };
                                let chain = bound_chain(&case, &inputs).unwrap();
                                assert_eq!(chain.closed, v, "{case:?} {inputs:?}");
                                assert!(v >= chain.weakest);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn bounds_are_monotone_in_j() {
        for k in 2..6 {
            let mut prev = i64::MIN;
            for j in 1..20 {
                let b = lower_bound(&free(SigmaBranch::Even), &BoundInputs::new(k, j, 0)).unwrap();
                assert!(b >= prev);
                prev = b;
            }
            for shape in [ConjugateShape::Ii, ConjugateShape::Iv] {
                let mut prev = i64::MIN;
                for j in 1..20 {
                    let inputs = BoundInputs::new(k, j, 0).with_n(2);
                    let b = lower_bound(&conj(shape, SigmaBranch::Even), &inputs).unwrap();
                    assert!(b >= prev);
                    prev = b;
                }
            }
        }
    }

    #[test]
    fn mismatched_cases_are_rejected() {
        let inputs = BoundInputs::new(2, 2, 0).with_n(1);
        assert!(matches!(
            lower_bound(&free(SigmaBranch::Even), &inputs),
            Err(Error::CaseMismatch(_))
        ));
        assert!(matches!(
            lower_bound(&conj(ConjugateShape::Ii, SigmaBranch::Even), &BoundInputs::new(2, 2, 0)),
            Err(Error::CaseMismatch(_))
        ));
        assert!(matches!(
            lower_bound(&free(SigmaBranch::Even), &BoundInputs::new(2, 3, 1)),
            Err(Error::CaseMismatch(_))
        ));
        assert!(lower_bound(&free(SigmaBranch::Even), &BoundInputs::new(1, 2, 0)).is_err());
        assert!(lower_bound(&free(SigmaBranch::Even), &BoundInputs::new(2, 2, 2)).is_err());
    }

    #[test]
    fn branch_selection() {
        let p = PSequence::from_values(vec![1, -1]);
        assert_eq!(SigmaBranch::candidates(&p), vec![SigmaBranch::OddMorePlusMinus]);
        let p = PSequence::from_values(vec![-3, 2, -1, 4]);
        assert_eq!(SigmaBranch::candidates(&p), vec![SigmaBranch::OddMoreMinusPlus]);
        let p = PSequence::from_values(vec![4, 227, -88, 1]);
        assert_eq!(SigmaBranch::candidates(&p), vec![SigmaBranch::Even]);
    }

    #[test]
    fn junction_table_values() {
        use Sign::{Minus, Plus};
        assert_eq!(junction_reduction(Plus, Plus, Family::FreeFactor), 5);
        assert_eq!(junction_reduction(Minus, Minus, Family::FreeFactor), 5);
        assert_eq!(junction_reduction(Plus, Minus, Family::FreeFactor), 0);
        assert_eq!(junction_reduction(Minus, Plus, Family::FreeFactor), 2);
        for shape in [ConjugateShape::Ii, ConjugateShape::Iv] {
            assert_eq!(junction_reduction(Plus, Plus, Family::Conjugate(shape)), 1);
            assert_eq!(junction_reduction(Minus, Minus, Family::Conjugate(shape)), 1);
        }
    }
}
