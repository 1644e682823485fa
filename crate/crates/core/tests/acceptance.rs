//! Acceptance suite. Run with `cargo test -p amalgam --test acceptance`.
//!
//! Prints one PASS/FAIL line per criterion and exits nonzero if any fails.

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use amalgam::audit::{bound_audit, junction_observations, AuditParams, AuditReport, ConjugatorRule, ViolationKind};
use amalgam::bounds::{ConjugateShape, Family};
use amalgam::formal::{
    classify_pair, is_canonical, p_sequence, rewrite_central_powers, BlockLetter, FixedPointShape, FormalWord,
    PairType, Phrase, ShapeDescriptor,
};
use amalgam::search::{verify_314_sweep, SearchBudget};
use amalgam::syntax::parse_two_generator_word;
use amalgam::torus::{CentralPower, TorusKnotGroup};
use amalgam::{AmalgamGroup, FactorSide, NormalForm, Syllable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID: [(u64, u64); 4] = [(2, 3), (2, 5), (3, 4), (3, 5)];
const KS: [u64; 3] = [2, 3, 4];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn run(results: &mut Vec<bool>, id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed < l);
    let pass = out.pass && in_time;
    let limit_text = limit.map_or(String::new(), |l| format!(", limit {l:?}"));
    println!(
        "[{}] {id:>2} {name}: {}{} ({elapsed:.2?}{limit_text})",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        if in_time { "" } else { "; over time limit" },
    );
    results.push(pass);
}

fn sigma_example() -> Outcome {
    let w = parse_two_generator_word("e^8 X^4 e^-2 X^227 e^1 X^-88 e^1 X^1").unwrap();
    let p = p_sequence(&w).unwrap();
    Outcome::new(
        p.values == [4, 227, -88, 1] && p.sigma == 2,
        format!("P = {:?}; sigma = {}", p.values, p.sigma),
    )
}

/// Junction type from the two boundary syllables alone.
fn junction_oracle(g: &AmalgamGroup, x: &NormalForm, y: &NormalForm) -> &'static str {
    match (x.syllables().last(), y.syllables().first()) {
        (Some(a), Some(b)) if a.side == b.side => {
            let k = g.transversal_count(a.side) + 1;
            if (a.transversal + b.transversal) % k == 0 {
                "cancellation"
            } else {
                "amalgamation"
            }
        }
        _ => "none",
    }
}

fn length_laws() -> Outcome {
    let groups = [
        ("Z2*Z3", AmalgamGroup::free_product(2, 3).unwrap()),
        ("Z3*Z5", AmalgamGroup::free_product(3, 5).unwrap()),
        ("T(2,3)", AmalgamGroup::torus_amalgam(2, 3).unwrap()),
        ("T(3,5)", AmalgamGroup::torus_amalgam(3, 5).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0;
    let mut counts: HashMap<&str, usize> = HashMap::new();
    let trials = 10_000;
    for (_, g) in &groups {
        for _ in 0..trials {
            let len = rng.gen_range(0..=8);
            let x = g.random_word(&mut rng, len, None, 3);
            let y = if rng.gen_bool(0.4) && x.length() > 0 {
                // Undo a suffix of x so deep cancellation is common.
                let cut = rng.gen_range(0..x.length());
                let suffix = NormalForm::from_parts(x.syllables()[cut..].to_vec(), 0);
                let len = rng.gen_range(0..=4);
                let extra = g.random_word(&mut rng, len, None, 3);
                g.mul(&g.invert(&suffix), &extra)
            } else {
                let len = rng.gen_range(0..=8);
                g.random_word(&mut rng, len, None, 3)
            };
            let (m, n) = (x.length(), y.length());
            let len = g.mul(&x, &y).length();
            let kind = junction_oracle(g, &x, &y);
            *counts.entry(kind).or_default() += 1;
            let ok = match kind {
                "none" => len == m + n,
                "amalgamation" => len == m + n - 1,
                _ => len + 2 <= m + n,
            } && g.classify_junction(&x, &y) == expected_junction(kind);
            if !ok {
                violations += 1;
            }
        }
    }
    Outcome::new(
        violations == 0,
        format!(
            "{} pairs per group over {}; none {}, amalgamation {}, cancellation {}; {violations} violations",
            trials,
            groups.map(|(n, _)| n).join(", "),
            counts.get("none").unwrap_or(&0),
            counts.get("amalgamation").unwrap_or(&0),
            counts.get("cancellation").unwrap_or(&0),
        ),
    )
}

fn expected_junction(kind: &str) -> amalgam::Junction {
    match kind {
        "none" => amalgam::Junction::None,
        "amalgamation" => amalgam::Junction::Amalgamation,
        _ => amalgam::Junction::Cancellation,
    }
}

/// Concatenate and rescan until no adjacent letters share a factor and no
/// letter is trivial.
fn naive_reduce(mut letters: Vec<(FactorSide, i64)>) -> NormalForm {
    let order = |s: FactorSide| if s == FactorSide::Left { 2 } else { 3 };
    loop {
        let mut changed = false;
        if let Some(i) = letters.iter().position(|&(s, e)| e.rem_euclid(order(s)) == 0) {
            letters.remove(i);
            changed = true;
        } else if let Some(i) = letters.windows(2).position(|w| w[0].0 == w[1].0) {
            letters[i].1 += letters[i + 1].1;
            letters.remove(i + 1);
            changed = true;
        }
        if !changed {
            break;
        }
    }
    NormalForm::from_parts(
        letters
            .into_iter()
            .map(|(s, e)| Syllable::new(s, e.rem_euclid(order(s))))
            .collect(),
        0,
    )
}

type Mat = [i64; 4];

fn mat_mul(a: Mat, b: Mat) -> Mat {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

/// Representative of `A` modulo `+-1`.
fn projective(a: Mat) -> Mat {
    let first = a.iter().find(|&&v| v != 0).copied().unwrap_or(1);
    if first < 0 {
        a.map(|v| -v)
    } else {
        a
    }
}

/// `Z_2 * Z_3 -> PSL(2, Z)`, `e -> S`, `f -> ST`.
fn to_psl(x: &NormalForm) -> Mat {
    const S: Mat = [0, -1, 1, 0];
    const ST: Mat = [0, -1, 1, 1];
    let m = x.syllables().iter().fold([1, 0, 0, 1], |acc, s| {
        let gen = if s.side == FactorSide::Left { S } else { ST };
        (0..s.transversal).fold(acc, |a, _| mat_mul(a, gen))
    });
    projective(m)
}

fn oracle_equivalence() -> Outcome {
    let g = AmalgamGroup::free_product(2, 3).unwrap();
    let words = g.words_up_to(6);
    let letters =
        |w: &NormalForm| -> Vec<(FactorSide, i64)> { w.syllables().iter().map(|s| (s.side, s.transversal)).collect() };
    let mut mismatches = 0;
    let mut pairs = 0;
    for x in &words {
        for y in &words {
            pairs += 1;
            let xy = g.multiply(x, y).unwrap();
            let mut concat = letters(x);
            concat.extend(letters(y));
            // Left fold, one syllable of y at a time.
            let folded = y
                .syllables()
                .iter()
                .fold(x.clone(), |acc, s| g.mul(&acc, &NormalForm::from_parts(vec![*s], 0)));
            if xy != naive_reduce(concat) || xy != folded || to_psl(&xy) != projective(mat_mul(to_psl(x), to_psl(y))) {
                mismatches += 1;
            }
        }
    }
    let images: HashSet<Mat> = words.iter().map(to_psl).collect();
    let faithful = images.len() == words.len();
    Outcome::new(
        mismatches == 0 && faithful,
        format!(
            "{} words, {pairs} pairs; {mismatches} mismatches against rescanning reducer, syllable fold and PSL(2,Z); \
             PSL(2,Z) images distinct: {faithful}",
            words.len()
        ),
    )
}

fn meridian_suite() -> Outcome {
    let mut groups = 0;
    let mut violations = Vec::new();
    for p in 2..=7u64 {
        for q in p + 1..=7 {
            let Ok(t) = TorusKnotGroup::new(p, q) else { continue };
            groups += 1;
            let x = t.meridian();
            let hx = t.seifert_quotient(&x);
            let g = t.quotient_group();
            let ok = t.abelianize(&x) == 1
                && hx.length() == 2
                && (1..=10).all(|k| g.power(&hx, k).length() == 2 * k as usize);
            if !ok {
                violations.push(format!("({p},{q})"));
            }
        }
    }
    Outcome::new(
        violations.is_empty() && groups == 11,
        format!("{groups} coprime pairs; violations: {violations:?}"),
    )
}

fn desk_verification() -> Outcome {
    let budget = SearchBudget::new(12, 24).unwrap();
    let mut runs = 0;
    let mut targets = 0;
    let mut largest_ball = 0;
    let mut found = Vec::new();
    for &(p, q) in &GRID {
        for &k in &KS {
            let reports = verify_314_sweep(p, q, k, 2, budget).unwrap();
            for r in &reports {
                runs += 1;
                for t in &r.reports {
                    targets += 1;
                    largest_ball = largest_ball.max(t.ball_size);
                }
                if !r.consistent() {
                    found.push(format!("({p},{q}) k={k} h(bc)={:?}", r.bc_image));
                }
            }
        }
    }
    Outcome::new(
        found.is_empty(),
        format!(
            "{runs} choices of h(bc), {targets} targets, largest ball {largest_ball}; found: {}",
            if found.is_empty() {
                "none".to_string()
            } else {
                found.join("; ")
            }
        ),
    )
}

fn audits() -> Vec<AuditReport> {
    let mut reports = Vec::new();
    for &(p, q) in &GRID {
        for &k in &KS {
            for family in [
                Family::FreeFactor,
                Family::Conjugate(ConjugateShape::Ii),
                Family::Conjugate(ConjugateShape::Iv),
            ] {
                reports.push(bound_audit(&AuditParams::new(p, q, k, family)).unwrap());
            }
        }
    }
    reports
}

fn bound_audit_criterion(reports: &[AuditReport]) -> Outcome {
    let sampled: u64 = reports.iter().map(|r| r.sampled).sum();
    let skipped: Vec<String> = reports
        .iter()
        .filter(|r| r.skipped.is_some())
        .map(|r| format!("({},{}) k={} {}", r.params.p, r.params.q, r.params.k, r.params.family))
        .collect();
    let min_margin = reports.iter().filter_map(|r| r.min_margin).min();
    let bound_violations: usize = reports
        .iter()
        .map(|r| r.count(ViolationKind::Bound) + r.count(ViolationKind::Consequence))
        .sum();
    let full = reports.iter().all(|r| r.skipped.is_some() || r.sampled == 10_000);

    let mut mirrored: Vec<(u64, u64)> = GRID.to_vec();
    mirrored.extend(GRID.iter().map(|&(p, q)| (q, p)));
    let table = junction_observations(&mirrored, &KS, 3, ConjugatorRule::Junction).unwrap();
    let disagreements: Vec<String> = table
        .iter()
        .filter(|o| !o.agrees())
        .map(|o| {
            format!(
                "{} ({},{}) table {} observed {}..{}",
                o.family,
                o.left,
                o.right,
                o.table,
                show(o.min),
                show(o.max)
            )
        })
        .collect();
    let mut located: Vec<String> = Vec::new();
    for r in reports
        .iter()
        .filter(|r| r.count(ViolationKind::Bound) + r.count(ViolationKind::Consequence) > 0)
    {
        let sides: HashSet<String> = r
            .violations
            .iter()
            .filter(|v| v.kind != ViolationKind::Parity)
            .map(|v| format!("{:?}", v.bc.syllables()[0].side))
            .collect();
        located.push(format!(
            "({},{}) k={} {}: {} bound, {} consequence, min margin {}, h(bc) side {}",
            r.params.p,
            r.params.q,
            r.params.k,
            r.params.family,
            r.count(ViolationKind::Bound),
            r.count(ViolationKind::Consequence),
            show(r.min_margin),
            sides.into_iter().collect::<Vec<_>>().join("/")
        ));
    }
    Outcome::new(
        bound_violations == 0 && full && min_margin.is_some_and(|m| m >= 0) && disagreements.is_empty(),
        format!(
            "{sampled} words, min margin {}, {bound_violations} violations {located:?}; \
             {} junction configurations, disagreements: {disagreements:?}; vacuous: {skipped:?}",
            show(min_margin),
            table.len()
        ),
    )
}

fn show<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn parity_criterion(reports: &[AuditReport]) -> Outcome {
    let checks: u64 = reports.iter().map(|r| r.parity_checks).sum();
    let violations: usize = reports.iter().map(|r| r.count(ViolationKind::Parity)).sum();
    Outcome::new(
        checks > 0 && violations == 0,
        format!("{checks} powers checked, {violations} violations"),
    )
}

/// Order of `x` by repeated multiplication, up to `cap`.
fn brute_order(g: &AmalgamGroup, x: &NormalForm, cap: u64) -> Option<u64> {
    let mut acc = x.clone();
    for n in 1..=cap {
        if acc.is_identity() {
            return Some(n);
        }
        acc = g.mul(&acc, x);
    }
    None
}

fn central_powers() -> Outcome {
    let t = TorusKnotGroup::new(2, 3).unwrap();
    let named = [
        t.central_power(&t.u()) == CentralPower::Finite(2),
        t.central_power(&t.center_element()) == CentralPower::Finite(1),
        t.central_power(&t.meridian()) == CentralPower::Infinite,
    ];
    let mut checked = 0;
    let mut mismatches = 0;
    let knot = t.knot_group();
    for w in knot.words_up_to(5) {
        for tail in -2..=2 {
            let b = knot.mul(&w, &knot.tail_element(tail));
            checked += 1;
            let brute = brute_order(t.quotient_group(), &t.seifert_quotient(&b), 64);
            let expect = brute.map_or(CentralPower::Infinite, CentralPower::Finite);
            if t.central_power(&b) != expect {
                mismatches += 1;
            }
        }
    }
    Outcome::new(
        named.iter().all(|&b| b) && mismatches == 0,
        format!(
            "u -> 2, d -> 1, meridian -> Infinite: {}; {checked} elements cross-checked against repeated powers, {mismatches} mismatches",
            named.iter().all(|&b| b)
        ),
    )
}

fn random_formal_word<R: Rng>(rng: &mut R, m: u32) -> FormalWord {
    let phrases = (0..rng.gen_range(0..=8))
        .map(|_| {
            if rng.gen_bool(0.6) {
                Phrase::Power(rng.gen_range(-12..=12))
            } else {
                let letters = (0..rng.gen_range(1..=3))
                    .map(|_| {
                        let e = rng.gen_range(-2..=2);
                        if rng.gen_bool(0.5) {
                            BlockLetter::Ac0(e)
                        } else {
                            BlockLetter::CTilde(e)
                        }
                    })
                    .collect();
                Phrase::Block(letters)
            }
        })
        .collect();
    FormalWord::new(phrases, m)
}

fn rewrite_criterion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = 0;
    let mut shapes: HashMap<&str, usize> = HashMap::new();
    let trials = 10_000;
    for i in 0..trials {
        let m = [2, 3, 5][i % 3];
        let w = random_formal_word(&mut rng, m);
        let r = rewrite_central_powers(&w);
        let again = rewrite_central_powers(&r.word);
        let has_power = r.word.phrases().iter().any(|p| matches!(p, Phrase::Power(_)));
        let shape = r.word.shape();
        *shapes
            .entry(match shape {
                FixedPointShape::CentralPower(_) => "central power",
                FixedPointShape::SingleBlock => "single block",
                FixedPointShape::Reduced => "reduced",
            })
            .or_default() += 1;
        let shape_ok = if has_power {
            shape == FixedPointShape::Reduced
                && r.word
                    .phrases()
                    .iter()
                    .all(|p| !matches!(p, Phrase::Power(e) if e % m as i64 == 0))
        } else {
            matches!(shape, FixedPointShape::CentralPower(_) | FixedPointShape::SingleBlock)
        };
        let ok = again.steps == 0
            && again.word == r.word
            && is_canonical(&r.word)
            && shape_ok
            && weight(&r.word).0 == weight(&w).0
            && match weight(&w) {
                (total, false) if total % m as i64 == 0 => shape == FixedPointShape::CentralPower(total / m as i64),
                _ => true,
            };
        if !ok {
            failures += 1;
        }
    }
    Outcome::new(
        failures == 0,
        format!(
            "{trials} words, m in {{2,3,5}}; fixed points: {} central power, {} single block, {} reduced; {failures} failures",
            shapes.get("central power").unwrap_or(&0),
            shapes.get("single block").unwrap_or(&0),
            shapes.get("reduced").unwrap_or(&0),
        ),
    )
}

/// `(bc exponent sum + m * c~ exponent sum, has an ac0 letter)`.
fn weight(w: &FormalWord) -> (i64, bool) {
    let m = w.m() as i64;
    let mut total = 0;
    let mut has_a = false;
    for p in w.phrases() {
        match p {
            Phrase::Power(e) => total += e,
            Phrase::Block(letters) => {
                for l in letters {
                    match l {
                        BlockLetter::CTilde(e) => total += m * e,
                        BlockLetter::Ac0(e) => has_a |= *e != 0,
                    }
                }
            }
        }
    }
    (total, has_a)
}

fn classification() -> Outcome {
    use FactorSide::{Left as A, Right as B};
    let alt = ShapeDescriptor::alternating;
    let id = ShapeDescriptor::identity();
    let mut cases: Vec<(ShapeDescriptor, ShapeDescriptor, PairType)> = vec![
        (alt(A, 1), alt(B, 1), PairType::P1),
        (id, alt(A, 2), PairType::P2),
        (alt(B, 1), alt(A, 2), PairType::P3),
        (alt(B, 1), alt(A, 3), PairType::P4),
    ];
    for k in 1..=4 {
        cases.push((alt(A, 1), alt(A, 2 * k + 1), PairType::Q2));
        cases.push((alt(A, 1), alt(A, 2 * k), PairType::Q3));
        cases.push((alt(A, 1), alt(B, 2 * k), PairType::Q4));
        cases.push((alt(A, 1), alt(B, 2 * k + 1), PairType::Q5));
    }
    let mut wrong = Vec::new();
    for &(g1, g2, expect) in &cases {
        for (a, b) in [(g1, g2), (g2, g1)] {
            if classify_pair(a, b) != expect {
                wrong.push(format!("{a:?},{b:?}"));
            }
        }
        if expect == PairType::Q4 && classify_pair(g1, g2.inverted()) != PairType::Q3 {
            wrong.push(format!("inverting {g2:?}"));
        }
    }
    let covered: HashSet<PairType> = cases.iter().map(|c| c.2).collect();

    // Concrete elements in Z_3 * Z_5 classify through their silhouettes.
    let g = AmalgamGroup::free_product(3, 5).unwrap();
    let words = g.words_up_to(5);
    let mut concrete = 0;
    for x in &words {
        for y in &words {
            let t = classify_pair(ShapeDescriptor::of(x), ShapeDescriptor::of(y));
            if t == PairType::Q4 {
                concrete += 1;
                if classify_pair(ShapeDescriptor::of(x), ShapeDescriptor::of(&g.invert(y))) != PairType::Q3
                    && classify_pair(ShapeDescriptor::of(&g.invert(x)), ShapeDescriptor::of(y)) != PairType::Q3
                {
                    wrong.push(format!("concrete {x:?} {y:?}"));
                }
            }
        }
    }
    Outcome::new(
        wrong.is_empty() && covered.len() == 8 && concrete > 0,
        format!(
            "{} descriptor pairs covering {} types, {concrete} concrete q4 pairs inverted to q3; wrong: {wrong:?}",
            cases.len(),
            covered.len()
        ),
    )
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut results = Vec::new();
    let ms = Duration::from_millis;
    run(&mut results, 1, "sigma worked example", Some(ms(1)), sigma_example);
    run(&mut results, 2, "length laws", Some(ms(5_000)), length_laws);
    run(
        &mut results,
        3,
        "normal-form oracle equivalence",
        Some(ms(30_000)),
        oracle_equivalence,
    );
    run(&mut results, 4, "meridian suite", None, meridian_suite);
    run(
        &mut results,
        5,
        "bc and x^k reach no x^j within budget (12,24)",
        Some(ms(600_000)),
        desk_verification,
    );
    let start = Instant::now();
    let reports = audits();
    println!("      bound audits sampled in {:.2?}", start.elapsed());
    run(&mut results, 6, "bound audit and junction table", None, || {
        bound_audit_criterion(&reports)
    });
    run(&mut results, 7, "parity of h(bc) powers and h(x)^j", None, || {
        parity_criterion(&reports)
    });
    run(&mut results, 8, "central powers in T(2,3)", None, central_powers);
    run(&mut results, 9, "central-power rewriting", None, rewrite_criterion);
    run(&mut results, 10, "generating-pair classification", None, classification);
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
