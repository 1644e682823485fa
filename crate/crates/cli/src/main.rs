//! `amalgam`: command-line front end to the engine.
//!
//! Words come from positional arguments, or from standard input (one word
//! per line) when the arguments are omitted or given as `-`.
//!
//! Exit status: 0 on success, 1 on usage or input errors, 2 when a
//! verification turns up a counterexample.
//!
//! With `--out structured` every command prints JSON records, one per
//! line, each tagged with a `record` field. Keys are sorted, so identical
//! runs give byte-identical output.

use std::io::{self, BufRead, Write};
use std::process::ExitCode;

use amalgam::audit::{bound_audit, junction_observations, AuditParams, ConjugatorRule, ViolationKind, DEFAULT_SEED};
use amalgam::bounds::{
    bound_chain, lower_bound, lower_bound_for_sequence, uncancelled_length, BoundCase, BoundInputs, ConjugateShape,
    Family, SigmaBranch,
};
use amalgam::formal::{classify_pair, p_sequence, rewrite_central_powers, FixedPointShape, ShapeDescriptor};
use amalgam::search::{
    enumerate_ball, evaluate_expression, membership, transversal_generation_check, verify_314, verify_314_sweep,
    Letter, SearchBudget, SearchReport, SearchStatus, Verify314Report,
};
use amalgam::syntax::{format_word, parse_formal_word, parse_two_generator_word, read_word};
use amalgam::torus::CentralPower;
use amalgam::{AmalgamGroup, FactorSide, NormalForm, TorusKnotGroup};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Engine(#[from] amalgam::Error),
    #[error("parse error: {0}")]
    Parse(#[from] amalgam::ParseError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "amalgam",
    version,
    about = "Normal forms, torus knot groups and word-length bounds"
)]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Options {
    /// First factor order (torus knot parameter p)
    #[arg(long, global = true, default_value_t = 2)]
    p: u64,
    /// Second factor order (torus knot parameter q)
    #[arg(long, global = true, default_value_t = 3)]
    q: u64,
    /// Group for plain word commands: Z_p * Z_q or T(p,q)
    #[arg(long, global = true, value_enum, default_value_t = GroupKind::Free)]
    group: GroupKind,
    #[arg(long, global = true, default_value_t = 2)]
    k: u64,
    /// Central power for formal words: (bc)^m = c~
    #[arg(long, global = true, default_value_t = 2)]
    m: u32,
    /// Search budget: expression letters, normal length
    #[arg(long, global = true, default_value = "12,12", value_parser = parse_budget)]
    budget: SearchBudget,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Text)]
    out: OutputMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupKind {
    Free,
    Torus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputMode {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    FreeFactor,
    ConjugateIi,
    ConjugateIv,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::FreeFactor => Family::FreeFactor,
            FamilyArg::ConjugateIi => Family::Conjugate(ConjugateShape::Ii),
            FamilyArg::ConjugateIv => Family::Conjugate(ConjugateShape::Iv),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BranchArg {
    Even,
    PlusMinus,
    MinusPlus,
}

impl From<BranchArg> for SigmaBranch {
    fn from(b: BranchArg) -> SigmaBranch {
        match b {
            BranchArg::Even => SigmaBranch::Even,
            BranchArg::PlusMinus => SigmaBranch::OddMorePlusMinus,
            BranchArg::MinusPlus => SigmaBranch::OddMoreMinusPlus,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RuleArg {
    Junction,
    Literal,
}

impl From<RuleArg> for ConjugatorRule {
    fn from(r: RuleArg) -> ConjugatorRule {
        match r {
            RuleArg::Junction => ConjugatorRule::Junction,
            RuleArg::Literal => ConjugatorRule::Literal,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for FactorSide {
    fn from(s: SideArg) -> FactorSide {
        match s {
            SideArg::Left => FactorSide::Left,
            SideArg::Right => FactorSide::Right,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normal form of a word
    Normalize { word: Option<String> },
    /// Product of two words
    Mul { x: Option<String>, y: Option<String> },
    /// Inverse of a word
    Invert { word: Option<String> },
    /// Syllable length of a word
    Length { word: Option<String> },
    /// Meridian of T(p,q), its Seifert quotient and abelianization
    Meridian,
    /// Image of a T(p,q) word in Z_p * Z_q
    Quotient { word: Option<String> },
    /// Least m with b^m central in T(p,q)
    CenterPower { word: Option<String> },
    /// Peripheral basis built from a T(p,q) element
    Basis { word: Option<String> },
    /// Exponent sequence of the second generator and its sign changes
    Sigma { word: Option<String> },
    /// Rewrite multiples of m in a formal word to central powers
    Rewrite312 { word: Option<String> },
    /// Generating-pair type of two words
    ClassifyPair { x: Option<String>, y: Option<String> },
    /// Length lower bound, from parameters or from a word in e and X
    Bound(BoundArgs),
    /// Randomized audit of the length lower bounds
    BoundAudit(AuditArgs),
    /// Junction reductions observed by exhaustive computation
    Junctions(JunctionArgs),
    /// Ball of the subgroup generated by the given words
    Ball {
        generators: Vec<String>,
        /// Print every element of the ball
        #[arg(long)]
        elements: bool,
    },
    /// Search for a target in the subgroup generated by --gen words
    Member {
        target: Option<String>,
        #[arg(long = "gen", required = true)]
        generators: Vec<String>,
    },
    /// Search for h(x)^j, 1 <= j < k, in the subgroup generated by h(bc) and h(x)^k
    #[command(name = "verify-314")]
    Verify314(VerifyArgs),
    /// Check that the left transversals of the generators, with C, generate the left factor
    GenCheck { generators: Vec<String> },
}

#[derive(Args, Debug)]
struct BoundArgs {
    /// Word in e and X; j and sigma are read from it
    word: Option<String>,
    #[arg(long, value_enum, default_value_t = FamilyArg::FreeFactor)]
    family: FamilyArg,
    #[arg(long)]
    branch: Option<BranchArg>,
    #[arg(long)]
    j: Option<u64>,
    #[arg(long, default_value_t = 0)]
    sigma: u64,
    /// Conjugator length; conjugate families only
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    eps_first: Option<u64>,
    #[arg(long)]
    eps_last: Option<u64>,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::FreeFactor)]
    family: FamilyArg,
    #[arg(long, default_value_t = 4)]
    max_j: u64,
    #[arg(long, default_value_t = 3)]
    max_exponent: i64,
    #[arg(long, default_value_t = 4)]
    max_conjugator: usize,
    #[arg(long, value_enum, default_value_t = RuleArg::Junction)]
    rule: RuleArg,
    /// Factor holding h(bc) for the free-factor family; both when omitted
    #[arg(long, value_enum)]
    factor: Option<SideArg>,
    /// Print at most this many violation records
    #[arg(long, default_value_t = 20)]
    show: usize,
}

#[derive(Args, Debug)]
struct JunctionArgs {
    #[arg(long, default_value_t = 3)]
    max_conjugator: usize,
    #[arg(long, value_enum, default_value_t = RuleArg::Junction)]
    rule: RuleArg,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Use h(bc) = g e' g^-1 with this factor element e' (e.g. `e:1`)
    #[arg(long)]
    element: Option<String>,
    /// Conjugator g for --element
    #[arg(long)]
    conjugator: Option<String>,
    /// Without --element: sweep all conjugates of factor elements by g of
    /// at most this length
    #[arg(long, default_value_t = 0)]
    max_conjugator: usize,
}

fn parse_budget(s: &str) -> std::result::Result<SearchBudget, String> {
    let (l, n) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `L,N`, found `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    SearchBudget::new(parse(l)?, parse(n)?).map_err(|e| e.to_string())
}

/// Output sink: text lines or JSON records.
struct Emitter {
    mode: OutputMode,
    out: io::BufWriter<io::StdoutLock<'static>>,
}

impl Emitter {
    fn emit(&mut self, text: impl AsRef<str>, record: Value) -> Result<()> {
        match self.mode {
            OutputMode::Text => writeln!(self.out, "{}", text.as_ref())?,
            OutputMode::Structured => writeln!(self.out, "{}", serde_json::to_string(&record)?)?,
        }
        Ok(())
    }

    fn text(&mut self, text: impl AsRef<str>) -> Result<()> {
        if self.mode == OutputMode::Text {
            writeln!(self.out, "{}", text.as_ref())?;
        }
        Ok(())
    }

    fn header(&mut self, command: &str, opts: &Options, extra: Value) -> Result<()> {
        let mut record = json!({
            "record": "header",
            "command": command,
            "p": opts.p,
            "q": opts.q,
            "k": opts.k,
            "seed": opts.seed,
            "budget": opts.budget.to_string(),
        });
        if let (Value::Object(r), Value::Object(e)) = (&mut record, extra) {
            r.extend(e);
        }
        let text = format!(
            "# amalgam {command}: p={} q={} k={} seed={} budget={}",
            opts.p, opts.q, opts.k, opts.seed, opts.budget
        );
        self.emit(text, record)
    }
}

/// Positional words, falling back to standard input lines.
fn words(args: Vec<Option<String>>) -> Result<Vec<String>> {
    let missing = args.iter().any(|a| a.as_deref().is_none_or(|s| s == "-"));
    let mut stdin_lines = if missing { read_stdin_lines()? } else { Vec::new() }.into_iter();
    args.into_iter()
        .map(|a| match a {
            Some(s) if s != "-" => Ok(s),
            _ => stdin_lines
                .next()
                .ok_or_else(|| CliError::Usage("missing word argument (none on standard input either)".into())),
        })
        .collect()
}

fn word(arg: Option<String>) -> Result<String> {
    Ok(words(vec![arg])?.remove(0))
}

fn word_list(args: Vec<String>) -> Result<Vec<String>> {
    if args.is_empty() || args == ["-"] {
        read_stdin_lines()
    } else {
        Ok(args)
    }
}

fn read_stdin_lines() -> Result<Vec<String>> {
    let mut lines = Vec::new();
    for line in io::stdin().lock().lines() {
        let line = line?;
        if !line.trim().is_empty() {
            lines.push(line.trim().to_string());
        }
    }
    Ok(lines)
}

fn group(opts: &Options) -> Result<AmalgamGroup> {
    Ok(match opts.group {
        GroupKind::Free => AmalgamGroup::free_product(opts.p, opts.q)?,
        GroupKind::Torus => AmalgamGroup::torus_amalgam(opts.p, opts.q)?,
    })
}

fn torus(opts: &Options) -> Result<TorusKnotGroup> {
    Ok(TorusKnotGroup::new(opts.p, opts.q)?)
}

fn fmt(g: &AmalgamGroup, x: &NormalForm) -> String {
    format_word(x, g.labels())
}

fn element_record(kind: &str, g: &AmalgamGroup, x: &NormalForm) -> Value {
    json!({ "record": kind, "word": fmt(g, x), "length": x.length() })
}

fn format_expression(letters: &[Letter]) -> String {
    if letters.is_empty() {
        return "1".into();
    }
    letters.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let mut em = Emitter {
        mode: cli.opts.out,
        out: io::BufWriter::new(io::stdout().lock()),
    };
    let status = run(cli, &mut em);
    let flushed = em.out.flush();
    match (status, flushed) {
        (Ok(code), Ok(())) => ExitCode::from(code),
        (Err(e), _) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        (_, Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli, em: &mut Emitter) -> Result<u8> {
    let opts = cli.opts;
    match cli.command {
        Command::Normalize { word: w } => {
            let g = group(&opts)?;
            let x = read_word(&g, &word(w)?)?;
            em.emit(
                format!("{} (length {})", fmt(&g, &x), x.length()),
                element_record("normal_form", &g, &x),
            )?;
        }
        Command::Mul { x, y } => {
            let g = group(&opts)?;
            let ws = words(vec![x, y])?;
            let (x, y) = (read_word(&g, &ws[0])?, read_word(&g, &ws[1])?);
            let junction = g.classify_junction(&x, &y);
            let xy = g.multiply(&x, &y)?;
            let mut record = element_record("product", &g, &xy);
            record["junction"] = json!(format!("{junction:?}"));
            em.emit(
                format!("{} (length {}, junction {junction:?})", fmt(&g, &xy), xy.length()),
                record,
            )?;
        }
        Command::Invert { word: w } => {
            let g = group(&opts)?;
            let x = g.invert(&read_word(&g, &word(w)?)?);
            em.emit(
                format!("{} (length {})", fmt(&g, &x), x.length()),
                element_record("inverse", &g, &x),
            )?;
        }
        Command::Length { word: w } => {
            let g = group(&opts)?;
            let x = read_word(&g, &word(w)?)?;
            let (b, e) = x.begins_ends();
            em.emit(
                x.length().to_string(),
                json!({ "record": "length", "length": x.length(), "begins": b.map(|s| s.to_string()), "ends": e.map(|s| s.to_string()) }),
            )?;
        }
        Command::Meridian => {
            let t = torus(&opts)?;
            let (a, b) = t.meridian_exponents();
            let x = t.meridian();
            let hx = t.seifert_quotient(&x);
            let (kg, qg) = (t.knot_group(), t.quotient_group());
            em.emit(
                format!(
                    "x = {} (a = {a}, b = {b})\nh(x) = {}\nabelianization = {}",
                    fmt(kg, &x),
                    fmt(qg, &hx),
                    t.abelianize(&x)
                ),
                json!({
                    "record": "meridian", "a": a, "b": b, "meridian": fmt(kg, &x),
                    "quotient": fmt(qg, &hx), "abelianization": t.abelianize(&x),
                }),
            )?;
        }
        Command::Quotient { word: w } => {
            let t = torus(&opts)?;
            let x = read_word(t.knot_group(), &word(w)?)?;
            let hx = t.seifert_quotient(&x);
            let qg = t.quotient_group();
            em.emit(
                format!("{} (length {})", fmt(qg, &hx), hx.length()),
                element_record("quotient", qg, &hx),
            )?;
        }
        Command::CenterPower { word: w } => {
            let t = torus(&opts)?;
            let x = read_word(t.knot_group(), &word(w)?)?;
            let (text, value) = match t.central_power(&x) {
                CentralPower::Finite(m) => (m.to_string(), json!(m)),
                CentralPower::Infinite => ("infinite".to_string(), Value::Null),
            };
            em.emit(text, json!({ "record": "central_power", "central_power": value }))?;
        }
        Command::Basis { word: w } => {
            let t = torus(&opts)?;
            let kg = t.knot_group();
            let basis = t.peripheral_basis(&read_word(kg, &word(w)?)?)?;
            em.emit(
                format!(
                    "x = {}\ny = {}\ny^{} = b^{}",
                    fmt(kg, &basis.x),
                    fmt(kg, &basis.y),
                    basis.root_exponent,
                    basis.central_power
                ),
                json!({
                    "record": "basis", "x": fmt(kg, &basis.x), "y": fmt(kg, &basis.y),
                    "root_exponent": basis.root_exponent, "central_power": basis.central_power,
                }),
            )?;
        }
        Command::Sigma { word: w } => {
            let p = p_sequence(&parse_two_generator_word(&word(w)?)?)?;
            em.emit(
                format!("P = {:?}; sigma = {}", p.values, p.sigma),
                json!({ "record": "sigma", "p": p.values, "sigma": p.sigma, "j": p.j() }),
            )?;
        }
        Command::Rewrite312 { word: w } => {
            let f = parse_formal_word(&word(w)?, opts.m)?;
            let r = rewrite_central_powers(&f);
            let shape = match r.word.shape() {
                FixedPointShape::CentralPower(s) => format!("central power c~^{s}"),
                FixedPointShape::SingleBlock => "single block".to_string(),
                FixedPointShape::Reduced => "reduced".to_string(),
            };
            em.emit(
                format!("{} ({} steps, {shape})", r.word, r.steps),
                json!({ "record": "rewrite", "word": r.word.to_string(), "steps": r.steps, "shape": shape }),
            )?;
        }
        Command::ClassifyPair { x, y } => {
            let g = group(&opts)?;
            let ws = words(vec![x, y])?;
            let (x, y) = (read_word(&g, &ws[0])?, read_word(&g, &ws[1])?);
            let t = classify_pair(ShapeDescriptor::of(&x), ShapeDescriptor::of(&y));
            let inverted = classify_pair(ShapeDescriptor::of(&x), ShapeDescriptor::of(&y).inverted());
            em.emit(
                format!("{} (second inverted: {})", t.name(), inverted.name()),
                json!({ "record": "pair_type", "type": t.name(), "second_inverted": inverted.name() }),
            )?;
        }
        Command::Bound(args) => return bound(&opts, args, em),
        Command::BoundAudit(args) => return audit(&opts, args, em),
        Command::Junctions(args) => return junctions(&opts, args, em),
        Command::Ball { generators, elements } => {
            let g = group(&opts)?;
            let gens = word_list(generators)?
                .iter()
                .map(|w| read_word(&g, w))
                .collect::<amalgam::Result<Vec<_>>>()?;
            em.header(
                "ball",
                &opts,
                json!({ "generators": gens.iter().map(|x| fmt(&g, x)).collect::<Vec<_>>() }),
            )?;
            let ball = enumerate_ball(&g, &gens, opts.budget)?;
            if elements {
                for x in ball.elements() {
                    let mut r = element_record("element", &g, x);
                    r["depth"] = json!(ball.depth(x));
                    em.emit(fmt(&g, x), r)?;
                }
            }
            em.emit(
                format!("ball size {}, frontier {:?}", ball.len(), ball.frontier_profile()),
                json!({ "record": "ball", "ball_size": ball.len(), "frontier_profile": ball.frontier_profile() }),
            )?;
        }
        Command::Member { target, generators } => {
            let g = group(&opts)?;
            let gens = generators
                .iter()
                .map(|w| read_word(&g, w))
                .collect::<amalgam::Result<Vec<_>>>()?;
            let target = read_word(&g, &word(target)?)?;
            em.header(
                "member",
                &opts,
                json!({ "generators": gens.iter().map(|x| fmt(&g, x)).collect::<Vec<_>>() }),
            )?;
            for (i, x) in gens.iter().enumerate() {
                em.text(format!("g{i} = {}", fmt(&g, x)))?;
            }
            let r = membership(&g, &gens, &target, opts.budget)?;
            emit_search(em, &g, &gens, &r, opts.budget)?;
        }
        Command::Verify314(args) => return verify(&opts, args, em),
        Command::GenCheck { generators } => {
            let g = group(&opts)?;
            let gens = word_list(generators)?
                .iter()
                .map(|w| read_word(&g, w))
                .collect::<amalgam::Result<Vec<_>>>()?;
            em.header(
                "gen-check",
                &opts,
                json!({ "generators": gens.iter().map(|x| fmt(&g, x)).collect::<Vec<_>>() }),
            )?;
            let r = transversal_generation_check(&g, &gens, opts.budget)?;
            let first = r.first_unreached.as_ref().map(|x| fmt(&g, x));
            em.emit(
                format!(
                    "transversals {:?}; {}{}; ball size {}, frontier {:?}",
                    r.transversals,
                    r.status,
                    first
                        .as_ref()
                        .map_or(String::new(), |x| format!(", first unreached {x}")),
                    r.ball_size,
                    r.frontier_profile
                ),
                json!({
                    "record": "gen_check", "transversals": r.transversals, "status": r.status.to_string(),
                    "first_unreached": first, "ball_size": r.ball_size, "frontier_profile": r.frontier_profile,
                }),
            )?;
        }
    }
    Ok(0)
}

const CAVEAT: &str = "search is bounded: elements reachable only through longer intermediates are not explored";

fn emit_search(
    em: &mut Emitter,
    g: &AmalgamGroup,
    gens: &[NormalForm],
    r: &SearchReport,
    budget: SearchBudget,
) -> Result<()> {
    let witness = r.witness.as_deref().map(format_expression);
    if let Some(w) = &r.witness {
        debug_assert_eq!(evaluate_expression(g, gens, w), r.target);
    }
    let text = match &witness {
        Some(w) => format!("{}: Found, witness {w}", fmt(g, &r.target)),
        None => format!("{}: ExhaustedBudget within ({budget}); {CAVEAT}", fmt(g, &r.target)),
    };
    em.emit(
        format!("{text}; ball size {}, frontier {:?}", r.ball_size, r.frontier_profile),
        json!({
            "record": "search", "target": fmt(g, &r.target), "status": r.status.to_string(),
            "witness": witness, "ball_size": r.ball_size, "frontier_profile": r.frontier_profile,
            "caveat": if r.status == SearchStatus::ExhaustedBudget { Some(CAVEAT) } else { None },
        }),
    )
}

fn bound(opts: &Options, args: BoundArgs, em: &mut Emitter) -> Result<u8> {
    let family = Family::from(args.family);
    let n = match family {
        Family::FreeFactor => {
            if args.n.is_some() {
                return Err(CliError::Usage("--n applies to the conjugate families only".into()));
            }
            None
        }
        Family::Conjugate(_) => Some(
            args.n
                .ok_or_else(|| CliError::Usage("the conjugate families need --n".into()))?,
        ),
    };
    if let Some(w) = args.word {
        let p = p_sequence(&parse_two_generator_word(&w)?)?;
        if p.j() == 0 {
            return Err(CliError::Usage(
                "the word has no X phrase; the bound needs j >= 1".into(),
            ));
        }
        let b = lower_bound_for_sequence(family, opts.k, n, &p)?;
        let branches: Vec<String> = SigmaBranch::candidates(&p).iter().map(|b| format!("{b:?}")).collect();
        em.emit(
            format!(
                "{family}: P = {:?}, j = {}, sigma = {}, branch {}; bound {b}",
                p.values,
                p.j(),
                p.sigma,
                branches.join("/")
            ),
            json!({
                "record": "bound", "family": family.to_string(), "p": p.values, "j": p.j(),
                "sigma": p.sigma, "branches": branches, "bound": b,
            }),
        )?;
        return Ok(0);
    }
    let j = args
        .j
        .ok_or_else(|| CliError::Usage("give a word or --j (and --sigma)".into()))?;
    let branch = match args.branch {
        Some(b) => b.into(),
        None if args.sigma.is_multiple_of(2) => SigmaBranch::Even,
        None => {
            return Err(CliError::Usage(
                "odd sigma needs --branch plus-minus or minus-plus".into(),
            ))
        }
    };
    let mut inputs = BoundInputs::new(opts.k, j, args.sigma);
    inputs.n = n;
    inputs.eps_first = args.eps_first;
    inputs.eps_last = args.eps_last;
    let case = BoundCase { family, branch };
    let b = lower_bound(&case, &inputs)?;
    let chain = bound_chain(&case, &inputs)?;
    let unc = uncancelled_length(&inputs)?;
    em.emit(
        format!(
            "{family} {branch:?}: uncancelled {unc}, chain {} >= {}, closed form {b}, weakest {}",
            chain.leading, chain.closed, chain.weakest
        ),
        json!({
            "record": "bound", "family": family.to_string(), "branch": format!("{branch:?}"),
            "uncancelled": unc, "leading": chain.leading, "bound": b, "weakest": chain.weakest,
        }),
    )?;
    Ok(0)
}

fn audit(opts: &Options, args: AuditArgs, em: &mut Emitter) -> Result<u8> {
    let params = AuditParams {
        trials: opts.trials,
        max_j: args.max_j,
        seed: opts.seed,
        max_exponent: args.max_exponent,
        max_conjugator_length: args.max_conjugator,
        rule: args.rule.into(),
        factor: args.factor.map(Into::into),
        ..AuditParams::new(opts.p, opts.q, opts.k, args.family.into())
    };
    em.header(
        "bound-audit",
        opts,
        json!({ "family": params.family.to_string(), "trials": params.trials, "rule": params.rule.to_string() }),
    )?;
    let report = bound_audit(&params)?;
    let g = AmalgamGroup::free_product(opts.p, opts.q)?;
    if let Some(reason) = &report.skipped {
        em.emit(
            format!("skipped: {reason}"),
            json!({ "record": "skipped", "reason": reason }),
        )?;
        return Ok(0);
    }
    for v in report.violations.iter().take(args.show) {
        em.emit(
            format!(
                "violation {} trial {}: h(bc) = {}, w = {}, element {} (length {} < {})",
                v.kind,
                v.trial,
                fmt(&g, &v.bc),
                v.word,
                fmt(&g, &v.element),
                v.exact,
                v.bound
            ),
            json!({
                "record": "violation", "kind": v.kind.to_string(), "trial": v.trial, "bc": fmt(&g, &v.bc),
                "word": v.word.to_string(), "element": fmt(&g, &v.element), "exact": v.exact, "bound": v.bound,
            }),
        )?;
    }
    let count = |k| report.count(k);
    em.emit(
        format!(
            "sampled {}, min margin {}, margins {:?}; violations: bound {}, consequence {}, parity {} ({} parity checks)",
            report.sampled,
            report.min_margin.map_or("-".into(), |m| m.to_string()),
            report.margins,
            count(ViolationKind::Bound),
            count(ViolationKind::Consequence),
            count(ViolationKind::Parity),
            report.parity_checks
        ),
        json!({
            "record": "summary", "sampled": report.sampled, "min_margin": report.min_margin,
            "margins": report.margins.iter().map(|(m, c)| json!([m, c])).collect::<Vec<_>>(),
            "bound_violations": count(ViolationKind::Bound),
            "consequence_violations": count(ViolationKind::Consequence),
            "parity_violations": count(ViolationKind::Parity), "parity_checks": report.parity_checks,
        }),
    )?;
    Ok(if report.is_clean() { 0 } else { 2 })
}

fn junctions(opts: &Options, args: JunctionArgs, em: &mut Emitter) -> Result<u8> {
    em.header("junctions", opts, json!({ "max_conjugator": args.max_conjugator }))?;
    let obs = junction_observations(&[(opts.p, opts.q)], &[opts.k], args.max_conjugator, args.rule.into())?;
    let mut clean = true;
    for o in &obs {
        // Free-factor same-sign entries are maxima and need not be attained
        // on a single group.
        let ok = match (o.min, o.max) {
            (Some(lo), Some(hi)) if o.is_exact_entry() => lo == o.table && hi == o.table,
            (Some(_), Some(hi)) => hi <= o.table,
            _ => true,
        };
        clean &= ok;
        em.emit(
            format!(
                "{} ({},{}): table {}, observed {}..{} over {} samples{}",
                o.family,
                o.left,
                o.right,
                o.table,
                o.min.map_or("-".into(), |v| v.to_string()),
                o.max.map_or("-".into(), |v| v.to_string()),
                o.samples,
                if ok { "" } else { "  MISMATCH" }
            ),
            json!({
                "record": "junction", "family": o.family.to_string(), "left": o.left.to_string(),
                "right": o.right.to_string(), "table": o.table, "min": o.min, "max": o.max,
                "samples": o.samples, "agrees": ok,
            }),
        )?;
    }
    Ok(if clean { 0 } else { 2 })
}

fn verify(opts: &Options, args: VerifyArgs, em: &mut Emitter) -> Result<u8> {
    em.header("verify-314", opts, json!({ "max_conjugator": args.max_conjugator }))?;
    let t = torus(opts)?;
    let qg = t.quotient_group();
    let reports: Vec<Verify314Report> = match &args.element {
        Some(e) => {
            let e = read_word(qg, e)?;
            let [s] = e.syllables() else {
                return Err(CliError::Usage(
                    "--element must be a single nontrivial factor element".into(),
                ));
            };
            let conj = args.conjugator.as_deref().map(|c| read_word(qg, c)).transpose()?;
            vec![verify_314(
                opts.p,
                opts.q,
                opts.k,
                (s.side, s.transversal),
                conj.as_ref(),
                opts.budget,
            )?]
        }
        None => {
            if args.conjugator.is_some() {
                return Err(CliError::Usage("--conjugator needs --element".into()));
            }
            verify_314_sweep(opts.p, opts.q, opts.k, args.max_conjugator, opts.budget)?
        }
    };
    let mut found = 0;
    for r in &reports {
        let gens = [r.bc_image.clone(), r.x_power.clone()];
        em.emit(
            format!(
                "h(bc) = g0 = {}, h(x)^{} = g1 = {}",
                fmt(qg, &r.bc_image),
                r.k,
                fmt(qg, &r.x_power)
            ),
            json!({ "record": "generators", "bc": fmt(qg, &r.bc_image), "x_power": fmt(qg, &r.x_power) }),
        )?;
        for s in &r.reports {
            if s.status == SearchStatus::Found {
                found += 1;
            }
            emit_search(em, qg, &gens, s, r.budget)?;
        }
    }
    let targets: usize = reports.iter().map(|r| r.reports.len()).sum();
    em.emit(
        format!(
            "{} choices of h(bc), {targets} targets: {}",
            reports.len(),
            if found == 0 {
                "all ExhaustedBudget".to_string()
            } else {
                format!("{found} Found (counterexample)")
            }
        ),
        json!({ "record": "summary", "choices": reports.len(), "targets": targets, "found": found }),
    )?;
    Ok(if found == 0 { 0 } else { 2 })
}
