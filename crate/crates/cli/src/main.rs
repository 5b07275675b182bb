mod input;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use firefighter::adversary::{fixture, rows_to_csv, run_manifest, Adversary, AdversaryError, Manifest, ReportRow};
use firefighter::engine::{play_game, EngineError};
use firefighter::offline::{beta_fractional, OptError, RatioLimits};
use firefighter::scalar::{fraction_string, parse_rational, Scalar};
use firefighter::separation::{
    construct_separating, losing_sst, separate_integral, targeting_divergent, targeting_greedy, SeparationError,
    TailWitness, TargetingInstance, TargetingStep,
};
use firefighter::strategies::{parse_strategy_spec, FirstMoveFixed, Strategy, StrategyConfig, StrategyError};
use firefighter::tree::{w_gadget, Family, RootedTree};
use firefighter::{Rational, Sequence};

#[derive(Parser)]
#[command(name = "firefighter", version, about = "Firefighter games on rooted trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one strategy against one sequence.
    Simulate(SimulateArgs),
    /// Worst case of a strategy against an adversary with a firefighter budget.
    Ratio(RatioArgs),
    /// Build a spherically symmetric tree separating two sequences.
    Separate(SeparateArgs),
    /// Play the targeting game.
    Target(TargetArgs),
    /// Try containment strategies on a prefix of an infinite tree.
    Probe(ProbeArgs),
    /// Run an experiment manifest.
    Experiment(ExperimentArgs),
    /// Write a generated tree as JSON.
    Tree(TreeArgs),
    /// Build a spherically symmetric tree with given level growth on which the sequence loses.
    Losing(LosingArgs),
}

#[derive(Args)]
struct Instance {
    /// Tree file (JSON).
    #[arg(long, conflicts_with = "family")]
    tree: Option<String>,
    /// Generated family, e.g. `binary:3`, `w:4,901,1001`, `random:10` (see --seed).
    #[arg(long)]
    family: Option<String>,
    /// Seed for `random:N` families given without one.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Instance {
    fn load(&self) -> Result<RootedTree, Failure> {
        let family = self.family.as_deref().map(|f| match f.strip_prefix("random:") {
            Some(n) if !n.contains(',') => format!("random:{n},{}", self.seed),
            _ => f.to_string(),
        });
        input::load_tree(self.tree.as_deref(), family.as_deref()).map_err(Failure::parse)
    }
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    instance: Instance,
    #[arg(long)]
    seq: String,
    #[arg(long, default_value = "gr")]
    strategy: String,
    /// Turns to play (default: the height of the tree).
    #[arg(long)]
    horizon: Option<usize>,
    /// Include the allocations of every turn.
    #[arg(long)]
    transcript: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct RatioArgs {
    #[command(flatten)]
    instance: Instance,
    #[arg(long, default_value = "gr")]
    strategy: String,
    /// Total number of firefighters the adversary may hand out.
    #[arg(long, required_unless_present = "fixtures")]
    budget: Option<u64>,
    /// Named sequence list (`w`, `w-pair`, `w-alternate`, `w-burst`) instead of enumeration.
    #[arg(long)]
    fixtures: Option<String>,
    /// On a W gadget, force the first firefighter onto `x` or `y`.
    #[arg(long)]
    first_move: Option<String>,
    /// Only sequences with a firefighter on the first turn.
    #[arg(long)]
    first_turn_positive: bool,
    /// Also report the fractional optimum of the worst sequence.
    #[arg(long)]
    fractional: bool,
    #[arg(long, default_value_t = 20_000_000)]
    max_sequences: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Auto,
    Integral,
    Shift,
}

#[derive(Args)]
struct SeparateArgs {
    /// The weaker sequence.
    #[arg(long)]
    seq: String,
    /// The stronger sequence.
    #[arg(long)]
    stronger: String,
    #[arg(long, default_value_t = 50)]
    horizon: usize,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    method: Method,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TargetStrategy {
    Greedy,
    Divergent,
}

#[derive(Args)]
struct TargetArgs {
    #[arg(long = "a")]
    low: String,
    #[arg(long = "b")]
    high: String,
    #[arg(long)]
    seq: String,
    #[arg(long, value_enum, default_value_t = TargetStrategy::Greedy)]
    strategy: TargetStrategy,
    #[arg(long, default_value_t = 100)]
    horizon: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ProbeArgs {
    /// Infinite family: `sst:2`, `sst:3,2`, `spider`, `width:W`.
    #[arg(long)]
    family: String,
    #[arg(long)]
    seq: String,
    #[arg(long, default_value_t = 30)]
    horizon: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Manifest file (JSON).
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct TreeArgs {
    #[command(flatten)]
    instance: Instance,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct LosingArgs {
    /// Level sizes: `pow:B` or `poly:C,D`.
    #[arg(long)]
    growth: String,
    #[arg(long)]
    seq: String,
    #[arg(long, default_value_t = 40)]
    horizon: usize,
    /// Index M of a caller-supplied tail bound.
    #[arg(long, requires = "witness_bound")]
    witness_m: Option<usize>,
    /// The bound itself, below 1/4.
    #[arg(long, requires = "witness_m")]
    witness_bound: Option<String>,
    #[command(flatten)]
    output: Output,
}

/// An error with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn parse(message: impl ToString) -> Self {
        Failure { code: 2, message: message.to_string() }
    }

    fn strategy(message: impl ToString) -> Self {
        Failure { code: 3, message: message.to_string() }
    }

    fn construction(message: impl ToString) -> Self {
        Failure { code: 4, message: message.to_string() }
    }

    fn guard(message: impl ToString) -> Self {
        Failure { code: 5, message: message.to_string() }
    }
}

impl From<OptError> for Failure {
    fn from(e: OptError) -> Self {
        if e.is_guard() {
            Failure::guard(e)
        } else if matches!(e, OptError::Engine(_)) {
            Failure::strategy(e)
        } else {
            Failure::construction(e)
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::strategy(e)
    }
}

impl From<SeparationError> for Failure {
    fn from(e: SeparationError) -> Self {
        Failure::construction(e)
    }
}

impl From<AdversaryError> for Failure {
    fn from(e: AdversaryError) -> Self {
        match e {
            AdversaryError::Opt(e) => e.into(),
            AdversaryError::Csv(e) => Failure::construction(e),
            other => Failure::parse(other),
        }
    }
}

fn frac<S: Scalar>(x: &S) -> String {
    fraction_string(&firefighter::scalar::to_rational(x))
}

fn strategy(spec: &str) -> Result<(StrategyConfig, Box<dyn Strategy<Rational>>), Failure> {
    let cfg = parse_strategy_spec(spec).map_err(Failure::parse)?;
    let built = cfg.build::<Rational>().map_err(|e: StrategyError| Failure::parse(e))?;
    Ok((cfg, built))
}

fn label(tree: &RootedTree) -> String {
    tree.family().map_or_else(|| format!("tree_{}", tree.n()), Family::label)
}

enum Report {
    Json(Value),
    Rows(Vec<ReportRow>),
}

fn simulate(args: &SimulateArgs) -> Result<Report, Failure> {
    let tree = args.instance.load()?;
    let pad = args.horizon.unwrap_or(tree.height()) + 1;
    let seq = input::parse_sequence(&args.seq, pad).map_err(Failure::parse)?;
    let (cfg, mut s) = strategy(&args.strategy)?;
    let out = play_game(&tree, &seq, s.as_mut(), args.horizon)?;
    let mut report = json!({
        "instance": label(&tree),
        "n": tree.n(),
        "strategy": cfg.strategy,
        "saved": frac(&out.saved),
        "saved_decimal": format!("{:.6}", out.saved.to_f64()),
        "turns": out.turns_played,
        "contained": out.contained,
    });
    if args.transcript {
        report["transcript"] = out.transcript_json();
    }
    Ok(Report::Json(report))
}

fn ratio(args: &RatioArgs) -> Result<Report, Failure> {
    let tree = args.instance.load()?;
    let (cfg, base) = strategy(&args.strategy)?;
    let (branch, player): (&str, Box<dyn Strategy<Rational>>) = match args.first_move.as_deref() {
        None => ("", base),
        Some(side @ ("x" | "y")) => {
            let Some(&Family::W { k, l, m }) = tree.family() else {
                return Err(Failure::parse("--first-move needs a W gadget (--family w:K,L,M)"));
            };
            let g = w_gadget(k, l, m);
            let v = if side == "x" { g.x } else { g.y };
            (if side == "x" { "x" } else { "y" }, Box::new(FirstMoveFixed::new(v, base)))
        }
        Some(other) => return Err(Failure::parse(format!("--first-move takes x or y, got {other:?}"))),
    };
    let adversary = match (&args.fixtures, args.budget) {
        (Some(name), _) => Adversary::Fixed(fixture(name).ok_or_else(|| Failure::parse(format!("unknown fixture {name:?}")))?),
        (None, Some(budget)) => Adversary::Exhaustive { budget },
        (None, None) => return Err(Failure::parse("--budget or --fixtures is required")),
    };
    let limits = RatioLimits {
        max_sequences: args.max_sequences,
        first_turn_positive: args.first_turn_positive,
        ..Default::default()
    };
    let case = adversary.worst(&tree, player.as_ref(), &limits)?;
    let mut row = ReportRow::new(&label(&tree), &cfg.strategy, branch, &case);
    if args.fractional {
        let f = Sequence::from_counts(&case.sequence).into_fractional();
        row.beta_f = fraction_string(&beta_fractional(&tree, &f)?.value);
    }
    Ok(Report::Rows(vec![row]))
}

fn separate(args: &SeparateArgs) -> Result<Report, Failure> {
    let pad = 10 * args.horizon + 10;
    let f = input::parse_sequence(&args.seq, pad).map_err(Failure::parse)?;
    let g = input::parse_sequence(&args.stronger, pad).map_err(Failure::parse)?;
    let integral = f.has_integral_values(args.horizon) && g.has_integral_values(args.horizon);
    let use_integral = match args.method {
        Method::Integral => true,
        Method::Shift => false,
        Method::Auto => integral,
    };
    let mut report = if use_integral {
        let s = separate_integral(&f, &g, args.horizon)?;
        let mut v = s.to_json();
        v["method"] = json!("integral");
        v["degrees"] = json!(s.degrees(args.horizon));
        v
    } else {
        let w = construct_separating(&f, &g, args.horizon)?;
        let mut v = w.to_json();
        v["method"] = json!("shift");
        v["degrees"] = json!(w.degrees(w.checked_to)?);
        v
    };
    report["horizon"] = json!(args.horizon);
    Ok(Report::Json(report))
}

fn trace(steps: &[TargetingStep<Rational>]) -> Value {
    steps
        .iter()
        .map(|s| json!({"turn": s.turn, "f": frac(&s.f), "a": s.a, "delta": frac(&s.delta), "u": frac(&s.u), "x": frac(&s.x)}))
        .collect()
}

fn target(args: &TargetArgs) -> Result<Report, Failure> {
    let a = parse_rational(&args.low).map_err(Failure::parse)?;
    let b = parse_rational(&args.high).map_err(Failure::parse)?;
    let f = input::parse_sequence(&args.seq, args.horizon + 1).map_err(Failure::parse)?;
    let inst = TargetingInstance::new(a.clone(), b.clone(), f).map_err(Failure::parse)?;
    let base = json!({"A": frac(&a), "B": frac(&b), "horizon": args.horizon});
    let mut report = base;
    match args.strategy {
        TargetStrategy::Greedy => {
            let run = targeting_greedy(&inst, args.horizon);
            report["strategy"] = json!("greedy");
            report["won"] = json!(run.won_at.is_some());
            report["N"] = json!(run.won_at);
            report["divisors"] = json!(run.divisors());
            report["trace"] = trace(&run.steps);
        }
        TargetStrategy::Divergent => {
            let win = targeting_divergent(&inst, args.horizon)?;
            report["strategy"] = json!("divergent");
            report["won"] = json!(true);
            report["N"] = json!(win.n);
            report["k_prime"] = json!(win.k_prime);
            report["divisors"] = json!(win.divisors());
            report["trace"] = trace(&win.steps);
        }
    }
    Ok(Report::Json(report))
}

fn probe(args: &ProbeArgs) -> Result<Report, Failure> {
    let mut lt = input::parse_level_tree(&args.family).map_err(Failure::parse)?;
    let tree = lt.prefix(args.horizon).map_err(Failure::parse)?;
    let f = input::parse_sequence(&args.seq, args.horizon + 1).map_err(Failure::parse)?;
    let mut partial = Rational::from_integer(0.into());
    for (i, level) in tree.levels().iter().enumerate().skip(1) {
        partial += f.get(i) / Rational::from_integer((level.len() as u64).into());
    }
    let mut runs = Vec::new();
    for name in ["even", "level_target"] {
        let mut s = StrategyConfig::named(name).build::<Rational>().map_err(Failure::parse)?;
        runs.push(match play_game(&tree, &f, s.as_mut(), Some(args.horizon)) {
            Ok(out) => json!({
                "strategy": name,
                "contained": out.contained,
                "turns": out.turns_played,
                "saved": frac(&out.saved),
            }),
            Err(e) => json!({"strategy": name, "error": e.to_string()}),
        });
    }
    Ok(Report::Json(json!({
        "family": args.family,
        "horizon": args.horizon,
        "sum_f_over_level_size": frac(&partial),
        "runs": runs,
        "conclusive": false,
        "note": "finite prefix only; containment here says nothing about the infinite game",
    })))
}

fn experiment(args: &ExperimentArgs) -> Result<Report, Failure> {
    let text = fs::read_to_string(&args.manifest).map_err(|e| Failure::parse(format!("{}: {e}", args.manifest.display())))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(Failure::parse)?;
    Ok(Report::Rows(run_manifest(&manifest)?))
}

fn tree(args: &TreeArgs) -> Result<Report, Failure> {
    let tree = args.instance.load()?;
    Ok(Report::Json(serde_json::to_value(tree.to_file()).expect("tree files serialize")))
}

fn losing(args: &LosingArgs) -> Result<Report, Failure> {
    let growth = input::parse_growth(&args.growth).map_err(Failure::parse)?;
    let f = input::parse_sequence(&args.seq, args.horizon + 1).map_err(Failure::parse)?;
    let witness = match (args.witness_m, &args.witness_bound) {
        (Some(m), Some(b)) => Some(TailWitness { m, bound: parse_rational(b).map_err(Failure::parse)? }),
        _ => None,
    };
    Ok(Report::Json(losing_sst(growth, &f, args.horizon, witness)?.to_json()))
}

fn render(report: Report, format: Format) -> Result<String, Failure> {
    match (report, format) {
        (Report::Json(v), Format::Json) => Ok(serde_json::to_string_pretty(&v).expect("values serialize") + "\n"),
        (Report::Rows(rows), Format::Json) => {
            Ok(serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n")
        }
        (Report::Rows(rows), Format::Csv) => rows_to_csv(&rows).map_err(Failure::construction),
        (Report::Json(_), Format::Csv) => Err(Failure::parse("csv output is available for ratio and experiment only")),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let (report, output) = match &cli.command {
        Command::Simulate(a) => (simulate(a)?, &a.output),
        Command::Ratio(a) => (ratio(a)?, &a.output),
        Command::Separate(a) => (separate(a)?, &a.output),
        Command::Target(a) => (target(a)?, &a.output),
        Command::Probe(a) => (probe(a)?, &a.output),
        Command::Experiment(a) => (experiment(a)?, &a.output),
        Command::Tree(a) => (tree(a)?, &a.output),
        Command::Losing(a) => (losing(a)?, &a.output),
    };
    let text = render(report, output.format)?;
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::parse(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
