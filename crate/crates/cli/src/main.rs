//! `commlab` command-line front end.
//!
//! Every subcommand prints one JSON document (or CSV where requested) to
//! standard output and diagnostics to standard error. Exit codes: 0 success,
//! 1 validation failure, 2 infeasible or failed threshold, 3 usage error.

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use commlab::commmatrix::{
    self, factorization_to_implementation, from_implementation, min_dim_with_tol, nonneg_factorize, psd_factorize,
    CommMatrix, DimKind, Factorization, Implementation,
};
use commlab::protocol::{self, AuthTag, Scheme, TagVerdict, Transcript, Verdict};
use commlab::quantum::{DensityMatrix, Povm};
use commlab::tasks::{self, default_alphabet, Encoding, RefereePolicy, StrategyReport};
use commlab::tol::{EPS_FACT, EPS_OPT};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "commlab", version, about = "Prepare-and-measure communication toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Wrap the JSON payload in a record with the command line, version and
    /// seed; wall time is reported on standard error.
    #[arg(long, global = true)]
    record: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a state, POVM, matrix or other input file against its invariants.
    Validate(ValidateArgs),
    /// Communication games: minimum error, unambiguous, partial ignorance.
    #[command(subcommand)]
    Tasks(TasksCommand),
    /// Communication matrices and their minimal dimensions.
    #[command(subcommand)]
    Matrix(MatrixCommand),
    /// Non-overlapping random sequences.
    #[command(subcommand)]
    Protocol(ProtocolCommand),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InputKind {
    State,
    Povm,
    Matrix,
    Implementation,
    Encoding,
    Policy,
    Transcript,
    Tag,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// What the file contains.
    #[arg(long, value_enum)]
    kind: InputKind,
    /// Input path (`-` for standard input).
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Subcommand, Debug)]
enum TasksCommand {
    /// Minimum-error discrimination.
    Me(MeArgs),
    /// Unambiguous discrimination with inconclusive outcome `?`.
    Ua(UaArgs),
    /// Communication of partial ignorance.
    Pi(PiArgs),
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("mode").required(true).args(["bound", "classical", "eval", "optimize"])))]
struct MeArgs {
    /// Print the d/N ceiling.
    #[arg(long)]
    bound: bool,
    /// Evaluate the reference dit strategy.
    #[arg(long)]
    classical: bool,
    /// Evaluate the encoding in --in with the decoder in --decoder.
    #[arg(long, requires_all = ["input", "decoder"])]
    eval: bool,
    /// Optimize a decoder for the encoding in --in.
    #[arg(long, requires_all = ["input", "seed"])]
    optimize: bool,
    #[arg(short = 'd', long = "d")]
    d: Option<usize>,
    #[arg(short = 'N', long = "N")]
    n: Option<usize>,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    decoder: Option<PathBuf>,
    /// Random restarts of the decoder optimizer.
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Distance to the bound that counts as saturated.
    #[arg(long, default_value_t = EPS_OPT)]
    tol: f64,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("mode").required(true).args(["bound", "classical", "eval"])))]
struct UaArgs {
    /// Print the (d-1)/N ceiling.
    #[arg(long)]
    bound: bool,
    /// Evaluate the reference dit strategy.
    #[arg(long)]
    classical: bool,
    /// Evaluate the encoding in --in with the decoder in --decoder.
    #[arg(long, requires_all = ["input", "decoder"])]
    eval: bool,
    #[arg(short = 'd', long = "d")]
    d: Option<usize>,
    #[arg(short = 'N', long = "N")]
    n: Option<usize>,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    decoder: Option<PathBuf>,
    /// Distance to the bound that counts as saturated.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PiStrategy {
    Classical,
    Quantum,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("mode").required(true).args(["bound", "play"])))]
struct PiArgs {
    /// Print the 1/(N-1) ceiling.
    #[arg(long)]
    bound: bool,
    /// Simulate a strategy.
    #[arg(long, value_enum, requires = "seed")]
    play: Option<PiStrategy>,
    #[arg(short = 'N', long = "N")]
    n: usize,
    /// `uniform`, `point:<correct>,<announced>` (symbols), `random:<seed>`,
    /// or a path to a policy JSON file.
    #[arg(long, default_value = "uniform")]
    policy: String,
    #[arg(long, default_value_t = 100_000)]
    rounds: u64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum MatrixCommand {
    /// Build a canonical matrix or the matrix of an implementation.
    Build(BuildArgs),
    /// Search for a factorization with a given inner dimension.
    Factorize(FactorizeArgs),
    /// Certify the minimal classical or quantum dimension.
    Mindim(MindimArgs),
    /// Lower bounds on both minimal dimensions.
    Bounds(InputArgs),
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["antidist", "identity", "from_impl"])))]
struct BuildArgs {
    /// Uniform antidistinguishability matrix A_n.
    #[arg(long, value_name = "N")]
    antidist: Option<usize>,
    /// Identity matrix I_n.
    #[arg(long, value_name = "N")]
    identity: Option<usize>,
    /// Implementation JSON file.
    #[arg(long, value_name = "PATH")]
    from_impl: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Matrix file, JSON or plain text (`-` for standard input).
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Classical,
    Quantum,
}

impl From<Kind> for DimKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Classical => DimKind::Classical,
            Kind::Quantum => DimKind::Quantum,
        }
    }
}

#[derive(Args, Debug)]
struct FactorizeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    kind: Kind,
    /// Inner dimension.
    #[arg(short = 'd', long = "d")]
    d: usize,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long)]
    seed: u64,
    /// Largest residual counted as success.
    #[arg(long, default_value_t = EPS_FACT)]
    tol: f64,
    /// Print the converted implementation instead of the factorization.
    #[arg(long)]
    implementation: bool,
}

#[derive(Args, Debug)]
struct MindimArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    kind: Kind,
    /// Largest dimension to try.
    #[arg(long, default_value_t = 8)]
    d_max: usize,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long)]
    seed: u64,
    /// Largest residual counted as success.
    #[arg(long, default_value_t = EPS_FACT)]
    tol: f64,
}

#[derive(Subcommand, Debug)]
enum ProtocolCommand {
    /// Generate a transcript.
    Run(RunArgs),
    /// Check that a receiver disagrees with the sender in every slot.
    Verify(PartyArgs),
    /// Information a receiver's sequence reveals about the sender's.
    Leakage(LeakageArgs),
    /// Authentication tags cut from a receiver's sequence.
    #[command(subcommand)]
    Tag(TagCommand),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    Quantum,
    Classical4,
    Classical3,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Quantum => Scheme::Quantum,
            SchemeArg::Classical4 => Scheme::Classical4,
            SchemeArg::Classical3 => Scheme::Classical3,
        }
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::Quantum)]
    scheme: SchemeArg,
    #[arg(long)]
    length: usize,
    #[arg(long)]
    seed: u64,
    /// Receiving parties (quantum scheme), comma separated.
    #[arg(long, value_delimiter = ',', default_value = "bob")]
    parties: Vec<String>,
}

#[derive(Args, Debug)]
struct PartyArgs {
    /// Transcript JSON file.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "bob")]
    party: String,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "scheme"])))]
struct LeakageArgs {
    /// Transcript JSON file (empirical report).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Scheme for the analytic report.
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long, default_value = "bob")]
    party: String,
}

#[derive(Subcommand, Debug)]
enum TagCommand {
    /// Cut a tag from a receiver's sequence.
    Issue(IssueArgs),
    /// Check a tag against the sender's sequence.
    Check(CheckArgs),
    /// Acceptance probability of a uniformly guessed tag.
    Rate(RateArgs),
}

#[derive(Args, Debug)]
struct IssueArgs {
    #[command(flatten)]
    party: PartyArgs,
    /// Slot indices, comma separated and strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    slots: Vec<usize>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Transcript JSON file holding the sender's sequence.
    #[arg(long = "in")]
    input: PathBuf,
    /// Tag JSON file.
    #[arg(long)]
    tag: PathBuf,
}

#[derive(Args, Debug)]
struct RateArgs {
    /// Tag length.
    #[arg(short = 'k', long)]
    k: usize,
}

/// Why a command failed, mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Validation(String),
    Infeasible(String),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Infeasible(_) => 2,
            Failure::Usage(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Infeasible(m) | Failure::Usage(m) => m,
        }
    }
}

impl From<commlab::Error> for Failure {
    fn from(e: commlab::Error) -> Self {
        use commlab::Error;
        match e {
            e if e.is_validation() => Failure::Validation(e.to_string()),
            e @ (Error::Unsupported(_) | Error::Conversion { .. }) => Failure::Infeasible(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

/// What a command produced: a payload and whether a threshold failed.
struct Outcome {
    payload: Payload,
    seed: Option<u64>,
    failed: Option<String>,
}

enum Payload {
    Json(Value),
    Table(Vec<String>, Vec<Vec<String>>),
}

impl Outcome {
    fn json<T: Serialize>(value: &T) -> Result<Self, Failure> {
        let value = serde_json::to_value(value).map_err(|e| Failure::Validation(e.to_string()))?;
        Ok(Outcome { payload: Payload::Json(value), seed: None, failed: None })
    }

    fn seeded(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    fn failing_if(mut self, condition: bool, why: impl FnOnce() -> String) -> Self {
        if condition {
            self.failed = Some(why());
        }
        self
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin().read_to_string(&mut text).map_err(|e| Failure::Usage(format!("reading standard input: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("reading {}: {e}", path.display())))?;
    }
    Ok(text)
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = read_input(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

/// Matrix files may be JSON or whitespace-separated text.
fn read_matrix(path: &Path) -> Result<CommMatrix, Failure> {
    let text = read_input(path)?;
    if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
    } else {
        Ok(CommMatrix::parse_text(&text)?)
    }
}

fn need<T: Copy>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::Usage(format!("missing required flag {flag}")))
}

fn validate(args: &ValidateArgs) -> Result<Outcome, Failure> {
    let path = args.input.as_path();
    let kind = match args.kind {
        InputKind::State => parse_json::<DensityMatrix>(path).map(|_| "state")?,
        InputKind::Povm => parse_json::<Povm>(path).map(|_| "povm")?,
        InputKind::Matrix => read_matrix(path).map(|_| "matrix")?,
        InputKind::Implementation => parse_json::<Implementation>(path).map(|_| "implementation")?,
        InputKind::Encoding => parse_json::<Encoding>(path).map(|_| "encoding")?,
        InputKind::Policy => parse_json::<RefereePolicy>(path).map(|_| "policy")?,
        InputKind::Transcript => parse_json::<Transcript>(path).map(|_| "transcript")?,
        InputKind::Tag => parse_json::<AuthTag>(path).map(|_| "tag")?,
    };
    Outcome::json(&json!({ "valid": true, "kind": kind }))
}

fn per_symbol(enc: &Encoding, dec: &Povm) -> Vec<f64> {
    enc.alphabet().iter().zip(enc.states()).map(|(x, rho)| dec.probability(rho, x.as_str())).collect()
}

fn tasks_me(a: &MeArgs) -> Result<Outcome, Failure> {
    if a.bound {
        let bound = tasks::me_bound(need(a.d, "-d")?, need(a.n, "-N")?)?;
        return Outcome::json(&json!({ "bound": bound }));
    }
    if a.classical {
        let (d, n) = (need(a.d, "-d")?, need(a.n, "-N")?);
        let (enc, dec) = tasks::classical_me_strategy(d, n)?;
        let p = tasks::me_success(&enc, &dec)?;
        return Outcome::json(&StrategyReport::exact(p, tasks::me_bound(d, n)?, per_symbol(&enc, &dec), a.tol));
    }
    let enc: Encoding = parse_json(a.input.as_deref().expect("clap requires --in"))?;
    let bound = tasks::me_bound(enc.dim(), enc.len())?;
    if a.eval {
        let dec: Povm = parse_json(a.decoder.as_deref().expect("clap requires --decoder"))?;
        let p = tasks::me_success(&enc, &dec)?;
        return Outcome::json(&StrategyReport::exact(p, bound, per_symbol(&enc, &dec), a.tol));
    }
    let seed = a.seed.expect("clap requires --seed");
    let (dec, p) = tasks::optimize_me_decoder(&enc, a.restarts, seed)?;
    let report = StrategyReport::exact(p, bound, per_symbol(&enc, &dec), a.tol);
    Ok(Outcome::json(&json!({ "report": report, "decoder": dec }))?.seeded(Some(seed)))
}

fn tasks_ua(a: &UaArgs) -> Result<Outcome, Failure> {
    if a.bound {
        let bound = tasks::ua_bound(need(a.d, "-d")?, need(a.n, "-N")?)?;
        return Outcome::json(&json!({ "bound": bound }));
    }
    let (enc, dec) = if a.classical {
        tasks::classical_ua_strategy(need(a.d, "-d")?, need(a.n, "-N")?)?
    } else {
        (
            parse_json::<Encoding>(a.input.as_deref().expect("clap requires --in"))?,
            parse_json::<Povm>(a.decoder.as_deref().expect("clap requires --decoder"))?,
        )
    };
    let p = tasks::ua_success(&enc, &dec)?;
    let bound = tasks::ua_bound(enc.dim(), enc.len())?;
    Outcome::json(&StrategyReport::exact(p, bound, per_symbol(&enc, &dec), a.tol))
}

fn parse_policy(policy_arg: &str, n: usize) -> Result<RefereePolicy, Failure> {
    let symbol = |s: &str| {
        default_alphabet(n)
            .iter()
            .position(|l| l.as_str() == s.trim())
            .ok_or_else(|| Failure::Usage(format!("--policy: unknown symbol {s:?} for N = {n}")))
    };
    if policy_arg == "uniform" {
        Ok(RefereePolicy::uniform(n)?)
    } else if let Some(rest) = policy_arg.strip_prefix("point:") {
        let (c, a) = rest.split_once(',').ok_or_else(|| Failure::Usage("--policy point:<correct>,<announced>".into()))?;
        Ok(RefereePolicy::point_mass(n, symbol(c)?, symbol(a)?)?)
    } else if let Some(rest) = policy_arg.strip_prefix("random:") {
        let seed = rest.parse().map_err(|_| Failure::Usage(format!("--policy: bad seed {rest:?}")))?;
        Ok(RefereePolicy::random(n, seed)?)
    } else {
        parse_json(Path::new(policy_arg))
    }
}

fn tasks_pi(a: &PiArgs) -> Result<Outcome, Failure> {
    if a.bound {
        return Outcome::json(&json!({ "bound": tasks::pi_bound(a.n)? }));
    }
    let policy = parse_policy(&a.policy, a.n)?;
    let seed = a.seed.expect("clap requires --seed");
    let report = match a.play.expect("clap requires a mode") {
        PiStrategy::Classical => tasks::pi_play_classical(a.n, &policy, a.rounds, seed)?,
        PiStrategy::Quantum => tasks::pi_play_quantum(a.n, &policy, a.rounds, seed)?,
    };
    Ok(Outcome::json(&report)?.seeded(Some(seed)))
}

fn matrix_build(a: &BuildArgs, format: Format) -> Result<Outcome, Failure> {
    let m = if let Some(n) = a.antidist {
        commmatrix::antidist_matrix(n)?
    } else if let Some(n) = a.identity {
        commmatrix::identity_matrix(n)?
    } else {
        from_implementation(&parse_json::<Implementation>(a.from_impl.as_deref().expect("clap requires a source"))?)?
    };
    if format == Format::Csv {
        let header = (0..m.cols()).map(|y| y.to_string()).collect();
        let rows = m.to_rows().iter().map(|r| r.iter().map(f64::to_string).collect()).collect();
        return Ok(Outcome { payload: Payload::Table(header, rows), seed: None, failed: None });
    }
    Outcome::json(&m)
}

fn matrix_factorize(a: &FactorizeArgs) -> Result<Outcome, Failure> {
    let c = read_matrix(&a.input.input)?;
    let f = match a.kind {
        Kind::Classical => Factorization::Nonneg(nonneg_factorize(&c, a.d, a.restarts, a.seed)?),
        Kind::Quantum => Factorization::Psd(psd_factorize(&c, a.d, a.restarts, a.seed)?),
    };
    let residual = f.residual();
    let why = || format!("best residual {residual:e} exceeds tolerance {:e} at d = {}", a.tol, a.d);
    if a.implementation {
        if residual > a.tol {
            return Err(Failure::Infeasible(why()));
        }
        return Ok(Outcome::json(&factorization_to_implementation(&f, &c)?)?.seeded(Some(a.seed)));
    }
    Ok(Outcome::json(&f)?.seeded(Some(a.seed)).failing_if(residual > a.tol, why))
}

fn matrix_mindim(a: &MindimArgs) -> Result<Outcome, Failure> {
    let c = read_matrix(&a.input.input)?;
    let cert = min_dim_with_tol(&c, a.kind.into(), a.d_max, a.restarts, a.seed, a.tol)?;
    let unresolved = cert.upper.is_none();
    Ok(Outcome::json(&cert)?
        .seeded(Some(a.seed))
        .failing_if(unresolved, || format!("no factorization found up to d = {}", a.d_max)))
}

fn matrix_bounds(a: &InputArgs) -> Result<Outcome, Failure> {
    let c = read_matrix(&a.input)?;
    Outcome::json(&json!({
        "rank": commmatrix::linear_rank(&c),
        "psd_lower": commmatrix::psd_lower_bound(&c),
        "nonneg_lower": commmatrix::nonneg_lower_bound(&c),
        "rectangle_cover": commmatrix::rectangle_cover_number(&c).ok(),
        "distinguishable_rows": commmatrix::distinguishable_rows(&c),
    }))
}

fn protocol_run(a: &RunArgs, format: Format) -> Result<Outcome, Failure> {
    let t = match a.scheme {
        SchemeArg::Quantum => protocol::run_quantum(a.length, &a.parties, a.seed)?,
        SchemeArg::Classical4 => protocol::run_classical4(a.length, a.seed)?,
        SchemeArg::Classical3 => {
            return Err(Failure::Usage("the classical3 scheme is analytic only; use `protocol leakage --scheme`".into()))
        }
    };
    if format == Format::Csv {
        let (header, rows) = t.csv_records();
        return Ok(Outcome { payload: Payload::Table(header, rows), seed: Some(a.seed), failed: None });
    }
    Ok(Outcome::json(&t)?.seeded(Some(a.seed)))
}

fn protocol_verify(a: &PartyArgs) -> Result<Outcome, Failure> {
    let t: Transcript = parse_json(&a.input)?;
    let verdict = protocol::verify_disagreement(&t, &a.party)?;
    Ok(Outcome::json(&verdict)?.failing_if(verdict != Verdict::Ok, || format!("{} agrees with the sender", a.party)))
}

fn protocol_leakage(a: &LeakageArgs) -> Result<Outcome, Failure> {
    let report = match (&a.input, a.scheme) {
        (Some(path), _) => protocol::leakage_report(&parse_json(path)?, &a.party)?,
        (None, Some(s)) => protocol::leakage_analytic(s.into()),
        (None, None) => unreachable!("clap requires a source"),
    };
    Outcome::json(&report)
}

fn protocol_tag(cmd: &TagCommand) -> Result<Outcome, Failure> {
    match cmd {
        TagCommand::Issue(a) => {
            let t: Transcript = parse_json(&a.party.input)?;
            Outcome::json(&protocol::issue_tag(&t, &a.party.party, &a.slots)?)
        }
        TagCommand::Check(a) => {
            let t: Transcript = parse_json(&a.input)?;
            let tag: AuthTag = parse_json(&a.tag)?;
            let verdict = protocol::check_tag(t.sender(), &tag)?;
            Ok(Outcome::json(&verdict)?.failing_if(verdict != TagVerdict::Accept, || "tag rejected".into()))
        }
        TagCommand::Rate(a) => Outcome::json(&json!({ "k": a.k, "acceptance": protocol::forgery_acceptance(a.k) })),
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    let csv_ok = matches!(
        cli.command,
        Command::Matrix(MatrixCommand::Build(_)) | Command::Protocol(ProtocolCommand::Run(_))
    );
    if cli.format == Format::Csv && !csv_ok {
        return Err(Failure::Usage("--format csv is available for `matrix build` and `protocol run`".into()));
    }
    if cli.format == Format::Csv && cli.record {
        return Err(Failure::Usage("--record wraps JSON output and cannot be combined with --format csv".into()));
    }
    match &cli.command {
        Command::Validate(a) => validate(a),
        Command::Tasks(TasksCommand::Me(a)) => tasks_me(a),
        Command::Tasks(TasksCommand::Ua(a)) => tasks_ua(a),
        Command::Tasks(TasksCommand::Pi(a)) => tasks_pi(a),
        Command::Matrix(MatrixCommand::Build(a)) => matrix_build(a, cli.format),
        Command::Matrix(MatrixCommand::Factorize(a)) => matrix_factorize(a),
        Command::Matrix(MatrixCommand::Mindim(a)) => matrix_mindim(a),
        Command::Matrix(MatrixCommand::Bounds(a)) => matrix_bounds(a),
        Command::Protocol(ProtocolCommand::Run(a)) => protocol_run(a, cli.format),
        Command::Protocol(ProtocolCommand::Verify(a)) => protocol_verify(a),
        Command::Protocol(ProtocolCommand::Leakage(a)) => protocol_leakage(a),
        Command::Protocol(ProtocolCommand::Tag(c)) => protocol_tag(c),
    }
}

fn emit(out: &mut impl Write, payload: Payload, record: Option<(Vec<String>, Option<u64>)>) -> io::Result<()> {
    match payload {
        Payload::Json(value) => {
            let value = match record {
                Some((command, seed)) => json!({ "command": command, "version": VERSION, "seed": seed, "payload": value }),
                None => value,
            };
            serde_json::to_writer(&mut *out, &value)?;
            writeln!(out)
        }
        Payload::Table(header, rows) => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&header)?;
            for row in rows {
                w.write_record(&row)?;
            }
            w.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    let start = Instant::now();
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error: {}", f.message());
            return ExitCode::from(f.code());
        }
    };
    let record = cli.record.then(|| (std::env::args().skip(1).collect(), outcome.seed));
    if let Err(e) = emit(&mut io::stdout().lock(), outcome.payload, record) {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(1);
    }
    if cli.record {
        eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    }
    match outcome.failed {
        Some(why) => {
            eprintln!("threshold not met: {why}");
            ExitCode::from(2)
        }
        None => ExitCode::SUCCESS,
    }
}
