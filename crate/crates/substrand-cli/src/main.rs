//! Command-line front end for the `substrand` library.
//!
//! Every subcommand is a thin wrapper over a library call: inputs are
//! parsed, one library function runs, and its result is rendered either as
//! plain text or as a versioned JSON report (`--json`, schema `v1`).
//!
//! Exit codes: `0` success, `1` domain failure (reconstruction failed, a
//! constraint is violated, a codeword does not decode), `2` usage error
//! (bad flags, unreadable files, malformed inputs, invalid parameters).

use std::fs;
use std::io::Read as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{ArgGroup, Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use substrand::bits::BitString;
use substrand::codec::{auto_slack, count_distant_with_limit, ld_decode, ld_encode, CodecParams};
use substrand::coverage::{monte_carlo_coverage, rate_sweep, required_reads, RateSweepConfig};
use substrand::lossy::count_lrec_with_limit;
use substrand::registry::{
    constraint_check, constraint_names, reconstructor, reconstructor_names, CheckOptions,
    ReconstructOptions,
};
use substrand::spectrum::{multispectrum, Spectrum};

const JSON_SCHEMA: &str = "v1";

#[derive(Parser)]
#[command(
    name = "substrand",
    version,
    about = "Substring-spectrum codes: spectra, noisy channels, reconstruction, and window-distant encoding",
    propagate_version = true
)]
struct Cli {
    /// Emit a machine-readable JSON report (schema v1) on standard output.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for randomized operations (damage, simulate-reads).
    #[arg(long, global = true, env = "SUBSTRAND_SEED", default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the full window spectrum of a binary string.
    Spectrum(SpectrumArgs),
    /// Drop or corrupt reads in a spectrum, reproducibly under --seed.
    Damage(DamageArgs),
    /// Rebuild a string from a spectrum.
    Reconstruct(ReconstructArgs),
    /// Encode a message into a window-distant codeword.
    Encode(CodecArgs),
    /// Decode a codeword back into its message.
    Decode(CodecArgs),
    /// Test a string against a reconstruction-code constraint.
    Check(CheckArgs),
    /// Count qualifying strings exhaustively, or sweep rates over a schedule.
    #[command(subcommand)]
    Enumerate(EnumerateCommand),
    /// Plan read counts for spectrum coverage and measure the failure rate.
    SimulateReads(SimulateReadsArgs),
}

#[derive(Args)]
struct SpectrumArgs {
    /// Window length L: one read per start position 1..=n−L+1.
    #[arg(short = 'L', long = "window-len")]
    window_len: usize,

    /// The binary string, as a literal 0/1 argument.
    input: Option<String>,

    /// Read the binary string from this file instead (stdin if neither).
    #[arg(long, conflicts_with = "input")]
    file: Option<PathBuf>,

    /// Write the spectrum file here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Corruption request "T:S": flip S distinct positions in each of T reads.
#[derive(Clone, Copy, Debug)]
struct ErrSpec {
    reads: usize,
    flips: usize,
}

impl FromStr for ErrSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (t, f) = s
            .split_once(':')
            .ok_or_else(|| format!("expected T:S (e.g. 3:1), got {s:?}"))?;
        Ok(ErrSpec {
            reads: t.parse().map_err(|e| format!("bad read count {t:?}: {e}"))?,
            flips: f.parse().map_err(|e| format!("bad flip count {f:?}: {e}"))?,
        })
    }
}

#[derive(Args)]
#[command(group = ArgGroup::new("damage-kind").required(true).args(["lose", "err"]))]
struct DamageArgs {
    /// Drop this many reads, chosen uniformly without replacement.
    #[arg(long, value_name = "N")]
    lose: Option<usize>,

    /// Corrupt T reads (uniform without replacement) with S substitutions
    /// each, at S distinct in-read positions.
    #[arg(long, value_name = "T:S")]
    err: Option<ErrSpec>,

    /// Spectrum file to damage (stdin if omitted).
    input: Option<PathBuf>,

    /// Write the damaged spectrum here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Strategy: lossy (dropped reads), majority (per-position vote),
    /// erec (trimmed-consensus search).
    #[arg(long)]
    mode: String,

    /// Noise budget t: maximum dropped (lossy) or corrupted
    /// (majority, erec) reads.
    #[arg(short = 't', long = "budget")]
    budget: usize,

    /// Per-read substitution radius s (majority and erec).
    #[arg(short = 's', long = "radius", default_value_t = 0)]
    radius: usize,

    /// Spectrum file to reconstruct from (stdin if omitted).
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug)]
enum SlackArg {
    Auto,
    Fixed(usize),
}

impl FromStr for SlackArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            Ok(SlackArg::Auto)
        } else {
            s.parse()
                .map(SlackArg::Fixed)
                .map_err(|e| format!("expected an integer or \"auto\", got {s:?}: {e}"))
        }
    }
}

#[derive(Args)]
struct CodecArgs {
    /// Codeword length n; messages carry n−1 bits.
    #[arg(short = 'n', long = "length")]
    length: usize,

    /// Window distance d: codeword windows are pairwise at Hamming
    /// distance >= d.
    #[arg(short = 'd', long = "distance")]
    distance: usize,

    /// Length slack c (window length grows with it), or "auto" to pick the
    /// smallest slack whose headers always shrink the string.
    #[arg(long, default_value = "auto")]
    slack: SlackArg,

    /// The message or codeword, as a literal 0/1 argument.
    input: Option<String>,

    /// Read the message or codeword from this file instead (stdin if
    /// neither).
    #[arg(long, conflicts_with = "input")]
    file: Option<PathBuf>,

    /// Write the result here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Constraint family: lrec (loss-channel shape), erec (error-channel
    /// shape), distant (pairwise window distance).
    #[arg(long)]
    constraint: String,

    /// Window length L.
    #[arg(short = 'L', long = "window-len")]
    window_len: usize,

    /// Noise budget t (lrec, erec).
    #[arg(short = 't', long = "budget", default_value_t = 0)]
    budget: usize,

    /// Per-read substitution radius s (erec).
    #[arg(short = 's', long = "radius", default_value_t = 0)]
    radius: usize,

    /// Pairwise window distance d (distant).
    #[arg(short = 'd', long = "distance", default_value_t = 1)]
    distance: usize,

    /// The binary string, as a literal 0/1 argument.
    input: Option<String>,

    /// Read the binary string from this file instead (stdin if neither).
    #[arg(long, conflicts_with = "input")]
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum EnumerateCommand {
    /// Count length-n strings whose L-windows are pairwise at Hamming
    /// distance >= d. The reported rate is log2(count)/n.
    Distant(EnumerateDistantArgs),
    /// Count length-n strings satisfying the loss-channel constraints at
    /// (L, t). The reported rate is log2(count)/n.
    Lrec(EnumerateLrecArgs),
    /// Count both families over the schedule L = ceil(a*log2 n) +
    /// floor(t/3) + 1, t = ceil(b*log2 n), reporting rates per n.
    Sweep(EnumerateSweepArgs),
}

#[derive(Args)]
struct EnumerateDistantArgs {
    /// String length n.
    #[arg(short = 'n', long = "length")]
    length: usize,
    /// Window length L.
    #[arg(short = 'L', long = "window-len")]
    window_len: usize,
    /// Pairwise window distance d.
    #[arg(short = 'd', long = "distance", default_value_t = 1)]
    distance: usize,
    /// Largest n the exhaustive enumeration will attempt.
    #[arg(long, default_value_t = 22)]
    limit: usize,
}

#[derive(Args)]
struct EnumerateLrecArgs {
    /// String length n.
    #[arg(short = 'n', long = "length")]
    length: usize,
    /// Window length L.
    #[arg(short = 'L', long = "window-len")]
    window_len: usize,
    /// Loss budget t.
    #[arg(short = 't', long = "budget", default_value_t = 0)]
    budget: usize,
    /// Largest n the exhaustive enumeration will attempt.
    #[arg(long, default_value_t = 22)]
    limit: usize,
}

#[derive(Args)]
struct EnumerateSweepArgs {
    /// Window growth factor a in L = ceil(a*log2 n) + floor(t/3) + 1
    /// (base-2 logarithm); requires a > 1 + b/3.
    #[arg(short = 'a', long = "window-factor")]
    window_factor: f64,
    /// Budget growth factor b in t = ceil(b*log2 n) (base-2 logarithm);
    /// requires 0 <= b < 3.
    #[arg(short = 'b', long = "budget-factor", default_value_t = 0.0)]
    budget_factor: f64,
    /// String lengths to tabulate, comma separated.
    #[arg(short = 'n', long = "lengths", value_delimiter = ',', required = true)]
    lengths: Vec<usize>,
    /// Largest n the exhaustive enumeration will attempt; larger rows are
    /// skipped with a notice.
    #[arg(long, default_value_t = 22)]
    limit: usize,
}

#[derive(Args)]
struct SimulateReadsArgs {
    /// String length n.
    #[arg(short = 'n', long = "length")]
    length: usize,
    /// Window length L.
    #[arg(short = 'L', long = "window-len")]
    window_len: usize,
    /// Failure budget epsilon in (0, 1). The planned read count uses
    /// natural logarithms: M = ceil(n * (ln n + ln(1/epsilon)/(t+1))).
    #[arg(short = 'e', long = "epsilon")]
    epsilon: f64,
    /// Tolerated number of window positions left unread.
    #[arg(short = 't', long = "budget", default_value_t = 0)]
    budget: usize,
    /// Monte-Carlo trials.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Override the read count instead of using the planned M.
    #[arg(long)]
    reads: Option<u64>,
}

/// A failed run: `Usage` exits 2, `Domain` exits 1. Messages go to
/// standard error.
enum CliError {
    Usage(String),
    Domain(String),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl From<substrand::Error> for CliError {
    fn from(e: substrand::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    match &cli.command {
        Command::Spectrum(args) => cmd_spectrum(cli, args),
        Command::Damage(args) => cmd_damage(cli, args),
        Command::Reconstruct(args) => cmd_reconstruct(cli, args),
        Command::Encode(args) => cmd_codec(cli, args, true),
        Command::Decode(args) => cmd_codec(cli, args, false),
        Command::Check(args) => cmd_check(cli, args),
        Command::Enumerate(sub) => cmd_enumerate(cli, sub),
        Command::SimulateReads(args) => cmd_simulate_reads(cli, args),
    }
}

/// Reads a literal argument, a `--file`, or standard input (in that
/// priority), returning the raw text.
fn read_text_input(literal: &Option<String>, file: &Option<PathBuf>) -> Result<String, CliError> {
    if let Some(s) = literal {
        return Ok(s.clone());
    }
    if let Some(path) = file {
        return fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())));
    }
    let mut buf = String::new();
    std::io::stdin()
        .read_to_string(&mut buf)
        .map_err(|e| usage(format!("cannot read standard input: {e}")))?;
    Ok(buf)
}

fn parse_bitstring(text: &str) -> Result<BitString, CliError> {
    text.trim()
        .parse()
        .map_err(|e: substrand::Error| usage(e.to_string()))
}

fn read_spectrum_input(file: &Option<PathBuf>) -> Result<Spectrum, CliError> {
    let text = match file {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?,
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| usage(format!("cannot read standard input: {e}")))?;
            buf
        }
    };
    Spectrum::parse_text(&text).map_err(|e| usage(e.to_string()))
}

/// Writes the primary artifact: to `--output` when given, else to standard
/// output — unless `--json` owns standard output, in which case nothing is
/// printed here.
fn write_artifact(
    cli: &Cli,
    output: &Option<PathBuf>,
    content: &str,
) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, content)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            if !cli.json {
                print!("{content}");
            }
            Ok(())
        }
    }
}

fn print_json(value: &serde_json::Value) {
    println!("{value}");
}

fn spectrum_json(command: &str, u: &Spectrum) -> serde_json::Value {
    json!({
        "schema": JSON_SCHEMA,
        "command": command,
        "read_len": u.read_len(),
        "read_count": u.len(),
        "reads": u.reads().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
    })
}

fn cmd_spectrum(cli: &Cli, args: &SpectrumArgs) -> Result<ExitCode, CliError> {
    let w = parse_bitstring(&read_text_input(&args.input, &args.file)?)?;
    let u = multispectrum(&w, args.window_len)?;
    write_artifact(cli, &args.output, &u.to_text())?;
    if cli.json {
        print_json(&spectrum_json("spectrum", &u));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_damage(cli: &Cli, args: &DamageArgs) -> Result<ExitCode, CliError> {
    let full = read_spectrum_input(&args.input)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);

    let (damaged, detail) = if let Some(n) = args.lose {
        if n >= full.len() {
            return Err(usage(format!(
                "cannot drop {n} of {} reads: at least one read must survive",
                full.len()
            )));
        }
        let drop: Vec<usize> = rand::seq::index::sample(&mut rng, full.len(), n).into_vec();
        let kept: Vec<BitString> = full
            .reads()
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, r)| r.clone())
            .collect();
        let u = Spectrum::from_reads(kept)?;
        (u, json!({ "kind": "lose", "dropped": n }))
    } else {
        let spec = args.err.expect("clap guarantees one damage kind");
        if spec.reads > full.len() {
            return Err(usage(format!(
                "cannot corrupt {} of {} reads",
                spec.reads,
                full.len()
            )));
        }
        if spec.flips > full.read_len() {
            return Err(usage(format!(
                "cannot flip {} distinct positions in reads of length {}",
                spec.flips,
                full.read_len()
            )));
        }
        let targets: Vec<usize> =
            rand::seq::index::sample(&mut rng, full.len(), spec.reads).into_vec();
        let mut reads: Vec<BitString> = full.reads().to_vec();
        for i in targets {
            let positions =
                rand::seq::index::sample(&mut rng, full.read_len(), spec.flips).into_vec();
            for p in positions {
                reads[i].flip(p + 1);
            }
        }
        let u = Spectrum::from_reads(reads)?;
        (
            u,
            json!({ "kind": "err", "corrupted": spec.reads, "flips_per_read": spec.flips }),
        )
    };

    write_artifact(cli, &args.output, &damaged.to_text())?;
    if cli.json {
        let mut report = spectrum_json("damage", &damaged);
        report["damage"] = detail;
        report["seed"] = json!(cli.seed);
        print_json(&report);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_reconstruct(cli: &Cli, args: &ReconstructArgs) -> Result<ExitCode, CliError> {
    let strategy = reconstructor(&args.mode).ok_or_else(|| {
        usage(format!(
            "unknown mode {:?}; available: {}",
            args.mode,
            reconstructor_names().join(", ")
        ))
    })?;
    let u = read_spectrum_input(&args.input)?;
    let opts = ReconstructOptions {
        t: args.budget,
        s: args.radius,
    };
    let outcome = strategy.reconstruct(&u, &opts)?;

    match outcome.reconstruction() {
        Some(r) => {
            if cli.json {
                print_json(&json!({
                    "schema": JSON_SCHEMA,
                    "command": "reconstruct",
                    "mode": strategy.name(),
                    "reconstructed": true,
                    "value": r.value.to_string(),
                    "semantics": r.semantics.name(),
                    "start_offset_bounds": [r.start_offset_bounds.0, r.start_offset_bounds.1],
                    "ambiguous": r.ambiguous,
                }));
            } else {
                println!("{}", r.value);
            }
            Ok(ExitCode::SUCCESS)
        }
        None => {
            let f = outcome.failure().expect("outcome is success or failure");
            if cli.json {
                print_json(&json!({
                    "schema": JSON_SCHEMA,
                    "command": "reconstruct",
                    "mode": strategy.name(),
                    "reconstructed": false,
                    "failure": { "kind": f.kind.name(), "detail": f.detail },
                }));
            }
            eprintln!("reconstruction failed ({}): {}", f.kind.name(), f.detail);
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_codec(cli: &Cli, args: &CodecArgs, encode: bool) -> Result<ExitCode, CliError> {
    let slack = match args.slack {
        SlackArg::Auto => auto_slack(args.length, args.distance)?,
        SlackArg::Fixed(c) => c,
    };
    let params = CodecParams::new(args.length, args.distance, slack)?;
    let input = parse_bitstring(&read_text_input(&args.input, &args.file)?)?;

    let (value, command) = if encode {
        let x = ld_encode(&input, &params).map_err(|e| match e {
            substrand::Error::EliminationStuck { .. } => CliError::Domain(e.to_string()),
            other => usage(other.to_string()),
        })?;
        (x, "encode")
    } else {
        let w = ld_decode(&input, &params).map_err(|e| CliError::Domain(e.to_string()))?;
        (w, "decode")
    };

    write_artifact(cli, &args.output, &format!("{value}\n"))?;
    if cli.json {
        print_json(&json!({
            "schema": JSON_SCHEMA,
            "command": command,
            "length": args.length,
            "distance": args.distance,
            "slack": slack,
            "window_len": params.big_l,
            "value": value.to_string(),
        }));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(cli: &Cli, args: &CheckArgs) -> Result<ExitCode, CliError> {
    let check = constraint_check(&args.constraint).ok_or_else(|| {
        usage(format!(
            "unknown constraint {:?}; available: {}",
            args.constraint,
            constraint_names().join(", ")
        ))
    })?;
    let w = parse_bitstring(&read_text_input(&args.input, &args.file)?)?;
    let opts = CheckOptions {
        big_l: args.window_len,
        t: args.budget,
        s: args.radius,
        d: args.distance,
    };
    let report = check.check(&w, &opts)?;

    if cli.json {
        let violation = report.violation.as_ref().map(|v| {
            json!({
                "constraint": v.constraint,
                "witness": [v.witness.0, v.witness.1],
                "window_len": v.window_len,
                "detail": v.detail,
            })
        });
        print_json(&json!({
            "schema": JSON_SCHEMA,
            "command": "check",
            "family": check.name(),
            "satisfied": report.satisfied,
            "violation": violation,
        }));
    } else if report.satisfied {
        println!("satisfied");
    } else if let Some(v) = &report.violation {
        println!(
            "violated {}: windows ({}, {}) — {}",
            v.constraint, v.witness.0, v.witness.1, v.detail
        );
    }
    Ok(if report.satisfied {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn rate_of(count: u64, n: usize) -> f64 {
    if count == 0 {
        f64::NEG_INFINITY
    } else {
        (count as f64).log2() / n as f64
    }
}

fn cmd_enumerate(cli: &Cli, sub: &EnumerateCommand) -> Result<ExitCode, CliError> {
    match sub {
        EnumerateCommand::Distant(a) => {
            let count = count_distant_with_limit(a.length, a.window_len, a.distance, a.limit)?;
            if cli.json {
                print_json(&json!({
                    "schema": JSON_SCHEMA,
                    "command": "enumerate-distant",
                    "length": a.length,
                    "window_len": a.window_len,
                    "distance": a.distance,
                    "count": count,
                    "rate": rate_of(count, a.length),
                }));
            } else {
                println!("{count}");
            }
        }
        EnumerateCommand::Lrec(a) => {
            let count = count_lrec_with_limit(a.length, a.window_len, a.budget, a.limit)?;
            if cli.json {
                print_json(&json!({
                    "schema": JSON_SCHEMA,
                    "command": "enumerate-lrec",
                    "length": a.length,
                    "window_len": a.window_len,
                    "budget": a.budget,
                    "count": count,
                    "rate": rate_of(count, a.length),
                }));
            } else {
                println!("{count}");
            }
        }
        EnumerateCommand::Sweep(a) => {
            let config = RateSweepConfig::new(a.window_factor, a.budget_factor, a.lengths.clone())?
                .with_limit(a.limit);
            let report = rate_sweep(&config)?;
            if cli.json {
                print_json(&json!({
                    "schema": JSON_SCHEMA,
                    "command": "enumerate-sweep",
                    "window_factor": a.window_factor,
                    "budget_factor": a.budget_factor,
                    "rows": report.rows.iter().map(|r| json!({
                        "length": r.n,
                        "window_len": r.big_l,
                        "budget": r.t,
                        "lrec_count": r.lrec_count,
                        "lrec_rate": r.lrec_rate,
                        "distant_count": r.distant_count,
                        "distant_rate": r.distant_rate,
                    })).collect::<Vec<_>>(),
                    "truncated": report.truncated,
                }));
            } else {
                println!("n\tL\tt\tlrec_count\tlrec_rate\tdistant_count\tdistant_rate");
                for r in &report.rows {
                    println!(
                        "{}\t{}\t{}\t{}\t{:.6}\t{}\t{:.6}",
                        r.n, r.big_l, r.t, r.lrec_count, r.lrec_rate, r.distant_count,
                        r.distant_rate
                    );
                }
                for n in &report.truncated {
                    eprintln!("notice: n={n} exceeds the enumeration limit; row skipped");
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate_reads(cli: &Cli, args: &SimulateReadsArgs) -> Result<ExitCode, CliError> {
    let (factor, planned) = required_reads(args.length, args.epsilon, args.budget)?;
    let reads = args.reads.unwrap_or(planned);
    let rate = monte_carlo_coverage(
        args.length,
        args.window_len,
        reads,
        args.budget,
        args.trials,
        cli.seed,
    )?;

    if cli.json {
        print_json(&json!({
            "schema": JSON_SCHEMA,
            "command": "simulate-reads",
            "length": args.length,
            "window_len": args.window_len,
            "epsilon": args.epsilon,
            "budget": args.budget,
            "coverage_factor": factor,
            "planned_reads": planned,
            "reads_used": reads,
            "trials": args.trials,
            "seed": cli.seed,
            "failure_rate": rate,
        }));
    } else {
        println!("coverage_factor={factor}");
        println!("planned_reads={planned}");
        println!("reads_used={reads}");
        println!("trials={}", args.trials);
        println!("failure_rate={rate}");
    }
    Ok(ExitCode::SUCCESS)
}
