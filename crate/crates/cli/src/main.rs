use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tsub::complete::{find_complete_subdivision, find_digraph_subdivision, FinderParams};
use tsub::exec::{with_workers, Exec};
use tsub::experiment::{
    scan_summary, soundness_summary, soundness_sweep, tt_span, write_csv, CsvHeader, FinderKind, HostKind,
    SoundnessConfig, TtSpanConfig,
};
use tsub::finder::Outcome;
use tsub::oracle::{oracle_subdivision, scan_d_lower, OracleQuery, OracleResult, ScanConfig, DEFAULT_NODE_BUDGET};
use tsub::subdivision::{verify, PatternDigraph, Witness};
use tsub::tournament::{generate, Generator, Tournament};
use tsub::transitive::{find_one_subdivision, find_tt_len3, TransitiveParams};

const NOT_FOUND: u8 = 2;

#[derive(Parser, Serialize)]
#[command(name = "tsub", version, about = "Find and check subdivisions in tournaments")]
struct Cli {
    /// Worker threads for sweeps (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Generate a tournament file
    Gen(GenArgs),
    /// Check a witness against a tournament
    Verify(VerifyArgs),
    /// Run a finder
    #[command(subcommand)]
    Find(FindCommand),
    /// Exhaustive search on small hosts
    Oracle(OracleArgs),
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Kind {
    Random,
    Transitive,
    Rotational,
    Blowup,
    Stacked,
}

#[derive(Args, Serialize)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Vertex count (class size for `blowup`)
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    witness: PathBuf,
    #[arg(long, default_value_t = 3)]
    max_len: usize,
    #[arg(long)]
    exact_len: Option<usize>,
}

#[derive(Args, Serialize)]
struct FindArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    /// Threshold multiplier, decimal or a/b
    #[arg(long, default_value = "1", value_parser = parse_scale)]
    scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct DigraphArgs {
    #[arg(long)]
    input: PathBuf,
    /// `complete:K`, `transitive:K` or `edges:K:a-b,c-d,…`
    #[arg(long, value_parser = parse_pattern)]
    pattern: PatternDigraph,
    #[arg(long, default_value = "1", value_parser = parse_scale)]
    scale: f64,
    /// `C` in the requirement δ⁺ ≥ C·|E|
    #[arg(long)]
    constant: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FindCommand {
    Complete(FindArgs),
    Digraph(DigraphArgs),
    Tt3(FindArgs),
    Onesub(FindArgs),
}

#[derive(Args, Serialize)]
struct OracleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = parse_pattern)]
    pattern: PatternDigraph,
    #[arg(long, default_value_t = 3)]
    max_len: usize,
    #[arg(long)]
    exact_len: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ExperimentCommand {
    /// Sampled lower-bound evidence for d(k)
    ScanDk(ScanArgs),
    SoundnessSweep(SweepArgs),
    TtSpan(SpanArgs),
}

#[derive(Args, Serialize)]
struct ScanArgs {
    #[arg(long)]
    k: usize,
    /// Host sizes, `a..b` (inclusive) or a single value
    #[arg(long, value_parser = parse_range)]
    n: (usize, usize),
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    max_len: usize,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FinderArg {
    Complete,
    Tt3,
    Onesub,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum HostArg {
    Random,
    Stacked,
    Mixed,
}

#[derive(Args, Serialize)]
struct SweepArgs {
    #[arg(long, value_enum, default_value = "complete")]
    finder: FinderArg,
    #[arg(long, value_enum, default_value = "mixed")]
    host: HostArg,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value = "1", value_parser = parse_scale)]
    scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SpanArgs {
    /// Target orders, `a..b` (inclusive) or a single value
    #[arg(long, value_parser = parse_range)]
    k: (usize, usize),
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value = "1", value_parser = parse_scale)]
    scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_scale(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            a / b
        }
        None => s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(format!("scale must be positive, got {s:?}"))
    }
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad range {s:?}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => (num(s)?, num(s)?),
    };
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok((a, b))
}

fn parse_pattern(s: &str) -> Result<PatternDigraph, String> {
    let mut parts = s.splitn(3, ':');
    let kind = parts.next().unwrap_or_default();
    let k: usize = parts
        .next()
        .and_then(|k| k.parse().ok())
        .ok_or_else(|| format!("pattern {s:?} lacks a vertex count"))?;
    let built = match kind {
        "complete" => PatternDigraph::complete(k),
        "transitive" => PatternDigraph::transitive(k),
        "edges" => {
            let mut edges = Vec::new();
            for e in parts.next().unwrap_or_default().split(',').filter(|e| !e.is_empty()) {
                let (a, b) = e.split_once('-').ok_or_else(|| format!("bad edge {e:?}"))?;
                let a = a.parse().map_err(|_| format!("bad edge {e:?}"))?;
                let b = b.parse().map_err(|_| format!("bad edge {e:?}"))?;
                edges.push((a, b));
            }
            PatternDigraph::new(k, edges)
        }
        other => return Err(format!("unknown pattern kind {other:?}")),
    };
    built.map_err(|e| e.to_string())
}

fn read_tournament(path: &Path) -> Result<Tournament> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.parse().with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Writes the witness or failure trace; 0 on a witness, 2 otherwise.
fn report(t: &Tournament, outcome: Outcome, config: serde_json::Value, out: Option<&Path>) -> Result<u8> {
    match outcome {
        Outcome::Found(sub) => {
            let mut w = Witness::new(t, &sub);
            w.config = Some(config);
            emit(out, &to_json(&w)?)?;
            Ok(0)
        }
        Outcome::Failed(trace) => {
            let doc = serde_json::json!({ "failure": trace, "config": config });
            emit(out, &to_json(&doc)?)?;
            eprintln!("no subdivision found: {} ({})", trace.reason, trace.phase);
            Ok(NOT_FOUND)
        }
    }
}

fn gen(a: &GenArgs) -> Result<u8> {
    let g = match a.kind {
        Kind::Random => Generator::Random { n: a.n },
        Kind::Transitive => Generator::Transitive { n: a.n },
        Kind::Rotational => Generator::Rotational { n: a.n },
        Kind::Blowup => Generator::BlowupCyclicTriangle { class_size: a.n },
        Kind::Stacked => Generator::StackedTriangles {
            blocks: a.n / 5,
            tail: a.n - 3 * (a.n / 5),
        },
    };
    let t = generate(g, a.seed)?;
    emit(a.out.as_deref(), &t.to_text())?;
    Ok(0)
}

fn verify_cmd(a: &VerifyArgs) -> Result<u8> {
    let t = read_tournament(&a.input)?;
    let text = fs::read_to_string(&a.witness).with_context(|| format!("reading {}", a.witness.display()))?;
    let w: Witness = serde_json::from_str(&text).context("parsing witness")?;
    let report = verify(&t, &w.subdivision(), a.max_len, a.exact_len);
    let hash_ok = w.host_hash == t.hash_hex();
    let valid = report.is_valid() && hash_ok;
    let doc = serde_json::json!({
        "valid": valid,
        "host_hash_matches": hash_ok,
        "report": report,
    });
    print!("{}", to_json(&doc)?);
    Ok(if valid { 0 } else { 1 })
}

fn find(cmd: &FindCommand, config: serde_json::Value) -> Result<u8> {
    let (input, out) = match cmd {
        FindCommand::Complete(a) | FindCommand::Tt3(a) | FindCommand::Onesub(a) => (&a.input, &a.out),
        FindCommand::Digraph(a) => (&a.input, &a.out),
    };
    let t = read_tournament(input)?;
    let outcome = match cmd {
        FindCommand::Complete(a) => find_complete_subdivision(&t, a.k, &FinderParams::scaled(a.k, a.scale)?)?.outcome,
        FindCommand::Digraph(a) => {
            let mut p = FinderParams::scaled(a.pattern.k, a.scale)?;
            if let Some(c) = a.constant {
                p.digraph_constant = c;
            }
            find_digraph_subdivision(&t, &a.pattern, &p)?.outcome
        }
        FindCommand::Tt3(a) => find_tt_len3(&t, a.k, &TransitiveParams::scaled(a.scale)?)?.outcome,
        FindCommand::Onesub(a) => find_one_subdivision(&t, a.k, &TransitiveParams::scaled(a.scale)?)?.outcome,
    };
    report(&t, outcome, config, out.as_deref())
}

fn oracle(a: &OracleArgs, config: serde_json::Value) -> Result<u8> {
    let t = read_tournament(&a.input)?;
    let q = OracleQuery {
        exact_len: a.exact_len,
        ..OracleQuery::new(a.pattern.clone(), a.max_len).with_budget(a.budget)
    };
    let r = oracle_subdivision(&t, &q)?;
    let (status, witness, code) = match &r.result {
        OracleResult::Found(sub) => ("found", Some(Witness::new(&t, sub)), 0),
        OracleResult::NotFound => ("not_found", None, NOT_FOUND),
        OracleResult::BudgetExceeded => ("budget_exceeded", None, NOT_FOUND),
    };
    let doc = serde_json::json!({
        "result": status,
        "nodes": r.nodes,
        "witness": witness,
        "config": config,
    });
    emit(a.out.as_deref(), &to_json(&doc)?)?;
    Ok(code)
}

fn csv<R: Serialize>(
    experiment: &str,
    config: serde_json::Value,
    summary: Vec<String>,
    rows: &[R],
    timestamp: bool,
    out: Option<&Path>,
) -> Result<()> {
    for line in &summary {
        eprintln!("{line}");
    }
    let header = CsvHeader {
        experiment,
        config,
        summary,
        timestamp,
    };
    let mut buf = Vec::new();
    write_csv(&mut buf, &header, rows)?;
    emit(out, std::str::from_utf8(&buf)?)
}

fn experiment(cmd: &ExperimentCommand, config: serde_json::Value) -> Result<u8> {
    let exec = Exec::default();
    match cmd {
        ExperimentCommand::ScanDk(a) => {
            let cfg = ScanConfig {
                k: a.k,
                n_min: a.n.0,
                n_max: a.n.1,
                trials: a.trials,
                seed: a.seed,
                max_len: a.max_len,
                node_budget: a.budget,
                timings: a.timings,
            };
            let table = scan_d_lower(&cfg, exec)?;
            csv(
                "scan-dk",
                config,
                scan_summary(&table),
                &table.rows,
                a.timings,
                a.out.as_deref(),
            )?;
        }
        ExperimentCommand::SoundnessSweep(a) => {
            let cfg = SoundnessConfig {
                finder: match a.finder {
                    FinderArg::Complete => FinderKind::Complete,
                    FinderArg::Tt3 => FinderKind::Tt3,
                    FinderArg::Onesub => FinderKind::Onesub,
                },
                host: match a.host {
                    HostArg::Random => HostKind::Random,
                    HostArg::Stacked => HostKind::Stacked,
                    HostArg::Mixed => HostKind::Mixed,
                },
                k: a.k,
                n: a.n,
                trials: a.trials,
                scale: a.scale,
                seed: a.seed,
                timings: a.timings,
            };
            let rows = soundness_sweep(&cfg, exec)?;
            csv(
                "soundness-sweep",
                config,
                soundness_summary(&rows),
                &rows,
                a.timings,
                a.out.as_deref(),
            )?;
            if rows.iter().any(|r| r.verify == "fail") {
                bail!("a returned witness failed verification");
            }
        }
        ExperimentCommand::TtSpan(a) => {
            let cfg = TtSpanConfig {
                k_min: a.k.0,
                k_max: a.k.1,
                n: a.n,
                trials: a.trials,
                scale: a.scale,
                seed: a.seed,
                timings: a.timings,
            };
            let rows = tt_span(&cfg, exec)?;
            let summary = (a.k.0..=a.k.1)
                .map(|k| {
                    let of_k: Vec<_> = rows.iter().filter(|r| r.k == k).collect();
                    let found = of_k.iter().filter(|r| r.found).count();
                    let max_span = of_k.iter().filter(|r| r.found).map(|r| r.span).max();
                    format!(
                        "k={k} found={found}/{} max_span={}",
                        of_k.len(),
                        max_span.map_or("-".into(), |s| s.to_string())
                    )
                })
                .collect();
            csv("tt-span", config, summary, &rows, a.timings, a.out.as_deref())?;
        }
    }
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8> {
    let config = serde_json::to_value(cli)?;
    match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Find(c) => find(c, config),
        Command::Oracle(a) => oracle(a, config),
        Command::Experiment(c) => with_workers(cli.workers, || experiment(c, config)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
