use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cohq_core::config::parse_pairs;
use cohq_core::{emit_report, run_suite, CohqError, RunConfig};

#[derive(Parser)]
#[command(name = "cohq", version, about = "Verification suites for constrained two-mode oscillators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a check suite and write a report.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Model letter: A, B or C.
    #[arg(long)]
    model: Option<String>,
    #[arg(long = "r-sq", allow_hyphen_values = true)]
    r_sq: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    hbar: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    cutoff: Option<String>,
    /// `total` (n1+n2 <= N) or `per-mode` (n1, n2 <= N).
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    margin: Option<String>,
    /// Suite name, or `full`.
    #[arg(long)]
    suite: Option<String>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// json or csv.
    #[arg(long)]
    format: Option<String>,
    /// `key = value` config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` overrides, applied after the file and before flags.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Record wall-clock time in the report environment.
    #[arg(long)]
    timing: bool,
}

fn collect_pairs(args: &RunArgs) -> Result<BTreeMap<String, String>, CohqError> {
    let mut pairs = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CohqError::config("config", format!("{}: {e}", path.display())))?;
            parse_pairs(&text)?
        }
        None => BTreeMap::new(),
    };
    for item in &args.set {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CohqError::config("set", format!("expected KEY=VALUE, got `{item}`")))?;
        pairs.insert(k.trim().to_string(), v.trim().to_string());
    }
    let flags = [
        ("model", &args.model),
        ("r_sq", &args.r_sq),
        ("hbar", &args.hbar),
        ("cutoff", &args.cutoff),
        ("scheme", &args.scheme),
        ("margin", &args.margin),
        ("suite", &args.suite),
        ("format", &args.format),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            pairs.insert(k.to_string(), v.clone());
        }
    }
    if let Some(out) = &args.out {
        pairs.insert("out".into(), out.display().to_string());
    }
    if args.timing {
        pairs.insert("timing".into(), "true".into());
    }
    Ok(pairs)
}

fn run(args: &RunArgs) -> Result<bool, CohqError> {
    let cfg = RunConfig::from_pairs(&collect_pairs(args)?)?;
    let report = run_suite(&cfg, cfg.suite)?;
    let text = emit_report(&report, &cfg, cfg.format)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    eprintln!("{}", report.summary());
    Ok(report.pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run(args) = cli.command;
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
