//! `bgc`: simulate, sweep and verify the interactive gradient coding scheme.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bgc_core::harness::{
    simulate_with, sweep, verify, AdversarySpec, AssignmentSource, ControlledRule, GridSpec,
    HarnessError, SimulationConfig, StrategyName, VerifyTarget, CSV_HEADER,
};
use bgc_core::par::Execution;
use bgc_core::protocol::{replay, GroupingOrder};
use bgc_core::AssignmentKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

const SEED_ENV: &str = "BGC_SEED";

#[derive(Parser)]
#[command(name = "bgc", version, about = "Interactive Byzantine-resilient gradient coding simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the protocol once; writes a JSONL transcript and a CSV metrics row.
    Simulate(SimulateArgs),
    /// Run a parameter grid and aggregate the metrics.
    Sweep(SweepArgs),
    /// Run one of the exhaustive or randomized algebraic checks.
    Verify(VerifyArgs),
    /// Re-run the main node on a recorded transcript and print the gradient.
    Replay {
        transcript: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Grouping {
    Lowest,
    Shuffled,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    u: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    q: Option<u64>,
    /// cyclic, fractional, random, or the path of an assignment file.
    #[arg(long)]
    assignment: Option<String>,
    /// honest, random-always, random-initial-only, random-coin,
    /// tournament-liar, worked-example or symmetrization.
    #[arg(long)]
    adversary: Option<String>,
    /// Controlled workers: random, lowest, highest, or a list like 1,4.
    #[arg(long)]
    controlled: Option<String>,
    /// Run seed; defaults to $BGC_SEED, then the config file, then 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    grouping: Option<Grouping>,
    /// Output directory for transcript.jsonl and metrics.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON grid file; list flags override its values.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Values such as `4-8` or `1,4,9`.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    q: Option<u64>,
    /// Comma-separated assignment kinds.
    #[arg(long)]
    assignment: Option<String>,
    /// Comma-separated adversary names.
    #[arg(long)]
    adversary: Option<String>,
    /// Seeds per grid point.
    #[arg(long)]
    seeds: Option<u64>,
    /// First seed; defaults to $BGC_SEED, then the grid file, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for metrics.csv and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// lemma2, lemma3, theorem-optimality, vandermonde, cauchy, ecc, remark1,
    /// shuffled-grouping or all.
    which: String,
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Run(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(msg) => Failure::Usage(msg),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("{SEED_ENV}={v} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Run(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))
}

/// The value named in `file` if present there, else the environment default.
fn seed_from(file: Option<&serde_json::Value>, key: &str) -> Option<u64> {
    file.and_then(|v| v.get(key)).and_then(serde_json::Value::as_u64)
}

/// Parses `1,4-6,9` into `[1, 4, 5, 6, 9]`.
fn parse_list(text: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Usage(format!("cannot parse `{text}` as a list like 4-8 or 1,4,9"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().map_err(|_| bad())?;
                let hi: usize = hi.trim().parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                out.extend(lo..=hi);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

fn parse_controlled(text: &str) -> Result<ControlledRule, Failure> {
    Ok(match text {
        "random" => ControlledRule::Random,
        "lowest" => ControlledRule::Lowest,
        "highest" => ControlledRule::Highest,
        list => ControlledRule::List(parse_list(list)?),
    })
}

fn simulate_config(args: &SimulateArgs) -> Result<SimulationConfig, Failure> {
    let (mut config, raw) = match &args.config {
        Some(path) => {
            let text = read(path)?;
            let raw: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            (SimulationConfig::from_json(&text)?, Some(raw))
        }
        None => (SimulationConfig::default(), None),
    };
    macro_rules! set {
        ($($field:ident),*) => {$(
            if let Some(v) = args.$field {
                config.$field = v;
            }
        )*};
    }
    set!(n, s, u, p, d, q);
    if let Some(a) = &args.assignment {
        config.assignment = a.parse::<AssignmentSource>()?;
    }
    if let Some(a) = &args.adversary {
        let strategy: StrategyName = a.parse()?;
        config.adversary = AdversarySpec {
            strategy,
            ..config.adversary
        };
    }
    if let Some(c) = &args.controlled {
        config.adversary.controlled = parse_controlled(c)?;
    }
    config.seed = match args.seed {
        Some(seed) => seed,
        None => seed_from(raw.as_ref(), "seed")
            .or(env_seed()?)
            .unwrap_or(0),
    };
    if let Some(g) = args.grouping {
        config.grouping = match g {
            Grouping::Lowest => GroupingOrder::Lowest,
            Grouping::Shuffled => GroupingOrder::Shuffled { seed: config.seed },
        };
    }
    if let Some(dir) = &args.out {
        config.transcript = Some(dir.join("transcript.jsonl"));
        config.metrics = Some(dir.join("metrics.csv"));
    }
    config.validate()?;
    Ok(config)
}

fn run_simulate(args: SimulateArgs) -> Result<ExitCode, Failure> {
    let config = simulate_config(&args)?;
    let out = simulate_with(&config, None, execution(args.sequential))?;
    let csv = format!("{CSV_HEADER}\n{}\n", out.metrics.csv_row());
    if let Some(path) = &config.transcript {
        write(path, &out.transcript.to_jsonl())?;
    }
    match &config.metrics {
        Some(path) => write(path, &csv)?,
        None => print!("{csv}"),
    }
    let m = &out.metrics;
    eprintln!(
        "correct={} c={} C_oh={} rounds={} downlink_bits={} eliminated={:?} within_bounds={}",
        m.correct, m.c, m.c_oh, m.rounds, m.downlink_bits, m.eliminated, m.within_bounds
    );
    Ok(if m.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn sweep_grid(args: &SweepArgs) -> Result<GridSpec, Failure> {
    let (mut grid, raw) = match &args.grid {
        Some(path) => {
            let text = read(path)?;
            let raw: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            (GridSpec::from_json(&text)?, Some(raw))
        }
        None => (GridSpec::default(), None),
    };
    if let Some(v) = &args.n {
        grid.n = parse_list(v)?;
    }
    if let Some(v) = &args.s {
        grid.s = parse_list(v)?;
    }
    if let Some(v) = &args.u {
        grid.u = Some(parse_list(v)?);
    }
    if let Some(v) = &args.p {
        grid.p = parse_list(v)?;
    }
    if let Some(v) = &args.d {
        grid.d = parse_list(v)?;
    }
    if let Some(q) = args.q {
        grid.q = q;
    }
    if let Some(v) = &args.assignment {
        grid.assignments = v
            .split(',')
            .map(|k| {
                k.trim()
                    .parse::<AssignmentKind>()
                    .map_err(|e| Failure::Usage(e.to_string()))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(v) = &args.adversary {
        grid.adversaries = v
            .split(',')
            .map(|k| k.trim().parse::<StrategyName>().map_err(Failure::from))
            .collect::<Result<_, _>>()?;
    }
    if let Some(k) = args.seeds {
        grid.seeds = k;
    }
    grid.base_seed = match args.seed {
        Some(seed) => seed,
        None => seed_from(raw.as_ref(), "base_seed")
            .or(env_seed()?)
            .unwrap_or(0),
    };
    Ok(grid)
}

fn run_sweep(args: SweepArgs) -> Result<ExitCode, Failure> {
    let grid = sweep_grid(&args)?;
    let report = sweep(&grid, execution(args.sequential));
    let summary = serde_json::json!({
        "summary": report.summary,
        "rejected": report.rejected,
        "passed": report.passed(),
    });
    let summary = serde_json::to_string_pretty(&summary).expect("report serializes");
    match &args.out {
        Some(dir) => {
            write(&dir.join("metrics.csv"), &report.to_csv())?;
            write(&dir.join("summary.json"), &summary)?;
        }
        None => print!("{}", report.to_csv()),
    }
    let s = &report.summary;
    eprintln!(
        "runs={} rejected={} incorrect={} bound_violations={} aborted={} max_c={} max_C_oh={} max_rounds={}",
        s.runs,
        report.rejected.len(),
        s.incorrect,
        s.bound_violations,
        s.failures,
        s.max_c,
        s.max_c_oh,
        s.max_rounds
    );
    for bad in report.failing() {
        eprintln!("failed: {}{}", bad.csv_row(), bad.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default());
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn run_verify(args: VerifyArgs) -> Result<ExitCode, Failure> {
    let targets: Vec<VerifyTarget> = if args.which == "all" {
        VerifyTarget::ALL.to_vec()
    } else {
        vec![args.which.parse()?]
    };
    let mut ok = true;
    for t in targets {
        let report = verify(t, execution(args.sequential));
        println!(
            "{}: {} ({} checks, {} counterexamples)",
            report.target,
            if report.passed() { "pass" } else { "FAIL" },
            report.checks,
            report.counterexamples.len()
        );
        for note in &report.notes {
            println!("  {note}");
        }
        for c in &report.counterexamples {
            println!("  counterexample: {c}");
        }
        ok &= report.passed();
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn run_replay(path: &Path) -> Result<ExitCode, Failure> {
    let text = read(path)?;
    let gradient = replay(&text).map_err(|e| Failure::Run(e.to_string()))?;
    let values: Vec<u64> = gradient.iter().map(|x| x.value()).collect();
    println!("{}", serde_json::to_string(&values).expect("integers serialize"));
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => run_simulate(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Verify(args) => run_verify(args),
        Command::Replay { transcript } => run_replay(&transcript),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("bgc: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("bgc: {msg}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("4-8").unwrap(), vec![4, 5, 6, 7, 8]);
        assert_eq!(parse_list("1,4-5,9").unwrap(), vec![1, 4, 5, 9]);
        assert!(parse_list("5-4").is_err());
        assert!(parse_list("x").is_err());
        assert!(parse_list("").unwrap().is_empty());
    }

    #[test]
    fn controlled_rules() {
        assert_eq!(parse_controlled("lowest").unwrap(), ControlledRule::Lowest);
        assert_eq!(
            parse_controlled("2,3").unwrap(),
            ControlledRule::List(vec![2, 3])
        );
    }
}
