use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ndchaos::config::ConstructionKind;
use ndchaos_cli::{load_config, run_pipeline, summary_lines, Overrides, Stage};

/// Chaos-criteria toolkit for non-autonomous interval systems: checks
/// coupled-expansion hypotheses, constructs scrambled-set witnesses, and
/// measures orbit-pair statistics.
#[derive(Parser)]
#[command(name = "ndchaos", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the configured hypotheses; exits nonzero when a target fails.
    Verify(CommonArgs),
    /// Verify, then build witness streams, schedules and witness points.
    Construct(ConstructArgs),
    /// Full pipeline: verify, construct, simulate, and emit all artifacts.
    Stats(CommonArgs),
    /// Same as `stats`, plus a per-criterion summary on stdout.
    Report(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the index horizon.
    #[arg(long)]
    horizon: Option<u64>,
    /// Override the witness cylinder depth.
    #[arg(long)]
    depth: Option<usize>,
    /// Override the schedule level count.
    #[arg(long)]
    levels: Option<u32>,
    /// Override the parameter-sequence seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for the report and CSV artifacts.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Run on the induced system through the affine subsequence `a n + b`,
    /// for example `2n` or `2n+1`.
    #[arg(long)]
    induced: Option<String>,
    /// Require positive set separation instead of boundary-only overlap.
    #[arg(long)]
    strict_separation: bool,
    /// Continue to later stages even when a verify target failed.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which witness construction to build.
    #[arg(long, value_parser = parse_construction)]
    construction: Option<ConstructionKind>,
}

fn parse_construction(s: &str) -> Result<ConstructionKind, String> {
    match s {
        "liyorke" => Ok(ConstructionKind::Liyorke),
        "distributional" => Ok(ConstructionKind::Distributional),
        other => Err(format!(
            "unknown construction `{other}`; expected `liyorke` or `distributional`"
        )),
    }
}

fn overrides_from(args: &CommonArgs, construction: Option<ConstructionKind>) -> Overrides {
    Overrides {
        horizon: args.horizon,
        depth: args.depth,
        levels: args.levels,
        seed: args.seed,
        strict_separation: args.strict_separation,
        induced: args.induced.clone(),
        construction,
        force: args.force,
    }
}

fn run(args: &CommonArgs, overrides: Overrides, stage: Stage, print_summary: bool) -> ExitCode {
    let result = load_config(&args.config)
        .and_then(|cfg| run_pipeline(cfg, &overrides, stage))
        .and_then(|output| {
            let written = ndchaos_cli::write_outputs(&output, &args.out_dir)?;
            Ok((output, written))
        });
    match result {
        Ok((output, written)) => {
            if print_summary {
                for line in summary_lines(&output.report) {
                    println!("{line}");
                }
            }
            for path in &written {
                eprintln!("wrote {}", path.display());
            }
            if output.hypotheses_ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("hypothesis failure: see report for recorded verdicts");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify(args) => run(&args, overrides_from(&args, None), Stage::Verify, false),
        Command::Construct(args) => {
            let o = overrides_from(&args.common, args.construction);
            run(&args.common, o, Stage::Construct, false)
        }
        Command::Stats(args) => run(&args, overrides_from(&args, None), Stage::Stats, false),
        Command::Report(args) => run(&args, overrides_from(&args, None), Stage::Stats, true),
    }
}
