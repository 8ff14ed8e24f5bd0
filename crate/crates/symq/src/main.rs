//! Command-line front end for the symmetrized-execution toolkit.
//!
//! Five subcommands cover the workflow: `simulate` runs one circuit
//! unsymmetrized under a noise model, `symmetrize` runs the full
//! variant pipeline, `vote-theory` prints exact aggregate-vote tables
//! for a given outcome distribution, `train-threshold` recommends a
//! vote threshold from training circuits, and `sweep-shots`
//! re-aggregates at several shot counts.
//!
//! Exit codes: 0 on success, 2 for configuration problems (including
//! malformed flags and config files), 3 for runtime failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use symq::circuit::parse_circuit;
use symq::harness::{
    emit_baseline, emit_report, load_config, run_baseline, run_experiment, run_shot_sweep,
    train_threshold, ExperimentConfig, ReportFormat, TrainingCircuit,
};
use symq::voting::{check_ratio_damping, small_g, OutcomeDistribution, VotingModel};
use symq::{Error, Result};

#[derive(Parser)]
#[command(
    name = "symq",
    version,
    about = "Symmetrized quantum-circuit simulation, aggregation, and vote analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured circuit once, unsymmetrized, under the
    /// configured noise model.
    Simulate(CommonArgs),
    /// Run the full symmetrized pipeline: sample transforms, simulate
    /// variants, aggregate, report.
    Symmetrize(CommonArgs),
    /// Print the exact voted distribution and ratio-damping table for an
    /// outcome distribution.
    VoteTheory(VoteTheoryArgs),
    /// Sweep vote thresholds on training circuits and recommend one.
    TrainThreshold(TrainThresholdArgs),
    /// Re-aggregate the experiment at several shot counts and report
    /// dispersion over seed replicas.
    SweepShots(SweepShotsArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, default_value = "json")]
    format: ReportFormat,
}

impl CommonArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = load_config(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct VoteTheoryArgs {
    /// Comma-separated outcome probabilities, summing to 1.
    #[arg(long = "h", value_name = "P1,P2,...")]
    h: String,
    /// Number of variants voting.
    #[arg(long)]
    m: usize,
    /// Vote threshold; defaults to a strict majority plus one.
    #[arg(long)]
    t: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Output format.
    #[arg(long, default_value = "json")]
    format: ReportFormat,
}

#[derive(Args)]
struct TrainThresholdArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Training circuit file; repeatable. Defaults to the config's
    /// circuit when omitted.
    #[arg(long = "training", value_name = "FILE")]
    training: Vec<PathBuf>,
}

#[derive(Args)]
struct SweepShotsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated shot counts, each within the config's shots.
    #[arg(long, value_name = "S1,S2,...")]
    grid: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => simulate(&args),
        Command::Symmetrize(args) => symmetrize(&args),
        Command::VoteTheory(args) => vote_theory(&args),
        Command::TrainThreshold(args) => train(&args),
        Command::SweepShots(args) => sweep(&args),
    }
}

fn announce(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn simulate(args: &CommonArgs) -> Result<()> {
    let cfg = args.load()?;
    let report = run_baseline(&cfg)?;
    let paths = emit_baseline(&report, args.format, &cfg.out_dir)?;
    announce(&paths);
    Ok(())
}

fn symmetrize(args: &CommonArgs) -> Result<()> {
    let cfg = args.load()?;
    let report = run_experiment(&cfg)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let paths = emit_report(&report, args.format, &cfg.out_dir)?;
    announce(&paths);
    Ok(())
}

/// Parses a comma-separated numeric list, reporting the offending field.
fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::Config(format!("invalid {what} entry {s:?}")))
        })
        .collect()
}

fn vote_theory(args: &VoteTheoryArgs) -> Result<()> {
    let h = OutcomeDistribution::new(parse_list(&args.h, "probability")?)?;
    let m = args.m;
    let t = match args.t {
        Some(t) => t,
        None => (m / 2 + 2).min(m).max(1),
    };
    let model = VotingModel::new(h.clone(), m, t)?;
    let g = small_g(&model)?;
    let damping = check_ratio_damping(&h, m, t)?;

    std::fs::create_dir_all(&args.out)?;
    let paths = match args.format {
        ReportFormat::Json => {
            let doc = serde_json::json!({
                "m": m,
                "t": t,
                "h": h.probabilities(),
                "g": g.probabilities(),
                "damping": {
                    "all_hold": damping.all_hold(),
                    "comparisons": damping.comparisons.iter().map(|c| {
                        serde_json::json!({
                            "smaller": c.smaller,
                            "larger": c.larger,
                            "ideal_ratio": c.ideal_ratio,
                            "voted_ratio": c.voted_ratio,
                            "margin": c.margin(),
                        })
                    }).collect::<Vec<_>>(),
                },
            });
            let path = args.out.join("vote_theory.json");
            let mut text = serde_json::to_string_pretty(&doc).expect("table serializes");
            text.push('\n');
            std::fs::write(&path, text)?;
            vec![path]
        }
        ReportFormat::Csv => {
            let mut table = String::from("state,h,g\n");
            for (i, (hp, gp)) in h.probabilities().iter().zip(g.probabilities()).enumerate() {
                table.push_str(&format!("{i},{hp},{gp}\n"));
            }
            let table_path = args.out.join("vote_table.csv");
            std::fs::write(&table_path, table)?;

            let mut pairs = String::from("smaller,larger,ideal_ratio,voted_ratio,margin\n");
            for c in &damping.comparisons {
                pairs.push_str(&format!(
                    "{},{},{},{},{}\n",
                    c.smaller,
                    c.larger,
                    c.ideal_ratio,
                    c.voted_ratio,
                    c.margin()
                ));
            }
            let pairs_path = args.out.join("damping.csv");
            std::fs::write(&pairs_path, pairs)?;
            vec![table_path, pairs_path]
        }
    };
    announce(&paths);
    Ok(())
}

fn train(args: &TrainThresholdArgs) -> Result<()> {
    let cfg = args.common.load()?;
    let training: Vec<TrainingCircuit> = if args.training.is_empty() {
        vec![TrainingCircuit::from_circuit(symq::harness::load_circuit(&cfg)?)?]
    } else {
        args.training
            .iter()
            .map(|path| {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::Config(format!("cannot read training circuit {}: {e}", path.display()))
                })?;
                TrainingCircuit::from_circuit(parse_circuit(&text)?)
            })
            .collect::<Result<_>>()?
    };
    let trained = train_threshold(&cfg, &training)?;
    println!("recommended threshold: {}", trained.recommended);

    std::fs::create_dir_all(&cfg.out_dir)?;
    let paths = match args.common.format {
        ReportFormat::Json => {
            let doc = serde_json::json!({
                "recommended": trained.recommended,
                "scores": trained.scores.iter().map(|&(t, f)| {
                    serde_json::json!({"threshold": t, "mean_fidelity": f})
                }).collect::<Vec<_>>(),
            });
            let path = cfg.out_dir.join("threshold.json");
            let mut text = serde_json::to_string_pretty(&doc).expect("scores serialize");
            text.push('\n');
            std::fs::write(&path, text)?;
            vec![path]
        }
        ReportFormat::Csv => {
            let mut out = String::from("threshold,mean_fidelity\n");
            for &(t, f) in &trained.scores {
                out.push_str(&format!("{t},{f}\n"));
            }
            let path = cfg.out_dir.join("threshold.csv");
            std::fs::write(&path, out)?;
            vec![path]
        }
    };
    announce(&paths);
    Ok(())
}

fn sweep(args: &SweepShotsArgs) -> Result<()> {
    let cfg = args.common.load()?;
    let grid: Vec<usize> = parse_list(&args.grid, "grid")?;
    let rows = run_shot_sweep(&cfg, &grid)?;

    std::fs::create_dir_all(&cfg.out_dir)?;
    let paths = match args.common.format {
        ReportFormat::Json => {
            let path = cfg.out_dir.join("sweep.json");
            let mut text = serde_json::to_string_pretty(&rows).expect("rows serialize");
            text.push('\n');
            std::fs::write(&path, text)?;
            vec![path]
        }
        ReportFormat::Csv => {
            let mut summary = String::from("shots,voted_mean,voted_std,averaged_mean,averaged_std\n");
            let mut replicas = String::from("shots,strategy,replica,target_probability\n");
            for row in &rows {
                summary.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.shots, row.voted_mean, row.voted_std, row.averaged_mean, row.averaged_std
                ));
                for (i, v) in row.voted.iter().enumerate() {
                    replicas.push_str(&format!("{},voted,{i},{v}\n", row.shots));
                }
                for (i, a) in row.averaged.iter().enumerate() {
                    replicas.push_str(&format!("{},averaged,{i},{a}\n", row.shots));
                }
            }
            let summary_path = cfg.out_dir.join("sweep_summary.csv");
            std::fs::write(&summary_path, summary)?;
            let replicas_path = cfg.out_dir.join("sweep_replicas.csv");
            std::fs::write(&replicas_path, replicas)?;
            vec![summary_path, replicas_path]
        }
    };
    announce(&paths);
    Ok(())
}
