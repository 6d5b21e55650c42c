use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use coble::config::{random_config, AnyConfig, ConfigFile};
use coble::field::PrimeField;
use coble::harness::{self, trial_rng, CobleSanitySpec, ExperimentSpec, Report, RunOptions, Witness};
use coble::weyl::{GroupLimits, WeylWord};

#[derive(Parser)]
#[command(name = "coble", version, about = "Weyl group, Cremona action and restriction experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    #[command(subcommand)]
    Weyl(WeylCmd),
    #[command(subcommand)]
    Lattice(LatticeCmd),
    #[command(subcommand)]
    Verify(VerifyCmd),
    #[command(subcommand)]
    Coble(CobleCmd),
    #[command(subcommand)]
    Curve(CurveCmd),
    /// Run the acceptance criteria and print one result line each.
    RunAll {
        #[arg(long)]
        quick: bool,
        /// Comma-separated criterion numbers; all when omitted.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Damage a generator matrix; the suite must then fail.
        #[arg(long, hide = true)]
        corrupt_generator: bool,
    },
    /// Re-check a recorded violation witness.
    Replay {
        #[arg(long)]
        witness: PathBuf,
    },
}

#[derive(Args)]
struct Rank {
    #[arg(long)]
    r: usize,
}

#[derive(Subcommand)]
enum WeylCmd {
    /// Check the Coxeter relations on the generator matrices.
    Relations(Rank),
    /// Enumerate the finite group for r = 5, 6, 7.
    Order {
        #[command(flatten)]
        rank: Rank,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long)]
        mem_gb: Option<u64>,
    },
    /// Enumerate roots in a coefficient box.
    Roots {
        #[command(flatten)]
        rank: Rank,
        #[arg(long, default_value_t = 3)]
        bound: u32,
    },
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// List every constrained isometry candidate with its verdict.
    Classify(Rank),
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Check that the quadratic form equals the triple product with k.
    QIdentity {
        #[command(flatten)]
        rank: Rank,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum CobleCmd {
    /// Apply a word to a configuration (random unless --config is given).
    Apply {
        #[command(flatten)]
        rank: Rank,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 10007)]
        prime: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Relations and composition of the action on random configurations.
    Sanity {
        #[command(flatten)]
        rank: Rank,
        #[arg(long, default_value_t = 10007)]
        prime: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        configs: usize,
        #[arg(long, default_value_t = 100)]
        word_pairs: usize,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Look for nontrivial words acting trivially.
    Injectivity {
        #[command(flatten)]
        rank: Rank,
        #[arg(long)]
        max_len: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 10007)]
        prime: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum CurveCmd {
    /// Look for nonzero classes with trivial restriction to the base curve.
    TrTest {
        #[command(flatten)]
        rank: Rank,
        #[arg(long)]
        bound: u32,
        #[arg(long, default_value_t = 1_000_000_007)]
        prime: u64,
        #[arg(long)]
        configs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generators keep configurations on the base curve of a pencil.
    VrInvariance {
        #[command(flatten)]
        rank: Rank,
        #[arg(long, default_value_t = 10007)]
        prime: u64,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The eighth base point of a net of quadrics and its class.
    EighthPoint {
        #[arg(long, default_value_t = 10007)]
        prime: u64,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn coble_apply(r: usize, word: &str, prime: u64, seed: u64, config: Option<PathBuf>) -> Result<Report> {
    let word: WeylWord = word.parse().context("parsing --word")?;
    word.validate(r)?;
    let spec =
        ExperimentSpec { r: Some(r), prime: Some(prime), seed: Some(seed), ..ExperimentSpec::new("coble apply") };
    match config {
        Some(path) => {
            let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let file: ConfigFile = serde_json::from_str(&text)?;
            match file.parse()? {
                AnyConfig::Rational(c) => harness::coble_apply(spec, &word, &c),
                AnyConfig::Prime(c) => harness::coble_apply(spec, &word, &c),
            }
        }
        None => {
            let f = PrimeField::new(prime)?;
            let c = random_config(&f, r, &mut trial_rng(seed, 0))?;
            harness::coble_apply(spec, &word, &c)
        }
    }
}

fn replay_report(path: &PathBuf) -> Result<Report> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let witness: Witness = serde_json::from_str(&text)?;
    let confirmed = harness::replay(&witness)?;
    let mut report = Report::new(ExperimentSpec::new("replay"));
    report.record(serde_json::to_value(&witness)?);
    report.set("violation_confirmed", confirmed);
    report.passed = confirmed;
    Ok(report)
}

fn run(cli: Cli, out: &mut impl Write) -> Result<bool> {
    let report = match cli.command {
        Command::Weyl(WeylCmd::Relations(Rank { r })) => harness::weyl_relations(r)?,
        Command::Weyl(WeylCmd::Order { rank, cap, mem_gb }) => {
            let mut limits = GroupLimits::default();
            if let Some(cap) = cap {
                limits.max_elements = cap;
            }
            if let Some(gb) = mem_gb {
                limits.memory_bytes = gb << 30;
            }
            harness::weyl_order(rank.r, limits)?
        }
        Command::Weyl(WeylCmd::Roots { rank, bound }) => harness::weyl_roots(rank.r, bound)?,
        Command::Lattice(LatticeCmd::Classify(Rank { r })) => harness::lattice_classify(r)?,
        Command::Verify(VerifyCmd::QIdentity { rank, trials, seed }) => {
            harness::verify_q_identity(rank.r, trials, seed)?
        }
        Command::Coble(CobleCmd::Apply { rank, word, prime, seed, config }) => {
            coble_apply(rank.r, &word, prime, seed, config)?
        }
        Command::Coble(CobleCmd::Sanity { rank, prime, seed, configs, word_pairs, max_len }) => {
            harness::coble_sanity(CobleSanitySpec { r: rank.r, prime, seed, configs, word_pairs, max_len })?
        }
        Command::Coble(CobleCmd::Injectivity { rank, max_len, trials, prime, seed }) => {
            harness::injectivity_experiment(rank.r, max_len, trials, prime, seed)?
        }
        Command::Curve(CurveCmd::TrTest { rank, bound, prime, configs, seed }) => {
            harness::tr_test(rank.r, bound, prime, configs, seed)?
        }
        Command::Curve(CurveCmd::VrInvariance { rank, prime, trials, seed }) => {
            harness::vr_invariance_experiment(rank.r, prime, trials, seed)?
        }
        Command::Curve(CurveCmd::EighthPoint { prime, trials, seed }) => {
            harness::eighth_point_experiment(prime, trials, seed)?
        }
        Command::Replay { witness } => replay_report(&witness)?,
        Command::RunAll { quick, only, corrupt_generator } => {
            let selected: Vec<u8> =
                if only.is_empty() { harness::CRITERIA.iter().map(|c| c.number).collect() } else { only };
            let suite = harness::run_criteria(&selected, RunOptions { quick, corrupt_generator })?;
            for result in &suite.results {
                eprintln!("{}", result.line());
                let mut v = serde_json::to_value(result)?;
                v["kind"] = json!("criterion");
                writeln!(out, "{v}")?;
            }
            writeln!(
                out,
                "{}",
                json!({"kind": "summary", "command": "run-all", "quick": quick, "passed": suite.passed})
            )?;
            return Ok(suite.passed);
        }
    };
    report.write_to(out)?;
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
