//! Experiment runner CLI: generate instance suites, execute run matrices,
//! and aggregate result CSVs into figure-data tables.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use qaoa_sim::bench::{
    generate_instances, records_from_csv, records_to_csv, report, run_on_instances,
    ExperimentConfig, InstanceEntry, ReportKind,
};

#[derive(Parser)]
#[command(name = "qaoa-sim", version, about = "QAOA-variant noise laboratory")]
struct Cli {
    /// Override the config's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the config's worker-thread count (0 = auto).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Built-in config used when --config is absent.
    #[arg(long, global = true, value_enum, default_value_t = Preset::Desk)]
    preset: Preset,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Desk,
    Paper,
}

#[derive(Subcommand)]
enum Command {
    /// Write the deterministic instance suite of a config to a directory.
    Generate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Execute the run matrix and write raw results as CSV.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory of pre-generated instances; generated on the fly when
        /// absent.
        #[arg(long)]
        instances: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate a results CSV into a figure-data table.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        /// quality-by-layers | quality-by-n | quality-vs-runtime |
        /// advantage-grid
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the matrix and emit the relative-advantage grid directly.
    SweepNoise {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "advantage.csv")]
        out: PathBuf,
    },
}

fn load_config(cli: &Cli, path: &Option<PathBuf>) -> Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", p.display()))?
        }
        None => match cli.preset {
            Preset::Desk => ExperimentConfig::desk(0),
            Preset::Paper => ExperimentConfig::paper(0),
        },
    };
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(jobs) = cli.jobs {
        cfg.jobs = jobs;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn entry_file_name(e: &InstanceEntry) -> String {
    format!("{}_n{:02}_i{:03}.json", e.problem.as_str(), e.n, e.index)
}

fn load_instances(dir: &Path) -> Result<Vec<InstanceEntry>> {
    let mut entries = Vec::new();
    for item in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = item?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let text = fs::read_to_string(&path)?;
        let entry: InstanceEntry = serde_json::from_str(&text)
            .with_context(|| format!("parsing instance {}", path.display()))?;
        entries.push(entry);
    }
    if entries.is_empty() {
        bail!("no instance files in {}", dir.display());
    }
    entries.sort_by_key(|e| (e.problem.as_str(), e.n, e.index));
    Ok(entries)
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .init();
    let cli = Cli::parse();
    match &cli.command {
        Command::Generate { config, out } => {
            let cfg = load_config(&cli, config)?;
            let entries = generate_instances(&cfg)?;
            fs::create_dir_all(out)?;
            for e in &entries {
                let path = out.join(entry_file_name(e));
                fs::write(&path, serde_json::to_string_pretty(e)?)?;
            }
            eprintln!("wrote {} instances to {}", entries.len(), out.display());
        }
        Command::Run { config, instances, out } => {
            let cfg = load_config(&cli, config)?;
            let entries = match instances {
                Some(dir) => load_instances(dir)?,
                None => generate_instances(&cfg)?,
            };
            let records = run_on_instances(&cfg, &entries)?;
            fs::write(out, records_to_csv(&records))?;
            eprintln!("wrote {} records to {}", records.len(), out.display());
        }
        Command::Report { input, kind, out } => {
            let records = records_from_csv(&fs::read_to_string(input)?)?;
            let kind: ReportKind = kind.parse()?;
            fs::write(out, report(&records, kind)?)?;
            eprintln!("wrote report to {}", out.display());
        }
        Command::SweepNoise { config, out } => {
            let cfg = load_config(&cli, config)?;
            let entries = generate_instances(&cfg)?;
            let records = run_on_instances(&cfg, &entries)?;
            fs::write(out, report(&records, ReportKind::AdvantageGrid)?)?;
            eprintln!(
                "swept {} records; advantage grid at {}",
                records.len(),
                out.display()
            );
        }
    }
    Ok(())
}
