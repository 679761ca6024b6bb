//! Subcommands behind the `wavesel` binary.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};
use wavesel_core::regression::{ThresholdPolicy, ThresholdRule, WaveletConfig, DEFAULT_COARSE_LEVEL};
use wavesel_core::select::{wp_select, Criterion};
use wavesel_core::sim::DEFAULT_SEED;
use wavesel_core::wavelet::Wavelet;

use crate::candidates::parse_candidates;
use crate::config::load_config;
use crate::dataset::read_csv;
use crate::error::{CliError, CliResult};
use crate::report::{DatasetSummary, Metadata, ReportBody, ReportDocument, SelectionDocument, SimulationDocument};
use crate::runner::{build_pool, run_cells, threads_from_env};
use crate::tables;

/// Smallest sample `select` accepts.
pub const MIN_ROWS: usize = 16;

#[derive(Debug, Parser)]
#[command(name = "wavesel", version, about = "Wavelet-guided selection of regression model forms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank candidate models on a CSV dataset.
    Select(SelectArgs),
    /// Run Monte Carlo scenarios from a TOML config.
    Simulate(SimulateArgs),
    /// Export plot-ready series from a report.
    Plotdata(PlotdataArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriteriaArg {
    Rmse,
    Mae,
    Both,
}

impl CriteriaArg {
    pub fn criteria(self) -> Vec<Criterion> {
        match self {
            CriteriaArg::Rmse => vec![Criterion::Rmse],
            CriteriaArg::Mae => vec![Criterion::Mae],
            CriteriaArg::Both => Criterion::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Response column.
    #[arg(long)]
    pub y: String,
    /// Predictor column; repeat for several.
    #[arg(long = "x", required = true)]
    pub x: Vec<String>,
    /// Comma separated candidates: builtin, f1..f4, f24, glm:<family>[:<link>], file:<path>.
    #[arg(long, default_value = "builtin")]
    pub candidates: String,
    #[arg(long, value_enum, default_value = "both")]
    pub criteria: CriteriaArg,
    /// Recorded in the report metadata.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Wavelet basis: haar or daub1..daub4.
    #[arg(long, default_value = "daub2")]
    pub wavelet: String,
    /// Coarsest level left unthresholded.
    #[arg(long, default_value_t = DEFAULT_COARSE_LEVEL)]
    pub j0: usize,
    /// soft or hard.
    #[arg(long, default_value = "soft")]
    pub threshold: String,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the ranking table as CSV here.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Use a fixed timestamp so reports are byte-reproducible.
    #[arg(long)]
    pub fixed_timestamp: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML config.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for the CSV tables and summary.json.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub fixed_timestamp: bool,
}

#[derive(Debug, Args)]
pub struct PlotdataArgs {
    /// JSON report written by `select` or `simulate`.
    #[arg(long)]
    pub report: PathBuf,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Select(args) => select(&args, stdout),
        Command::Simulate(args) => simulate(&args, stdout),
        Command::Plotdata(args) => plotdata(&args, stdout),
    }
}

fn print(stdout: &mut dyn Write, bytes: &[u8]) -> CliResult<()> {
    stdout.write_all(bytes).map_err(|e| CliError::io("<stdout>", e))
}

fn wavelet_config(args: &SelectArgs) -> CliResult<WaveletConfig> {
    Ok(WaveletConfig {
        wavelet: args.wavelet.parse::<Wavelet>()?,
        coarse_level: args.j0,
        policy: ThresholdPolicy { rule: args.threshold.parse::<ThresholdRule>()? },
        resolution: None,
    })
}

/// Hash of everything a selection report depends on.
fn selection_hash(input: &[u8], args: &SelectArgs) -> String {
    let mut h = Sha256::new();
    h.update(input);
    for part in [args.y.as_str(), &args.x.join(","), &args.candidates, &args.wavelet, &args.threshold] {
        h.update([0u8]);
        h.update(part.as_bytes());
    }
    h.update(args.j0.to_le_bytes());
    hex::encode(h.finalize())
}

pub fn select(args: &SelectArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let config = wavelet_config(args)?;
    let bytes = std::fs::read(&args.input).map_err(|e| CliError::io(&args.input, e))?;
    let data = read_csv(&args.input, &args.y, &args.x)?;
    if data.len() < MIN_ROWS {
        return Err(CliError::Input(format!(
            "{} usable rows after dropping missing values; at least {MIN_ROWS} are required",
            data.len()
        )));
    }
    let base = args.input.parent().unwrap_or(Path::new("."));
    let base = if base.as_os_str().is_empty() { Path::new(".") } else { base };
    let candidates = parse_candidates(&args.candidates, base)?;
    let report = wp_select(&data.design(), &data.y, &candidates, &config)?;
    let criteria = args.criteria.criteria();

    let table = tables::ranking(&report, &criteria)?;
    print(stdout, &table)?;
    for &c in &criteria {
        print(stdout, format!("winner ({c}): {}\n", report.winner(c)).as_bytes())?;
    }
    if let Some(path) = &args.table {
        tables::write_file(path, &table)?;
    }
    if let Some(path) = &args.out {
        let doc = ReportDocument {
            metadata: Metadata::new(args.seed, selection_hash(&bytes, args), args.fixed_timestamp),
            body: ReportBody::Selection(Box::new(SelectionDocument {
                dataset: DatasetSummary {
                    path: args.input.display().to_string(),
                    y: data.y_name.clone(),
                    x: data.x_names.clone(),
                    rows_read: data.rows_read,
                    rows_dropped: data.rows_dropped,
                },
                criteria,
                wavelet: config,
                x: data.x.clone(),
                y: data.y.clone(),
                report,
            })),
        };
        doc.write(path)?;
    }
    Ok(())
}

pub fn simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let loaded = load_config(&args.config)?;
    let pool = build_pool(threads_from_env()?)?;
    let results = run_cells(&pool, &loaded.cells)?;

    std::fs::create_dir_all(&args.out_dir).map_err(|e| CliError::io(&args.out_dir, e))?;
    let criteria = &loaded.criteria;
    let dir = &args.out_dir;
    tables::write_file(&dir.join(tables::RATES_FILE), &tables::rates_long(&results, criteria)?)?;
    tables::write_file(&dir.join(tables::RATES_WIDE_FILE), &tables::rates_wide(&results, criteria)?)?;
    tables::write_file(&dir.join(tables::NULLS_FILE), &tables::null_fractions(&results)?)?;
    tables::write_file(&dir.join(tables::WINS_FILE), &tables::glm_wins(&results, criteria)?)?;

    for r in &results {
        let line = format!("{}: {} of {} replicates completed\n", r.label, r.completed, r.replications);
        print(stdout, line.as_bytes())?;
        for f in r.failures.iter().take(3) {
            eprintln!("warning: {} replicate {}: {}", r.label, f.index, f.message);
        }
    }
    let seed = loaded.cells.first().map(|c| c.seed).unwrap_or(DEFAULT_SEED);
    let doc = ReportDocument {
        metadata: Metadata::new(seed, loaded.hash.clone(), args.fixed_timestamp),
        body: ReportBody::Simulation(SimulationDocument { criteria: criteria.clone(), results }),
    };
    doc.write(&dir.join(tables::SUMMARY_FILE))
}

pub fn plotdata(args: &PlotdataArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let doc = ReportDocument::read(&args.report)?;
    let csv = tables::plot_data(&doc)?;
    match &args.out {
        Some(path) => tables::write_file(path, &csv),
        None => print(stdout, &csv),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn select_flags_parse() {
        let cli = Cli::try_parse_from([
            "wavesel",
            "select",
            "--input",
            "d.csv",
            "--y",
            "y",
            "--x",
            "a",
            "--x",
            "b",
            "--criteria",
            "mae",
        ])
        .unwrap();
        let Command::Select(args) = cli.command else { panic!("not select") };
        assert_eq!(args.x, ["a", "b"]);
        assert_eq!(args.criteria.criteria(), [Criterion::Mae]);
        assert_eq!(args.candidates, "builtin");
        assert_eq!(wavelet_config(&args).unwrap(), WaveletConfig::default());
        assert!(Cli::try_parse_from(["wavesel", "select", "--input", "d.csv", "--y", "y"]).is_err());
    }
}
