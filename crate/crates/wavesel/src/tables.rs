//! CSV tables written by `simulate`, `select` and `plotdata`.

use std::io::Write;

use wavesel_core::select::{Criterion, SelectionReport};
use wavesel_core::sim::{MonteCarloResult, Scenario};

use crate::error::{CliError, CliResult};
use crate::report::{ReportBody, ReportDocument, SelectionDocument};

pub const RATES_FILE: &str = "classification_rates.csv";
pub const RATES_WIDE_FILE: &str = "classification_table.csv";
pub const NULLS_FILE: &str = "null_fractions.csv";
pub const WINS_FILE: &str = "glm_win_proportions.csv";
pub const SUMMARY_FILE: &str = "summary.json";

type Writer = csv::Writer<Vec<u8>>;

fn writer() -> Writer {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(w: Writer) -> CliResult<Vec<u8>> {
    w.into_inner().map_err(|e| CliError::Input(e.to_string()))
}

fn row<I, S>(w: &mut Writer, fields: I) -> CliResult<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    w.write_record(fields).map_err(|e| CliError::Input(e.to_string()))
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map(|v| format!("{v:.digits$}")).unwrap_or_default()
}

fn rate(r: &MonteCarloResult, c: Criterion) -> Option<f64> {
    match c {
        Criterion::Rmse => r.true_rate_rmse,
        Criterion::Mae => r.true_rate_mae,
    }
}

fn glm_win(r: &MonteCarloResult, c: Criterion) -> Option<f64> {
    match c {
        Criterion::Rmse => r.glm_win_rmse,
        Criterion::Mae => r.glm_win_mae,
    }
}

fn is_selection(r: &MonteCarloResult) -> bool {
    r.scenario != Scenario::S4
}

/// One row per selection cell and criterion, rates in percent.
pub fn rates_long(results: &[MonteCarloResult], criteria: &[Criterion]) -> CliResult<Vec<u8>> {
    let mut w = writer();
    row(&mut w, ["scenario", "truth", "dependence", "n", "criterion", "rate", "completed", "failed"])?;
    for r in results.iter().filter(|r| is_selection(r)) {
        for &c in criteria {
            row(
                &mut w,
                [
                    r.scenario.to_string(),
                    r.truth.clone(),
                    r.dependence.to_string(),
                    r.n.to_string(),
                    c.to_string(),
                    opt(rate(r, c), 1),
                    r.completed.to_string(),
                    r.failed().to_string(),
                ],
            )?;
        }
    }
    finish(w)
}

/// Rows `(scenario, truth, dependence)`, one column per criterion and sample size.
pub fn rates_wide(results: &[MonteCarloResult], criteria: &[Criterion]) -> CliResult<Vec<u8>> {
    let selection: Vec<&MonteCarloResult> = results.iter().filter(|r| is_selection(r)).collect();
    let mut sizes: Vec<usize> = selection.iter().map(|r| r.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut keys: Vec<(Scenario, String, String)> = Vec::new();
    for r in &selection {
        let key = (r.scenario, r.truth.clone(), r.dependence.to_string());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut w = writer();
    let mut header = vec!["scenario".to_string(), "truth".into(), "dependence".into()];
    for c in criteria {
        header.extend(sizes.iter().map(|n| format!("{c}_n{n}")));
    }
    row(&mut w, &header)?;
    for (scenario, truth, dependence) in keys {
        let mut fields = vec![scenario.to_string(), truth.clone(), dependence.clone()];
        for &c in criteria {
            for &n in &sizes {
                let cell = selection.iter().find(|r| {
                    r.scenario == scenario && r.truth == truth && r.dependence.to_string() == dependence && r.n == n
                });
                fields.push(opt(cell.and_then(|r| rate(r, c)), 1));
            }
        }
        row(&mut w, &fields)?;
    }
    finish(w)
}

/// Mean percentage of detail coefficients set to zero, per cell and level.
pub fn null_fractions(results: &[MonteCarloResult]) -> CliResult<Vec<u8>> {
    let mut w = writer();
    row(&mut w, ["scenario", "truth", "dependence", "n", "level", "coefficients", "null_percent"])?;
    for r in results {
        for (level, f) in r.mean_null_fraction_by_level.iter().enumerate() {
            row(
                &mut w,
                [
                    r.scenario.to_string(),
                    r.truth.clone(),
                    r.dependence.to_string(),
                    r.n.to_string(),
                    level.to_string(),
                    (1usize << level).to_string(),
                    format!("{:.1}", 100.0 * f),
                ],
            )?;
        }
    }
    finish(w)
}

/// Share of s4 replicates where the GLM is closer to the target than the wavelet fit.
pub fn glm_wins(results: &[MonteCarloResult], criteria: &[Criterion]) -> CliResult<Vec<u8>> {
    let mut w = writer();
    row(
        &mut w,
        ["truth", "dependence", "n", "gap", "criterion", "glm_win_proportion", "mean_glm_rmse", "mean_wavelet_rmse"],
    )?;
    for r in results.iter().filter(|r| !is_selection(r)) {
        let gap = r.label.rsplit_once("/gap").map(|(_, g)| g.to_string()).unwrap_or_default();
        for &c in criteria {
            row(
                &mut w,
                [
                    r.truth.clone(),
                    r.dependence.to_string(),
                    r.n.to_string(),
                    gap.clone(),
                    c.to_string(),
                    opt(glm_win(r, c).map(|p| p / 100.0), 3),
                    opt(r.mean_glm_rmse, 6),
                    opt(r.mean_wavelet_rmse, 6),
                ],
            )?;
        }
    }
    finish(w)
}

/// Per-candidate distances to the wavelet fit with ranks (1 = closest).
pub fn ranking(report: &SelectionReport, criteria: &[Criterion]) -> CliResult<Vec<u8>> {
    let mut w = writer();
    let mut header = vec!["candidate".to_string(), "fit_ok".into(), "converged".into()];
    for c in criteria {
        header.push(c.to_string());
        header.push(format!("rank_{c}"));
    }
    header.push("error".into());
    row(&mut w, &header)?;
    for s in &report.scores {
        let mut fields = vec![s.id.clone(), s.fit_ok.to_string(), s.converged.to_string()];
        for &c in criteria {
            let value = s.score(c);
            let rank = value.map(|v| {
                1 + report
                    .scores
                    .iter()
                    .filter_map(|o| o.score(c).map(|ov| (ov, &o.id)))
                    .filter(|(ov, oid)| *ov < v || (*ov == v && oid.as_str() < s.id.as_str()))
                    .count()
            });
            fields.push(value.map(|v| format!("{v:.10e}")).unwrap_or_default());
            fields.push(rank.map(|r| r.to_string()).unwrap_or_default());
        }
        fields.push(s.error.clone().unwrap_or_default());
        row(&mut w, &fields)?;
    }
    finish(w)
}

fn selection_series(doc: &SelectionDocument) -> CliResult<Vec<u8>> {
    let report = &doc.report;
    let criterion = doc.criteria.first().copied().unwrap_or(Criterion::Rmse);
    let winner_id = report.winner(criterion);
    let winner = report.candidate(winner_id).ok_or(CliError::NoSeries)?;
    let n = doc.y.len();
    let complete = n > 0
        && winner.fitted.len() == n
        && report.reference.fitted.len() == n
        && report.reference.eta_star.len() == n
        && doc.x.first().is_some_and(|x| x.len() == n);
    if !complete {
        return Err(CliError::NoSeries);
    }
    let mut w = writer();
    row(&mut w, ["row", "x", "eta_star", "observed", "wavelet", "winner", "winner_id"])?;
    for i in 0..n {
        row(
            &mut w,
            [
                (i + 1).to_string(),
                doc.x[0][i].to_string(),
                report.reference.eta_star[i].to_string(),
                doc.y[i].to_string(),
                report.reference.fitted[i].to_string(),
                winner.fitted[i].to_string(),
                winner_id.to_string(),
            ],
        )?;
    }
    finish(w)
}

fn simulation_series(results: &[MonteCarloResult], criteria: &[Criterion]) -> CliResult<Vec<u8>> {
    if results.is_empty() {
        return Err(CliError::NoSeries);
    }
    let mut w = writer();
    row(&mut w, ["label", "scenario", "truth", "dependence", "n", "criterion", "metric", "value"])?;
    for r in results {
        for &c in criteria {
            let (metric, value) = if is_selection(r) {
                ("true_classification_rate", rate(r, c))
            } else {
                ("glm_win_proportion", glm_win(r, c).map(|p| p / 100.0))
            };
            row(
                &mut w,
                [
                    r.label.clone(),
                    r.scenario.to_string(),
                    r.truth.clone(),
                    r.dependence.to_string(),
                    r.n.to_string(),
                    c.to_string(),
                    metric.to_string(),
                    value.map(|v| v.to_string()).unwrap_or_default(),
                ],
            )?;
        }
    }
    finish(w)
}

/// Plot-ready series of a report.
pub fn plot_data(doc: &ReportDocument) -> CliResult<Vec<u8>> {
    match &doc.body {
        ReportBody::Selection(sel) => selection_series(sel),
        ReportBody::Simulation(sim) => simulation_series(&sim.results, &sim.criteria),
    }
}

pub fn write_file(path: &std::path::Path, bytes: &[u8]) -> CliResult<()> {
    let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(path, e))
}
