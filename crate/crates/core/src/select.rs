//! Wavelet-guided choice among parametric regression candidates.
//!
//! The OLS linear predictor is min-max rescaled to `[0, 1]`, a thresholded
//! wavelet regression of `y` on it serves as the nonparametric reference, and
//! each candidate fitted on the original predictors is scored by RMSE and by
//! median absolute error against that reference.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use crate::glm::{fit_glm, Family, GlmFit, Link};
use crate::nls::{fit_nls, NlsFit, NlsModel};
use crate::regression::{fit_wavelet, WaveletConfig, WaveletFit};
use crate::stats::{least_squares, median};
use crate::{Error, Result};

/// Smallest sample accepted by [`wp_select`].
pub const MIN_OBSERVATIONS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Criterion {
    Rmse,
    Mae,
}

impl Criterion {
    pub const ALL: [Criterion; 2] = [Criterion::Rmse, Criterion::Mae];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Rmse => "rmse",
            Criterion::Mae => "mae",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rmse" => Ok(Criterion::Rmse),
            "mae" => Ok(Criterion::Mae),
            _ => Err(Error::InvalidArgument(format!("unknown criterion {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum CandidateKind {
    Nonlinear(Arc<dyn NlsModel>),
    Glm { family: Family, link: Link },
}

#[derive(Debug, Clone)]
pub struct CandidateModel {
    pub id: String,
    pub kind: CandidateKind,
}

impl CandidateModel {
    /// A nonlinear candidate named after its model.
    pub fn nonlinear(model: Arc<dyn NlsModel>) -> Self {
        Self { id: model.id().to_string(), kind: CandidateKind::Nonlinear(model) }
    }

    /// A GLM candidate named `glm:<family>:<link>`.
    pub fn glm(family: Family, link: Link) -> Self {
        Self { id: glm_id(family, link), kind: CandidateKind::Glm { family, link } }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }
}

pub fn glm_id(family: Family, link: Link) -> String {
    format!("glm:{family}:{link}")
}

/// Parametric fit kept for the report.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "lowercase"))]
pub enum CandidateFit {
    Nonlinear(NlsFit),
    Glm(GlmFit),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CandidateScore {
    pub id: String,
    pub fit_ok: bool,
    pub rmse: Option<f64>,
    pub mae: Option<f64>,
    /// Candidate fitted values in the original row order; empty when the fit failed.
    pub fitted: Vec<f64>,
    pub converged: bool,
    pub error: Option<String>,
    pub fit: Option<CandidateFit>,
}

impl CandidateScore {
    pub fn score(&self, criterion: Criterion) -> Option<f64> {
        match criterion {
            Criterion::Rmse => self.rmse,
            Criterion::Mae => self.mae,
        }
    }
}

/// The nonparametric reference: wavelet regression of `y` on the rescaled OLS predictor.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WaveletReference {
    pub ols_beta: Vec<f64>,
    /// `(min, max)` of the OLS linear predictor.
    pub eta_rescale: (f64, f64),
    /// Rescaled predictor in the original row order.
    pub eta_star: Vec<f64>,
    /// Row indices sorted by `eta_star` (stable).
    pub order: Vec<usize>,
    /// Wavelet fit in the original row order.
    pub fitted: Vec<f64>,
    pub fit: WaveletFit,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SelectionReport {
    pub n: usize,
    pub scores: Vec<CandidateScore>,
    pub winner_rmse: String,
    pub winner_mae: String,
    pub reference: WaveletReference,
}

impl SelectionReport {
    pub fn winner(&self, criterion: Criterion) -> &str {
        match criterion {
            Criterion::Rmse => &self.winner_rmse,
            Criterion::Mae => &self.winner_mae,
        }
    }

    pub fn null_fraction_by_level(&self) -> &[f64] {
        &self.reference.fit.null_fraction_by_level
    }

    pub fn candidate(&self, id: &str) -> Option<&CandidateScore> {
        self.scores.iter().find(|s| s.id == id)
    }
}

/// RMSE and median absolute error between two fitted-value vectors.
pub fn score(mu_hat: &[f64], mu_tilde: &[f64]) -> Result<(f64, f64)> {
    if mu_hat.len() != mu_tilde.len() {
        return Err(Error::LengthMismatch(mu_hat.len(), mu_tilde.len()));
    }
    if mu_hat.is_empty() {
        return Err(Error::EmptyInput);
    }
    if mu_hat.iter().chain(mu_tilde).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let diffs: Vec<f64> = mu_hat.iter().zip(mu_tilde).map(|(a, b)| (a - b).abs()).collect();
    let mse = diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64;
    Ok((mse.sqrt(), median(&diffs)))
}

fn check_design(x: &DMatrix<f64>, y: &[f64]) -> Result<()> {
    let (n, p) = x.shape();
    if n != y.len() {
        return Err(Error::LengthMismatch(n, y.len()));
    }
    if n < MIN_OBSERVATIONS {
        return Err(Error::InvalidArgument(format!("need at least {MIN_OBSERVATIONS} observations, got {n}")));
    }
    if p == 0 || x.column(0).iter().any(|v| *v != 1.0) {
        return Err(Error::InvalidArgument("the first design column must be the intercept".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let constant = |j: usize| x.column(j).iter().all(|v| *v == x[(0, j)]);
    if (1..p).all(constant) {
        return Err(Error::DegeneratePredictor);
    }
    Ok(())
}

/// Fits the nonparametric reference used by [`wp_select`] without scoring any candidate.
pub fn wavelet_reference(x: &DMatrix<f64>, y: &[f64], config: &WaveletConfig) -> Result<WaveletReference> {
    check_design(x, y)?;
    let beta = least_squares(x, &DVector::from_column_slice(y)).map_err(|e| match e {
        Error::RankDeficient => Error::DegeneratePredictor,
        other => other,
    })?;
    let eta: Vec<f64> = (x * &beta).iter().copied().collect();
    let lo = eta.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    if !(span > 1e-12 * lo.abs().max(hi.abs()).max(1.0)) {
        return Err(Error::DegeneratePredictor);
    }
    let eta_star: Vec<f64> = eta.iter().map(|e| ((e - lo) / span).clamp(0.0, 1.0)).collect();
    let mut order: Vec<usize> = (0..eta_star.len()).collect();
    order.sort_by(|&a, &b| eta_star[a].total_cmp(&eta_star[b]));
    let xs: Vec<f64> = order.iter().map(|&i| eta_star[i]).collect();
    let ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let fit = fit_wavelet(&xs, &ys, config)?;
    let mut fitted = alloc::vec![0.0; y.len()];
    for (k, &i) in order.iter().enumerate() {
        fitted[i] = fit.fitted[k];
    }
    Ok(WaveletReference {
        ols_beta: beta.iter().copied().collect(),
        eta_rescale: (lo, hi),
        eta_star,
        order,
        fitted,
        fit,
    })
}

fn fit_candidate(candidate: &CandidateModel, x: &DMatrix<f64>, y: &[f64]) -> Result<(Vec<f64>, bool, CandidateFit)> {
    match &candidate.kind {
        CandidateKind::Nonlinear(model) => {
            if x.ncols() != 2 {
                return Err(Error::InvalidArgument(format!(
                    "nonlinear candidate {} needs exactly one predictor",
                    candidate.id
                )));
            }
            let predictor: Vec<f64> = x.column(1).iter().copied().collect();
            let fit = fit_nls(model.as_ref(), &predictor, y, None)?;
            Ok((fit.fitted.clone(), fit.converged, CandidateFit::Nonlinear(fit)))
        }
        CandidateKind::Glm { family, link } => {
            let fit = fit_glm(x, y, *family, *link)?;
            Ok((fit.mu.clone(), fit.converged, CandidateFit::Glm(fit)))
        }
    }
}

fn score_candidate(candidate: &CandidateModel, x: &DMatrix<f64>, y: &[f64], reference: &[f64]) -> CandidateScore {
    let failed = |error: String| CandidateScore {
        id: candidate.id.clone(),
        fit_ok: false,
        rmse: None,
        mae: None,
        fitted: Vec::new(),
        converged: false,
        error: Some(error),
        fit: None,
    };
    let (fitted, converged, fit) = match fit_candidate(candidate, x, y) {
        Ok(v) => v,
        Err(e) => return failed(e.to_string()),
    };
    match score(&fitted, reference) {
        Ok((rmse, mae)) => CandidateScore {
            id: candidate.id.clone(),
            fit_ok: true,
            rmse: Some(rmse),
            mae: Some(mae),
            fitted,
            converged,
            error: None,
            fit: Some(fit),
        },
        Err(_) => failed("fitted values are not finite".into()),
    }
}

/// Id of the best-scoring fitted candidate; ties go to the smaller id.
pub fn argmin(scores: &[CandidateScore], criterion: Criterion) -> Option<&str> {
    scores
        .iter()
        .filter(|s| s.fit_ok)
        .filter_map(|s| s.score(criterion).map(|v| (v, s.id.as_str())))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then_with(|| a.1.cmp(b.1)))
        .map(|(_, id)| id)
}

/// Runs the selection on design `x` (first column the intercept) and response `y`.
///
/// A candidate that cannot be fitted is reported with `fit_ok = false` and
/// never wins; the call fails only when no candidate fits.
pub fn wp_select(
    x: &DMatrix<f64>,
    y: &[f64],
    candidates: &[CandidateModel],
    config: &WaveletConfig,
) -> Result<SelectionReport> {
    if candidates.len() < 2 {
        return Err(Error::InvalidArgument("at least two candidates are required".into()));
    }
    for (i, c) in candidates.iter().enumerate() {
        if candidates[..i].iter().any(|d| d.id == c.id) {
            return Err(Error::DuplicateId(c.id.clone()));
        }
    }
    let reference = wavelet_reference(x, y, config)?;
    let scores: Vec<CandidateScore> = candidates.iter().map(|c| score_candidate(c, x, y, &reference.fitted)).collect();
    let winner_rmse = argmin(&scores, Criterion::Rmse).ok_or(Error::NoCandidateFits)?.to_string();
    let winner_mae = argmin(&scores, Criterion::Mae).ok_or(Error::NoCandidateFits)?.to_string();
    Ok(SelectionReport { n: y.len(), scores, winner_rmse, winner_mae, reference })
}
