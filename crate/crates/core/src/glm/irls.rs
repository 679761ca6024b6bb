use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use super::{Family, Link};
use crate::stats::{least_squares, mean};
use crate::{Error, Result};

pub const MAX_ITERATIONS: usize = 50;
pub const MAX_HALVINGS: usize = 20;
pub const CONVERGENCE_TOLERANCE: f64 = 1e-8;
/// Floor applied to means of positive families under identity or inverse links.
pub const MEAN_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GlmFit {
    pub family: Family,
    pub link: Link,
    pub beta: Vec<f64>,
    /// `sqrt(dispersion · diag((XᵀWX)⁻¹))`; NaN if the information matrix is singular.
    pub std_errors: Vec<f64>,
    pub eta: Vec<f64>,
    pub mu: Vec<f64>,
    pub deviance: f64,
    pub dispersion: f64,
    pub iterations: usize,
    pub converged: bool,
    /// The mean floor was active on the last accepted step.
    pub clipped: bool,
    /// Deviance after each accepted step.
    pub deviance_trace: Vec<f64>,
}

/// Prediction with rows whose linear predictor has no valid mean set to NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct GlmPrediction {
    pub mean: Vec<f64>,
    pub invalid_rows: Vec<usize>,
}

/// `[1 | x]` design matrix for a single predictor.
pub fn intercept_design(x: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(x.len(), 2, |i, j| if j == 0 { 1.0 } else { x[i] })
}

struct Candidate {
    beta: DVector<f64>,
    eta: Vec<f64>,
    mu: Vec<f64>,
    valid: bool,
}

fn evaluate(x: &DMatrix<f64>, beta: DVector<f64>, family: Family, link: Link) -> Candidate {
    let eta: Vec<f64> = (x * &beta).iter().copied().collect();
    let mu: Vec<f64> = eta.iter().map(|e| link.inverse(*e)).collect();
    let valid = mu.iter().all(|m| family.valid_mean(*m) && (!link.needs_positive_mean() || *m > 0.0));
    Candidate { beta, eta, mu, valid }
}

fn total_deviance(family: Family, y: &[f64], mu: &[f64]) -> f64 {
    y.iter().zip(mu).map(|(a, b)| family.unit_deviance(*a, *b).max(0.0)).sum()
}

fn clip_means(family: Family, mu: &mut [f64]) {
    for m in mu.iter_mut() {
        if !family.valid_mean(*m) {
            *m = MEAN_FLOOR;
        }
    }
}

fn working_weights(family: Family, link: Link, mu: &[f64]) -> Vec<f64> {
    mu.iter()
        .map(|m| {
            let gp = link.derivative(*m);
            1.0 / (family.variance(*m) * gp * gp)
        })
        .collect()
}

/// Maximum likelihood fit by iteratively reweighted least squares.
///
/// Steps that leave the mean domain or raise the deviance are halved toward
/// the previous estimate. Positive families under identity or inverse links
/// fall back to flooring the means when halving does not help; other links
/// fail with [`Error::LinkDomain`].
pub fn fit_glm(x: &DMatrix<f64>, y: &[f64], family: Family, link: Link) -> Result<GlmFit> {
    let (n, p) = x.shape();
    if n != y.len() {
        return Err(Error::LengthMismatch(n, y.len()));
    }
    if n <= p {
        return Err(Error::InvalidArgument(alloc::format!("need more rows ({n}) than columns ({p})")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    if y.iter().any(|v| !family.valid_response(*v)) {
        return Err(Error::ResponseDomain(family.name()));
    }
    let can_clip = family.positive() && matches!(link, Link::Identity | Link::Inverse);

    let mut mu: Vec<f64> = if family.positive() || link.needs_positive_mean() {
        let floor = (0.1 * mean(y)).max(MEAN_FLOOR);
        y.iter().map(|v| v.max(floor)).collect()
    } else if link == Link::Inverse {
        y.iter().map(|v| if v.abs() < MEAN_FLOOR { MEAN_FLOOR } else { *v }).collect()
    } else {
        y.to_vec()
    };
    let mut eta: Vec<f64> = mu.iter().map(|m| link.link(*m)).collect();
    let mut dev = total_deviance(family, y, &mu);
    let mut beta: Option<DVector<f64>> = None;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut clipped = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let w = working_weights(family, link, &mu);
        if w.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::LinkDomain("working weights are not finite"));
        }
        let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
        let a = DMatrix::from_fn(n, p, |i, j| sw[i] * x[(i, j)]);
        let b = DVector::from_fn(n, |i, _| sw[i] * (eta[i] + (y[i] - mu[i]) * link.derivative(mu[i])));
        let proposal = least_squares(&a, &b)?;

        let mut cand = evaluate(x, proposal, family, link);
        let mut cand_dev = if cand.valid { total_deviance(family, y, &cand.mu) } else { f64::INFINITY };
        let mut step_clipped = false;
        if let Some(prev) = &beta {
            let mut halvings = 0;
            while (!cand.valid || cand_dev > dev) && halvings < MAX_HALVINGS {
                cand = evaluate(x, (&cand.beta + prev) * 0.5, family, link);
                cand_dev = if cand.valid { total_deviance(family, y, &cand.mu) } else { f64::INFINITY };
                halvings += 1;
            }
        }
        if !cand.valid {
            if !can_clip {
                return Err(Error::LinkDomain("mean left the link domain after step-halving"));
            }
            clip_means(family, &mut cand.mu);
            cand_dev = total_deviance(family, y, &cand.mu);
            step_clipped = true;
        } else if beta.is_some() && cand_dev > dev {
            // no downhill step along this direction: keep the previous estimate
            break;
        }

        let change = (cand_dev - dev).abs() / (cand_dev.abs() + 0.1);
        beta = Some(cand.beta);
        eta = cand.eta;
        mu = cand.mu;
        dev = cand_dev;
        clipped = step_clipped;
        trace.push(dev);
        if iterations > 1 && change < CONVERGENCE_TOLERANCE {
            converged = true;
            break;
        }
    }

    let beta = beta.expect("at least one iteration ran");
    let dispersion = (dev / (n - p) as f64).max(f64::MIN_POSITIVE);
    let w = working_weights(family, link, &mu);
    let a = DMatrix::from_fn(n, p, |i, j| w[i].sqrt() * x[(i, j)]);
    let std_errors = match (a.transpose() * &a).try_inverse() {
        Some(cov) => (0..p).map(|j| (dispersion * cov[(j, j)]).sqrt()).collect(),
        None => alloc::vec![f64::NAN; p],
    };
    Ok(GlmFit {
        family,
        link,
        beta: beta.iter().copied().collect(),
        std_errors,
        eta,
        mu,
        deviance: dev,
        dispersion,
        iterations,
        converged,
        clipped,
        deviance_trace: trace,
    })
}

/// Means `g⁻¹(X_new β)` for new rows.
pub fn predict_glm(fit: &GlmFit, x_new: &DMatrix<f64>) -> Result<GlmPrediction> {
    if x_new.ncols() != fit.beta.len() {
        return Err(Error::LengthMismatch(x_new.ncols(), fit.beta.len()));
    }
    let beta = DVector::from_column_slice(&fit.beta);
    let mut invalid_rows = Vec::new();
    let mean = (x_new * beta)
        .iter()
        .enumerate()
        .map(|(i, eta)| {
            let mu = fit.link.inverse(*eta);
            if fit.family.valid_mean(mu) && (!fit.link.needs_positive_mean() || mu > 0.0) {
                mu
            } else {
                invalid_rows.push(i);
                f64::NAN
            }
        })
        .collect();
    Ok(GlmPrediction { mean, invalid_rows })
}
