//! Generalized linear models for continuous responses.

mod family;
mod irls;
mod link;

pub use family::{deviance, Family};
pub use irls::{
    fit_glm, intercept_design, predict_glm, GlmFit, GlmPrediction, CONVERGENCE_TOLERANCE, MAX_HALVINGS, MAX_ITERATIONS,
    MEAN_FLOOR,
};
pub use link::Link;
