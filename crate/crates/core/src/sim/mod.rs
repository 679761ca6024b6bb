//! Monte Carlo studies of the selection procedure.

mod generators;
mod scenario;

pub use generators::{
    generate_glm, generate_nls, generate_s1, generate_s3, generate_s4_gap, glm_beta, nls_generator, Dependence,
    GlmDispersion, GlmGenerator, NlsGenerator, NoiseReading, Sample, GAP_POSITION, GLM_X_RANGE, NLS_TRUE_MODELS,
};
pub use scenario::{
    aggregate, fnv1a, replicate_rng, run_replicate, run_scenario, MonteCarloResult, ReplicateFailure, ReplicateOutcome,
    Scenario, ScenarioConfig, Truth, DEFAULT_GAP_FRACTION, DEFAULT_SEED,
};
