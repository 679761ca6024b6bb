use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

/// Starting values together with whether the model's heuristic had to give up.
#[derive(Debug, Clone, PartialEq)]
pub struct StartGuess {
    pub beta: Vec<f64>,
    /// The heuristic was undefined for the data and all-ones was used.
    pub fallback: bool,
}

impl StartGuess {
    pub fn exact(beta: Vec<f64>) -> Self {
        Self { beta, fallback: false }
    }

    pub fn ones(arity: usize) -> Self {
        Self { beta: vec![1.0; arity], fallback: true }
    }

    /// Keeps `beta` when every entry is finite, otherwise falls back to ones.
    pub fn checked(beta: Vec<f64>) -> Self {
        if beta.iter().all(|b| b.is_finite()) {
            Self::exact(beta)
        } else {
            Self::ones(beta.len())
        }
    }
}

/// A regression function `f(x, β)` of one predictor.
pub trait NlsModel: fmt::Debug + Send + Sync {
    fn id(&self) -> &str;

    fn arity(&self) -> usize;

    fn eval(&self, x: f64, beta: &[f64]) -> f64;

    /// `∂f/∂β` at `(x, β)`; central finite differences unless overridden.
    fn gradient(&self, x: f64, beta: &[f64], out: &mut [f64]) {
        finite_difference_gradient(self, x, beta, out);
    }

    fn has_analytic_gradient(&self) -> bool {
        false
    }

    /// Data-driven starting values.
    fn start(&self, _x: &[f64], _y: &[f64]) -> StartGuess {
        StartGuess::ones(self.arity())
    }

    /// Region of `x` and `β` where the function is finite.
    fn domain_note(&self) -> &str {
        ""
    }
}

/// Central differences with a step of `ε^(1/3) · max(|β_j|, 1)`.
pub fn finite_difference_gradient<M: NlsModel + ?Sized>(model: &M, x: f64, beta: &[f64], out: &mut [f64]) {
    let mut b = beta.to_vec();
    let base = f64::EPSILON.cbrt();
    for j in 0..beta.len() {
        let h = base * beta[j].abs().max(1.0);
        b[j] = beta[j] + h;
        let up = model.eval(x, &b);
        b[j] = beta[j] - h;
        let down = model.eval(x, &b);
        b[j] = beta[j];
        out[j] = (up - down) / (2.0 * h);
    }
}
