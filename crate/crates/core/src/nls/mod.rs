//! Nonlinear least squares over a registry of regression functions.

mod catalog;
mod expr;
mod lm;
mod model;

pub use catalog::{builtin, builtin_catalog, ExpDecay, Logistic, Reciprocal, Saturation, SinCos};
pub use expr::{parse_expr, Expr, ExprModel, Func};
pub use lm::{fit_nls, fit_nls_with, LmConfig, NlsFit};
pub use model::{finite_difference_gradient, NlsModel, StartGuess};
