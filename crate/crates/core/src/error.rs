//! Crate-wide error types.

use thiserror::Error;

/// Errors from weight construction and the weight-spec text format.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum WeightError {
    #[error("invalid weight parameter: {0}")]
    Parameter(String),
    #[error("malformed weight spec `{spec}`: {reason}")]
    Spec { spec: String, reason: String },
    #[error("custom weight table: {0}")]
    Table(String),
}

/// Errors from Young-conjugate evaluation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConjugateError {
    /// The supremum defining `φ*(y)` grows past the expansion cap, which
    /// signals that the weight fails `log t = o(ω(t))` numerically.
    #[error("young conjugate diverges at y = {y}: bracket expanded past t = {t_reached}")]
    Divergent { y: f64, t_reached: f64 },
}

/// Parse errors from the expression grammar.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("variable `{name}` out of range for dimension {dim}")]
    VariableOutOfRange { name: String, dim: usize },
}

/// Runtime evaluation errors from the expression engine.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("domain error in `{subexpr}`: {message}")]
    Domain { subexpr: String, message: String },
    #[error("point has dimension {got}, expression needs {needed}")]
    Dimension { got: usize, needed: usize },
}

/// Errors from operator algebra.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum PdoError {
    #[error("operator dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("term budget of {budget} monomial terms exceeded during {context}")]
    TermBudget { budget: usize, context: String },
    #[error("operator text: {0}")]
    Format(String),
    #[error("operator precondition: {0}")]
    Precondition(String),
}

/// Errors from norms, seminorms and growth fitting.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Pdo(#[from] PdoError),
    #[error(transparent)]
    Conjugate(#[from] ConjugateError),
    #[error("invalid input: {0}")]
    Input(String),
}

/// Errors from the oscillatory quadrature and the counterexample pipeline.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum MetivierError {
    #[error("parameter constraint violated: {0}")]
    Constraint(String),
    #[error("quadrature tolerance not reached: requested {requested}, achieved {achieved}")]
    Accuracy { requested: f64, achieved: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Pdo(#[from] PdoError),
}

/// Top-level error used by the CLI driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Conjugate(#[from] ConjugateError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Pdo(#[from] PdoError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Metivier(#[from] MetivierError),
    #[error("config: {0}")]
    Config(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("report: {0}")]
    Report(String),
}
