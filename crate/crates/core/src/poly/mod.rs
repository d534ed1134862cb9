//! Exact sparse multivariate polynomials over a fixed variable table.

mod monomial;
mod polynomial;
mod text;
mod vartable;

pub use monomial::Monomial;
pub use polynomial::{Accumulator, Polynomial};
pub use text::{format_polynomial, parse_polynomial};
pub use vartable::{VarId, VarKind, VarTable};

pub(crate) use polynomial::same_table;
pub(crate) use text::{first_pos, parse_expr, Expr};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at byte {pos}")]
    UnknownVariableAt { name: String, pos: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("`{0}` is not a valid variable name")]
    BadName(String),
    #[error("too many variables ({0})")]
    TooManyCoordinates(usize),
}
