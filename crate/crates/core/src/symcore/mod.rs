//! Exact computer algebra: multivariate polynomials and rational expressions
//! over arbitrary-precision rationals, with differentiation, substitution,
//! zero testing, a text parser and compiled binary64 evaluation.
//!
//! # Expression grammar
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = ("-" | "+") unary | power ;
//! power   = atom [ "^" [ "-" ] integer ] ;
//! atom    = number | identifier | "(" expr ")" ;
//! number  = digit { digit } [ "." digit { digit } ] ;
//! ident   = (letter | "_") { letter | digit | "_" } ;
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`. Decimal
//! literals are read exactly (`0.25` is `1/4`). Unicode `−` and `·` are
//! accepted as `-` and `*`. Every printed expression is valid input.

mod compiled;
mod parse;
mod poly;
mod rational;
mod surd;
mod symbol;

pub use compiled::{CompiledExpr, CompiledPoly, ParamValues};
pub use parse::{parse_expr, parse_rational};
pub use poly::{rational_to_f64, Monomial, Polynomial, MAX_EXPONENT};
pub use rational::{RationalExpr, SINGULAR_DENOMINATOR};
pub use surd::Surd;
pub use symbol::{Symbol, SymbolKind, SymbolTable, COORDINATE_NAMES};

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("undeclared symbol `{name}` at byte {pos}")]
    UndeclaredSymbol { name: String, pos: usize },
    #[error("division by the zero polynomial")]
    ZeroDenominator,
    #[error("exponent of `{0}` exceeds 65535")]
    ExponentOverflow(Symbol),
    #[error("power {0} is out of range")]
    PowerTooLarge(i32),
    #[error("`{0}` is a parameter and cannot be differentiated against")]
    NotACoordinate(Symbol),
    #[error("no value assigned to `{0}`")]
    Unassigned(Symbol),
    #[error("denominator vanishes at the evaluation point")]
    Singular,
    #[error("`{0}` is a reserved coordinate name")]
    ReservedName(String),
    #[error("`{0}` is not a valid identifier")]
    InvalidName(String),
    #[error("`{symbol}` appears with an exponent not divisible by {power}")]
    IndivisibleExponent { symbol: Symbol, power: u32 },
    #[error("surd operands have different radicands")]
    RadicandMismatch,
    #[error("term of degree {degree} exceeds homogenization degree {target}")]
    DegreeTooHigh { degree: u32, target: u32 },
}
