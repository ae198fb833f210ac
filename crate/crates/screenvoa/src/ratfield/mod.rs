//! Exact arithmetic in F = Q(e1, e2) with e3 = -e1 - e2 eliminated.

mod gcd;
mod nullspace;
mod parse;
mod poly;
mod ratfun;

pub use gcd::{gcd, gcd_many, lcm};
pub use nullspace::{nullspace, rank, RatMatrix};
pub use parse::{eliminate_e3, parse_ratfun, E3Poly};
pub use poly::{Mono, Poly, NVARS, VAR_NAMES};
pub use ratfun::{rf_normalize, RatFun};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error at column {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}
