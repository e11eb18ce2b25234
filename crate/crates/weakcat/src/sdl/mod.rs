//! Scenario description language: a line-oriented text format for bases,
//! states, circuits, observables and claims.
//!
//! ```text
//! scenario demo "two-path toy"
//! basis path = 1 2
//! basis spin = s_up s_dn
//! state pre  = (1/sqrt2)|1,s_up> + (1/sqrt2)|2,s_dn>
//! state post = |1,s_up>
//! circuit = bs(1, 2); spinturner(2, x, pi)
//! observe P1 = proj(path=1)
//! claim P1 = 1 "reference value"
//! interpretation = evolved
//! ```

pub mod ast;
mod exact;
pub mod lexer;
pub mod lower;
pub mod parser;
pub mod serialize;

pub use ast::{Diagnostic, ScenarioDoc, Severity, Span};
pub use lower::{lower, Lowered};
pub use parser::{parse, parse_expr};
pub use serialize::{serialize, serialize_expr};

/// Parses and lowers in one step.
pub fn compile(text: &str, default_name: &str) -> Result<Lowered, Vec<Diagnostic>> {
    lower(&parse(text)?, default_name)
}
