//! Presentations of SL(2,C) character varieties.
//!
//! Given a finite presentation `<X_1..X_r | R_1..R_s>` of a group, this crate
//! produces generators (traces of words of length at most three) and defining
//! relations of the coordinate ring of its SL(2,C) character variety, with
//! exact rational arithmetic, Gröbner-basis tools and numeric cross-checks.

pub mod cli;
pub mod groebner;
pub mod numeric;
pub mod poly;
pub mod relations;
pub mod traces;
pub mod words;

pub use poly::{Monomial, MonomialOrder, OrderKind, TracePolynomial, TraceVariable};
pub use traces::{reduce_trace, MatrixExpr};
pub use words::{parse_word, DegreeVector, FreeWord};
