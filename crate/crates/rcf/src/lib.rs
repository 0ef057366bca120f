//! Decision procedure and quantifier elimination for the first-order theory
//! of real closed ordered fields.
//!
//! The crate has three independent legs that only share the polynomial and
//! formula layers:
//!
//! * [`qe`] — the elimination engine: prenex/DNF reduction, the five-way
//!   interval split with reciprocal substitution, and the bounded-interval
//!   recursion driven by the degree measure, with pseudo-reduction case
//!   splits for parametric coefficients.
//! * [`oracle`] — ground truth for one-variable sentences via Sturm
//!   sequences and exact root isolation, plus seeded sampling-based
//!   equivalence checking. It never calls into [`qe`].
//! * [`schemes`] — generators for the first-order axiom schemes of ordered
//!   fields (continuous induction, definable completeness, IVT, square
//!   roots, odd-degree roots, quadratic factorization), fed to the engine.
//!
//! See the `examples/` directory for one runnable program per capability,
//! and the `rcf` binary for the command-line front end.

pub mod cli;
pub mod formula;
pub mod oracle;
pub mod poly;
pub mod qe;
pub mod rational;
pub mod schemes;

pub use formula::{parse, Atom, AtomKind, Formula};
pub use poly::{Monomial, Polynomial, UnivariateView};
pub use rational::Rational;
