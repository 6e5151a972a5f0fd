//! Persistency analysis for quadratic unconstrained binary optimization.
//!
//! The pipeline turns a [`Qubo`] into a posiform, builds its implication
//! network, solves a maximum flow and reads strong and weak persistencies
//! off the residual network. Probing strengthens the result, and the
//! graph problem encodings, generators and exact oracles support the
//! experiments.

pub mod decompose;
pub mod graphs;
pub mod model;
pub mod network;
pub mod oracle;
pub mod persistency;
pub mod posiform;
pub mod problems;
pub mod probing;
pub mod scalar;

pub use model::{
    Assignment, Domain, IsingModel, ModelError, Qubo, Reduction, Substitution,
};
pub use posiform::{Literal, Posiform};
pub use scalar::{Rational, Scalar};

pub type RationalQubo = Qubo<Rational>;
pub type IntQubo = Qubo<i64>;
pub type FloatQubo = Qubo<f64>;
pub type RationalIsing = IsingModel<Rational>;
pub type IntIsing = IsingModel<i64>;
pub type FloatIsing = IsingModel<f64>;
