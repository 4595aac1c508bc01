//! Positive linear operators of Szász type driven by two-sided Appell
//! weight sequences, with an exact moment calculus, cross-checked numerical
//! routes, printed-formula reconciliation, and convergence-rate experiments.

pub mod appell;
pub mod cli;
pub mod engine;
pub mod functions;
pub mod kernel;
pub mod moments;
pub mod numerics;
pub mod rates;
