//! Graph programs with relabelling, E-conditions, assertion transformations
//! and an incorrectness-logic proof checker validated by a bounded oracle.

pub mod expr;
pub mod graph;
pub mod matching;
pub mod econd;
pub mod rules;
pub mod program;
pub mod transform;
pub mod oracle;
pub mod proof;
pub mod syntax;
pub mod workspace;
pub mod cli;
