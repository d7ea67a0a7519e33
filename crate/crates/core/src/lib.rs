//! Founded semantics and constraint semantics for Datalog rules with
//! unrestricted negation, declarations of certain, uncertain, complete and
//! closed predicates, and brute-force reference semantics for comparison.

pub mod completion;
pub mod founded;
pub mod grounder;
pub mod language;
pub mod parser;
pub mod closed;
pub mod constraint;
pub mod pipeline;
pub mod oracles;
pub mod compare;
pub mod fuzz;
pub mod workloads;
