//! Desk-scale computability workbench: a small tape VM, optimal-machine
//! constructions over halt-event streams, exact halting statistics,
//! approximate halting deciders and a length-bounded bijection builder.

pub mod approx;
pub mod bijection;
pub mod cli;
pub mod codec;
pub mod dovetail;
pub mod machine;
pub mod optimalkit;
pub mod rational;

pub use machine::{bs, BinStr, RunOutcome};
