//! Selfish bin covering: a coordination game where items pick bins, a bin
//! pays its members in proportion to their size once it is covered, and the
//! library checks, constructs and enumerates the stable partitions.

pub mod cli;
pub mod dynamics;
pub mod equilibria;
pub mod format;
pub mod generators;
pub mod io;
pub mod model;
pub mod oracle;
pub mod potential;

pub use equilibria::{verify, BinTarget, Deviation, EquilibriumKind, Verdict, Violation};
pub use model::{Instance, ModelError, Partition, Payoff, Size};
pub use potential::PotentialVector;
