//! Signed directed endorsement/accusation networks.
//!
//! The crate is organised around [`graph::SignedDigraph`], a simple directed
//! graph whose edges are either endorsements (`+`) or accusations (`−`):
//!
//! * [`motif`] classifies dyads and triads, counts them, and compares the
//!   counts against an Erdős–Rényi baseline.
//! * [`observer`] contains the strategies an outside observer can use to
//!   separate honest nodes from cheaters, together with exact checkers for the
//!   structural conditions under which those strategies are guaranteed to work.
//! * [`dynamics`] runs implication-avoiding dynamics, where implicated nodes
//!   flip their outgoing edges until nothing implicates them.
//! * [`generators`] builds seeded random and adversarial instances.
//! * [`io`] and [`experiment`] handle edge-list files and reproducible runs.

pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod io;
pub mod motif;
pub mod observer;

pub use error::{Error, Result};
pub use graph::{Closure, NodeId, NodeSet, Partition, Role, Sign, SignedDigraph};
