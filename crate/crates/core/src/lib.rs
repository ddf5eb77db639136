//! Abelian sandpile and rotor-router models on finite directed
//! multigraphs: stabilization, sandpile-group arithmetic, recurrence
//! tests, rotor dynamics on unicycles, the group action on oriented
//! spanning trees, stack-based cycle-popping, and lattice aggregation.
//!
//! The crate is organized around immutable snapshots: graphs are fixed
//! after construction and every engine operation returns a new
//! configuration, so independent computations parallelize freely. The
//! `parallel` feature (default) backs the sweep stabilizer and the
//! aggregation engine with rayon; without it the same entry points run
//! sequentially.

pub mod format;
pub mod graph;
pub mod intalg;
pub mod oracle;
pub mod randgen;
pub mod rotor;
pub mod sandpile;
pub mod stacks;
pub mod verify;

pub use graph::{classify, generate, Digraph, Family, GraphClassification};
pub use intalg::{GroupStructure, IntMatrix, Rational};
pub use rotor::{RotorConfig, SingleChipState};
pub use sandpile::{ChipConfig, Odometer, Policy, SignedConfig};
pub use stacks::StackConfig;
