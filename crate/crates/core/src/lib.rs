//! Fire dynamics on random recursive trees.
//!
//! Edges of a tree are decided one at a time in a uniform random order. Each
//! decision makes the edge fireproof with probability `1 - p` or sets it on
//! fire with probability `p`; a fire instantly burns the whole component of
//! still-flammable edges around it. This crate holds the pure algorithmic
//! parts of the model:
//!
//! * [`tree`]: random recursive trees, spinal decompositions, heights.
//! * [`dynamics`]: direct simulation of the fire dynamics.
//! * [`cut_tree`]: the cut-tree of an edge-removal order, the mark process
//!   and the exact coupling between marked cut-trees and the dynamics.
//! * [`walk`]: the heavy-tailed walk with step law `1/(k(k+1))`, discrete
//!   stick-breaking and the beta-binomial subtree law.
//! * [`laws`]: reference limit laws, closed-form quantities, the KS
//!   statistic and an exhaustive small-tree oracle.
//!
//! Everything is `no_std` with `alloc`; randomness always comes from an
//! explicit [`rand::Rng`] supplied by the caller.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cut_tree;
pub mod dynamics;
mod error;
pub mod laws;
pub mod tree;
mod union_find;
pub mod walk;

pub use cut_tree::{CutTree, MarkedCutTree};
pub use dynamics::{EdgeFate, EdgeRandomness, Fate, FireEvent, FireOutcome};
pub use error::{Error, Result};
pub use tree::{SpinalDecomposition, Tree};
pub use walk::{StickBreaking, WalkPath};
