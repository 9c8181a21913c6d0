//! Zero-sum invariants and product sets of sequences over small finite groups.
//!
//! The crate computes the small Davenport constant `d(G)` and the
//! Erdős–Ginzburg–Ziv type constant `E(G)` by exhaustive search, enumerates
//! the extremal sequences, and checks the structure of those sequences for the
//! metacyclic groups `C_p ⋉ C_m`.

pub mod classify;
pub mod cli;
pub mod elemset;
pub mod group;
pub mod invariants;
pub mod lemma_lab;
pub mod products;
pub mod sequence;

pub use elemset::{ElemSet, Element};
pub use group::{Group, GroupError, MetacyclicSpec};
pub use sequence::Sequence;
