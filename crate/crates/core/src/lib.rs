//! Searchable partial sums over static sequences of small integers, and a
//! Wheeler-graph pattern-matching index built from them.
//!
//! The building blocks, bottom up:
//!
//! * [`bitvector`]: plain bit vectors with constant-time rank and select.
//! * [`entropy`]: zeroth- and `k`-th order empirical entropy.
//! * [`fv`]: block-compressed storage with constant-time short extractions.
//! * [`partial_sums`]: `sum`/`search` structures in three flavours.
//! * [`wheeler`]: graph model, axiom validator and the pattern index.
//! * [`gen`]: seeded generators for sequences and Wheeler graphs.

pub mod bitvector;
pub mod entropy;
mod error;
pub mod fv;
pub mod gen;
mod io;
pub mod partial_sums;
pub mod wheeler;

pub use bitvector::{BitVector, RankSelectIndex};
pub use entropy::{h0, hk, ContextTable, SequenceStats};
pub use error::{Error, Result};
pub use fv::{FvParams, FvStore};
pub use partial_sums::{
    AnyPartialSums, Backend, ChainSums, EntropySums, InDegreeSums, MnSums, OutDegreeSums,
    PartialSums, SpaceBreakdown,
};
pub use wheeler::{Interval, LabeledGraph, Violation, WheelerIndex};
