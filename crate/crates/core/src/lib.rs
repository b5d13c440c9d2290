//! Relational analogy matching over typed entity networks, with two
//! network sources: static chess positions and serialized proof states.
//! Also tactic-schema statistics over a proof corpus and a CLI driver.

pub mod chess;
pub mod cli;
pub mod error;
pub mod files;
pub mod lean;
pub mod matcher;
pub mod relnet;
pub mod stats;
pub mod synth;
