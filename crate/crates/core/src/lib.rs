//! Subsystem many-hypercube codes built from concatenated [[4,2,2]] codes.
//!
//! The crate constructs the subsystem and original `D_{4^r}` codes, samples
//! i.i.d. bit-flip errors, and decodes them with a bounded-distance reference
//! formula, an exhaustive MAP oracle, the recursive block-MAP decoder, a
//! level-by-level minimum-distance decoder and a small neural network.

pub mod channel;
pub mod code;
pub mod decoders;
pub mod error;
pub mod gf2;
pub mod harness;
pub mod nn;

pub use error::{Error, Result};
