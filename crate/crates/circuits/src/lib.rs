//! Prebuilt circuits on top of the spiking core, each with the protocol
//! that exercises it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bdm;
pub mod column;
pub mod digits;
pub mod drosophila;
pub mod mouse;
mod error;

pub use error::CircuitError;
