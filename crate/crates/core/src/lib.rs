//! Discrete gradient flows for semiconvex energies on Hilbert spaces of grid
//! functions, with diagnostics for the energy topology, the
//! Kurdyka–Łojasiewicz–Simon inequality and finite trajectory length.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

mod error;

pub mod energies;
pub mod energy;
pub mod flow;
pub mod analysis;
pub mod catalogue;
pub mod cli;
pub mod config;
pub mod verify;
pub mod hilbert;

pub use error::{Error, Result};
