//! Ordinal notations, trees, and back-and-forth relations on computable
//! structures built from trees.

pub mod backforth;
pub mod coding;
pub mod error;
pub mod morozov;
pub mod notation;
pub mod ordinal;
pub mod rankgame;
pub mod structure;
pub mod thintree;
pub mod tree;
pub mod verify;

pub use error::{Error, Result};
