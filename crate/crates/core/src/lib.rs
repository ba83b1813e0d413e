//! Return-time sets of rotations on compact abelian Lie groups, and the
//! spectral reconstruction of the rotation from a return-time set alone.

pub mod error;
pub mod group;
pub mod literal;
pub mod orbit;
pub mod spectral;

pub use error::{Error, Result};
