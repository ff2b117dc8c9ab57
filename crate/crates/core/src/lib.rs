//! Semiclassical level widths of quantum states coupled to an ohmic bath.

pub mod classical;
pub mod dipole;
pub mod dos;
pub mod error;
pub mod potentials;
pub mod quad;
pub mod roots;
pub mod scaling;
pub mod special;
pub mod table;
pub mod tail;
pub mod verify;
pub mod widths;
pub mod wkb;

pub use error::{Error, Result};
pub use potentials::{Family, PotentialSpec, Walls};
