//! Pore-scale lattice Boltzmann (D3Q19) flow solver for periodic sphere
//! packs, with interchangeable collision operators (SRT/TRT/MRT), six
//! solid-wall bounce-back schemes, a periodic pressure-drop drive, and an
//! analysis layer for permeability, Forchheimer, Barree-Conway and
//! friction-factor studies.

pub mod analysis;
pub mod boundary;
pub mod collision;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod io;
pub mod lattice;
pub mod presets;

pub use error::{Error, Result};
