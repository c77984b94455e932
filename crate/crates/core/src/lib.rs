//! Analog beamforming codebook design for multi-module mmWave handsets under
//! hand blockage.
//!
//! The crate evaluates spherical coverage of a codebook over a direction
//! grid, designs codebooks greedily from a matched-filter candidate set, and
//! compares three ways of adapting the codebook to how the phone is held:
//! ignoring the hand, knowing only the activity, or knowing the exact grip.
//! Grip fields are composed from nine single-module blockage cases.

pub mod codebook;
pub mod compare;
pub mod config;
pub mod coverage;
pub mod error;
pub mod field;
pub mod grid;
pub mod grip;
pub mod pipeline;
pub mod synth;

pub use codebook::{Codebook, Codeword, Scheme};
pub use coverage::{coverage_profile, gain, CoverageReport};
pub use error::{Error, Result};
pub use field::ResponseField;
pub use grid::{make_direction_grid, DirectionGrid};
