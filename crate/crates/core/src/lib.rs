//! Exact computations with tropical cycles.
//!
//! The crate works entirely over `Q` with arbitrary-precision integers:
//!
//! * [`geometry`]: polyhedra with synchronized inequality/generator
//!   descriptions, face lattices, integer lattices.
//! * [`cycles`]: polyhedral complexes, weighted cycles, balancing, stars.
//! * [`plfunc`]: piecewise affine/quadratic functions, corner loci and the
//!   weak tropical plurisubharmonicity check.
//! * [`slicing`]: stable intersection with rational hyperplanes.
//! * [`maxprinciple`]: local maxima, local constancy certificates and
//!   slicing traces for the tropical maximum principle.
//! * [`document`] and [`cli`]: the JSON file formats and the `tropkit`
//!   command line.

pub mod cli;
pub mod cycles;
pub mod document;
pub mod error;
pub mod geometry;
pub mod maxprinciple;
pub mod plfunc;
pub mod slicing;

pub use error::{Error, Result};
