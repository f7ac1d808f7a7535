//! Exact rational geometry: scalars, linear algebra, integer lattices and
//! polyhedra with dual descriptions.

pub mod dd;
pub mod lattice;
pub mod linalg;
pub mod polyhedron;
pub mod rational;

pub use lattice::{primitive_vector, LatticeBasis};
pub use polyhedron::{
    canonicalize, face_lattice, is_zgamma, lattice_normal_vector, relative_interior_point,
    AffineForm, Polyhedron, RawPolyhedron, ZGammaReport,
};
pub use rational::{QVec, Rational, ZVec};
