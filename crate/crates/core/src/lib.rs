//! Geodesic flow and conjugate-locus singularities of 3D contact
//! sub-Riemannian structures given in normal form.

pub mod caustic;
pub mod classifier;
pub mod cli;
pub mod fitseries;
pub mod flow;
pub mod model;
pub mod scalar;
