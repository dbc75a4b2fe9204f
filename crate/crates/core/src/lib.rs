//! Numerical laboratory for the point scatterer on the standard flat torus
//! `T^3 = R^3 / 2πZ^3`.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice_arith`]: sums of three squares, the `r3` sieve, lattice points
//!   on spheres, the 4-adic good/bad classification of shells.
//! - [`spectrum`]: the secular equation of the scatterer and its interlaced
//!   perturbed eigenvalues, plus synthetic interlaced sequences.
//! - [`green`]: Green's function norms, truncated Green's functions and the
//!   normalized eigenfunctions built from them.
//! - [`harmonics`]: complex spherical harmonics and lattice Weyl sums.
//! - [`pdo`]: toroidal quantization of band-limited symbols on `T^3 × S^2`
//!   and exact matrix elements against truncated Green's functions.
//! - [`experiments`]: quantum-ergodicity sweeps along interlaced sequences.
//! - [`cli`]: the `scatter3d` command line, CSV writers and run manifests.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod green;
pub mod harmonics;
pub mod lattice_arith;
pub mod pdo;
pub mod quadrature;
pub mod spectrum;

mod series;

pub use error::{Error, Result};

/// A point on the torus, coordinates taken mod 2π.
pub type TorusPoint = [f64; 3];
