//! Light propagation in homogeneous waveguide arrays, Perelomov coherent
//! states of the Euclidean group E(2), and numerical checks of the
//! Cartesian and polar resolutions of the identity built from them.
//!
//! Everything works on a finite window `[-N, N]` of the extended Fock
//! basis. Index sums over all of ℤ are cut with [`specfun::truncation_rule`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coherent;
pub mod error;
pub mod helmholtz;
pub mod lattice;
pub mod quadrature;
pub mod resolution;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;
