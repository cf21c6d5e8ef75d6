//! Numerical and symbolic toolkit for the two-bracket (multisymplectic)
//! structure of the nonlinear Schrodinger equation with an integrable point
//! defect of frozen-Backlund type.
//!
//! The crate verifies, on lattices and exactly where possible:
//! both conserved-charge ladders in space and the ladder in time, the
//! equal-time and equal-space classical r-matrix relations, the defect
//! matrix and its flow equation, the defect-modified generating function of
//! conserved charges, the generating functional of the defect canonical
//! transformation, and the composite defect monodromy. A small exact
//! symbolic engine handles the algebraic identities; everything else is
//! floating-point numerics over explicit lattices.

pub mod charges;
pub mod config;
pub mod defect;
pub mod field;
pub mod grid;
pub mod lattice;
pub mod lax;
pub mod monodromy;
pub mod ode;
pub mod poisson;
pub mod report;
pub mod solver;
pub mod svg;
pub mod symbolic;

pub use num_complex::Complex64;

/// Sign of the nonlinearity: -1 focusing, +1 defocusing.
pub type Epsilon = i8;
