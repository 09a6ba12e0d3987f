//! Finite-truncation numerics for the quantum complex Minkowski space.
//!
//! The crate realizes the massive-particle phase space as the future tube
//! (equivalently the 2x2 matrix ball), builds the coherent-state family and its
//! orthonormal basis, the coordinate ladder operators, the holomorphic discrete
//! series of SU(2,2), invariant-measure Monte-Carlo quadrature and the Berezin
//! symbol calculus, and checks the closed-form identities relating them.
//!
//! Module overview:
//! - [`conformal_geometry`]: tube/ball charts, group actions, momentum maps,
//!   observables and the Poisson bracket.
//! - [`fock_basis`]: the `(j, m, j1, j2)` basis under a degree cutoff.
//! - [`coherent_states`]: coefficient polynomials, kernels and amplitudes.
//! - [`ladder_operators`]: sparse annihilation/creation matrices and their
//!   diagonal closed forms.
//! - [`representation`]: exact polynomial calculus for the group action and its
//!   generators.
//! - [`berezin_quadrature`]: Monte-Carlo integration, symbols, star products and
//!   Toeplitz operators.
//! - [`suite`]: named invariant checks and tables shared by the CLI and the
//!   acceptance tests.

pub mod berezin_quadrature;
pub mod coherent_states;
pub mod conformal_geometry;
mod error;
pub mod fock_basis;
pub mod ladder_operators;
pub mod representation;
pub mod suite;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Complex 2x2 matrix used for points of the tube and of the ball.
pub type Mat2C = nalgebra::Matrix2<Complex64>;

/// Complex 4x4 matrix used for group and algebra elements.
pub type Mat4C = nalgebra::Matrix4<Complex64>;
