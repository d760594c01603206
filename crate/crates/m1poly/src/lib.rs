//! Numerical toolkit for the −1 orthogonal polynomials (specialized Chihara,
//! Big −1 Jacobi, dual −1 Hahn, Bannai-Ito), the osp(1|2) Clebsch-Gordan and
//! Racah coefficients built from them, and residual checks of the
//! convolution identities and generating functions they satisfy.

pub mod cli;
pub mod coupling;
pub mod draws;
pub mod error;
pub mod families;
pub mod identities;
pub mod numerics;
pub mod quadrature;
pub mod report;

pub use error::{Error, Result};
