//! Numerical laboratory for edge universality in unitary matrix models.
//!
//! The crate builds the objects needed to study the soft edge of a one-cut
//! unitary ensemble with weight `exp(-n V(cos λ))`:
//!
//! * [`equilibrium`]: the equilibrium density, its edge `θ` and the edge scales.
//! * [`opuc`]: moments, Verblunsky coefficients, the CMV basis and the kernel `K_n`.
//! * [`cmv`]: the pentadiagonal CMV operator, its resolvent and the rotated operator near the edge.
//! * [`airy`]: Airy functions, the Airy-operator resolvent and the Airy kernel.
//! * [`fredholm`]: Nyström Fredholm determinants and gap probabilities.
//! * [`edgelab`]: finite-n versus limit kernel convergence studies.
//! * [`sampler`]: a Metropolis sampler for the eigenangle ensemble.
//! * [`cli`]: JSON-configured experiment runner used by the `umm-edge` binary.

pub mod airy;
pub mod cli;
pub mod cmv;
pub mod edgelab;
pub mod equilibrium;
pub mod error;
pub mod fredholm;
pub mod mp;
pub mod opuc;
pub mod quad;
pub mod sampler;

pub use error::{Error, Result};
pub use num_complex::Complex64;
