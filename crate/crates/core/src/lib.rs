//! Recurrence coefficients of orthogonal polynomials for the semi-classical
//! Krawtchouk weight
//!
//! ```text
//! w(k) = C(N, k) c^k / (1 − α)_k,   k = 0..N,   α < 1, c > 0.
//! ```
//!
//! The coefficients are computed two independent ways, by iterating a coupled
//! discrete system from closed-form initial values ([`dpsystem`]) and by the
//! Stieltjes procedure on the lattice ([`moments`]), and the structures
//! attached to them are certified numerically: ladder compatibility, the Toda
//! flow in `c` ([`toda`]), Painlevé V and its Cosgrove form ([`painleve`]) and
//! the classical Krawtchouk limit ([`limit`]).

pub mod cli;
pub mod convergence;
pub mod dpsystem;
pub mod error;
pub mod limit;
pub mod moments;
pub mod numerics;
pub mod painleve;
pub mod parallel;
pub mod toda;
pub mod weight;

pub use dpsystem::{trajectory, Trajectory, XYState};
pub use error::{Error, Result};
pub use moments::{stieltjes, JacobiCoefficients};
pub use numerics::{BigFloat, Mode, Rational, Scalar};
pub use parallel::Execution;
pub use weight::WeightParams;
