//! Riemann problem toolkit for the nonconservative limiting elastodynamics
//! system
//!
//! ```text
//! u_t + u u_x - sigma_x = 0
//! sigma_t + u sigma_x   = 0
//! ```
//!
//! and its strictly hyperbolic parent, where the stress equation carries an
//! extra `-k^2 u_x`. The crate covers shock curves under DLM paths
//! ([`dlm_paths`], [`rh_shock`]), delta-shock solutions ([`delta_shock`]),
//! and two independent numerical verifications of those solutions: the
//! mollifier-regularized ansatz ([`weak_asymptotics`]) and the integral
//! identities ([`identity_verify`]).

pub mod convergence;
pub mod delta_shock;
pub mod dlm_paths;
pub mod error;
pub mod identity_verify;
pub mod quadrature;
pub mod rh_shock;
pub mod state;
pub mod test_function;
pub mod weak_asymptotics;

pub use error::{Error, Result};
pub use state::{jumps, to_heaviside_form, JumpConvention, Jumps, RiemannData, SigmaBarDecomposition, State};
