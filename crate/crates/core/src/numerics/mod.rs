//! Grids, quadrature, residual summaries and the one-step ODE kernel.

mod domain;
mod exec;
mod ode;
mod prolong;
mod quadrature;
mod residual;
pub mod stencil;

pub use domain::IntegrationDomain;
pub use exec::Exec;
pub use ode::{rk4_integrate, rk4_step, Rhs};
pub use prolong::jet_prolong_section;
pub use quadrature::{boundary_quadrature, quadrature};
pub use residual::{residual_at_points, residual_grid, ResidualEntry, ResidualSummary};
