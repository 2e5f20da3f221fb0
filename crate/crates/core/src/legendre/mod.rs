//! Regularity, Legendre coordinates, the Hamiltonian and the
//! Hamilton–de Donder equations.

mod chart;
mod hdd;
mod regularity;

pub use chart::{hdd_residual, legendre_chart, round_trip, HddEquation, HddResidual, LegendreChartData};
pub use hdd::{hdd_integrate, trajectory_checks, HddSystem, Trajectory, TrajectoryChecks, TrajectoryPoint};
pub use regularity::{
    assembled_matrix, cholesky_positive_definite, hessian_definiteness, hessian_matrix, numeric_rank,
    regularity_blocks, regularity_report, Definiteness, Key, RegularityBlock, RegularityReport, SymbolicBlock,
    SymbolicMatrix,
};
