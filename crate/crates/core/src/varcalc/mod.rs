//! Momenta, Euler–Lagrange expressions, Lepagean equivalents and the
//! Hamilton form.

mod hamilton;
mod lepage;
mod momenta;
mod problem;
mod variation;

pub use hamilton::{extended_lagrangian, hamilton_extremal_residual, hamilton_form, HamiltonFormTable};
pub use lepage::{
    lepagean_defect, lepagean_from_g, poincare_cartan, q_table, FKey, GSpec, LepageanDefect, LepageanForm,
};
pub(crate) use momenta::inv_weight;
pub use momenta::{euler_lagrange, momenta, momenta_with, MomentaTable, WeightPlacement};
pub use problem::LagrangianProblem;
pub use variation::{first_variation_check, prolong_vector_field, FirstVariation};
