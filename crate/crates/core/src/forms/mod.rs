//! Exterior algebra over the jet chart.

mod contact;
mod form;
mod ops;

pub use contact::{
    contact_decompose, contact_decompose_with, contact_form, expand_contact, horizontal, omega0, omega_basis, omega_i,
    to_contact_basis, ContactDecomposition, ContactForm, ContactSymbol, HorizontalMode, OmegaBasis,
};
pub use form::{Basis, DiffForm, Form};
pub use ops::{ext_d, interior_product, pullback};
