//! Slope fields, Hamilton–Jacobi primitives, the Hilbert integral and the
//! Weierstrass excess.

mod section;
mod slope;
mod weierstrass;

pub use section::Section;
pub use slope::{
    action, components_from_pairs, field_pullback, geodesic_check, hilbert_integral, hj_primitive, homotopy_primitive,
    GeodesicCheck, SlopeField,
};
pub use weierstrass::{
    excess_identities, minimum_certificate, weierstrass, CertificateOptions, CertificateReport, Condition,
    WeierstrassData,
};
