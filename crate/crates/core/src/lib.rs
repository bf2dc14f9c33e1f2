//! Exact finite-field computations for crosscorrelation analysis of
//! m-sequence pairs under Niho-type decimations.
//!
//! Everything here is integer arithmetic over explicit field presentations:
//! character sums and Walsh spectra, unit-circle root counts of the
//! associated low-degree polynomials, conjugation-orbit bookkeeping, and an
//! elementary-symmetric-function calculus over GF(2).  The crate favors
//! independent computation routes for the same quantity so results can be
//! cross-checked rather than trusted.

pub mod campaign;
pub mod error;
pub mod field;
pub mod keypoly;
pub mod numth;
pub mod orbits;
pub mod poly;
pub mod sequences;
pub mod spectra;
pub mod symfun;

pub use error::{Error, Result};
pub use field::{
    build_extension, build_field, build_field_opts, build_field_with_modulus, element_degree,
    embed, express_over_parent, on_unit_circle, pi_in, tau_in, unit_circle, FieldCtx, FieldElem,
};
pub use poly::Poly;
