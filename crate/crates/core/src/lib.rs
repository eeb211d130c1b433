//! Exact-arithmetic laboratory for incidence geometry over prime fields and
//! the rationals.
//!
//! The crate constructs vanishing polynomials by parameter counting, measures
//! how line families concentrate on flats, runs a polynomial partition engine
//! with exact error accounting, and verifies incidence bounds on generated
//! configurations. All arithmetic is exact: residues mod p or reduced
//! fractions, never floating point (floats appear only in reported bound
//! values with fractional exponents).

pub mod concentrate;
pub mod error;
pub mod exactfield;
pub mod geom;
pub mod harness;
pub mod incidence;
pub mod io;
pub mod mpoly;
pub mod partition;
pub mod rng;
pub mod vanish;

pub use error::{Error, Result};
pub use exactfield::{matrix::Matrix, FieldSpec, Scalar};
pub use geom::{AffineObject, ObjectKind, VarietySet};
pub use mpoly::{MonomialBasis, MultiPoly};
