//! Error-controlled numerics for explicit upper bounds on |L(1, chi)| when
//! chi is even, primitive and chi(2) = 1, and for the class numbers of real
//! quadratic fields that follow from them.

pub mod bounds;
pub mod cli;
pub mod dirichlet;
pub mod error;
pub mod gfun;
pub mod oscillatory;
pub mod precision;
pub mod quadratic;
pub mod quadrature;
pub mod special_functions;

pub use error::{Error, Result};
pub use precision::{PrecisionComplex, PrecisionReal};
