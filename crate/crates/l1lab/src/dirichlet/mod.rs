//! Dirichlet characters, Gauss sums, L(1, chi), and the conductor scan.

pub mod arith;
mod character;
mod group;
mod lvalue;
mod scan;

pub use character::{conductor, enumerate_characters, enumerate_in, CharValue, CharacterFilter, DirichletCharacter, Parity};
pub use group::{Component, Generator, UnitGroup};
pub use lvalue::{
    default_delta, gauss_sum, gauss_sum_with, l1_closed_form, l1_closed_form_with, l1_via_eq13, l1_via_eq13_with,
    n_max_for, ClosedForm, ModulusTables, SmoothedWeights,
};
pub use scan::{scan_modulus, scan_theorem1, LValueRecord, LValueRow, ModulusExtrema, RecordRef, ScanResult, ScanSummary};

/// Builds the unit group of (Z/q)^*.
pub fn unit_group(q: u64) -> crate::Result<UnitGroup> {
    UnitGroup::new(q)
}
