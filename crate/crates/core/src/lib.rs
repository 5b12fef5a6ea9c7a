//! Exact-arithmetic toolkit for two-dimensional Diophantine approximation.
//!
//! Irrational numbers are represented by finite continued-fraction prefixes and every
//! downstream quantity is computed exactly for the rational truncation. Floating point
//! only appears when exponents (ratios of logarithms) are reported.
//!
//! # Modules
//!
//! - [`cf`]: convergents, truncation values and exact distances `‖q θ‖`
//! - [`measure`]: irrationality measure functions as exact step functions
//! - [`exponents`]: finite-depth estimators of ordinary and uniform exponents
//! - [`constructors`]: partial-quotient prefixes with prescribed exponents
//! - [`bounds`]: the bound polynomials and theorem checks
//! - [`lattice`]: lattice minima `Ψ_Λ` by exact enumeration
//! - [`lemma`]: condition checks and witness search for pairs of step functions

#![no_std]
// negated float comparisons are deliberate: NaN must fail them
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![warn(
    clippy::cast_lossless,
    clippy::redundant_closure_for_method_calls,
    clippy::map_unwrap_or,
    clippy::items_after_statements
)]

extern crate alloc;

pub mod bounds;
pub mod cf;
pub mod constructors;
mod error;
pub mod exponents;
pub mod lattice;
pub mod lemma;
pub mod measure;
pub mod numeric;

#[doc(inline)]
pub use self::{
    cf::{Convergent, ExactDistance, PartialQuotients},
    error::{Error, Result},
    exponents::{ExponentEstimate, ExponentKind, Window},
    lattice::{Lattice2, LatticeMinimum},
    lemma::{StepPair, Witness},
    measure::StepFunction,
};
