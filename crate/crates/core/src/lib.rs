//! Semiclassical wave fields near a fold caustic, computed three ways (two-phase
//! WKB, Kravtsov-Ludwig uniform asymptotics and Wigner phase-space asymptotics)
//! and cross-checked against exact Airy-function identities.

// `!(a > b)` is used on purpose so that NaN inputs fall into the rejection branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod export;
pub mod kl;
pub mod numerics;
pub mod rays;
pub mod specfun;
pub mod stphase;
pub mod surgery;
pub mod validation;
pub mod wigner;
pub mod wkb;

pub use error::{Error, Result};
