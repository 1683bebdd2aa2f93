//! Exact computational projective geometry for planarizations: maps from
//! the projective plane that send lines into hyperplanes.
//!
//! The crate covers jets and the per-line hyperplane construction, dual
//! planarizations of rational maps, rational reconstruction from line
//! restrictions, and the classification of maps that take lines to curves
//! of a linear web of conics.

pub mod conicweb;
pub mod dualize;
pub mod error;
pub mod gen;
pub mod jetplan;
pub mod linalg;
pub mod mpoly;
pub mod poly;
pub mod projcore;
pub mod ratfit;
pub mod scalar;
pub mod upoly;

pub use error::{Error, Result};
pub use scalar::{Mode, Scalar};
