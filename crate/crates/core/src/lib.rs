//! Conformal barycenters of measures on `Sⁿ` and the barycentric extension
//! of sphere maps into the unit ball.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barycenter;
pub mod chart;
pub mod complex;
pub mod error;
pub mod expr;
pub mod extension;
pub mod formats;
pub mod measure;
pub mod mobius;
pub mod quadrature;
pub mod report;
pub mod sphere_map;
pub mod suites;
pub mod vector;

pub use error::{Error, Result};
