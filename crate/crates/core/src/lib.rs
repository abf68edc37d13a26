//! Steady, vertically uniform flow past a circular cylinder as a
//! perturbation of the Hamel flow, solved mode by mode in `θ`.

// `!(x > 0.0)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod background;
pub mod config;
pub mod convolution;
pub mod error;
pub mod families;
pub mod field;
pub mod grid;
pub mod horizontal;
pub mod linear;
pub mod norms;
pub mod picard;
pub mod profile;
pub mod run;
pub mod spectral;
pub mod verification;
pub mod vertical;
