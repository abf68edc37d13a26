//! Independent checks: manufactured solutions, decay fits, weak residuals
//! and gain sweeps.

pub mod decay;
pub mod manufactured;
pub mod powersum;
pub mod sweep;
pub mod weak;
