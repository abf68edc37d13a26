//! Full linearized solve, mode by mode: horizontal and vertical parts with
//! pointwise forcing `g` and divergence-form forcing `F`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::background::HamelParameters;
use crate::error::Result;
use crate::field::{ForcingSpec, VelocityField, VelocityMode};
use crate::grid::RadialGrid;
use crate::horizontal::{solve_mode, HorizontalForcingMode, HorizontalSolutionMode};
use crate::profile::ModeProfile;
use crate::vertical::{solve_vertical_mode_any, VerticalForcingMode, VerticalSolutionMode};

fn add_horizontal(acc: &mut VelocityMode, s: HorizontalSolutionMode) {
    let one = Complex64::new(1.0, 0.0);
    acc.v[0] = acc.v[0].axpy(one, &s.v_r);
    acc.v[1] = acc.v[1].axpy(one, &s.v_theta);
    acc.dv[0] = acc.dv[0].axpy(one, &s.dv_r);
    acc.dv[1] = acc.dv[1].axpy(one, &s.dv_theta);
}

fn add_vertical(acc: &mut VelocityMode, s: VerticalSolutionMode) {
    let one = Complex64::new(1.0, 0.0);
    acc.v[2] = acc.v[2].axpy(one, &s.v3);
    acc.dv[2] = acc.dv[2].axpy(one, &s.dv3);
}

/// Solves mode `n` with pointwise data `g = (g_r, g_θ, g_3)` and tensor
/// data `F = (rr, rθ, θr, θθ, r3, θ3)`.
pub fn solve_linear_mode(
    grid: &RadialGrid,
    params: &HamelParameters,
    n: i32,
    g: &[ModeProfile; 3],
    f: &[ModeProfile; 6],
) -> Result<VelocityMode> {
    let mut acc = VelocityMode::zero(grid, n);
    if !(g[0].is_zero() && g[1].is_zero()) {
        let h = HorizontalForcingMode::pointwise(n, g[0].clone(), g[1].clone());
        add_horizontal(&mut acc, solve_mode(grid, &h, params)?);
    }
    if f[..4].iter().any(|p| !p.is_zero()) {
        let h = HorizontalForcingMode::divergence(n, f[0].clone(), f[1].clone(), f[2].clone(), f[3].clone());
        add_horizontal(&mut acc, solve_mode(grid, &h, params)?);
    }
    if !g[2].is_zero() {
        let v = VerticalForcingMode::pointwise(n, g[2].clone());
        add_vertical(&mut acc, solve_vertical_mode_any(grid, &v, params)?);
    }
    if !(f[4].is_zero() && f[5].is_zero()) {
        let v = VerticalForcingMode::divergence(n, f[4].clone(), f[5].clone());
        add_vertical(&mut acc, solve_vertical_mode_any(grid, &v, params)?);
    }
    Ok(acc)
}

/// Solves every mode of the forcing concurrently.
pub fn solve_linear(grid: &RadialGrid, params: &HamelParameters, forcing: &ForcingSpec) -> Result<VelocityField> {
    let modes = forcing
        .modes()
        .par_iter()
        .map(|m| solve_linear_mode(grid, params, m.n, &m.g, &m.f))
        .collect::<Result<Vec<_>>>()?;
    VelocityField::from_modes(forcing.cutoff(), modes)
}
