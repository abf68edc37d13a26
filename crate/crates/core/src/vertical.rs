//! Per-mode solver for the vertical component, the scalar problem
//! `−v'' − (1+γ)v'/r + (n² + iαn)v/r² = f_{3,n}`, `v(1) = 0`, `v → 0`.

use num_complex::Complex64;

use crate::background::HamelParameters;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::profile::{Component, ModeProfile};
use crate::spectral::compute_coefficients;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Debug, Clone)]
pub enum VerticalForcing {
    Pointwise { f3: ModeProfile },
    /// `f_3 = div_h(F_{r3} e_r + F_{θ3} e_θ)`.
    Divergence { r3: ModeProfile, theta3: ModeProfile },
}

#[derive(Debug, Clone)]
pub struct VerticalForcingMode {
    pub mode: i32,
    pub forcing: VerticalForcing,
}

impl VerticalForcingMode {
    pub fn pointwise(mode: i32, f3: ModeProfile) -> Self {
        Self {
            mode,
            forcing: VerticalForcing::Pointwise { f3 },
        }
    }

    pub fn divergence(mode: i32, r3: ModeProfile, theta3: ModeProfile) -> Self {
        Self {
            mode,
            forcing: VerticalForcing::Divergence { r3, theta3 },
        }
    }

    fn profiles(&self) -> Vec<&ModeProfile> {
        match &self.forcing {
            VerticalForcing::Pointwise { f3 } => vec![f3],
            VerticalForcing::Divergence { r3, theta3 } => vec![r3, theta3],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.profiles().iter().all(|p| p.is_zero())
    }

    pub fn conj(&self) -> Self {
        let forcing = match &self.forcing {
            VerticalForcing::Pointwise { f3 } => VerticalForcing::Pointwise { f3: f3.conj() },
            VerticalForcing::Divergence { r3, theta3 } => VerticalForcing::Divergence {
                r3: r3.conj(),
                theta3: theta3.conj(),
            },
        };
        Self {
            mode: -self.mode,
            forcing,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerticalSolutionMode {
    pub mode: i32,
    pub v3: ModeProfile,
    pub dv3: ModeProfile,
}

impl VerticalSolutionMode {
    pub fn zero(grid: &RadialGrid, mode: i32) -> Self {
        Self {
            mode,
            v3: grid.zeros(mode, Component::Axial),
            dv3: grid.zeros(mode, Component::Axial),
        }
    }
}

fn finish(mode: i32, v: ModeProfile, dv: ModeProfile) -> VerticalSolutionMode {
    VerticalSolutionMode {
        mode,
        v3: v.with_mode(mode).with_component(Component::Axial),
        dv3: dv.with_mode(mode).with_component(Component::Axial),
    }
}

fn gate(forcing: &VerticalForcingMode, grid: &RadialGrid, params: &HamelParameters) -> Result<()> {
    if !(params.gamma > 2.0) {
        return Err(Error::inadmissible("gamma > 2", "Hamel flux too weak"));
    }
    for p in forcing.profiles() {
        grid.check(p)?;
    }
    Ok(())
}

pub fn solve_vertical_mode_any(
    grid: &RadialGrid,
    forcing: &VerticalForcingMode,
    params: &HamelParameters,
) -> Result<VerticalSolutionMode> {
    if forcing.mode == 0 {
        solve_vertical_axisymmetric(grid, forcing, params)
    } else {
        solve_vertical_mode(grid, forcing, params)
    }
}

/// `n = 0`: homogeneous solutions `r^{-γ}` and `1`, Wronskian `γ r^{-γ-1}`.
pub fn solve_vertical_axisymmetric(
    grid: &RadialGrid,
    forcing: &VerticalForcingMode,
    params: &HamelParameters,
) -> Result<VerticalSolutionMode> {
    if forcing.mode != 0 {
        return Err(Error::ModeMismatch {
            expected: "0".into(),
            got: forcing.mode,
        });
    }
    gate(forcing, grid, params)?;
    if forcing.is_zero() {
        return Ok(VerticalSolutionMode::zero(grid, 0));
    }
    let gamma = params.gamma;
    let r = grid.r_nodes();
    match &forcing.forcing {
        VerticalForcing::Pointwise { f3 } => {
            let h = f3.mul_rpow(r, 1.0);
            let inn = grid.inner(c(gamma), &h);
            let out = grid.outer(c(0.0), &h)?;
            let m = out.values[0];
            let v = ModeProfile::combine(&[(-m, &grid.power(c(-gamma), 0)), (c(1.0), &inn), (c(1.0), &out)])
                .scale_real(1.0 / gamma);
            let dv = ModeProfile::combine(&[(m, &grid.power(c(-gamma - 1.0), 0)), (c(-1.0), &inn.mul_rpow(r, -1.0))]);
            Ok(finish(0, v, dv))
        }
        VerticalForcing::Divergence { r3, .. } => {
            // The θ3 component carries no n = 0 contribution.
            let inn = grid.inner(c(gamma), r3);
            let v = inn.scale_real(-1.0);
            let dv = inn.mul_rpow(r, -1.0).scale_real(gamma).sub(r3);
            Ok(finish(0, v, dv))
        }
    }
}

/// `n ≠ 0`: homogeneous solutions `r^{-ζ_n-γ/2}` and `r^{ζ_n-γ/2}`.
pub fn solve_vertical_mode(
    grid: &RadialGrid,
    forcing: &VerticalForcingMode,
    params: &HamelParameters,
) -> Result<VerticalSolutionMode> {
    let n = forcing.mode;
    if n == 0 {
        return Err(Error::AxisymmetricMode);
    }
    gate(forcing, grid, params)?;
    if forcing.is_zero() {
        return Ok(VerticalSolutionMode::zero(grid, n));
    }
    let sc = compute_coefficients(n, params.alpha, params.gamma)?;
    let half_g = 0.5 * params.gamma;
    let p = sc.zeta + half_g;
    let m = sc.zeta - half_g;
    let inv2z = 1.0 / (2.0 * sc.zeta);
    let r = grid.r_nodes();
    let hom = grid.power(-p, n);
    let hom_d = grid.power(-p - 1.0, n);

    let (inn, out, k) = match &forcing.forcing {
        VerticalForcing::Pointwise { f3 } => {
            let h = f3.mul_rpow(r, 1.0);
            let inn = grid.inner(p, &h);
            let out = grid.outer(m, &h)?;
            (inn, out, None)
        }
        VerticalForcing::Divergence { r3, theta3 } => {
            let i_n = I * n as f64;
            let h1 = ModeProfile::combine(&[(-p, r3), (i_n, theta3)]);
            let h2 = ModeProfile::combine(&[(m, r3), (i_n, theta3)]);
            let inn = grid.inner(p, &h1);
            let out = grid.outer(m, &h2)?;
            (inn, out, Some(r3))
        }
    };
    let c0 = out.values[0];
    let v = ModeProfile::combine(&[(-c0, &hom), (c(1.0), &inn), (c(1.0), &out)]).scale(inv2z);
    let mut dv = ModeProfile::combine(&[
        (p * c0, &hom_d),
        (-p, &inn.mul_rpow(r, -1.0)),
        (m, &out.mul_rpow(r, -1.0)),
    ])
    .scale(inv2z);
    if let Some(r3) = k {
        dv = dv.sub(r3);
    }
    Ok(finish(n, v, dv))
}
