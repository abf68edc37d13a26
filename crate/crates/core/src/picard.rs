//! The map `T(w)`: solve the linearized system with forcing
//! `g + div(F − w⊗w)`, and its Picard iteration from `v⁰ = 0`.

use log::{debug, info};
use rayon::prelude::*;
use serde::Serialize;

use crate::background::{evaluate_v, HamelParameters};
use crate::convolution::tensor_convolution;
use crate::error::{Error, Result};
use crate::field::{ForcingSpec, VelocityField, VelocityMode};
use crate::grid::RadialGrid;
use crate::linear::{solve_linear, solve_linear_mode};

/// Consecutive steps with `q_k ≥ 1` tolerated before giving up.
pub const STALL_STEPS: usize = 3;

#[derive(Debug, Clone, Serialize)]
pub struct PicardDiagnostics {
    /// `‖v^{(k)}‖_{X_ρ}` for `k = 1, 2, …`.
    pub iterate_norms: Vec<f64>,
    /// `‖v^{(k+1)} − v^{(k)}‖_{X_ρ}` for `k = 0, 1, …`.
    pub increments: Vec<f64>,
    pub contraction_factors: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// `‖v^{(1)}‖ / (‖g‖ + ‖F‖)`.
    pub lambda_empirical: f64,
    pub tolerance: f64,
    /// `δ = 2‖v^{(1)}‖`.
    pub ball_radius: f64,
    pub within_ball: bool,
    /// `‖v − T(v)‖` for the returned iterate.
    pub final_residual: Option<f64>,
}

/// `T` with the linear response to `(g, F)` computed once.
pub struct PicardMap<'a> {
    grid: &'a RadialGrid,
    params: HamelParameters,
    base: VelocityField,
    forcing_norm: f64,
}

impl<'a> PicardMap<'a> {
    pub fn new(grid: &'a RadialGrid, params: &HamelParameters, forcing: &ForcingSpec) -> Result<Self> {
        forcing.check_admissible(grid, params)?;
        let base = solve_linear(grid, params, forcing)?;
        let forcing_norm = forcing.g_norm(grid, params.rho)? + forcing.f_norm(grid, params.rho)?;
        Ok(Self {
            grid,
            params: *params,
            base,
            forcing_norm,
        })
    }

    /// `T(0)`.
    pub fn base(&self) -> &VelocityField {
        &self.base
    }

    pub fn forcing_norm(&self) -> f64 {
        self.forcing_norm
    }

    /// The response to `div(−w⊗w)` alone.
    pub fn quadratic_part(&self, w: &VelocityField) -> Result<VelocityField> {
        let ww = tensor_convolution(w, w)?;
        let grid = self.grid;
        let params = &self.params;
        let cutoff = w.cutoff() as i32;
        let modes = (-cutoff..=cutoff)
            .into_par_iter()
            .map(|n| {
                let block = ww.divergence_block(n).unwrap().map(|p| p.scale_real(-1.0));
                let g = VelocityMode::zero(grid, n).v;
                solve_linear_mode(grid, params, n, &g, &block)
            })
            .collect::<Result<Vec<_>>>()?;
        VelocityField::from_modes(w.cutoff(), modes)
    }

    pub fn apply(&self, w: &VelocityField) -> Result<VelocityField> {
        if w.cutoff() != self.base.cutoff() {
            return Err(Error::CutoffMismatch(self.base.cutoff(), w.cutoff()));
        }
        if w.is_zero() {
            return Ok(self.base.clone());
        }
        self.base.axpy(1.0, &self.quadratic_part(w)?)
    }

    pub fn norm(&self, v: &VelocityField) -> Result<f64> {
        v.x_norm(self.grid, self.params.rho)
    }

    /// Runs `v^{(k+1)} = T(v^{(k)})` until the increment drops below
    /// `tol_rel · ‖v^{(1)}‖`.
    pub fn iterate(&self, max_iter: usize, tol_rel: f64) -> Result<(VelocityField, PicardDiagnostics)> {
        let first = self.base.clone();
        let first_norm = self.norm(&first)?;
        let mut diag = PicardDiagnostics {
            iterate_norms: vec![first_norm],
            increments: vec![first_norm],
            contraction_factors: Vec::new(),
            converged: false,
            iterations: 1,
            lambda_empirical: if self.forcing_norm > 0.0 {
                first_norm / self.forcing_norm
            } else {
                0.0
            },
            tolerance: tol_rel * first_norm,
            ball_radius: 2.0 * first_norm,
            within_ball: true,
            final_residual: None,
        };
        if first_norm == 0.0 {
            diag.converged = true;
            diag.final_residual = Some(0.0);
            return Ok((first, diag));
        }
        let mut current = first;
        let mut stalled = 0;
        while diag.iterations < max_iter {
            let next = self.apply(&current)?;
            let inc = self.norm(&next.sub(&current)?)?;
            let norm = self.norm(&next)?;
            let q = inc / diag.increments.last().copied().unwrap();
            diag.iterations += 1;
            diag.increments.push(inc);
            diag.iterate_norms.push(norm);
            diag.contraction_factors.push(q);
            diag.within_ball &= norm <= diag.ball_radius;
            debug!("picard step {}: increment {inc:.3e}, q = {q:.4}", diag.iterations);
            current = next;
            if !q.is_finite() || !norm.is_finite() {
                return Err(Error::NonContraction(Box::new(diag)));
            }
            if inc <= diag.tolerance {
                diag.converged = true;
                diag.final_residual = Some(self.norm(&self.apply(&current)?.sub(&current)?)?);
                info!("picard converged after {} iterations", diag.iterations);
                return Ok((current, diag));
            }
            stalled = if q >= 1.0 { stalled + 1 } else { 0 };
            if stalled >= STALL_STEPS {
                return Err(Error::NonContraction(Box::new(diag)));
            }
        }
        Err(Error::MaxIterExceeded {
            max_iter,
            diagnostics: Box::new(diag),
        })
    }
}

/// One application of `T` from scratch.
pub fn apply_t(
    grid: &RadialGrid,
    params: &HamelParameters,
    forcing: &ForcingSpec,
    w: &VelocityField,
) -> Result<VelocityField> {
    PicardMap::new(grid, params, forcing)?.apply(w)
}

pub fn picard_iterate(
    grid: &RadialGrid,
    params: &HamelParameters,
    forcing: &ForcingSpec,
    max_iter: usize,
    tol_rel: f64,
) -> Result<(VelocityField, PicardDiagnostics)> {
    PicardMap::new(grid, params, forcing)?.iterate(max_iter, tol_rel)
}

/// `λ = C₀ γ² (|α|^{1/2} + γ)² / ((ρ−2)² (3−ρ))`, reported only.
pub fn compute_lambda(params: &HamelParameters, c0: f64) -> f64 {
    let HamelParameters { alpha, gamma, rho } = *params;
    let s = alpha.abs().sqrt() + gamma;
    c0 * gamma * gamma * s * s / ((rho - 2.0).powi(2) * (3.0 - rho))
}

/// `u = V + v` with point evaluation in cylindrical components.
#[derive(Debug, Clone)]
pub struct FullField<'a> {
    pub grid: &'a RadialGrid,
    pub params: HamelParameters,
    pub v: &'a VelocityField,
}

pub fn reconstruct_u<'a>(grid: &'a RadialGrid, v: &'a VelocityField, params: &HamelParameters) -> FullField<'a> {
    FullField {
        grid,
        params: *params,
        v,
    }
}

impl FullField<'_> {
    /// `u(r, θ) − V(r)`, real part of the mode sum.
    pub fn remainder(&self, r: f64, theta: f64) -> Result<[f64; 3]> {
        let s = self.v.evaluate(self.grid, r, theta)?;
        Ok(s.map(|z| z.re))
    }

    pub fn evaluate(&self, r: f64, theta: f64) -> Result<[f64; 3]> {
        let bg = evaluate_v(&self.params, r)?;
        let rem = self.remainder(r, theta)?;
        Ok([bg[0] + rem[0], bg[1] + rem[1], bg[2] + rem[2]])
    }

    /// `max_θ |u − V|` at every grid node over `samples` equispaced angles.
    pub fn remainder_magnitude(&self, samples: usize) -> Vec<f64> {
        let samples = samples.max(1);
        (0..self.grid.len())
            .map(|k| {
                (0..samples)
                    .map(|j| {
                        let t = std::f64::consts::TAU * j as f64 / samples as f64;
                        let u = self.v.evaluate_node(k, t);
                        u.iter().map(|z| z.re * z.re).sum::<f64>().sqrt()
                    })
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    /// Largest imaginary part over physical-space samples at the nodes.
    pub fn imaginary_defect(&self, samples: usize) -> f64 {
        let samples = samples.max(1);
        let mut worst = 0.0f64;
        for k in 0..self.grid.len() {
            for j in 0..samples {
                let t = std::f64::consts::TAU * j as f64 / samples as f64;
                for z in self.v.evaluate_node(k, t) {
                    worst = worst.max(z.im.abs());
                }
            }
        }
        worst
    }
}
