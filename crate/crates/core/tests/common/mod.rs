#![allow(dead_code)]

use cylflow::background::HamelParameters;
use cylflow::field::{ForcingSpec, VelocityMode};
use cylflow::grid::{GridConfig, RadialGrid};
use cylflow::horizontal::{solve_mode, vorticity_moment, HorizontalForcingMode};
use cylflow::linear::solve_linear;
use cylflow::profile::ModeProfile;
use cylflow::vertical::{solve_vertical_mode_any, VerticalForcingMode};
use cylflow::verification::manufactured::{manufacture_forcing, ModeTarget};

pub fn grid(panels: usize) -> RadialGrid {
    RadialGrid::new(GridConfig::default().with_panels(panels)).unwrap()
}

fn max_diff(a: &ModeProfile, b: &ModeProfile) -> f64 {
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest of the relative max errors in values and in radial derivatives.
pub fn mode_error(got: &VelocityMode, want: &VelocityMode) -> f64 {
    let rel = |g: &[ModeProfile; 3], w: &[ModeProfile; 3]| {
        let err = (0..3).map(|c| max_diff(&g[c], &w[c])).fold(0.0, f64::max);
        let scale = w.iter().map(|p| p.max_abs()).fold(0.0, f64::max);
        err / scale
    };
    rel(&got.v, &want.v).max(rel(&got.dv, &want.dv))
}

/// Round trip of one manufactured target through `solve_linear`.
pub fn round_trip(grid: &RadialGrid, params: &HamelParameters, target: &ModeTarget) -> f64 {
    let n = target.n();
    let cutoff = n.unsigned_abs() as usize;
    let forcing = manufacture_forcing(grid, params, cutoff, std::slice::from_ref(target)).unwrap();
    let v = solve_linear(grid, params, &forcing).unwrap();
    mode_error(v.mode(n).unwrap(), &target.exact(grid))
}

pub fn manufactured_targets(params: &HamelParameters) -> Vec<(String, ModeTarget)> {
    let mut out = Vec::new();
    for n in [0, 1, 2, 5, -1, -2, -5] {
        out.push((format!("horizontal n={n}"), ModeTarget::horizontal(n, params).unwrap()));
        out.push((format!("vertical n={n}"), ModeTarget::vertical(n, params).unwrap()));
    }
    out
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Structural {
    pub boundary: f64,
    pub divergence: f64,
    pub moment: f64,
}

impl Structural {
    pub fn worst(&self) -> f64 {
        self.boundary.max(self.divergence).max(self.moment)
    }
}

/// Relative boundary, divergence and moment residuals of every horizontal
/// and vertical solve driven by `forcing`.
pub fn structural_residuals(grid: &RadialGrid, params: &HamelParameters, forcing: &ForcingSpec) -> Structural {
    let mut s = Structural::default();
    let radii = grid.r_nodes();
    for m in forcing.modes() {
        let n = m.n;
        let solves = [
            HorizontalForcingMode::pointwise(n, m.g[0].clone(), m.g[1].clone()),
            HorizontalForcingMode::divergence(n, m.f[0].clone(), m.f[1].clone(), m.f[2].clone(), m.f[3].clone()),
        ];
        for h in solves {
            let sol = solve_mode(grid, &h, params).unwrap();
            let scale = sol.scale();
            if scale == 0.0 {
                continue;
            }
            s.boundary = s.boundary.max(sol.boundary_residual() / scale);
            let div_scale = radii
                .iter()
                .enumerate()
                .map(|(k, &r)| sol.v_r.values[k].norm() + r * sol.dv_r.values[k].norm() + n.abs() as f64 * sol.v_theta.values[k].norm())
                .fold(0.0, f64::max);
            s.divergence = s.divergence.max(sol.divergence_residual(grid) / div_scale);
            if let Some(omega) = &sol.omega {
                let (mo, sc) = vorticity_moment(grid, n, omega).unwrap();
                if sc > 0.0 {
                    s.moment = s.moment.max(mo.norm() / sc);
                }
            }
        }
        let verticals = [
            VerticalForcingMode::pointwise(n, m.g[2].clone()),
            VerticalForcingMode::divergence(n, m.f[4].clone(), m.f[5].clone()),
        ];
        for v in verticals {
            let sol = solve_vertical_mode_any(grid, &v, params).unwrap();
            let scale = sol.v3.max_abs();
            if scale > 0.0 {
                s.boundary = s.boundary.max(sol.v3.values[0].norm() / scale);
            }
        }
    }
    s
}

pub struct PicardRun {
    pub diagnostics: cylflow::picard::PicardDiagnostics,
    pub norm: f64,
}

/// Power-envelope forcing of amplitude `eps` with default coefficients,
/// iterated to `tol`.
pub fn picard_run(grid: &RadialGrid, params: &HamelParameters, cutoff: usize, eps: f64, tol: f64) -> cylflow::error::Result<PicardRun> {
    use cylflow::families::{build_forcing, default_coefficients, ForcingFamily};
    let f = build_forcing(grid, params.rho, cutoff, ForcingFamily::PowerEnvelope, eps, &default_coefficients(cutoff), 0);
    let map = cylflow::picard::PicardMap::new(grid, params, &f)?;
    let (v, diagnostics) = map.iterate(200, tol)?;
    let norm = map.norm(&v)?;
    Ok(PicardRun { diagnostics, norm })
}

/// Converged `max_θ |u − V|` at the grid nodes.
pub fn decay_profile(grid: &RadialGrid, params: &HamelParameters, family: cylflow::families::ForcingFamily, cutoff: usize, eps: f64) -> Vec<f64> {
    use cylflow::families::{build_forcing, default_coefficients};
    let f = build_forcing(grid, params.rho, cutoff, family, eps, &default_coefficients(cutoff), 0);
    let map = cylflow::picard::PicardMap::new(grid, params, &f).unwrap();
    let (v, _) = map.iterate(200, 1e-12).unwrap();
    cylflow::picard::reconstruct_u(grid, &v, params).remainder_magnitude(64)
}
