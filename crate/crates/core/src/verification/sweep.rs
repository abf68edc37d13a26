//! Measured single-mode gains against the shapes of the linear estimates.
//!
//! Each row solves one mode for every probe forcing of a family, takes the
//! largest ratio of `‖v_n‖_{L^∞_{ρ−1}} + w_n ‖∇_h v_n‖_{L^∞_ρ}` to the forcing
//! norm and divides it by the estimate's right-hand side with the constant
//! set to 1.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::background::HamelParameters;
use crate::error::Result;
use crate::field::ForcingMode;
use crate::grid::RadialGrid;
use crate::linear::solve_linear_mode;
use crate::norms::mode_weighted_norm;
use crate::spectral::compute_coefficients;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepKind {
    /// Horizontal response to `div F`, `F ∈ L^∞_{2(ρ−1)}`.
    Horizontal,
    /// Vertical response to `f_3 ∈ L^∞_{2ρ−1}`.
    VerticalPointwise,
    /// Vertical response to `div F`, `F ∈ L^∞_{2(ρ−1)}`.
    VerticalDivergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub params: HamelParameters,
    pub n: i32,
    pub kind: SweepKind,
}

impl SweepPoint {
    /// Weight of the gradient term in the gain.
    pub fn gradient_weight(&self) -> f64 {
        let HamelParameters { alpha, gamma, .. } = self.params;
        match (self.kind, self.n) {
            (SweepKind::Horizontal, 0) => 1.0 / (gamma - 1.0),
            (SweepKind::Horizontal, n) => 1.0 / n.unsigned_abs() as f64,
            (_, 0) => 1.0 / gamma,
            (_, n) => 1.0 / compute_coefficients(n, alpha, gamma).unwrap().xi,
        }
    }

    /// Right-hand side factor of the estimate for this point.
    pub fn shape(&self) -> f64 {
        let HamelParameters { alpha, gamma, rho } = self.params;
        if self.n == 0 {
            return match self.kind {
                SweepKind::Horizontal => (gamma - 1.0) / ((gamma - 2.0) * (rho - 2.0)),
                SweepKind::VerticalPointwise => 1.0 / (gamma * (rho - 2.0)),
                SweepKind::VerticalDivergence => 1.0 / (rho - 2.0),
            };
        }
        let xi = compute_coefficients(self.n, alpha, gamma).unwrap().xi;
        let gap = 1.0 / (xi - 0.5 * gamma);
        match self.kind {
            SweepKind::Horizontal => {
                let m = self.n.unsigned_abs() as f64;
                xi * xi * gap / (m * (m - rho + 2.0))
            }
            SweepKind::VerticalPointwise => gap / xi,
            SweepKind::VerticalDivergence => gap,
        }
    }

    /// Decay rate of the data space the forcing lives in.
    pub fn forcing_weight(&self) -> f64 {
        match self.kind {
            SweepKind::VerticalPointwise => 2.0 * self.params.rho - 1.0,
            _ => 2.0 * (self.params.rho - 1.0),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub forcing_norm: f64,
    pub value_norm: f64,
    pub gradient_norm: f64,
    pub gain: f64,
    pub shape: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Points whose forcing vanished.
    pub excluded: usize,
    pub max_normalized: f64,
    pub min_normalized: f64,
    /// `max_normalized / min_normalized`.
    pub spread: f64,
    /// `Σ ‖v_n‖_{L^∞_{ρ−1}} / Σ ‖data_n‖` over the rows, using each row's
    /// maximizing probe.
    pub l1_gain: f64,
}

/// `r^{-s}` in every component the kind reads, with `s` the data rate.
pub fn power_envelope_mode(grid: &RadialGrid, point: &SweepPoint) -> ForcingMode {
    let mut m = ForcingMode::zero(grid, point.n);
    let p = grid.power(Complex64::new(-point.forcing_weight(), 0.0), point.n);
    match point.kind {
        SweepKind::Horizontal => {
            for k in 0..4 {
                m.f[k] = p.clone().with_component(m.f[k].component);
            }
        }
        SweepKind::VerticalPointwise => m.g[2] = p.with_component(m.g[2].component),
        SweepKind::VerticalDivergence => {
            for k in 4..6 {
                m.f[k] = p.clone().with_component(m.f[k].component);
            }
        }
    }
    m
}

/// [`power_envelope_mode`] plus each component on its own and, for the
/// horizontal kind, the antisymmetric pair `F_rθ = −F_θr`.
pub fn power_envelope_probes(grid: &RadialGrid, point: &SweepPoint) -> Vec<ForcingMode> {
    let all = power_envelope_mode(grid, point);
    let slots: &[usize] = match point.kind {
        SweepKind::Horizontal => &[0, 1, 2, 3],
        SweepKind::VerticalPointwise => &[],
        SweepKind::VerticalDivergence => &[4, 5],
    };
    let mut out = Vec::new();
    for &k in slots {
        let mut m = ForcingMode::zero(grid, point.n);
        m.f[k] = all.f[k].clone();
        out.push(m);
    }
    if point.kind == SweepKind::Horizontal {
        let mut m = ForcingMode::zero(grid, point.n);
        m.f[1] = all.f[1].clone();
        m.f[2] = all.f[2].scale_real(-1.0);
        out.push(m);
    }
    out.push(all);
    out
}

fn forcing_norm(grid: &RadialGrid, point: &SweepPoint, m: &ForcingMode) -> Result<f64> {
    let s = point.forcing_weight();
    match point.kind {
        SweepKind::Horizontal => mode_weighted_norm(grid.r_nodes(), &m.f[..4], s),
        SweepKind::VerticalPointwise => mode_weighted_norm(grid.r_nodes(), &m.g[2..], s),
        SweepKind::VerticalDivergence => mode_weighted_norm(grid.r_nodes(), &m.f[4..], s),
    }
}

/// Runs every point concurrently; `family` yields the probe forcings of a
/// point. Probes with zero norm are skipped and points left without any
/// probe are excluded.
pub fn gain_sweep<F>(grid: &RadialGrid, points: &[SweepPoint], family: F) -> Result<SweepReport>
where
    F: Fn(&RadialGrid, &SweepPoint) -> Vec<ForcingMode> + Sync,
{
    let radii = grid.r_nodes();
    let rows = points
        .par_iter()
        .map(|pt| -> Result<Option<SweepRow>> {
            let rho = pt.params.rho;
            let shape = pt.shape();
            let mut best: Option<SweepRow> = None;
            for m in family(grid, pt) {
                let fnorm = forcing_norm(grid, pt, &m)?;
                if fnorm == 0.0 {
                    continue;
                }
                let sol = solve_linear_mode(grid, &pt.params, pt.n, &m.g, &m.f)?;
                let value = mode_weighted_norm(radii, &sol.v, rho - 1.0)?;
                let gradient = mode_weighted_norm(radii, &sol.gradient(radii), rho)?;
                let gain = (value + pt.gradient_weight() * gradient) / fnorm;
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(SweepRow {
                        point: *pt,
                        forcing_norm: fnorm,
                        value_norm: value,
                        gradient_norm: gradient,
                        gain,
                        shape,
                        normalized: gain / shape,
                    });
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    let excluded = rows.iter().filter(|r| r.is_none()).count();
    let rows: Vec<SweepRow> = rows.into_iter().flatten().collect();
    let max = rows.iter().map(|r| r.normalized).fold(0.0, f64::max);
    let min = rows.iter().map(|r| r.normalized).fold(f64::INFINITY, f64::min);
    let num: f64 = rows.iter().map(|r| r.value_norm).sum();
    let den: f64 = rows.iter().map(|r| r.forcing_norm).sum();
    Ok(SweepReport {
        excluded,
        max_normalized: max,
        min_normalized: if rows.is_empty() { 0.0 } else { min },
        spread: if rows.is_empty() { 0.0 } else { max / min },
        l1_gain: if den > 0.0 { num / den } else { 0.0 },
        rows,
    })
}

/// Points `n ∈ [−n_max, n_max]` of one kind at fixed parameters.
pub fn mode_points(params: HamelParameters, kind: SweepKind, n_max: i32) -> Vec<SweepPoint> {
    (-n_max..=n_max).map(|n| SweepPoint { params, n, kind }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridConfig;

    #[test]
    fn shapes_at_reference_points() {
        let params = HamelParameters::new(0.0, 3.0, 2.5).unwrap();
        let pt = |n, kind| SweepPoint { params, n, kind };
        assert!((pt(0, SweepKind::Horizontal).shape() - 4.0).abs() < 1e-14);
        assert!((pt(0, SweepKind::VerticalPointwise).shape() - 2.0 / 3.0).abs() < 1e-14);
        assert!((pt(0, SweepKind::VerticalDivergence).shape() - 2.0).abs() < 1e-14);
        // α = 0: ξ_1 = (1 + 9/4)^{1/2} = √13/2.
        let xi = 13f64.sqrt() / 2.0;
        let gap = 1.0 / (xi - 1.5);
        assert!((pt(1, SweepKind::VerticalDivergence).shape() - gap).abs() < 1e-14);
        assert!((pt(-1, SweepKind::VerticalPointwise).shape() - gap / xi).abs() < 1e-14);
        assert!((pt(1, SweepKind::Horizontal).shape() - xi * xi * gap / 0.5).abs() < 1e-12);
        assert!((pt(2, SweepKind::Horizontal).gradient_weight() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_rows_are_excluded() {
        let grid = RadialGrid::new(GridConfig::default().with_panels(16)).unwrap();
        let params = HamelParameters::new(1.0, 3.0, 2.5).unwrap();
        let points = mode_points(params, SweepKind::VerticalPointwise, 2);
        let rep = gain_sweep(&grid, &points, |g, p| {
            if p.n == 1 {
                vec![ForcingMode::zero(g, p.n)]
            } else {
                power_envelope_probes(g, p)
            }
        })
        .unwrap();
        assert_eq!(rep.excluded, 1);
        assert_eq!(rep.rows.len(), 4);
        assert!(rep.rows.iter().all(|r| r.point.n != 1));
        assert!(rep.l1_gain > 0.0 && rep.l1_gain.is_finite());
    }
}
