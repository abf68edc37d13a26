//! Batch run: build the forcing, iterate, and write artifacts.
//!
//! Output layout under `output_dir`:
//!
//! ```text
//! summary.json            status, norms, contraction trace, decay fit, λ, weak residual
//! decay.csv               r, max_θ |u − V|
//! profiles/<c>_n<n>.csv   r, re, im   for c ∈ {vr, vtheta, v3}, |n| ≤ N
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use log::{info, warn};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::families::build_forcing;
use crate::field::{ForcingSpec, VelocityField};
use crate::grid::RadialGrid;
use crate::picard::{compute_lambda, reconstruct_u, PicardDiagnostics, PicardMap};
use crate::verification::decay::{default_window, fit_decay, DecayFit};
use crate::verification::weak::{standard_suite, weak_ns_residual};

/// Angular samples for `max_θ |u − V|`.
pub const DECAY_SAMPLES: usize = 64;
/// Highest test-function mode in the summary's weak residual.
pub const WEAK_MAX_K: i32 = 2;

const COMPONENT_NAMES: [&str; 3] = ["vr", "vtheta", "v3"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Converged,
    NonContraction,
    MaxIterExceeded,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Converged => 0,
            RunStatus::NonContraction => 3,
            RunStatus::MaxIterExceeded => 4,
        }
    }
}

/// Exit code for failures that produce no run status.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 1,
        Error::Config(_) | Error::Inadmissible { .. } => 2,
        Error::NonContraction(_) => 3,
        Error::MaxIterExceeded { .. } => 4,
        _ => 5,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    /// `‖v‖_{l¹L^∞_{ρ−1}}`.
    pub value: f64,
    /// `‖∇_h v‖_{l¹L^∞_ρ}`.
    pub gradient: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LambdaReport {
    /// `γ²(|α|^{1/2}+γ)²/((ρ−2)²(3−ρ))`, the structural factor with `C₀ = 1`.
    pub structural: f64,
    /// `‖v^{(1)}‖ / (‖g‖ + ‖F‖)`.
    pub empirical: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub fit: Option<DecayFit>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub status: RunStatus,
    pub config: RunConfig,
    pub grid_nodes: usize,
    /// `‖g‖_{l¹L^∞_{2ρ−1}}` and `‖F‖_{l¹L^∞_{2(ρ−1)}}`.
    pub forcing_norms: [f64; 2],
    pub v_is_zero: bool,
    pub norms: Option<NormReport>,
    pub lambda: LambdaReport,
    pub diagnostics: PicardDiagnostics,
    pub decay: Option<DecayReport>,
    pub weak_residual: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: Summary,
    pub field: Option<VelocityField>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        self.summary.status.exit_code()
    }
}

/// Builds the grid and forcing, runs Picard and writes every artifact.
/// Non-contraction and the iteration cap are reported through the status,
/// with the summary still written.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let params = config.params();
    let grid = RadialGrid::new(config.grid_config())?;
    let forcing = build_forcing(
        &grid,
        params.rho,
        config.mode_cutoff,
        config.forcing.family,
        config.forcing.amplitude,
        &config.forcing.complex_coefficients(),
        config.seed,
    );
    let map = PicardMap::new(&grid, &params, &forcing)?;
    let forcing_norms = [forcing.g_norm(&grid, params.rho)?, forcing.f_norm(&grid, params.rho)?];
    let lambda_structural = compute_lambda(&params, 1.0);

    let (status, field, diagnostics) = match map.iterate(config.max_iter, config.tol) {
        Ok((v, d)) => (RunStatus::Converged, Some(v), d),
        Err(Error::NonContraction(d)) => {
            warn!("Picard iteration stopped contracting after {} steps", d.iterations);
            (RunStatus::NonContraction, None, *d)
        }
        Err(Error::MaxIterExceeded { diagnostics, .. }) => {
            warn!("Picard iteration hit max_iter = {}", config.max_iter);
            (RunStatus::MaxIterExceeded, None, *diagnostics)
        }
        Err(e) => return Err(e),
    };

    let out = &config.output_dir;
    fs::create_dir_all(out)?;
    let mut summary = Summary {
        status,
        config: config.clone(),
        grid_nodes: grid.len(),
        forcing_norms,
        v_is_zero: field.as_ref().is_some_and(|v| v.is_zero()),
        norms: None,
        lambda: LambdaReport {
            structural: lambda_structural,
            empirical: diagnostics.lambda_empirical,
        },
        diagnostics,
        decay: None,
        weak_residual: None,
    };

    if let Some(v) = &field {
        let norms = v.norms(&grid, params.rho)?;
        summary.norms = Some(NormReport {
            value: norms.value,
            gradient: norms.gradient,
        });
        let mags = reconstruct_u(&grid, v, &params).remainder_magnitude(DECAY_SAMPLES);
        write_decay_csv(&out.join("decay.csv"), grid.r_nodes(), &mags)?;
        let fit = fit_decay(grid.r_nodes(), &mags, default_window(grid.r_max()), grid.r_max());
        summary.decay = Some(match fit {
            Ok(fit) => DecayReport {
                fit: Some(fit),
                error: None,
            },
            Err(e) => DecayReport {
                fit: None,
                error: Some(e.to_string()),
            },
        });
        summary.weak_residual = Some(summary_weak_residual(&grid, config, v, &forcing)?);
        write_profiles(&out.join("profiles"), &grid, v)?;
    }

    fs::write(out.join("summary.json"), summary_json(&summary)?)?;
    info!("wrote artifacts to {}", out.display());
    Ok(RunOutcome { summary, field })
}

fn summary_weak_residual(grid: &RadialGrid, config: &RunConfig, v: &VelocityField, forcing: &ForcingSpec) -> Result<f64> {
    let suite = standard_suite(grid, WEAK_MAX_K.min(config.mode_cutoff as i32));
    weak_ns_residual(grid, &config.params(), v, forcing, &suite)
}

/// Pretty JSON with a trailing newline; field order is the struct order.
pub fn summary_json(summary: &Summary) -> Result<String> {
    let mut s = serde_json::to_string_pretty(summary).map_err(|e| Error::Io(e.into()))?;
    s.push('\n');
    Ok(s)
}

fn write_decay_csv(path: &Path, radii: &[f64], mags: &[f64]) -> Result<()> {
    let mut s = String::from("r,abs_u_minus_V\n");
    for (r, m) in radii.iter().zip(mags) {
        writeln!(s, "{r:.17e},{m:.17e}").unwrap();
    }
    fs::write(path, s)?;
    Ok(())
}

fn write_profiles(dir: &Path, grid: &RadialGrid, v: &VelocityField) -> Result<()> {
    fs::create_dir_all(dir)?;
    for mode in v.modes() {
        for (name, p) in COMPONENT_NAMES.iter().zip(&mode.v) {
            let mut s = String::from("r,re,im\n");
            for (r, z) in grid.r_nodes().iter().zip(&p.values) {
                writeln!(s, "{r:.17e},{:.17e},{:.17e}", z.re, z.im).unwrap();
            }
            fs::write(dir.join(format!("{name}_n{}.csv", mode.n)), s)?;
        }
    }
    Ok(())
}
