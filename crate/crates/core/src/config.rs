//! Run configuration: a TOML file, flag overrides, defaults and validation.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::background::HamelParameters;
use crate::error::{Error, Result};
use crate::families::{default_coefficients, ForcingFamily};
use crate::grid::{GridConfig, TailPolicy};

pub const DEFAULT_AMPLITUDE: f64 = 1e-2;
pub const DEFAULT_MAX_ITER: usize = 200;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_OUTPUT_DIR: &str = "cylflow-out";

/// Partially specified configuration as read from a file or from flags.
/// Every field is optional; [`RawConfig::merge`] lets later sources win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub rho: Option<f64>,
    pub mode_cutoff: Option<i64>,
    pub max_iter: Option<i64>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub grid: RawGrid,
    #[serde(default)]
    pub forcing: RawForcing,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    pub panels: Option<i64>,
    pub gauss_order: Option<i64>,
    pub r_max: Option<f64>,
    pub boundary_levels: Option<i64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawForcing {
    pub family: Option<String>,
    pub amplitude: Option<f64>,
    /// `[re, im]` pairs for modes `0, 1, …`.
    pub coefficients: Option<Vec<[f64; 2]>>,
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("malformed config: {}", e.message())))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merge(self, over: RawConfig) -> RawConfig {
        RawConfig {
            alpha: over.alpha.or(self.alpha),
            gamma: over.gamma.or(self.gamma),
            rho: over.rho.or(self.rho),
            mode_cutoff: over.mode_cutoff.or(self.mode_cutoff),
            max_iter: over.max_iter.or(self.max_iter),
            tol: over.tol.or(self.tol),
            seed: over.seed.or(self.seed),
            output_dir: over.output_dir.or(self.output_dir),
            grid: RawGrid {
                panels: over.grid.panels.or(self.grid.panels),
                gauss_order: over.grid.gauss_order.or(self.grid.gauss_order),
                r_max: over.grid.r_max.or(self.grid.r_max),
                boundary_levels: over.grid.boundary_levels.or(self.grid.boundary_levels),
            },
            forcing: RawForcing {
                family: over.forcing.family.or(self.forcing.family),
                amplitude: over.forcing.amplitude.or(self.forcing.amplitude),
                coefficients: over.forcing.coefficients.or(self.forcing.coefficients),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForcingConfig {
    pub family: ForcingFamily,
    pub amplitude: f64,
    /// `[re, im]` of `c_n` for `n = 0..=N`.
    pub coefficients: Vec<[f64; 2]>,
}

impl ForcingConfig {
    pub fn complex_coefficients(&self) -> Vec<Complex64> {
        self.coefficients.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
    }
}

/// Validated configuration with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub rho: f64,
    pub mode_cutoff: usize,
    pub panels: usize,
    pub gauss_order: usize,
    pub r_max: f64,
    pub boundary_levels: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub forcing: ForcingConfig,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn params(&self) -> HamelParameters {
        HamelParameters {
            alpha: self.alpha,
            gamma: self.gamma,
            rho: self.rho,
        }
    }

    pub fn grid_config(&self) -> GridConfig {
        GridConfig {
            panels: self.panels,
            gauss_order: self.gauss_order,
            r_max: self.r_max,
            tail_policy: TailPolicy::AnalyticPowerLaw,
            boundary_levels: self.boundary_levels,
        }
    }

    /// TOML echo of the full configuration.
    pub fn to_toml(&self) -> String {
        let raw = RawConfig {
            alpha: Some(self.alpha),
            gamma: Some(self.gamma),
            rho: Some(self.rho),
            mode_cutoff: Some(self.mode_cutoff as i64),
            max_iter: Some(self.max_iter as i64),
            tol: Some(self.tol),
            seed: Some(self.seed),
            output_dir: Some(self.output_dir.clone()),
            grid: RawGrid {
                panels: Some(self.panels as i64),
                gauss_order: Some(self.gauss_order as i64),
                r_max: Some(self.r_max),
                boundary_levels: Some(self.boundary_levels as i64),
            },
            forcing: RawForcing {
                family: Some(self.forcing.family.name().to_string()),
                amplitude: Some(self.forcing.amplitude),
                coefficients: Some(self.forcing.coefficients.clone()),
            },
        };
        toml::to_string(&raw).expect("config serializes")
    }
}

fn count(key: &str, v: Option<i64>, default: usize, min: i64, problems: &mut Vec<String>) -> usize {
    match v {
        None => default,
        Some(x) if x >= min => x as usize,
        Some(x) => {
            problems.push(format!("{key}: must be >= {min}, got {x}"));
            default
        }
    }
}

/// Fills defaults and checks every invariant, reporting all violations at
/// once with the offending key.
pub fn parse_config(raw: RawConfig) -> Result<RunConfig> {
    let mut problems = Vec::new();
    let hyp = "parameters outside theorem hypotheses";

    let mut need = |key: &str, v: Option<f64>| match v {
        Some(x) if x.is_finite() => x,
        Some(x) => {
            problems.push(format!("{key}: must be finite, got {x}"));
            f64::NAN
        }
        None => {
            problems.push(format!("{key}: required"));
            f64::NAN
        }
    };
    let alpha = need("alpha", raw.alpha);
    let gamma = need("gamma", raw.gamma);
    let rho = need("rho", raw.rho);
    if gamma.is_finite() && gamma <= 2.0 {
        problems.push(format!("gamma: {hyp}: need gamma > 2, got {gamma}"));
    }
    if rho.is_finite() && rho <= 2.0 {
        problems.push(format!("rho: {hyp}: need rho > 2, got {rho}"));
    }
    if rho.is_finite() && rho >= 3.0 {
        problems.push(format!("rho: {hyp}: need rho < 3, got {rho}"));
    }
    if rho.is_finite() && gamma.is_finite() && rho > gamma {
        problems.push(format!("rho: {hyp}: need rho <= gamma, got rho = {rho}, gamma = {gamma}"));
    }

    let mode_cutoff = count("mode_cutoff", raw.mode_cutoff, 8, 0, &mut problems);
    let max_iter = count("max_iter", raw.max_iter, DEFAULT_MAX_ITER, 1, &mut problems);
    let defaults = GridConfig::default();
    let panels = count("grid.panels", raw.grid.panels, defaults.panels, 1, &mut problems);
    let gauss_order = count("grid.gauss_order", raw.grid.gauss_order, defaults.gauss_order, 1, &mut problems);
    let boundary_levels = count("grid.boundary_levels", raw.grid.boundary_levels, 0, 0, &mut problems);
    let r_max = raw.grid.r_max.unwrap_or(defaults.r_max);
    if !(r_max > 1.0 && r_max.is_finite()) {
        problems.push(format!("grid.r_max: must be finite and > 1, got {r_max}"));
    }
    let tol = raw.tol.unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        problems.push(format!("tol: must be > 0, got {tol}"));
    }

    let family = match raw.forcing.family.as_deref() {
        None => ForcingFamily::PowerEnvelope,
        Some(name) => match name.parse() {
            Ok(f) => f,
            Err(Error::Config(msg)) => {
                problems.push(msg);
                ForcingFamily::PowerEnvelope
            }
            Err(e) => return Err(e),
        },
    };
    let amplitude = raw.forcing.amplitude.unwrap_or(DEFAULT_AMPLITUDE);
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        problems.push(format!("forcing.amplitude: must be finite and >= 0, got {amplitude}"));
    }
    let coefficients = raw.forcing.coefficients.unwrap_or_else(|| {
        default_coefficients(mode_cutoff)
            .iter()
            .map(|c| [c.re, c.im])
            .collect()
    });
    if coefficients.iter().flatten().any(|x| !x.is_finite()) {
        problems.push("forcing.coefficients: entries must be finite".to_string());
    }
    if coefficients.len() > mode_cutoff + 1 {
        problems.push(format!(
            "forcing.coefficients: {} entries exceed mode_cutoff + 1 = {}",
            coefficients.len(),
            mode_cutoff + 1
        ));
    }

    if !problems.is_empty() {
        return Err(Error::Config(problems.join("; ")));
    }
    Ok(RunConfig {
        alpha,
        gamma,
        rho,
        mode_cutoff,
        panels,
        gauss_order,
        r_max,
        boundary_levels,
        max_iter,
        tol,
        forcing: ForcingConfig {
            family,
            amplitude,
            coefficients,
        },
        seed: raw.seed.unwrap_or(0),
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
    })
}
