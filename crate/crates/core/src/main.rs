use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use cylflow::config::{parse_config, RawConfig, RawForcing, RawGrid};
use cylflow::error::Error;
use cylflow::run::{error_exit_code, run};

/// Perturbed Hamel flow past a cylinder: Picard iteration over Fourier modes.
///
/// Flags override values from `--config`. Set `CYLFLOW_THREADS` to bound the
/// worker pool.
#[derive(Debug, Parser)]
#[command(name = "cylflow", version)]
struct Cli {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Vortex strength α.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Sink strength γ, must exceed 2.
    #[arg(long)]
    gamma: Option<f64>,
    /// Decay exponent ρ with 2 < ρ < 3 and ρ ≤ γ.
    #[arg(long)]
    rho: Option<f64>,
    /// Highest Fourier mode N.
    #[arg(long)]
    mode_cutoff: Option<i64>,
    /// Log-spaced radial panels.
    #[arg(long)]
    panels: Option<i64>,
    /// Gauss nodes per panel.
    #[arg(long)]
    gauss_order: Option<i64>,
    /// Outer radius of the grid.
    #[arg(long)]
    r_max: Option<f64>,
    /// Geometric splits of the first panel toward r = 1.
    #[arg(long)]
    boundary_levels: Option<i64>,
    /// Picard iteration cap.
    #[arg(long)]
    max_iter: Option<i64>,
    /// Stop when the increment falls below tol · ‖v¹‖.
    #[arg(long)]
    tol: Option<f64>,
    /// power-envelope, compact-bump or random.
    #[arg(long)]
    family: Option<String>,
    /// Forcing amplitude ε.
    #[arg(long)]
    amplitude: Option<f64>,
    /// Seed for the random family.
    #[arg(long)]
    seed: Option<u64>,
    /// Artifact directory, created if missing.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

impl Cli {
    fn overrides(&self) -> RawConfig {
        RawConfig {
            alpha: self.alpha,
            gamma: self.gamma,
            rho: self.rho,
            mode_cutoff: self.mode_cutoff,
            max_iter: self.max_iter,
            tol: self.tol,
            seed: self.seed,
            output_dir: self.output_dir.clone(),
            grid: RawGrid {
                panels: self.panels,
                gauss_order: self.gauss_order,
                r_max: self.r_max,
                boundary_levels: self.boundary_levels,
            },
            forcing: RawForcing {
                family: self.family.clone(),
                amplitude: self.amplitude,
                coefficients: None,
            },
        }
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(value) = std::env::var("CYLFLOW_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("CYLFLOW_THREADS: expected a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(format!("CYLFLOW_THREADS: {e}")))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = (|| {
        configure_threads()?;
        let file = match &cli.config {
            Some(path) => RawConfig::from_file(path)?,
            None => RawConfig::default(),
        };
        let config = parse_config(file.merge(cli.overrides()))?;
        if cli.print_config {
            print!("{}", config.to_toml());
            return Ok(0);
        }
        let outcome = run(&config)?;
        let s = &outcome.summary;
        println!(
            "{:?}: {} iterations, last q = {}",
            s.status,
            s.diagnostics.iterations,
            s.diagnostics
                .contraction_factors
                .last()
                .map_or("-".to_string(), |q| format!("{q:.4}"))
        );
        Ok(outcome.exit_code())
    })();
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}
