//! Manufactured solutions: closed-form targets and the pointwise forcing
//! obtained by applying the linearized operator to them.

use num_complex::Complex64;

use crate::background::HamelParameters;
use crate::error::{Error, Result};
use crate::field::{ForcingSpec, VelocityMode};
use crate::grid::RadialGrid;
use crate::profile::Component;
use crate::spectral::compute_coefficients;

use super::powersum::PowerSum;

const I: Complex64 = Complex64::new(0.0, 1.0);
const SAMPLE_RADII: [f64; 5] = [1.0, 1.7, 4.0, 25.0, 300.0];

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModeTarget {
    Horizontal { n: i32, v_r: PowerSum, v_theta: PowerSum },
    Vertical { n: i32, v3: PowerSum },
}

impl ModeTarget {
    pub fn n(&self) -> i32 {
        match self {
            ModeTarget::Horizontal { n, .. } | ModeTarget::Vertical { n, .. } => *n,
        }
    }

    /// `v_r = inψ/r`, `v_θ = −ψ'`.
    pub fn from_streamfunction(n: i32, psi: &PowerSum) -> Self {
        ModeTarget::Horizontal {
            n,
            v_r: psi.mul_rpow(-1.0).scale(I * n as f64),
            v_theta: psi.derivative().scale(c(-1.0)),
        }
    }

    /// `r^{1−ρ}` corrected by a homogeneous solution so that `v(1) = 0`.
    pub fn vertical(n: i32, params: &HamelParameters) -> Result<Self> {
        let e = if n == 0 {
            c(-params.gamma)
        } else {
            let z = compute_coefficients(n, params.alpha, params.gamma)?.zeta;
            -(z + params.gamma / 2.0)
        };
        Ok(ModeTarget::Vertical {
            n,
            v3: PowerSum::new(vec![(c(1.0), c(1.0 - params.rho)), (c(-1.0), e)]),
        })
    }

    /// `n = 0`: `v_θ = r^{1−ρ} − r^{1−γ}`. `n ≠ 0`: streamfunction
    /// `r^{2−ρ} + c₁ r^{−|n|} + c₂ r^{2−p}` with `ψ(1) = ψ'(1) = 0`.
    pub fn horizontal(n: i32, params: &HamelParameters) -> Result<Self> {
        if n == 0 {
            return Ok(ModeTarget::Horizontal {
                n,
                v_r: PowerSum::default(),
                v_theta: PowerSum::real(&[(1.0, 1.0 - params.rho), (-1.0, 1.0 - params.gamma)]),
            });
        }
        let z = compute_coefficients(n, params.alpha, params.gamma)?.zeta;
        let e0 = c(2.0 - params.rho);
        let e2 = 2.0 - (z + params.gamma / 2.0);
        let mut e1 = c(-(n.abs() as f64));
        if (e2 - e1).norm() < 1e-3 {
            e1 -= 1.0;
        }
        // c₁ + c₂ = −1, e₁c₁ + e₂c₂ = −e₀
        let c2 = (e1 - e0) / (e2 - e1);
        let c1 = -1.0 - c2;
        let psi = PowerSum::new(vec![(c(1.0), e0), (c1, e1), (c2, e2)]);
        Ok(Self::from_streamfunction(n, &psi))
    }

    /// Exact values and derivatives on the grid.
    pub fn exact(&self, grid: &RadialGrid) -> VelocityMode {
        let n = self.n();
        let mut m = VelocityMode::zero(grid, n);
        match self {
            ModeTarget::Horizontal { v_r, v_theta, .. } => {
                m.v[0] = v_r.sample(grid, n, Component::R);
                m.v[1] = v_theta.sample(grid, n, Component::Theta);
                m.dv[0] = v_r.derivative().sample(grid, n, Component::R);
                m.dv[1] = v_theta.derivative().sample(grid, n, Component::Theta);
            }
            ModeTarget::Vertical { v3, .. } => {
                m.v[2] = v3.sample(grid, n, Component::Axial);
                m.dv[2] = v3.derivative().sample(grid, n, Component::Axial);
            }
        }
        m
    }

    fn validate(&self) -> Result<()> {
        let tol = |p: &PowerSum| 1e-12 * p.coefficient_scale().max(1.0);
        match self {
            ModeTarget::Vertical { v3, .. } => {
                if v3.eval(1.0).norm() > tol(v3) {
                    return Err(Error::InvalidTarget(format!("v_3(1) = {} is not zero", v3.eval(1.0))));
                }
            }
            ModeTarget::Horizontal { n, v_r, v_theta } => {
                for (name, p) in [("v_r", v_r), ("v_theta", v_theta)] {
                    if p.eval(1.0).norm() > tol(p) {
                        return Err(Error::InvalidTarget(format!("{name}(1) = {} is not zero", p.eval(1.0))));
                    }
                }
                if *n == 0 && !v_r.is_zero() {
                    return Err(Error::InvalidTarget("axisymmetric v_r must vanish".into()));
                }
                // (r v_r)' + in v_θ
                let div = v_r.mul_rpow(1.0).derivative().add(&v_theta.scale(I * *n as f64));
                let scale = tol(v_r).max(tol(v_theta)) * (1.0 + n.abs() as f64);
                for r in SAMPLE_RADII {
                    let d = div.eval(r).norm() * r.powf(-div.envelope().exponent().unwrap_or(0.0));
                    if d > scale {
                        return Err(Error::InvalidTarget(format!("target is not divergence-free at r = {r}")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `L r^μ = (−μ² − γμ + k) r^{μ−2}` with `k` the zeroth-order coefficient.
fn apply_scalar(p: &PowerSum, gamma: f64, k: Complex64) -> PowerSum {
    p.map_terms(-2.0, |mu| -mu * mu - gamma * mu + k)
}

/// Pointwise forcing reproducing each target, placed in `g`.
pub fn manufacture_forcing(
    grid: &RadialGrid,
    params: &HamelParameters,
    cutoff: usize,
    targets: &[ModeTarget],
) -> Result<ForcingSpec> {
    let mut spec = ForcingSpec::zero(grid, cutoff);
    let gamma = params.gamma;
    for t in targets {
        t.validate()?;
        let n = t.n();
        let nf = n as f64;
        let mode = spec.mode_mut(n).ok_or_else(|| Error::ModeMismatch {
            expected: format!("|n| <= {cutoff}"),
            got: n,
        })?;
        let k = c(nf * nf) + I * params.alpha * nf;
        match t {
            ModeTarget::Vertical { v3, .. } => {
                let f = apply_scalar(v3, gamma, k);
                mode.g[2] = mode.g[2].add(&f.sample(grid, n, Component::Axial));
            }
            ModeTarget::Horizontal { v_theta, .. } if n == 0 => {
                let f = apply_scalar(v_theta, gamma, c(1.0 - gamma));
                mode.g[1] = mode.g[1].add(&f.sample(grid, 0, Component::Theta));
            }
            ModeTarget::Horizontal { v_r, v_theta, .. } => {
                // ω = (1/r)(r v_θ)' − (in/r) v_r, then f_r = (ir/n) L[ω] has rot f = L[ω].
                let omega = v_theta
                    .mul_rpow(1.0)
                    .derivative()
                    .mul_rpow(-1.0)
                    .add(&v_r.mul_rpow(-1.0).scale(-I * nf));
                let f_r = apply_scalar(&omega, gamma, k).mul_rpow(1.0).scale(I / nf);
                mode.g[0] = mode.g[0].add(&f_r.sample(grid, n, Component::R));
            }
        }
    }
    Ok(spec)
}
