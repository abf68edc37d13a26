//! Per-mode solver for the horizontal linearised problem around the Hamel
//! flow.
//!
//! Mode `n = 0` reduces to a scalar ODE for `v_θ` solved by its Green's
//! function. For `n ≠ 0` the vorticity mode `ω_n = Φ_n + c_n r^{-ζ_n-γ/2}` is
//! built first, with `c_n` fixed by the moment condition
//! `∫_1^∞ s^{1-|n|} ω_n ds = 0`, and the velocity is recovered by the
//! Biot-Savart law. Radial derivatives come from differentiating the
//! representation formulas, never from finite differences.

use num_complex::Complex64;

use crate::background::HamelParameters;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::profile::{Component, ModeProfile};
use crate::spectral::compute_coefficients;

/// Relative tolerance on the moment condition checked by [`biot_savart`].
pub const MOMENT_TOLERANCE: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Debug, Clone)]
pub enum HorizontalForcing {
    /// `f_h = (f_r, f_θ)` given pointwise.
    Pointwise { f_r: ModeProfile, f_theta: ModeProfile },
    /// `f_h = div_h F` with `F = (F_rr, F_rθ, F_θr, F_θθ)`.
    Divergence {
        rr: ModeProfile,
        rtheta: ModeProfile,
        thetar: ModeProfile,
        thetatheta: ModeProfile,
    },
}

#[derive(Debug, Clone)]
pub struct HorizontalForcingMode {
    pub mode: i32,
    pub forcing: HorizontalForcing,
}

impl HorizontalForcingMode {
    pub fn pointwise(mode: i32, f_r: ModeProfile, f_theta: ModeProfile) -> Self {
        Self {
            mode,
            forcing: HorizontalForcing::Pointwise { f_r, f_theta },
        }
    }

    pub fn divergence(
        mode: i32,
        rr: ModeProfile,
        rtheta: ModeProfile,
        thetar: ModeProfile,
        thetatheta: ModeProfile,
    ) -> Self {
        Self {
            mode,
            forcing: HorizontalForcing::Divergence {
                rr,
                rtheta,
                thetar,
                thetatheta,
            },
        }
    }

    fn profiles(&self) -> Vec<&ModeProfile> {
        match &self.forcing {
            HorizontalForcing::Pointwise { f_r, f_theta } => vec![f_r, f_theta],
            HorizontalForcing::Divergence {
                rr,
                rtheta,
                thetar,
                thetatheta,
            } => vec![rr, rtheta, thetar, thetatheta],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.profiles().iter().all(|p| p.is_zero())
    }

    /// Mode with every profile conjugated and `n → −n`.
    pub fn conj(&self) -> Self {
        let forcing = match &self.forcing {
            HorizontalForcing::Pointwise { f_r, f_theta } => HorizontalForcing::Pointwise {
                f_r: f_r.conj(),
                f_theta: f_theta.conj(),
            },
            HorizontalForcing::Divergence {
                rr,
                rtheta,
                thetar,
                thetatheta,
            } => HorizontalForcing::Divergence {
                rr: rr.conj(),
                rtheta: rtheta.conj(),
                thetar: thetar.conj(),
                thetatheta: thetatheta.conj(),
            },
        };
        Self {
            mode: -self.mode,
            forcing,
        }
    }

    fn check(&self, grid: &RadialGrid) -> Result<()> {
        for p in self.profiles() {
            grid.check(p)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct HorizontalSolutionMode {
    pub mode: i32,
    pub v_r: ModeProfile,
    pub v_theta: ModeProfile,
    pub dv_r: ModeProfile,
    pub dv_theta: ModeProfile,
    pub omega: Option<ModeProfile>,
    pub c_n: Option<Complex64>,
}

impl HorizontalSolutionMode {
    pub fn zero(grid: &RadialGrid, mode: i32) -> Self {
        Self {
            mode,
            v_r: grid.zeros(mode, Component::R),
            v_theta: grid.zeros(mode, Component::Theta),
            dv_r: grid.zeros(mode, Component::R),
            dv_theta: grid.zeros(mode, Component::Theta),
            omega: (mode != 0).then(|| grid.zeros(mode, Component::Scalar)),
            c_n: (mode != 0).then(|| c(0.0)),
        }
    }

    /// `max_r |d/dr(r v_r) + i n v_θ|`.
    pub fn divergence_residual(&self, grid: &RadialGrid) -> f64 {
        let n = self.mode as f64;
        grid.r_nodes()
            .iter()
            .enumerate()
            .map(|(k, &r)| (self.v_r.values[k] + r * self.dv_r.values[k] + I * n * self.v_theta.values[k]).norm())
            .fold(0.0, f64::max)
    }

    /// `|v_r(1)| + |v_θ(1)|`.
    pub fn boundary_residual(&self) -> f64 {
        self.v_r.values[0].norm() + self.v_theta.values[0].norm()
    }

    pub fn scale(&self) -> f64 {
        self.v_r.max_abs().max(self.v_theta.max_abs())
    }
}

/// Solves one horizontal mode, dispatching on `n`.
pub fn solve_mode(
    grid: &RadialGrid,
    forcing: &HorizontalForcingMode,
    params: &HamelParameters,
) -> Result<HorizontalSolutionMode> {
    if forcing.mode == 0 {
        solve_axisymmetric(grid, forcing, params)
    } else {
        let (omega, c_n) = compute_vorticity_mode(grid, forcing, params)?;
        // Each of the two cancelling moment contributions has size
        // |c_n| / |p + |n| - 2|; exact cancellation leaves only rounding.
        let sc = compute_coefficients(forcing.mode, params.alpha, params.gamma)?;
        let p = sc.zeta + 0.5 * params.gamma + (forcing.mode.unsigned_abs() as f64 - 2.0);
        let bs = biot_savart_scaled(grid, forcing.mode, &omega, c_n.norm() / p.norm())?;
        Ok(HorizontalSolutionMode {
            mode: forcing.mode,
            v_r: bs.v_r,
            v_theta: bs.v_theta,
            dv_r: bs.dv_r,
            dv_theta: bs.dv_theta,
            omega: Some(omega),
            c_n: Some(c_n),
        })
    }
}

/// Axisymmetric horizontal mode: `v_r ≡ 0` and `v_θ` from the Green's
/// function of `−v'' − (1+γ)v'/r + (1−γ)v/r² = f_θ`, `v(1) = 0`.
pub fn solve_axisymmetric(
    grid: &RadialGrid,
    forcing: &HorizontalForcingMode,
    params: &HamelParameters,
) -> Result<HorizontalSolutionMode> {
    if forcing.mode != 0 {
        return Err(Error::ModeMismatch {
            expected: "0".into(),
            got: forcing.mode,
        });
    }
    let gamma = params.gamma;
    if !(gamma > 2.0) {
        return Err(Error::inadmissible("gamma > 2", "Hamel flux too weak"));
    }
    forcing.check(grid)?;
    if forcing.is_zero() {
        return Ok(HorizontalSolutionMode::zero(grid, 0));
    }
    let r = grid.r_nodes();
    let k = 1.0 / (gamma - 2.0);
    let hom = grid.power(c(1.0 - gamma), 0);
    let hom_d = grid.power(c(-gamma), 0);

    let (v, dv) = match &forcing.forcing {
        HorizontalForcing::Pointwise { f_theta, .. } => {
            // (γ−2) v = −M r^{1−γ} + r·inner(γ, f) + outer(−1, r f)
            let h = f_theta.mul_rpow(r, 1.0);
            let inn = grid.inner(c(gamma), f_theta);
            let out = grid.outer(c(-1.0), &h)?;
            let m = out.values[0];
            let v = ModeProfile::combine(&[
                (-m, &hom),
                (c(1.0), &inn.mul_rpow(r, 1.0)),
                (c(1.0), &out),
            ]);
            let dv = ModeProfile::combine(&[
                (-(1.0 - gamma) * m, &hom_d),
                (c(1.0 - gamma), &inn),
                (c(-1.0), &out.mul_rpow(r, -1.0)),
            ]);
            (v.scale_real(k), dv.scale_real(k))
        }
        HorizontalForcing::Divergence { rtheta, thetar, .. } => {
            let h1 = rtheta.scale_real(-(gamma - 1.0)).add(thetar);
            let h2 = thetar.sub(rtheta);
            let inn = grid.inner(c(gamma - 1.0), &h1);
            let out = grid.outer(c(-1.0), &h2)?;
            let kk = out.values[0];
            let v = ModeProfile::combine(&[(-kk, &hom), (c(1.0), &inn), (c(1.0), &out)]);
            let dv = ModeProfile::combine(&[
                ((gamma - 1.0) * kk, &hom_d),
                (c(-(gamma - 1.0)), &inn.mul_rpow(r, -1.0)),
                (c(-1.0), &out.mul_rpow(r, -1.0)),
            ])
            .scale_real(k)
            .sub(rtheta);
            (v.scale_real(k), dv)
        }
    };
    Ok(HorizontalSolutionMode {
        mode: 0,
        v_r: grid.zeros(0, Component::R),
        v_theta: v.with_component(Component::Theta).with_mode(0),
        dv_r: grid.zeros(0, Component::R),
        dv_theta: dv.with_component(Component::Theta).with_mode(0),
        omega: None,
        c_n: None,
    })
}

/// `Φ_n[f_n]` without the homogeneous correction.
pub fn phi_mode(grid: &RadialGrid, forcing: &HorizontalForcingMode, params: &HamelParameters) -> Result<ModeProfile> {
    let n = forcing.mode;
    let sc = compute_coefficients(n, params.alpha, params.gamma)?;
    forcing.check(grid)?;
    let half_g = 0.5 * params.gamma;
    let zeta = sc.zeta;
    let p = zeta + half_g;
    let m = zeta - half_g;
    let inv2z = 1.0 / (2.0 * zeta);
    let i_n = I * n as f64;
    let n2 = (n as f64) * (n as f64);
    let r = grid.r_nodes();

    let phi = match &forcing.forcing {
        HorizontalForcing::Pointwise { f_r, f_theta } => {
            let h_in = ModeProfile::combine(&[(i_n, f_r), (p, f_theta)]);
            let h_out = ModeProfile::combine(&[(-i_n, f_r), (m, f_theta)]);
            let inn = grid.inner(p, &h_in);
            let out = grid.outer(m, &h_out)?;
            ModeProfile::combine(&[(-inv2z, &inn), (inv2z, &out)])
        }
        HorizontalForcing::Divergence {
            rr,
            rtheta,
            thetar,
            thetatheta,
        } => {
            let g1 = ModeProfile::combine(&[
                (inv2z * i_n * (p - 1.0), rr),
                (inv2z * p * (p - 1.0), rtheta),
                (-inv2z * (p - n2), thetar),
                (-inv2z * i_n * (p - 1.0), thetatheta),
            ]);
            let g2 = ModeProfile::combine(&[
                (-inv2z * i_n * (m + 1.0), rr),
                (inv2z * m * (m + 1.0), rtheta),
                (inv2z * (m + n2), thetar),
                (inv2z * i_n * (m + 1.0), thetatheta),
            ]);
            let inn = grid.inner(p - 1.0, &g1).mul_rpow(r, -1.0);
            let out = grid.outer(m + 1.0, &g2)?.mul_rpow(r, -1.0);
            ModeProfile::combine(&[(c(-1.0), rtheta), (c(1.0), &inn), (c(1.0), &out)])
        }
    };
    Ok(phi.with_mode(n).with_component(Component::Scalar))
}

/// Vorticity mode `ω_n = Φ_n + c_n r^{-ζ_n-γ/2}` and the constant `c_n`.
pub fn compute_vorticity_mode(
    grid: &RadialGrid,
    forcing: &HorizontalForcingMode,
    params: &HamelParameters,
) -> Result<(ModeProfile, Complex64)> {
    let n = forcing.mode;
    if n == 0 {
        return Err(Error::AxisymmetricMode);
    }
    if !(params.gamma > 2.0) {
        return Err(Error::inadmissible("gamma > 2", "Hamel flux too weak"));
    }
    if forcing.is_zero() {
        forcing.check(grid)?;
        return Ok((grid.zeros(n, Component::Scalar), c(0.0)));
    }
    let sc = compute_coefficients(n, params.alpha, params.gamma)?;
    let p = sc.zeta + 0.5 * params.gamma;
    let abs_n = n.unsigned_abs() as f64;
    let phi = phi_mode(grid, forcing, params)?;
    let moment = grid.outer(c(abs_n - 1.0), &phi)?.values[0];
    let c_n = -(p + abs_n - 2.0) * moment;
    let omega = phi.axpy(c_n, &grid.power(-p, n)).with_mode(n);
    Ok((omega, c_n))
}

#[derive(Debug, Clone)]
pub struct BiotSavart {
    pub v_r: ModeProfile,
    pub v_theta: ModeProfile,
    pub dv_r: ModeProfile,
    pub dv_theta: ModeProfile,
}

/// `∫_1^∞ s^{1-|n|} ω ds` and the same moment of `|ω|`.
pub fn vorticity_moment(grid: &RadialGrid, n: i32, omega: &ModeProfile) -> Result<(Complex64, f64)> {
    let b = c(n.unsigned_abs() as f64 - 1.0);
    let m = grid.outer(b, omega)?.values[0];
    let abs = ModeProfile::new(
        omega.values.iter().map(|v| c(v.norm())).collect(),
        omega.mode,
        Component::Scalar,
        omega.envelope,
    );
    let scale = grid.outer(b, &abs)?.values[0].re;
    Ok((m, scale))
}

/// Velocity mode from its vorticity mode by the Biot-Savart law.
pub fn biot_savart(grid: &RadialGrid, n: i32, omega: &ModeProfile) -> Result<BiotSavart> {
    biot_savart_scaled(grid, n, omega, 0.0)
}

/// [`biot_savart`] with the moment tolerance taken relative to at least
/// `floor`.
fn biot_savart_scaled(grid: &RadialGrid, n: i32, omega: &ModeProfile, floor: f64) -> Result<BiotSavart> {
    if n == 0 {
        return Err(Error::AxisymmetricMode);
    }
    grid.check(omega)?;
    let abs_n = n.unsigned_abs() as f64;
    let (moment, scale) = vorticity_moment(grid, n, omega)?;
    let scale = scale.max(floor);
    if moment.norm() > MOMENT_TOLERANCE * scale {
        return Err(Error::BoundaryConditionViolated {
            residual: moment.norm() / scale,
            tolerance: MOMENT_TOLERANCE,
        });
    }
    let r = grid.r_nodes();
    let a = grid.inner(c(abs_n + 1.0), omega);
    let b = grid.outer(c(abs_n - 1.0), omega)?;
    let da = a.mul_rpow(r, -1.0).scale_real(-(abs_n + 1.0)).add(omega);
    let db = b.mul_rpow(r, -1.0).scale_real(abs_n - 1.0).sub(omega);
    let kr = I * (n as f64) / (2.0 * abs_n);
    let tag = |p: ModeProfile, comp| p.with_mode(n).with_component(comp);
    Ok(BiotSavart {
        v_r: tag(a.add(&b).scale(kr), Component::R),
        v_theta: tag(a.sub(&b).scale_real(0.5), Component::Theta),
        dv_r: tag(da.add(&db).scale(kr), Component::R),
        dv_theta: tag(da.sub(&db).scale_real(0.5), Component::Theta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridConfig;
    use crate::profile::Envelope;

    fn setup() -> (RadialGrid, HamelParameters) {
        (
            RadialGrid::new(GridConfig::default()).unwrap(),
            HamelParameters::new(0.7, 4.0, 2.5).unwrap(),
        )
    }

    fn power(grid: &RadialGrid, n: i32, e: f64, coef: Complex64) -> ModeProfile {
        grid.sample(n, Component::Scalar, Envelope::Power(e), |r| coef * r.powf(e))
    }

    #[test]
    fn zero_forcing_gives_zero() {
        let (grid, params) = setup();
        for n in [0, 1, -3] {
            let z = grid.zeros(n, Component::Scalar);
            let f = HorizontalForcingMode::pointwise(n, z.clone(), z.clone());
            let s = solve_mode(&grid, &f, &params).unwrap();
            assert_eq!(s.scale(), 0.0);
            if n != 0 {
                let (w, cn) = compute_vorticity_mode(&grid, &f, &params).unwrap();
                assert_eq!(w.max_abs(), 0.0);
                assert_eq!(cn, c(0.0));
                let bs = biot_savart(&grid, n, &w).unwrap();
                assert_eq!(bs.v_r.max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn pointwise_axisymmetric_matches_ode_solution() {
        // γ = 4, f = −2 r^{-4}: v = 2(r^{-3} − r^{-2}) solves the ODE with v(1) = 0.
        let grid = RadialGrid::new(GridConfig::default()).unwrap();
        let params = HamelParameters::new(0.0, 4.0, 2.5).unwrap();
        let z = grid.zeros(0, Component::Scalar);
        let f = HorizontalForcingMode::pointwise(0, z, power(&grid, 0, -4.0, c(-2.0)));
        let s = solve_axisymmetric(&grid, &f, &params).unwrap();
        for (k, &r) in grid.r_nodes().iter().enumerate() {
            let v = 2.0 * (r.powi(-3) - r.powi(-2));
            let dv = 4.0 * r.powi(-3) - 6.0 * r.powi(-4);
            assert!((s.v_theta.values[k].re - v).abs() < 1e-11);
            assert!((s.dv_theta.values[k].re - dv).abs() < 1e-11);
        }
    }

    #[test]
    fn divergence_form_axisymmetric_closed_form() {
        let grid = RadialGrid::new(GridConfig::default()).unwrap();
        let params = HamelParameters::new(0.0, 4.0, 2.5).unwrap();
        let e = -3.0;
        let z = grid.zeros(0, Component::Scalar);
        let f = HorizontalForcingMode::divergence(0, z.clone(), power(&grid, 0, e, c(1.0)), z.clone(), z);
        let s = solve_axisymmetric(&grid, &f, &params).unwrap();
        // F_rθ = s^{-3}, γ = 4: ∫ s F = 1, r^{-3}·(−3)∫_1^r s^0 = −3 r^{-3}(r−1), −r^{-1}∫_r^∞ s^{-2} = −r^{-2}
        let exact = |r: f64| 0.5 * (r.powi(-3) - 3.0 * r.powi(-3) * (r - 1.0) - r.powi(-2));
        let v2 = grid.interpolate(&s.v_theta, 2.0).unwrap();
        assert!((v2.re - exact(2.0)).abs() < 1e-11, "{} vs {}", v2.re, exact(2.0));
        for (k, &r) in grid.r_nodes().iter().enumerate() {
            assert!((s.v_theta.values[k].re - exact(r)).abs() < 1e-11 * (1.0 + exact(r).abs()));
        }
        assert!(s.v_r.is_zero());
    }

    #[test]
    fn moment_cancellation_and_boundary() {
        let (grid, params) = setup();
        for n in [1, 2, -2, 5] {
            let f = HorizontalForcingMode::divergence(
                n,
                power(&grid, n, -3.0, Complex64::new(0.3, 0.1)),
                power(&grid, n, -3.2, c(1.0)),
                power(&grid, n, -3.5, Complex64::new(0.0, -0.4)),
                power(&grid, n, -3.0, c(0.2)),
            );
            let (w, _) = compute_vorticity_mode(&grid, &f, &params).unwrap();
            let (m, scale) = vorticity_moment(&grid, n, &w).unwrap();
            assert!(m.norm() <= 1e-10 * scale, "n={n}: {}", m.norm() / scale);
            let s = solve_mode(&grid, &f, &params).unwrap();
            assert!(s.boundary_residual() <= 1e-8 * s.scale());
            assert!(s.divergence_residual(&grid) <= 1e-8 * s.scale());
        }
    }

    #[test]
    fn biot_savart_rejects_nonzero_moment() {
        let (grid, _) = setup();
        let w = power(&grid, 2, -3.0, c(1.0));
        assert!(matches!(biot_savart(&grid, 2, &w), Err(Error::BoundaryConditionViolated { .. })));
    }

    #[test]
    fn biot_savart_closed_form() {
        // ω = r^{-a} − κ r^{-σ} with κ chosen so the |n|-moment vanishes.
        let (grid, _) = setup();
        let n = 2;
        let (a, sigma) = (4.5, 3.0);
        // ∫_1^∞ s^{-1} s^{-a} = 1/a ; ∫ s^{-1-σ} = 1/σ
        let kappa = sigma / a;
        let w = grid.sample(n, Component::Scalar, Envelope::Power(-sigma), |r| c(r.powf(-a) - kappa * r.powf(-sigma)));
        let bs = biot_savart(&grid, n, &w).unwrap();
        let nn = n as f64;
        // A = r^{-3} ∫_1^r s^{3} ω ; B = r ∫_r^∞ s^{-1} ω
        let prim_a = |r: f64, e: f64| (r.powf(nn + 2.0 - e) - 1.0) / (nn + 2.0 - e);
        let big_a = |r: f64| r.powf(-nn - 1.0) * (prim_a(r, a) - kappa * prim_a(r, sigma));
        let big_b = |r: f64| r.powf(nn - 1.0) * (r.powf(-a - nn + 2.0) / (a + nn - 2.0) - kappa * r.powf(-sigma - nn + 2.0) / (sigma + nn - 2.0));
        for &r in &[1.0, 1.5, 3.0, 20.0, 400.0] {
            let vt = grid.interpolate(&bs.v_theta, r).unwrap();
            let vr = grid.interpolate(&bs.v_r, r).unwrap();
            let et = 0.5 * (big_a(r) - big_b(r));
            let er = 0.5 * (big_a(r) + big_b(r));
            assert!((vt.re - et).abs() < 1e-10 * (1.0 + et.abs()), "r={r}");
            assert!((vr - I * er).norm() < 1e-10 * (1.0 + er.abs()), "r={r}");
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let (grid, params) = setup();
        let f = HorizontalForcingMode::pointwise(
            3,
            power(&grid, 3, -4.0, Complex64::new(0.5, 0.2)),
            power(&grid, 3, -4.2, Complex64::new(-0.1, 0.9)),
        );
        let s = solve_mode(&grid, &f, &params).unwrap();
        let t = solve_mode(&grid, &f.conj(), &params).unwrap();
        for k in 0..grid.len() {
            assert!((s.v_r.values[k].conj() - t.v_r.values[k]).norm() <= 1e-13 * s.scale());
            assert!((s.v_theta.values[k].conj() - t.v_theta.values[k]).norm() <= 1e-13 * s.scale());
        }
    }

    #[test]
    fn wrong_mode_errors() {
        let (grid, params) = setup();
        let z = grid.zeros(1, Component::Scalar);
        let f = HorizontalForcingMode::pointwise(1, z.clone(), z);
        assert!(matches!(solve_axisymmetric(&grid, &f, &params), Err(Error::ModeMismatch { .. })));
        let z0 = grid.zeros(0, Component::Scalar);
        let f0 = HorizontalForcingMode::pointwise(0, z0.clone(), z0);
        assert!(matches!(compute_vorticity_mode(&grid, &f0, &params), Err(Error::AxisymmetricMode)));
    }
}
