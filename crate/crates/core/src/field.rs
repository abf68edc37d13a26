//! Mode-truncated velocity fields and forcing data on a radial grid.

use num_complex::Complex64;

use crate::background::HamelParameters;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::norms::{l1_weighted_norm, mode_weighted_norm};
use crate::profile::{Component, Envelope, ModeProfile};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Cylindrical components `(v_r, v_θ, v_3)` of one mode and their radial derivatives.
#[derive(Debug, Clone)]
pub struct VelocityMode {
    pub n: i32,
    pub v: [ModeProfile; 3],
    pub dv: [ModeProfile; 3],
}

impl VelocityMode {
    pub fn zero(grid: &RadialGrid, n: i32) -> Self {
        let z = |c| grid.zeros(n, c);
        Self {
            n,
            v: [z(Component::R), z(Component::Theta), z(Component::Axial)],
            dv: [z(Component::R), z(Component::Theta), z(Component::Axial)],
        }
    }

    /// Entries of `∇_h v` for this mode:
    /// `∂_r v_r, ∂_r v_θ, ∂_r v_3, (in v_r − v_θ)/r, (in v_θ + v_r)/r, in v_3/r`.
    pub fn gradient(&self, radii: &[f64]) -> [ModeProfile; 6] {
        let i_n = I * self.n as f64;
        let one = Complex64::new(1.0, 0.0);
        let [vr, vt, v3] = &self.v;
        let a = ModeProfile::combine(&[(i_n, vr), (-one, vt)]).mul_rpow(radii, -1.0);
        let b = ModeProfile::combine(&[(i_n, vt), (one, vr)]).mul_rpow(radii, -1.0);
        let c = v3.scale(i_n).mul_rpow(radii, -1.0);
        [
            self.dv[0].clone(),
            self.dv[1].clone(),
            self.dv[2].clone(),
            a.with_component(Component::ThetaR),
            b.with_component(Component::ThetaTheta),
            c.with_component(Component::ThetaAxial),
        ]
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().chain(&self.dv).all(|p| p.is_zero())
    }

    pub fn axpy(&self, c: Complex64, other: &VelocityMode) -> VelocityMode {
        VelocityMode {
            n: self.n,
            v: std::array::from_fn(|k| self.v[k].axpy(c, &other.v[k])),
            dv: std::array::from_fn(|k| self.dv[k].axpy(c, &other.dv[k])),
        }
    }
}

/// Modes `−N..=N` stored at index `n + N`.
#[derive(Debug, Clone)]
pub struct VelocityField {
    cutoff: usize,
    modes: Vec<VelocityMode>,
}

/// `‖v‖_{l¹L^∞_{ρ−1}}` and `‖∇_h v‖_{l¹L^∞_ρ}`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FieldNorms {
    pub value: f64,
    pub gradient: f64,
}

impl FieldNorms {
    pub fn total(&self) -> f64 {
        self.value + self.gradient
    }
}

impl VelocityField {
    pub fn zero(grid: &RadialGrid, cutoff: usize) -> Self {
        let n = cutoff as i32;
        Self {
            cutoff,
            modes: (-n..=n).map(|k| VelocityMode::zero(grid, k)).collect(),
        }
    }

    pub fn from_modes(cutoff: usize, modes: Vec<VelocityMode>) -> Result<Self> {
        if modes.len() != 2 * cutoff + 1 {
            return Err(Error::CutoffMismatch(2 * cutoff + 1, modes.len()));
        }
        for (k, m) in modes.iter().enumerate() {
            if m.n != k as i32 - cutoff as i32 {
                return Err(Error::ModeMismatch {
                    expected: (k as i32 - cutoff as i32).to_string(),
                    got: m.n,
                });
            }
        }
        Ok(Self { cutoff, modes })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn modes(&self) -> &[VelocityMode] {
        &self.modes
    }

    pub fn mode(&self, n: i32) -> Option<&VelocityMode> {
        if n.unsigned_abs() as usize > self.cutoff {
            return None;
        }
        self.modes.get((n + self.cutoff as i32) as usize)
    }

    pub fn mode_mut(&mut self, n: i32) -> Option<&mut VelocityMode> {
        if n.unsigned_abs() as usize > self.cutoff {
            return None;
        }
        self.modes.get_mut((n + self.cutoff as i32) as usize)
    }

    pub fn is_zero(&self) -> bool {
        self.modes.iter().all(|m| m.is_zero())
    }

    fn check_compatible(&self, other: &VelocityField) -> Result<()> {
        if self.cutoff != other.cutoff {
            return Err(Error::CutoffMismatch(self.cutoff, other.cutoff));
        }
        Ok(())
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: f64, other: &VelocityField) -> Result<VelocityField> {
        self.check_compatible(other)?;
        let c = Complex64::new(c, 0.0);
        Ok(VelocityField {
            cutoff: self.cutoff,
            modes: self.modes.iter().zip(&other.modes).map(|(a, b)| a.axpy(c, b)).collect(),
        })
    }

    pub fn sub(&self, other: &VelocityField) -> Result<VelocityField> {
        self.axpy(-1.0, other)
    }

    pub fn scale(&self, c: f64) -> VelocityField {
        let c = Complex64::new(c, 0.0);
        VelocityField {
            cutoff: self.cutoff,
            modes: self
                .modes
                .iter()
                .map(|m| VelocityMode {
                    n: m.n,
                    v: std::array::from_fn(|k| m.v[k].scale(c)),
                    dv: std::array::from_fn(|k| m.dv[k].scale(c)),
                })
                .collect(),
        }
    }

    pub fn norms(&self, grid: &RadialGrid, rho: f64) -> Result<FieldNorms> {
        let r = grid.r_nodes();
        let value = l1_weighted_norm(r, self.modes.iter().map(|m| m.v.iter()), rho - 1.0)?;
        let mut gradient = 0.0;
        for m in &self.modes {
            gradient += mode_weighted_norm(r, m.gradient(r).iter(), rho)?;
        }
        Ok(FieldNorms { value, gradient })
    }

    /// The discrete `X_ρ` norm.
    pub fn x_norm(&self, grid: &RadialGrid, rho: f64) -> Result<f64> {
        Ok(self.norms(grid, rho)?.total())
    }

    /// `max |v_{a,−n} − conj(v_{a,n})|` over modes, components and nodes.
    pub fn reality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for m in &self.modes {
            let partner = &self.modes[(self.cutoff as i32 - m.n) as usize];
            for k in 0..3 {
                for (a, b) in m.v[k].values.iter().zip(&partner.v[k].values) {
                    worst = worst.max((a - b.conj()).norm());
                }
            }
        }
        worst
    }

    /// Largest `|v_{a,n}(r)|` over everything.
    pub fn scale_max(&self) -> f64 {
        self.modes
            .iter()
            .flat_map(|m| m.v.iter())
            .map(|p| p.max_abs())
            .fold(0.0, f64::max)
    }

    /// `Σ_n v_n(r) e^{inθ}` in the cylindrical basis at grid node `k`.
    pub fn evaluate_node(&self, k: usize, theta: f64) -> [Complex64; 3] {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for m in &self.modes {
            let e = Complex64::from_polar(1.0, m.n as f64 * theta);
            for (c, p) in out.iter_mut().zip(&m.v) {
                *c += p.values[k] * e;
            }
        }
        out
    }

    /// Same as [`evaluate_node`](Self::evaluate_node) at an arbitrary radius, by interpolation.
    pub fn evaluate(&self, grid: &RadialGrid, r: f64, theta: f64) -> Result<[Complex64; 3]> {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for m in &self.modes {
            if m.is_zero() {
                continue;
            }
            let e = Complex64::from_polar(1.0, m.n as f64 * theta);
            for (c, p) in out.iter_mut().zip(&m.v) {
                *c += grid.interpolate(p, r)? * e;
            }
        }
        Ok(out)
    }
}

/// Forcing `g + div F` of one mode. `f` is ordered `rr, rθ, θr, θθ, r3, θ3`.
#[derive(Debug, Clone)]
pub struct ForcingMode {
    pub n: i32,
    pub g: [ModeProfile; 3],
    pub f: [ModeProfile; 6],
}

pub const TENSOR_COMPONENTS: [Component; 6] = [
    Component::RR,
    Component::RTheta,
    Component::ThetaR,
    Component::ThetaTheta,
    Component::RAxial,
    Component::ThetaAxial,
];

impl ForcingMode {
    pub fn zero(grid: &RadialGrid, n: i32) -> Self {
        Self {
            n,
            g: [
                grid.zeros(n, Component::R),
                grid.zeros(n, Component::Theta),
                grid.zeros(n, Component::Axial),
            ],
            f: TENSOR_COMPONENTS.map(|c| grid.zeros(n, c)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.g.iter().chain(&self.f).all(|p| p.is_zero())
    }

    pub fn scale(&self, c: f64) -> Self {
        let c = Complex64::new(c, 0.0);
        Self {
            n: self.n,
            g: std::array::from_fn(|k| self.g[k].scale(c)),
            f: std::array::from_fn(|k| self.f[k].scale(c)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ForcingSpec {
    cutoff: usize,
    modes: Vec<ForcingMode>,
}

impl ForcingSpec {
    pub fn zero(grid: &RadialGrid, cutoff: usize) -> Self {
        let n = cutoff as i32;
        Self {
            cutoff,
            modes: (-n..=n).map(|k| ForcingMode::zero(grid, k)).collect(),
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn modes(&self) -> &[ForcingMode] {
        &self.modes
    }

    pub fn mode(&self, n: i32) -> Option<&ForcingMode> {
        if n.unsigned_abs() as usize > self.cutoff {
            return None;
        }
        self.modes.get((n + self.cutoff as i32) as usize)
    }

    pub fn mode_mut(&mut self, n: i32) -> Option<&mut ForcingMode> {
        if n.unsigned_abs() as usize > self.cutoff {
            return None;
        }
        self.modes.get_mut((n + self.cutoff as i32) as usize)
    }

    pub fn is_zero(&self) -> bool {
        self.modes.iter().all(|m| m.is_zero())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            cutoff: self.cutoff,
            modes: self.modes.iter().map(|m| m.scale(c)).collect(),
        }
    }

    /// `‖g‖_{l¹L^∞_{2ρ−1}}`.
    pub fn g_norm(&self, grid: &RadialGrid, rho: f64) -> Result<f64> {
        l1_weighted_norm(grid.r_nodes(), self.modes.iter().map(|m| m.g.iter()), 2.0 * rho - 1.0)
    }

    /// `‖F‖_{l¹L^∞_{2(ρ−1)}}`.
    pub fn f_norm(&self, grid: &RadialGrid, rho: f64) -> Result<f64> {
        l1_weighted_norm(grid.r_nodes(), self.modes.iter().map(|m| m.f.iter()), 2.0 * (rho - 1.0))
    }

    /// Rejects data whose declared envelope decays slower than the data
    /// space allows: `g` must be `O(r^{-(2ρ-1)})`, `F` must be `O(r^{-2(ρ-1)})`.
    pub fn check_admissible(&self, grid: &RadialGrid, params: &HamelParameters) -> Result<()> {
        let rho = params.rho;
        for m in &self.modes {
            for p in m.g.iter().chain(&m.f) {
                grid.check(p)?;
            }
            for p in &m.g {
                check_envelope(p, -(2.0 * rho - 1.0), "g envelope decays like r^-(2rho-1)")?;
            }
            for p in &m.f {
                check_envelope(p, -2.0 * (rho - 1.0), "F envelope decays like r^-2(rho-1)")?;
            }
        }
        if self.reality_defect() > 1e-12 * self.scale_max().max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidTarget("forcing violates the reality condition".into()));
        }
        Ok(())
    }

    pub fn reality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for m in &self.modes {
            let partner = &self.modes[(self.cutoff as i32 - m.n) as usize];
            for (p, q) in m.g.iter().chain(&m.f).zip(partner.g.iter().chain(&partner.f)) {
                for (a, b) in p.values.iter().zip(&q.values) {
                    worst = worst.max((a - b.conj()).norm());
                }
            }
        }
        worst
    }

    pub fn scale_max(&self) -> f64 {
        self.modes
            .iter()
            .flat_map(|m| m.g.iter().chain(&m.f))
            .map(|p| p.max_abs())
            .fold(0.0, f64::max)
    }
}

fn check_envelope(p: &ModeProfile, limit: f64, constraint: &'static str) -> Result<()> {
    if p.is_zero() {
        return Ok(());
    }
    match p.envelope {
        Envelope::Zero => Ok(()),
        Envelope::Power(e) if e <= limit + 1e-12 => Ok(()),
        Envelope::Power(e) => Err(Error::inadmissible(
            constraint,
            format!("mode {} component {} has envelope r^{e}, needs r^{limit}", p.mode, p.component.label()),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridConfig;

    fn grid() -> RadialGrid {
        RadialGrid::new(GridConfig::default().with_panels(8)).unwrap()
    }

    #[test]
    fn zero_field_has_zero_norm() {
        let g = grid();
        let v = VelocityField::zero(&g, 3);
        assert_eq!(v.x_norm(&g, 2.5).unwrap(), 0.0);
        assert_eq!(v.reality_defect(), 0.0);
        assert!(v.mode(4).is_none());
        assert_eq!(v.mode(-3).unwrap().n, -3);
    }

    #[test]
    fn gradient_of_rigid_profile() {
        // v_θ = r^{-1} at n = 0 gives (in v_r − v_θ)/r = −r^{-2} and (in v_θ + v_r)/r = 0.
        let g = grid();
        let mut v = VelocityField::zero(&g, 0);
        let m = v.mode_mut(0).unwrap();
        m.v[1] = g.sample(0, Component::Theta, Envelope::Power(-1.0), |r| Complex64::new(1.0 / r, 0.0));
        m.dv[1] = g.sample(0, Component::Theta, Envelope::Power(-2.0), |r| Complex64::new(-1.0 / (r * r), 0.0));
        let grad = v.mode(0).unwrap().gradient(g.r_nodes());
        for (k, &r) in g.r_nodes().iter().enumerate() {
            assert!((grad[3].values[k].re + r.powi(-2)).abs() < 1e-15);
            assert_eq!(grad[4].values[k].norm(), 0.0);
        }
        let norms = v.norms(&g, 2.0).unwrap();
        assert!((norms.value - 1.0).abs() < 1e-12);
        assert!((norms.gradient - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evaluation_sums_modes() {
        let g = RadialGrid::new(GridConfig::default()).unwrap();
        let mut v = VelocityField::zero(&g, 1);
        let c = Complex64::new(0.3, -0.4);
        v.mode_mut(1).unwrap().v[2] = g.sample(1, Component::Axial, Envelope::Power(-2.0), |r| c / (r * r));
        v.mode_mut(-1).unwrap().v[2] = g.sample(-1, Component::Axial, Envelope::Power(-2.0), |r| c.conj() / (r * r));
        assert_eq!(v.reality_defect(), 0.0);
        let u = v.evaluate(&g, 2.0, 0.7).unwrap();
        let expect = 2.0 * (c * Complex64::from_polar(1.0, 0.7)).re / 4.0;
        assert!((u[2].re - expect).abs() < 1e-12);
        assert!(u[2].im.abs() < 1e-15);
    }

    #[test]
    fn slow_envelope_is_rejected() {
        let g = grid();
        let params = HamelParameters::new(0.0, 3.0, 2.5).unwrap();
        let mut f = ForcingSpec::zero(&g, 0);
        f.mode_mut(0).unwrap().f[1] = g.sample(0, Component::RTheta, Envelope::Power(-2.0), |r| Complex64::new(r.powi(-2), 0.0));
        let e = f.check_admissible(&g, &params).unwrap_err();
        assert!(e.to_string().contains("F envelope"), "{e}");
        f.mode_mut(0).unwrap().f[1] = g.sample(0, Component::RTheta, Envelope::Power(-3.0), |r| Complex64::new(r.powi(-3), 0.0));
        f.check_admissible(&g, &params).unwrap();
    }
}
