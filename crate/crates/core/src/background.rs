//! The Hamel flow `V = α x^⊥/|x|² − γ x/|x|²` lifted to 3D, its pressure and
//! the boundary data it induces on the unit circle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rotation strength `alpha`, flux parameter `gamma` and decay index `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamelParameters {
    pub alpha: f64,
    pub gamma: f64,
    pub rho: f64,
}

impl HamelParameters {
    /// Validates `γ > 2`, `2 < ρ < 3` and `ρ ≤ γ`.
    pub fn new(alpha: f64, gamma: f64, rho: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::inadmissible("alpha finite", format!("alpha = {alpha}")));
        }
        if !(gamma > 2.0) || !gamma.is_finite() {
            return Err(Error::inadmissible("gamma > 2", format!("gamma = {gamma}: Hamel flux too weak")));
        }
        if !(rho > 2.0) {
            return Err(Error::inadmissible("rho > 2", format!("rho = {rho}")));
        }
        if !(rho < 3.0) {
            return Err(Error::inadmissible("rho < 3", format!("rho = {rho}")));
        }
        if rho > gamma {
            return Err(Error::inadmissible("rho <= gamma", format!("rho = {rho}, gamma = {gamma}")));
        }
        Ok(Self { alpha, gamma, rho })
    }
}

/// Cylindrical components `(V_r, V_θ, V_3)` at radius `r`.
pub fn evaluate_v(params: &HamelParameters, r: f64) -> Result<[f64; 3]> {
    if !(r >= 1.0) {
        return Err(Error::Domain(r));
    }
    Ok([-params.gamma / r, params.alpha / r, 0.0])
}

/// `Q = −|V|²/2 = −(α² + γ²)/(2r²)`; returns 0 for `r = ∞`.
pub fn evaluate_q(params: &HamelParameters, r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::Domain(r));
    }
    if r.is_infinite() {
        return Ok(0.0);
    }
    Ok(-(params.alpha * params.alpha + params.gamma * params.gamma) / (2.0 * r * r))
}

/// Boundary data `b(x) = (α x^⊥ − γ x, 0)` in Cartesian components.
pub fn boundary_data(params: &HamelParameters, theta: f64) -> [f64; 3] {
    let (s, c) = theta.sin_cos();
    [
        -params.alpha * s - params.gamma * c,
        params.alpha * c - params.gamma * s,
        0.0,
    ]
}

/// Converts cylindrical `(v_r, v_θ, v_3)` at angle `θ` to Cartesian.
pub fn cylindrical_to_cartesian(v: [f64; 3], theta: f64) -> [f64; 3] {
    let (s, c) = theta.sin_cos();
    [v[0] * c - v[1] * s, v[0] * s + v[1] * c, v[2]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridConfig, RadialGrid};

    #[test]
    fn substitution_examples() {
        let p = HamelParameters::new(0.0, 3.0, 2.5).unwrap();
        assert_eq!(evaluate_v(&p, 1.0).unwrap(), [-3.0, 0.0, 0.0]);
        let p = HamelParameters::new(2.0, 3.0, 2.5).unwrap();
        assert_eq!(evaluate_v(&p, 2.0).unwrap(), [-1.5, 1.0, 0.0]);
        let p = HamelParameters::new(0.0, 2.5, 2.5).unwrap();
        assert_eq!(evaluate_q(&p, 1.0).unwrap(), -3.125);
        let p = HamelParameters::new(1.0, 3.0, 2.5).unwrap();
        assert!((evaluate_q(&p, 10.0).unwrap() + 0.05).abs() < 1e-15);
        assert_eq!(evaluate_q(&p, f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn scale_invariance_and_domain() {
        let p = HamelParameters::new(1.3, 3.5, 2.5).unwrap();
        let grid = RadialGrid::new(GridConfig::default()).unwrap();
        for &r in grid.r_nodes() {
            let v = evaluate_v(&p, r).unwrap();
            assert!((r * v[0] + 3.5).abs() < 1e-12);
        }
        assert!(matches!(evaluate_v(&p, 0.9), Err(Error::Domain(_))));
        assert!(matches!(evaluate_q(&p, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn irrotational_and_flux() {
        let p = HamelParameters::new(-2.0, 4.0, 2.5).unwrap();
        let grid = RadialGrid::new(GridConfig::default()).unwrap();
        for &r in grid.r_nodes() {
            // rot = (1/r) d/dr (r V_θ) − (1/r) ∂_θ V_r; r V_θ = α is constant and V_r has no θ.
            let h = 1e-6 * r;
            let rv = |x: f64| x * evaluate_v(&p, x).unwrap()[1];
            let rot = (rv(r + h) - rv((r - h).max(1.0))) / (r + h - (r - h).max(1.0)) / r;
            assert!(rot.abs() < 1e-8);
            let flux = 2.0 * std::f64::consts::PI * r * evaluate_v(&p, r).unwrap()[0];
            assert!((flux + 2.0 * std::f64::consts::PI * 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_match() {
        let p = HamelParameters::new(1.7, 3.0, 2.5).unwrap();
        for k in 0..16 {
            let t = k as f64 * 0.4;
            let v = cylindrical_to_cartesian(evaluate_v(&p, 1.0).unwrap(), t);
            let b = boundary_data(&p, t);
            for i in 0..3 {
                assert!((v[i] - b[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn admissibility_gates_name_the_constraint() {
        let msg = |e: Error| e.to_string();
        assert!(msg(HamelParameters::new(0.0, 1.5, 2.5).unwrap_err()).contains("gamma > 2"));
        assert!(msg(HamelParameters::new(0.0, 2.0, 2.5).unwrap_err()).contains("gamma > 2"));
        assert!(msg(HamelParameters::new(0.0, 4.0, 3.0).unwrap_err()).contains("rho < 3"));
        assert!(msg(HamelParameters::new(0.0, 2.4, 2.5).unwrap_err()).contains("rho <= gamma"));
        assert!(msg(HamelParameters::new(0.0, 4.0, 2.0).unwrap_err()).contains("rho > 2"));
        assert!(msg(HamelParameters::new(0.0, 0.0, 2.5).unwrap_err()).contains("gamma > 2"));
    }
}
