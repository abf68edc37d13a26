//! Mode constants `n_γ`, `ζ_n = (n_γ² + iαn)^{1/2}` and `ξ_n = Re ζ_n`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralCoefficients {
    pub n: i32,
    pub n_gamma: f64,
    #[serde(serialize_with = "ser_complex")]
    pub zeta: Complex64,
    pub xi: f64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// Principal square root (non-negative real part), computed in the
/// cancellation-free form.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return z;
    }
    let m = z.norm();
    if z.re >= 0.0 {
        let t = (0.5 * (m + z.re)).sqrt();
        Complex64::new(t, z.im / (2.0 * t))
    } else {
        let t = (0.5 * (m - z.re)).sqrt();
        Complex64::new(z.im.abs() / (2.0 * t), t.copysign(z.im))
    }
}

/// Closed radical form of `ξ_n`.
pub fn xi_radical(n: i32, alpha: f64, gamma: f64) -> f64 {
    let nf = n as f64;
    let ng = (nf * nf + 0.25 * gamma * gamma).sqrt();
    let q = alpha * nf / (ng * ng);
    ng / std::f64::consts::SQRT_2 * ((1.0 + q * q).sqrt() + 1.0).sqrt()
}

pub fn compute_coefficients(n: i32, alpha: f64, gamma: f64) -> Result<SpectralCoefficients> {
    if n == 0 {
        return Err(Error::AxisymmetricMode);
    }
    if !(gamma > 2.0) {
        return Err(Error::inadmissible("gamma > 2", format!("gamma = {gamma}: Hamel flux too weak")));
    }
    let nf = n as f64;
    let ng2 = nf * nf + 0.25 * gamma * gamma;
    let zeta = principal_sqrt(Complex64::new(ng2, alpha * nf));
    let xi = zeta.re;
    debug_assert!((xi - xi_radical(n, alpha, gamma)).abs() <= 1e-12 * xi);
    Ok(SpectralCoefficients {
        n,
        n_gamma: ng2.sqrt(),
        zeta,
        xi,
    })
}
