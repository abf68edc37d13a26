//! Built-in forcing families for batch runs.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ForcingSpec, TENSOR_COMPONENTS};
use crate::grid::RadialGrid;
use crate::profile::{Component, Envelope, ModeProfile};

const VECTOR_COMPONENTS: [Component; 3] = [Component::R, Component::Theta, Component::Axial];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForcingFamily {
    /// `g = c_n r^{-(2ρ-1)}`, `F = c_n r^{-2(ρ-1)}` in every component.
    PowerEnvelope,
    /// `c_n ((r-2)(4-r))³` on `[2, 4]` in every component.
    CompactBump,
    /// Power envelope with seeded random coefficients per mode and component.
    Random,
}

impl ForcingFamily {
    pub const ALL: [ForcingFamily; 3] = [Self::PowerEnvelope, Self::CompactBump, Self::Random];

    pub fn name(self) -> &'static str {
        match self {
            Self::PowerEnvelope => "power-envelope",
            Self::CompactBump => "compact-bump",
            Self::Random => "random",
        }
    }
}

impl fmt::Display for ForcingFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ForcingFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|f| f.name()).collect();
            Error::Config(format!(
                "forcing.family: unknown family {s:?}; expected one of {}",
                names.join(", ")
            ))
        })
    }
}

/// `c_0 = 1`, `c_n = 2^{-n}`.
pub fn default_coefficients(cutoff: usize) -> Vec<Complex64> {
    (0..=cutoff).map(|n| Complex64::new(0.5f64.powi(n as i32), 0.0)).collect()
}

/// Coefficient of mode `n ≥ 0`; absent entries are zero.
fn coefficient(coeffs: &[Complex64], n: usize) -> Complex64 {
    let c = coeffs.get(n).copied().unwrap_or_default();
    if n == 0 {
        Complex64::new(c.re, 0.0)
    } else {
        c
    }
}

/// Builds `ε · family` with modes `|n| ≤ cutoff`, coefficients `c_n` for
/// `n ≥ 0` and `c_{-n} = conj(c_n)`. `seed` only affects [`ForcingFamily::Random`].
pub fn build_forcing(
    grid: &RadialGrid,
    rho: f64,
    cutoff: usize,
    family: ForcingFamily,
    amplitude: f64,
    coeffs: &[Complex64],
    seed: u64,
) -> ForcingSpec {
    let mut spec = ForcingSpec::zero(grid, cutoff);
    if amplitude == 0.0 {
        return spec;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g_rate = Complex64::new(-(2.0 * rho - 1.0), 0.0);
    let f_rate = Complex64::new(-2.0 * (rho - 1.0), 0.0);
    let bump = |n: i32, comp: Component| {
        grid.sample(n, comp, Envelope::Zero, |r| {
            let s = if (2.0..=4.0).contains(&r) { (r - 2.0) * (4.0 - r) } else { 0.0 };
            Complex64::new(s * s * s, 0.0)
        })
    };
    for n in 0..=cutoff {
        let c = coefficient(coeffs, n) * amplitude;
        let k = n as i32;
        let mut weight = |_: usize| -> Complex64 {
            match family {
                ForcingFamily::Random => {
                    let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    let z = if n == 0 { Complex64::new(z.re, 0.0) } else { z };
                    c * z
                }
                _ => c,
            }
        };
        let shape = |rate: Complex64, comp: Component| -> ModeProfile {
            match family {
                ForcingFamily::CompactBump => bump(k, comp),
                _ => grid.power(rate, k).with_component(comp),
            }
        };
        let g: Vec<ModeProfile> = VECTOR_COMPONENTS
            .iter()
            .enumerate()
            .map(|(i, &comp)| shape(g_rate, comp).scale(weight(i)))
            .collect();
        let f: Vec<ModeProfile> = TENSOR_COMPONENTS
            .iter()
            .enumerate()
            .map(|(i, &comp)| shape(f_rate, comp).scale(weight(3 + i)))
            .collect();
        for (sign, conj) in [(1, false), (-1, true)] {
            if n == 0 && sign < 0 {
                continue;
            }
            let m = spec.mode_mut(sign * k).unwrap();
            for (dst, src) in m.g.iter_mut().zip(&g) {
                *dst = if conj { src.conj() } else { src.clone() }.with_mode(sign * k);
            }
            for (dst, src) in m.f.iter_mut().zip(&f) {
                *dst = if conj { src.conj() } else { src.clone() }.with_mode(sign * k);
            }
        }
    }
    spec
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::HamelParameters;
    use crate::grid::GridConfig;

    fn grid() -> RadialGrid {
        RadialGrid::new(GridConfig::default().with_panels(16)).unwrap()
    }

    #[test]
    fn families_parse_by_name() {
        for f in ForcingFamily::ALL {
            assert_eq!(f.name().parse::<ForcingFamily>().unwrap(), f);
        }
        let err = "vortex".parse::<ForcingFamily>().unwrap_err().to_string();
        assert!(err.contains("power-envelope") && err.contains("compact-bump") && err.contains("random"));
    }

    #[test]
    fn power_envelope_is_admissible_and_real() {
        let g = grid();
        let p = HamelParameters::new(1.0, 4.0, 2.5).unwrap();
        for family in ForcingFamily::ALL {
            let f = build_forcing(&g, p.rho, 3, family, 0.1, &default_coefficients(3), 7);
            f.check_admissible(&g, &p).unwrap();
            assert!(f.reality_defect() == 0.0);
            assert!(!f.is_zero());
        }
    }

    #[test]
    fn power_envelope_values() {
        let g = grid();
        let f = build_forcing(&g, 2.5, 2, ForcingFamily::PowerEnvelope, 0.2, &default_coefficients(2), 0);
        let r = g.r_nodes()[40];
        let m = f.mode(-1).unwrap();
        assert!((m.g[1].values[40] - 0.1 * r.powf(-4.0)).norm() < 1e-15);
        assert!((m.f[4].values[40] - 0.1 * r.powf(-3.0)).norm() < 1e-15);
    }

    #[test]
    fn random_is_seeded() {
        let g = grid();
        let c = default_coefficients(2);
        let a = build_forcing(&g, 2.5, 2, ForcingFamily::Random, 1.0, &c, 11);
        let b = build_forcing(&g, 2.5, 2, ForcingFamily::Random, 1.0, &c, 11);
        let d = build_forcing(&g, 2.5, 2, ForcingFamily::Random, 1.0, &c, 12);
        assert_eq!(a.mode(1).unwrap().f[2].values, b.mode(1).unwrap().f[2].values);
        assert_ne!(a.mode(1).unwrap().f[2].values, d.mode(1).unwrap().f[2].values);
    }

    #[test]
    fn zero_amplitude_gives_zero_forcing() {
        let f = build_forcing(&grid(), 2.5, 2, ForcingFamily::PowerEnvelope, 0.0, &[], 0);
        assert!(f.is_zero());
    }
}
