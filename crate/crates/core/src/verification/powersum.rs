//! Finite sums `Σ c_k r^{μ_k}` with complex coefficients and exponents,
//! differentiated in closed form.

use num_complex::Complex64;

use crate::grid::RadialGrid;
use crate::profile::{Component, Envelope, ModeProfile, Tail};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PowerSum {
    pub terms: Vec<(Complex64, Complex64)>,
}

impl PowerSum {
    pub fn new(terms: Vec<(Complex64, Complex64)>) -> Self {
        Self { terms }
    }

    pub fn real(terms: &[(f64, f64)]) -> Self {
        Self::new(
            terms
                .iter()
                .map(|&(c, e)| (Complex64::new(c, 0.0), Complex64::new(e, 0.0)))
                .collect(),
        )
    }

    pub fn term(c: Complex64, e: Complex64) -> Self {
        Self::new(vec![(c, e)])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(c, _)| c.norm() == 0.0)
    }

    pub fn eval(&self, r: f64) -> Complex64 {
        let l = r.ln();
        self.terms.iter().map(|&(c, e)| c * (e * l).exp()).sum()
    }

    pub fn derivative(&self) -> PowerSum {
        PowerSum::new(
            self.terms
                .iter()
                .filter(|(c, e)| c.norm() != 0.0 && e.norm() != 0.0)
                .map(|&(c, e)| (c * e, e - 1.0))
                .collect(),
        )
    }

    pub fn mul_rpow(&self, k: f64) -> PowerSum {
        PowerSum::new(self.terms.iter().map(|&(c, e)| (c, e + k)).collect())
    }

    pub fn scale(&self, s: Complex64) -> PowerSum {
        PowerSum::new(self.terms.iter().map(|&(c, e)| (c * s, e)).collect())
    }

    pub fn add(&self, other: &PowerSum) -> PowerSum {
        PowerSum::new(self.terms.iter().chain(&other.terms).copied().collect())
    }

    /// Applies `r^μ ↦ σ(μ) r^{μ+shift}` term by term.
    pub fn map_terms(&self, shift: f64, symbol: impl Fn(Complex64) -> Complex64) -> PowerSum {
        PowerSum::new(self.terms.iter().map(|&(c, e)| (c * symbol(e), e + shift)).collect())
    }

    /// Slowest decay rate among nonzero terms.
    pub fn envelope(&self) -> Envelope {
        self.terms
            .iter()
            .filter(|(c, _)| c.norm() != 0.0)
            .fold(Envelope::Zero, |acc, (_, e)| acc.max(Envelope::Power(e.re)))
    }

    pub fn sample(&self, grid: &RadialGrid, mode: i32, component: Component) -> ModeProfile {
        if self.is_zero() {
            return grid.zeros(mode, component);
        }
        grid.sample(mode, component, self.envelope(), |r| self.eval(r))
            .with_tail(Tail::powers(grid.r_max(), &self.terms))
    }

    /// `max |c_k|`, a scale for relative checks.
    pub fn coefficient_scale(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.norm()).fold(0.0, f64::max)
    }
}
