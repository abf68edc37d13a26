//! Weak-form residual of the full system for `u = V + v`:
//! `∫ ∇u:∇φ − ∫ (u⊗u):∇φ − ∫ g·φ + ∫ F:∇φ` against divergence-free `φ`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::background::HamelParameters;
use crate::error::{Error, Result};
use crate::field::{ForcingSpec, VelocityField};
use crate::grid::RadialGrid;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Gradient slots in the order `rr, rθ, r3, θr, θθ, θ3`, first index the
/// derivative direction.
const SLOTS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)];

/// Position of `(a, b)` in the forcing tensor layout `rr, rθ, θr, θθ, r3, θ3`.
fn forcing_slot(a: usize, b: usize) -> usize {
    match (a, b) {
        (0, 0) => 0,
        (0, 1) => 1,
        (1, 0) => 2,
        (1, 1) => 3,
        (0, 2) => 4,
        (1, 2) => 5,
        _ => unreachable!(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestKind {
    /// `φ = ∇^⊥(b(r) e^{ikθ})`.
    Horizontal,
    /// `φ = (0, 0, b(r) e^{ikθ})`.
    Vertical,
}

/// Bump `b = ((r−a)(c−r))³ / ((c−a)/2)⁶` on `[a, c]` times `e^{ikθ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestFunction {
    pub kind: TestKind,
    pub k: i32,
    pub support: [f64; 2],
}

impl TestFunction {
    /// `(b, b', b'')` at `r`.
    fn bump(&self, r: f64) -> [f64; 3] {
        let [a, c] = self.support;
        let norm = (0.5 * (c - a)).powi(-6);
        let s = (r - a) * (c - r);
        let ds = c + a - 2.0 * r;
        [
            norm * s.powi(3),
            norm * 3.0 * s * s * ds,
            norm * (6.0 * s * ds * ds - 6.0 * s * s),
        ]
    }

    /// `φ` components and gradient slots at `r` (mode-`k` amplitudes).
    fn eval(&self, r: f64) -> ([Complex64; 3], [Complex64; 6]) {
        let [b, db, d2b] = self.bump(r);
        let ik = I * self.k as f64;
        let zero = Complex64::new(0.0, 0.0);
        let (phi, dphi) = match self.kind {
            TestKind::Horizontal => (
                [ik * b / r, Complex64::from(-db), zero],
                [ik * (db / r - b / (r * r)), Complex64::from(-d2b), zero],
            ),
            TestKind::Vertical => ([zero, zero, Complex64::from(b)], [zero, zero, Complex64::from(db)]),
        };
        let grad = [
            dphi[0],
            dphi[1],
            dphi[2],
            (ik * phi[0] - phi[1]) / r,
            (ik * phi[1] + phi[0]) / r,
            ik * phi[2] / r,
        ];
        (phi, grad)
    }
}

/// Supports near `[1.5, 4]`, `[3, 10]`, `[8, 30]` and `[20, 80]` snapped to
/// panel endpoints of `grid`, each with modes `0..=max_k` of both kinds.
///
/// Building the suite on the coarsest grid of a refinement ladder keeps the
/// supports on panel endpoints of every finer level.
pub fn standard_suite(grid: &RadialGrid, max_k: i32) -> Vec<TestFunction> {
    let ends: Vec<f64> = grid
        .panels()
        .iter()
        .map(|p| p.a)
        .chain(std::iter::once(grid.r_max()))
        .collect();
    let snap = |x: f64| {
        *ends
            .iter()
            .min_by(|p, q| (p.ln() - x.ln()).abs().total_cmp(&(q.ln() - x.ln()).abs()))
            .unwrap()
    };
    let mut supports: Vec<[f64; 2]> = Vec::new();
    for (lo, hi) in [(1.5, 4.0), (3.0, 10.0), (8.0, 30.0), (20.0, 80.0)] {
        let s = [snap(lo), snap(hi)];
        if s[1] > s[0] && s[1] <= grid.r_max() && !supports.contains(&s) {
            supports.push(s);
        }
    }
    let mut suite = Vec::new();
    for support in supports {
        for k in 0..=max_k.max(0) {
            for kind in [TestKind::Horizontal, TestKind::Vertical] {
                suite.push(TestFunction { kind, k, support });
            }
        }
    }
    suite
}

fn is_endpoint(grid: &RadialGrid, r: f64) -> bool {
    let tol = 1e-12 * r;
    (r - grid.r_max()).abs() <= tol || grid.panels().iter().any(|p| (p.a - r).abs() <= tol)
}

fn check_support(grid: &RadialGrid, t: &TestFunction) -> Result<()> {
    let [lo, hi] = t.support;
    let fail = |reason: &str| {
        Err(Error::TestSupport {
            lo,
            hi,
            reason: reason.into(),
        })
    };
    if !(lo >= 1.0 && hi <= grid.r_max() && hi > lo) {
        return fail(&format!("leaves the domain [1, {}]", grid.r_max()));
    }
    if !is_endpoint(grid, lo) || !is_endpoint(grid, hi) {
        return fail("ends must be panel endpoints");
    }
    Ok(())
}

/// Mismatch of one test function and its Cauchy–Schwarz bound
/// `‖∇φ‖(‖∇u_k‖ + ‖(u⊗u)_k‖ + ‖F_k‖) + ‖φ‖‖g_k‖`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TestResidual {
    pub test: TestFunction,
    pub mismatch: f64,
    pub bound: f64,
}

impl TestResidual {
    pub fn normalized(&self) -> f64 {
        if self.bound > 0.0 {
            self.mismatch / self.bound
        } else {
            self.mismatch
        }
    }
}

/// Per-test mismatches for `u = V + v` with forcing `(g, F)`.
pub fn weak_ns_report(
    grid: &RadialGrid,
    params: &HamelParameters,
    v: &VelocityField,
    forcing: &ForcingSpec,
    suite: &[TestFunction],
) -> Result<Vec<TestResidual>> {
    if v.cutoff() != forcing.cutoff() {
        return Err(Error::CutoffMismatch(v.cutoff(), forcing.cutoff()));
    }
    for t in suite {
        check_support(grid, t)?;
        if t.k.unsigned_abs() as usize > v.cutoff() {
            return Err(Error::ModeMismatch {
                expected: format!("|k| <= {}", v.cutoff()),
                got: t.k,
            });
        }
    }
    let radii = grid.r_nodes();
    let weights = grid.quadrature_weights();
    let cutoff = v.cutoff() as i32;
    let grads: Vec<_> = v.modes().par_iter().map(|m| m.gradient(radii)).collect();

    suite
        .par_iter()
        .map(|t| {
            let [lo, hi] = t.support;
            let mut total = Complex64::new(0.0, 0.0);
            let mut n_phi = 0.0;
            let mut n_dphi = 0.0;
            let mut n_du = 0.0;
            let mut n_uu = 0.0;
            let mut n_f = 0.0;
            let mut n_g = 0.0;
            let fk = forcing.mode(t.k).unwrap();
            for (idx, (&r, &w)) in radii.iter().zip(weights).enumerate() {
                if w == 0.0 || r < lo || r > hi {
                    continue;
                }
                let (phi, gphi) = t.eval(r);
                let u_at = |n: i32| -> [Complex64; 3] {
                    let m = v.mode(n).unwrap();
                    let mut out = [0, 1, 2].map(|c| m.v[c].values[idx]);
                    if n == 0 {
                        out[0] += -params.gamma / r;
                        out[1] += params.alpha / r;
                    }
                    out
                };
                let mut du = [0, 1, 2, 3, 4, 5].map(|e| grads[(t.k + cutoff) as usize][e].values[idx]);
                if t.k == 0 {
                    let (g, a) = (params.gamma, params.alpha);
                    let r2 = r * r;
                    du[0] += g / r2;
                    du[1] += -a / r2;
                    du[3] += -a / r2;
                    du[4] += -g / r2;
                }
                let mut uu = [Complex64::new(0.0, 0.0); 6];
                for m in (t.k - cutoff).max(-cutoff)..=(t.k + cutoff).min(cutoff) {
                    let (p, q) = (u_at(m), u_at(t.k - m));
                    for (s, &(a, b)) in SLOTS.iter().enumerate() {
                        uu[s] += p[a] * q[b];
                    }
                }
                let ff = SLOTS.map(|(a, b)| fk.f[forcing_slot(a, b)].values[idx]);
                let gg = [0, 1, 2].map(|c| fk.g[c].values[idx]);

                let mut integrand = Complex64::new(0.0, 0.0);
                for s in 0..6 {
                    integrand += (du[s] - uu[s] + ff[s]) * gphi[s].conj();
                }
                for c in 0..3 {
                    integrand -= gg[c] * phi[c].conj();
                }
                let wr = w * r;
                total += integrand * wr;
                let sq = |z: &[Complex64]| z.iter().map(|x| x.norm_sqr()).sum::<f64>() * wr;
                n_phi += sq(&phi);
                n_dphi += sq(&gphi);
                n_du += sq(&du);
                n_uu += sq(&uu);
                n_f += sq(&ff);
                n_g += sq(&gg);
            }
            let bound = TAU * (n_dphi.sqrt() * (n_du.sqrt() + n_uu.sqrt() + n_f.sqrt()) + n_phi.sqrt() * n_g.sqrt());
            Ok(TestResidual {
                test: *t,
                mismatch: TAU * total.norm(),
                bound,
            })
        })
        .collect()
}

/// Largest normalized mismatch over `suite`.
pub fn weak_ns_residual(
    grid: &RadialGrid,
    params: &HamelParameters,
    v: &VelocityField,
    forcing: &ForcingSpec,
    suite: &[TestFunction],
) -> Result<f64> {
    Ok(weak_ns_report(grid, params, v, forcing, suite)?
        .iter()
        .map(TestResidual::normalized)
        .fold(0.0, f64::max))
}
