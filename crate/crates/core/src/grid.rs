//! Radial discretisation of `[1, R_max]`.
//!
//! Panel endpoints are logarithmically spaced, optionally with the first
//! panel graded geometrically toward the boundary; each panel carries an
//! affine-mapped Gauss-Legendre rule. Profiles are stored at the panel
//! endpoints and the Gauss nodes, so the node list starts at `r = 1` and ends
//! at `R_max`. Within a panel the stored values are interpolated by the
//! polynomial through all `order + 2` points of the panel.
//!
//! The Green's-function integrals
//!
//! ```text
//! inner(a, h)(r) = r^{-a} ∫_1^r s^a h(s) ds
//! outer(b, h)(r) = r^{b}  ∫_r^∞ s^{-b} h(s) ds
//! ```
//!
//! are accumulated node to node with the scaled kernels `(s/r)^a` and `(r/s)^b`,
//! which never overflow even for the large exponents of high Fourier modes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{log_power_antiderivative, Component, Envelope, ModeProfile, Tail, TailTerm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailPolicy {
    /// Integrate beyond `R_max` in closed form using the profile envelope.
    AnalyticPowerLaw,
    /// Drop everything beyond `R_max`.
    Truncate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub panels: usize,
    pub gauss_order: usize,
    pub r_max: f64,
    pub tail_policy: TailPolicy,
    /// Extra panels grading the first panel geometrically toward `r = 1`,
    /// each halving the distance to the boundary.
    #[serde(default)]
    pub boundary_levels: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            panels: 64,
            gauss_order: 8,
            r_max: 1.0e3,
            tail_policy: TailPolicy::AnalyticPowerLaw,
            boundary_levels: 0,
        }
    }
}

impl GridConfig {
    pub fn with_panels(mut self, panels: usize) -> Self {
        self.panels = panels;
        self
    }

    pub fn with_r_max(mut self, r_max: f64) -> Self {
        self.r_max = r_max;
        self
    }

    pub fn with_boundary_levels(mut self, levels: usize) -> Self {
        self.boundary_levels = levels;
        self
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// One panel `[a, b]` with its affine Gauss rule.
#[derive(Debug, Clone)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Index of `a` in the grid node list; the panel owns indices
    /// `first..=first + order + 1`.
    first: usize,
    /// Local coordinates in `[-1, 1]` of all interpolation points.
    local: Vec<f64>,
    bary: Vec<f64>,
}

impl Panel {
    fn to_local(&self, r: f64) -> f64 {
        (2.0 * r - self.a - self.b) / (self.b - self.a)
    }

    /// Lagrange basis values at `r` over the panel's interpolation points.
    fn basis(&self, r: f64) -> Vec<f64> {
        let x = self.to_local(r);
        let mut out = vec![0.0; self.local.len()];
        for (i, &xi) in self.local.iter().enumerate() {
            if x == xi {
                out[i] = 1.0;
                return out;
            }
        }
        let mut denom = 0.0;
        for (i, (&xi, &wi)) in self.local.iter().zip(&self.bary).enumerate() {
            let t = wi / (x - xi);
            out[i] = t;
            denom += t;
        }
        for v in &mut out {
            *v /= denom;
        }
        out
    }
}

#[derive(Debug, Clone)]
struct Segment {
    panel: usize,
    ln_points: Vec<f64>,
    weights: Vec<f64>,
    /// Row-major `ln_points.len() × (order + 2)` interpolation matrix.
    interp: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RadialGrid {
    config: GridConfig,
    r_nodes: Vec<f64>,
    ln_r: Vec<f64>,
    panels: Vec<Panel>,
    quad_weights: Vec<f64>,
    segments: Vec<Segment>,
}

impl RadialGrid {
    pub fn new(config: GridConfig) -> Result<Self> {
        if config.panels == 0 {
            return Err(Error::InvalidGrid("need at least one panel".into()));
        }
        if config.gauss_order == 0 {
            return Err(Error::InvalidGrid("gauss_order must be positive".into()));
        }
        if !(config.r_max > 1.0) || !config.r_max.is_finite() {
            return Err(Error::InvalidGrid(format!("R_max = {} must exceed 1", config.r_max)));
        }
        let m = config.gauss_order;
        let (gx, gw) = gauss_legendre(m);
        let ln_rmax = config.r_max.ln();
        let mut endpoints: Vec<f64> = (0..=config.panels)
            .map(|k| {
                if k == 0 {
                    1.0
                } else if k == config.panels {
                    config.r_max
                } else {
                    (ln_rmax * k as f64 / config.panels as f64).exp()
                }
            })
            .collect();
        let first = endpoints[1] - 1.0;
        let graded = (1..=config.boundary_levels).rev().map(|j| 1.0 + first * 0.5f64.powi(j as i32));
        endpoints.splice(1..1, graded);
        let panel_count = endpoints.len() - 1;

        let mut local = Vec::with_capacity(m + 2);
        local.push(-1.0);
        local.extend_from_slice(&gx);
        local.push(1.0);
        let bary: Vec<f64> = (0..local.len())
            .map(|i| {
                let prod: f64 = (0..local.len())
                    .filter(|&j| j != i)
                    .map(|j| local[i] - local[j])
                    .product();
                1.0 / prod
            })
            .collect();

        let mut r_nodes = Vec::with_capacity(panel_count * (m + 1) + 1);
        let mut quad_weights = Vec::with_capacity(r_nodes.capacity());
        let mut panels = Vec::with_capacity(panel_count);
        for k in 0..panel_count {
            let (a, b) = (endpoints[k], endpoints[k + 1]);
            let half = 0.5 * (b - a);
            let nodes: Vec<f64> = gx.iter().map(|&x| a + half * (x + 1.0)).collect();
            let weights: Vec<f64> = gw.iter().map(|&w| w * half).collect();
            let first = r_nodes.len();
            r_nodes.push(a);
            quad_weights.push(0.0);
            r_nodes.extend_from_slice(&nodes);
            quad_weights.extend_from_slice(&weights);
            panels.push(Panel {
                a,
                b,
                nodes,
                weights,
                first,
                local: local.clone(),
                bary: bary.clone(),
            });
        }
        r_nodes.push(config.r_max);
        quad_weights.push(0.0);

        let seg_order = m.max(8);
        let (sx, sw) = gauss_legendre(seg_order);
        let mut segments = Vec::with_capacity(r_nodes.len() - 1);
        for (pi, panel) in panels.iter().enumerate() {
            for j in 0..=m {
                let lo = r_nodes[panel.first + j];
                let hi = r_nodes[panel.first + j + 1];
                let half = 0.5 * (hi - lo);
                let points: Vec<f64> = sx.iter().map(|&x| lo + half * (x + 1.0)).collect();
                let weights: Vec<f64> = sw.iter().map(|&w| w * half).collect();
                let interp = points.iter().flat_map(|&s| panel.basis(s)).collect();
                segments.push(Segment {
                    panel: pi,
                    ln_points: points.iter().map(|s| s.ln()).collect(),
                    weights,
                    interp,
                });
            }
        }

        let ln_r = r_nodes.iter().map(|r| r.ln()).collect();
        Ok(Self {
            config,
            r_nodes,
            ln_r,
            panels,
            quad_weights,
            segments,
        })
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    pub fn r_max(&self) -> f64 {
        self.config.r_max
    }

    pub fn tail_policy(&self) -> TailPolicy {
        self.config.tail_policy
    }

    pub fn r_nodes(&self) -> &[f64] {
        &self.r_nodes
    }

    pub fn len(&self) -> usize {
        self.r_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_nodes.is_empty()
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    /// Gauss weights per node (zero at panel endpoints).
    pub fn quadrature_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    /// Samples `f` at every node.
    pub fn sample(
        &self,
        mode: i32,
        component: Component,
        envelope: Envelope,
        f: impl Fn(f64) -> Complex64,
    ) -> ModeProfile {
        let p = ModeProfile::from_fn(&self.r_nodes, mode, component, envelope, f);
        let tail = p.effective_tail(self.r_max());
        p.with_tail(tail)
    }

    /// `r^k` for complex `k`, envelope `Re k`.
    pub fn power(&self, k: Complex64, mode: i32) -> ModeProfile {
        let values = self.ln_r.iter().map(|&l| (k * l).exp()).collect();
        ModeProfile::new(values, mode, Component::Scalar, Envelope::Power(k.re))
            .with_tail(Tail::powers(self.r_max(), &[(Complex64::new(1.0, 0.0), k)]))
    }

    pub fn zeros(&self, mode: i32, component: Component) -> ModeProfile {
        ModeProfile::zeros(self.len(), mode, component)
    }

    pub fn check(&self, p: &ModeProfile) -> Result<()> {
        if p.is_empty() {
            return Err(Error::NoData);
        }
        if p.len() != self.len() {
            return Err(Error::GridMismatch {
                expected: self.len(),
                got: p.len(),
            });
        }
        Ok(())
    }

    /// Gauss-rule integral `∫_1^{R_max} h(r) dr` of node data.
    pub fn quadrature(&self, h: &[Complex64]) -> Complex64 {
        h.iter().zip(&self.quad_weights).map(|(v, w)| v * *w).sum()
    }

    fn panel_index(&self, r: f64) -> usize {
        match self
            .panels
            .binary_search_by(|p| p.b.partial_cmp(&r).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(i) => i,
            Err(i) => i.min(self.panels.len() - 1),
        }
    }

    /// Evaluates a profile at an arbitrary radius by panel interpolation;
    /// beyond `R_max` the envelope is used.
    pub fn interpolate(&self, p: &ModeProfile, r: f64) -> Result<Complex64> {
        self.check(p)?;
        if r < 1.0 {
            return Err(Error::Domain(r));
        }
        if r > self.r_max() {
            return Ok(p.far_value(r, self.r_max()));
        }
        let panel = &self.panels[self.panel_index(r)];
        let basis = panel.basis(r);
        Ok(basis
            .iter()
            .enumerate()
            .map(|(i, &l)| p.values[panel.first + i] * l)
            .sum())
    }

    /// Integrand values at the segment quadrature points.
    fn fine_values(&self, h: &ModeProfile) -> Vec<Vec<Complex64>> {
        let width = self.config.gauss_order + 2;
        self.segments
            .iter()
            .map(|seg| {
                let first = self.panels[seg.panel].first;
                let local = &h.values[first..first + width];
                seg.interp
                    .chunks_exact(width)
                    .map(|row| row.iter().zip(local).map(|(l, v)| v * *l).sum())
                    .collect()
            })
            .collect()
    }

    /// `r^{-a} ∫_1^r s^a h(s) ds` at every node.
    pub fn inner(&self, a: Complex64, h: &ModeProfile) -> ModeProfile {
        let n = self.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        if h.is_zero() {
            return ModeProfile::new(out, h.mode, Component::Scalar, Envelope::Zero);
        }
        let fine = self.fine_values(h);
        for (k, seg) in self.segments.iter().enumerate() {
            let ln_hi = self.ln_r[k + 1];
            let carry = (a * (self.ln_r[k] - ln_hi)).exp();
            let mut acc = out[k] * carry;
            for ((&w, &ls), &hv) in seg.weights.iter().zip(&seg.ln_points).zip(&fine[k]) {
                acc += (a * (ls - ln_hi)).exp() * hv * w;
            }
            out[k + 1] = acc;
        }
        // Beyond R: r^{-a} [I(R) + A(r) − A(R)] with A an antiderivative of s^a h.
        let r_max = self.r_max();
        let ht = h.effective_tail(r_max);
        let mut k_hom = out[n - 1] * (a * r_max.ln()).exp();
        let mut terms = Vec::with_capacity(2 * ht.terms.len() + 1);
        for t in &ht.terms {
            for anti in log_power_antiderivative(t.c, a + t.e + 1.0, t.j) {
                k_hom -= anti.eval(r_max);
                terms.push(TailTerm { e: anti.e - a, ..anti });
            }
        }
        terms.push(TailTerm::power(k_hom, -a));
        ModeProfile::new(out, h.mode, Component::Scalar, Envelope::Zero).with_tail(Tail::new(r_max, terms))
    }

    /// `r^{b} ∫_r^∞ s^{-b} h(s) ds` at every node, tail included per policy.
    pub fn outer(&self, b: Complex64, h: &ModeProfile) -> Result<ModeProfile> {
        let n = self.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        if h.is_zero() {
            return Ok(ModeProfile::new(out, h.mode, Component::Scalar, Envelope::Zero));
        }
        let r_max = self.r_max();
        let mut tail_terms = Vec::new();
        if self.config.tail_policy == TailPolicy::AnalyticPowerLaw {
            for t in &h.effective_tail(r_max).terms {
                if -b.re + t.e.re >= -1.0 {
                    return Err(Error::NonIntegrableTail {
                        kernel: -b.re,
                        envelope: t.e.re,
                    });
                }
                // r^b ∫_r^∞ s^{e-b} (ln s)^j ds = −r^b A(r)
                for anti in log_power_antiderivative(-t.c, t.e - b + 1.0, t.j) {
                    out[n - 1] += anti.eval(r_max) * (b * r_max.ln()).exp();
                    tail_terms.push(TailTerm { e: anti.e + b, ..anti });
                }
            }
        }
        let fine = self.fine_values(h);
        for k in (0..self.segments.len()).rev() {
            let seg = &self.segments[k];
            let ln_lo = self.ln_r[k];
            let carry = (b * (ln_lo - self.ln_r[k + 1])).exp();
            let mut acc = out[k + 1] * carry;
            for ((&w, &ls), &hv) in seg.weights.iter().zip(&seg.ln_points).zip(&fine[k]) {
                acc += (b * (ln_lo - ls)).exp() * hv * w;
            }
            out[k] = acc;
        }
        Ok(ModeProfile::new(out, h.mode, Component::Scalar, Envelope::Zero).with_tail(Tail::new(r_max, tail_terms)))
    }

    /// `∫_{lo}^{hi} s^a p(s) ds` for node data; `hi = None` means `∞`.
    pub fn integrate_weighted(&self, p: &ModeProfile, a: f64, lo: f64, hi: Option<f64>) -> Result<Complex64> {
        self.check(p)?;
        let tail = p.effective_tail(self.r_max());
        self.integrate_impl(|r| self.interpolate(p, r).unwrap_or_default(), &tail, a, lo, hi)
    }

    /// Same as [`integrate_weighted`](Self::integrate_weighted) for a callable
    /// integrand with declared envelope beyond `R_max`.
    pub fn integrate_weighted_fn(
        &self,
        f: impl Fn(f64) -> Complex64,
        envelope: Envelope,
        a: f64,
        lo: f64,
        hi: Option<f64>,
    ) -> Result<Complex64> {
        let r_max = self.r_max();
        let tail = match envelope {
            Envelope::Power(e) => Tail::powers(r_max, &[(f(r_max) * r_max.powf(-e), Complex64::new(e, 0.0))]),
            Envelope::Zero => Tail::default(),
        };
        self.integrate_impl(f, &tail, a, lo, hi)
    }

    fn integrate_impl(
        &self,
        f: impl Fn(f64) -> Complex64,
        tail: &Tail,
        a: f64,
        lo: f64,
        hi: Option<f64>,
    ) -> Result<Complex64> {
        if lo < 1.0 {
            return Err(Error::Domain(lo));
        }
        let r_max = self.r_max();
        let (gx, gw) = gauss_legendre(2 * (self.config.gauss_order + 2));
        let upper = hi.unwrap_or(f64::INFINITY);
        if upper <= lo {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let mut total = Complex64::new(0.0, 0.0);
        for panel in &self.panels {
            let x0 = panel.a.max(lo);
            let x1 = panel.b.min(upper);
            if x1 <= x0 {
                continue;
            }
            let half = 0.5 * (x1 - x0);
            for (&x, &w) in gx.iter().zip(&gw) {
                let s = x0 + half * (x + 1.0);
                total += f(s) * s.powf(a) * (w * half);
            }
        }
        if upper > r_max {
            let start = lo.max(r_max);
            if self.config.tail_policy == TailPolicy::AnalyticPowerLaw {
                for t in &tail.terms {
                    let d = t.e + (a + 1.0);
                    if upper.is_infinite() && d.re >= 0.0 {
                        return Err(Error::NonIntegrableTail { kernel: a, envelope: t.e.re });
                    }
                    for anti in log_power_antiderivative(t.c, d, t.j) {
                        let hi_val = if upper.is_infinite() { Complex64::new(0.0, 0.0) } else { anti.eval(upper) };
                        total += hi_val - anti.eval(start);
                    }
                }
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn gauss_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(8);
        let sum: f64 = w.iter().sum();
        assert_relative_eq!(sum, 2.0, epsilon = 1e-14);
        let i14: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert_relative_eq!(i14, 2.0 / 15.0, epsilon = 1e-14);
    }

    #[test]
    fn grid_invariants() {
        let grid = RadialGrid::new(GridConfig::default()).unwrap();
        let r = grid.r_nodes();
        assert_eq!(r[0], 1.0);
        assert_eq!(*r.last().unwrap(), 1e3);
        assert!(r.windows(2).all(|w| w[1] > w[0]));
        for p in grid.panels() {
            assert!(p.weights.iter().all(|&w| w > 0.0));
            let s: f64 = p.weights.iter().sum();
            assert_relative_eq!(s, p.b - p.a, max_relative = 1e-13);
        }
    }

    #[test]
    fn rejects_bad_config() {
        assert!(RadialGrid::new(GridConfig::default().with_r_max(1.0)).is_err());
        assert!(RadialGrid::new(GridConfig::default().with_panels(0)).is_err());
    }

    #[test]
    fn inner_and_outer_match_power_laws() {
        let grid = RadialGrid::new(GridConfig::default()).unwrap();
        // h = s^{-3}: inner(2, h) = r^{-2} ln r ; outer(1, h) = r ∫_r^∞ s^{-4} = r^{-2}/3
        let h = grid.sample(0, Component::Scalar, Envelope::Power(-3.0), |s| c(s.powi(-3)));
        let inn = grid.inner(c(2.0), &h);
        let out = grid.outer(c(1.0), &h).unwrap();
        for (i, &r) in grid.r_nodes().iter().enumerate() {
            let ei = r.powi(-2) * r.ln();
            let eo = r.powi(-2) / 3.0;
            assert!((inn.values[i].re - ei).abs() < 1e-12, "inner at {r}");
            assert!((out.values[i].re - eo).abs() < 1e-12 * eo.max(1e-12) + 1e-15, "outer at {r}");
        }
    }

    #[test]
    fn complex_exponent_kernels() {
        let grid = RadialGrid::new(GridConfig::default()).unwrap();
        let a = Complex64::new(4.0, 2.5);
        let h = grid.sample(1, Component::Scalar, Envelope::Power(-3.0), |s| c(s.powi(-3)));
        let inn = grid.inner(a, &h);
        let out = grid.outer(a, &h).unwrap();
        for (i, &r) in grid.r_nodes().iter().enumerate() {
            // ∫_1^r s^{a-3} = (r^{a-2} - 1)/(a-2)
            let k = a - 2.0;
            let lr = Complex64::new(r.ln(), 0.0);
            let ei = ((k * lr).exp() - 1.0) / k * (-a * lr).exp();
            // r^a ∫_r^∞ s^{-a-3} = r^{-2}/(a+2)
            let eo = c(r.powi(-2)) / (a + 2.0);
            assert!((inn.values[i] - ei).norm() < 1e-12);
            assert!((out.values[i] - eo).norm() < 1e-12 * eo.norm());
        }
    }

    #[test]
    fn divergent_tail_is_rejected() {
        let grid = RadialGrid::new(GridConfig::default()).unwrap();
        let h = grid.sample(0, Component::Scalar, Envelope::Power(-1.0), |s| c(1.0 / s));
        assert!(matches!(grid.outer(c(0.0), &h), Err(Error::NonIntegrableTail { .. })));
    }

    #[test]
    fn interpolation_is_accurate_between_nodes() {
        let grid = RadialGrid::new(GridConfig::default()).unwrap();
        let p = grid.sample(0, Component::R, Envelope::Power(-2.5), |s| c(s.powf(-2.5)));
        for &r in &[1.0, 1.03, 2.71, 17.3, 999.0, 2000.0] {
            let v = grid.interpolate(&p, r).unwrap();
            assert_relative_eq!(v.re, r.powf(-2.5), max_relative = 1e-11);
        }
        assert!(matches!(grid.interpolate(&p, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn boundary_grading_splits_first_panel() {
        let plain = RadialGrid::new(GridConfig::default().with_panels(8)).unwrap();
        let graded = RadialGrid::new(GridConfig::default().with_panels(8).with_boundary_levels(3)).unwrap();
        assert_eq!(graded.panels().len(), 11);
        let e1 = plain.panels()[0].b;
        let ends: Vec<f64> = graded.panels().iter().take(4).map(|p| p.b).collect();
        for (j, e) in ends.iter().enumerate() {
            let want = if j == 3 { e1 } else { 1.0 + (e1 - 1.0) * 0.5f64.powi(3 - j as i32) };
            assert!((e - want).abs() < 1e-15);
        }
        let h = graded.power(Complex64::new(-3.0, 0.0), 0);
        let total = graded.integrate_weighted(&h, 0.0, 1.0, None).unwrap();
        assert!((total.re - 0.5).abs() < 1e-8, "{total}");
    }
}
