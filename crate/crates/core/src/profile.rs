//! Complex radial profiles of a single Fourier mode, sampled on the nodes of a
//! [`RadialGrid`](crate::grid::RadialGrid), together with their behaviour
//! beyond `R_max`: a decay envelope and, when known, an exact power-law tail.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Cylindrical component carried by a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    R,
    Theta,
    Axial,
    RR,
    RTheta,
    RAxial,
    ThetaR,
    ThetaTheta,
    ThetaAxial,
    AxialR,
    AxialTheta,
    AxialAxial,
    /// Scalar intermediates (vorticity, kernels, integrands).
    Scalar,
}

impl Component {
    pub fn label(self) -> &'static str {
        match self {
            Component::R => "r",
            Component::Theta => "theta",
            Component::Axial => "3",
            Component::RR => "rr",
            Component::RTheta => "rtheta",
            Component::RAxial => "r3",
            Component::ThetaR => "thetar",
            Component::ThetaTheta => "thetatheta",
            Component::ThetaAxial => "theta3",
            Component::AxialR => "3r",
            Component::AxialTheta => "3theta",
            Component::AxialAxial => "33",
            Component::Scalar => "scalar",
        }
    }
}

/// Far-field behaviour for `r >= R_max`.
///
/// `Power(e)` means the profile continues as `p(R_max) (r / R_max)^e`;
/// `Zero` means the profile vanishes identically beyond `R_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Envelope {
    Power(f64),
    Zero,
}

impl Envelope {
    /// Envelope of a sum: the slower decay wins.
    pub fn max(self, other: Envelope) -> Envelope {
        match (self, other) {
            (Envelope::Zero, e) | (e, Envelope::Zero) => e,
            (Envelope::Power(a), Envelope::Power(b)) => Envelope::Power(a.max(b)),
        }
    }

    /// Envelope of a pointwise product.
    pub fn product(self, other: Envelope) -> Envelope {
        match (self, other) {
            (Envelope::Power(a), Envelope::Power(b)) => Envelope::Power(a + b),
            _ => Envelope::Zero,
        }
    }

    /// Envelope after multiplication by `r^k`.
    pub fn shift(self, k: f64) -> Envelope {
        match self {
            Envelope::Power(a) => Envelope::Power(a + k),
            Envelope::Zero => Envelope::Zero,
        }
    }

    pub fn exponent(self) -> Option<f64> {
        match self {
            Envelope::Power(a) => Some(a),
            Envelope::Zero => None,
        }
    }
}

/// One term `c r^e (ln r)^j` of a [`Tail`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailTerm {
    pub c: Complex64,
    pub e: Complex64,
    pub j: u32,
}

impl TailTerm {
    pub fn power(c: Complex64, e: Complex64) -> Self {
        Self { c, e, j: 0 }
    }

    pub fn eval(&self, r: f64) -> Complex64 {
        let l = r.ln();
        self.c * (self.e * l).exp() * l.powi(self.j as i32)
    }
}

/// Exact continuation `Σ c_k r^{e_k} (ln r)^{j_k}` of a profile for
/// `r >= R_max`.
///
/// Sums of profiles with different decay rates keep every rate, so the
/// improper integrals of the representation formulas stay linear.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Tail {
    pub r_max: f64,
    pub terms: Vec<TailTerm>,
}

const TAIL_MERGE: f64 = 1e-9;
const TAIL_DROP: f64 = 1e-11;
const TAIL_MAX_TERMS: usize = 48;

/// `∫ s^{d-1} (ln s)^j ds` evaluated at `s`, as terms in `r = s`.
pub(crate) fn log_power_antiderivative(c: Complex64, d: Complex64, j: u32) -> Vec<TailTerm> {
    if d.norm() < 1e-12 {
        return vec![TailTerm {
            c: c / (j as f64 + 1.0),
            e: Complex64::new(0.0, 0.0),
            j: j + 1,
        }];
    }
    // s^d Σ_i (−1)^i j!/(j−i)! (ln s)^{j−i} / d^{i+1}
    let mut out = Vec::with_capacity(j as usize + 1);
    let mut falling = 1.0;
    let mut dpow = d;
    for i in 0..=j {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        out.push(TailTerm {
            c: c * sign * falling / dpow,
            e: d,
            j: j - i,
        });
        falling *= (j - i) as f64;
        dpow *= d;
    }
    out
}

impl Tail {
    pub fn new(r_max: f64, terms: Vec<TailTerm>) -> Self {
        Tail { r_max, terms }.simplified()
    }

    pub fn powers(r_max: f64, terms: &[(Complex64, Complex64)]) -> Self {
        Self::new(r_max, terms.iter().map(|&(c, e)| TailTerm::power(c, e)).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, r: f64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(r)).sum()
    }

    pub fn envelope(&self) -> Envelope {
        self.terms
            .iter()
            .fold(Envelope::Zero, |acc, t| acc.max(Envelope::Power(t.e.re)))
    }

    fn size(&self, t: &TailTerm) -> f64 {
        t.eval(self.r_max).norm()
    }

    /// Merges equal exponents and drops terms negligible at `R_max`.
    fn simplified(mut self) -> Self {
        let mut merged: BTreeMap<(u32, i64, i64), TailTerm> = BTreeMap::new();
        for t in &self.terms {
            if t.c.norm() == 0.0 {
                continue;
            }
            let key = (t.j, (t.e.re / TAIL_MERGE).round() as i64, (t.e.im / TAIL_MERGE).round() as i64);
            merged
                .entry(key)
                .and_modify(|m| m.c += t.c)
                .or_insert(*t);
        }
        let mut terms: Vec<TailTerm> = merged.into_values().collect();
        let size = terms.iter().map(|t| self.size(t)).fold(0.0, f64::max);
        terms.retain(|t| t.c.norm() != 0.0 && self.size(t) > TAIL_DROP * size);
        if terms.len() > TAIL_MAX_TERMS {
            terms.sort_by(|a, b| self.size(b).total_cmp(&self.size(a)));
            terms.truncate(TAIL_MAX_TERMS);
        }
        self.terms = terms;
        self
    }

    pub fn axpy(&self, c: Complex64, other: &Tail) -> Tail {
        let terms = self
            .terms
            .iter()
            .copied()
            .chain(other.terms.iter().map(|t| TailTerm { c: c * t.c, ..*t }))
            .collect();
        Tail::new(self.r_max.max(other.r_max), terms)
    }

    pub fn scale(&self, c: Complex64) -> Tail {
        Tail::new(self.r_max, self.terms.iter().map(|t| TailTerm { c: c * t.c, ..*t }).collect())
    }

    pub fn shift(&self, k: f64) -> Tail {
        Tail {
            r_max: self.r_max,
            terms: self.terms.iter().map(|t| TailTerm { e: t.e + k, ..*t }).collect(),
        }
    }

    pub fn conj(&self) -> Tail {
        Tail {
            r_max: self.r_max,
            terms: self
                .terms
                .iter()
                .map(|t| TailTerm {
                    c: t.c.conj(),
                    e: t.e.conj(),
                    j: t.j,
                })
                .collect(),
        }
    }

    pub fn product(&self, other: &Tail) -> Tail {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        Self::push_product(&mut terms, self, other);
        Tail::new(self.r_max.max(other.r_max), terms)
    }

    /// Appends the unsimplified terms of `a · b`.
    pub fn push_product(out: &mut Vec<TailTerm>, a: &Tail, b: &Tail) {
        for x in &a.terms {
            for y in &b.terms {
                out.push(TailTerm {
                    c: x.c * y.c,
                    e: x.e + y.e,
                    j: x.j + y.j,
                });
            }
        }
    }
}

/// Radial profile of one component at Fourier mode `mode`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeProfile {
    pub values: Vec<Complex64>,
    pub mode: i32,
    pub component: Component,
    pub envelope: Envelope,
    /// Continuation beyond `R_max`; `None` falls back to the envelope.
    pub tail: Option<Tail>,
}

impl ModeProfile {
    pub fn new(values: Vec<Complex64>, mode: i32, component: Component, envelope: Envelope) -> Self {
        let tail = (envelope == Envelope::Zero).then(Tail::default);
        Self {
            values,
            mode,
            component,
            envelope,
            tail,
        }
    }

    /// Attaches an exact continuation; the envelope follows from it.
    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.envelope = tail.envelope();
        self.tail = Some(tail);
        self
    }

    /// The exact continuation, when one is tracked.
    pub fn known_tail(&self) -> Option<Tail> {
        match (&self.tail, self.envelope) {
            (Some(t), _) => Some(t.clone()),
            (None, Envelope::Zero) => Some(Tail::default()),
            (None, _) => None,
        }
    }

    pub fn zeros(len: usize, mode: i32, component: Component) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); len], mode, component, Envelope::Zero)
    }

    /// Samples `f` at the given radii.
    pub fn from_fn(
        radii: &[f64],
        mode: i32,
        component: Component,
        envelope: Envelope,
        f: impl Fn(f64) -> Complex64,
    ) -> Self {
        Self::new(radii.iter().map(|&r| f(r)).collect(), mode, component, envelope)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    /// Value at `r >= R_max` from the continuation, or from the envelope
    /// anchored at the last node.
    pub fn far_value(&self, r: f64, r_max: f64) -> Complex64 {
        if let Some(t) = self.known_tail() {
            return t.eval(r);
        }
        match self.envelope {
            Envelope::Power(e) => self.values[self.len() - 1] * (r / r_max).powf(e),
            Envelope::Zero => Complex64::new(0.0, 0.0),
        }
    }

    /// Exact continuation if known, otherwise the single power law implied
    /// by the envelope and the last node value.
    pub fn effective_tail(&self, r_max: f64) -> Tail {
        if let Some(t) = self.known_tail() {
            return t;
        }
        match self.envelope {
            Envelope::Power(e) => Tail::powers(
                r_max,
                &[(self.values[self.len() - 1] * r_max.powf(-e), Complex64::new(e, 0.0))],
            ),
            Envelope::Zero => Tail::default(),
        }
    }

    pub fn with_component(mut self, component: Component) -> Self {
        self.component = component;
        self
    }

    pub fn with_mode(mut self, mode: i32) -> Self {
        self.mode = mode;
        self
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> ModeProfile {
        let values = self.values.iter().map(|v| v * c).collect();
        let envelope = if c == Complex64::new(0.0, 0.0) {
            Envelope::Zero
        } else {
            self.envelope
        };
        let tail = self.known_tail().map(|t| t.scale(c));
        self.rebuild(values, self.mode, self.component, envelope, tail)
    }

    fn rebuild(
        &self,
        values: Vec<Complex64>,
        mode: i32,
        component: Component,
        envelope: Envelope,
        tail: Option<Tail>,
    ) -> ModeProfile {
        let p = ModeProfile::new(values, mode, component, envelope);
        match tail {
            Some(t) => p.with_tail(t),
            None => p,
        }
    }

    pub fn scale_real(&self, c: f64) -> ModeProfile {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn conj(&self) -> ModeProfile {
        let values = self.values.iter().map(|v| v.conj()).collect();
        let tail = self.known_tail().map(|t| t.conj());
        self.rebuild(values, -self.mode, self.component, self.envelope, tail)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: Complex64, other: &ModeProfile) -> ModeProfile {
        debug_assert_eq!(self.len(), other.len());
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + c * b)
            .collect();
        let other_env = if c == Complex64::new(0.0, 0.0) {
            Envelope::Zero
        } else {
            other.envelope
        };
        let tail = match (self.known_tail(), other.known_tail()) {
            (Some(a), Some(b)) => Some(a.axpy(c, &b)),
            _ => None,
        };
        self.rebuild(values, self.mode, self.component, self.envelope.max(other_env), tail)
    }

    pub fn add(&self, other: &ModeProfile) -> ModeProfile {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &ModeProfile) -> ModeProfile {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    /// Multiplies by `r^k` sampled at `radii`.
    pub fn mul_rpow(&self, radii: &[f64], k: f64) -> ModeProfile {
        let values = self
            .values
            .iter()
            .zip(radii)
            .map(|(v, &r)| v * r.powf(k))
            .collect();
        let tail = self.known_tail().map(|t| t.shift(k));
        self.rebuild(values, self.mode, self.component, self.envelope.shift(k), tail)
    }

    /// Pointwise product; the mode of the result is the sum of modes.
    pub fn mul(&self, other: &ModeProfile) -> ModeProfile {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        let tail = match (self.known_tail(), other.known_tail()) {
            (Some(a), Some(b)) => Some(a.product(&b)),
            _ => None,
        };
        self.rebuild(
            values,
            self.mode + other.mode,
            Component::Scalar,
            self.envelope.product(other.envelope),
            tail,
        )
    }

    /// Linear combination `Σ c_k p_k`; all inputs must share the grid.
    pub fn combine(terms: &[(Complex64, &ModeProfile)]) -> ModeProfile {
        let (c0, p0) = terms[0];
        let mut acc = p0.scale(c0);
        for &(c, p) in &terms[1..] {
            acc = acc.axpy(c, p);
        }
        acc
    }
}
