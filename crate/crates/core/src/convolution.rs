//! Mode convolution of `v ⊗ w` for truncated Fourier series.

use log::debug;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{VelocityField, TENSOR_COMPONENTS};
use crate::profile::{Component, Envelope, ModeProfile, Tail, TailTerm};

const LABELS: [Component; 9] = [
    Component::RR,
    Component::RTheta,
    Component::RAxial,
    Component::ThetaR,
    Component::ThetaTheta,
    Component::ThetaAxial,
    Component::AxialR,
    Component::AxialTheta,
    Component::AxialAxial,
];

/// All nine products `(v_a w_b)_n`, row-major in `(r, θ, 3)`.
#[derive(Debug, Clone)]
pub struct TensorModes {
    cutoff: usize,
    modes: Vec<[ModeProfile; 9]>,
}

impl TensorModes {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn mode(&self, n: i32) -> Option<&[ModeProfile; 9]> {
        if n.unsigned_abs() as usize > self.cutoff {
            return None;
        }
        self.modes.get((n + self.cutoff as i32) as usize)
    }

    pub fn component(&self, n: i32, a: usize, b: usize) -> Option<&ModeProfile> {
        self.mode(n).map(|m| &m[3 * a + b])
    }

    /// The entries that feed the divergence-form forcing, ordered as
    /// `rr, rθ, θr, θθ, r3, θ3`. The axial row only enters through
    /// `∂_3` and is discarded.
    pub fn divergence_block(&self, n: i32) -> Option<[ModeProfile; 6]> {
        let m = self.mode(n)?;
        let idx = [0, 1, 3, 4, 2, 5];
        Some(std::array::from_fn(|k| m[idx[k]].clone().with_component(TENSOR_COMPONENTS[k])))
    }
}

pub fn tensor_convolution(v: &VelocityField, w: &VelocityField) -> Result<TensorModes> {
    if v.cutoff() != w.cutoff() {
        return Err(Error::CutoffMismatch(v.cutoff(), w.cutoff()));
    }
    let cutoff = v.cutoff() as i32;
    let len = v.modes()[0].v[0].len();
    if w.modes()[0].v[0].len() != len {
        return Err(Error::GridMismatch {
            expected: len,
            got: w.modes()[0].v[0].len(),
        });
    }
    let modes = (-cutoff..=cutoff)
        .into_par_iter()
        .map(|n| {
            std::array::from_fn(|ab| {
                let (a, b) = (ab / 3, ab % 3);
                let mut values = vec![Complex64::new(0.0, 0.0); len];
                let mut envelope = Envelope::Zero;
                let mut tail: Option<Vec<TailTerm>> = Some(Vec::new());
                let mut r_max = 0.0f64;
                let lo = (n - cutoff).max(-cutoff);
                let hi = (n + cutoff).min(cutoff);
                for m in lo..=hi {
                    let p = &v.mode(m).unwrap().v[a];
                    let q = &w.mode(n - m).unwrap().v[b];
                    if p.is_zero() || q.is_zero() {
                        continue;
                    }
                    for ((o, x), y) in values.iter_mut().zip(&p.values).zip(&q.values) {
                        *o += x * y;
                    }
                    envelope = envelope.max(p.envelope.product(q.envelope));
                    tail = match (tail, &p.tail, &q.tail) {
                        (Some(mut acc), Some(x), Some(y)) => {
                            Tail::push_product(&mut acc, x, y);
                            r_max = r_max.max(x.r_max).max(y.r_max);
                            Some(acc)
                        }
                        _ => None,
                    };
                }
                let out = ModeProfile::new(values, n, LABELS[ab], envelope);
                match tail {
                    Some(t) => out.with_tail(Tail::new(r_max, t)),
                    None => out,
                }
            })
        })
        .collect();
    debug!("tensor convolution: axial row (3r, 3θ, 33) computed and dropped, data is z-independent");
    Ok(TensorModes {
        cutoff: v.cutoff(),
        modes,
    })
}
