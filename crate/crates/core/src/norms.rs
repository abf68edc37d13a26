//! Weighted sup norms `‖f‖_{L^∞_s} = sup r^s |f(r)|` and their mode sums.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::ModeProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedNormReport {
    pub sup_norm_weighted: f64,
    pub achieving_radius: f64,
}

/// Max over nodes of `r^s |p(r)|` and the radius where it is attained.
pub fn weighted_sup_norm(radii: &[f64], p: &ModeProfile, s: f64) -> Result<WeightedNormReport> {
    if p.is_empty() || radii.is_empty() {
        return Err(Error::NoData);
    }
    if p.len() != radii.len() {
        return Err(Error::GridMismatch {
            expected: radii.len(),
            got: p.len(),
        });
    }
    let mut best = WeightedNormReport {
        sup_norm_weighted: 0.0,
        achieving_radius: radii[0],
    };
    for (v, &r) in p.values.iter().zip(radii) {
        let w = r.powf(s) * v.norm();
        if w > best.sup_norm_weighted {
            best = WeightedNormReport {
                sup_norm_weighted: w,
                achieving_radius: r,
            };
        }
    }
    Ok(best)
}

/// Component-wise max of the weighted sup norms of one mode.
pub fn mode_weighted_norm<'a>(
    radii: &[f64],
    components: impl IntoIterator<Item = &'a ModeProfile>,
    s: f64,
) -> Result<f64> {
    let mut m = 0.0f64;
    for p in components {
        m = m.max(weighted_sup_norm(radii, p, s)?.sup_norm_weighted);
    }
    Ok(m)
}

/// `Σ_n max_component sup r^s |p_{n}|` over a mode-indexed family.
pub fn l1_weighted_norm<'a, I, C>(radii: &[f64], modes: I, s: f64) -> Result<f64>
where
    I: IntoIterator<Item = C>,
    C: IntoIterator<Item = &'a ModeProfile>,
{
    let mut total = 0.0;
    for comps in modes {
        total += mode_weighted_norm(radii, comps, s)?;
    }
    Ok(total)
}
