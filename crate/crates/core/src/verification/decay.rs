//! Least-squares decay rates on log-log axes.

use serde::Serialize;

use crate::error::{Error, Result};

/// Smallest admissible start of a fit window.
pub const MIN_FIT_RADIUS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub fit_window: [f64; 2],
    pub rms_residual: f64,
    pub points: usize,
}

/// `[10, R_max/3]`.
pub fn default_window(r_max: f64) -> [f64; 2] {
    [MIN_FIT_RADIUS, r_max / 3.0]
}

/// Fits `ln|m| = slope·ln r + intercept` over samples with `r` in the window.
pub fn fit_decay(radii: &[f64], magnitudes: &[f64], window: [f64; 2], r_max: f64) -> Result<DecayFit> {
    let [lo, hi] = window;
    if !(lo >= MIN_FIT_RADIUS) {
        return Err(Error::FitWindow {
            lo,
            hi,
            reason: "window must start at r >= 10".into(),
        });
    }
    if !(hi <= 0.5 * r_max) {
        return Err(Error::FitWindow {
            lo,
            hi,
            reason: "window must end at r <= R_max/2".into(),
        });
    }
    if !(hi > lo) {
        return Err(Error::FitWindow {
            lo,
            hi,
            reason: "empty window".into(),
        });
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&r, &m) in radii.iter().zip(magnitudes) {
        if r < lo || r > hi {
            continue;
        }
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::NonPositiveMagnitude { radius: r, value: m });
        }
        xs.push(r.ln());
        ys.push(m.ln());
    }
    if xs.len() < 2 {
        return Err(Error::FitWindow {
            lo,
            hi,
            reason: "fewer than two samples".into(),
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Ok(DecayFit {
        slope,
        intercept,
        fit_window: window,
        rms_residual: (rss / n).sqrt(),
        points: xs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radii() -> Vec<f64> {
        (0..400).map(|k| 10f64.powf(k as f64 * 3.0 / 399.0)).collect()
    }

    #[test]
    fn exact_power_law() {
        let r = radii();
        let m: Vec<f64> = r.iter().map(|x| x.powi(-2)).collect();
        let fit = fit_decay(&r, &m, [10.0, 300.0], 1000.0).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-10);
        assert!(fit.rms_residual < 1e-12);
        assert!(fit.intercept.abs() < 1e-9);
    }

    #[test]
    fn dominated_tail() {
        let r = radii();
        let m: Vec<f64> = r.iter().map(|x| x.powi(-2) + x.powi(-4)).collect();
        let fit = fit_decay(&r, &m, [10.0, 100.0], 1000.0).unwrap();
        assert!(fit.slope > -2.02 && fit.slope < -2.0, "{}", fit.slope);
    }

    #[test]
    fn mixed_sign_is_rejected() {
        let r = radii();
        let m: Vec<f64> = r.iter().map(|x| (x.ln() * 3.0).sin() / x).collect();
        assert!(matches!(
            fit_decay(&r, &m, [10.0, 300.0], 1000.0),
            Err(Error::NonPositiveMagnitude { .. })
        ));
    }

    #[test]
    fn window_limits() {
        let r = radii();
        let m: Vec<f64> = r.iter().map(|x| 1.0 / x).collect();
        assert!(fit_decay(&r, &m, [5.0, 300.0], 1000.0).is_err());
        assert!(fit_decay(&r, &m, [10.0, 600.0], 1000.0).is_err());
        assert_eq!(default_window(1000.0), [10.0, 1000.0 / 3.0]);
    }
}
