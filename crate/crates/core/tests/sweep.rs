use cylflow::background::HamelParameters;
use cylflow::grid::{GridConfig, RadialGrid};
use cylflow::verification::sweep::{
    mode_points, power_envelope_probes, gain_sweep, SweepKind, SweepPoint,
};

fn grid() -> RadialGrid {
    RadialGrid::new(GridConfig::default().with_boundary_levels(4)).unwrap()
}

const KINDS: [SweepKind; 3] = [
    SweepKind::Horizontal,
    SweepKind::VerticalPointwise,
    SweepKind::VerticalDivergence,
];

#[test]
fn normalized_gains_stay_below_one_constant() {
    let g = grid();
    let mut points = Vec::new();
    for alpha in [-10.0, 0.0, 1.0, 10.0] {
        for gamma in [2.5, 4.0, 6.0] {
            for rho in [2.2, 2.5, 2.8] {
                let Ok(params) = HamelParameters::new(alpha, gamma, rho) else { continue };
                for kind in KINDS {
                    points.extend(mode_points(params, kind, 64));
                }
            }
        }
    }
    let rep = gain_sweep(&g, &points, power_envelope_probes).unwrap();
    assert_eq!(rep.excluded, 0);
    assert!(rep.max_normalized < 2.5, "{}", rep.max_normalized);
    assert!(rep.min_normalized > 0.0);
    assert!(rep.l1_gain.is_finite() && rep.l1_gain > 0.0);
}

#[test]
fn axisymmetric_horizontal_across_gamma() {
    let g = grid();
    let points: Vec<SweepPoint> = [2.5, 3.0, 4.0, 6.0]
        .iter()
        .map(|&gamma| SweepPoint {
            params: HamelParameters::new(0.5, gamma, 2.4).unwrap(),
            n: 0,
            kind: SweepKind::Horizontal,
        })
        .collect();
    let rep = gain_sweep(&g, &points, power_envelope_probes).unwrap();
    assert_eq!(rep.rows.len(), 4);
    assert!(rep.spread < 5.0, "{}", rep.spread);
}

#[test]
fn vertical_pointwise_gain_decays_like_inverse_square() {
    let g = grid();
    let params = HamelParameters::new(1.0, 3.0, 2.5).unwrap();
    let points: Vec<SweepPoint> = (1..=64)
        .map(|n| SweepPoint {
            params,
            n,
            kind: SweepKind::VerticalPointwise,
        })
        .collect();
    let rep = gain_sweep(&g, &points, power_envelope_probes).unwrap();
    let tail: Vec<(f64, f64)> = rep
        .rows
        .iter()
        .filter(|r| r.point.n >= 8)
        .map(|r| ((r.point.n as f64).ln(), r.gain.ln()))
        .collect();
    let k = tail.len() as f64;
    let mx = tail.iter().map(|p| p.0).sum::<f64>() / k;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / k;
    let slope = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / tail.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 2.0).abs() < 0.2, "{slope}");
    assert!(rep.spread < 50.0);
}
