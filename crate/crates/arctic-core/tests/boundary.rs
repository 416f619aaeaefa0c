//! Geometric invariants of the edge curve that tie the three independent
//! routes together: the closed edge formulas, the inverse critical-point
//! map evaluated just off the axis, and liquid membership via conjugate
//! roots.

use arctic_core::frontier::{
    assemble_boundary, classify_case, edge_point, edge_samples_csv, local_geometry, sample_edge,
    sample_edge_segments,
};
use arctic_core::presets::{preset, three_block_constants};
use arctic_core::saddle::{chi_eta_from_w, SaddleContext};
use arctic_core::RClass;
use num_complex::Complex64;

/// Interior parameter values for each bounded-or-clipped component of the
/// parameter set, skipping the point components.
fn interior_params(m: &arctic_core::Measure, per_component: usize) -> Vec<f64> {
    let (a, b) = (m.a(), m.b());
    let mut out = Vec::new();
    for comp in m.r_decomposition() {
        if comp.is_point() {
            continue;
        }
        let lo = comp.lo.max(a - 3.0);
        let hi = comp.hi.min(b + 3.0);
        for j in 1..=per_component {
            let t = lo + (hi - lo) * j as f64 / (per_component + 1) as f64;
            // Transform zeros split a gap into two components already, so
            // interior points are safe; still skip anything degenerate.
            if t.is_finite() {
                out.push(t);
            }
        }
    }
    out
}

#[test]
fn edge_points_agree_with_the_inverse_map_just_off_the_axis() {
    // The edge curve is the continuous limit of the inverse critical-point
    // map as the parameter approaches the real axis from above; at height
    // 1e-8 the two routes must agree to a few times that.
    for name in ["a", "b", "c", "d"] {
        let m = preset(name).unwrap().measure;
        for t in interior_params(&m, 3) {
            let closed = edge_point(&m, t).unwrap();
            let (chi, eta) = chi_eta_from_w(&m, Complex64::new(t, 1e-8)).unwrap();
            let dist = ((closed.0 - chi).powi(2) + (closed.1 - eta).powi(2)).sqrt();
            assert!(
                dist < 1e-5,
                "preset {name} at t={t}: closed {closed:?} vs limit ({chi}, {eta}), dist {dist:e}"
            );
        }
    }
}

#[test]
fn edge_samples_stay_inside_the_trapezoid() {
    for name in ["a", "b", "c", "d"] {
        let m = preset(name).unwrap().measure;
        let (a, b) = (m.a(), m.b());
        let samples = sample_edge(&m, 96);
        assert!(samples.len() >= 32, "preset {name}: only {} samples", samples.len());
        for s in &samples {
            assert!(
                (-1e-9..=1.0 + 1e-9).contains(&s.eta),
                "preset {name}: eta {} outside [0,1] at t={}",
                s.eta,
                s.t
            );
            assert!(
                s.chi >= a + 1.0 - s.eta - 1e-6 && s.chi <= b + 1e-6,
                "preset {name}: ({}, {}) outside the trapezoid at t={}",
                s.chi,
                s.eta,
                s.t
            );
        }
    }
}

#[test]
fn membership_flips_exactly_once_across_the_curve() {
    // Stepping off an edge point along the transverse frame direction must
    // land inside the liquid region on exactly one side.
    let m = preset("c").unwrap().measure;
    let mut decisive = 0;
    for s in sample_edge(&m, 64) {
        if s.multiplicity != 2 || s.eta < 0.05 || s.eta > 0.95 || s.a1.abs() < 1e-3 {
            continue;
        }
        let norm = (s.y_vec.0.powi(2) + s.y_vec.1.powi(2)).sqrt();
        let step = 1e-3;
        let mut inside = 0;
        let mut ok = true;
        for sign in [-1.0, 1.0] {
            let chi = s.chi + sign * step * s.y_vec.0 / norm;
            let eta = s.eta + sign * step * s.y_vec.1 / norm;
            match SaddleContext::new(&m, chi, eta).map(|ctx| ctx.liquid_membership()) {
                Ok(Ok((is_inside, _))) => {
                    if is_inside {
                        inside += 1;
                    }
                }
                _ => ok = false,
            }
        }
        if ok {
            assert_eq!(
                inside, 1,
                "at t={} the curve point ({}, {}) has {inside} liquid sides",
                s.t, s.chi, s.eta
            );
            decisive += 1;
        }
    }
    assert!(decisive >= 12, "only {decisive} decisive membership probes");
}

#[test]
fn arcs_bend_the_same_way_everywhere() {
    // Along every smooth arc, ordered by parameter, consecutive secants
    // turn clockwise; this is the discrete version of the curvature-sign
    // statement behind the case table.
    for name in ["a", "c"] {
        let m = preset(name).unwrap().measure;
        for segment in sample_edge_segments(&m, 128) {
            if segment.len() < 3 || !matches!(segment[0].component, RClass::Gap | RClass::Plateau) {
                continue;
            }
            for w in segment.windows(3) {
                let d1 = (w[1].chi - w[0].chi, w[1].eta - w[0].eta);
                let d2 = (w[2].chi - w[1].chi, w[2].eta - w[1].eta);
                let cross = d1.0 * d2.1 - d1.1 * d2.0;
                let scale = (d1.0.hypot(d1.1)) * (d2.0.hypot(d2.1));
                assert!(
                    cross <= 1e-9 * (1.0 + scale),
                    "preset {name}: secants turn the wrong way near t={} (cross {cross:e})",
                    w[1].t
                );
            }
        }
    }
}

#[test]
fn separated_blocks_classify_both_flat_tops() {
    let m = preset("b").unwrap().measure;
    let assembly = assemble_boundary(&m, 128);
    assert!(assembly.complete);
    assert!(assembly.probe_points.is_empty());
    assert_eq!(assembly.flat_segments.len(), 2);
    let spans: Vec<(f64, f64)> =
        assembly.flat_segments.iter().map(|iv| (iv.lo, iv.hi)).collect();
    assert!((spans[0].0 - 0.0).abs() < 1e-9 && (spans[0].1 - 1.0).abs() < 1e-9);
    assert!((spans[1].0 - 2.0).abs() < 1e-9 && (spans[1].1 - 3.0).abs() < 1e-9);
}

#[test]
fn offset_third_block_turns_one_step_into_a_cusp() {
    let m = preset("d").unwrap().measure;
    let k = three_block_constants();
    assert_eq!(classify_case(&m, 4.0 / 3.0).unwrap(), (7, 2));
    assert_eq!(classify_case(&m, k.c).unwrap(), (8, 1));
    assert_eq!(classify_case(&m, k.c + 1.0 / 3.0).unwrap(), (6, 1));
    let cusp = local_geometry(&m, 4.0 / 3.0).unwrap();
    assert!(cusp.a1.abs() < 1e-6 && cusp.b1.abs() < 1e-6);
    assert!(cusp.a2.abs() > 1e-6 && cusp.b2.abs() > 1e-6);
}

#[test]
fn edge_csv_is_deterministic_and_ordered() {
    let m = preset("c").unwrap().measure;
    let first = edge_samples_csv(&sample_edge(&m, 96));
    let second = edge_samples_csv(&sample_edge(&m, 96));
    assert_eq!(first, second, "same inputs must serialize identically");
    let mut lines = first.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,chi,eta,component,case,multiplicity,x1,x2,y1,y2,a1,a2,b1,b2"
    );
    for segment in sample_edge_segments(&m, 96) {
        for w in segment.windows(2) {
            assert!(w[0].t <= w[1].t, "segment rows out of order at t={}", w[1].t);
        }
    }
}
