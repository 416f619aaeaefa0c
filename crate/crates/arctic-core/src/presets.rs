//! Six built-in density profiles with closed-form transforms, closed-form
//! edge curves, and labeled reference points, used for regression testing
//! and as ready-made CLI inputs.
//!
//! - `a`: constant density 1/2 on [-1, 1] (flat top over the whole support).
//! - `b`: density 1/2 on two separated blocks [0, 1] and [2, 3].
//! - `c`: two unit-density blocks [0, 1/2] and [1, 3/2]; the edge curve is a
//!   closed oval through five step/transform-zero points.
//! - `d`: three unit-density blocks [0, 1/3], [1, 4/3], [c, c+1/3] with the
//!   third offset chosen so a step point becomes a first-order cusp.
//! - `e`: hat density 1 - |x| on [-1, 1]; the density touches 0 and 1, so
//!   three flat points escape classification but probe to the flat value.
//! - `f`: quartic density (15/16)(x^2-1)^2 on [-1, 1]; two probe limits are
//!   genuinely off the flat top and the assembly stays incomplete.

use crate::measure::{DensityPiece, Measure};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("unknown preset name {0:?}; expected one of a, b, c, d, e, f")]
pub struct UnknownPreset(pub String);

/// How a labeled reference point is reproduced by the library.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expectation {
    /// Matched by `tangency_point`.
    Tangency,
    /// Matched by `edge_point(t)` and classified as `case`.
    Edge { t: f64, case: u8 },
    /// Matched only as the fitted limit of `boundary_probe(t, ..)`; the
    /// point resists the five flat-boundary conditions.
    FlatLimit { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialPoint {
    pub label: &'static str,
    pub chi: f64,
    pub eta: f64,
    pub expect: Expectation,
}

/// A named example profile with its independent closed forms.
pub struct Preset {
    pub name: &'static str,
    pub measure: Measure,
    /// Closed-form transform, valid off the real axis.
    pub closed_c: Option<fn(Complex64) -> Complex64>,
    /// Closed-form edge curve over the boundary parameter set.
    pub closed_edge: Option<fn(f64) -> (f64, f64)>,
    pub special_points: Vec<SpecialPoint>,
}

/// Constants of preset `d`: the block offset `c` (largest root of
/// 6c^2 - 23c + 13) and the two transform zeros `c2 < c1` (roots of
/// t^2 - (1 + 2c/3)t + (4/9)(c + 1/3)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeBlockConstants {
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
}

pub fn three_block_constants() -> ThreeBlockConstants {
    let c = (23.0 + 217.0f64.sqrt()) / 12.0;
    let mid = 0.5 + c / 3.0;
    let disc = (mid * mid - (4.0 / 9.0) * (c + 1.0 / 3.0)).sqrt();
    ThreeBlockConstants { c, c1: mid + disc, c2: mid - disc }
}

fn closed_c_a(w: Complex64) -> Complex64 {
    0.5 * ((w + 1.0).ln() - (w - 1.0).ln())
}

fn closed_c_b(w: Complex64) -> Complex64 {
    0.5 * (w.ln() - (w - 1.0).ln() + (w - 2.0).ln() - (w - 3.0).ln())
}

fn closed_c_c(w: Complex64) -> Complex64 {
    w.ln() - (w - 0.5).ln() + (w - 1.0).ln() - (w - 1.5).ln()
}

fn closed_c_d(w: Complex64) -> Complex64 {
    let c = three_block_constants().c;
    w.ln() - (w - 1.0 / 3.0).ln() + (w - 1.0).ln() - (w - 4.0 / 3.0).ln() + (w - c).ln()
        - (w - c - 1.0 / 3.0).ln()
}

fn closed_c_e(w: Complex64) -> Complex64 {
    (w + 1.0) * (w + 1.0).ln() - 2.0 * w * w.ln() + (w - 1.0) * (w - 1.0).ln()
}

fn closed_c_f(w: Complex64) -> Complex64 {
    let sq = w * w - 1.0;
    (15.0 / 16.0)
        * ((10.0 / 3.0) * w - 2.0 * w * w * w + sq * sq * ((w + 1.0).ln() - (w - 1.0).ln()))
}

fn closed_edge_a(t: f64) -> (f64, f64) {
    // exp(-C) = sqrt((t-1)/(t+1)); the ratio is positive on both gaps.
    let rho = ((t - 1.0) / (t + 1.0)).sqrt();
    let g = t * t - 1.0;
    (t - g * (1.0 - rho), 1.0 - g * (1.0 - rho) * (1.0 - rho) / rho)
}

fn closed_edge_b(t: f64) -> (f64, f64) {
    // exp(C) = sqrt(t(t-2) / ((t-1)(t-3))), positive on every component.
    let p0 = t * (t - 1.0);
    let p1 = (t - 2.0) * (t - 3.0);
    let sigma = ((t * (t - 2.0)) / ((t - 1.0) * (t - 3.0))).sqrt();
    let den = p0 + p1;
    (
        t - 2.0 * p0 * p1 * (sigma - 1.0) / (sigma * den),
        1.0 - 2.0 * p0 * p1 * (sigma - 1.0) * (sigma - 1.0) / (sigma * den),
    )
}

fn closed_edge_c(t: f64) -> (f64, f64) {
    let num = t * (t - 1.0) - (t - 0.5) * (t - 1.5);
    let den = (t - 1.0) * (t - 1.5) + t * (t - 0.5);
    (
        t - 2.0 * (t - 0.5) * (t - 1.5) * num / den,
        1.0 - 2.0 * num * num / den,
    )
}

fn closed_edge_d(t: f64) -> (f64, f64) {
    let c = three_block_constants().c;
    let a = t * t - (1.0 + 2.0 * c / 3.0) * t + (4.0 / 9.0) * (c + 1.0 / 3.0);
    let b = (t - 1.0) * (t - 4.0 / 3.0) * (t - c) * (t - c - 1.0 / 3.0)
        + t * (t - 1.0 / 3.0) * (t - c) * (t - c - 1.0 / 3.0)
        + t * (t - 1.0 / 3.0) * (t - 1.0) * (t - 4.0 / 3.0);
    (
        t - 3.0 * (t - 1.0 / 3.0) * (t - 4.0 / 3.0) * (t - c - 1.0 / 3.0) * a / b,
        1.0 - 3.0 * a * a / b,
    )
}

fn build(
    name: &'static str,
    pieces: Vec<DensityPiece>,
    closed_c: Option<fn(Complex64) -> Complex64>,
    closed_edge: Option<fn(f64) -> (f64, f64)>,
    special_points: Vec<SpecialPoint>,
) -> Preset {
    let measure = Measure::new(pieces).expect("preset density must validate");
    Preset { name, measure, closed_c, closed_edge, special_points }
}

fn sp(label: &'static str, chi: f64, eta: f64, expect: Expectation) -> SpecialPoint {
    SpecialPoint { label, chi, eta, expect }
}

/// Look up a preset by its one-letter name.
pub fn preset(name: &str) -> Result<Preset, UnknownPreset> {
    match name {
        "a" => Ok(build(
            "a",
            vec![DensityPiece::new(-1.0, 1.0, vec![0.5])],
            Some(closed_c_a),
            Some(closed_edge_a),
            vec![sp("p_0", 0.5, 0.0, Expectation::Tangency)],
        )),
        "b" => Ok(build(
            "b",
            vec![
                DensityPiece::new(0.0, 1.0, vec![0.5]),
                DensityPiece::new(2.0, 3.0, vec![0.5]),
            ],
            Some(closed_c_b),
            Some(closed_edge_b),
            vec![
                sp("p_0", 2.0, 0.0, Expectation::Tangency),
                sp("p_1", 1.5, 1.0, Expectation::Edge { t: 1.5, case: 5 }),
            ],
        )),
        "c" => Ok(build(
            "c",
            vec![
                DensityPiece::new(0.0, 0.5, vec![1.0]),
                DensityPiece::new(1.0, 1.5, vec![1.0]),
            ],
            Some(closed_c_c),
            Some(closed_edge_c),
            vec![
                sp("p_0", 1.25, 0.0, Expectation::Tangency),
                sp("p_1", 0.75, 0.25, Expectation::Edge { t: 0.0, case: 8 }),
                sp("p_2", 0.5, 0.75, Expectation::Edge { t: 0.5, case: 6 }),
                sp("p_3", 0.75, 1.0, Expectation::Edge { t: 0.75, case: 5 }),
                sp("p_4", 1.25, 0.75, Expectation::Edge { t: 1.0, case: 8 }),
                sp("p_5", 1.5, 0.25, Expectation::Edge { t: 1.5, case: 6 }),
            ],
        )),
        "d" => {
            let ThreeBlockConstants { c, c1, c2 } = three_block_constants();
            let gap7 = (c - 1.0 / 3.0) * (c - 4.0 / 3.0) / (3.0 * c * (c - 1.0));
            Ok(build(
                "d",
                vec![
                    DensityPiece::new(0.0, 1.0 / 3.0, vec![1.0]),
                    DensityPiece::new(1.0, 4.0 / 3.0, vec![1.0]),
                    DensityPiece::new(c, c + 1.0 / 3.0, vec![1.0]),
                ],
                Some(closed_c_d),
                Some(closed_edge_d),
                vec![
                    sp("p_0", 1.0 + c / 3.0, 0.0, Expectation::Tangency),
                    sp(
                        "p_1",
                        4.0 / 9.0 + 4.0 / (27.0 * c),
                        5.0 / 9.0 - 4.0 / (27.0 * c),
                        Expectation::Edge { t: 0.0, case: 8 },
                    ),
                    sp(
                        "p_2",
                        1.0 / 3.0,
                        7.0 / 9.0 + 2.0 / (27.0 * c),
                        Expectation::Edge { t: 1.0 / 3.0, case: 6 },
                    ),
                    sp("p_3", c2, 1.0, Expectation::Edge { t: c2, case: 5 }),
                    sp(
                        "p_4",
                        11.0 / 9.0 + 2.0 / (27.0 * (c - 1.0)),
                        7.0 / 9.0 - 2.0 / (27.0 * (c - 1.0)),
                        Expectation::Edge { t: 1.0, case: 8 },
                    ),
                    sp(
                        "p_5",
                        4.0 / 3.0,
                        5.0 / 9.0 + 4.0 / (27.0 * (c - 1.0)),
                        Expectation::Edge { t: 4.0 / 3.0, case: 7 },
                    ),
                    sp("p_6", c1, 1.0, Expectation::Edge { t: c1, case: 5 }),
                    sp("p_7", c + gap7, 1.0 - gap7, Expectation::Edge { t: c, case: 8 }),
                    sp(
                        "p_8",
                        c + 1.0 / 3.0,
                        1.0 - (c + 1.0 / 3.0) * (c - 2.0 / 3.0) / (3.0 * c * (c - 1.0)),
                        Expectation::Edge { t: c + 1.0 / 3.0, case: 6 },
                    ),
                ],
            ))
        }
        "e" => Ok(build(
            "e",
            vec![
                DensityPiece::new(-1.0, 0.0, vec![1.0, 1.0]),
                DensityPiece::new(0.0, 1.0, vec![1.0, -1.0]),
            ],
            Some(closed_c_e),
            None,
            vec![
                sp("p_0", 0.5, 0.0, Expectation::Tangency),
                sp("probe", -1.0, 1.0, Expectation::FlatLimit { t: -1.0 }),
                sp("probe", 0.0, 1.0, Expectation::FlatLimit { t: 0.0 }),
                sp("probe", 1.0, 1.0, Expectation::FlatLimit { t: 1.0 }),
            ],
        )),
        "f" => Ok(build(
            "f",
            vec![DensityPiece::new(
                -1.0,
                1.0,
                vec![15.0 / 16.0, 0.0, -15.0 / 8.0, 0.0, 15.0 / 16.0],
            )],
            Some(closed_c_f),
            None,
            vec![sp("p_0", 0.5, 0.0, Expectation::Tangency)],
        )),
        other => Err(UnknownPreset(other.to_string())),
    }
}

/// All preset names in order.
pub const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontier::{classify_case, edge_point, tangency_point};

    #[test]
    fn all_presets_load_and_validate() {
        for name in NAMES {
            let p = preset(name).unwrap();
            assert_eq!(p.name, name);
            assert!(!p.special_points.is_empty());
        }
        assert!(preset("z").is_err());
    }

    #[test]
    fn three_block_constants_satisfy_their_polynomials() {
        let ThreeBlockConstants { c, c1, c2 } = three_block_constants();
        assert!((6.0 * c * c - 23.0 * c + 13.0).abs() < 1e-12);
        for z in [c1, c2] {
            let a = z * z - (1.0 + 2.0 * c / 3.0) * z + (4.0 / 9.0) * (c + 1.0 / 3.0);
            assert!(a.abs() < 1e-12, "transform zero {z}");
        }
        assert!(c2 > 1.0 / 3.0 && c2 < 1.0);
        assert!(c1 > 4.0 / 3.0 && c1 < c);
    }

    #[test]
    fn closed_transforms_match_generic_evaluation() {
        for name in NAMES {
            let p = preset(name).unwrap();
            let cf = p.closed_c.unwrap();
            for k in 0..24 {
                let re = -2.0 + 7.0 * (k as f64) / 23.0;
                for im in [1e-3, 0.3, 2.0, -0.7] {
                    let w = Complex64::new(re, im);
                    let generic = p.measure.cauchy(w).unwrap();
                    let closed = cf(w);
                    let denom = 1.0 + closed.norm();
                    assert!(
                        (generic - closed).norm() / denom < 1e-9,
                        "{name}: w={w} generic={generic} closed={closed}"
                    );
                }
            }
        }
    }

    #[test]
    fn closed_edges_match_generic_evaluation() {
        for name in ["a", "b", "c", "d"] {
            let p = preset(name).unwrap();
            let ce = p.closed_edge.unwrap();
            for comp in p.measure.r_decomposition() {
                let (lo, hi) = (comp.lo.max(-4.0), comp.hi.min(8.0));
                for j in 0..12 {
                    let t = lo + (hi - lo) * (j as f64 + 0.5) / 12.0;
                    if p.measure.locate(t).is_none() {
                        continue;
                    }
                    let generic = edge_point(&p.measure, t).unwrap();
                    let closed = ce(t);
                    assert!(
                        (generic.0 - closed.0).abs() < 1e-9
                            && (generic.1 - closed.1).abs() < 1e-9,
                        "{name}: t={t} generic={generic:?} closed={closed:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn special_points_are_reproduced() {
        for name in NAMES {
            let p = preset(name).unwrap();
            for s in &p.special_points {
                match s.expect {
                    Expectation::Tangency => {
                        let (x, y) = tangency_point(&p.measure);
                        assert!(
                            (x - s.chi).abs() < 1e-9 && (y - s.eta).abs() < 1e-9,
                            "{name}/{}", s.label
                        );
                    }
                    Expectation::Edge { t, case } => {
                        let (x, y) = edge_point(&p.measure, t).unwrap();
                        assert!(
                            (x - s.chi).abs() < 1e-9 && (y - s.eta).abs() < 1e-9,
                            "{name}/{}: got ({x}, {y}), want ({}, {})",
                            s.label,
                            s.chi,
                            s.eta
                        );
                        let (got, _) = classify_case(&p.measure, t).unwrap();
                        assert_eq!(got, case, "{name}/{} case", s.label);
                    }
                    Expectation::FlatLimit { t } => {
                        assert_eq!(s.chi, t);
                        assert_eq!(s.eta, 1.0);
                    }
                }
            }
        }
    }

    #[test]
    fn export_round_trips() {
        for name in NAMES {
            let p = preset(name).unwrap();
            let text = p.measure.to_json();
            let back = Measure::from_json(&text).unwrap();
            assert_eq!(back.pieces(), p.measure.pieces(), "{name}");
        }
    }
}
