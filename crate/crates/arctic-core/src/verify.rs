//! Fast cross-module invariant suites, runnable programmatically or through
//! the command-line `verify` verb, plus the saddle root-bound checker shared
//! with the heavier test targets.

use crate::combinatorics::{
    count_patterns, empirical_correlation, enumerate_patterns, sample_pattern, GTPattern, Site,
    TopRow,
};
use crate::frontier::{
    assemble_boundary, boundary_probe, classify_case, edge_point, tangency_point,
};
use crate::kernel::{correlation, kernel, kernel_contour, ContourParams};
use crate::measure::{Measure, RClass};
use crate::presets::{preset, Expectation, NAMES};
use crate::saddle::{chi_eta_from_w, RootRegion, SaddleContext, SaddleError};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Outcome of one named invariant check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub suite: &'static str,
    pub check: &'static str,
    pub passed: bool,
    /// Empty when passed; a short diagnosis otherwise.
    pub detail: String,
}

pub const SUITES: [&str; 6] =
    ["measure", "combinatorics", "kernel", "saddle", "frontier", "presets"];

/// Run one suite by name; `None` for an unknown name.
pub fn run_suite(name: &str, seed: u64) -> Option<Vec<CheckResult>> {
    match name {
        "measure" => Some(measure_suite()),
        "combinatorics" => Some(combinatorics_suite(seed)),
        "kernel" => Some(kernel_suite()),
        "saddle" => Some(saddle_suite(seed)),
        "frontier" => Some(frontier_suite()),
        "presets" => Some(presets_suite()),
        _ => None,
    }
}

/// Run every suite in order.
pub fn run_all(seed: u64) -> Vec<CheckResult> {
    SUITES.iter().flat_map(|s| run_suite(s, seed).unwrap()).collect()
}

fn record(
    out: &mut Vec<CheckResult>,
    suite: &'static str,
    check: &'static str,
    result: Result<(), String>,
) {
    match result {
        Ok(()) => out.push(CheckResult { suite, check, passed: true, detail: String::new() }),
        Err(detail) => out.push(CheckResult { suite, check, passed: false, detail }),
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Uniform points strictly inside the admissible trapezoid
/// `{0 < eta < 1, a + 1 - eta < chi < b}` of a profile, with a small guard
/// off every face.
pub fn random_trapezoid_points(m: &Measure, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let eta: f64 = rng.random_range(0.02..0.98);
        let lo = m.a() + 1.0 - eta;
        let hi = m.b();
        let margin = 0.02 * (hi - lo);
        let chi: f64 = rng.random_range(lo + margin..hi - margin);
        out.push((chi, eta));
    }
    out
}

/// Check the root-count bounds at one trapezoid point. Returns `None` when
/// every applicable bound holds, or a description of the first violation.
/// Counting is with multiplicity, and a root found in the upper half plane
/// stands for a conjugate pair (so contributes two non-real roots).
pub fn root_bound_violation(
    m: &Measure,
    chi: f64,
    eta: f64,
) -> Result<Option<String>, SaddleError> {
    let ctx = SaddleContext::new(m, chi, eta)?;
    let report = ctx.root_report()?;
    let sets = ctx.support_sets();

    let mut n_complex = 0usize;
    let mut tails = [0usize; 4];
    let mut inner: std::collections::BTreeMap<usize, usize> = Default::default();
    for r in &report.roots {
        let mult = r.multiplicity as usize;
        match r.region {
            RootRegion::UpperHalf => n_complex += 2 * mult,
            RootRegion::RightTail => tails[0] += mult,
            RootRegion::LeftTail => tails[1] += mult,
            RootRegion::UpperGap => tails[2] += mult,
            RootRegion::LowerGap => tails[3] += mult,
            RootRegion::InnerGap(k) => *inner.entry(k).or_default() += mult,
        }
    }
    let n_j: usize = tails.iter().sum();
    let exterior = n_complex + n_j;
    let occupied =
        usize::from(n_complex > 0) + tails.iter().filter(|&&c| c > 0).count();
    let k_heaviest = inner.values().copied().max().unwrap_or(0);
    let k_multi = inner.values().filter(|&&c| c >= 2).count();

    let middle_occupied = !sets.middle.is_empty();
    let mut violations: Vec<String> = Vec::new();
    if middle_occupied {
        if exterior > 2 {
            violations.push(format!("{exterior} roots outside the support components (max 2)"));
        }
        if occupied > 1 {
            violations.push(format!("roots occupy {occupied} exterior regions (max 1)"));
        }
        if k_heaviest > 3 {
            violations.push(format!("an interior gap holds {k_heaviest} roots (max 3)"));
        }
        if k_multi > 1 {
            violations.push(format!("{k_multi} interior gaps hold 2+ roots (max 1)"));
        }
        if k_heaviest >= 2 && exterior > 0 {
            violations.push(format!(
                "a doubly-occupied interior gap coexists with {exterior} exterior roots"
            ));
        }
    } else {
        // The middle window is fully frozen: no non-real roots survive and
        // every gap holds at most one.
        if exterior > 0 {
            violations.push(format!(
                "{exterior} exterior roots despite a frozen middle window"
            ));
        }
        if k_heaviest > 1 {
            violations.push(format!("an interior gap holds {k_heaviest} roots (max 1)"));
        }
    }
    Ok(if violations.is_empty() { None } else { Some(violations.join("; ")) })
}

fn measure_suite() -> Vec<CheckResult> {
    let mut out = Vec::new();
    const S: &str = "measure";

    record(&mut out, S, "all built-in profiles validate", {
        NAMES
            .iter()
            .try_for_each(|n| preset(n).map(|_| ()).map_err(|e| e.to_string()))
    });

    record(&mut out, S, "two-plateau profile decomposes into 11 components", {
        (|| {
            let m = preset("c").map_err(|e| e.to_string())?.measure;
            let classes: Vec<RClass> = m.r_decomposition().iter().map(|c| c.class).collect();
            let expect = [
                RClass::Gap,
                RClass::StepUp,
                RClass::Plateau,
                RClass::StepDown,
                RClass::Gap,
                RClass::GapZero,
                RClass::Gap,
                RClass::StepUp,
                RClass::Plateau,
                RClass::StepDown,
                RClass::Gap,
            ];
            require(classes == expect, || format!("got {classes:?}"))?;
            let zero = m.r_decomposition()[5];
            require((zero.lo - 0.75).abs() < 1e-12, || format!("zero at {}", zero.lo))
        })()
    });

    record(&mut out, S, "constant-profile transform hits log-2 value", {
        (|| {
            let m = preset("a").map_err(|e| e.to_string())?.measure;
            let got = m.cauchy_real(3.0).map_err(|e| e.to_string())?;
            let want = 0.5 * 2.0f64.ln();
            require((got - want).abs() < 1e-12, || format!("C(3) = {got}, want {want}"))?;
            let d = m.cauchy_deriv_real(3.0, 1).map_err(|e| e.to_string())?;
            require((d + 0.125).abs() < 1e-12, || format!("C'(3) = {d}, want -1/8"))
        })()
    });

    record(&mut out, S, "transform respects conjugation", {
        (|| {
            for name in ["a", "e", "f"] {
                let m = preset(name).map_err(|e| e.to_string())?.measure;
                for w in [Complex64::new(0.3, 0.8), Complex64::new(-1.2, 0.05)] {
                    let up = m.cauchy(w).map_err(|e| e.to_string())?;
                    let down = m.cauchy(w.conj()).map_err(|e| e.to_string())?;
                    require((up.conj() - down).norm() < 1e-13, || {
                        format!("{name}: C(conj w) != conj C(w) at {w}")
                    })?;
                }
            }
            Ok(())
        })()
    });

    record(&mut out, S, "extended derivative is positive inside a plateau", {
        (|| {
            let m = preset("c").map_err(|e| e.to_string())?.measure;
            let d = m.cauchy_deriv_real(0.25, 1).map_err(|e| e.to_string())?;
            require(d > 0.0, || format!("C'(0.25) = {d}"))
        })()
    });

    out
}

fn combinatorics_suite(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    const S: &str = "combinatorics";

    record(&mut out, S, "product formula matches exhaustive enumeration", {
        (|| {
            for entries in [vec![4, 2, 0], vec![3, 2, 1], vec![5, 2, 1], vec![6, 4, 2, 0]] {
                let top = TopRow::new(entries.clone()).map_err(|e| e.to_string())?;
                let n_enum = enumerate_patterns(&top).map_err(|e| e.to_string())?.count();
                let n_formula = count_patterns(&top);
                require(n_formula == n_enum.into(), || {
                    format!("{entries:?}: formula {n_formula}, enumeration {n_enum}")
                })?;
            }
            Ok(())
        })()
    });

    record(&mut out, S, "seeded sampler emits valid patterns", {
        (|| {
            let top = TopRow::new(vec![6, 4, 2, 0]).map_err(|e| e.to_string())?;
            for k in 0..20u64 {
                let p = sample_pattern(&top, seed.wrapping_add(k));
                GTPattern::from_rows(p.rows().to_vec())
                    .map_err(|e| format!("draw {k} fails validation: {e}"))?;
                require(p.top() == top.entries(), || format!("draw {k} has a wrong top row"))?;
            }
            Ok(())
        })()
    });

    out
}

fn kernel_suite() -> Vec<CheckResult> {
    let mut out = Vec::new();
    const S: &str = "kernel";

    record(&mut out, S, "two-row hand values", {
        (|| {
            let top = TopRow::new(vec![2, 0]).map_err(|e| e.to_string())?;
            let half = BigRational::new(1.into(), 2.into());
            for u in [1i64, 2] {
                let v = kernel(&top, Site::new(u, 1), Site::new(u, 1)).map_err(|e| e.to_string())?;
                require(v == half, || format!("K((({u},1),({u},1))) = {v}"))?;
            }
            Ok(())
        })()
    });

    record(&mut out, S, "dense top row freezes the middle", {
        (|| {
            let top = TopRow::new(vec![2, 1, 0]).map_err(|e| e.to_string())?;
            for site in [Site::new(2, 1), Site::new(2, 2), Site::new(1, 2)] {
                let v = correlation(&top, &[site]).map_err(|e| e.to_string())?;
                require(v.is_one(), || format!("one-point at {site:?}: {v}"))?;
            }
            Ok(())
        })()
    });

    record(&mut out, S, "one-point correlations match enumeration", {
        (|| {
            let top = TopRow::new(vec![4, 2, 0]).map_err(|e| e.to_string())?;
            for r in [1usize, 2] {
                for u in (3 - r as i64)..=4 {
                    let site = Site::new(u, r);
                    let exact = correlation(&top, &[site]).map_err(|e| e.to_string())?;
                    let sampled =
                        empirical_correlation(&top, &[site]).map_err(|e| e.to_string())?;
                    require(exact == sampled, || {
                        format!("site (u={u}, r={r}): kernel {exact} vs enumeration {sampled}")
                    })?;
                }
            }
            Ok(())
        })()
    });

    record(&mut out, S, "contour route agrees with the exact kernel", {
        (|| {
            let top = TopRow::new(vec![5, 3, 0]).map_err(|e| e.to_string())?;
            for (site_u, site_v) in [
                (Site::new(3, 1), Site::new(3, 1)),
                (Site::new(2, 2), Site::new(4, 1)),
            ] {
                let exact = kernel(&top, site_u, site_v).map_err(|e| e.to_string())?;
                let mut params =
                    ContourParams::for_query(&top, site_u, site_v).map_err(|e| e.to_string())?;
                params.nodes = 512;
                let approx =
                    kernel_contour(&top, site_u, site_v, &params).map_err(|e| e.to_string())?;
                let exact_f = rational_to_f64(&exact);
                require((approx - exact_f).norm() < 1e-6, || {
                    format!("contour {approx} vs exact {exact_f}")
                })?;
            }
            Ok(())
        })()
    });

    out
}

fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

fn saddle_suite(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    const S: &str = "saddle";

    record(&mut out, S, "hand position round-trip at w = i", {
        (|| {
            let m = preset("a").map_err(|e| e.to_string())?.measure;
            let (chi, eta) = chi_eta_from_w(&m, Complex64::i()).map_err(|e| e.to_string())?;
            let s2 = 2.0f64.sqrt();
            require(
                (chi - (s2 - 1.0)).abs() < 1e-12 && (eta - (3.0 - 2.0 * s2)).abs() < 1e-12,
                || format!("position ({chi}, {eta})"),
            )?;
            let ctx = SaddleContext::new(&m, chi, eta).map_err(|e| e.to_string())?;
            let root = ctx
                .upper_root()
                .map_err(|e| e.to_string())?
                .ok_or_else(|| "no upper root found".to_string())?;
            require((root - Complex64::i()).norm() < 1e-9, || format!("root {root}"))
        })()
    });

    record(&mut out, S, "membership: interior in, tangency out", {
        (|| {
            let m = preset("a").map_err(|e| e.to_string())?.measure;
            let inside = SaddleContext::new(&m, 0.0, 0.5)
                .map_err(|e| e.to_string())?
                .liquid_membership()
                .map_err(|e| e.to_string())?;
            require(inside.0, || "deep interior point reported outside".to_string())?;
            let outside = SaddleContext::new(&m, 0.5, 0.0)
                .map_err(|e| e.to_string())?
                .liquid_membership()
                .map_err(|e| e.to_string())?;
            require(!outside.0, || "tangency point reported inside".to_string())
        })()
    });

    record(&mut out, S, "root bounds hold at sampled points", {
        (|| {
            for name in ["a", "b", "c", "d"] {
                let m = preset(name).map_err(|e| e.to_string())?.measure;
                let mut checked = 0;
                for (k, (chi, eta)) in
                    random_trapezoid_points(&m, 40, seed).into_iter().enumerate()
                {
                    match root_bound_violation(&m, chi, eta) {
                        Ok(None) => checked += 1,
                        Ok(Some(v)) => {
                            return Err(format!("{name} point {k} ({chi}, {eta}): {v}"))
                        }
                        Err(_) => continue, // degenerate sample; skip
                    }
                    if checked >= 25 {
                        break;
                    }
                }
                require(checked >= 15, || {
                    format!("{name}: only {checked} points evaluated cleanly")
                })?;
            }
            Ok(())
        })()
    });

    out
}

fn frontier_suite() -> Vec<CheckResult> {
    let mut out = Vec::new();
    const S: &str = "frontier";

    record(&mut out, S, "labeled points reproduced", {
        (|| {
            for name in ["a", "b", "c", "d"] {
                let p = preset(name).map_err(|e| e.to_string())?;
                for s in &p.special_points {
                    match s.expect {
                        Expectation::Tangency => {
                            let (x, y) = tangency_point(&p.measure);
                            require(
                                (x - s.chi).abs() < 1e-9 && (y - s.eta).abs() < 1e-9,
                                || format!("{name}/{}: ({x}, {y})", s.label),
                            )?;
                        }
                        Expectation::Edge { t, case } => {
                            let (x, y) =
                                edge_point(&p.measure, t).map_err(|e| e.to_string())?;
                            require(
                                (x - s.chi).abs() < 1e-9 && (y - s.eta).abs() < 1e-9,
                                || format!("{name}/{}: ({x}, {y})", s.label),
                            )?;
                            let (got, _) =
                                classify_case(&p.measure, t).map_err(|e| e.to_string())?;
                            require(got == case, || {
                                format!("{name}/{}: case {got}, want {case}", s.label)
                            })?;
                        }
                        Expectation::FlatLimit { .. } => {}
                    }
                }
            }
            Ok(())
        })()
    });

    record(&mut out, S, "flat top of the constant profile is fully classified", {
        (|| {
            let m = preset("a").map_err(|e| e.to_string())?.measure;
            let asm = assemble_boundary(&m, 64);
            require(asm.complete, || "assembly not complete".to_string())?;
            require(
                asm.flat_segments.len() == 1
                    && (asm.flat_segments[0].lo + 1.0).abs() < 1e-12
                    && (asm.flat_segments[0].hi - 1.0).abs() < 1e-12,
                || format!("flat segments {:?}", asm.flat_segments),
            )
        })()
    });

    record(&mut out, S, "hat profile probes to the flat value", {
        (|| {
            let m = preset("e").map_err(|e| e.to_string())?.measure;
            let probe = boundary_probe(&m, 0.0, 20).map_err(|e| e.to_string())?;
            let (x, y) = probe.limit;
            require(
                (x * x + (y - 1.0) * (y - 1.0)).sqrt() < 1e-3,
                || format!("limit ({x}, {y})"),
            )
        })()
    });

    record(&mut out, S, "quartic profile stays incomplete", {
        (|| {
            let m = preset("f").map_err(|e| e.to_string())?.measure;
            require(!assemble_boundary(&m, 64).complete, || {
                "expected an incomplete boundary".to_string()
            })
        })()
    });

    out
}

fn presets_suite() -> Vec<CheckResult> {
    let mut out = Vec::new();
    const S: &str = "presets";

    record(&mut out, S, "closed transforms agree with generic evaluation", {
        (|| {
            for name in NAMES {
                let p = preset(name).map_err(|e| e.to_string())?;
                let cf = p.closed_c.ok_or("missing closed transform")?;
                for k in 0..8 {
                    let w = Complex64::new(-1.7 + k as f64 * 0.9, if k % 2 == 0 { 0.4 } else { -1.3 });
                    let generic = p.measure.cauchy(w).map_err(|e| e.to_string())?;
                    let closed = cf(w);
                    require((generic - closed).norm() < 1e-9 * (1.0 + closed.norm()), || {
                        format!("{name}: {generic} vs {closed} at {w}")
                    })?;
                }
            }
            Ok(())
        })()
    });

    record(&mut out, S, "closed edges agree with generic evaluation", {
        (|| {
            for name in ["a", "b", "c", "d"] {
                let p = preset(name).map_err(|e| e.to_string())?;
                let ce = p.closed_edge.ok_or("missing closed edge")?;
                for comp in p.measure.r_decomposition() {
                    let (lo, hi) = (comp.lo.max(-3.0), comp.hi.min(6.0));
                    if hi <= lo {
                        continue;
                    }
                    let t = 0.5 * (lo + hi);
                    if p.measure.locate(t).is_none() {
                        continue;
                    }
                    let generic = edge_point(&p.measure, t).map_err(|e| e.to_string())?;
                    let closed = ce(t);
                    require(
                        (generic.0 - closed.0).abs() < 1e-9
                            && (generic.1 - closed.1).abs() < 1e-9,
                        || format!("{name} t={t}: {generic:?} vs {closed:?}"),
                    )?;
                }
            }
            Ok(())
        })()
    });

    record(&mut out, S, "profile export round-trips", {
        (|| {
            for name in NAMES {
                let p = preset(name).map_err(|e| e.to_string())?;
                let back = Measure::from_json(&p.measure.to_json()).map_err(|e| e.to_string())?;
                require(back.pieces() == p.measure.pieces(), || format!("{name} drifted"))?;
            }
            Ok(())
        })()
    });

    out
}
