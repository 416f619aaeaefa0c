//! The frozen-boundary curve: pointwise evaluation over the boundary
//! parameter set `R`, the nine-case local classification, tangent/normal
//! frames with expansion coefficients, flat top segments, probe sequences
//! for points the classification leaves open, adaptive curve sampling, and
//! final assembly with a completeness flag.
//!
//! The parameterized edge is traversed by `t` running over `R` from `-inf`
//! to `+inf`; both tails end at the tangency point on the bottom side, so
//! ascending `t` walks the closed frontier once. Near each sample the curve
//! is `a(s) x_vec + b(s) y_vec` with `a` starting at order 1 and `b` at
//! order 2 (a parabola) at regular points, and both leading terms vanishing
//! at cusp points, where the order-2/3 coefficients take over.

use crate::measure::{EvalError, Interval, Measure, RClass};
use crate::saddle::{chi_eta_from_w, SaddleError};
use num_complex::Complex64;
use thiserror::Error;

/// Relative threshold under which a derivative of the edge expansion is
/// treated as vanishing (cusp detection / multiplicity reading).
const VANISH: f64 = 1e-7;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FrontierError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Saddle(#[from] SaddleError),
}

/// One evaluated point of the edge curve with its local frame and expansion
/// coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSample {
    pub t: f64,
    pub chi: f64,
    pub eta: f64,
    pub component: RClass,
    pub case: u8,
    pub multiplicity: u8,
    pub x_vec: (f64, f64),
    pub y_vec: (f64, f64),
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

/// Outcome of testing a flat top point against the five sufficient
/// density-gap conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlatVerdict {
    /// Matched condition 1..=5; the point `(t, 1)` is on the boundary.
    Case(u8),
    /// None matched; the boundary near `(t, 1)` is not decided here.
    Unclassified,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatPoint {
    pub t: f64,
    pub verdict: FlatVerdict,
}

/// A dyadic vertical probe toward a real point, with a fitted limit. The
/// raw sequence converges only logarithmically at delicate points, so the
/// limit field fits the exact `L + c/(k + d)` depth profile through the last
/// three probes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    /// Position images of `t + i 2^{-k}` for `k = 1..=depths`.
    pub points: Vec<(f64, f64)>,
    /// The deepest raw value.
    pub last: (f64, f64),
    /// Distance between the last two raw values (a Cauchy-type bound).
    pub cauchy_bound: f64,
    /// Reciprocal-in-depth extrapolation of the sequence.
    pub limit: (f64, f64),
}

/// The assembled frontier of a profile.
#[derive(Debug, Clone)]
pub struct BoundaryAssembly {
    pub tangency: (f64, f64),
    /// One polyline per component of `R`, ordered by ascending `t`.
    pub edge_segments: Vec<Vec<EdgeSample>>,
    /// Maximal flat top intervals whose points all matched a flat case;
    /// each stands for the segment `{(t, 1)}` over it.
    pub flat_segments: Vec<Interval>,
    /// Fitted probe limits for flat points left unclassified.
    pub probe_points: Vec<(f64, f64)>,
    pub complete: bool,
}

/// Point where the curve touches the bottom side of the trapezoid:
/// `(1/2 + first moment, 0)`, the limit of the curve as `|t| -> inf`.
pub fn tangency_point(m: &Measure) -> (f64, f64) {
    (0.5 + m.moment1(), 0.0)
}

/// Shared per-point evaluation: everything downstream (edge point, case,
/// frame, coefficients) reads from this.
struct PointData {
    class: RClass,
    chi: f64,
    eta: f64,
    case: u8,
    multiplicity: u8,
    x_vec: (f64, f64),
    y_vec: (f64, f64),
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
    /// The expansion derivative whose sign change pins cusp parameters
    /// (order 3 on gap/plateau components, order 2 at step points).
    cusp_indicator: f64,
}

fn point_data(m: &Measure, t: f64) -> Result<PointData, FrontierError> {
    let comp = *m.locate(t).ok_or(EvalError::NotInR { t })?;
    match comp.class {
        RClass::Gap | RClass::Plateau => {
            let (ec, cp) = if comp.class == RClass::Gap {
                (m.cauchy_real(t)?.exp(), m.cauchy_deriv_real(t, 1)?)
            } else {
                (m.extended_exp_c(t)?.exp_c, m.cauchy_deriv_real(t, 1)?)
            };
            let cpp = m.cauchy_deriv_real(t, 2)?;
            let cppp = m.cauchy_deriv_real(t, 3)?;
            let g = ec - 1.0;
            let chi = t + g / (ec * cp);
            let eta = 1.0 + g * g / (ec * cp);
            // Third and fourth derivatives of the saddle function at its
            // double root, in closed form.
            let f3_main = cp * cp * (ec + 1.0) / g;
            let f3 = cpp - f3_main;
            let f4 = cppp - 2.0 * cp.powi(3) * (ec * ec + ec + 1.0) / (g * g);
            let mult = if f3.abs() > VANISH * (cpp.abs() + f3_main.abs()) { 2 } else { 3 };
            let case = match (comp.class, mult) {
                (RClass::Gap, 2) => 1,
                (RClass::Gap, _) => 2,
                (_, 2) => 3,
                _ => 4,
            };
            let lead = -g / (ec * cp * cp);
            let trail = g / (cp * (1.0 + g * g));
            Ok(PointData {
                class: comp.class,
                chi,
                eta,
                case,
                multiplicity: mult,
                x_vec: (1.0, g),
                y_vec: (g, -1.0),
                a1: lead * f3,
                a2: 0.5 * lead * f4,
                b1: 0.5 * trail * f3,
                b2: trail * f4 / 3.0,
                cusp_indicator: f3,
            })
        }
        RClass::GapZero => {
            let cp = m.cauchy_deriv_real(t, 1)?;
            Ok(PointData {
                class: comp.class,
                chi: t,
                eta: 1.0,
                case: 5,
                multiplicity: 1,
                x_vec: (1.0, 0.0),
                y_vec: (0.0, -1.0),
                a1: 2.0,
                a2: 0.0,
                b1: -cp,
                b2: 0.0,
                cusp_indicator: f64::INFINITY,
            })
        }
        RClass::StepDown => {
            let sc = m
                .step_context(t, RClass::StepDown, 2)
                .ok_or(EvalError::NotInR { t })?;
            let t2 = sc.plateau_end;
            let eci = sc.derivs[0].exp();
            let span = t - t2;
            let f2_parts = [sc.derivs[1], 1.0 / span, 1.0 / (span * eci)];
            let f2 = f2_parts[0] + f2_parts[1] - f2_parts[2];
            let f3 = sc.derivs[2] - 1.0 / (span * span) + 1.0 / (span * span * eci * eci);
            let scale: f64 = f2_parts.iter().map(|v| v.abs()).sum();
            let mult = if f2.abs() > VANISH * scale { 1 } else { 2 };
            Ok(PointData {
                class: comp.class,
                chi: t,
                eta: 1.0 - eci * span,
                case: if mult == 1 { 6 } else { 7 },
                multiplicity: mult,
                x_vec: (0.0, 1.0),
                y_vec: (1.0, 0.0),
                a1: -2.0 * span * eci * f2,
                a2: -1.5 * span * eci * f3,
                b1: -f2,
                b2: -f3,
                cusp_indicator: f2,
            })
        }
        RClass::StepUp => {
            let sc = m
                .step_context(t, RClass::StepUp, 2)
                .ok_or(EvalError::NotInR { t })?;
            let t1 = sc.plateau_end;
            let eni = (-sc.derivs[0]).exp();
            let span = t - t1;
            let f2_parts = [sc.derivs[1], 1.0 / (span * eni), 1.0 / span];
            let f2 = f2_parts[0] + f2_parts[1] - f2_parts[2];
            let f3 = sc.derivs[2] - 1.0 / (span * span * eni * eni) + 1.0 / (span * span);
            let scale: f64 = f2_parts.iter().map(|v| v.abs()).sum();
            let mult = if f2.abs() > VANISH * scale { 1 } else { 2 };
            Ok(PointData {
                class: comp.class,
                chi: t - eni * span,
                eta: 1.0 + eni * span,
                case: if mult == 1 { 8 } else { 9 },
                multiplicity: mult,
                x_vec: (1.0, -1.0),
                y_vec: (1.0, 1.0),
                a1: 2.0 * span * eni * f2,
                a2: 1.5 * span * eni * f3,
                b1: 0.5 * f2,
                b2: 0.5 * f3,
                cusp_indicator: f2,
            })
        }
    }
}

/// The edge-curve point over `t ∈ R`.
pub fn edge_point(m: &Measure, t: f64) -> Result<(f64, f64), FrontierError> {
    let d = point_data(m, t)?;
    Ok((d.chi, d.eta))
}

/// Case number (1..=9) and root multiplicity at `t ∈ R`.
pub fn classify_case(m: &Measure, t: f64) -> Result<(u8, u8), FrontierError> {
    let d = point_data(m, t)?;
    Ok((d.case, d.multiplicity))
}

/// Full local data at `t ∈ R`: point, case, orthogonal frame, and the
/// leading expansion coefficients along it.
pub fn local_geometry(m: &Measure, t: f64) -> Result<EdgeSample, FrontierError> {
    let d = point_data(m, t)?;
    Ok(EdgeSample {
        t,
        chi: d.chi,
        eta: d.eta,
        component: d.class,
        case: d.case,
        multiplicity: d.multiplicity,
        x_vec: d.x_vec,
        y_vec: d.y_vec,
        a1: d.a1,
        a2: d.a2,
        b1: d.b1,
        b2: d.b2,
    })
}

/// One-sided behavior of the density beside a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    /// Identically zero on the side (a support gap).
    Zero,
    /// Identically one on the side (a plateau).
    One,
    /// Bounded strictly inside (0, 1) on the side.
    Mixed,
    /// Approaches 0 or 1 without being constant; no condition matches.
    Boundaryish,
}

fn side_behavior(m: &Measure, t: f64, right: bool) -> Side {
    let guard = 1e-12 * (1.0 + t.abs());
    let piece = m.pieces().iter().find(|p| {
        if right {
            p.interval.lo <= t + guard && p.interval.hi > t + guard
        } else {
            p.interval.hi >= t - guard && p.interval.lo < t - guard
        }
    });
    let Some(p) = piece else { return Side::Zero };
    if p.is_plateau() {
        return Side::One;
    }
    let v = p.eval(t);
    if v > 1e-9 && v < 1.0 - 1e-9 {
        Side::Mixed
    } else {
        Side::Boundaryish
    }
}

fn flat_verdict(m: &Measure, t: f64) -> FlatVerdict {
    match (side_behavior(m, t, false), side_behavior(m, t, true)) {
        (Side::Mixed, Side::Mixed) => FlatVerdict::Case(1),
        (Side::Mixed, Side::Zero) => FlatVerdict::Case(2),
        (Side::Mixed, Side::One) => FlatVerdict::Case(3),
        (Side::Zero, Side::Mixed) => FlatVerdict::Case(4),
        (Side::One, Side::Mixed) => FlatVerdict::Case(5),
        _ => FlatVerdict::Unclassified,
    }
}

/// The maximal intervals of real points off `R` (support of the density
/// minus plateau interiors, minus the step points re-absorbed into `R`).
fn flat_zones(m: &Measure) -> Vec<Interval> {
    let mut zones = Vec::new();
    for si in m.support() {
        let mut cursor = si.lo;
        let mut runs: Vec<Interval> = m
            .plateaus()
            .iter()
            .filter(|r| r.lo >= si.lo - 1e-12 && r.hi <= si.hi + 1e-12)
            .copied()
            .collect();
        runs.sort_by(|x, y| x.lo.total_cmp(&y.lo));
        for run in &runs {
            if run.lo > cursor {
                zones.push(Interval::new(cursor, run.lo));
            } else if (run.lo - cursor).abs() <= 1e-12 * (1.0 + cursor.abs())
                && m.locate(cursor).is_none()
            {
                // Plateau edge interior to the support: a lone flat point.
                zones.push(Interval::new(cursor, cursor));
            }
            cursor = run.hi;
        }
        if cursor < si.hi {
            zones.push(Interval::new(cursor, si.hi));
        } else if (cursor - si.hi).abs() <= 1e-12 * (1.0 + cursor.abs())
            && cursor > si.lo
            && m.locate(cursor).is_none()
        {
            zones.push(Interval::new(cursor, cursor));
        }
    }
    zones.retain(|z| m.locate(0.5 * (z.lo + z.hi)).is_none());
    zones
}

/// Interior points of a polynomial piece where the density touches 0 or 1.
/// A density confined to [0, 1] can only reach those values tangentially,
/// so interior touches sit at critical points of the piece polynomial.
fn touch_points(p: &crate::measure::DensityPiece, lo: f64, hi: f64) -> Vec<f64> {
    if p.coeffs.len() < 2 {
        return Vec::new();
    }
    let deriv = crate::measure::DensityPiece::new(
        lo,
        hi,
        p.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect(),
    );
    crate::measure::poly_sign_change_roots(&deriv, lo, hi)
        .into_iter()
        .filter(|&xc| {
            let v = p.eval(xc);
            v.abs() < 1e-9 || (v - 1.0).abs() < 1e-9
        })
        .collect()
}

/// Distinguished flat points of one zone: endpoints, interior piece
/// boundaries, interior touch points of the density with 0 or 1, and a
/// midpoint between each adjacent pair.
fn zone_candidates(m: &Measure, zone: Interval) -> Vec<f64> {
    let mut pts = vec![zone.lo, zone.hi];
    for p in m.pieces() {
        for edge in [p.interval.lo, p.interval.hi] {
            if edge > zone.lo && edge < zone.hi {
                pts.push(edge);
            }
        }
        let clip_lo = p.interval.lo.max(zone.lo);
        let clip_hi = p.interval.hi.min(zone.hi);
        if clip_hi <= clip_lo || p.is_plateau() {
            continue;
        }
        for r in touch_points(p, clip_lo, clip_hi) {
            if r > zone.lo && r < zone.hi {
                pts.push(r);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * (1.0 + y.abs()));
    let mids: Vec<f64> = pts.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    pts.extend(mids);
    pts.sort_by(f64::total_cmp);
    pts
}

/// Verdicts at every distinguished flat top point of the profile.
pub fn flat_boundary_points(m: &Measure) -> Vec<FlatPoint> {
    let mut out = Vec::new();
    for zone in flat_zones(m) {
        for t in zone_candidates(m, zone) {
            out.push(FlatPoint { t, verdict: flat_verdict(m, t) });
        }
    }
    out
}

/// Vertical dyadic probe toward `t`: position images of `t + i 2^{-k}` for
/// `k = 1..=depths`, the raw tail and its Cauchy-type bound, and the
/// reciprocal-in-depth fitted limit.
pub fn boundary_probe(
    m: &Measure,
    t: f64,
    depths: u32,
) -> Result<ProbeResult, FrontierError> {
    assert!(depths >= 1, "need at least one probe");
    let mut points = Vec::with_capacity(depths as usize);
    for k in 1..=depths {
        let w = Complex64::new(t, (2.0f64).powi(-(k as i32)));
        points.push(chi_eta_from_w(m, w)?);
    }
    let last = *points.last().unwrap();
    let cauchy_bound = if points.len() >= 2 {
        let prev = points[points.len() - 2];
        ((last.0 - prev.0).powi(2) + (last.1 - prev.1).powi(2)).sqrt()
    } else {
        f64::INFINITY
    };
    let limit = if points.len() >= 3 {
        let k3 = points.len();
        let pick = |i: usize, coord: usize| {
            let p = points[i - 1];
            if coord == 0 {
                p.0
            } else {
                p.1
            }
        };
        let mut fitted = [0.0; 2];
        for coord in 0..2 {
            let (y1, y2, y3) = (
                pick(k3 - 2, coord),
                pick(k3 - 1, coord),
                pick(k3, coord),
            );
            fitted[coord] = fit_reciprocal((k3 - 2) as f64, y1, y2, y3);
        }
        (fitted[0], fitted[1])
    } else {
        last
    };
    Ok(ProbeResult { points, last, cauchy_bound, limit })
}

/// Extrapolate the limit of a sequence sampled at consecutive integer
/// depths `k1, k1+1, k1+2` under the model `y(k) = L + c / (k + d)`, which
/// is the exact leading profile of the dyadic probe. Falls back to the last
/// value when the differences carry no such signal.
fn fit_reciprocal(k1: f64, y1: f64, y2: f64, y3: f64) -> f64 {
    let d32 = y2 - y3;
    let d21 = y1 - y2;
    if d32.abs() < 1e-14 {
        return y3;
    }
    let ratio = d21 / d32;
    if ratio <= 1.0 + 1e-9 {
        return y3;
    }
    let d = (k1 + 2.0 - ratio * k1) / (ratio - 1.0);
    let c = d21 * (k1 + d) * (k1 + 1.0 + d);
    y1 - c / (k1 + d)
}

/// Maximum turning angle (radians) at the middle of three points.
fn turning_angle(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> f64 {
    let u = (p1.0 - p0.0, p1.1 - p0.1);
    let v = (p2.0 - p1.0, p2.1 - p1.1);
    let nu = (u.0 * u.0 + u.1 * u.1).sqrt();
    let nv = (v.0 * v.0 + v.1 * v.1).sqrt();
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    let cosv = ((u.0 * v.0 + u.1 * v.1) / (nu * nv)).clamp(-1.0, 1.0);
    cosv.acos()
}

/// Sample one interval component of `R` adaptively; `params` carries the
/// monotone chart from grid coordinates to `t`.
fn sample_component(
    m: &Measure,
    chart: &dyn Fn(f64) -> f64,
    initial: usize,
    extra_budget: &mut usize,
) -> Vec<EdgeSample> {
    let mut grid: Vec<f64> = (0..initial).map(|i| i as f64 / (initial - 1) as f64).collect();
    let sample_at = |g: f64| -> Option<EdgeSample> { local_geometry(m, chart(g)).ok() };
    let mut samples: Vec<(f64, Option<EdgeSample>)> =
        grid.drain(..).map(|g| (g, sample_at(g))).collect();

    // Refine while some polyline corner turns too sharply.
    loop {
        let mut insert_at: Option<usize> = None;
        for i in 1..samples.len().saturating_sub(1) {
            if let (Some(a), Some(b), Some(c)) =
                (&samples[i - 1].1, &samples[i].1, &samples[i + 1].1)
            {
                if turning_angle((a.chi, a.eta), (b.chi, b.eta), (c.chi, c.eta)) > 0.2 {
                    insert_at = Some(i);
                    break;
                }
            }
        }
        let Some(i) = insert_at else { break };
        if *extra_budget < 2 {
            break;
        }
        *extra_budget -= 2;
        let left = 0.5 * (samples[i - 1].0 + samples[i].0);
        let right = 0.5 * (samples[i].0 + samples[i + 1].0);
        samples.insert(i + 1, (right, sample_at(right)));
        samples.insert(i, (left, sample_at(left)));
    }

    // Cusp localization: bisect sign changes of the cusp indicator so the
    // curve contains the exact case-2/4 points.
    let mut located: Vec<f64> = Vec::new();
    {
        let indicator =
            |g: f64| -> Option<f64> { point_data(m, chart(g)).ok().map(|d| d.cusp_indicator) };
        let grid_vals: Vec<(f64, Option<f64>)> =
            samples.iter().map(|&(g, _)| (g, indicator(g))).collect();
        for w in grid_vals.windows(2) {
            if let ((g0, Some(v0)), (g1, Some(v1))) = (&w[0], &w[1]) {
                if v0 * v1 < 0.0 {
                    let (mut lo, mut hi, mut vlo) = (*g0, *g1, *v0);
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        match indicator(mid) {
                            Some(vm) if vm * vlo > 0.0 => {
                                lo = mid;
                                vlo = vm;
                            }
                            Some(_) => hi = mid,
                            None => break,
                        }
                    }
                    located.push(0.5 * (lo + hi));
                }
            }
        }
    }
    for g in located {
        samples.push((g, sample_at(g)));
    }
    samples.sort_by(|x, y| x.0.total_cmp(&y.0));
    samples.into_iter().filter_map(|(_, s)| s).collect()
}

/// Adaptive samples of the whole edge curve, ordered by component and
/// ascending `t` (the single closed walk of the frontier).
pub fn sample_edge(m: &Measure, budget: usize) -> Vec<EdgeSample> {
    sample_edge_segments(m, budget).into_iter().flatten().collect()
}

/// Same samples kept grouped: one polyline per component of `R`.
pub fn sample_edge_segments(m: &Measure, budget: usize) -> Vec<Vec<EdgeSample>> {
    assert!(budget >= 16, "budget must be at least 16");
    let comps: Vec<_> = m.r_decomposition().to_vec();
    let intervals = comps.iter().filter(|c| !c.is_point()).count().max(1);
    let initial = (budget / (2 * intervals)).clamp(9, 129);
    let mut extra = budget.saturating_sub(initial * intervals);
    let mut out: Vec<Vec<EdgeSample>> = Vec::new();

    let scale = 1.0 + m.a().abs().max(m.b().abs());
    for comp in &comps {
        if comp.is_point() {
            if let Ok(s) = local_geometry(m, comp.lo) {
                out.push(vec![s]);
            }
            continue;
        }
        let (lo, hi) = (comp.lo, comp.hi);
        let chart: Box<dyn Fn(f64) -> f64> = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => {
                let guard = (1e-6 * scale).min(0.01 * (hi - lo));
                Box::new(move |g: f64| lo + guard + g * (hi - lo - 2.0 * guard))
            }
            (true, false) => {
                let guard = 1e-6 * scale;
                let th_lo = guard.atan();
                let th_hi = std::f64::consts::FRAC_PI_2 - 0.02;
                Box::new(move |g: f64| lo + (th_lo + g * (th_hi - th_lo)).tan())
            }
            (false, true) => {
                let guard = 1e-6 * scale;
                let th_lo = guard.atan();
                let th_hi = std::f64::consts::FRAC_PI_2 - 0.02;
                // Descend toward the finite end as g grows.
                Box::new(move |g: f64| hi - (th_lo + (1.0 - g) * (th_hi - th_lo)).tan())
            }
            (false, false) => {
                let mid = 0.5 * (m.a() + m.b());
                let half = std::f64::consts::FRAC_PI_2 - 0.02;
                Box::new(move |g: f64| mid + ((2.0 * g - 1.0) * half).tan())
            }
        };
        out.push(sample_component(m, chart.as_ref(), initial, &mut extra));
    }
    out.retain(|seg| !seg.is_empty());
    out.sort_by(|x, y| match (x.first(), y.first()) {
        (Some(p), Some(q)) => p.t.total_cmp(&q.t),
        _ => std::cmp::Ordering::Equal,
    });
    out
}

/// Assemble the full frontier: tangency, adaptive edge segments per
/// component, classified flat segments, probe limits for the rest, and the
/// completeness flag. The boundary is complete when nothing flat is left
/// unexplained: every flat point either matches one of the five density
/// conditions or probes to its flat value `(t, 1)` within 1e-3.
pub fn assemble_boundary(m: &Measure, budget: usize) -> BoundaryAssembly {
    let segments = sample_edge_segments(m, budget);

    let mut flat_segments = Vec::new();
    let mut probe_points = Vec::new();
    let mut complete = true;
    for zone in flat_zones(m) {
        let mut zone_ok = true;
        for t in zone_candidates(m, zone) {
            if flat_verdict(m, t) == FlatVerdict::Unclassified {
                zone_ok = false;
                match boundary_probe(m, t, 20) {
                    Ok(probe) => {
                        let (lx, ly) = probe.limit;
                        let dist = ((lx - t).powi(2) + (ly - 1.0).powi(2)).sqrt();
                        if dist > 1e-3 {
                            complete = false;
                        }
                        probe_points.push(probe.limit);
                    }
                    Err(_) => complete = false,
                }
            }
        }
        if zone_ok {
            flat_segments.push(zone);
        }
    }

    BoundaryAssembly {
        tangency: tangency_point(m),
        edge_segments: segments,
        flat_segments,
        probe_points,
        complete,
    }
}

/// CSV rendering of edge samples: mandatory header, one row per sample,
/// UTF-8 with LF line endings.
pub fn edge_samples_csv(samples: &[EdgeSample]) -> String {
    let mut out =
        String::from("t,chi,eta,component,case,multiplicity,x1,x2,y1,y2,a1,a2,b1,b2\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.t,
            s.chi,
            s.eta,
            s.component.as_str(),
            s.case,
            s.multiplicity,
            s.x_vec.0,
            s.x_vec.1,
            s.y_vec.0,
            s.y_vec.1,
            s.a1,
            s.a2,
            s.b1,
            s.b2,
        ));
    }
    out
}
