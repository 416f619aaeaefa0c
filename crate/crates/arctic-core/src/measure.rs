//! Limiting density profiles and their Cauchy (Stieltjes) transform.
//!
//! A profile is a sub-probability density `phi : R -> [0, 1]` given piecewise
//! by polynomials on finitely many disjoint intervals, with total mass one.
//! Everything downstream is driven by its Cauchy transform
//!
//! ```text
//! C(w) = ∫ phi(x) / (w - x) dx
//! ```
//!
//! evaluated off the support, together with one-sided analytic extensions of
//! `exp(C)` and of the derivatives of `C` across *plateaus* (maximal intervals
//! where the density is identically 1). Those extensions are what make the
//! frozen-boundary formulas of [`crate::frontier`] well defined on the whole
//! real set where the boundary is parameterized.
//!
//! All per-piece integrals are closed forms: writing `I_k = ∫ x^k/(w-x) dx`
//! over a piece `[p, q]` gives `I_0 = log(w-p) - log(w-q)` and the recurrence
//! `I_k = w I_{k-1} - (q^k - p^k)/k`, and similarly for higher powers of
//! `1/(w-x)`. No numerical quadrature is involved anywhere in this module.

use num_complex::Complex64;
use serde::Deserialize;
use thiserror::Error;

/// Named tolerances. Each constant documents the failure mode it guards.
pub mod tol {
    /// Total mass must equal one to within accumulated rounding of a few
    /// hundred piece integrals.
    pub const MASS: f64 = 1e-12;
    /// Slack when checking `0 <= density <= 1` by sampling; protects against
    /// harmless representation noise in user-supplied coefficients.
    pub const DENSITY_RANGE: f64 = 1e-9;
    /// Coefficient magnitude below which a polynomial is treated as zero, and
    /// deviation from 1 below which a piece counts as a plateau.
    pub const FLAT: f64 = 1e-12;
    /// Two interval endpoints closer than this (relatively) are considered
    /// touching when merging support intervals.
    pub const TOUCH: f64 = 1e-12;
    /// Absolute refinement target for zeros of the transform inside gaps.
    pub const GAP_ZERO: f64 = 1e-12;
    /// Relative window for matching a query point to an isolated component
    /// of the real-line decomposition.
    pub const POINT_MATCH: f64 = 1e-9;
    /// Offset (relative to gap width) used when probing signs of the
    /// transform near a gap endpoint, where it may diverge.
    pub const GAP_PROBE: f64 = 1e-9;
}

/// A nonempty open/closed interval of reals; `lo < hi` unless stated.
/// Infinite endpoints are allowed where a context says so.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn contains_open(&self, t: f64) -> bool {
        self.lo < t && t < self.hi
    }
}

/// One polynomial piece of a density profile. `coeffs[k]` multiplies `x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityPiece {
    pub interval: Interval,
    pub coeffs: Vec<f64>,
}

impl DensityPiece {
    pub fn new(lo: f64, hi: f64, coeffs: Vec<f64>) -> Self {
        DensityPiece { interval: Interval::new(lo, hi), coeffs }
    }

    /// Horner evaluation of the piece polynomial (regardless of `x` being
    /// inside the piece interval).
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Derivative coefficients of the piece polynomial.
    fn deriv_coeffs(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect()
    }

    /// Exact mass of the piece: `∫ poly` over the interval.
    pub fn mass(&self) -> f64 {
        self.moment(0)
    }

    /// Exact `∫ x^j poly(x) dx` over the interval.
    pub fn moment(&self, j: u32) -> f64 {
        let (p, q) = (self.interval.lo, self.interval.hi);
        let mut total = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let e = k as i32 + j as i32 + 1;
            total += c * (q.powi(e) - p.powi(e)) / e as f64;
        }
        total
    }

    /// All coefficients negligible: the piece carries no mass.
    pub fn is_null(&self) -> bool {
        self.coeffs.iter().all(|c| c.abs() <= tol::FLAT)
    }

    /// The polynomial is identically 1: a plateau piece.
    pub fn is_plateau(&self) -> bool {
        if self.coeffs.is_empty() {
            return false;
        }
        (self.coeffs[0] - 1.0).abs() <= tol::FLAT
            && self.coeffs.iter().skip(1).all(|c| c.abs() <= tol::FLAT)
    }
}

/// Structural problems found while validating a profile.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ValidationIssue {
    #[error("no density pieces supplied")]
    NoPieces,
    #[error("piece {index} has an empty or inverted interval [{lo}, {hi}]")]
    EmptyInterval { index: usize, lo: f64, hi: f64 },
    #[error("piece {index} contains a non-finite number")]
    NonFinite { index: usize },
    #[error("piece {index} has degree {degree}, above the supported 8")]
    DegreeTooHigh { index: usize, degree: usize },
    #[error("pieces {first} and {second} overlap")]
    OverlappingPieces { first: usize, second: usize },
    #[error("density leaves [0, 1]: value {value} at x = {at} (piece {index})")]
    DensityOutOfRange { index: usize, at: f64, value: f64 },
    #[error("total mass is {mass}, not 1")]
    MassNotOne { mass: f64 },
    #[error("support [{a}, {b}] must be wider than 1")]
    SupportTooNarrow { a: f64, b: f64 },
}

/// Errors from pointwise evaluations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("point {t} lies on the density support")]
    PointOnSupport { t: f64 },
    #[error("point {t} is outside the real set where the boundary is parameterized")]
    NotInR { t: f64 },
    #[error("({chi}, {eta}) is outside the admissible trapezoid")]
    OutOfTrapezoid { chi: f64, eta: f64 },
    #[error("derivative order {order} not supported (1..=3)")]
    BadDerivOrder { order: u8 },
    #[error("measure file is not valid: {0}")]
    Io(String),
}

/// Classification of a connected component of the real set `R` on which the
/// curved part of the frozen boundary is parameterized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RClass {
    /// Open interval outside the density support (transform nonzero there).
    Gap,
    /// Isolated zero of the transform inside a bounded gap.
    GapZero,
    /// Open interval where the density is identically 1.
    Plateau,
    /// Point where the density steps from 1 (left) to 0 (right).
    StepDown,
    /// Point where the density steps from 0 (left) to 1 (right).
    StepUp,
}

impl RClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            RClass::Gap => "gap",
            RClass::GapZero => "gap-zero",
            RClass::Plateau => "plateau",
            RClass::StepDown => "step-down",
            RClass::StepUp => "step-up",
        }
    }
}

/// One component of the decomposition of `R`: an open interval for
/// `Gap`/`Plateau` (`lo < hi`, possibly infinite), a single point
/// (`lo == hi`) for the three point classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RComponent {
    pub class: RClass,
    pub lo: f64,
    pub hi: f64,
}

impl RComponent {
    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

/// Support data of the two relevant measures around a rescaled position
/// `(chi, eta)`: the density restricted above/below the window, the
/// complementary density inside it, and the gap structure between them.
///
/// `upper` is the support of the density on `[chi, b]`, `lower` on
/// `[a, chi+eta-1]`, and `middle` the support of `1 - density` on
/// `[chi+eta-1, chi]`. The remaining open intervals partition the complement
/// of their union `S`: two unbounded tails, the (possibly absent) gaps
/// directly above and below the middle band, and the remaining bounded gaps.
#[derive(Debug, Clone, Default)]
pub struct SupportSets {
    pub upper: Vec<Interval>,
    pub middle: Vec<Interval>,
    pub lower: Vec<Interval>,
    pub merged: Vec<Interval>,
    pub right_tail: Option<Interval>,
    pub left_tail: Option<Interval>,
    pub upper_gap: Option<Interval>,
    pub lower_gap: Option<Interval>,
    pub inner_gaps: Vec<Interval>,
}

/// One-sided analytic extension of `exp(±C)` at a real point of `R`.
/// At step points one of the two is exactly zero and the other infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedExp {
    /// Extension of `e^{C(t)}` from the upper half plane.
    pub exp_c: f64,
    /// Extension of `e^{-C(t)}`.
    pub exp_neg_c: f64,
}

/// A validated density profile with cached support geometry.
#[derive(Debug, Clone)]
pub struct Measure {
    pieces: Vec<DensityPiece>,
    a: f64,
    b: f64,
    /// Merged closed support intervals of the density.
    support: Vec<Interval>,
    /// Maximal closed runs of plateau pieces.
    plateaus: Vec<Interval>,
    /// Cached decomposition of the boundary parameter set `R`.
    rdecomp: Vec<RComponent>,
}

/// Validate raw pieces into a usable profile, or report every violated
/// structural requirement.
pub fn validate(pieces: Vec<DensityPiece>) -> Result<Measure, Vec<ValidationIssue>> {
    let mut issues = Vec::new();
    if pieces.is_empty() {
        return Err(vec![ValidationIssue::NoPieces]);
    }
    for (i, p) in pieces.iter().enumerate() {
        if !p.interval.lo.is_finite()
            || !p.interval.hi.is_finite()
            || p.coeffs.iter().any(|c| !c.is_finite())
        {
            issues.push(ValidationIssue::NonFinite { index: i });
        }
        if !(p.interval.lo < p.interval.hi) {
            issues.push(ValidationIssue::EmptyInterval {
                index: i,
                lo: p.interval.lo,
                hi: p.interval.hi,
            });
        }
        if p.coeffs.len() > 9 {
            issues.push(ValidationIssue::DegreeTooHigh { index: i, degree: p.coeffs.len() - 1 });
        }
    }
    if !issues.is_empty() {
        return Err(issues);
    }

    let mut sorted: Vec<DensityPiece> = pieces;
    sorted.sort_by(|x, y| x.interval.lo.total_cmp(&y.interval.lo));
    for i in 1..sorted.len() {
        let prev = sorted[i - 1].interval;
        let cur = sorted[i].interval;
        if cur.lo < prev.hi - tol::TOUCH * prev.hi.abs().max(1.0) {
            issues.push(ValidationIssue::OverlappingPieces { first: i - 1, second: i });
        }
    }

    // Range check by dense sampling plus refinement at interior critical
    // points of each piece polynomial.
    for (i, p) in sorted.iter().enumerate() {
        let mut worst: Option<(f64, f64)> = None;
        let mut consider = |x: f64, v: f64| {
            if !(-tol::DENSITY_RANGE..=1.0 + tol::DENSITY_RANGE).contains(&v) {
                let severity = (v - 0.5).abs();
                if worst.map_or(true, |(_, wv)| (wv - 0.5).abs() < severity) {
                    worst = Some((x, v));
                }
            }
        };
        let (lo, hi) = (p.interval.lo, p.interval.hi);
        let samples = 1024;
        for j in 0..=samples {
            let x = lo + (hi - lo) * j as f64 / samples as f64;
            consider(x, p.eval(x));
        }
        let dp = DensityPiece { interval: p.interval, coeffs: p.deriv_coeffs() };
        for root in poly_sign_change_roots(&dp, lo, hi) {
            consider(root, p.eval(root));
        }
        if let Some((at, value)) = worst {
            issues.push(ValidationIssue::DensityOutOfRange { index: i, at, value });
        }
    }

    // Null pieces carry no information; drop them before computing geometry.
    let kept: Vec<DensityPiece> = sorted.into_iter().filter(|p| !p.is_null()).collect();
    if kept.is_empty() {
        issues.push(ValidationIssue::NoPieces);
        return Err(issues);
    }

    let mass: f64 = kept.iter().map(|p| p.mass()).sum();
    if (mass - 1.0).abs() > tol::MASS {
        issues.push(ValidationIssue::MassNotOne { mass });
    }

    let a = kept.first().unwrap().interval.lo;
    let b = kept.iter().map(|p| p.interval.hi).fold(f64::NEG_INFINITY, f64::max);
    if !(b - a > 1.0) {
        issues.push(ValidationIssue::SupportTooNarrow { a, b });
    }
    if !issues.is_empty() {
        return Err(issues);
    }

    let support = merge_touching(kept.iter().map(|p| p.interval));
    let plateaus = merge_touching(kept.iter().filter(|p| p.is_plateau()).map(|p| p.interval));

    let mut m = Measure { pieces: kept, a, b, support, plateaus, rdecomp: Vec::new() };
    m.rdecomp = m.compute_rdecomp();
    Ok(m)
}

/// Merge a sorted iterator of intervals, gluing touching endpoints.
fn merge_touching(it: impl Iterator<Item = Interval>) -> Vec<Interval> {
    let mut out: Vec<Interval> = Vec::new();
    for iv in it {
        match out.last_mut() {
            Some(last) if iv.lo <= last.hi + tol::TOUCH * last.hi.abs().max(1.0) => {
                last.hi = last.hi.max(iv.hi);
            }
            _ => out.push(iv),
        }
    }
    out
}

/// Sign-change roots of a piece polynomial inside `(lo, hi)`, located by a
/// scan plus bisection. Used for range checking and for finding points where
/// a density touches 0 or 1.
pub(crate) fn poly_sign_change_roots(p: &DensityPiece, lo: f64, hi: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    let n = 512;
    let mut prev_x = lo;
    let mut prev_v = p.eval(lo);
    for j in 1..=n {
        let x = lo + (hi - lo) * j as f64 / n as f64;
        let v = p.eval(x);
        if prev_v == 0.0 {
            roots.push(prev_x);
        } else if prev_v * v < 0.0 {
            let (mut xa, mut xb) = (prev_x, x);
            let mut va = prev_v;
            for _ in 0..80 {
                let xm = 0.5 * (xa + xb);
                let vm = p.eval(xm);
                if va * vm <= 0.0 {
                    xb = xm;
                } else {
                    xa = xm;
                    va = vm;
                }
            }
            roots.push(0.5 * (xa + xb));
        }
        prev_x = x;
        prev_v = v;
    }
    if prev_v == 0.0 {
        roots.push(prev_x);
    }
    roots
}

impl Measure {
    pub fn new(pieces: Vec<DensityPiece>) -> Result<Self, Vec<ValidationIssue>> {
        validate(pieces)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn pieces(&self) -> &[DensityPiece] {
        &self.pieces
    }

    /// Merged closed support intervals of the density.
    pub fn support(&self) -> &[Interval] {
        &self.support
    }

    /// Maximal closed runs where the density is identically 1.
    pub fn plateaus(&self) -> &[Interval] {
        &self.plateaus
    }

    /// Density value at `x` (0 outside all pieces).
    pub fn density(&self, x: f64) -> f64 {
        self.pieces
            .iter()
            .find(|p| p.interval.contains(x))
            .map_or(0.0, |p| p.eval(x))
    }

    /// `∫ x phi(x) dx`, the first moment of the profile.
    pub fn moment1(&self) -> f64 {
        self.pieces.iter().map(|p| p.moment(1)).sum()
    }

    /// Distance from `t` to the support (0 when inside).
    pub fn support_distance(&self, t: f64) -> f64 {
        self.support
            .iter()
            .map(|iv| {
                if iv.contains(t) {
                    0.0
                } else {
                    (t - iv.hi).abs().min((t - iv.lo).abs())
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn on_support(&self, t: f64) -> bool {
        self.support.iter().any(|iv| iv.contains(t))
    }

    /// Cauchy transform `C(w)`; defined for non-real `w`, and for real `w`
    /// strictly off the support.
    pub fn cauchy(&self, w: Complex64) -> Result<Complex64, EvalError> {
        if w.im == 0.0 {
            return Ok(Complex64::new(self.cauchy_real(w.re)?, 0.0));
        }
        let mut derivs = [Complex64::default(); 4];
        for p in &self.pieces {
            piece_derivs_complex(w, p.interval.lo, p.interval.hi, &p.coeffs, 0, &mut derivs);
        }
        Ok(derivs[0])
    }

    /// `C^{(order)}(w)` for `order` in `1..=3`; same domain as [`Self::cauchy`]
    /// for non-real `w`, while real points additionally admit the analytic
    /// extension through plateaus (see [`Self::cauchy_deriv_real`]).
    pub fn cauchy_deriv(&self, w: Complex64, order: u8) -> Result<Complex64, EvalError> {
        if !(1..=3).contains(&order) {
            return Err(EvalError::BadDerivOrder { order });
        }
        if w.im == 0.0 {
            return Ok(Complex64::new(self.cauchy_deriv_real(w.re, order)?, 0.0));
        }
        let mut derivs = [Complex64::default(); 4];
        for p in &self.pieces {
            piece_derivs_complex(
                w,
                p.interval.lo,
                p.interval.hi,
                &p.coeffs,
                order as usize,
                &mut derivs,
            );
        }
        Ok(derivs[order as usize])
    }

    /// Real-line transform for `t` strictly off the support, computed with
    /// real logarithms of positive ratios only.
    pub fn cauchy_real(&self, t: f64) -> Result<f64, EvalError> {
        if self.on_support(t) {
            return Err(EvalError::PointOnSupport { t });
        }
        let mut derivs = [0.0; 4];
        for p in &self.pieces {
            piece_derivs_real(t, p.interval.lo, p.interval.hi, &p.coeffs, 0, &mut derivs);
        }
        Ok(derivs[0])
    }

    /// Real-line derivatives `C^{(order)}(t)`. Off the support this is the
    /// plain derivative; inside a plateau `(l, h)` it is the analytic
    /// extension `C_I^{(order)}(t) + d^order/dt^order [log(t-l) - log(t-h)]`,
    /// where `C_I` omits the plateau's mass. Other support points error.
    pub fn cauchy_deriv_real(&self, t: f64, order: u8) -> Result<f64, EvalError> {
        if !(1..=3).contains(&order) {
            return Err(EvalError::BadDerivOrder { order });
        }
        let j = order as usize;
        if !self.on_support(t) {
            let mut derivs = [0.0; 4];
            for p in &self.pieces {
                piece_derivs_real(t, p.interval.lo, p.interval.hi, &p.coeffs, j, &mut derivs);
            }
            return Ok(derivs[j]);
        }
        if let Some(run) = self.plateau_around(t) {
            let base = self.cauchy_derivs_excluding(t, run.lo, run.hi, j)[j];
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            let fact = factorial(j - 1);
            let rational = sign
                * fact
                * (1.0 / (t - run.lo).powi(j as i32) - 1.0 / (t - run.hi).powi(j as i32));
            return Ok(base + rational);
        }
        Err(EvalError::PointOnSupport { t })
    }

    /// The plateau run strictly containing `t`, if any.
    pub(crate) fn plateau_around(&self, t: f64) -> Option<Interval> {
        self.plateaus.iter().copied().find(|run| run.contains_open(t))
    }

    /// Real derivatives (orders `0..=max_order`) of the transform of the
    /// density with every piece inside `[lo, hi]` removed. `t` may lie inside
    /// the excluded zone; it must be off the remaining pieces.
    pub(crate) fn cauchy_derivs_excluding(
        &self,
        t: f64,
        lo: f64,
        hi: f64,
        max_order: usize,
    ) -> [f64; 4] {
        let mut derivs = [0.0; 4];
        for p in &self.pieces {
            if p.interval.lo >= lo - tol::TOUCH && p.interval.hi <= hi + tol::TOUCH {
                continue;
            }
            piece_derivs_real(t, p.interval.lo, p.interval.hi, &p.coeffs, max_order, &mut derivs);
        }
        derivs
    }

    /// Decomposition of the boundary parameter set `R` into tagged
    /// components, ordered left to right.
    pub fn r_decomposition(&self) -> &[RComponent] {
        &self.rdecomp
    }

    /// The component containing (or, for point classes, matching) `t`.
    pub fn locate(&self, t: f64) -> Option<&RComponent> {
        if !t.is_finite() {
            return None;
        }
        let window = tol::POINT_MATCH * (1.0 + t.abs());
        self.rdecomp
            .iter()
            .find(|c| c.is_point() && (t - c.lo).abs() <= window)
            .or_else(|| self.rdecomp.iter().find(|c| c.lo < t && t < c.hi))
    }

    fn compute_rdecomp(&self) -> Vec<RComponent> {
        let mut comps: Vec<RComponent> = Vec::new();

        // Gaps of the support, split at zeros of the transform.
        let mut gap_edges = vec![(f64::NEG_INFINITY, self.support[0].lo)];
        for pair in self.support.windows(2) {
            gap_edges.push((pair[0].hi, pair[1].lo));
        }
        gap_edges.push((self.support.last().unwrap().hi, f64::INFINITY));
        for (lo, hi) in gap_edges {
            if lo.is_finite() && hi.is_finite() {
                if let Some(z) = self.gap_transform_zero(lo, hi) {
                    comps.push(RComponent { class: RClass::Gap, lo, hi: z });
                    comps.push(RComponent { class: RClass::GapZero, lo: z, hi: z });
                    comps.push(RComponent { class: RClass::Gap, lo: z, hi });
                    continue;
                }
            }
            comps.push(RComponent { class: RClass::Gap, lo, hi });
        }

        // Plateau interiors, plus step points where a plateau meets a gap.
        for run in &self.plateaus {
            comps.push(RComponent { class: RClass::Plateau, lo: run.lo, hi: run.hi });
            if self.is_support_right_edge(run.hi) {
                comps.push(RComponent { class: RClass::StepDown, lo: run.hi, hi: run.hi });
            }
            if self.is_support_left_edge(run.lo) {
                comps.push(RComponent { class: RClass::StepUp, lo: run.lo, hi: run.lo });
            }
        }

        comps.sort_by(|x, y| x.lo.total_cmp(&y.lo).then(x.hi.total_cmp(&y.hi)));
        comps
    }

    fn is_support_right_edge(&self, t: f64) -> bool {
        self.support
            .iter()
            .any(|iv| (iv.hi - t).abs() <= tol::TOUCH * t.abs().max(1.0))
    }

    fn is_support_left_edge(&self, t: f64) -> bool {
        self.support
            .iter()
            .any(|iv| (iv.lo - t).abs() <= tol::TOUCH * t.abs().max(1.0))
    }

    /// Zero of the transform inside a bounded support gap, if present. The
    /// transform is strictly decreasing there, so a sign change pins a unique
    /// zero; bisection is polished by Newton.
    fn gap_transform_zero(&self, lo: f64, hi: f64) -> Option<f64> {
        let width = hi - lo;
        let probe = |x: f64| self.cauchy_real(x).expect("gap interior is off support");
        let xa = lo + width * tol::GAP_PROBE;
        let xb = hi - width * tol::GAP_PROBE;
        let (va, vb) = (probe(xa), probe(xb));
        if !(va > 0.0 && vb < 0.0) {
            return None;
        }
        let (mut x0, mut x1) = (xa, xb);
        for _ in 0..200 {
            let xm = 0.5 * (x0 + x1);
            if probe(xm) > 0.0 {
                x0 = xm;
            } else {
                x1 = xm;
            }
            if x1 - x0 < tol::GAP_ZERO {
                break;
            }
        }
        let mut z = 0.5 * (x0 + x1);
        for _ in 0..8 {
            let f = probe(z);
            let d = self.cauchy_deriv_real(z, 1).ok()?;
            let step = f / d;
            let next = z - step;
            if next > lo && next < hi {
                z = next;
            }
            if step.abs() < tol::GAP_ZERO {
                break;
            }
        }
        Some(z)
    }

    /// One-sided analytic extension of `exp(±C)` at `t ∈ R`.
    pub fn extended_exp_c(&self, t: f64) -> Result<ExtendedExp, EvalError> {
        let comp = *self.locate(t).ok_or(EvalError::NotInR { t })?;
        match comp.class {
            RClass::Gap | RClass::GapZero => {
                let c = self.cauchy_real(t)?;
                Ok(ExtendedExp { exp_c: c.exp(), exp_neg_c: (-c).exp() })
            }
            RClass::Plateau => {
                let ci = self.cauchy_derivs_excluding(t, comp.lo, comp.hi, 0)[0];
                let v = ci.exp() * (t - comp.lo) / (t - comp.hi);
                Ok(ExtendedExp { exp_c: v, exp_neg_c: 1.0 / v })
            }
            RClass::StepDown => Ok(ExtendedExp { exp_c: f64::INFINITY, exp_neg_c: 0.0 }),
            RClass::StepUp => Ok(ExtendedExp { exp_c: 0.0, exp_neg_c: f64::INFINITY }),
        }
    }

    /// Context for the boundary formulas at a step point `t`: the far end of
    /// the adjacent plateau, the far end of the adjacent gap, and derivatives
    /// (orders `0..=max_order`) of the transform with the whole zone between
    /// those two ends excluded.
    pub(crate) fn step_context(&self, t: f64, class: RClass, max_order: usize) -> Option<StepContext> {
        let window = tol::POINT_MATCH * (1.0 + t.abs());
        match class {
            RClass::StepDown => {
                let run = self
                    .plateaus
                    .iter()
                    .find(|r| (r.hi - t).abs() <= window)?;
                let gap_hi = self
                    .rdecomp
                    .iter()
                    .find(|c| c.class == RClass::Gap && (c.lo - t).abs() <= window)
                    .map_or(f64::INFINITY, |c| c.hi);
                let derivs = self.cauchy_derivs_excluding(t, run.lo, gap_hi, max_order);
                Some(StepContext { plateau_end: run.lo, gap_end: gap_hi, derivs })
            }
            RClass::StepUp => {
                let run = self
                    .plateaus
                    .iter()
                    .find(|r| (r.lo - t).abs() <= window)?;
                let gap_lo = self
                    .rdecomp
                    .iter()
                    .find(|c| c.class == RClass::Gap && (c.hi - t).abs() <= window)
                    .map_or(f64::NEG_INFINITY, |c| c.lo);
                let derivs = self.cauchy_derivs_excluding(t, gap_lo, run.hi, max_order);
                Some(StepContext { plateau_end: run.hi, gap_end: gap_lo, derivs })
            }
            _ => None,
        }
    }

    /// Support decomposition around a rescaled position `(chi, eta)` inside
    /// the closed trapezoid `{ b >= chi >= chi+eta-1 >= a, 0 <= eta <= 1 }`.
    pub fn support_sets(&self, chi: f64, eta: f64) -> Result<SupportSets, EvalError> {
        let lo_edge = chi + eta - 1.0;
        let slack = 1e-12 * (1.0 + chi.abs() + self.b.abs() + self.a.abs());
        if !(eta >= -slack
            && eta <= 1.0 + slack
            && chi <= self.b + slack
            && lo_edge >= self.a - slack)
        {
            return Err(EvalError::OutOfTrapezoid { chi, eta });
        }

        let upper = clip_intervals(&self.support, chi, self.b);
        let lower = clip_intervals(&self.support, self.a, lo_edge);
        let middle = subtract_open(&[Interval::new(lo_edge, chi)], &self.plateaus);

        let mut all: Vec<Interval> = Vec::new();
        all.extend(upper.iter().copied());
        all.extend(middle.iter().copied());
        all.extend(lower.iter().copied());
        all.sort_by(|x, y| x.lo.total_cmp(&y.lo));
        let merged = merge_touching(all.into_iter());

        let mut sets = SupportSets {
            upper,
            middle,
            lower,
            merged: merged.clone(),
            ..SupportSets::default()
        };
        if merged.is_empty() {
            return Ok(sets);
        }
        let s_lo = merged.first().unwrap().lo;
        let s_hi = merged.last().unwrap().hi;
        sets.left_tail = Some(Interval::new(f64::NEG_INFINITY, s_lo));
        sets.right_tail = Some(Interval::new(s_hi, f64::INFINITY));

        let sup_of = |v: &[Interval]| v.last().map(|iv| iv.hi);
        let inf_of = |v: &[Interval]| v.first().map(|iv| iv.lo);
        if let (Some(sup_mid), Some(inf_up)) = (sup_of(&sets.middle), inf_of(&sets.upper)) {
            if inf_up > sup_mid {
                sets.upper_gap = Some(Interval::new(sup_mid, inf_up));
            }
        }
        if let (Some(sup_low), Some(inf_mid)) = (sup_of(&sets.lower), inf_of(&sets.middle)) {
            if inf_mid > sup_low {
                sets.lower_gap = Some(Interval::new(sup_low, inf_mid));
            }
        }

        for pair in merged.windows(2) {
            let gap = Interval::new(pair[0].hi, pair[1].lo);
            let named = [sets.upper_gap, sets.lower_gap]
                .iter()
                .flatten()
                .any(|g| g.lo == gap.lo && g.hi == gap.hi);
            if !named {
                sets.inner_gaps.push(gap);
            }
        }
        Ok(sets)
    }

    /// Serialize to the on-disk JSON format with 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n  \"pieces\": [\n");
        for (i, p) in self.pieces.iter().enumerate() {
            out.push_str("    {\"interval\": [");
            out.push_str(&format!("{:.16e}, {:.16e}", p.interval.lo, p.interval.hi));
            out.push_str("], \"poly\": [");
            for (j, c) in p.coeffs.iter().enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                out.push_str(&format!("{c:.16e}"));
            }
            out.push_str("]}");
            if i + 1 < self.pieces.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("  ]\n}\n");
        out
    }

    /// Parse and validate the on-disk JSON format.
    pub fn from_json(text: &str) -> Result<Self, EvalError> {
        #[derive(Deserialize)]
        struct RawPiece {
            interval: [f64; 2],
            poly: Vec<f64>,
        }
        #[derive(Deserialize)]
        struct RawFile {
            pieces: Vec<RawPiece>,
        }
        let raw: RawFile =
            serde_json::from_str(text).map_err(|e| EvalError::Io(e.to_string()))?;
        let pieces: Vec<DensityPiece> = raw
            .pieces
            .into_iter()
            .map(|p| DensityPiece::new(p.interval[0], p.interval[1], p.poly))
            .collect();
        for p in &pieces {
            if !p.interval.lo.is_finite()
                || !p.interval.hi.is_finite()
                || p.coeffs.iter().any(|c| !c.is_finite())
            {
                return Err(EvalError::Io("non-finite number in measure file".into()));
            }
        }
        validate(pieces).map_err(|issues| {
            let text = issues.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; ");
            EvalError::Io(text)
        })
    }
}

/// See [`Measure::step_context`].
pub(crate) struct StepContext {
    /// Far end of the plateau adjacent to the step point.
    pub plateau_end: f64,
    /// Far end of the support gap adjacent to the step point (may be infinite).
    #[allow(dead_code)]
    pub gap_end: f64,
    /// Transform derivatives with the plateau-plus-gap zone excluded.
    pub derivs: [f64; 4],
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Intersect closed intervals with `[lo, hi]`, dropping degenerate results.
fn clip_intervals(ivs: &[Interval], lo: f64, hi: f64) -> Vec<Interval> {
    ivs.iter()
        .filter_map(|iv| {
            let l = iv.lo.max(lo);
            let h = iv.hi.min(hi);
            (h > l).then_some(Interval::new(l, h))
        })
        .collect()
}

/// Remove the open interiors of `holes` from the closed intervals `base`.
fn subtract_open(base: &[Interval], holes: &[Interval]) -> Vec<Interval> {
    let mut out = Vec::new();
    for &iv in base {
        let mut cursor = iv.lo;
        for h in holes {
            if h.hi <= cursor || h.lo >= iv.hi {
                continue;
            }
            if h.lo > cursor {
                out.push(Interval::new(cursor, h.lo));
            }
            cursor = cursor.max(h.hi);
        }
        if iv.hi > cursor {
            out.push(Interval::new(cursor, iv.hi));
        }
    }
    out
}

/// Accumulate the contributions of one polynomial piece on `[p, q]` to the
/// real transform and its derivatives `0..=max_order`:
/// `derivs[j] += d^j/dt^j ∫_p^q poly(x)/(t-x) dx`. Requires `t ∉ [p, q]`.
pub(crate) fn piece_derivs_real(
    t: f64,
    p: f64,
    q: f64,
    coeffs: &[f64],
    max_order: usize,
    derivs: &mut [f64; 4],
) {
    let deg = coeffs.len();
    if deg == 0 {
        return;
    }
    // d[m][k] = ∫_p^q x^k / (t-x)^m dx
    let mut d = [[0.0f64; 9]; 5];
    d[1][0] = ((q - p) / (t - q)).ln_1p();
    for k in 1..deg {
        d[1][k] = t * d[1][k - 1] - (q.powi(k as i32) - p.powi(k as i32)) / k as f64;
    }
    for m in 2..=(max_order + 1) {
        let e = 1 - m as i32;
        d[m][0] = ((t - q).powi(e) - (t - p).powi(e)) / (m as f64 - 1.0);
        for k in 1..deg {
            d[m][k] = t * d[m][k - 1] - d[m - 1][k - 1];
        }
    }
    for j in 0..=max_order {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let fact = factorial(j);
        let sum: f64 = coeffs.iter().enumerate().map(|(k, c)| c * d[j + 1][k]).sum();
        derivs[j] += sign * fact * sum;
    }
}

/// Complex-plane version of [`piece_derivs_real`]; principal logarithms.
pub(crate) fn piece_derivs_complex(
    w: Complex64,
    p: f64,
    q: f64,
    coeffs: &[f64],
    max_order: usize,
    derivs: &mut [Complex64; 4],
) {
    let deg = coeffs.len();
    if deg == 0 {
        return;
    }
    let zero = Complex64::default();
    let mut d = [[zero; 9]; 5];
    d[1][0] = (w - p).ln() - (w - q).ln();
    for k in 1..deg {
        d[1][k] = w * d[1][k - 1] - (q.powi(k as i32) - p.powi(k as i32)) / k as f64;
    }
    for m in 2..=(max_order + 1) {
        let e = 1 - m as i32;
        d[m][0] = ((w - q).powi(e) - (w - p).powi(e)) / (m as f64 - 1.0);
        for k in 1..deg {
            d[m][k] = w * d[m][k - 1] - d[m - 1][k - 1];
        }
    }
    for j in 0..=max_order {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let fact = factorial(j);
        let sum: Complex64 = coeffs
            .iter()
            .enumerate()
            .fold(zero, |acc, (k, c)| acc + d[j + 1][k].scale(*c));
        derivs[j] += sum.scale(sign * fact);
    }
}

/// Windowed transforms used by the saddle-function evaluation on the real
/// line: derivatives (orders `0..=max_order`) of
/// `∫_{window} phi(x)/(t-x) dx` (`of_density`) or of
/// `∫_{window} (1-phi(x))/(t-x) dx` (`of_complement`). The point `t` must be
/// at positive distance from every point of the window where the integrand's
/// density is nonzero; otherwise `None`.
pub(crate) fn window_derivs(
    m: &Measure,
    t: f64,
    w_lo: f64,
    w_hi: f64,
    complement: bool,
    max_order: usize,
) -> Option<[f64; 4]> {
    let mut derivs = [0.0; 4];
    if w_hi <= w_lo {
        return Some(derivs);
    }
    let guard = 1e-12 * (1.0 + t.abs());
    if complement {
        // Density-1 gaps inside the window, minus plateau pieces (where the
        // complement density vanishes identically and contributes nothing).
        let mut covered: Vec<Interval> = Vec::new();
        for p in m.pieces() {
            let lo = p.interval.lo.max(w_lo);
            let hi = p.interval.hi.min(w_hi);
            if hi <= lo {
                continue;
            }
            covered.push(Interval::new(lo, hi));
            if p.is_plateau() {
                continue;
            }
            if t > lo - guard && t < hi + guard {
                return None;
            }
            let mut flipped: Vec<f64> = p.coeffs.iter().map(|c| -c).collect();
            if flipped.is_empty() {
                flipped.push(0.0);
            }
            flipped[0] += 1.0;
            piece_derivs_real(t, lo, hi, &flipped, max_order, &mut derivs);
        }
        covered.sort_by(|x, y| x.lo.total_cmp(&y.lo));
        for gap in subtract_open(&[Interval::new(w_lo, w_hi)], &covered) {
            if gap.len() <= 0.0 {
                continue;
            }
            if t > gap.lo - guard && t < gap.hi + guard {
                return None;
            }
            piece_derivs_real(t, gap.lo, gap.hi, &[1.0], max_order, &mut derivs);
        }
        Some(derivs)
    } else {
        for p in m.pieces() {
            let lo = p.interval.lo.max(w_lo);
            let hi = p.interval.hi.min(w_hi);
            if hi <= lo {
                continue;
            }
            if t > lo - guard && t < hi + guard {
                return None;
            }
            piece_derivs_real(t, lo, hi, &p.coeffs, max_order, &mut derivs);
        }
        Some(derivs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_density() -> Measure {
        validate(vec![DensityPiece::new(-1.0, 1.0, vec![0.5])]).unwrap()
    }

    fn two_blocks() -> Measure {
        // 1/2 on [0,1] and [2,3]
        validate(vec![
            DensityPiece::new(0.0, 1.0, vec![0.5]),
            DensityPiece::new(2.0, 3.0, vec![0.5]),
        ])
        .unwrap()
    }

    fn two_plateaus() -> Measure {
        // 1 on [0,1/2] and [1,3/2]
        validate(vec![
            DensityPiece::new(0.0, 0.5, vec![1.0]),
            DensityPiece::new(1.0, 1.5, vec![1.0]),
        ])
        .unwrap()
    }

    #[test]
    fn validation_reports_each_issue() {
        let err = validate(vec![DensityPiece::new(0.0, 1.0, vec![0.5])]).unwrap_err();
        assert!(err.iter().any(|i| matches!(i, ValidationIssue::MassNotOne { .. })));
        assert!(err.iter().any(|i| matches!(i, ValidationIssue::SupportTooNarrow { .. })));

        let err = validate(vec![
            DensityPiece::new(0.0, 2.0, vec![0.75]),
            DensityPiece::new(1.5, 2.5, vec![-0.5]),
        ])
        .unwrap_err();
        assert!(err.iter().any(|i| matches!(i, ValidationIssue::OverlappingPieces { .. })));

        let err = validate(vec![DensityPiece::new(0.0, 2.0, vec![-0.1, 0.6])]).unwrap_err();
        assert!(err.iter().any(|i| matches!(i, ValidationIssue::DensityOutOfRange { .. })));

        let err = validate(vec![DensityPiece::new(1.0, 1.0, vec![0.5])]).unwrap_err();
        assert!(err.iter().any(|i| matches!(i, ValidationIssue::EmptyInterval { .. })));
    }

    #[test]
    fn exact_unit_mass_at_width_one_is_still_too_narrow() {
        let err = validate(vec![DensityPiece::new(0.0, 1.0, vec![1.0])]).unwrap_err();
        assert!(err.iter().any(|i| matches!(i, ValidationIssue::SupportTooNarrow { .. })));
    }

    #[test]
    fn support_and_plateaus() {
        let m = two_plateaus();
        assert_eq!(m.support().len(), 2);
        assert_eq!(m.plateaus().len(), 2);
        assert_eq!(m.a(), 0.0);
        assert_eq!(m.b(), 1.5);

        let m = half_density();
        assert_eq!(m.support(), &[Interval::new(-1.0, 1.0)]);
        assert!(m.plateaus().is_empty());
    }

    #[test]
    fn touching_pieces_merge() {
        // 1+x on [-1,0], 1-x on [0,1]
        let m = validate(vec![
            DensityPiece::new(-1.0, 0.0, vec![1.0, 1.0]),
            DensityPiece::new(0.0, 1.0, vec![1.0, -1.0]),
        ])
        .unwrap();
        assert_eq!(m.support(), &[Interval::new(-1.0, 1.0)]);
        assert!(m.plateaus().is_empty());
    }

    #[test]
    fn cauchy_closed_form_on_symmetric_block() {
        let m = half_density();
        // C(i) = (1/2)(log(i+1) - log(i-1)) = -i*pi/4
        let c = m.cauchy(Complex64::new(0.0, 1.0)).unwrap();
        assert!((c - Complex64::new(0.0, -std::f64::consts::FRAC_PI_4)).norm() < 1e-15);
        // C(3) = (1/2) ln 2, C'(3) = -1/8
        assert!((m.cauchy_real(3.0).unwrap() - 0.5 * 2.0_f64.ln()).abs() < 1e-15);
        assert!((m.cauchy_deriv_real(3.0, 1).unwrap() + 0.125).abs() < 1e-15);
    }

    #[test]
    fn cauchy_rejects_support_points() {
        let m = half_density();
        assert!(matches!(
            m.cauchy_real(0.25),
            Err(EvalError::PointOnSupport { .. })
        ));
        assert!(m.cauchy_real(1.0 + 1e-12).is_err() || m.cauchy_real(1.5).is_ok());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let m = two_blocks();
        let w = Complex64::new(0.7, 0.9);
        let h = 1e-5;
        for order in 1..=3u8 {
            let lower = if order == 1 {
                m.cauchy(w - h).unwrap()
            } else {
                m.cauchy_deriv(w - h, order - 1).unwrap()
            };
            let upper = if order == 1 {
                m.cauchy(w + h).unwrap()
            } else {
                m.cauchy_deriv(w + h, order - 1).unwrap()
            };
            let fd = (upper - lower) / (2.0 * h);
            let exact = m.cauchy_deriv(w, order).unwrap();
            assert!(
                (fd - exact).norm() <= 1e-6 * (1.0 + exact.norm()),
                "order {order}: fd {fd} vs exact {exact}"
            );
        }
    }

    #[test]
    fn schwarz_reflection_is_exact() {
        let m = two_blocks();
        let w = Complex64::new(1.3, 0.45);
        let c = m.cauchy(w).unwrap();
        let cc = m.cauchy(w.conj()).unwrap();
        assert_eq!(c.re, cc.re);
        assert_eq!(c.im, -cc.im);
    }

    #[test]
    fn r_decomposition_blocks() {
        // Gap (1,2) splits at the transform zero 3/2; unbounded gaps intact.
        let m = two_blocks();
        let classes: Vec<(RClass, f64, f64)> =
            m.r_decomposition().iter().map(|c| (c.class, c.lo, c.hi)).collect();
        assert!(classes.contains(&(RClass::GapZero, 1.5, 1.5)));
        assert!(classes
            .iter()
            .any(|&(cl, lo, hi)| cl == RClass::Gap && lo == 1.0 && (hi - 1.5).abs() < 1e-9));
        assert!(classes
            .iter()
            .any(|&(cl, lo, hi)| cl == RClass::Gap && (lo - 1.5).abs() < 1e-9 && hi == 2.0));
        assert!(classes.iter().any(|&(cl, _, hi)| cl == RClass::Gap && hi.is_infinite()));
    }

    #[test]
    fn r_decomposition_plateau_steps() {
        let m = two_plateaus();
        let comps = m.r_decomposition();
        let find = |class: RClass, at: f64| {
            comps
                .iter()
                .any(|c| c.class == class && (c.lo - at).abs() < 1e-12 && c.is_point())
        };
        assert!(find(RClass::StepUp, 0.0));
        assert!(find(RClass::StepDown, 0.5));
        assert!(find(RClass::StepUp, 1.0));
        assert!(find(RClass::StepDown, 1.5));
        assert!(comps
            .iter()
            .any(|c| c.class == RClass::Plateau && c.lo == 0.0 && c.hi == 0.5));
        // Gap (1/2, 1) splits at the transform zero 3/4 by symmetry.
        assert!(comps
            .iter()
            .any(|c| c.class == RClass::GapZero && (c.lo - 0.75).abs() < 1e-10));
    }

    #[test]
    fn locate_prefers_point_components() {
        let m = two_blocks();
        let c = m.locate(1.5 + 1e-12).unwrap();
        assert_eq!(c.class, RClass::GapZero);
        assert!(m.locate(0.5).is_none()); // on support
        assert_eq!(m.locate(5.0).unwrap().class, RClass::Gap);
    }

    #[test]
    fn extended_exp_branches() {
        let m = two_plateaus();
        // Inside a plateau the extension of e^C is strictly negative.
        let e = m.extended_exp_c(0.25).unwrap();
        assert!(e.exp_c < 0.0);
        assert!((e.exp_c * e.exp_neg_c - 1.0).abs() < 1e-12);
        // At step points one branch vanishes exactly.
        let down = m.extended_exp_c(1.5).unwrap();
        assert_eq!(down.exp_neg_c, 0.0);
        let up = m.extended_exp_c(1.0).unwrap();
        assert_eq!(up.exp_c, 0.0);
        // Hand value inside the gap: e^{C(t)} > 0.
        assert!(m.extended_exp_c(0.8).unwrap().exp_c > 0.0);
        assert!(matches!(m.extended_exp_c(0.25 + 10.0), Ok(_)));
    }

    #[test]
    fn plateau_extension_of_derivative_is_positive() {
        // Analytic extension of C' through a plateau must be > 0 there.
        let m = two_plateaus();
        for t in [0.1, 0.25, 0.4, 1.2] {
            let d = m.cauchy_deriv_real(t, 1).unwrap();
            assert!(d > 0.0, "C'({t}) extension = {d}");
        }
        // Off-support derivative is strictly negative.
        assert!(m.cauchy_deriv_real(0.8, 1).unwrap() < 0.0);
    }

    #[test]
    fn support_sets_shapes() {
        let m = two_plateaus();
        // Centered query: all three sets nonempty.
        let s = m.support_sets(1.1, 0.5).unwrap();
        assert!(!s.upper.is_empty() && !s.middle.is_empty() && !s.lower.is_empty());
        // eta = 1 forces an empty middle window.
        let s = m.support_sets(0.75, 1.0).unwrap();
        assert!(s.middle.is_empty());
        assert!(matches!(
            m.support_sets(9.0, 0.5),
            Err(EvalError::OutOfTrapezoid { .. })
        ));
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let m = two_blocks();
        let text = m.to_json();
        let back = Measure::from_json(&text).unwrap();
        assert_eq!(back.pieces(), m.pieces());
        assert!(Measure::from_json("{\"pieces\": []}").is_err());
        assert!(Measure::from_json("{\"pieces\": [{\"interval\": [0, 1e999], \"poly\": [1]}]}").is_err());
        assert!(Measure::from_json("not json").is_err());
    }

    #[test]
    fn windowed_transform_splits_consistently() {
        // For t outside the support, the three-window split with eta = 1
        // degenerates and the full-window integrals recombine to C(t).
        let m = two_blocks();
        let t = 4.0;
        let full = window_derivs(&m, t, m.a(), m.b(), false, 0).unwrap()[0];
        assert!((full - m.cauchy_real(t).unwrap()).abs() < 1e-12);
        let left = window_derivs(&m, t, m.a(), 1.4, false, 0).unwrap()[0];
        let right = window_derivs(&m, t, 1.4, m.b(), false, 0).unwrap()[0];
        assert!((left + right - full).abs() < 1e-12);
        // Complement window over the bare gap integrates density 1 there.
        let comp = window_derivs(&m, t, 1.0, 2.0, true, 0).unwrap()[0];
        let lebesgue = ((t - 1.0) / (t - 2.0)).ln();
        assert!((comp - lebesgue).abs() < 1e-12, "comp {comp} vs {lebesgue}");
    }
}
