//! The saddle function of a position `(chi, eta)`, its roots, and the
//! boundary-to-disk correspondence between liquid positions and upper-half
//! plane points.
//!
//! For a fixed profile the function of interest is the derivative of the
//! large-deviation action,
//!
//! ```text
//! f'(w) = C(w) + log(w - chi) - log(w - chi - eta + 1),
//! ```
//!
//! equivalently a Cauchy-type integral of the signed density that is `phi`
//! above `chi` and below `chi+eta-1`, and `phi - 1` in between. A position
//! is *liquid* exactly when `f'` has a non-real root; that root (one per
//! conjugate pair, reported in the upper half plane) is unique and simple,
//! and the map back from the root to `(chi, eta)` is explicit. Everything
//! here is pure and immutable; concurrent use is safe.

use crate::measure::{window_derivs, EvalError, Interval, Measure, SupportSets};
use num_complex::Complex64;
use thiserror::Error;

/// Tolerances for root work, chosen once so every consumer agrees.
mod tol {
    /// Relative threshold deciding whether a derivative "vanishes" when
    /// reading off a root's multiplicity.
    pub const MULTIPLICITY: f64 = 1e-7;
    /// Newton termination: step below `1e-13 * (1 + |w|)`.
    pub const NEWTON_STEP: f64 = 1e-13;
    /// Residual target for a polished root: `1e-12 * (1 + |C'|)`.
    pub const RESIDUAL: f64 = 1e-12;
    /// Minimum height of winding rectangles above the real axis.
    pub const RECT_FLOOR: f64 = 1e-6;
    /// Distance below which a counting-region boundary is rejected.
    pub const BOUNDARY_CLEAR: f64 = 1e-6;
    /// An upper-half root must clear the axis by this much to count.
    pub const IM_FLOOR: f64 = 1e-9;
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SaddleError {
    #[error("w = {w} lies on the singular set of the saddle function")]
    PointOnSingularSet { w: Complex64 },
    #[error("root search stalled in [{re_lo}, {re_hi}] x [{im_lo}, {im_hi}] (winding {winding})")]
    ConvergenceFailure { re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64, winding: i64 },
    #[error("position map denominator collapsed at w = {w}")]
    DegenerateDenominator { w: Complex64 },
    #[error("w = {w} must lie strictly in the upper half plane")]
    UpperHalfRequired { w: Complex64 },
    #[error("counting-region boundary comes within {dist:.3e} of the singular set or a root")]
    BoundaryTooClose { dist: f64 },
    #[error("all derivatives through order 4 vanish at t = {t}; multiplicity undecidable")]
    AmbiguousMultiplicity { t: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Where a root of the saddle function lives: the upper half plane, one of
/// the four outer/inner gap intervals flanking the singular set, or one of
/// the remaining bounded real components (indexed left to right).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootRegion {
    UpperHalf,
    RightTail,
    LeftTail,
    UpperGap,
    LowerGap,
    InnerGap(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootEntry {
    /// The root; real roots have zero imaginary part, non-real roots are
    /// reported by their upper-half representative.
    pub location: Complex64,
    pub multiplicity: u8,
    pub region: RootRegion,
}

/// Every root of the saddle function, found by argument-principle counting
/// in the upper half plane and sign-change analysis on the real components.
#[derive(Debug, Clone, Default)]
pub struct RootReport {
    pub roots: Vec<RootEntry>,
}

impl RootReport {
    /// Total count with multiplicity in the given region kind.
    pub fn count_in(&self, pred: impl Fn(RootRegion) -> bool) -> usize {
        self.roots
            .iter()
            .filter(|r| pred(r.region))
            .map(|r| r.multiplicity as usize)
            .sum()
    }
}

/// Region argument for [`SaddleContext::count_roots`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CountRegion {
    /// An axis-aligned rectangle strictly inside the upper half plane.
    Rectangle { re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64 },
    /// An open real interval clear of the singular set.
    RealInterval { lo: f64, hi: f64 },
}

/// A profile together with a position `(chi, eta)` in its closed trapezoid
/// `{ b >= chi >= chi+eta-1 >= a, 0 <= eta <= 1 }`, with the support
/// decomposition of the singular set cached.
#[derive(Debug, Clone)]
pub struct SaddleContext<'m> {
    measure: &'m Measure,
    chi: f64,
    eta: f64,
    sets: SupportSets,
}

impl<'m> SaddleContext<'m> {
    pub fn new(measure: &'m Measure, chi: f64, eta: f64) -> Result<Self, EvalError> {
        let sets = measure.support_sets(chi, eta)?;
        Ok(SaddleContext { measure, chi, eta, sets })
    }

    pub fn measure(&self) -> &Measure {
        self.measure
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// The cached support decomposition around this position.
    pub fn support_sets(&self) -> &SupportSets {
        &self.sets
    }

    fn low_edge(&self) -> f64 {
        self.chi + self.eta - 1.0
    }

    /// Whether the two logarithm terms cancel exactly (full-height position):
    /// the saddle derivative degenerates to the plain transform.
    fn full_height(&self) -> bool {
        self.eta >= 1.0 - 1e-14
    }

    /// `f'(w)`. Off the real axis this uses principal logarithms; on the
    /// axis it uses the three-window split of the signed density, which is
    /// finite exactly off the singular set.
    pub fn f_prime(&self, w: Complex64) -> Result<Complex64, SaddleError> {
        if w.im == 0.0 {
            return Ok(Complex64::new(self.f_derivs_real(w.re, 0)?[0], 0.0));
        }
        let c = self.measure.cauchy(w)?;
        if self.full_height() {
            return Ok(c);
        }
        Ok(c + (w - self.chi).ln() - (w - self.low_edge()).ln())
    }

    /// `f^{(order)}(w)` for `order` in `1..=4`. Real arguments are routed
    /// through [`Self::f_derivs_real`].
    pub fn f_deriv(&self, w: Complex64, order: u8) -> Result<Complex64, SaddleError> {
        assert!((1..=4).contains(&order), "order must lie in 1..=4");
        if order == 1 {
            return self.f_prime(w);
        }
        if w.im == 0.0 {
            return Ok(Complex64::new(
                self.f_derivs_real(w.re, (order - 1) as usize)?[(order - 1) as usize],
                0.0,
            ));
        }
        let c = self.measure.cauchy_deriv(w, order - 1)?;
        if self.full_height() {
            return Ok(c);
        }
        // d^k/dw^k log(w - p) = (-1)^(k-1) (k-1)! / (w - p)^k with k = order-1.
        let k = i32::from(order) - 1;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let fact: f64 = (1..k).map(f64::from).product();
        let rational = (w - self.chi).powi(-k) - (w - self.low_edge()).powi(-k);
        Ok(c + rational.scale(sign * fact))
    }

    /// Derivatives `[f', f'', f''', f'''']` at a real point off the singular
    /// set, via the windowed split: the density above `chi` and below
    /// `chi+eta-1` counts positively, its complement in between negatively.
    pub fn f_derivs_real(&self, t: f64, max_order: usize) -> Result<[f64; 4], SaddleError> {
        let lo_edge = self.low_edge();
        let err = || SaddleError::PointOnSingularSet { w: Complex64::new(t, 0.0) };
        let up = window_derivs(self.measure, t, self.chi, f64::INFINITY, false, max_order)
            .ok_or_else(err)?;
        let mid = window_derivs(self.measure, t, lo_edge, self.chi, true, max_order)
            .ok_or_else(err)?;
        let low = window_derivs(self.measure, t, f64::NEG_INFINITY, lo_edge, false, max_order)
            .ok_or_else(err)?;
        let mut out = [0.0; 4];
        for k in 0..=max_order.min(3) {
            out[k] = up[k] - mid[k] + low[k];
        }
        Ok(out)
    }

    /// The unique upper-half root when the position is liquid, absent
    /// otherwise. Newton from a coarse grid of starts handles the interior
    /// quickly; the argument principle over a shrinking rectangle settles
    /// the remaining cases exactly.
    pub fn upper_root(&self) -> Result<Option<Complex64>, SaddleError> {
        if self.eta <= 1e-14 || self.full_height() {
            // Height-0 positions admit no conjugate pair; at full height the
            // saddle derivative is the plain transform, which maps the upper
            // half plane strictly into the lower one and so never vanishes.
            return Ok(None);
        }
        let (ga, gb) = (self.measure.a(), self.measure.b());
        let span = gb - ga;
        let rect = (ga - 2.0, gb + 2.0, tol::RECT_FLOOR, 2.0 * span);
        for &frac in &[0.5, 0.25, 0.75, 0.1, 0.9] {
            for &height in &[0.5, 0.12, 0.03] {
                let start = Complex64::new(ga + frac * span, height * span);
                if let Some(root) = self.newton(start, 60) {
                    // The derivative also decays to zero at infinity, so a
                    // runaway iterate can satisfy the residual test without
                    // being a root; only accept results inside the bounded
                    // window the winding fallback would scan.
                    if root.im > tol::IM_FLOOR
                        && root.im < rect.3
                        && root.re > rect.0
                        && root.re < rect.1
                    {
                        return Ok(Some(root));
                    }
                }
            }
        }
        if self.sets.middle.is_empty() {
            // The whole middle window is saturated: such positions are
            // frozen and admit no conjugate pair. Skip the quadrature
            // fallback, whose bottom edge would hug the real roots that
            // always exist here.
            return Ok(None);
        }
        // The bottom edge may sit close to a real root of the derivative,
        // which wrecks the quadrature; start with a raised edge, where the
        // integrand is tame and the sum converges in a few hundred nodes,
        // and lower it only if the coarse pass fails to settle. A pair
        // sitting below the final floor would be missed, but such roots
        // are the ones the damped-iteration sweep above finds reliably.
        let mut last_err = None;
        for floor in [1e-2, 1e-3, 1e-4] {
            match self.root_in_rectangle((rect.0, rect.1, floor, rect.3)) {
                Ok(found) => return Ok(found),
                Err(e @ SaddleError::ConvergenceFailure { .. }) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last_err.expect("loop ran at least once"))
    }

    /// Liquid-region membership with the upper-half witness when inside.
    pub fn liquid_membership(&self) -> Result<(bool, Option<Complex64>), SaddleError> {
        let root = self.upper_root()?;
        Ok((root.is_some(), root))
    }

    /// Count roots with multiplicity inside a region whose boundary is
    /// well clear of the singular set and of the roots themselves.
    pub fn count_roots(&self, region: CountRegion) -> Result<usize, SaddleError> {
        match region {
            CountRegion::Rectangle { re_lo, re_hi, im_lo, im_hi } => {
                if !(re_lo < re_hi && 0.0 < im_lo && im_lo < im_hi) {
                    return Err(SaddleError::BoundaryTooClose { dist: im_lo });
                }
                let w = self.winding((re_lo, re_hi, im_lo, im_hi))?;
                usize::try_from(w).map_err(|_| SaddleError::BoundaryTooClose { dist: im_lo })
            }
            CountRegion::RealInterval { lo, hi } => {
                for edge in [lo, hi] {
                    if edge.is_finite() {
                        let d = self.singular_distance(edge);
                        if d < tol::BOUNDARY_CLEAR {
                            return Err(SaddleError::BoundaryTooClose { dist: d });
                        }
                    }
                }
                let roots = self.real_roots_in(lo, hi)?;
                for (t, _) in &roots {
                    let d = (t - lo).abs().min((t - hi).abs());
                    if d < tol::BOUNDARY_CLEAR {
                        return Err(SaddleError::BoundaryTooClose { dist: d });
                    }
                }
                Ok(roots.iter().map(|&(_, m)| m as usize).sum())
            }
        }
    }

    /// Multiplicity (1..=3) of a real root: the position of the first
    /// derivative beyond `f'` that is non-negligible relative to the largest
    /// of them. Consecutive orders carry different units, so order `k` is
    /// weighted by the `(k-1)`-th power of the distance to the nearest
    /// singular point; near a support or window edge the raw derivatives
    /// blow up at consecutive powers of that distance, and an unweighted
    /// maximum would swamp the genuinely leading term and misreport a
    /// steep simple root as degenerate.
    pub fn real_root_multiplicity(&self, t: f64) -> Result<u8, SaddleError> {
        let d = self.f_derivs_real(t, 3)?;
        let mut delta = self.singular_distance(t);
        if !self.full_height() {
            delta = delta.min((t - self.chi).abs()).min((t - self.low_edge()).abs());
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(SaddleError::AmbiguousMultiplicity { t });
        }
        let weighted =
            [d[1].abs(), d[2].abs() * delta, d[3].abs() * delta * delta];
        let scale = weighted[0].max(weighted[1]).max(weighted[2]);
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(SaddleError::AmbiguousMultiplicity { t });
        }
        for m in 1..=3u8 {
            if weighted[(m - 1) as usize] > tol::MULTIPLICITY * scale {
                return Ok(m);
            }
        }
        Ok(3)
    }

    /// All roots of the saddle function: the upper-half root if present and
    /// every real root in the gap components, tagged by region.
    pub fn root_report(&self) -> Result<RootReport, SaddleError> {
        let mut report = RootReport::default();
        if let Some(w) = self.upper_root()? {
            report.roots.push(RootEntry {
                location: w,
                multiplicity: 1,
                region: RootRegion::UpperHalf,
            });
        }
        let scan = |iv: Interval, region: RootRegion, report: &mut RootReport| {
            if let Ok(roots) = self.real_roots_in(iv.lo, iv.hi) {
                for (t, m) in roots {
                    report.roots.push(RootEntry {
                        location: Complex64::new(t, 0.0),
                        multiplicity: m,
                        region,
                    });
                }
            }
        };
        if let Some(iv) = self.sets.right_tail {
            scan(iv, RootRegion::RightTail, &mut report);
        }
        if let Some(iv) = self.sets.left_tail {
            scan(iv, RootRegion::LeftTail, &mut report);
        }
        if let Some(iv) = self.sets.upper_gap {
            scan(iv, RootRegion::UpperGap, &mut report);
        }
        if let Some(iv) = self.sets.lower_gap {
            scan(iv, RootRegion::LowerGap, &mut report);
        }
        for (k, iv) in self.sets.inner_gaps.clone().iter().enumerate() {
            scan(*iv, RootRegion::InnerGap(k), &mut report);
        }
        Ok(report)
    }

    /// Distance from a real point to the union of the three support sets.
    fn singular_distance(&self, t: f64) -> f64 {
        self.sets
            .merged
            .iter()
            .map(|iv| {
                if iv.contains(t) {
                    0.0
                } else {
                    (t - iv.lo).abs().min((t - iv.hi).abs())
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Damped complex Newton on `f'` with `f''` steps.
    fn newton(&self, start: Complex64, max_iter: usize) -> Option<Complex64> {
        let mut w = start;
        let mut value = self.f_prime(w).ok()?;
        for _ in 0..max_iter {
            let deriv = self.f_deriv(w, 2).ok()?;
            if deriv.norm() == 0.0 {
                return None;
            }
            let mut step = value / deriv;
            let mut next = w - step;
            let mut next_value = self.f_prime(next).ok();
            // Halve the step (up to 20 times) while the residual grows.
            let mut halvings = 0;
            while halvings < 20
                && next_value.as_ref().map_or(true, |v| v.norm() > value.norm())
            {
                step = step.scale(0.5);
                next = w - step;
                next_value = self.f_prime(next).ok();
                halvings += 1;
            }
            let next_value = next_value?;
            let done = step.norm() < tol::NEWTON_STEP * (1.0 + w.norm());
            w = next;
            value = next_value;
            if done {
                break;
            }
        }
        let scale = self.measure.cauchy_deriv(w, 1).map(|c| c.norm()).unwrap_or(0.0);
        (value.norm() < tol::RESIDUAL * (1.0 + scale)).then_some(w)
    }

    /// Argument-principle count over a rectangle boundary: trapezoid
    /// integration of `f''/f'`, with the per-side sample count doubled until
    /// the rounded winding stabilizes.
    fn winding(&self, rect: (f64, f64, f64, f64)) -> Result<i64, SaddleError> {
        let (re_lo, re_hi, im_lo, im_hi) = rect;
        let corners = [
            Complex64::new(re_lo, im_lo),
            Complex64::new(re_hi, im_lo),
            Complex64::new(re_hi, im_hi),
            Complex64::new(re_lo, im_hi),
        ];
        let mut per_side = 64usize;
        let mut prev: Option<(i64, f64)> = None;
        while per_side <= 1 << 14 {
            let mut total = Complex64::new(0.0, 0.0);
            for s in 0..4 {
                let (from, to) = (corners[s], corners[(s + 1) % 4]);
                let dw = (to - from).scale(1.0 / per_side as f64);
                let ratio_at = |w: Complex64| -> Result<Complex64, SaddleError> {
                    Ok(self.f_deriv(w, 2)? / self.f_prime(w)?)
                };
                let mut acc = (ratio_at(from)? + ratio_at(to)?).scale(0.5);
                for q in 1..per_side {
                    acc += ratio_at(from + dw.scale(q as f64))?;
                }
                total += acc * dw;
            }
            let estimate = total / Complex64::new(0.0, 2.0 * std::f64::consts::PI);
            let rounded = estimate.re.round();
            let err = (estimate.re - rounded).abs() + estimate.im.abs();
            if err < 0.05 {
                if let Some((p_round, _)) = prev {
                    if p_round == rounded as i64 {
                        return Ok(rounded as i64);
                    }
                }
                prev = Some((rounded as i64, err));
            } else {
                prev = None;
            }
            per_side *= 2;
        }
        Err(SaddleError::ConvergenceFailure {
            re_lo,
            re_hi,
            im_lo,
            im_hi,
            winding: prev.map_or(-1, |(r, _)| r),
        })
    }

    /// Locate a root inside a rectangle known (or suspected) to contain one:
    /// winding-guided bisection of the longer side, then Newton from the
    /// final cell's center.
    fn root_in_rectangle(
        &self,
        rect: (f64, f64, f64, f64),
    ) -> Result<Option<Complex64>, SaddleError> {
        let mut rect = rect;
        let mut count = self.winding(rect)?;
        if count == 0 {
            return Ok(None);
        }
        for _ in 0..60 {
            let (re_lo, re_hi, im_lo, im_hi) = rect;
            if (re_hi - re_lo).max(im_hi - im_lo) < 1e-3 {
                break;
            }
            let mut advanced = false;
            // A split line through the root makes the child windings
            // unstable; nudging the fraction restores a clean count.
            for frac in [0.5, 0.44, 0.58, 0.36] {
                let (first, second) = if re_hi - re_lo >= im_hi - im_lo {
                    let mid = re_lo + frac * (re_hi - re_lo);
                    ((re_lo, mid, im_lo, im_hi), (mid, re_hi, im_lo, im_hi))
                } else {
                    let mid = im_lo + frac * (im_hi - im_lo);
                    ((re_lo, re_hi, im_lo, mid), (re_lo, re_hi, mid, im_hi))
                };
                let picked = match self.winding(first) {
                    Ok(c) if c > 0 => Some((first, c)),
                    Ok(_) => match self.winding(second) {
                        Ok(c) if c > 0 => Some((second, c)),
                        _ => None,
                    },
                    Err(_) => None,
                };
                if let Some((r, c)) = picked {
                    rect = r;
                    count = c;
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
        let center = Complex64::new(0.5 * (rect.0 + rect.1), 0.5 * (rect.2 + rect.3));
        if let Some(root) = self.newton(center, 80) {
            if root.im > tol::IM_FLOOR {
                return Ok(Some(root));
            }
        }
        Err(SaddleError::ConvergenceFailure {
            re_lo: rect.0,
            re_hi: rect.1,
            im_lo: rect.2,
            im_hi: rect.3,
            winding: count,
        })
    }

    /// Real roots (with multiplicity) strictly inside an open interval:
    /// Chebyshev sampling (a tangent chart on unbounded components), sign
    /// changes of `f'` for odd roots, near-zero critical points of `f'` for
    /// even ones.
    fn real_roots_in(&self, lo: f64, hi: f64) -> Result<Vec<(f64, u8)>, SaddleError> {
        // With total mass one and a density between zero and one, the
        // transform term dominates the logarithm term far from the support
        // (compare 1/(t-a) against (1-eta)/(t-chi) via log(1+x) <= x): the
        // derivative is strictly positive beyond (chi - (1-eta) a)/eta and
        // strictly negative below (chi - (1-eta)(b+1))/eta. Clip unbounded
        // windows there, both to save work and because in the far field the
        // closed-form transform loses all significant digits and rounding
        // noise fabricates sign changes.
        let (mut lo, mut hi) = (lo, hi);
        if self.eta > 1e-14 {
            if hi.is_infinite() && lo.is_finite() {
                let bound = (self.chi - (1.0 - self.eta) * self.measure.a()) / self.eta;
                hi = bound.max(lo) + 1.0;
            }
            if lo.is_infinite() && hi.is_finite() {
                let bound =
                    (self.chi - (1.0 - self.eta) * (self.measure.b() + 1.0)) / self.eta;
                lo = bound.min(hi) - 1.0;
            }
        }
        const NODES: usize = 65;
        let mut points: Vec<f64> = Vec::with_capacity(NODES);
        let cheb =
            |k: usize| 0.5 * (1.0 - (std::f64::consts::PI * k as f64 / (NODES - 1) as f64).cos());
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => {
                let guard = 1e-9 * (1.0 + lo.abs().max(hi.abs()));
                let (c_lo, c_hi) = (lo + guard, hi - guard);
                if c_hi <= c_lo {
                    return Ok(Vec::new());
                }
                points.extend((0..NODES).map(|k| c_lo + (c_hi - c_lo) * cheb(k)));
            }
            (true, false) => {
                // Chart t = (lo + 1) + tan(theta) reaching from just above
                // `lo` out to ~1e4 past it.
                let m = lo + 1.0;
                let guard = 1e-9 * (1.0 + lo.abs());
                let th_lo = (lo + guard - m).atan();
                let th_hi = std::f64::consts::FRAC_PI_2 - 1e-4;
                points.extend((0..NODES).map(|k| m + (th_lo + (th_hi - th_lo) * cheb(k)).tan()));
            }
            (false, true) => {
                let m = hi - 1.0;
                let guard = 1e-9 * (1.0 + hi.abs());
                let th_hi = (hi - guard - m).atan();
                let th_lo = -std::f64::consts::FRAC_PI_2 + 1e-4;
                points.extend((0..NODES).map(|k| m + (th_lo + (th_hi - th_lo) * cheb(k)).tan()));
            }
            (false, false) => {
                let m = 0.5 * (self.measure.a() + self.measure.b());
                let half = std::f64::consts::FRAC_PI_2 - 1e-4;
                points.extend((0..NODES).map(|k| m + (-half + 2.0 * half * cheb(k)).tan()));
            }
        }

        let mut values: Vec<(f64, f64, f64)> = Vec::with_capacity(points.len());
        for &t in &points {
            if let Ok(d) = self.f_derivs_real(t, 1) {
                values.push((t, d[0], d[1]));
            }
        }
        let node_scale = values.iter().map(|v| v.1.abs()).fold(0.0, f64::max).max(1.0);

        let mut roots: Vec<(f64, u8)> = Vec::new();
        let push_root = |t: f64, roots: &mut Vec<(f64, u8)>| {
            let window = 1e-8 * (1.0 + t.abs());
            if roots.iter().any(|&(r, _)| (r - t).abs() <= window) {
                return;
            }
            let mult = self.real_root_multiplicity(t).unwrap_or(1);
            roots.push((t, mult));
        };

        for pair in values.windows(2) {
            let (t0, v0, _) = pair[0];
            let (t1, v1, _) = pair[1];
            if v0 == 0.0 {
                push_root(t0, &mut roots);
            } else if v0 * v1 < 0.0 {
                let t = self.bisect_root(t0, t1, v0, 0)?;
                push_root(t, &mut roots);
            }
            // Critical point of f' inside the cell: a touching (even) root
            // shows up as a near-zero minimum of |f'| there.
            let (d0, d1) = (pair[0].2, pair[1].2);
            if d0 * d1 < 0.0 {
                let tc = self.bisect_root(t0, t1, d0, 1)?;
                if let Ok(d) = self.f_derivs_real(tc, 0) {
                    if d[0].abs() < 1e-10 * node_scale {
                        push_root(tc, &mut roots);
                    }
                }
            }
        }
        if let Some(&(t_last, v_last, _)) = values.last() {
            if v_last == 0.0 {
                push_root(t_last, &mut roots);
            }
        }
        roots.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(roots)
    }

    /// Bisection on `f^(order+1)` over a bracketing cell.
    fn bisect_root(&self, mut lo: f64, mut hi: f64, v_lo: f64, order: usize) -> Result<f64, SaddleError> {
        let mut sign_lo = v_lo.signum();
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let vm = self.f_derivs_real(mid, order)?[order];
            if vm == 0.0 {
                return Ok(mid);
            }
            if vm.signum() == sign_lo {
                lo = mid;
                sign_lo = vm.signum();
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * (1.0 + mid.abs()) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// The liquid position whose saddle function has its upper-half root at `w`:
///
/// ```text
/// chi = w + (w - conj w)(e^{C(conj w)} - 1) / (e^{C(w)} - e^{C(conj w)})
/// eta = 1 + (w - conj w)(e^{C(w)} - 1)(e^{C(conj w)} - 1) / (e^{C(w)} - e^{C(conj w)})
/// ```
///
/// Both expressions are conjugate-symmetric, hence real up to roundoff; the
/// real parts are returned.
pub fn chi_eta_from_w(measure: &Measure, w: Complex64) -> Result<(f64, f64), SaddleError> {
    if !(w.im > 0.0) {
        return Err(SaddleError::UpperHalfRequired { w });
    }
    let ec = measure.cauchy(w)?.exp();
    let ecb = ec.conj();
    let denom = ec - ecb;
    if denom.norm() < 1e-14 {
        return Err(SaddleError::DegenerateDenominator { w });
    }
    let gap = w - w.conj();
    let one = Complex64::new(1.0, 0.0);
    let chi = w + gap * (ecb - one) / denom;
    let eta = one + gap * (ec - one) * (ecb - one) / denom;
    debug_assert!(chi.im.abs() < 1e-10 * (1.0 + chi.re.abs()));
    debug_assert!(eta.im.abs() < 1e-10 * (1.0 + eta.re.abs()));
    Ok((chi.re, eta.re))
}
