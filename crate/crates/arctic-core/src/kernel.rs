//! The exact correlation kernel of the uniform interlacing ensemble, its
//! double-contour-integral form, and correlation determinants.
//!
//! For a fixed top row `x_1 > ... > x_n`, the random particles at sites
//! `(u, r)` with `1 <= r <= n-1` form a determinantal process. The kernel is
//! a finite double sum of rationals,
//!
//! ```text
//! K((u,r),(v,s)) = Ktilde((u,r),(v,s)) - phi_{r,s}(u,v)
//! ```
//!
//! and we evaluate it in exact arbitrary-precision rationals: the
//! determinantal identity against brute-force enumeration is claimed exactly,
//! so nothing here may round. The same kernel has a residue representation as
//! a double contour integral, evaluated with the trapezoid rule on circles
//! (spectrally accurate for analytic integrands); agreement between the two
//! routes is a strong end-to-end check and both are kept.
//!
//! Sites below the packed deterministic floor (`u < x_n + n - r`) are
//! refused: occupancy there is forced and the kernel formula is not claimed.

use crate::combinatorics::{Site, TopRow};
use crate::linalg::det_rational;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum KernelError {
    #[error("row {r} is not a random row (1..={max} for {n} total rows)")]
    RowOutOfRange { r: usize, n: usize, max: usize },
    #[error("site ({u},{r}) lies below the deterministic floor {floor}")]
    InadmissibleSite { u: i64, r: usize, floor: i64 },
    #[error("site ({u},{r}) appears twice")]
    DuplicateSite { u: i64, r: usize },
    #[error("contour setup rejected: {0}")]
    ContourViolation(String),
}

fn check_site(top: &TopRow, site: Site) -> Result<(), KernelError> {
    let n = top.n();
    if n < 2 || site.r < 1 || site.r > n - 1 {
        return Err(KernelError::RowOutOfRange { r: site.r, n, max: n.saturating_sub(1) });
    }
    let floor = top.entries()[n - 1] + (n - site.r) as i64;
    if site.u < floor {
        return Err(KernelError::InadmissibleSite { u: site.u, r: site.r, floor });
    }
    Ok(())
}

fn factorial(m: i64) -> BigInt {
    debug_assert!(m >= 0);
    (1..=m).map(BigInt::from).product()
}

/// One-step transition weight `phi_{r,s}(u,v)` between rows `r` and `s`:
/// zero downward, an indicator one row up, and a binomial-type polynomial
/// count of monotone paths for larger gaps.
pub fn phi(r: usize, s: usize, u: i64, v: i64) -> BigRational {
    if s <= r || v < u {
        return BigRational::zero();
    }
    let gap = (s - r) as i64;
    if gap == 1 {
        return BigRational::one();
    }
    let num: BigInt = (1..gap).map(|j| BigInt::from(v - u + gap - j)).product();
    BigRational::new(num, factorial(gap - 1))
}

/// The same weight through the finite-difference route: `n - s` forward
/// differences (in `v`) of a degree `n - r - 1` monomial product, with the
/// support indicator applied outside. Kept as an independent evaluation to
/// cross-check [`phi`]; the two must agree on all integer arguments.
pub fn phi_finite_difference(n: usize, r: usize, s: usize, u: i64, v: i64) -> BigRational {
    assert!((1..n).contains(&r) && (1..=n).contains(&s), "need 1 <= r < n and 1 <= s <= n");
    let (ri, si) = (r as i64, s as i64);
    if v - u + si - ri - 1 < 0 {
        return BigRational::zero();
    }
    let deg = (n - r) as i64 - 1;
    let monomials = |w: i64| -> BigInt { (1..=deg).map(|j| BigInt::from(w - u + si - ri - j)).product() };
    let m = (n - s) as i64;
    let mut sum = BigInt::zero();
    let mut binom = BigInt::one();
    for k in 0..=m {
        let sign = if (m - k) % 2 == 0 { 1 } else { -1 };
        sum += sign * &binom * monomials(v + k);
        // C(m, k+1) from C(m, k).
        binom = binom * BigInt::from(m - k) / BigInt::from(k + 1);
    }
    BigRational::new(sum, factorial((n - r) as i64 - 1))
}

/// The principal double sum of the kernel: over top-row particles at or
/// above `u`, and over the `n - s + 1` lattice points feeding site `(v, s)`.
/// Exact rationals throughout; empty products are 1.
pub fn ktilde(top: &TopRow, site_ur: Site, site_vs: Site) -> Result<BigRational, KernelError> {
    check_site(top, site_ur)?;
    check_site(top, site_vs)?;
    let x = top.entries();
    let n = top.n() as i64;
    let (u, r) = (site_ur.u, site_ur.r as i64);
    let (v, s) = (site_vs.u, site_vs.r as i64);

    let prefactor = BigRational::new(factorial(n - s), factorial(n - r - 1));
    let mut total = BigRational::zero();
    for (k, &xk) in x.iter().enumerate() {
        if xk < u {
            continue;
        }
        // Product over the band of n-r-1 lattice points below u.
        let band: BigInt = (u + r - n + 1..=u - 1).map(|j| BigInt::from(xk - j)).product();
        if band.is_zero() {
            continue;
        }
        let pivot: BigInt = x
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, &xi)| BigInt::from(xk - xi))
            .product();
        for l in v + s - n..=v {
            let weight: BigInt = (v + s - n..=v)
                .filter(|&j| j != l)
                .map(|j| BigInt::from(l - j))
                .product();
            let across: BigInt = x
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &xi)| BigInt::from(l - xi))
                .product();
            total += BigRational::new(&band * across, &weight * &pivot);
        }
    }
    Ok(prefactor * total)
}

/// The full kernel `Ktilde - phi`. Diagonal entries are one-point
/// correlations and land in `[0, 1]`.
pub fn kernel(top: &TopRow, site_ur: Site, site_vs: Site) -> Result<BigRational, KernelError> {
    let kt = ktilde(top, site_ur, site_vs)?;
    Ok(kt - phi(site_ur.r, site_vs.r, site_ur.u, site_vs.u))
}

/// Correlation of a set of distinct admissible sites: the determinant of the
/// kernel matrix, in exact rationals (fraction-free elimination).
pub fn correlation(top: &TopRow, sites: &[Site]) -> Result<BigRational, KernelError> {
    let mut seen = HashSet::new();
    for &s in sites {
        if !seen.insert(s) {
            return Err(KernelError::DuplicateSite { u: s.u, r: s.r });
        }
    }
    let m: Vec<Vec<BigRational>> = sites
        .iter()
        .map(|&a| sites.iter().map(|&b| kernel(top, a, b)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    Ok(det_rational(&m))
}

/// Circle pair for the double contour integral. The inner circle carries the
/// `z` integral and must separate the top-row poles at or above `u` (inside)
/// from those at or below `u + r - n` (outside); the outer circle carries
/// the `w` integral and must enclose the inner circle together with the
/// `n - s + 1` poles feeding `(v, s)`. All positions are in rescaled
/// (divide-by-`n`) coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourParams {
    pub inner_center: f64,
    pub inner_radius: f64,
    pub outer_center: f64,
    pub outer_radius: f64,
    /// Trapezoid nodes per circle; a power of two, at least 256.
    pub nodes: usize,
}

/// Pole sets of the integrand in rescaled coordinates.
struct PoleSets {
    enclosed: Vec<f64>,
    excluded: Vec<f64>,
    outer: Vec<f64>,
}

fn pole_sets(top: &TopRow, site_ur: Site, site_vs: Site) -> PoleSets {
    let nf = top.n() as f64;
    let n = top.n() as i64;
    let (u, r) = (site_ur.u, site_ur.r as i64);
    let (v, s) = (site_vs.u, site_vs.r as i64);
    PoleSets {
        enclosed: top
            .entries()
            .iter()
            .filter(|&&xj| xj >= u)
            .map(|&xj| xj as f64 / nf)
            .collect(),
        excluded: top
            .entries()
            .iter()
            .filter(|&&xj| xj <= u + r - n)
            .map(|&xj| xj as f64 / nf)
            .collect(),
        outer: (v + s - n..=v).map(|j| j as f64 / nf).collect(),
    }
}

impl ContourParams {
    /// Default geometry for a query: the inner circle hugs the enclosed
    /// poles with a 10% margin (capped well clear of the excluded ones), and
    /// the outer circle is concentric at 1.5 times the minimal enclosing
    /// radius.
    pub fn for_query(top: &TopRow, site_ur: Site, site_vs: Site) -> Result<Self, KernelError> {
        check_site(top, site_ur)?;
        check_site(top, site_vs)?;
        let nf = top.n() as f64;
        let poles = pole_sets(top, site_ur, site_vs);
        let (lo, hi) = match (
            poles.enclosed.first(),
            poles.enclosed.iter().copied().reduce(f64::min),
            poles.enclosed.iter().copied().reduce(f64::max),
        ) {
            (Some(_), Some(lo), Some(hi)) => (lo, hi),
            // Nothing to enclose: a small circle clear of every pole still
            // represents the (zero) integral faithfully.
            _ => {
                let top_pole = top.entries()[0] as f64 / nf;
                (top_pole + 1.0, top_pole + 1.0)
            }
        };
        let center = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut margin = 0.1 * half + 0.1 / nf;
        if let Some(nearest) = poles.excluded.iter().copied().reduce(f64::max) {
            // Keep the circle at most halfway into the clear band between
            // the highest excluded pole and the lowest enclosed one; the
            // band is at least 1/n wide, so the margin stays positive.
            margin = margin.min(0.5 * (lo - nearest));
        }
        let inner_radius = half + margin;
        let reach = poles
            .outer
            .iter()
            .map(|p| (p - center).abs())
            .fold(inner_radius, f64::max);
        let params = ContourParams {
            inner_center: center,
            inner_radius,
            outer_center: center,
            outer_radius: 1.5 * reach,
            nodes: 1024,
        };
        params.validate(top, site_ur, site_vs)?;
        Ok(params)
    }

    /// Check the pole-separation preconditions numerically, with a guard
    /// band so no quadrature node can sit on top of a pole.
    pub fn validate(&self, top: &TopRow, site_ur: Site, site_vs: Site) -> Result<(), KernelError> {
        if !self.nodes.is_power_of_two() || self.nodes < 256 {
            return Err(KernelError::ContourViolation(format!(
                "node count {} is not a power of two >= 256",
                self.nodes
            )));
        }
        let guard = 1e-9 * (1.0 + self.outer_radius.abs());
        let poles = pole_sets(top, site_ur, site_vs);
        for p in &poles.enclosed {
            if (p - self.inner_center).abs() >= self.inner_radius - guard {
                return Err(KernelError::ContourViolation(format!(
                    "pole {p} must lie strictly inside the inner circle"
                )));
            }
        }
        for p in &poles.excluded {
            if (p - self.inner_center).abs() <= self.inner_radius + guard {
                return Err(KernelError::ContourViolation(format!(
                    "pole {p} must lie strictly outside the inner circle"
                )));
            }
        }
        for p in &poles.outer {
            if (p - self.outer_center).abs() >= self.outer_radius - guard {
                return Err(KernelError::ContourViolation(format!(
                    "pole {p} must lie strictly inside the outer circle"
                )));
            }
        }
        if (self.inner_center - self.outer_center).abs() + self.inner_radius
            >= self.outer_radius - guard
        {
            return Err(KernelError::ContourViolation(
                "inner circle must lie strictly inside the outer circle".into(),
            ));
        }
        Ok(())
    }
}

/// Trapezoid-rule evaluation of the contour form of the kernel. The real
/// part approximates [`kernel`]; the imaginary part is a quadrature residual
/// useful as a convergence diagnostic.
pub fn kernel_contour(
    top: &TopRow,
    site_ur: Site,
    site_vs: Site,
    params: &ContourParams,
) -> Result<Complex64, KernelError> {
    check_site(top, site_ur)?;
    check_site(top, site_vs)?;
    params.validate(top, site_ur, site_vs)?;

    let nf = top.n() as f64;
    let n = top.n() as i64;
    let (u, r) = (site_ur.u, site_ur.r as i64);
    let (v, s) = (site_vs.u, site_vs.r as i64);
    let nodes = params.nodes;

    // Inner (z) factors, with the z-step folded in:
    //   band numerator / top-row poles.
    let mut z_values = Vec::with_capacity(nodes);
    let mut z_factors = Vec::with_capacity(nodes);
    for q in 0..nodes {
        let theta = 2.0 * std::f64::consts::PI * q as f64 / nodes as f64;
        let dir = Complex64::from_polar(1.0, theta);
        let z = params.inner_center + params.inner_radius * dir;
        let step = Complex64::i() * params.inner_radius * dir
            * (2.0 * std::f64::consts::PI / nodes as f64);
        let mut f = step;
        for j in u + r - n + 1..=u - 1 {
            f *= z - j as f64 / nf;
        }
        for &xi in top.entries() {
            f /= z - xi as f64 / nf;
        }
        z_values.push(z);
        z_factors.push(f);
    }

    // Outer (w) factors: top-row zeros / feeding-band poles, w-step folded in.
    let mut total = Complex64::new(0.0, 0.0);
    for p in 0..nodes {
        let theta = 2.0 * std::f64::consts::PI * p as f64 / nodes as f64;
        let dir = Complex64::from_polar(1.0, theta);
        let w = params.outer_center + params.outer_radius * dir;
        let step = Complex64::i() * params.outer_radius * dir
            * (2.0 * std::f64::consts::PI / nodes as f64);
        let mut f = step;
        for &xi in top.entries() {
            f *= w - xi as f64 / nf;
        }
        for j in v + s - n..=v {
            f /= w - j as f64 / nf;
        }
        for q in 0..nodes {
            total += f * z_factors[q] / (w - z_values[q]);
        }
    }
    let two_pi_i_sq = -4.0 * std::f64::consts::PI * std::f64::consts::PI;
    let integral = total / two_pi_i_sq;

    let prefactor = BigRational::new(factorial(n - s), factorial(n - r - 1))
        .to_f64()
        .expect("factorial ratio fits in f64")
        * nf.powi((s - r - 1) as i32);
    let shift = phi(site_ur.r, site_vs.r, u, v).to_f64().expect("phi fits in f64");
    Ok(integral * prefactor - Complex64::new(shift, 0.0))
}

/// Render one kernel evaluation in the interchange JSON shape, with the
/// rational value as decimal strings.
pub fn kernel_json(top: &TopRow, site_ur: Site, site_vs: Site) -> Result<String, KernelError> {
    let value = kernel(top, site_ur, site_vs)?;
    let entries: Vec<String> = top.entries().iter().map(|x| x.to_string()).collect();
    Ok(format!(
        "{{\"n\":{},\"toprow\":[{}],\"query\":{{\"u\":{},\"r\":{},\"v\":{},\"s\":{}}},\"value\":{{\"num\":\"{}\",\"den\":\"{}\"}}}}",
        top.n(),
        entries.join(","),
        site_ur.u,
        site_ur.r,
        site_vs.u,
        site_vs.r,
        value.numer(),
        value.denom(),
    ))
}
