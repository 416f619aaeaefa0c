//! Interlacing triangular arrays: enumeration, exact counting, exact uniform
//! sampling, and conversion to lozenge tilings.
//!
//! An array has rows `y^(1), ..., y^(n)`; row `r` holds `r` strictly
//! decreasing integers, and adjacent rows interlace:
//!
//! ```text
//! y_1^(r+1) >= y_1^(r) > y_2^(r+1) >= y_2^(r) > ... > y_(r+1)^(r+1)
//! ```
//!
//! The top row is fixed and everything below is uniformly random. The number
//! of arrays under a fixed top row has a product closed form; we use it only
//! after checking it against brute-force enumeration (see the crate tests),
//! and the exact sampler weights candidate rows by the count of arrays they
//! head, which keeps the overall distribution exactly uniform with no mixing
//! arguments.
//!
//! The same data describes a rhombus tiling: each particle carries a vertical
//! rhombus, and the remaining triangular holes between adjacent particle rows
//! are filled by left/right leaning rhombi in a unique way.

use crate::linalg::{det_bigint, det_i128};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use thiserror::Error;

/// Hard ceilings for brute-force enumeration.
pub const MAX_ENUM_ROWS: usize = 8;
pub const MAX_ENUM_SPREAD: i64 = 12;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("expected rows of consecutive lengths, got {upper} over {lower}")]
    LengthMismatch { upper: usize, lower: usize },
    #[error("row must be nonempty and strictly decreasing")]
    NotDecreasing,
    #[error("row {row} does not interlace with the row above")]
    BrokenInterlacing { row: usize },
    #[error("enumeration guard: {n} rows (max {MAX_ENUM_ROWS}) with spread {spread} (max {MAX_ENUM_SPREAD})")]
    TooLarge { n: usize, spread: i64 },
    #[error("tiling does not describe an interlacing array: {0}")]
    BadTiling(String),
}

/// A lattice site `(u, r)`: position `u` on row `r` (rows are 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub r: usize,
    pub u: i64,
}

impl Site {
    pub fn new(u: i64, r: usize) -> Self {
        Site { r, u }
    }
}

/// A validated top row: strictly decreasing integers `x_1 > ... > x_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopRow {
    entries: Vec<i64>,
}

impl TopRow {
    pub fn new(entries: Vec<i64>) -> Result<Self, PatternError> {
        if entries.is_empty() || entries.windows(2).any(|w| w[0] <= w[1]) {
            return Err(PatternError::NotDecreasing);
        }
        Ok(TopRow { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    /// `x_1 - x_n`, the horizontal extent.
    pub fn spread(&self) -> i64 {
        self.entries[0] - self.entries[self.n() - 1]
    }

    fn guard_enumeration(&self) -> Result<(), PatternError> {
        if self.n() > MAX_ENUM_ROWS || self.spread() > MAX_ENUM_SPREAD {
            return Err(PatternError::TooLarge { n: self.n(), spread: self.spread() });
        }
        Ok(())
    }
}

/// A full interlacing array. `rows[k]` is row `k+1` (so `rows[n-1]` is the
/// fixed top row).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GTPattern {
    rows: Vec<Vec<i64>>,
}

impl GTPattern {
    /// Validate row lengths, monotonicity, and the interlacing chain.
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self, PatternError> {
        if rows.is_empty() {
            return Err(PatternError::NotDecreasing);
        }
        for (k, row) in rows.iter().enumerate() {
            if row.len() != k + 1 {
                return Err(PatternError::LengthMismatch { upper: row.len(), lower: k });
            }
            if row.windows(2).any(|w| w[0] <= w[1]) {
                return Err(PatternError::NotDecreasing);
            }
        }
        for k in 1..rows.len() {
            if !interlaces(&rows[k], &rows[k - 1])? {
                return Err(PatternError::BrokenInterlacing { row: k });
            }
        }
        Ok(GTPattern { rows })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Row `r` (1-based).
    pub fn row(&self, r: usize) -> &[i64] {
        &self.rows[r - 1]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn top(&self) -> &[i64] {
        &self.rows[self.rows.len() - 1]
    }

    /// Is there a particle at position `u` of row `r`?
    pub fn has_particle(&self, site: Site) -> bool {
        site.r >= 1 && site.r <= self.n() && self.row(site.r).contains(&site.u)
    }

    /// JSON array of rows, row 1 first: `[[1],[2,0]]`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.rows).expect("rows of integers always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, PatternError> {
        let rows: Vec<Vec<i64>> = serde_json::from_str(text)
            .map_err(|e| PatternError::BadTiling(format!("bad pattern JSON: {e}")))?;
        Self::from_rows(rows)
    }
}

/// The alternating weak/strict interlacing test between a row of length
/// `m + 1` and one of length `m`.
pub fn interlaces(upper: &[i64], lower: &[i64]) -> Result<bool, PatternError> {
    if upper.len() != lower.len() + 1 {
        return Err(PatternError::LengthMismatch { upper: upper.len(), lower: lower.len() });
    }
    for i in 0..lower.len() {
        if !(upper[i] >= lower[i] && lower[i] > upper[i + 1]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Determinantal form of the interlacing test: the indicator equals
/// `det [ 1(lower_j <= upper_i) | 1 ]`. Used as an independent cross-check
/// in property tests.
pub fn warren_interlaces(upper: &[i64], lower: &[i64]) -> Result<bool, PatternError> {
    if upper.len() != lower.len() + 1 {
        return Err(PatternError::LengthMismatch { upper: upper.len(), lower: lower.len() });
    }
    let n = upper.len();
    let m: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j + 1 == n {
                        1
                    } else {
                        i128::from(lower[j] <= upper[i])
                    }
                })
                .collect()
        })
        .collect();
    Ok(det_i128(m).expect("0/1 entries cannot overflow") == 1)
}

/// All interlacing arrays under `top`, lexicographically ordered by the
/// entries of rows `n-1, n-2, ..., 1` read left to right.
pub fn enumerate_patterns(top: &TopRow) -> Result<PatternEnumeration, PatternError> {
    top.guard_enumeration()?;
    Ok(PatternEnumeration {
        rows: vec![top.entries().to_vec()],
        n: top.n(),
        started: false,
        done: false,
    })
}

/// Streaming enumerator. Entry `(row, i)` ranges over
/// `[row_above[i+1] + 1, row_above[i]]` independently of its neighbors, so
/// the whole array advances like an odometer with the topmost free row as
/// the most significant digit.
pub struct PatternEnumeration {
    /// Current rows, top first: `rows[0]` is the fixed top row.
    rows: Vec<Vec<i64>>,
    n: usize,
    started: bool,
    done: bool,
}

impl PatternEnumeration {
    /// Reset rows `from_len - 1, ..., 1` (lengths) to their minima.
    fn reset_below(&mut self, from_len: usize) {
        while self.rows.len() > self.n - from_len + 1 {
            self.rows.pop();
        }
        for len in (1..from_len).rev() {
            let above = self.rows.last().unwrap();
            let row: Vec<i64> = (0..len).map(|i| above[i + 1] + 1).collect();
            self.rows.push(row);
        }
    }

    fn current(&self) -> GTPattern {
        let mut rows = self.rows.clone();
        rows.reverse();
        GTPattern { rows }
    }
}

impl Iterator for PatternEnumeration {
    type Item = GTPattern;

    fn next(&mut self) -> Option<GTPattern> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.reset_below(self.n);
            return Some(self.current());
        }
        // Advance the least significant position that still has room:
        // scan rows bottom-up, entries right to left.
        for depth in (1..self.rows.len()).rev() {
            let above = self.rows[depth - 1].clone();
            let len = self.rows[depth].len();
            for i in (0..len).rev() {
                if self.rows[depth][i] < above[i] {
                    self.rows[depth][i] += 1;
                    for j in i + 1..len {
                        self.rows[depth][j] = above[j + 1] + 1;
                    }
                    self.reset_below(len);
                    return Some(self.current());
                }
            }
        }
        self.done = true;
        None
    }
}

/// Exact number of interlacing arrays under `top`:
/// the product of `(x_i - x_j) / (j - i)` over `i < j`.
pub fn count_patterns(top: &TopRow) -> BigUint {
    let x = top.entries();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            num *= BigInt::from(x[i] - x[j]);
            den *= BigInt::from((j - i) as i64);
        }
    }
    (num / den).to_biguint().expect("count of a valid top row is positive")
}

/// Exact correlation by brute force: the fraction of arrays holding a
/// particle at every requested site. Duplicate sites collapse.
pub fn empirical_correlation(top: &TopRow, sites: &[Site]) -> Result<BigRational, PatternError> {
    let wanted: HashSet<Site> = sites.iter().copied().collect();
    let mut hits = BigInt::zero();
    let mut total = BigInt::zero();
    for pattern in enumerate_patterns(top)? {
        total += 1;
        if wanted.iter().all(|&s| pattern.has_particle(s)) {
            hits += 1;
        }
    }
    Ok(BigRational::new(hits, total))
}

/// Row values used while sampling one entry: a concrete value, or a whole
/// untouched range contributing its power sums.
enum RowVal {
    Value(i64),
    Range(i64, i64),
}

/// Matrix whose determinant counts completions: row `j` holds descending
/// powers of the fixed entry, or power sums over the entry's free range.
/// Multilinearity in rows turns the sum over free entries into one
/// determinant per candidate value.
fn weight_matrix_i128(rows: &[RowVal], size: usize) -> Option<Vec<Vec<i128>>> {
    let mut m = Vec::with_capacity(size);
    for spec in rows {
        let mut row = vec![0i128; size];
        for (idx, slot) in row.iter_mut().enumerate() {
            let p = (size - 1 - idx) as u32;
            *slot = match spec {
                RowVal::Value(v) => i128::from(*v).checked_pow(p)?,
                RowVal::Range(lo, hi) => {
                    let mut sum = 0i128;
                    for v in *lo..=*hi {
                        sum = sum.checked_add(i128::from(v).checked_pow(p)?)?;
                    }
                    sum
                }
            };
        }
        m.push(row);
    }
    Some(m)
}

fn weight_matrix_big(rows: &[RowVal], size: usize) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|spec| {
            (0..size)
                .map(|idx| {
                    let p = (size - 1 - idx) as u32;
                    match spec {
                        RowVal::Value(v) => BigInt::from(*v).pow(p),
                        RowVal::Range(lo, hi) => {
                            let mut sum = BigInt::zero();
                            for v in *lo..=*hi {
                                sum += BigInt::from(v).pow(p);
                            }
                            sum
                        }
                    }
                })
                .collect()
        })
        .collect()
}

/// Number of completions (always nonnegative) for a partially decided row.
fn completion_weight(rows: &[RowVal], size: usize) -> BigUint {
    let det = match weight_matrix_i128(rows, size).and_then(det_i128) {
        Some(d) => BigInt::from(d),
        None => det_bigint(weight_matrix_big(rows, size)),
    };
    det.to_biguint().expect("completion counts are nonnegative")
}

/// Uniform draw from `[0, bound)`; `bound >= 1`.
fn uniform_below(rng: &mut ChaCha8Rng, bound: &BigUint) -> BigUint {
    if let Ok(small) = u64::try_from(bound) {
        return sample_u64(rng, small);
    }
    let bits = bound.bits();
    loop {
        let mut limbs = vec![0u32; bits.div_ceil(32) as usize];
        for limb in &mut limbs {
            *limb = rng.next_u32();
        }
        let extra = (limbs.len() as u64) * 32 - bits;
        if extra > 0 {
            if let Some(last) = limbs.last_mut() {
                *last &= u32::MAX >> extra;
            }
        }
        let candidate = BigUint::from_slice(&limbs);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// Unbiased uniform draw from `[0, bound)` for a `u64` bound, by rejection.
fn sample_u64(rng: &mut ChaCha8Rng, bound: u64) -> BigUint {
    debug_assert!(bound >= 1);
    let zone = u64::MAX - (u64::MAX % bound);
    loop {
        let v = rng.next_u64();
        if v < zone {
            return BigUint::from(v % bound);
        }
    }
}

/// Draw an exactly uniform interlacing array under `top`, deterministically
/// for a fixed seed.
///
/// Rows are generated top-down; inside a row, entries are decided left to
/// right, each drawn from its exact marginal distribution given the entries
/// already fixed. The marginal weights are completion counts expressed as
/// determinants, so no candidate row is ever enumerated explicitly.
pub fn sample_pattern(top: &TopRow, seed: u64) -> GTPattern {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = top.n();
    let mut rows_top_down: Vec<Vec<i64>> = vec![top.entries().to_vec()];
    for len in (1..n).rev() {
        let above = rows_top_down.last().unwrap().clone();
        let ranges: Vec<(i64, i64)> = (0..len).map(|i| (above[i + 1] + 1, above[i])).collect();
        let mut fixed: Vec<i64> = Vec::with_capacity(len);
        for i in 0..len {
            let build = |current: RowVal| {
                let mut specs: Vec<RowVal> = fixed.iter().map(|&v| RowVal::Value(v)).collect();
                specs.push(current);
                specs.extend(ranges[i + 1..].iter().map(|&(lo, hi)| RowVal::Range(lo, hi)));
                specs
            };
            let (lo, hi) = ranges[i];
            let chosen = if lo == hi {
                lo
            } else {
                let total = completion_weight(&build(RowVal::Range(lo, hi)), len);
                let draw = uniform_below(&mut rng, &total);
                let mut acc = BigUint::zero();
                let mut value = hi;
                for l in lo..=hi {
                    acc += completion_weight(&build(RowVal::Value(l)), len);
                    if acc > draw {
                        value = l;
                        break;
                    }
                }
                value
            };
            fixed.push(chosen);
        }
        rows_top_down.push(fixed);
    }
    rows_top_down.reverse();
    GTPattern { rows: rows_top_down }
}

/// Rhombus kinds of the tiling picture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LozengeKind {
    /// Vertical rhombus at a random particle.
    FreeParticle,
    /// Vertical rhombus at a deterministic (packed-boundary) particle.
    FrozenParticle,
    /// Left-leaning filler between particle rows.
    LeftLean,
    /// Right-leaning filler between particle rows.
    RightLean,
}

/// One placed rhombus. For particles, `level` is the particle row (0-based
/// rows of the extended configuration, `0..=n`) and `u` the position. For
/// leaning fillers, `level` is the strip below level `level + 1` and `u` the
/// column of the triangle pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lozenge {
    pub kind: LozengeKind,
    pub u: i64,
    pub level: usize,
}

/// The extended configuration at level `r`: row `r` of the array plus the
/// packed deterministic particles directly above the floor.
fn extended_row(pattern: &GTPattern, r: usize) -> Vec<i64> {
    let n = pattern.n();
    let x_min = pattern.top()[n - 1];
    let mut row: Vec<i64> = if r == 0 { Vec::new() } else { pattern.row(r).to_vec() };
    for v in (x_min..x_min + (n - r) as i64).rev() {
        row.push(v);
    }
    row
}

/// Convert an array to its rhombus tiling. Particles become vertical rhombi;
/// each strip between adjacent levels is then filled left to right, pairing
/// free triangles greedily (the interlacing constraint makes every pair
/// adjacent, so the fill is forced).
pub fn to_tiling(pattern: &GTPattern) -> Vec<Lozenge> {
    let n = pattern.n();
    let x_min = pattern.top()[n - 1];
    let x_max = pattern.top()[0];
    let mut out = Vec::new();

    for r in 0..=n {
        let row = extended_row(pattern, r);
        let free_floor = x_min + (n - r) as i64;
        for &u in &row {
            let kind = if u >= free_floor {
                LozengeKind::FreeParticle
            } else {
                LozengeKind::FrozenParticle
            };
            out.push(Lozenge { kind, u, level: r });
        }
    }

    for s in 0..n {
        let lower: HashSet<i64> = extended_row(pattern, s).into_iter().collect();
        let upper: HashSet<i64> = extended_row(pattern, s + 1).into_iter().collect();
        // Walk the strip path: up-triangle at m, then down-triangle at m.
        // Up-triangles are particle tops from level s, down-triangles are
        // particle bottoms from level s+1; the rest pair into leaning rhombi.
        let mut pending: Option<(bool, i64)> = None; // (is_up, column)
        for m in x_min..=x_max {
            for (is_up, occupied) in [(true, lower.contains(&m)), (false, upper.contains(&m))] {
                if occupied {
                    continue;
                }
                match pending.take() {
                    None => pending = Some((is_up, m)),
                    Some((true, pm)) => {
                        // Up at pm pairs with the down triangle at the same
                        // column: a right-leaning rhombus.
                        debug_assert!(!is_up && pm == m, "non-adjacent free triangles");
                        out.push(Lozenge { kind: LozengeKind::RightLean, u: m, level: s });
                    }
                    Some((false, pm)) => {
                        // Down at pm pairs with the next up triangle: a
                        // left-leaning rhombus.
                        debug_assert!(is_up && m == pm + 1, "non-adjacent free triangles");
                        out.push(Lozenge { kind: LozengeKind::LeftLean, u: m, level: s });
                    }
                }
            }
        }
        debug_assert!(pending.is_none(), "unpaired triangle in strip {s}");
    }
    out
}

/// Read the array back off a tiling: free particles at levels `1..=n` are
/// exactly the rows.
pub fn pattern_from_tiling(lozenges: &[Lozenge]) -> Result<GTPattern, PatternError> {
    let n = lozenges
        .iter()
        .filter(|l| matches!(l.kind, LozengeKind::FreeParticle | LozengeKind::FrozenParticle))
        .map(|l| l.level)
        .max()
        .ok_or_else(|| PatternError::BadTiling("no particle rhombi".into()))?;
    if n == 0 {
        return Err(PatternError::BadTiling("no particle rows above the floor".into()));
    }
    let mut rows: Vec<Vec<i64>> = vec![Vec::new(); n];
    for l in lozenges {
        if l.kind == LozengeKind::FreeParticle {
            if l.level == 0 || l.level > n {
                return Err(PatternError::BadTiling(format!(
                    "free particle at impossible level {}",
                    l.level
                )));
            }
            rows[l.level - 1].push(l.u);
        }
    }
    for row in &mut rows {
        row.sort_unstable_by(|a, b| b.cmp(a));
    }
    GTPattern::from_rows(rows).map_err(|e| PatternError::BadTiling(e.to_string()))
}

/// Vertex cycles of every rhombus, for rendering. Unit side length: rows sit
/// `sqrt(3)/2` apart and particles shear right by half a step per level.
pub fn lozenge_vertices(l: &Lozenge) -> [(f64, f64); 4] {
    let h = 3f64.sqrt() / 2.0;
    match l.kind {
        LozengeKind::FreeParticle | LozengeKind::FrozenParticle => {
            let x = l.u as f64 + l.level as f64 / 2.0;
            let y = l.level as f64 * h;
            [(x, y - h), (x + 0.5, y), (x, y + h), (x - 0.5, y)]
        }
        LozengeKind::RightLean => {
            let x = l.u as f64 + l.level as f64 / 2.0;
            let y = l.level as f64 * h;
            [(x - 0.5, y), (x + 0.5, y), (x + 1.0, y + h), (x, y + h)]
        }
        LozengeKind::LeftLean => {
            let x = l.u as f64 + l.level as f64 / 2.0;
            let y = l.level as f64 * h;
            [(x - 0.5, y), (x + 0.5, y), (x, y + h), (x - 1.0, y + h)]
        }
    }
}

/// Render a tiling as a standalone SVG document (y flipped so higher rows
/// are drawn higher).
pub fn tiling_svg(lozenges: &[Lozenge]) -> String {
    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    let polys: Vec<([(f64, f64); 4], &'static str)> = lozenges
        .iter()
        .map(|l| {
            let vs = lozenge_vertices(l);
            for &(x, y) in &vs {
                min_x = min_x.min(x);
                max_x = max_x.max(x);
                min_y = min_y.min(y);
                max_y = max_y.max(y);
            }
            let fill = match l.kind {
                LozengeKind::FreeParticle => "#e8b84b",
                LozengeKind::FrozenParticle => "#b9b9b9",
                LozengeKind::LeftLean => "#7296c4",
                LozengeKind::RightLean => "#c46a6a",
            };
            (vs, fill)
        })
        .collect();
    if polys.is_empty() {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\"/>\n".to_string();
    }
    let pad = 0.25;
    let scale = 40.0;
    let width = (max_x - min_x + 2.0 * pad) * scale;
    let height = (max_y - min_y + 2.0 * pad) * scale;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width:.2} {height:.2}\">\n"
    );
    for (vs, fill) in polys {
        let pts: Vec<String> = vs
            .iter()
            .map(|&(x, y)| {
                format!(
                    "{:.3},{:.3}",
                    (x - min_x + pad) * scale,
                    (max_y - y + pad) * scale
                )
            })
            .collect();
        svg.push_str(&format!(
            "  <polygon points=\"{}\" fill=\"{}\" stroke=\"#303030\" stroke-width=\"1\"/>\n",
            pts.join(" "),
            fill
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
