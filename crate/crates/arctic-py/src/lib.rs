//! Python bindings for the `arctic-core` library.
//!
//! The module mirrors the two halves of the Rust crate:
//!
//! * exact finite-`n` combinatorics — pattern counting, enumeration,
//!   sampling, and the determinantal correlation kernel in exact rational
//!   arithmetic (returned as `(numerator, denominator)` pairs of Python
//!   ints);
//! * asymptotic geometry — density profiles ([`Measure`]), liquid-region
//!   membership, the inverse critical-point map, and the frozen-boundary
//!   curve with its case classification.
//!
//! Complex numbers cross the boundary as `(re, im)` tuples; structured
//! results (edge samples, boundary assemblies, probe results, check
//! outcomes) become plain dicts so downstream code needs nothing beyond the
//! standard library.

use arctic_core::combinatorics::{self, GTPattern, Site, TopRow};
use arctic_core::frontier;
use arctic_core::kernel as kernel_mod;
use arctic_core::presets;
use arctic_core::saddle::{self, SaddleContext};
use arctic_core::verify;
use arctic_core::Measure as CoreMeasure;
use num_bigint::BigInt;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

/// Map any displayable core error onto `ValueError`.
fn verr(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn tuple(z: Complex64) -> (f64, f64) {
    (z.re, z.im)
}

fn rational_pair(r: num_rational::BigRational) -> (BigInt, BigInt) {
    (r.numer().clone(), r.denom().clone())
}

fn parse_top(entries: Vec<i64>) -> PyResult<TopRow> {
    TopRow::new(entries).map_err(verr)
}

fn parse_sites(sites: Vec<(i64, usize)>) -> Vec<Site> {
    sites.into_iter().map(|(u, r)| Site::new(u, r)).collect()
}

/// A piecewise-polynomial density profile on the real line with total mass
/// one and values in `[0, 1]`.
///
/// Construct it from `(interval, coefficients)` pairs, from the JSON format
/// shared with the command-line tool, or from one of the named presets.
#[pyclass(frozen)]
pub struct Measure {
    inner: CoreMeasure,
}

#[pymethods]
impl Measure {
    /// `Measure([((lo, hi), [c0, c1, ...]), ...])` — validate and build a
    /// profile from density pieces `c0 + c1 x + ...` on `[lo, hi]`.
    #[new]
    fn py_new(pieces: Vec<((f64, f64), Vec<f64>)>) -> PyResult<Self> {
        let pieces = pieces
            .into_iter()
            .map(|((lo, hi), coeffs)| arctic_core::DensityPiece::new(lo, hi, coeffs))
            .collect();
        match CoreMeasure::new(pieces) {
            Ok(inner) => Ok(Measure { inner }),
            Err(issues) => {
                let text =
                    issues.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; ");
                Err(PyValueError::new_err(text))
            }
        }
    }

    /// Parse the JSON document produced by `to_json` (and by the CLI's
    /// `preset export`).
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Measure { inner: CoreMeasure::from_json(text).map_err(verr)? })
    }

    /// Load one of the built-in worked profiles; see `preset_names()`.
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        Ok(Measure { inner: presets::preset(name).map_err(verr)?.measure })
    }

    /// Serialize to the JSON document accepted by `from_json`.
    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Left endpoint of the support.
    fn a(&self) -> f64 {
        self.inner.a()
    }

    /// Right endpoint of the support.
    fn b(&self) -> f64 {
        self.inner.b()
    }

    /// First moment of the density.
    fn moment1(&self) -> f64 {
        self.inner.moment1()
    }

    /// Density value at `x` (zero off the pieces).
    fn density(&self, x: f64) -> f64 {
        self.inner.density(x)
    }

    /// Closed support intervals as `(lo, hi)` pairs.
    fn support(&self) -> Vec<(f64, f64)> {
        self.inner.support().iter().map(|iv| (iv.lo, iv.hi)).collect()
    }

    /// Maximal intervals where the density is identically one.
    fn plateaus(&self) -> Vec<(f64, f64)> {
        self.inner.plateaus().iter().map(|iv| (iv.lo, iv.hi)).collect()
    }

    /// Components of the boundary parameter set as `(kind, lo, hi)`
    /// triples; point components have `lo == hi`.
    fn components(&self) -> Vec<(String, f64, f64)> {
        self.inner
            .r_decomposition()
            .iter()
            .map(|c| (c.class.as_str().to_string(), c.lo, c.hi))
            .collect()
    }

    /// Stieltjes transform of the density at `re + i*im`, as `(re, im)`.
    fn cauchy(&self, re: f64, im: f64) -> PyResult<(f64, f64)> {
        Ok(tuple(self.inner.cauchy(Complex64::new(re, im)).map_err(verr)?))
    }

    /// Derivative of order `1..=3` of the transform at `re + i*im`.
    fn cauchy_deriv(&self, re: f64, im: f64, order: u8) -> PyResult<(f64, f64)> {
        Ok(tuple(self.inner.cauchy_deriv(Complex64::new(re, im), order).map_err(verr)?))
    }

    fn __repr__(&self) -> String {
        format!(
            "Measure(support=[{}, {}], pieces={})",
            self.inner.a(),
            self.inner.b(),
            self.inner.pieces().len()
        )
    }
}

/// Names of the built-in profiles accepted by `Measure.preset`.
#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    presets::NAMES.to_vec()
}

fn edge_sample_dict<'py>(
    py: Python<'py>,
    s: &frontier::EdgeSample,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("t", s.t)?;
    d.set_item("chi", s.chi)?;
    d.set_item("eta", s.eta)?;
    d.set_item("component", s.component.as_str())?;
    d.set_item("case", s.case)?;
    d.set_item("multiplicity", s.multiplicity)?;
    d.set_item("x_vec", s.x_vec)?;
    d.set_item("y_vec", s.y_vec)?;
    d.set_item("a1", s.a1)?;
    d.set_item("a2", s.a2)?;
    d.set_item("b1", s.b1)?;
    d.set_item("b2", s.b2)?;
    Ok(d)
}

/// Point where the frozen boundary touches the bottom side of the
/// trapezoid.
#[pyfunction]
fn tangency_point(m: PyRef<'_, Measure>) -> (f64, f64) {
    frontier::tangency_point(&m.inner)
}

/// Position `(chi, eta)` of the boundary point with parameter `t`.
#[pyfunction]
fn edge_point(m: PyRef<'_, Measure>, t: f64) -> PyResult<(f64, f64)> {
    frontier::edge_point(&m.inner, t).map_err(verr)
}

/// Local case number and root multiplicity `(case, multiplicity)` at
/// parameter `t`.
#[pyfunction]
fn classify_case(m: PyRef<'_, Measure>, t: f64) -> PyResult<(u8, u8)> {
    frontier::classify_case(&m.inner, t).map_err(verr)
}

/// Full local data at parameter `t`: position, component kind, case,
/// multiplicity, tangent/normal frame and expansion coefficients.
#[pyfunction]
fn local_geometry(py: Python<'_>, m: PyRef<'_, Measure>, t: f64) -> PyResult<Py<PyDict>> {
    let s = frontier::local_geometry(&m.inner, t).map_err(verr)?;
    Ok(edge_sample_dict(py, &s)?.unbind())
}

/// Sampled boundary points (list of dicts), one polyline per component,
/// ordered by ascending `t`.
#[pyfunction]
#[pyo3(signature = (m, budget = 256))]
fn edge_segments(py: Python<'_>, m: PyRef<'_, Measure>, budget: usize) -> PyResult<Vec<Vec<Py<PyDict>>>> {
    frontier::sample_edge_segments(&m.inner, budget)
        .iter()
        .map(|seg| seg.iter().map(|s| Ok(edge_sample_dict(py, s)?.unbind())).collect())
        .collect()
}

/// The CSV table of sampled boundary points emitted by the command-line
/// `frontier` verb.
#[pyfunction]
#[pyo3(signature = (m, budget = 256))]
fn edge_csv(m: PyRef<'_, Measure>, budget: usize) -> String {
    frontier::edge_samples_csv(&frontier::sample_edge(&m.inner, budget))
}

/// Assemble the whole frozen boundary: tangency point, curved segments,
/// flat segments, probe-only points, and a completeness flag.
#[pyfunction]
#[pyo3(signature = (m, budget = 256))]
fn assemble_boundary(py: Python<'_>, m: PyRef<'_, Measure>, budget: usize) -> PyResult<Py<PyDict>> {
    let asm = frontier::assemble_boundary(&m.inner, budget);
    let segments: Vec<Vec<Py<PyDict>>> = asm
        .edge_segments
        .iter()
        .map(|seg| {
            seg.iter()
                .map(|s| Ok(edge_sample_dict(py, s)?.unbind()))
                .collect::<PyResult<_>>()
        })
        .collect::<PyResult<_>>()?;
    let d = PyDict::new(py);
    d.set_item("tangency", asm.tangency)?;
    d.set_item("segments", segments)?;
    d.set_item(
        "flat_segments",
        asm.flat_segments.iter().map(|iv| (iv.lo, iv.hi)).collect::<Vec<_>>(),
    )?;
    d.set_item("probe_points", asm.probe_points)?;
    d.set_item("complete", asm.complete)?;
    Ok(d.unbind())
}

/// Probe the boundary vertically above `t` at depths `2^-1 .. 2^-depths`;
/// returns the raw points, the deepest one, a Cauchy-type bound, and the
/// reciprocal-in-depth fitted limit.
#[pyfunction]
#[pyo3(signature = (m, t, depths = 20))]
fn boundary_probe(
    py: Python<'_>,
    m: PyRef<'_, Measure>,
    t: f64,
    depths: u32,
) -> PyResult<Py<PyDict>> {
    let probe = frontier::boundary_probe(&m.inner, t, depths).map_err(verr)?;
    let d = PyDict::new(py);
    d.set_item("points", probe.points)?;
    d.set_item("last", probe.last)?;
    d.set_item("cauchy_bound", probe.cauchy_bound)?;
    d.set_item("limit", probe.limit)?;
    Ok(d.unbind())
}

/// Decide whether the rescaled position `(chi, eta)` lies in the liquid
/// region; returns `(inside, root)` where `root` is the upper-half-plane
/// critical point as `(re, im)` when inside, else `None`.
#[pyfunction]
fn membership(
    m: PyRef<'_, Measure>,
    chi: f64,
    eta: f64,
) -> PyResult<(bool, Option<(f64, f64)>)> {
    let ctx = SaddleContext::new(&m.inner, chi, eta).map_err(verr)?;
    let (inside, root) = ctx.liquid_membership().map_err(verr)?;
    Ok((inside, root.map(tuple)))
}

/// Upper-half-plane critical point at `(chi, eta)`, if any, as `(re, im)`.
#[pyfunction]
fn upper_root(m: PyRef<'_, Measure>, chi: f64, eta: f64) -> PyResult<Option<(f64, f64)>> {
    let ctx = SaddleContext::new(&m.inner, chi, eta).map_err(verr)?;
    Ok(ctx.upper_root().map_err(verr)?.map(tuple))
}

/// Closed-form inverse of the critical-point equation: the position
/// `(chi, eta)` whose critical point is `w = re + i*im`.
#[pyfunction]
fn chi_eta_from_w(m: PyRef<'_, Measure>, re: f64, im: f64) -> PyResult<(f64, f64)> {
    saddle::chi_eta_from_w(&m.inner, Complex64::new(re, im)).map_err(verr)
}

/// Exact kernel value at sites `(u, r)`, `(v, s)` under the given top row,
/// as a `(numerator, denominator)` pair of ints.
#[pyfunction]
fn kernel(toprow: Vec<i64>, u: i64, r: usize, v: i64, s: usize) -> PyResult<(BigInt, BigInt)> {
    let top = parse_top(toprow)?;
    let value = kernel_mod::kernel(&top, Site::new(u, r), Site::new(v, s)).map_err(verr)?;
    Ok(rational_pair(value))
}

/// Double-contour quadrature of the kernel; the real part approximates the
/// exact value and the imaginary part is a convergence diagnostic.
#[pyfunction]
#[pyo3(signature = (toprow, u, r, v, s, nodes = 1024))]
fn kernel_contour(
    toprow: Vec<i64>,
    u: i64,
    r: usize,
    v: i64,
    s: usize,
    nodes: usize,
) -> PyResult<(f64, f64)> {
    let top = parse_top(toprow)?;
    let (site_ur, site_vs) = (Site::new(u, r), Site::new(v, s));
    let mut params = kernel_mod::ContourParams::for_query(&top, site_ur, site_vs).map_err(verr)?;
    params.nodes = nodes;
    params.validate(&top, site_ur, site_vs).map_err(verr)?;
    Ok(tuple(kernel_mod::kernel_contour(&top, site_ur, site_vs, &params).map_err(verr)?))
}

/// Exact probability that every listed site `(u, r)` carries a particle,
/// via the kernel determinant, as a `(numerator, denominator)` pair.
#[pyfunction]
fn correlation(toprow: Vec<i64>, sites: Vec<(i64, usize)>) -> PyResult<(BigInt, BigInt)> {
    let top = parse_top(toprow)?;
    let value = kernel_mod::correlation(&top, &parse_sites(sites)).map_err(verr)?;
    Ok(rational_pair(value))
}

/// The same probability by exhaustive enumeration — the independent route
/// used to cross-check `correlation`.
#[pyfunction]
fn empirical_correlation(
    toprow: Vec<i64>,
    sites: Vec<(i64, usize)>,
) -> PyResult<(BigInt, BigInt)> {
    let top = parse_top(toprow)?;
    let value =
        combinatorics::empirical_correlation(&top, &parse_sites(sites)).map_err(verr)?;
    Ok(rational_pair(value))
}

/// Exact number of interlacing arrays under the given top row.
#[pyfunction]
fn count_patterns(toprow: Vec<i64>) -> PyResult<num_bigint::BigUint> {
    Ok(combinatorics::count_patterns(&parse_top(toprow)?))
}

/// All interlacing arrays under the top row, each as a list of rows from
/// the single bottom entry up to the fixed top row.
#[pyfunction]
fn enumerate_patterns(toprow: Vec<i64>) -> PyResult<Vec<Vec<Vec<i64>>>> {
    let top = parse_top(toprow)?;
    let patterns = combinatorics::enumerate_patterns(&top).map_err(verr)?;
    Ok(patterns.map(|p| p.rows().to_vec()).collect())
}

/// Draw one uniformly random interlacing array under the top row; a fixed
/// seed gives a fixed array.
#[pyfunction]
#[pyo3(signature = (toprow, seed = 0))]
fn sample_pattern(toprow: Vec<i64>, seed: u64) -> PyResult<Vec<Vec<i64>>> {
    let top = parse_top(toprow)?;
    Ok(combinatorics::sample_pattern(&top, seed).rows().to_vec())
}

/// Whether `lower` interlaces below `upper` (strictly decreasing rows with
/// `upper[i] >= lower[i] > upper[i+1]`).
#[pyfunction]
fn interlaces(upper: Vec<i64>, lower: Vec<i64>) -> PyResult<bool> {
    combinatorics::interlaces(&upper, &lower).map_err(verr)
}

/// Render the rhombus-tiling picture of an array (rows bottom-up, as
/// returned by `sample_pattern`) as an SVG document.
#[pyfunction]
fn tiling_svg(rows: Vec<Vec<i64>>) -> PyResult<String> {
    let pattern = GTPattern::from_rows(rows).map_err(verr)?;
    Ok(combinatorics::tiling_svg(&combinatorics::to_tiling(&pattern)))
}

/// Run a named self-check suite (or `"all"`); returns a list of dicts with
/// `suite`, `check`, `passed`, `detail`.
#[pyfunction]
#[pyo3(signature = (suite = "all", seed = 0))]
fn run_checks(py: Python<'_>, suite: &str, seed: u64) -> PyResult<Vec<Py<PyDict>>> {
    let results = if suite == "all" {
        verify::run_all(seed)
    } else {
        verify::run_suite(suite, seed)
            .ok_or_else(|| PyValueError::new_err(format!("unknown suite: {suite}")))?
    };
    results
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("suite", r.suite)?;
            d.set_item("check", r.check)?;
            d.set_item("passed", r.passed)?;
            d.set_item("detail", r.detail.as_str())?;
            Ok(d.unbind())
        })
        .collect()
}

#[pymodule]
fn arctic(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Measure>()?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(tangency_point, m)?)?;
    m.add_function(wrap_pyfunction!(edge_point, m)?)?;
    m.add_function(wrap_pyfunction!(classify_case, m)?)?;
    m.add_function(wrap_pyfunction!(local_geometry, m)?)?;
    m.add_function(wrap_pyfunction!(edge_segments, m)?)?;
    m.add_function(wrap_pyfunction!(edge_csv, m)?)?;
    m.add_function(wrap_pyfunction!(assemble_boundary, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_probe, m)?)?;
    m.add_function(wrap_pyfunction!(membership, m)?)?;
    m.add_function(wrap_pyfunction!(upper_root, m)?)?;
    m.add_function(wrap_pyfunction!(chi_eta_from_w, m)?)?;
    m.add_function(wrap_pyfunction!(kernel, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_contour, m)?)?;
    m.add_function(wrap_pyfunction!(correlation, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(count_patterns, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_patterns, m)?)?;
    m.add_function(wrap_pyfunction!(sample_pattern, m)?)?;
    m.add_function(wrap_pyfunction!(interlaces, m)?)?;
    m.add_function(wrap_pyfunction!(tiling_svg, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    Ok(())
}
