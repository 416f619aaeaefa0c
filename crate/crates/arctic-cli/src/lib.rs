//! Command-line front door for the interlacing-array library: measure
//! ingestion, boundary-curve and kernel computation, uniform sampling,
//! verification suites, and preset export.
//!
//! Exit codes: 0 on success, 1 on a domain error (reported as a structured
//! message on standard error), 2 on a usage error (clap reports it). All
//! output is deterministic given the flags and the seed, and file output is
//! written atomically (temp file + rename), so a failed run never leaves a
//! partial data file behind. Diagnostics carry no escape codes, and help
//! styling follows `NO_COLOR`.

use arctic_core::combinatorics::{sample_pattern, tiling_svg, to_tiling, Site, TopRow};
use arctic_core::frontier::{
    assemble_boundary, edge_samples_csv, local_geometry, EdgeSample,
};
use arctic_core::kernel::kernel_json;
use arctic_core::presets;
use arctic_core::saddle::SaddleContext;
use arctic_core::verify;
use arctic_core::Measure;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "arctic",
    version,
    about = "Exact kernels and limit-shape boundaries for random interlacing arrays"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

/// Density profile input: exactly one source.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct MeasureInput {
    /// Measure file: JSON of the form
    /// {"pieces": [{"interval": [lo, hi], "poly": [c0, c1, ...]}, ...]}
    #[arg(long, value_name = "FILE")]
    measure: Option<PathBuf>,
    /// Built-in profile name (a, b, c, d, e or f)
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SampleFormat {
    Json,
    Svg,
}

#[derive(Subcommand)]
enum Verb {
    /// Sample the edge curve and assemble the complete boundary
    Frontier {
        #[command(flatten)]
        input: MeasureInput,
        /// Target number of edge samples across all components
        #[arg(long, default_value_t = 256)]
        budget: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output file (standard output when omitted)
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Classify the boundary point attached to one parameter value
    Classify {
        #[command(flatten)]
        input: MeasureInput,
        /// Parameter value t on the real line
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Decide whether a position lies in the liquid region
    Membership {
        #[command(flatten)]
        input: MeasureInput,
        #[arg(long, allow_hyphen_values = true)]
        chi: f64,
        #[arg(long, allow_hyphen_values = true)]
        eta: f64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Exact kernel entry for one query, as exact-rational JSON
    Kernel {
        /// Comma-separated strictly decreasing top row, e.g. 4,2,0
        #[arg(long, allow_hyphen_values = true)]
        toprow: String,
        /// Column of the first site
        #[arg(long, allow_hyphen_values = true)]
        u: i64,
        /// Row of the first site (1-based, below the top row)
        #[arg(long)]
        r: usize,
        /// Column of the second site
        #[arg(long, allow_hyphen_values = true)]
        v: i64,
        /// Row of the second site
        #[arg(long)]
        s: usize,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Draw uniform random patterns with a seeded generator
    Sample {
        /// Comma-separated strictly decreasing top row, e.g. 6,4,2,0
        #[arg(long, allow_hyphen_values = true)]
        toprow: String,
        /// Number of patterns to draw (draw k uses stream seed+k)
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// json: array of patterns; svg: lozenge rendering (count must be 1)
        #[arg(long, value_enum, default_value_t = SampleFormat::Json)]
        format: SampleFormat,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run verification suites; exit 0 only if every check passes
    Verify {
        /// Suite name (measure, combinatorics, kernel, saddle, frontier,
        /// presets) or "all"
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Preset utilities
    Preset {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// Write the measure file for a built-in profile
    Export {
        /// Profile name (a, b, c, d, e or f)
        name: String,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

/// Parse the argument vector and execute; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests arrive as "errors" with stdout
            // routing; real usage errors go to stderr with code 2.
            let to_stderr = err.use_stderr();
            let _ = err.print();
            return if to_stderr { 2 } else { 0 };
        }
    };
    match dispatch(cli.verb) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            1
        }
    }
}

fn dispatch(verb: Verb) -> Result<i32, String> {
    match verb {
        Verb::Frontier { input, budget, format, out } => {
            if budget < 16 {
                return Err(format!("budget {budget} is too small; need at least 16"));
            }
            let m = load_measure(&input)?;
            let assembly = assemble_boundary(&m, budget);
            let content = match format {
                Format::Csv => {
                    let flat: Vec<EdgeSample> =
                        assembly.edge_segments.iter().flatten().copied().collect();
                    edge_samples_csv(&flat)
                }
                Format::Json => {
                    let segments: Vec<Value> = assembly
                        .edge_segments
                        .iter()
                        .map(|seg| Value::Array(seg.iter().map(sample_json).collect()))
                        .collect();
                    pretty(&json!({
                        "tangency": [assembly.tangency.0, assembly.tangency.1],
                        "segments": segments,
                        "flat_segments": assembly
                            .flat_segments
                            .iter()
                            .map(|iv| json!([iv.lo, iv.hi]))
                            .collect::<Vec<_>>(),
                        "probe_points": assembly
                            .probe_points
                            .iter()
                            .map(|p| json!([p.0, p.1]))
                            .collect::<Vec<_>>(),
                        "complete": assembly.complete,
                    }))
                }
            };
            write_output(out.as_deref(), &content)?;
            Ok(0)
        }
        Verb::Classify { input, t, format, out } => {
            let m = load_measure(&input)?;
            let sample = local_geometry(&m, t).map_err(|e| e.to_string())?;
            let content = match format {
                Format::Csv => edge_samples_csv(&[sample]),
                Format::Json => pretty(&sample_json(&sample)),
            };
            write_output(out.as_deref(), &content)?;
            Ok(0)
        }
        Verb::Membership { input, chi, eta, out } => {
            let m = load_measure(&input)?;
            let ctx = SaddleContext::new(&m, chi, eta).map_err(|e| e.to_string())?;
            let (inside, root) = ctx.liquid_membership().map_err(|e| e.to_string())?;
            let content = pretty(&json!({
                "chi": chi,
                "eta": eta,
                "inside": inside,
                "root": root.map(|w| json!([w.re, w.im])).unwrap_or(Value::Null),
            }));
            write_output(out.as_deref(), &content)?;
            Ok(0)
        }
        Verb::Kernel { toprow, u, r, v, s, out } => {
            let top = parse_toprow(&toprow)?;
            let text = kernel_json(&top, Site::new(u, r), Site::new(v, s))
                .map_err(|e| e.to_string())?;
            write_output(out.as_deref(), &format!("{text}\n"))?;
            Ok(0)
        }
        Verb::Sample { toprow, count, seed, format, out } => {
            let top = parse_toprow(&toprow)?;
            let content = match format {
                SampleFormat::Json => {
                    let patterns: Vec<Value> = (0..count)
                        .map(|k| {
                            let p = sample_pattern(&top, seed.wrapping_add(k as u64));
                            rows_json(p.rows())
                        })
                        .collect();
                    pretty(&json!({
                        "toprow": top.entries(),
                        "seed": seed,
                        "patterns": patterns,
                    }))
                }
                SampleFormat::Svg => {
                    if count != 1 {
                        return Err(format!(
                            "svg output renders a single pattern; got --count {count}"
                        ));
                    }
                    let p = sample_pattern(&top, seed);
                    tiling_svg(&to_tiling(&p))
                }
            };
            write_output(out.as_deref(), &content)?;
            Ok(0)
        }
        Verb::Verify { suite, seed, out } => {
            let results = if suite == "all" {
                verify::run_all(seed)
            } else {
                verify::run_suite(&suite, seed).ok_or_else(|| {
                    format!(
                        "unknown suite {suite:?}; expected \"all\" or one of {}",
                        verify::SUITES.join(", ")
                    )
                })?
            };
            let mut report = String::new();
            let mut failures = 0usize;
            for r in &results {
                if r.passed {
                    report.push_str(&format!("{}/{}: ok\n", r.suite, r.check));
                } else {
                    failures += 1;
                    report.push_str(&format!(
                        "{}/{}: FAIL - {}\n",
                        r.suite, r.check, r.detail
                    ));
                }
            }
            report.push_str(&format!(
                "{} checks, {} failures\n",
                results.len(),
                failures
            ));
            write_output(out.as_deref(), &report)?;
            Ok(if failures == 0 { 0 } else { 1 })
        }
        Verb::Preset { action } => match action {
            PresetAction::Export { name, out } => {
                let p = presets::preset(&name).map_err(|e| e.to_string())?;
                write_output(out.as_deref(), &p.measure.to_json())?;
                Ok(0)
            }
        },
    }
}

fn load_measure(input: &MeasureInput) -> Result<Measure, String> {
    match (&input.measure, &input.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            Measure::from_json(&text)
                .map_err(|e| format!("invalid measure file {}: {e}", path.display()))
        }
        (None, Some(name)) => Ok(presets::preset(name).map_err(|e| e.to_string())?.measure),
        // clap's group constraint rules the other combinations out.
        _ => unreachable!("argument group guarantees exactly one input source"),
    }
}

fn parse_toprow(text: &str) -> Result<TopRow, String> {
    let entries = text
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<i64>()
                .map_err(|_| format!("top row entry {part:?} is not an integer"))
        })
        .collect::<Result<Vec<i64>, String>>()?;
    TopRow::new(entries).map_err(|e| e.to_string())
}

fn sample_json(s: &EdgeSample) -> Value {
    json!({
        "t": s.t,
        "chi": s.chi,
        "eta": s.eta,
        "component": s.component.as_str(),
        "case": s.case,
        "multiplicity": s.multiplicity,
        "x": [s.x_vec.0, s.x_vec.1],
        "y": [s.y_vec.0, s.y_vec.1],
        "a1": s.a1,
        "a2": s.a2,
        "b1": s.b1,
        "b2": s.b2,
    })
}

fn rows_json(rows: &[Vec<i64>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|row| Value::Array(row.iter().map(|&x| json!(x)).collect()))
            .collect(),
    )
}

fn pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("valid JSON tree");
    text.push('\n');
    text
}

/// Print to standard output, or write the whole file atomically so an
/// error can never leave partial data behind.
fn write_output(out: Option<&Path>, content: &str) -> Result<(), String> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| format!("cannot write to standard output: {e}"))
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(parent) if !parent.as_os_str().is_empty() => parent,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .map_err(|e| format!("cannot create temp file in {}: {e}", dir.display()))?;
            tmp.write_all(content.as_bytes())
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            tmp.persist(path)
                .map(|_| ())
                .map_err(|e| format!("cannot rename into {}: {e}", path.display()))
        }
    }
}
