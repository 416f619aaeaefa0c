//! Exact and asymptotic analysis of uniformly random interlacing integer
//! arrays (Gelfand–Tsetlin patterns) with a fixed top row, viewed as lozenge
//! tilings of half-hexagonal regions.
//!
//! The crate has two halves that meet in the middle:
//!
//! * **Finite `n`, exact arithmetic** — [`combinatorics`] enumerates, counts
//!   and samples patterns; [`kernel`] evaluates the determinantal correlation
//!   kernel of the induced particle process in exact rational arithmetic and
//!   cross-checks it with a double contour integral.
//! * **Asymptotic geometry** — [`measure`] models the limiting density profile
//!   of the rescaled top row, [`saddle`] locates the critical points that
//!   decide whether a rescaled position lies in the disordered ("liquid")
//!   region, and [`frontier`] parameterizes and classifies the boundary curve
//!   of that region, including its tangency point, cusps and flat pieces.
//!
//! [`presets`] ships six worked density profiles with closed-form transforms
//! and regression targets; [`verify`] bundles fast self-check suites used by
//! the command-line `verify` subcommand.

pub mod combinatorics;
pub(crate) mod linalg;
pub mod frontier;
pub mod kernel;
pub mod measure;
pub mod presets;
pub mod saddle;
pub mod verify;

pub use measure::{DensityPiece, Interval, Measure, RClass, RComponent};
