//! Verification and construction toolkit for chaos criteria in
//! non-autonomous discrete systems `x_{n+1} = f_n(x_n)` on the real line.
//!
//! The crate is organized around the pipeline the criteria suggest:
//!
//! * [`transition`] — transition matrices, irreducibility, allowable-word
//!   combinatorics;
//! * [`symbolic`] — shift-space streams, Sturmian selectors, and the block
//!   constructions producing witness itineraries;
//! * [`system`] — closed-form piecewise-monotone map families, exact
//!   interval images, branchwise preimages, induced systems;
//! * [`verifier`] — coupled-expansion / expansion / equi-continuity
//!   hypothesis checks and nested cylinder enclosures;
//! * [`statistics`] — orbit-pair proximality, separation, and
//!   distributional density measurements;
//! * [`config`] / [`report`] — the run configuration and the emitted
//!   report.

pub mod config;
pub mod interval;
pub mod report;
pub mod statistics;
pub mod symbolic;
pub mod system;
pub mod transition;
pub mod verifier;

pub use config::{ConfigError, RunConfig};
pub use interval::{Interval, IntervalUnion};
pub use report::ChaosReport;
pub use statistics::{OrbitTrace, StatsError};
pub use symbolic::{SymbolStream, SymbolicError};
pub use system::{MapFamily, MapKind, ParamSpec, System, SystemError};
pub use transition::{Symbol, SymbolWord, TransitionError, TransitionMatrix};
pub use verifier::{SetFamily, VerifierError};
