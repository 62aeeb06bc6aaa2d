//! One-sided symbol sequences over a transition matrix, the Sturmian
//! selector family, and the two block constructions used to assemble
//! scrambled-set witness itineraries.

mod pumped;
mod revisit;
mod stream;
mod sturmian;

pub use pumped::{build_pumped_stream, PumpedLevel, PumpedSchedule};
pub use revisit::{build_revisit_stream, RevisitSchedule};
pub use stream::{rho_distance, SymbolStream};
pub use sturmian::{selector_difference_indices, sturmian_bit, sturmian_word};

use thiserror::Error;

use crate::transition::TransitionError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolicError {
    #[error("selector parameter {0} must lie strictly inside (0, 1)")]
    ParameterOutOfRange(f64),
    #[error("truncation must be at least 1")]
    ZeroTruncation,
    #[error("stream prefix unavailable: requested {requested} symbols, only {available} defined")]
    PrefixUnavailable { requested: usize, available: usize },
    #[error("selector supplies {available} bits but {needed} blocks were requested")]
    SelectorExhausted { needed: usize, available: usize },
    #[error("construction hypotheses not met: {0}")]
    HypothesesNotMet(String),
    #[error("schedule bookkeeping inconsistent at level {level}: {detail}")]
    ScheduleInconsistent { level: u32, detail: String },
    #[error("schedule arithmetic overflowed at level {0}")]
    ScheduleOverflow(u32),
    #[error(transparent)]
    Transition(#[from] TransitionError),
}
