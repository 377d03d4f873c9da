//! Monte Carlo simulator for secret-key agreement over a dummy random generator.
//!
//! A run executes `R` independent protocol rounds between the legitimate
//! partners ([`protocol`]), evaluates the eavesdropper's three canonical
//! strategies on the public transcript ([`adversary`]), distills the
//! resulting digit streams with repetition codewords and optional
//! multiply-add-shift hashing ([`distillation`]), and reports the net error
//! rate ε, net knowledge rate ε′, discard rate D and the Cryptologic Limit
//! lower bound CL ([`metrics`]).
//!
//! ```
//! use drsim_core::{run_simulation, ProtocolParams};
//!
//! let params = ProtocolParams { n: 400, k: 8.0, rounds: 200, ..Default::default() };
//! let row = run_simulation(&params, 42).unwrap();
//! assert_eq!(row.metrics.blocks_total, 50);
//! ```

pub mod adversary;
pub mod distillation;
pub mod error;
pub mod metrics;
pub mod params;
pub mod plot;
pub mod protocol;
pub mod seed;
pub mod sim;
pub mod table;
pub mod vector;

pub use adversary::{PublicView, StrategyId};
pub use distillation::{BlockOutcome, DigitStreams, TallyCounts};
pub use error::{Error, Result};
pub use metrics::RunMetrics;
pub use params::ProtocolParams;
pub use protocol::{RoundTranscript, SyncChoice};
pub use sim::{run_simulation, run_simulation_with, sweep, ResultRow, RunOptions, SweepConfig, SweepParam};
pub use vector::{BitVector, ParamVector, Permutation};
