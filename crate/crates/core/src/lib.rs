//! Elitist ant system solver for the job-shop scheduling problem.
//!
//! The crate is organized around a small pipeline:
//!
//! - [`instance`] parses and validates OR-Library style instances and serves
//!   the embedded best-known-solution table for the Lawrence benchmark set.
//! - [`schedule`] decodes operation sequences into start times (semi-active
//!   list scheduling), verifies the three job-shop constraint families, and
//!   renders text Gantt charts.
//! - [`colony`] is the elitist ant system itself: delay-tolerant eligibility,
//!   SPT/LPT visibility, pheromone-weighted transition probabilities, roulette
//!   selection, and the cycle loop with posteriori pheromone updates.
//! - [`oracle`] enumerates tiny instances exhaustively and carries a second,
//!   independently written decoder used to cross-check [`schedule`].
//! - [`bench`] replays the benchmark protocol (repeated seeded runs per
//!   instance) and emits table/CSV/JSON reports against best-known solutions.
//! - [`config`] parses `key = value` parameter files and applies overrides.
//!
//! Times are integral ([`Time`]) because the benchmark instances use integer
//! processing times; all stochastic arithmetic is generic over a floating
//! scalar implementing [`Real`], with `f64` aliases exported at the root.
//!
//! ```
//! use formic_core::{colony, fixtures, Params};
//!
//! let instance = fixtures::builtin("LA05").expect("bundled instance");
//! let mut params = Params::for_instance(&instance);
//! params.cycles = 50;
//! let result = colony::run(&instance, &params).unwrap();
//! assert!(result.best_makespan >= 593); // LA05 optimum
//! ```

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

pub mod bench;
pub mod colony;
pub mod config;
pub mod fixtures;
pub mod instance;
pub mod oracle;
pub mod schedule;

/// Integer time unit used for durations, start times, and makespans.
pub type Time = i64;

/// Floating scalar the stochastic core is generic over (`f32` or `f64`).
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

impl<T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static> Real for T {}

/// Colony parameters instantiated at the default `f64` precision.
pub type Params = colony::ColonyParams<f64>;

/// Pheromone field instantiated at the default `f64` precision.
pub type Trails = colony::PheromoneField<f64>;
