//! Network scale-up method (NSUM) toolkit.
//!
//! The crate covers four layers:
//!
//! * [`stats`] and [`rng`]: normal quantiles, summaries, and deterministic
//!   substreams keyed by `(seed, path)`.
//! * [`degree_models`] and [`estimator`]: generative degree-report models, the
//!   classic scale-up estimator `N̂ = M · Σd_u / Σd`, its variance
//!   approximations and plug-in confidence intervals.
//! * [`design`]: the minimum sample size heuristic and the sample-size surface.
//! * [`graphs`] and [`montecarlo`]: random graph generators and the
//!   simulation harness (factorial coverage study, deviation sweep and the
//!   retrospective case-study engine).

pub mod degree_models;
pub mod design;
pub mod error;
pub mod estimator;
pub mod graphs;
pub mod montecarlo;
pub mod rng;
pub mod stats;

pub use degree_models::{DegreeModel, DegreeSample, PopulationSpec};
pub use design::{SampleSize, StudyDesign};
pub use error::{Error, Result};
pub use estimator::{MomentSet, NsumEstimate};
pub use graphs::{DeviationFamily, Graph, GraphModelSpec};
pub use montecarlo::{CaseStudy, RetroResult, SimConfig, SimResult};
pub use rng::RngStream;
pub use stats::ZConvention;
