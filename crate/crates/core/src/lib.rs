//! Age-of-information analysis for single-server FCFS, preemptive LCFS and
//! infinite-server queues: closed-form and semi-numeric age calculators,
//! an exact event-driven simulator, and sweep/validation drivers.

pub mod analytic;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod parallel;
pub mod quadrature;
pub mod simulator;

pub use analytic::{AnalyticAge, Discipline, Method, QueueSpec};
pub use distributions::{Distribution, Family};
pub use error::{AoiError, Result};
pub use simulator::{SimConfig, SimResult, StopRule};
