//! Time evolution of one Fourier mode: Duhamel formula, finite-difference
//! reference, uniqueness runs and assembly over modes.

mod assemble;
mod duhamel;
mod oracle;
mod problem;
mod uniqueness;

pub use assemble::{assemble_3d, assemble_fields, parseval_check, solve_modes, ParsevalReport, PhysicalSamples};
pub use duhamel::{duhamel_solve, propagate, sigma_rule, DuhamelConfig};
pub use oracle::{crank_nicolson_oracle, crank_nicolson_run, default_z_max, CnConfig, CnRun};
pub use problem::{initial_only, AnalyticData, InitialOnly, ProblemData, SampledData, StokesProblem, TimeSeries, Trajectory};
pub use uniqueness::{noise_field, uniqueness_demo, UniquenessReport};
