//! Time-domain Green matrix: heat kernels, contour quadrature of the residual kernel,
//! kernel bounds and sampling on grids.

pub mod bounds;
pub mod contour;
pub mod heat;
pub mod residual;
pub mod sample;

pub use bounds::{mu0, sweep_operator, verify_kernel_bounds, BoundEntry, BoundReport, BoundSweep};
pub use contour::{
    build_contour, build_contour_highfreq, build_contour_lowfreq, Contour, ContourOptions, ContourSegment, Regime,
};
pub use heat::{heat_kernel_dirichlet, heat_kernel_neumann};
pub use residual::{
    green_by_contour, green_time, residual_kernel, residual_kernel_general, residual_kernel_time, residue_at_zero,
    residue_by_circle, residue_general, scalar_residual, ResidualParts, Scaled, ScalarResidual,
};
pub use sample::{kernel_csv, sample_general_kernel_grid, sample_kernel_grid, KernelSample};
