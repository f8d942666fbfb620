//! Resolvent, Green matrix and Duhamel solver for the per-mode Stokes vorticity
//! problem on `T^2 x R_+`.

pub mod biot_savart;
pub mod error;
mod expkernel;
pub mod grid;
pub mod io;
pub mod kernels;
pub mod mat2;
pub mod quadrature;
pub mod resolvent;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result, Warning};
pub use grid::{apply_delta_xi, HalfLineGrid, ModeField};
pub use mat2::{Mat2C, Vec2C};
pub use spectral::{spectral_root, FourierMode, SpectralPoint};
pub use num_complex::Complex64;
