//! Pseudo-spectral solver for the stationary Navier–Stokes equations on the
//! half space with inhomogeneous Dirichlet data.

pub mod besov;
pub mod config;
pub mod error;
mod fft;
pub mod field;
pub mod fixed_point;
pub mod grid;
pub mod io;
pub mod kernels;
pub mod presets;
pub mod profile;
pub mod quadrature;
pub mod random;
pub mod spectral;
pub mod stokes;

pub use besov::{BesovIndex, CLIndex, RatioReport};
pub use config::{ReportFormat, RunConfig};
pub use error::{Error, Result};
pub use field::{HalfSpaceField, TangentialField};
pub use fixed_point::{Calibration, Diagnostics, IterationReport, SolverConfig};
pub use grid::{DyadicRange, Grid};
pub use io::FieldFile;
pub use presets::{PresetData, PresetSpec};
pub use profile::{DecayReport, ProfileField};
pub use stokes::{BoundaryVariant, LinearSolution};
