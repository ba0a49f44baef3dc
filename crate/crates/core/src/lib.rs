//! Spectral solver and certification toolkit for Beurling's conformal free
//! boundary value problem `|f'(ξ)| = Φ(ξ, f(ξ))` on the unit circle, with
//! prescribed critical points.

pub mod blaschke;
pub mod certify;
pub mod error;
pub mod regions;
pub mod regularity;
pub mod solver;
pub mod spectral;
pub mod weight;

pub use blaschke::BlaschkeProduct;
pub use certify::{Certificate, CertificateKind};
pub use error::{Error, Result};
pub use regions::RasterRegion;
pub use regularity::{DecayKind, SpectrumReport};
pub use solver::{solve, InitialMap, SolveOptions, SolveReport, Target};
pub use spectral::{BoundaryGrid, DiskFunction};
pub use weight::{WeightField, WeightKind};
