//! Eigenvalues and eigenfunctions of the Helmholtz equation in deformed
//! spherical cavities, by second-order boundary perturbation theory.
//!
//! A star-shaped boundary `r(theta)` is mapped onto a sphere of its mean radius
//! `R0` with `R = r (1 + f)`; the deformation `f` is expanded in spherical
//! harmonics and the Dirichlet or Neumann spectrum follows in closed form from
//! the sphere's Bessel zeros.
//!
//! ```
//! use helmpert::{catalog, BoundaryCondition, SpectrumRequest};
//!
//! let shape = catalog::lookup("superegg-2.5").unwrap();
//! let req = SpectrumRequest::for_catalog(&shape, BoundaryCondition::Dirichlet, 4);
//! let table = helmpert::compute_spectrum(&req).unwrap();
//! assert!((table.rows[0].total - 9.169).abs() < 2e-3);
//! ```

pub mod catalog;
pub mod error;
pub mod format;
pub mod perturb;
pub mod shapes;
pub mod specfun;
pub mod spectrum;

pub use error::{Error, Result};
pub use perturb::{BoundaryCondition, EnergyOptions, EnergyResult, Flag, ModeIndex, WavefunctionExpansion};
pub use shapes::{BoundaryShape, ExpansionOptions, HarmonicExpansion, ReferenceRadius};
pub use spectrum::{
    compare, compare_reference, compute_spectrum, degeneracy_signature, ComparisonReport, LevelRow, LevelTable,
    ReferenceTable, SpectrumRequest,
};
