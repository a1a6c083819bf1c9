//! Special-function kernel: spherical Bessel functions and their zeros,
//! spherical harmonics, Clebsch-Gordan coefficients and Gauss-Legendre rules.

pub mod bessel;
pub mod clebsch;
pub mod harmonics;
pub mod quadrature;
pub mod zeros;

pub use bessel::{spherical_bessel_j, spherical_bessel_j_all, spherical_bessel_j_prime, spherical_bessel_j_second};
pub use clebsch::{clebsch_gordan, AngularMomentumTriple};
pub use harmonics::{spherical_harmonic, LegendreTable};
pub use quadrature::gauss_legendre_nodes;
pub use zeros::{bessel_zero, zero_proximity, BesselZeroKind};
