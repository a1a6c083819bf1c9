//! Order-by-order eigenvalue and eigenfunction corrections through second order.
//!
//! Energies are returned both as absolute values and as ratios `E^(i)/E^(0)`.
//! States with `l = 0` use the non-degenerate formulas and accept any
//! expansion; states with `l != 0` require an axisymmetric deformation.

mod energy;
mod operators;
mod wavefunction;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{bessel_zero, BesselZeroKind};

pub use energy::{
    energy, first_order_degenerate, first_order_nondegenerate, second_order_degenerate,
    second_order_nondegenerate, unperturbed_energy, SecondOrder,
};
pub use operators::{
    boundary_projection, boundary_residual, boundary_residual_at, residual_order_check, verify_inner_product, InnerProductCheck, ResidualReport,
};
pub use wavefunction::{
    first_order_wavefunction, second_order_wavefunction, Coefficient, WavefunctionExpansion,
};

/// Boundary condition on the cavity wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    /// Zeros that fix the unperturbed spectrum.
    pub fn zero_kind(self) -> BesselZeroKind {
        match self {
            BoundaryCondition::Dirichlet => BesselZeroKind::FunctionZero,
            BoundaryCondition::Neumann => BesselZeroKind::DerivativeZero,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dirichlet" | "dbc" | "d" => Ok(BoundaryCondition::Dirichlet),
            "neumann" | "nbc" | "n" => Ok(BoundaryCondition::Neumann),
            other => Err(Error::Parse(format!("unknown boundary condition '{other}'"))),
        }
    }
}

/// Quantum numbers of one unperturbed mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    pub n: u32,
    pub l: u32,
    pub m: i32,
    pub bc: BoundaryCondition,
}

impl ModeIndex {
    pub fn new(n: u32, l: u32, m: i32, bc: BoundaryCondition) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMode("radial index n starts at 1".into()));
        }
        if m.unsigned_abs() > l {
            return Err(Error::InvalidMode(format!("|m|={} exceeds l={l}", m.abs())));
        }
        Ok(Self { n, l, m, bc })
    }

    /// `beta_{n,l}` or `alpha_{n,l}`.
    pub fn zero(&self) -> Result<f64> {
        bessel_zero(self.l, self.n, self.bc.zero_kind())
    }

    pub fn is_degenerate(&self) -> bool {
        self.l != 0
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, l={}, m={}, {})", self.n, self.l, self.m, self.bc)
    }
}

/// Diagnostic attached to an energy result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "flag", rename_all = "snake_case")]
pub enum Flag {
    /// A second-order denominator `j_p(beta)` or `j_p'(alpha)` sits near a zero.
    NearResonance { p: u32, denom: f64, proximity: f64 },
    /// The second-order ratio exceeds the breakdown threshold.
    LargeCorrection { ratio2: f64 },
    /// The deformation expansion had not decayed at `a_max`.
    TruncationWarning,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flag::NearResonance { p, .. } => write!(f, "near-resonance(p={p})"),
            Flag::LargeCorrection { ratio2 } => write!(f, "large-correction({ratio2:.3})"),
            Flag::TruncationWarning => f.write_str("truncation"),
        }
    }
}

/// Tuning knobs for the energy formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyOptions {
    /// Flag a term when its argument lies within this many multiples of pi of a denominator zero.
    pub resonance_threshold: f64,
    /// Terms whose coefficient weight is below this are never flagged.
    pub weight_floor: f64,
    /// Flag a level whose `|E2/E0|` exceeds this.
    pub breakdown_threshold: f64,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        Self {
            resonance_threshold: 1e-2,
            weight_floor: 1e-10,
            breakdown_threshold: 0.2,
        }
    }
}

/// Corrected energy of one mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyResult {
    pub mode: ModeIndex,
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    pub total: f64,
    pub ratio1: f64,
    pub ratio2: f64,
    pub flags: Vec<Flag>,
}

impl Flag {
    /// True for flags that mark the value itself as unreliable.
    pub fn is_unreliable(&self) -> bool {
        !matches!(self, Flag::TruncationWarning)
    }
}

impl EnergyResult {
    pub fn is_flagged(&self) -> bool {
        self.flags.iter().any(Flag::is_unreliable)
    }
}
