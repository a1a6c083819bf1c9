//! Named benchmark shapes and their shipped reference spectra.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perturb::BoundaryCondition;
use crate::shapes::{BoundaryShape, ExpansionOptions, ReferenceRadius};
use crate::spectrum::ReferenceTable;

/// A catalog shape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub shape: BoundaryShape,
    pub reference_radius: ReferenceRadius,
}

impl CatalogEntry {
    pub fn expansion_options(&self, a_max: usize, quad_order: usize) -> ExpansionOptions {
        ExpansionOptions {
            a_max,
            quad_order,
            reference_radius: self.reference_radius,
        }
    }

    /// Shipped reference spectrum for this shape.
    pub fn reference(&self, bc: BoundaryCondition) -> Result<ReferenceTable> {
        reference(self.name, bc)
    }
}

pub const NAMES: [&str; 8] = [
    "superegg-1.7",
    "superegg-2.5",
    "stadium",
    "oblate",
    "prolate",
    "rounded-cylinder",
    "pear-a",
    "pear-b",
];

pub fn lookup(name: &str) -> Result<CatalogEntry> {
    let s3 = 3f64.sqrt();
    let (description, shape, reference_radius) = match name {
        "superegg-1.7" => ("superegg, n = 1.7", BoundaryShape::Superegg { exponent: 1.7 }, ReferenceRadius::Mean),
        "superegg-2.5" => ("superegg, n = 2.5", BoundaryShape::Superegg { exponent: 2.5 }, ReferenceRadius::Mean),
        "stadium" => (
            "stadium of revolution, R = 1, d = 1/4",
            BoundaryShape::StadiumOfRevolution { r: 1.0, d: 0.25 },
            ReferenceRadius::Mean,
        ),
        "oblate" => (
            "oblate spheroid, r_c/r_a = 0.8",
            BoundaryShape::Spheroid { r_a: 1.0, r_c: 0.8 },
            ReferenceRadius::EqualVolumeMean,
        ),
        "prolate" => (
            "prolate spheroid, r_c/r_a = 1.2",
            BoundaryShape::Spheroid { r_a: 1.0, r_c: 1.2 },
            ReferenceRadius::EqualVolumeMean,
        ),
        "rounded-cylinder" => (
            "rounded cylinder, R = 2 sqrt(3)/10, d = 3 sqrt(3)/10",
            BoundaryShape::RoundedCylinder {
                r: 0.2 * s3,
                d: 0.3 * s3,
            },
            ReferenceRadius::Mean,
        ),
        "pear-a" => (
            "pear, C = (0.119, 0.095, 0.002)",
            BoundaryShape::Pear {
                c2: 0.119,
                c3: 0.095,
                c4: 0.002,
                r0: 1.0,
            },
            ReferenceRadius::Mean,
        ),
        "pear-b" => (
            "pear, C = (0.154, 0.097, 0.080)",
            BoundaryShape::Pear {
                c2: 0.154,
                c3: 0.097,
                c4: 0.080,
                r0: 1.0,
            },
            ReferenceRadius::Mean,
        ),
        other => {
            return Err(Error::InvalidShape(format!(
                "unknown catalog shape '{other}' (known: {})",
                NAMES.join(", ")
            )))
        }
    };
    Ok(CatalogEntry {
        name: NAMES.iter().find(|n| **n == name).copied().unwrap_or("custom"),
        description,
        shape,
        reference_radius,
    })
}

pub fn entries() -> Vec<CatalogEntry> {
    NAMES.iter().map(|n| lookup(n).expect("catalog name")).collect()
}

macro_rules! table {
    ($name:literal, $bc:literal) => {
        include_str!(concat!("../data/reference/", $name, "-", $bc, ".csv"))
    };
}

/// Raw CSV text of a shipped reference table.
pub fn reference_csv(name: &str, bc: BoundaryCondition) -> Result<&'static str> {
    use BoundaryCondition::{Dirichlet as D, Neumann as N};
    Ok(match (name, bc) {
        ("superegg-1.7", D) => table!("superegg-1.7", "dirichlet"),
        ("superegg-1.7", N) => table!("superegg-1.7", "neumann"),
        ("superegg-2.5", D) => table!("superegg-2.5", "dirichlet"),
        ("superegg-2.5", N) => table!("superegg-2.5", "neumann"),
        ("stadium", D) => table!("stadium", "dirichlet"),
        ("stadium", N) => table!("stadium", "neumann"),
        ("oblate", D) => table!("oblate", "dirichlet"),
        ("oblate", N) => table!("oblate", "neumann"),
        ("prolate", D) => table!("prolate", "dirichlet"),
        ("prolate", N) => table!("prolate", "neumann"),
        ("rounded-cylinder", D) => table!("rounded-cylinder", "dirichlet"),
        ("rounded-cylinder", N) => table!("rounded-cylinder", "neumann"),
        ("pear-a", D) => table!("pear-a", "dirichlet"),
        ("pear-a", N) => table!("pear-a", "neumann"),
        ("pear-b", D) => table!("pear-b", "dirichlet"),
        ("pear-b", N) => table!("pear-b", "neumann"),
        (other, _) => return Err(Error::InvalidShape(format!("no reference table for '{other}'"))),
    })
}

pub fn reference(name: &str, bc: BoundaryCondition) -> Result<ReferenceTable> {
    ReferenceTable::parse_csv(reference_csv(name, bc)?)
}
