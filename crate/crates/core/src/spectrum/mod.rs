//! Sorted energy levels with degeneracy grouping.

mod compare;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::format::{fixed3, pretty_table, ser15, sig15};
use crate::perturb::{energy, BoundaryCondition, EnergyOptions, EnergyResult, Flag, ModeIndex};
use crate::shapes::{expand_with, BoundaryShape, ExpansionOptions, HarmonicExpansion, ReferenceRadius};
use crate::specfun::bessel_zero;

use compare::write_csv;
pub use compare::{
    compare, compare_reference, ComparisonReport, ComparisonRow, ComparisonSummary, Mark, ReferenceColumn,
    ReferenceRow, ReferenceTable,
};

pub const DEFAULT_N_MAX: u32 = 6;
pub const DEFAULT_L_MAX: u32 = 8;
const GROUP_TOL: f64 = 1e-9;

/// What to compute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRequest {
    pub shape: BoundaryShape,
    pub bc: BoundaryCondition,
    pub level_count: usize,
    pub n_max: u32,
    pub l_max: u32,
    pub a_max: usize,
    pub quad_order: usize,
    pub reference_radius: ReferenceRadius,
    pub options: EnergyOptions,
}

impl SpectrumRequest {
    pub fn new(shape: BoundaryShape, bc: BoundaryCondition, level_count: usize) -> Self {
        let e = ExpansionOptions::default();
        Self {
            shape,
            bc,
            level_count,
            n_max: DEFAULT_N_MAX,
            l_max: DEFAULT_L_MAX,
            a_max: e.a_max,
            quad_order: e.quad_order,
            reference_radius: e.reference_radius,
            options: EnergyOptions::default(),
        }
    }

    /// Request for a catalog shape, with its reference-radius convention.
    pub fn for_catalog(entry: &crate::catalog::CatalogEntry, bc: BoundaryCondition, level_count: usize) -> Self {
        let mut r = Self::new(entry.shape.clone(), bc, level_count);
        r.reference_radius = entry.reference_radius;
        r
    }

    pub fn expansion_options(&self) -> ExpansionOptions {
        ExpansionOptions {
            a_max: self.a_max,
            quad_order: self.quad_order,
            reference_radius: self.reference_radius,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.level_count == 0 || self.n_max == 0 {
            return Err(domain("compute_spectrum", "level_count and n_max must be positive"));
        }
        let window = self.n_max as usize * ((self.l_max as usize + 1).pow(2));
        if self.level_count > window {
            return Err(domain(
                "compute_spectrum",
                format!("level_count {} exceeds the {window} modes in the window", self.level_count),
            ));
        }
        Ok(())
    }
}

/// One sublevel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub rank: usize,
    pub n: u32,
    pub l: u32,
    pub m: i32,
    #[serde(rename = "E0", serialize_with = "ser15")]
    pub e0: f64,
    #[serde(rename = "E1", serialize_with = "ser15")]
    pub e1: f64,
    #[serde(rename = "E2", serialize_with = "ser15")]
    pub e2: f64,
    #[serde(serialize_with = "ser15")]
    pub total: f64,
    pub group: usize,
    pub flags: Vec<Flag>,
}

impl LevelRow {
    pub fn is_flagged(&self) -> bool {
        self.flags.iter().any(Flag::is_unreliable)
    }

    fn flag_text(&self) -> String {
        self.flags.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(";")
    }
}

/// Lowest levels of one shape and boundary condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelTable {
    pub shape: String,
    pub bc: BoundaryCondition,
    #[serde(serialize_with = "ser15")]
    pub r0: f64,
    pub a_max: usize,
    pub rows: Vec<LevelRow>,
}

pub const LEVEL_COLUMNS: [&str; 10] = ["rank", "n", "l", "m", "E0", "E1", "E2", "total", "group", "flags"];

impl LevelTable {
    pub fn totals(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.total).collect()
    }

    pub fn to_csv(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.rank.to_string(),
                    r.n.to_string(),
                    r.l.to_string(),
                    r.m.to_string(),
                    sig15(r.e0),
                    sig15(r.e1),
                    sig15(r.e2),
                    sig15(r.total),
                    r.group.to_string(),
                    r.flag_text(),
                ]
            })
            .collect();
        write_csv(&LEVEL_COLUMNS, &rows)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_pretty(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.rank.to_string(),
                    r.n.to_string(),
                    r.l.to_string(),
                    r.m.to_string(),
                    fixed3(r.e0),
                    fixed3(r.e1),
                    fixed3(r.e2),
                    fixed3(r.total),
                    r.group.to_string(),
                    r.flag_text(),
                ]
            })
            .collect();
        format!(
            "# {} ({}), R0 = {}\n{}",
            self.shape,
            self.bc,
            sig15(self.r0),
            pretty_table(&LEVEL_COLUMNS, &rows)
        )
    }
}

/// Expand the shape, correct every mode of the window and keep the lowest levels.
pub fn compute_spectrum(req: &SpectrumRequest) -> Result<LevelTable> {
    req.validate()?;
    let exp = expand_with(&req.shape, &req.expansion_options())?;
    spectrum_from_expansion(req, &exp)
}

/// As [`compute_spectrum`] with a precomputed expansion; `req.shape` is used for labelling only.
pub fn spectrum_from_expansion(req: &SpectrumRequest, exp: &HarmonicExpansion) -> Result<LevelTable> {
    req.validate()?;
    if !exp.is_axisymmetric() {
        return Err(Error::Unsupported(
            "spectrum of a non-axisymmetric deformation (degenerate states need b = 0)".into(),
        ));
    }
    let mut modes = Vec::new();
    for n in 1..=req.n_max {
        for l in 0..=req.l_max {
            for m in 0..=l as i32 {
                modes.push(ModeIndex::new(n, l, m, req.bc)?);
            }
        }
    }
    let results: Vec<EnergyResult> = modes
        .par_iter()
        .map(|mode| energy(mode, exp, &req.options))
        .collect::<Result<_>>()?;

    // flagged levels are placed by their unperturbed energy when choosing the window
    let key = |r: &EnergyResult| if r.is_flagged() { r.e0 } else { r.total };
    let mut all: Vec<(f64, EnergyResult)> = Vec::new();
    for r in results {
        if r.mode.m != 0 {
            let mut neg = r.clone();
            neg.mode.m = -r.mode.m;
            all.push((key(&neg), neg));
        }
        all.push((key(&r), r));
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| order(&a.1, &b.1)));
    all.truncate(req.level_count);
    if all.len() < req.level_count {
        return Err(domain("compute_spectrum", "window holds fewer modes than requested"));
    }

    let ceiling = window_ceiling(req, exp.r0())?;
    let last = all.last().expect("non-empty").0;
    if 2.0 * last > ceiling {
        return Err(Error::WindowTooSmall {
            level_count: req.level_count,
            level_total: last,
            ceiling,
        });
    }

    let mut chosen: Vec<EnergyResult> = all.into_iter().map(|(_, r)| r).collect();
    chosen.sort_by(|a, b| a.total.total_cmp(&b.total).then_with(|| order(a, b)));
    let mut rows = Vec::with_capacity(chosen.len());
    let mut group = 0;
    let mut prev = f64::NAN;
    for (i, r) in chosen.into_iter().enumerate() {
        if !((r.total - prev).abs() <= GROUP_TOL * r.total.abs().max(1.0)) {
            group += 1;
        }
        prev = r.total;
        rows.push(LevelRow {
            rank: i + 1,
            n: r.mode.n,
            l: r.mode.l,
            m: r.mode.m,
            e0: r.e0,
            e1: r.e1,
            e2: r.e2,
            total: r.total,
            group,
            flags: r.flags,
        });
    }
    Ok(LevelTable {
        shape: req.shape.describe(),
        bc: req.bc,
        r0: exp.r0(),
        a_max: exp.a_max(),
        rows,
    })
}

fn order(a: &EnergyResult, b: &EnergyResult) -> std::cmp::Ordering {
    (a.mode.n, a.mode.l, a.mode.m).cmp(&(b.mode.n, b.mode.l, b.mode.m))
}

/// Lowest unperturbed energy just outside the `(n_max, l_max)` window.
fn window_ceiling(req: &SpectrumRequest, r0: f64) -> Result<f64> {
    let kind = req.bc.zero_kind();
    let a = bessel_zero(0, req.n_max + 1, kind)?;
    let b = bessel_zero(req.l_max + 1, 1, kind)?;
    Ok(a.min(b).powi(2) / (r0 * r0))
}

/// Multiplicities of consecutive degeneracy groups.
pub fn degeneracy_signature(table: &LevelTable) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let mut last = None;
    for r in &table.rows {
        if last == Some(r.group) {
            *out.last_mut().expect("group") += 1;
        } else {
            out.push(1);
            last = Some(r.group);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_levels() {
        let req = SpectrumRequest::new(BoundaryShape::sphere(1.0), BoundaryCondition::Dirichlet, 4);
        let t = compute_spectrum(&req).unwrap();
        assert!((t.rows[0].total - PI * PI).abs() < 1e-12);
        let b = bessel_zero(1, 1, crate::specfun::BesselZeroKind::FunctionZero).unwrap();
        for r in &t.rows[1..] {
            assert!((r.total - b * b).abs() < 1e-12);
        }
        assert_eq!(degeneracy_signature(&t), vec![1, 3]);
    }

    #[test]
    fn window_guard() {
        let mut req = SpectrumRequest::new(BoundaryShape::sphere(1.0), BoundaryCondition::Dirichlet, 4);
        req.n_max = 1;
        req.l_max = 1;
        assert!(matches!(compute_spectrum(&req), Err(Error::WindowTooSmall { .. })));
        req.level_count = 100;
        assert!(compute_spectrum(&req).is_err());
    }
}
