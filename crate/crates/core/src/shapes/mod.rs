//! Axisymmetric star-shaped boundaries `r(theta)` and their spherical-harmonic
//! deformation coefficients.

mod config;
mod expansion;

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::harmonics::zonal;

pub use config::{parse_config, parse_shape, shape_from_config, ShapeParams};
pub(crate) use expansion::AngularJet;
pub use expansion::{
    average_radius, enclosed_volume, expand, expand_with, reconstruction_residual, ExpansionOptions,
    HarmonicExpansion, ReferenceRadius, DEFAULT_A_MAX, DEFAULT_QUAD_ORDER,
};

/// A user-supplied boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CustomRadial {
    /// Piecewise-linear `r(theta)` through the samples; `theta` must run from 0 to pi.
    Samples { theta: Vec<f64>, radius: Vec<f64> },
    /// `r0 (1 + sum_a coeffs[a-1] Y_a^0)`.
    Coefficients { r0: f64, coeffs: Vec<f64> },
}

/// Parametric cavity boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundaryShape {
    /// `|cos theta|^n + |sin theta|^n = r^-n`.
    Superegg { exponent: f64 },
    /// Equatorial radius `r_a`, polar radius `r_c`.
    Spheroid { r_a: f64, r_c: f64 },
    /// Half-stadium of radius `r` and straight section `d`, revolved about the polar axis.
    StadiumOfRevolution { r: f64, d: f64 },
    /// Rounded rectangle with corner radius `r`, corner centres at `(+-d, +-d)`.
    RoundedCylinder { r: f64, d: f64 },
    /// `r0 (1 + c2 Y_2^0 + c3 Y_3^0 + c4 Y_4^0)`.
    Pear { c2: f64, c3: f64, c4: f64, r0: f64 },
    CustomRadial(CustomRadial),
}

impl BoundaryShape {
    pub fn sphere(radius: f64) -> Self {
        BoundaryShape::Spheroid {
            r_a: radius,
            r_c: radius,
        }
    }

    /// Check parameters and star-shapedness.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidShape(msg));
        let positive = |name: &str, v: f64| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidShape(format!("{name} must be positive, got {v}")))
            }
        };
        match self {
            BoundaryShape::Superegg { exponent } => positive("exponent", *exponent)?,
            BoundaryShape::Spheroid { r_a, r_c } => {
                positive("r_a", *r_a)?;
                positive("r_c", *r_c)?;
            }
            BoundaryShape::StadiumOfRevolution { r, d } => {
                positive("R", *r)?;
                if !(*d >= 0.0 && d.is_finite()) {
                    return bad(format!("d must be >= 0, got {d}"));
                }
            }
            BoundaryShape::RoundedCylinder { r, d } => {
                positive("R", *r)?;
                if !(*d >= 0.0 && d.is_finite()) {
                    return bad(format!("d must be >= 0, got {d}"));
                }
                let (a1, a2) = rounded_angles(*r, *d);
                for t in [a1, a2] {
                    let rad = r * r - d * d + d * d * (2.0 * t).sin();
                    if rad < 0.0 {
                        return bad(format!(
                            "corner radicand negative ({rad:.3e}) at branch angle {t:.6}: d={d} too large for R={r}"
                        ));
                    }
                }
            }
            BoundaryShape::Pear { c2, c3, c4, r0 } => {
                positive("R0", *r0)?;
                for (n, c) in [("C2", c2), ("C3", c3), ("C4", c4)] {
                    if !c.is_finite() {
                        return bad(format!("{n} must be finite"));
                    }
                }
            }
            BoundaryShape::CustomRadial(CustomRadial::Samples { theta, radius }) => {
                if theta.len() < 2 || theta.len() != radius.len() {
                    return bad("samples need at least two (theta, r) pairs of equal length".into());
                }
                if theta[0].abs() > 1e-12 || (theta[theta.len() - 1] - PI).abs() > 1e-12 {
                    return bad("sample angles must start at 0 and end at pi".into());
                }
                if theta.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("sample angles must be strictly increasing".into());
                }
            }
            BoundaryShape::CustomRadial(CustomRadial::Coefficients { r0, coeffs }) => {
                positive("R0", *r0)?;
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return bad("coefficients must be finite".into());
                }
            }
        }
        // Star-shapedness on a fine grid.
        for i in 0..=2000 {
            let t = PI * i as f64 / 2000.0;
            let r = self.radial_unchecked(t);
            if !(r > 0.0) || !r.is_finite() {
                return bad(format!("r(theta) = {r} at theta = {t:.6}; boundary must be star-shaped"));
            }
        }
        Ok(())
    }

    /// `r(theta)`.
    pub fn radial(&self, theta: f64) -> Result<f64> {
        if !(0.0..=PI).contains(&theta) {
            return Err(crate::error::domain("radial", format!("theta={theta} outside [0, pi]")));
        }
        self.validate_cheap()?;
        Ok(self.radial_unchecked(theta))
    }

    fn validate_cheap(&self) -> Result<()> {
        match self {
            BoundaryShape::RoundedCylinder { .. } | BoundaryShape::CustomRadial(CustomRadial::Samples { .. }) => {
                self.validate()
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn radial_unchecked(&self, theta: f64) -> f64 {
        match self {
            BoundaryShape::Superegg { exponent: n } => {
                let (s, c) = theta.sin_cos();
                (c.abs().powf(*n) + s.abs().powf(*n)).powf(-1.0 / n)
            }
            BoundaryShape::Spheroid { r_a, r_c } => {
                let c = theta.cos();
                let e = 1.0 - (r_a / r_c).powi(2);
                r_a / (1.0 - e * c * c).sqrt()
            }
            BoundaryShape::StadiumOfRevolution { r, d } => {
                let t = theta - FRAC_PI_2;
                let b = (d / (2.0 * r)).atan();
                let (s, c) = t.sin_cos();
                let arc = (r * r - (0.5 * d * c).powi(2)).sqrt();
                if t < -b {
                    -0.5 * d * s + arc
                } else if t <= b {
                    r / c
                } else {
                    0.5 * d * s + arc
                }
            }
            BoundaryShape::RoundedCylinder { r, d } => {
                let t = theta - FRAC_PI_2;
                let (a1, a2) = rounded_angles(*r, *d);
                let (s, c) = t.sin_cos();
                let w = d + r;
                if t <= -a1 {
                    -w / s
                } else if t <= -a2 {
                    -d * (s - c) + (r * r - d * d - d * d * (2.0 * t).sin()).sqrt()
                } else if t <= a2 {
                    w / c
                } else if t <= a1 {
                    d * (s + c) + (r * r - d * d + d * d * (2.0 * t).sin()).sqrt()
                } else {
                    w / s
                }
            }
            BoundaryShape::Pear { c2, c3, c4, r0 } => {
                let p = zonal(4, theta.cos());
                r0 * (1.0 + c2 * p[2] + c3 * p[3] + c4 * p[4])
            }
            BoundaryShape::CustomRadial(CustomRadial::Coefficients { r0, coeffs }) => {
                let p = zonal(coeffs.len(), theta.cos());
                r0 * (1.0 + coeffs.iter().enumerate().map(|(i, c)| c * p[i + 1]).sum::<f64>())
            }
            BoundaryShape::CustomRadial(CustomRadial::Samples { theta: ts, radius }) => {
                let k = ts.partition_point(|&t| t <= theta).clamp(1, ts.len() - 1);
                let (t0, t1) = (ts[k - 1], ts[k]);
                let u = (theta - t0) / (t1 - t0);
                radius[k - 1] + u * (radius[k] - radius[k - 1])
            }
        }
    }

    /// Angles in `(0, pi)` where `r(theta)` is not analytic.
    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        let mut b = match self {
            BoundaryShape::Superegg { .. } => vec![FRAC_PI_2],
            BoundaryShape::StadiumOfRevolution { r, d } => {
                let a = (d / (2.0 * r)).atan();
                vec![FRAC_PI_2 - a, FRAC_PI_2 + a]
            }
            BoundaryShape::RoundedCylinder { r, d } => {
                let (a1, a2) = rounded_angles(*r, *d);
                vec![FRAC_PI_2 - a1, FRAC_PI_2 - a2, FRAC_PI_2 + a2, FRAC_PI_2 + a1]
            }
            BoundaryShape::CustomRadial(CustomRadial::Samples { theta, .. }) => {
                theta[1..theta.len() - 1].to_vec()
            }
            _ => Vec::new(),
        };
        b.retain(|&t| t > 1e-14 && t < PI - 1e-14);
        b.sort_by(|a, c| a.partial_cmp(c).unwrap());
        b.dedup_by(|a, c| (*a - *c).abs() < 1e-14);
        b
    }

    /// Shapes defined directly by a finite harmonic sum.
    pub(crate) fn stored_coefficients(&self) -> Option<(f64, Vec<f64>)> {
        match self {
            BoundaryShape::Pear { c2, c3, c4, r0 } => Some((*r0, vec![0.0, *c2, *c3, *c4])),
            BoundaryShape::CustomRadial(CustomRadial::Coefficients { r0, coeffs }) => Some((*r0, coeffs.clone())),
            _ => None,
        }
    }

    /// Mirror-symmetric about the equator.
    pub fn is_equatorially_symmetric(&self) -> bool {
        matches!(
            self,
            BoundaryShape::Superegg { .. }
                | BoundaryShape::Spheroid { .. }
                | BoundaryShape::StadiumOfRevolution { .. }
                | BoundaryShape::RoundedCylinder { .. }
        )
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match self {
            BoundaryShape::Superegg { exponent } => format!("superegg n={exponent}"),
            BoundaryShape::Spheroid { r_a, r_c } if r_a == r_c => format!("sphere R={r_a}"),
            BoundaryShape::Spheroid { r_a, r_c } => format!("spheroid r_a={r_a} r_c={r_c}"),
            BoundaryShape::StadiumOfRevolution { r, d } => format!("stadium R={r} d={d}"),
            BoundaryShape::RoundedCylinder { r, d } => format!("rounded cylinder R={r} d={d}"),
            BoundaryShape::Pear { c2, c3, c4, r0 } => format!("pear C=({c2}, {c3}, {c4}) R0={r0}"),
            BoundaryShape::CustomRadial(CustomRadial::Samples { theta, .. }) => {
                format!("custom ({} samples)", theta.len())
            }
            BoundaryShape::CustomRadial(CustomRadial::Coefficients { coeffs, .. }) => {
                format!("custom ({} coefficients)", coeffs.len())
            }
        }
    }
}

/// Branch angles `(atan((d+R)/d), atan(d/(d+R)))` of the rounded rectangle.
fn rounded_angles(r: f64, d: f64) -> (f64, f64) {
    (((d + r) / d).atan(), (d / (d + r)).atan())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        let egg = BoundaryShape::Superegg { exponent: 2.0 };
        for i in 0..20 {
            assert!((egg.radial(i as f64 * 0.15).unwrap() - 1.0).abs() < 1e-15);
        }
        let prolate = BoundaryShape::Spheroid { r_a: 1.0, r_c: 1.2 };
        assert!((prolate.radial(0.0).unwrap() - 1.2).abs() < 1e-15);
        assert!((prolate.radial(FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        let stadium = BoundaryShape::StadiumOfRevolution { r: 1.0, d: 0.25 };
        assert!((stadium.radial(FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn branches_are_continuous() {
        let s3 = 3f64.sqrt();
        let shapes = [
            BoundaryShape::StadiumOfRevolution { r: 1.0, d: 0.25 },
            BoundaryShape::StadiumOfRevolution { r: 0.7, d: 1.5 },
            BoundaryShape::RoundedCylinder { r: 0.2 * s3, d: 0.3 * s3 },
            BoundaryShape::RoundedCylinder { r: 1.0, d: 0.4 },
        ];
        for s in &shapes {
            for b in s.breakpoints() {
                let h = 1e-13;
                let l = s.radial(b - h).unwrap();
                let r = s.radial(b + h).unwrap();
                assert!((l - r).abs() < 1e-12, "{}: {l} vs {r} at {b}", s.describe());
            }
        }
    }

    #[test]
    fn stadium_poles_and_rounded_cylinder_walls() {
        let st = BoundaryShape::StadiumOfRevolution { r: 1.0, d: 0.25 };
        assert!((st.radial(0.0).unwrap() - 1.125).abs() < 1e-14);
        let rc = BoundaryShape::RoundedCylinder { r: 0.5, d: 1.0 };
        assert!((rc.radial(0.0).unwrap() - 1.5).abs() < 1e-14);
        assert!((rc.radial(FRAC_PI_2).unwrap() - 1.5).abs() < 1e-14);
        // Corner point along the diagonal: d*sqrt(2) + R.
        assert!((rc.radial(PI / 4.0).unwrap() - (2f64.sqrt() + 0.5)).abs() < 1e-14);
    }

    #[test]
    fn validation() {
        assert!(BoundaryShape::Superegg { exponent: -1.0 }.validate().is_err());
        assert!(BoundaryShape::Spheroid { r_a: 0.0, r_c: 1.0 }.validate().is_err());
        assert!(BoundaryShape::Pear { c2: 5.0, c3: 0.0, c4: 0.0, r0: 1.0 }.validate().is_err());
        assert!(BoundaryShape::Pear { c2: 0.119, c3: 0.095, c4: 0.002, r0: 1.0 }.validate().is_ok());
        let bad = BoundaryShape::CustomRadial(CustomRadial::Samples {
            theta: vec![0.0, 1.0],
            radius: vec![1.0, 1.0],
        });
        assert!(bad.validate().is_err());
    }

    #[test]
    fn samples_interpolate() {
        let s = BoundaryShape::CustomRadial(CustomRadial::Samples {
            theta: vec![0.0, FRAC_PI_2, PI],
            radius: vec![1.0, 2.0, 1.0],
        });
        assert!((s.radial(PI / 4.0).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(s.radial(PI).unwrap(), 1.0);
    }
}
