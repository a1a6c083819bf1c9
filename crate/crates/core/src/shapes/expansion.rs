use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::BoundaryShape;
use crate::error::{Error, Result};
use crate::format::sig15;
use crate::specfun::harmonics::{zonal, LegendreTable};
use crate::specfun::quadrature::{rule, MAX_NODES};

pub const DEFAULT_A_MAX: usize = 30;
pub const DEFAULT_QUAD_ORDER: usize = 64;
const QUAD_TOL: f64 = 1e-10;
const TAIL_WARNING: f64 = 1e-6;

/// Radius of the reference sphere the boundary is mapped onto.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceRadius {
    /// Solid-angle mean of `r(theta)`.
    #[default]
    Mean,
    /// Mean radius of the copy rescaled to the volume of the unit sphere; the
    /// coefficients are still projected from the unscaled profile.
    EqualVolumeMean,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionOptions {
    pub a_max: usize,
    pub quad_order: usize,
    pub reference_radius: ReferenceRadius,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        Self {
            a_max: DEFAULT_A_MAX,
            quad_order: DEFAULT_QUAD_ORDER,
            reference_radius: ReferenceRadius::Mean,
        }
    }
}

/// `R0` and the coefficients `C_a^b` of `f = sum C_a^b Y_a^b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicExpansion {
    r0: f64,
    a_max: usize,
    /// Dense storage, index `a^2 + a + b - 1` for `1 <= a <= a_max`.
    coeffs: Vec<Complex64>,
    axisymmetric: bool,
    truncation_warning: bool,
}

fn slot(a: usize, b: i32) -> usize {
    ((a * a + a) as isize + b as isize - 1) as usize
}

impl HarmonicExpansion {
    /// Axisymmetric expansion; `c[a-1]` is `C_a`.
    pub fn axisymmetric(r0: f64, c: &[f64]) -> Result<Self> {
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::InvalidShape(format!("R0 must be positive, got {r0}")));
        }
        let a_max = c.len().max(1);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); slot(a_max, a_max as i32) + 1];
        for (i, &v) in c.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidShape(format!("C_{} is not finite", i + 1)));
            }
            coeffs[slot(i + 1, 0)] = Complex64::new(v, 0.0);
        }
        Ok(Self {
            r0,
            a_max,
            coeffs,
            axisymmetric: true,
            truncation_warning: false,
        })
    }

    /// General expansion from `((a, b), C_a^b)` entries; checks the reality condition.
    pub fn from_entries(r0: f64, a_max: usize, entries: &[((usize, i32), Complex64)]) -> Result<Self> {
        if !(r0 > 0.0 && r0.is_finite()) || a_max == 0 {
            return Err(Error::InvalidShape("R0 must be positive and a_max >= 1".into()));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); slot(a_max, a_max as i32) + 1];
        for &((a, b), c) in entries {
            if a == 0 {
                return Err(Error::InvalidShape("the constant C_0^0 is absorbed into R0".into()));
            }
            if a > a_max || b.unsigned_abs() as usize > a {
                return Err(Error::InvalidShape(format!("coefficient index ({a}, {b}) out of range")));
            }
            coeffs[slot(a, b)] = c;
        }
        for a in 1..=a_max {
            for b in 0..=a as i32 {
                let sign = if b % 2 == 0 { 1.0 } else { -1.0 };
                let lhs = coeffs[slot(a, -b)];
                let rhs = coeffs[slot(a, b)].conj() * sign;
                if (lhs - rhs).norm() > 1e-12 * (1.0 + rhs.norm()) {
                    return Err(Error::InvalidShape(format!(
                        "reality condition C_a^-b = (-1)^b conj(C_a^b) violated at ({a}, {b})"
                    )));
                }
            }
        }
        let axisymmetric = (1..=a_max).all(|a| {
            (-(a as i32)..=a as i32).all(|b| b == 0 || coeffs[slot(a, b)].norm() == 0.0)
                && coeffs[slot(a, 0)].im.abs() <= 1e-15
        });
        Ok(Self {
            r0,
            a_max,
            coeffs,
            axisymmetric,
            truncation_warning: false,
        })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn a_max(&self) -> usize {
        self.a_max
    }

    pub fn is_axisymmetric(&self) -> bool {
        self.axisymmetric
    }

    /// Set when the tail coefficients exceed `1e-6`.
    pub fn truncation_warning(&self) -> bool {
        self.truncation_warning
    }

    /// `C_a^b`, zero outside the stored range.
    pub fn coeff(&self, a: usize, b: i32) -> Complex64 {
        if a == 0 || a > self.a_max || b.unsigned_abs() as usize > a {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[slot(a, b)]
        }
    }

    /// Real `C_a^0`.
    pub fn axial(&self, a: usize) -> f64 {
        self.coeff(a, 0).re
    }

    /// Axial coefficients `C_1 .. C_{a_max}`.
    pub fn axial_coefficients(&self) -> Vec<f64> {
        (1..=self.a_max).map(|a| self.axial(a)).collect()
    }

    /// Non-zero coefficients as `((a, b), C_a^b)`.
    pub fn entries(&self) -> Vec<((usize, i32), Complex64)> {
        let mut out = Vec::new();
        for a in 1..=self.a_max {
            for b in -(a as i32)..=a as i32 {
                let c = self.coeffs[slot(a, b)];
                if c.norm() != 0.0 {
                    out.push(((a, b), c));
                }
            }
        }
        out
    }

    /// `a,C_a` rows, or `a,b,re,im` rows for a non-axisymmetric expansion.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.axisymmetric {
            out += "a,C_a\n";
            for a in 1..=self.a_max {
                out += &format!("{a},{}\n", sig15(self.axial(a)));
            }
        } else {
            out += "a,b,re,im\n";
            for ((a, b), c) in self.entries() {
                out += &format!("{a},{b},{},{}\n", sig15(c.re), sig15(c.im));
            }
        }
        out
    }

    /// Every coefficient multiplied by `t`.
    pub fn scaled(&self, t: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= t);
        out
    }

    /// Same coefficients with a different reference radius.
    pub fn with_r0(&self, r0: f64) -> Self {
        let mut out = self.clone();
        out.r0 = r0;
        out
    }

    /// `f(theta, phi)`.
    pub fn deformation(&self, theta: f64, phi: f64) -> f64 {
        if self.axisymmetric {
            let p = zonal(self.a_max, theta.cos());
            return (1..=self.a_max).map(|a| self.axial(a) * p[a]).sum();
        }
        let t = LegendreTable::new(self.a_max, theta);
        self.jet(&t, phi).v.re
    }

    /// `R0 (1 + f(theta, phi))`.
    pub fn reconstruct(&self, theta: f64, phi: f64) -> f64 {
        self.r0 * (1.0 + self.deformation(theta, phi))
    }

    /// `f` and its angular derivatives from a Legendre table of order `>= a_max + 2`.
    pub(crate) fn jet(&self, t: &LegendreTable, phi: f64) -> AngularJet {
        let mut j = AngularJet::default();
        for a in 1..=self.a_max {
            let bmax = if self.axisymmetric { 0 } else { a as i32 };
            for b in -bmax..=bmax {
                let c = self.coeffs[slot(a, b)];
                if c.norm() == 0.0 {
                    continue;
                }
                j.add_scaled(&AngularJet::harmonic(t, a, b, phi), c);
            }
        }
        // f is real by construction.
        for z in [&mut j.v, &mut j.t, &mut j.tt, &mut j.p, &mut j.pp] {
            *z = Complex64::new(z.re, 0.0);
        }
        j
    }
}

/// A function of `(theta, phi)` and its derivatives.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct AngularJet {
    pub v: Complex64,
    pub t: Complex64,
    pub tt: Complex64,
    pub p: Complex64,
    pub pp: Complex64,
}

impl AngularJet {
    pub fn one() -> Self {
        Self {
            v: Complex64::new(1.0, 0.0),
            ..Default::default()
        }
    }

    pub fn harmonic(t: &LegendreTable, l: usize, m: i32, phi: f64) -> Self {
        let e = Complex64::from_polar(1.0, m as f64 * phi);
        let v = e * t.value(l, m);
        let im = Complex64::new(0.0, m as f64);
        Self {
            v,
            t: e * t.d1(l, m),
            tt: e * t.d2(l, m),
            p: im * v,
            pp: im * im * v,
        }
    }

    pub fn add_scaled(&mut self, o: &Self, c: Complex64) {
        self.v += c * o.v;
        self.t += c * o.t;
        self.tt += c * o.tt;
        self.p += c * o.p;
        self.pp += c * o.pp;
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            v: self.v * o.v,
            t: self.t * o.v + self.v * o.t,
            tt: self.tt * o.v + 2.0 * self.t * o.t + self.v * o.tt,
            p: self.p * o.v + self.v * o.p,
            pp: self.pp * o.v + 2.0 * self.p * o.p + self.v * o.pp,
        }
    }
}

/// Panel edges in theta, including 0 and pi.
fn panels(shape: &BoundaryShape) -> Vec<f64> {
    let mut e = vec![0.0];
    e.extend(shape.breakpoints());
    e.push(PI);
    e
}

/// `sum_panels integral g(theta) sin(theta) dtheta` for several integrands at once.
fn panel_integrals(edges: &[f64], n: usize, width: usize, mut g: impl FnMut(f64, &mut [f64])) -> Result<Vec<f64>> {
    let r = rule(n)?;
    let mut acc = vec![0.0; width];
    let mut buf = vec![0.0; width];
    for w in edges.windows(2) {
        let (h, c) = (0.5 * (w[1] - w[0]), 0.5 * (w[1] + w[0]));
        for &(x, wt) in r.iter() {
            let t = c + h * x;
            g(t, &mut buf);
            let s = wt * h * t.sin();
            for (a, b) in acc.iter_mut().zip(&buf) {
                *a += s * b;
            }
        }
    }
    Ok(acc)
}

/// Run `eval` at doubling orders until successive results agree.
fn converge(start: usize, eval: impl Fn(usize) -> Result<Vec<f64>>) -> Result<Vec<f64>> {
    let mut n = start.clamp(2, MAX_NODES);
    let mut prev = eval(n)?;
    loop {
        let next_n = (2 * n).min(MAX_NODES);
        if next_n == n {
            return Err(Error::Quadrature {
                previous: prev[0],
                last: prev[0],
            });
        }
        let cur = eval(next_n)?;
        let scale = cur[0].abs().max(1.0);
        let worst = prev
            .iter()
            .zip(&cur)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if worst <= QUAD_TOL * scale {
            return Ok(cur);
        }
        if next_n == MAX_NODES {
            return Err(Error::Quadrature {
                previous: prev[0],
                last: cur[0],
            });
        }
        prev = cur;
        n = next_n;
    }
}

fn check_order(quad_order: usize) -> Result<()> {
    if !(16..=MAX_NODES).contains(&quad_order) {
        return Err(crate::error::domain(
            "average_radius",
            format!("quad_order {quad_order} outside 16..={MAX_NODES}"),
        ));
    }
    Ok(())
}

/// Solid-angle mean of `r(theta)`.
pub fn average_radius(shape: &BoundaryShape, quad_order: usize) -> Result<f64> {
    check_order(quad_order)?;
    shape.validate()?;
    let edges = panels(shape);
    let v = converge(quad_order, |n| {
        panel_integrals(&edges, n, 1, |t, out| out[0] = 0.5 * shape.radial_unchecked(t))
    })?;
    Ok(v[0])
}

/// Enclosed volume `(2 pi / 3) integral r^3 sin(theta) dtheta`.
pub fn enclosed_volume(shape: &BoundaryShape, quad_order: usize) -> Result<f64> {
    check_order(quad_order)?;
    shape.validate()?;
    let edges = panels(shape);
    let v = converge(quad_order, |n| {
        panel_integrals(&edges, n, 1, |t, out| out[0] = 2.0 * PI / 3.0 * shape.radial_unchecked(t).powi(3))
    })?;
    Ok(v[0])
}

/// Expansion with the mean radius as reference.
pub fn expand(shape: &BoundaryShape, a_max: usize, quad_order: usize) -> Result<HarmonicExpansion> {
    expand_with(
        shape,
        &ExpansionOptions {
            a_max,
            quad_order,
            reference_radius: ReferenceRadius::Mean,
        },
    )
}

pub fn expand_with(shape: &BoundaryShape, opts: &ExpansionOptions) -> Result<HarmonicExpansion> {
    let a_max = opts.a_max;
    if a_max == 0 || a_max > 64 {
        return Err(crate::error::domain("expand", format!("a_max {a_max} outside 1..=64")));
    }
    check_order(opts.quad_order)?;
    shape.validate()?;
    if let Some((r0, stored)) = shape.stored_coefficients() {
        let mut c = stored;
        c.resize(a_max.max(c.len()), 0.0);
        let r0 = match opts.reference_radius {
            ReferenceRadius::Fixed(r) => r,
            _ => r0,
        };
        let mut e = HarmonicExpansion::axisymmetric(r0, &c)?;
        e.truncation_warning = tail(&e) > TAIL_WARNING;
        return Ok(e);
    }
    let mean = average_radius(shape, opts.quad_order)?;
    let r_ref = match opts.reference_radius {
        ReferenceRadius::Mean => mean,
        ReferenceRadius::Fixed(r) => {
            if !(r > 0.0) {
                return Err(Error::InvalidShape(format!("reference radius must be positive, got {r}")));
            }
            r
        }
        ReferenceRadius::EqualVolumeMean => {
            let vol = enclosed_volume(shape, opts.quad_order)?;
            mean * (4.0 * PI / 3.0 / vol).cbrt()
        }
    };
    let edges = panels(shape);
    let c = converge(opts.quad_order, |n| {
        panel_integrals(&edges, n, a_max + 1, |t, out| {
            let p = zonal(a_max, t.cos());
            let g = shape.radial_unchecked(t) / r_ref - 1.0;
            out[0] = g;
            for a in 1..=a_max {
                out[a] = 2.0 * PI * g * p[a];
            }
        })
    })?;
    let mut e = HarmonicExpansion::axisymmetric(r_ref, &c[1..])?;
    if shape.is_equatorially_symmetric() {
        for a in (1..=a_max).step_by(2) {
            let s = slot(a, 0);
            if e.coeffs[s].re.abs() < 1e-13 {
                e.coeffs[s] = Complex64::new(0.0, 0.0);
            }
        }
    }
    e.truncation_warning = tail(&e) > TAIL_WARNING;
    Ok(e)
}

fn tail(e: &HarmonicExpansion) -> f64 {
    let a = e.a_max;
    let last = e.axial(a).abs();
    if a >= 2 {
        last.max(e.axial(a - 1).abs())
    } else {
        last
    }
}

/// `max_theta |R0 (1 + sum C_a Y_a^0) - r(theta)| / R0` on a 2001-point grid.
pub fn reconstruction_residual(exp: &HarmonicExpansion, shape: &BoundaryShape) -> f64 {
    (0..=2000)
        .map(|i| {
            let t = PI * i as f64 / 2000.0;
            (exp.reconstruct(t, 0.0) - shape.radial_unchecked(t)).abs() / exp.r0()
        })
        .fold(0.0, f64::max)
}
