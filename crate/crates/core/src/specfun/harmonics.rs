//! Orthonormal associated Legendre functions and complex spherical harmonics
//! (Condon-Shortley phase).
//!
//! `Pbar_l^m(theta)` denotes `Y_l^m(theta, 0)`, so `Y_l^m = Pbar_l^m e^{i m phi}`.
//! Theta derivatives use the ladder identity
//! `dPbar_l^m/dtheta = (c+ Pbar_l^{m+1} - c- Pbar_l^{m-1}) / 2`, which stays finite at the poles.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};

/// `Y_l^m(theta, phi)`.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    if m.unsigned_abs() > l {
        return Err(domain("spherical_harmonic", format!("|m|={} exceeds l={l}", m.abs())));
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(domain("spherical_harmonic", format!("theta={theta} outside [0, pi]")));
    }
    let t = LegendreTable::new(l as usize, theta);
    Ok(t.value(l as usize, m) * Complex64::from_polar(1.0, m as f64 * phi))
}

/// `Pbar_l^0` for `l = 0..=l_max` at `x = cos theta`.
pub(crate) fn zonal(l_max: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; l_max + 1];
    p[0] = 0.5 / PI.sqrt();
    if l_max >= 1 {
        p[1] = 3f64.sqrt() * x * p[0];
    }
    for l in 2..=l_max {
        let lf = l as f64;
        let a = (4.0 * lf * lf - 1.0).sqrt() / lf;
        let b = (lf - 1.0) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0).sqrt();
        p[l] = a * (x * p[l - 1] - b * p[l - 2]);
    }
    p
}

/// Table of `Pbar_l^m(theta)` for `0 <= m <= l <= l_max`.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    l_max: usize,
    values: Vec<f64>,
}

fn idx(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

fn ladder_up(l: usize, m: i64) -> f64 {
    let (l, m) = (l as f64, m as f64);
    ((l - m) * (l + m + 1.0)).max(0.0).sqrt()
}

fn ladder_down(l: usize, m: i64) -> f64 {
    let (l, m) = (l as f64, m as f64);
    ((l + m) * (l - m + 1.0)).max(0.0).sqrt()
}

impl LegendreTable {
    pub fn new(l_max: usize, theta: f64) -> Self {
        let (s, x) = theta.sin_cos();
        let s = s.abs();
        let mut values = vec![0.0; idx(l_max, l_max) + 1];
        values[0] = 0.5 / PI.sqrt();
        for m in 1..=l_max {
            let prev = values[idx(m - 1, m - 1)];
            values[idx(m, m)] = -((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s * prev;
        }
        for m in 0..l_max {
            values[idx(m + 1, m)] = ((2 * m + 3) as f64).sqrt() * x * values[idx(m, m)];
            for l in (m + 2)..=l_max {
                let (lf, mf) = (l as f64, m as f64);
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let lm1 = lf - 1.0;
                let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
                values[idx(l, m)] = a * (x * values[idx(l - 1, m)] - b * values[idx(l - 2, m)]);
            }
        }
        Self { l_max, values }
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// `Pbar_l^m` for any integer `m`; zero when `|m| > l`.
    pub fn value(&self, l: usize, m: i32) -> f64 {
        let am = m.unsigned_abs() as usize;
        if am > l {
            return 0.0;
        }
        let v = self.values[idx(l, am)];
        if m < 0 && am % 2 == 1 {
            -v
        } else {
            v
        }
    }

    /// `dPbar_l^m / dtheta`.
    pub fn d1(&self, l: usize, m: i32) -> f64 {
        let mi = m as i64;
        0.5 * (ladder_up(l, mi) * self.value(l, m + 1) - ladder_down(l, mi) * self.value(l, m - 1))
    }

    /// `d^2 Pbar_l^m / dtheta^2`.
    pub fn d2(&self, l: usize, m: i32) -> f64 {
        let mi = m as i64;
        0.5 * (ladder_up(l, mi) * self.d1(l, m + 1) - ladder_down(l, mi) * self.d1(l, m - 1))
    }
}
