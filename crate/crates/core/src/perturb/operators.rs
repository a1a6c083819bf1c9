//! The operator hierarchy `H_m` of the mapped Helmholtz equation and the
//! self-checks built on it: order-equation residuals, boundary residuals and
//! the inner-product route to the energy corrections.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::wavefunction::{first_order_wavefunction, Jet3, Point};
use super::{BoundaryCondition, EnergyOptions, ModeIndex, WavefunctionExpansion};
use crate::error::{domain, Error, Result};
use crate::shapes::{AngularJet, HarmonicExpansion};

/// Largest absolute residual of each order equation over the sample points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Entry `i` is the residual of the order-`i` equation.
    pub max_residual: Vec<f64>,
}

/// Energy ratios obtained from the inner products next to the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerProductCheck {
    pub order: u8,
    pub inner_product: f64,
    pub closed_form: f64,
}

impl InnerProductCheck {
    /// `|inner - closed| / max(|closed|, tiny)`.
    pub fn relative_delta(&self) -> f64 {
        (self.inner_product - self.closed_form).abs() / self.closed_form.abs().max(1e-300)
    }
}

fn l2(t: Complex64, tt: Complex64, pp: Complex64, theta: f64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    tt + t * (c / s) + pp / (s * s)
}

fn d2(psi: &Jet3, r: f64) -> Complex64 {
    psi.rr + psi.r * (2.0 / r)
}

fn h0(psi: &Jet3, r: f64, theta: f64) -> Complex64 {
    d2(psi, r) + l2(psi.t, psi.tt, psi.pp, theta) / (r * r)
}

fn omega(f: &AngularJet, psi: &Jet3, theta: f64) -> Complex64 {
    let s = theta.sin();
    l2(f.t, f.tt, f.pp, theta) * psi.r + f.t * psi.rt * 2.0 + f.p * psi.rp * (2.0 / (s * s))
}

fn grad_sq(f: &AngularJet, theta: f64) -> Complex64 {
    let s = theta.sin();
    f.t * f.t + f.p * f.p / (s * s)
}

/// `H_m psi`.
fn h_m(m: usize, f: &AngularJet, psi: &Jet3, r: f64, theta: f64) -> Complex64 {
    if m == 0 {
        return h0(psi, r, theta);
    }
    let mf = m as f64;
    let fv = f.v;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let mut bracket = fv.powu(m as u32) * h0(psi, r, theta) * 6.0 + fv.powu(m as u32 - 1) * omega(f, psi, theta) * (3.0 * mf / r);
    if m >= 2 {
        bracket += fv.powu(m as u32 - 2) * grad_sq(f, theta) * d2(psi, r) * (mf * (mf - 1.0));
    }
    bracket * (sign * (mf + 1.0) / 6.0)
}

fn energies(w: &WavefunctionExpansion) -> [f64; 3] {
    let e0 = w.e0();
    [e0, e0 * w.ratio1, e0 * w.ratio2]
}

/// `sum_{n=0}^{i} (H_n + E^(n)) psi^(i-n)` at a point.
fn order_residual(pt: &Point, jets: &[Jet3], i: usize, e: &[f64]) -> Complex64 {
    (0..=i)
        .map(|n| h_m(n, &pt.f, &jets[i - n], pt.r, pt.theta) + jets[i - n].v * e[n])
        .sum()
}

/// Apply `H_0, H_1, H_2` to the computed corrections and return the residuals of the
/// order equations at interior points `(r, theta, phi)`.
pub fn residual_order_check(w: &WavefunctionExpansion, points: &[(f64, f64, f64)]) -> Result<ResidualReport> {
    let orders = w.order as usize + 1;
    let e = energies(w);
    let mut max_residual = vec![0.0_f64; orders];
    for &(r, theta, phi) in points {
        if !(r > 0.0 && r < w.r0 && theta > 0.0 && theta < PI) {
            return Err(domain("residual_order_check", format!("point ({r}, {theta}, {phi}) is not interior")));
        }
        let pt = w.point(r, theta, phi);
        let jets: Vec<Jet3> = (0..orders).map(|i| w.jet(i, &pt)).collect();
        for (i, slot) in max_residual.iter_mut().enumerate() {
            *slot = slot.max(order_residual(&pt, &jets, i, &e).norm());
        }
    }
    Ok(ResidualReport { max_residual })
}

/// Left-hand side of the order-`i` boundary condition on `r = R0`.
fn boundary_lhs(w: &WavefunctionExpansion, pt: &Point, jets: &[Jet3], i: usize) -> Complex64 {
    match w.mode.bc {
        BoundaryCondition::Dirichlet => jets[i].v,
        BoundaryCondition::Neumann => jets[i].r + neumann_source(w, pt, jets, i),
    }
}

/// Everything in the order-`i` Neumann condition except `d_r psi^(i)`.
fn neumann_source(w: &WavefunctionExpansion, pt: &Point, jets: &[Jet3], i: usize) -> Complex64 {
    if i == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let f = &pt.f;
    let s = pt.theta.sin();
    let prev = &jets[i - 1];
    let mut out = f.v * prev.r - (f.t * prev.t + f.p * prev.p / (s * s)) / w.r0;
    let big_f = grad_sq(f, pt.theta);
    let mut fpow = Complex64::new(1.0, 0.0);
    for n in 0..i.saturating_sub(1) {
        out += big_f * fpow * jets[i - 2 - n].r;
        fpow *= -f.v;
    }
    out
}

fn check_boundary_order(w: &WavefunctionExpansion, order: u8) -> Result<()> {
    if order > w.order {
        return Err(Error::Unsupported(format!("order {order} not computed")));
    }
    if w.is_partial(order) {
        return Err(Error::Unsupported(
            "the degenerate second-order boundary condition needs the omitted B coefficients".into(),
        ));
    }
    Ok(())
}

/// Order-`order` boundary residual at one point of `r = R0`.
pub fn boundary_residual_at(w: &WavefunctionExpansion, order: u8, theta: f64, phi: f64) -> Result<f64> {
    check_boundary_order(w, order)?;
    let i = order as usize;
    let pt = w.point(w.r0, theta, phi);
    let jets: Vec<Jet3> = (0..=i).map(|k| w.jet(k, &pt)).collect();
    Ok(boundary_lhs(w, &pt, &jets, i).norm())
}

/// Maximum of the order-`order` boundary residual on an `n_theta`-point grid of `r = R0`
/// (and a `phi` grid for non-axisymmetric deformations).
pub fn boundary_residual(w: &WavefunctionExpansion, order: u8, n_theta: usize) -> Result<f64> {
    check_boundary_order(w, order)?;
    let nphi = if w.expansion.is_axisymmetric() { 1 } else { w.phi_points() };
    let mut worst = 0.0_f64;
    for it in 0..n_theta {
        let theta = PI * (it as f64 + 0.5) / n_theta as f64;
        for ip in 0..nphi {
            let phi = 2.0 * PI * ip as f64 / nphi as f64 + 0.3;
            worst = worst.max(boundary_residual_at(w, order, theta, phi)?);
        }
    }
    Ok(worst)
}

/// `oint (BC_order) conj(psi^(0)) dOmega` on `r = R0`: the component of the boundary
/// residual along the unperturbed mode, which the omitted `B_l^m` cannot change.
pub fn boundary_projection(w: &WavefunctionExpansion, order: u8) -> Result<f64> {
    let i = order as usize;
    let [re, im, scale] = w.sphere_integral(|w, pt| {
        let jets: Vec<Jet3> = (0..=i).map(|k| w.jet(k, pt)).collect();
        let base = angular_base(w, pt);
        let v = boundary_lhs(w, pt, &jets, i) * base.conj();
        [v.re, v.im, base.norm_sqr()]
    })?;
    Ok(Complex64::new(re, im).norm() / scale.sqrt())
}

fn angular_base(w: &WavefunctionExpansion, pt: &Point) -> Complex64 {
    if w.mode.l == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        AngularJet::harmonic(&pt.table, w.mode.l as usize, w.mode.m, pt.phi).v
    }
}

/// `E^(order)/E^(0)` from the inner products
/// `E^(i) = -sum_{n=1}^{i-1} <psi0|(H_n + E^(n)) psi^(i-n)> - <psi0|H_i psi0> - S_i`,
/// where `S_i = R0^2 oint psi0* d_r psi^(i)` is the wall term (non-zero only for Neumann).
pub fn verify_inner_product(
    mode: &ModeIndex,
    exp: &HarmonicExpansion,
    order: u8,
    opts: &EnergyOptions,
) -> Result<InnerProductCheck> {
    if !(1..=2).contains(&order) {
        return Err(domain("verify_inner_product", format!("order must be 1 or 2, got {order}")));
    }
    let w = first_order_wavefunction(mode, exp, opts)?;
    let e1 = inner_product_ratio(&w, 1, 0.0)?;
    let (inner_product, closed_form) = if order == 1 {
        (e1, w.ratio1)
    } else {
        (inner_product_ratio(&w, 2, e1)?, w.ratio2)
    };
    Ok(InnerProductCheck {
        order,
        inner_product,
        closed_form,
    })
}

fn inner_product_ratio(w: &WavefunctionExpansion, i: usize, e1_ratio: f64) -> Result<f64> {
    let e0 = w.e0();
    let e = [e0, e0 * e1_ratio];
    let [re, _im, n0] = w.ball_integral(|w, pt| {
        let jets: Vec<Jet3> = (0..i).map(|k| w.jet(k, pt)).collect();
        let psi0 = jets[0].v.conj();
        let mut acc = h_m(i, &pt.f, &jets[0], pt.r, pt.theta);
        for n in 1..i {
            acc += h_m(n, &pt.f, &jets[i - n], pt.r, pt.theta) + jets[i - n].v * e[n];
        }
        let v = psi0 * acc;
        [v.re, v.im, jets[0].v.norm_sqr()]
    })?;
    let mut total = re;
    if w.mode.bc == BoundaryCondition::Neumann {
        let [s, _] = w.sphere_integral(|w, pt| {
            let jets: Vec<Jet3> = (0..i).map(|k| w.jet(k, pt)).collect();
            let mut all = jets.clone();
            all.push(Jet3::default());
            let dr = -neumann_source(w, pt, &all, i);
            [(jets[0].v.conj() * dr).re, jets[0].v.norm_sqr() * w.r0]
        })?;
        total += w.r0 * w.r0 * s;
    }
    Ok(-total / (n0 * e0))
}
