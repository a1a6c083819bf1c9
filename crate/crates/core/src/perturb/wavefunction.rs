//! Closed-form eigenfunction corrections.
//!
//! Every order is stored as a sum of terms `c rho^s j_q(rho) f^e Y`, where `Y`
//! is either a spherical harmonic or the constant 1 and `rho = k r` in the
//! mapped coordinates.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::energy::{bessel_table, check_resonance, energy};
use super::{BoundaryCondition, EnergyOptions, Flag, ModeIndex};
use crate::error::{domain, Error, Result};
use crate::shapes::{AngularJet, HarmonicExpansion};
use crate::specfun::bessel::{fill_j, prime_from};
use crate::specfun::clebsch::cg;
use crate::specfun::quadrature::rule;
use crate::specfun::LegendreTable;

/// One expansion coefficient `X_p^q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coefficient {
    pub p: usize,
    pub q: i32,
    pub value: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Angular {
    One,
    Y(usize, i32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Term {
    pub c: Complex64,
    pub s: i32,
    pub q: usize,
    pub ang: Angular,
    pub fpow: u8,
}

/// `psi^(0) + psi^(1) + psi^(2)` for one mode.
#[derive(Debug, Clone, Serialize)]
pub struct WavefunctionExpansion {
    pub mode: ModeIndex,
    pub r0: f64,
    /// `beta_{n,l}` or `alpha_{n,l}`.
    pub zero: f64,
    /// `N_{n,l}`: unit norm of `psi^(0)` over the ball `r <= R0`.
    pub norm: f64,
    pub a_coeffs: Vec<Coefficient>,
    pub a_l_m: f64,
    pub b_coeffs: Vec<Coefficient>,
    pub b0: f64,
    pub ratio1: f64,
    pub ratio2: f64,
    /// Highest order filled in.
    pub order: u8,
    pub flags: Vec<Flag>,
    pub expansion: HarmonicExpansion,
    #[serde(skip)]
    terms: [Vec<Term>; 3],
    #[serde(skip)]
    harm_max: usize,
    #[serde(skip)]
    bessel_max: usize,
}

/// `psi^(0) + psi^(1)`.
pub fn first_order_wavefunction(
    mode: &ModeIndex,
    exp: &HarmonicExpansion,
    opts: &EnergyOptions,
) -> Result<WavefunctionExpansion> {
    build(mode, exp, opts, 1)
}

/// `psi^(0) + psi^(1) + psi^(2)`, normalised.
///
/// For `l != 0` the homogeneous `B_p^q` part of `psi^(2)` is not available and
/// the result is partial (see [`WavefunctionExpansion::is_partial`]).
pub fn second_order_wavefunction(
    mode: &ModeIndex,
    exp: &HarmonicExpansion,
    opts: &EnergyOptions,
) -> Result<WavefunctionExpansion> {
    build(mode, exp, opts, 2)?.normalize()
}

fn build(mode: &ModeIndex, exp: &HarmonicExpansion, opts: &EnergyOptions, order: u8) -> Result<WavefunctionExpansion> {
    let e = energy(mode, exp, opts)?;
    let x = mode.zero()?;
    let r0 = exp.r0();
    let l = mode.l as usize;
    let a_max = exp.a_max();
    let j = bessel_table(x, 2 * a_max + l + 2);
    let norm = normalization(l, x, r0);
    let mut flags = e.flags.clone();
    let mut a_coeffs = Vec::new();
    let mut a_l_m = 0.0;
    let neumann = mode.bc == BoundaryCondition::Neumann;

    if l == 0 {
        for ((p, q), c) in exp.entries() {
            let (jp, dp) = (j[p], prime_from(&j, p, x));
            let (v, denom) = if neumann {
                (x * norm * j[0] / dp, dp)
            } else {
                (x * norm * j[1] / jp, jp)
            };
            a_coeffs.push(Coefficient { p, q, value: c * v });
            check_resonance(&mut flags, mode.bc, p, x, denom, c.norm_sqr(), opts)?;
        }
    } else {
        let (li, m) = (l as i32, mode.m);
        let big_l = (l * (l + 1)) as f64;
        let d = x * x - big_l;
        for p in mode.m.unsigned_abs() as usize..=a_max + l {
            let pi = p as i32;
            if p == l {
                if neumann {
                    let s: f64 = (1..=(2 * li).min(a_max as i32))
                        .map(|k| {
                            ((2 * k + 1) as f64 / PI).sqrt()
                                * (k * (k + 1)) as f64
                                * exp.axial(k as usize)
                                * cg(k, li, 0, 0, li, 0)
                                * cg(k, li, 0, m, li, m)
                        })
                        .sum();
                    a_l_m = -norm / 8.0 * (x * x - 3.0 * big_l) / (d * d) * s;
                    if a_l_m != 0.0 {
                        a_coeffs.push(Coefficient { p, q: m, value: a_l_m.into() });
                    }
                }
                continue;
            }
            let pp = (p * (p + 1)) as f64;
            let mut sum = 0.0;
            let mut weight = 0.0;
            for k in (li - pi).abs().max(1)..=(li + pi).min(a_max as i32) {
                let g = (((2 * k + 1) * (2 * li + 1)) as f64 / (4.0 * PI * (2 * p + 1) as f64)).sqrt()
                    * exp.axial(k as usize)
                    * cg(k, li, 0, 0, pi, 0)
                    * cg(k, li, 0, m, pi, m);
                weight += g.abs();
                sum += if neumann {
                    g * (x * x + ((k * (k + 1)) as f64 - big_l - pp) / 2.0)
                } else {
                    g
                };
            }
            if sum == 0.0 {
                continue;
            }
            let (jp, dp) = (j[p], prime_from(&j, p, x));
            let (v, denom) = if neumann {
                (norm * j[l] / (x * dp) * sum, dp)
            } else {
                (norm * x * j[l + 1] / jp * sum, jp)
            };
            a_coeffs.push(Coefficient { p, q: m, value: v.into() });
            check_resonance(&mut flags, mode.bc, p, x, denom, weight, opts)?;
        }
    }

    let mut b_coeffs = Vec::new();
    if order >= 2 && l == 0 {
        b_coeffs = b_coefficients(mode.bc, exp, x, norm, &j);
        for b in &b_coeffs {
            let (jp, dp) = (j[b.p], prime_from(&j, b.p, x));
            let denom = if neumann { dp } else { jp };
            check_resonance(&mut flags, mode.bc, b.p, x, denom, b.value.norm_sqr(), opts)?;
        }
    }
    dedup_flags(&mut flags);

    let mut w = WavefunctionExpansion {
        mode: *mode,
        r0,
        zero: x,
        norm,
        a_coeffs,
        a_l_m,
        b_coeffs,
        b0: 0.0,
        ratio1: e.ratio1,
        ratio2: e.ratio2,
        order,
        flags,
        expansion: exp.clone(),
        terms: Default::default(),
        harm_max: 0,
        bessel_max: 0,
    };
    w.assemble();
    Ok(w)
}

fn dedup_flags(flags: &mut Vec<Flag>) {
    let mut out: Vec<Flag> = Vec::new();
    for f in flags.drain(..) {
        let seen = out.iter().any(|g| match (g, &f) {
            (Flag::NearResonance { p: a, .. }, Flag::NearResonance { p: b, .. }) => a == b,
            (a, b) => a == b,
        });
        if !seen {
            out.push(f);
        }
    }
    *flags = out;
}

/// `N_{n,l}` from `int_0^1 j_l(x u)^2 u^2 du = (j_l^2 - j_{l-1} j_{l+1}) / 2`.
fn normalization(l: usize, x: f64, r0: f64) -> f64 {
    let mut j = vec![0.0; l + 3];
    fill_j(x, &mut j);
    let below = if l == 0 { x.cos() / x } else { j[l - 1] };
    let mut integral = 0.5 * (j[l] * j[l] - below * j[l + 1]) * r0.powi(3);
    if l == 0 {
        integral *= 4.0 * PI;
    }
    1.0 / integral.sqrt()
}

/// `B_p^q` of the non-degenerate second-order correction.
fn b_coefficients(bc: BoundaryCondition, exp: &HarmonicExpansion, x: f64, norm: f64, j: &[f64]) -> Vec<Coefficient> {
    let entries = exp.entries();
    let a_max = exp.a_max();
    let neumann = bc == BoundaryCondition::Neumann;
    let mut out = Vec::new();
    for p in 1..=2 * a_max {
        let pi = p as i32;
        let pp = (p * (p + 1)) as f64;
        let mut acc: Vec<(i32, Complex64)> = Vec::new();
        for &((a, b), ca) in &entries {
            let ai = a as i32;
            let (ja, da) = (j[a], prime_from(j, a, x));
            for &((k, b2), ck) in &entries {
                let ki = k as i32;
                let q = b + b2;
                if q.abs() > pi || ki < (ai - pi).abs() || ki > ai + pi {
                    continue;
                }
                let g = cg(ai, ki, 0, 0, pi, 0);
                if g == 0.0 {
                    continue;
                }
                let w = if neumann {
                    1.0 + x * ja / da + ((k * (k + 1)) as f64 - (a * (a + 1)) as f64 - pp) / (2.0 * x) * ja / da
                } else {
                    1.0 + x * da / ja
                };
                let t = (((2 * a + 1) * (2 * k + 1)) as f64 / (4.0 * PI * (2 * p + 1) as f64)).sqrt()
                    * g
                    * cg(ai, ki, b, b2, pi, q)
                    * w;
                let v = ca * ck * t;
                match acc.iter_mut().find(|e| e.0 == q) {
                    Some(e) => e.1 += v,
                    None => acc.push((q, v)),
                }
            }
        }
        let pre = if neumann {
            norm * x * j[0] / prime_from(j, p, x)
        } else {
            -norm * x * j[1] / j[p]
        };
        acc.sort_by_key(|e| e.0);
        for (q, v) in acc {
            if v.norm() != 0.0 {
                out.push(Coefficient { p, q, value: v * pre });
            }
        }
    }
    out
}

impl WavefunctionExpansion {
    /// Wavenumber `k = sqrt(E^(0))`.
    pub fn wavenumber(&self) -> f64 {
        self.zero / self.r0
    }

    pub fn e0(&self) -> f64 {
        self.wavenumber().powi(2)
    }

    /// True when `order` includes the degenerate second order, whose `B_p^q` are omitted.
    pub fn is_partial(&self, order: u8) -> bool {
        order >= 2 && self.mode.l != 0
    }

    fn base(&self) -> Angular {
        if self.mode.l == 0 {
            Angular::One
        } else {
            Angular::Y(self.mode.l as usize, self.mode.m)
        }
    }

    fn assemble(&mut self) {
        let n = self.norm;
        let l = self.mode.l as usize;
        let lf = l as f64;
        let base = self.base();
        let (e1, e2) = (self.ratio1, self.ratio2);
        let mut t0 = Vec::new();
        let mut t1 = Vec::new();
        let mut t2 = Vec::new();
        let push = |v: &mut Vec<Term>, c: f64, s: i32, q: usize, ang: Angular, fpow: u8| {
            if c != 0.0 {
                v.push(Term { c: c.into(), s, q, ang, fpow });
            }
        };

        push(&mut t0, n, 0, l, base, 0);

        for a in &self.a_coeffs {
            t1.push(Term { c: a.value, s: 0, q: a.p, ang: Angular::Y(a.p, a.q), fpow: 0 });
        }
        for (c, fpow) in [(n, 1u8), (0.5 * n * e1, 0)] {
            push(&mut t1, c * lf, 0, l, base, fpow);
            push(&mut t1, -c, 1, l + 1, base, fpow);
        }

        if self.order >= 2 {
            if l == 0 {
                t2.push(Term { c: self.b0.into(), s: 0, q: 0, ang: Angular::One, fpow: 0 });
            }
            for b in &self.b_coeffs {
                t2.push(Term { c: b.value, s: 0, q: b.p, ang: Angular::Y(b.p, b.q), fpow: 0 });
            }
            for a in &self.a_coeffs {
                for (c, fpow) in [(a.value, 1u8), (a.value * 0.5 * e1, 0)] {
                    if c.norm() == 0.0 {
                        continue;
                    }
                    let ang = Angular::Y(a.p, a.q);
                    t2.push(Term { c: c * a.p as f64, s: 0, q: a.p, ang, fpow });
                    t2.push(Term { c: -c, s: 1, q: a.p + 1, ang, fpow });
                }
            }
            push(&mut t2, -0.5 * e2 * n, 1, l + 1, base, 0);
            let c = n * e1 * e1 / 8.0;
            push(&mut t2, c, 2, l + 2, base, 0);
            push(&mut t2, -2.0 * lf * c, 1, l + 1, base, 0);
            let c = 0.5 * n * e1;
            push(&mut t2, c, 2, l + 2, base, 1);
            push(&mut t2, -2.0 * (lf + 1.0) * c, 1, l + 1, base, 1);
            push(&mut t2, lf * lf * c, 0, l, base, 1);
            let c = 0.5 * n;
            push(&mut t2, c, 2, l + 2, base, 2);
            push(&mut t2, -(2.0 * lf + 1.0) * c, 1, l + 1, base, 2);
            push(&mut t2, lf * (lf - 1.0) * c, 0, l, base, 2);
        }

        let all = t0.iter().chain(&t1).chain(&t2);
        self.harm_max = all
            .clone()
            .map(|t| match t.ang {
                Angular::Y(p, _) => p,
                Angular::One => 0,
            })
            .max()
            .unwrap_or(0)
            .max(self.expansion.a_max())
            .max(l);
        self.bessel_max = all.map(|t| t.q).max().unwrap_or(0) + 2;
        self.terms = [t0, t1, t2];
    }

    /// Choose `B0` so that `psi^(0) + psi^(1) + psi^(2)` has unit norm.
    ///
    /// Only the non-degenerate second order carries `B0`; otherwise this is a no-op.
    pub fn normalize(mut self) -> Result<Self> {
        if self.order < 2 || self.mode.l != 0 {
            return Ok(self);
        }
        self.b0 = 0.0;
        self.terms[2][0].c = 0.0.into();
        let [a, b, c] = self.ball_integral(|w, pt| {
            let rest = (0..3).map(|i| w.jet(i, pt).v).sum::<Complex64>();
            let j0 = Complex64::from(pt.j[0]);
            [j0.norm_sqr(), (j0.conj() * rest).re, rest.norm_sqr()]
        })?;
        let disc = b * b - a * (c - 1.0);
        if disc < 0.0 {
            return Err(Error::Unsupported("no real B0 gives a unit-norm second-order wavefunction".into()));
        }
        let roots = [(-b + disc.sqrt()) / a, (-b - disc.sqrt()) / a];
        let b0 = if roots[0].abs() <= roots[1].abs() { roots[0] } else { roots[1] };
        self.b0 = b0;
        self.terms[2][0].c = b0.into();
        Ok(self)
    }

    /// `psi^(0) + ... + psi^(order)` at mapped coordinates `(r, theta, phi)`.
    pub fn evaluate(&self, r: f64, theta: f64, phi: f64, order: u8) -> Result<Complex64> {
        self.check_point(r, theta, order)?;
        let pt = self.point(r, theta, phi);
        Ok((0..=order as usize).map(|i| self.jet(i, &pt).v).sum())
    }

    /// `psi^(0) + ... + psi^(order)` at physical coordinates; `R` is mapped to `R / (1 + f)`.
    pub fn evaluate_physical(&self, big_r: f64, theta: f64, phi: f64, order: u8) -> Result<Complex64> {
        let f = self.expansion.deformation(theta, phi);
        self.evaluate(big_r / (1.0 + f), theta, phi, order)
    }

    /// `int |psi^(0) + ... + psi^(order)|^2` over the mapped ball.
    pub fn norm_squared(&self, order: u8) -> Result<f64> {
        self.check_point(0.0, 0.0, order)?;
        let [v] = self.ball_integral(|w, pt| [(0..=order as usize).map(|i| w.jet(i, pt).v).sum::<Complex64>().norm_sqr()])?;
        Ok(v)
    }

    fn check_point(&self, r: f64, theta: f64, order: u8) -> Result<()> {
        if order > 2 {
            return Err(domain("evaluate_wavefunction", format!("order {order} is not available (0..=2)")));
        }
        if order > self.order {
            return Err(Error::Unsupported(format!(
                "order {order} requested but the expansion holds corrections through order {}",
                self.order
            )));
        }
        if !(r >= 0.0 && r.is_finite()) {
            return Err(domain("evaluate_wavefunction", format!("radius {r} must be non-negative")));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(domain("evaluate_wavefunction", format!("theta={theta} outside [0, pi]")));
        }
        Ok(())
    }

    pub(crate) fn point(&self, r: f64, theta: f64, phi: f64) -> Point {
        let table = LegendreTable::new(self.harm_max, theta);
        let f = self.expansion.jet(&table, phi);
        let f2 = f.mul(&f);
        let rho = self.wavenumber() * r;
        let mut j = vec![0.0; self.bessel_max + 1];
        fill_j(rho, &mut j);
        Point { r, theta, phi, rho, table, f, f2, j }
    }

    /// Value and derivatives of `psi^(order)` at a point.
    pub(crate) fn jet(&self, order: usize, pt: &Point) -> Jet3 {
        let k = self.wavenumber();
        let mut out = Jet3::default();
        for t in &self.terms[order] {
            let base = match t.ang {
                Angular::One => AngularJet::one(),
                Angular::Y(p, q) => AngularJet::harmonic(&pt.table, p, q, pt.phi),
            };
            let a = match t.fpow {
                0 => base,
                1 => pt.f.mul(&base),
                _ => pt.f2.mul(&base),
            };
            let (v, d1, d2) = radial(t.s, t.q, pt.rho, &pt.j);
            let (v, d1, d2) = (t.c * v, t.c * (k * d1), t.c * (k * k * d2));
            out.v += v * a.v;
            out.r += d1 * a.v;
            out.rr += d2 * a.v;
            out.t += v * a.t;
            out.tt += v * a.tt;
            out.p += v * a.p;
            out.pp += v * a.pp;
            out.rt += d1 * a.t;
            out.rp += d1 * a.p;
        }
        out
    }

    /// `int_ball g dV` with Gauss-Legendre in `r` and `cos theta`, doubling until stable.
    pub(crate) fn ball_integral<const K: usize>(&self, g: impl Fn(&Self, &Point) -> [f64; K]) -> Result<[f64; K]> {
        let nr = 24 + 2 * self.zero.ceil() as usize;
        let nt = self.harm_max + self.expansion.a_max() + 16;
        converge(nr.max(nt), |scale| self.ball_rule(nr * scale, nt * scale, &g))
    }

    fn ball_rule<const K: usize>(&self, nr: usize, nt: usize, g: &impl Fn(&Self, &Point) -> [f64; K]) -> Result<[f64; K]> {
        let rr = rule(nr)?;
        let rt = rule(nt)?;
        let nphi = self.phi_points();
        let wphi = 2.0 * PI / nphi as f64;
        let h = 0.5 * self.r0;
        let mut acc = [0.0; K];
        for &(u, wu) in rt.iter() {
            for ip in 0..nphi {
                let mut pt = self.point(h, u.acos(), 2.0 * PI * ip as f64 / nphi as f64);
                for &(v, wv) in rr.iter() {
                    let r = h * (v + 1.0);
                    self.move_radius(&mut pt, r);
                    let val = g(self, &pt);
                    let w = wu * wphi * wv * h * r * r;
                    for (a, b) in acc.iter_mut().zip(val) {
                        *a += w * b;
                    }
                }
            }
        }
        Ok(acc)
    }

    /// `int_{r = R0} g dOmega`, doubling until stable.
    pub(crate) fn sphere_integral<const K: usize>(&self, g: impl Fn(&Self, &Point) -> [f64; K]) -> Result<[f64; K]> {
        let nt = self.harm_max + self.expansion.a_max() + 16;
        converge(nt, |scale| {
            let rt = rule(nt * scale)?;
            let nphi = self.phi_points();
            let wphi = 2.0 * PI / nphi as f64;
            let mut acc = [0.0; K];
            for &(u, wu) in rt.iter() {
                for ip in 0..nphi {
                    let pt = self.point(self.r0, u.acos(), 2.0 * PI * ip as f64 / nphi as f64);
                    for (a, b) in acc.iter_mut().zip(g(self, &pt)) {
                        *a += wu * wphi * b;
                    }
                }
            }
            Ok(acc)
        })
    }

    pub(crate) fn move_radius(&self, pt: &mut Point, r: f64) {
        pt.r = r;
        pt.rho = self.wavenumber() * r;
        fill_j(pt.rho, &mut pt.j);
    }

    /// Points of the periodic trapezoid rule in `phi`; one suffices when nothing depends on `phi`
    /// beyond the common factor `e^{i m phi}`.
    pub(crate) fn phi_points(&self) -> usize {
        if self.expansion.is_axisymmetric() {
            1
        } else {
            4 * (self.expansion.a_max() + self.harm_max) + 8
        }
    }
}

/// Repeat `eval(scale)` with `scale = 1, 2, 4, ...` until consecutive results agree.
fn converge<const K: usize>(base: usize, eval: impl Fn(usize) -> Result<[f64; K]>) -> Result<[f64; K]> {
    let mut scale = 1;
    let mut prev = eval(scale)?;
    loop {
        scale *= 2;
        if base * scale > crate::specfun::quadrature::MAX_NODES {
            let last = eval(scale / 2)?;
            return Err(Error::Quadrature { previous: prev[0], last: last[0] });
        }
        let next = eval(scale)?;
        let size = next.iter().fold(1e-300_f64, |m, v| m.max(v.abs()));
        if prev.iter().zip(&next).all(|(a, b)| (a - b).abs() <= 1e-11 * size) {
            return Ok(next);
        }
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Quadrature { previous: prev[0], last: next[0] });
        }
        prev = next;
    }
}

/// Evaluation context at one point.
pub(crate) struct Point {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub rho: f64,
    pub table: LegendreTable,
    pub f: AngularJet,
    pub f2: AngularJet,
    pub j: Vec<f64>,
}

/// `psi` with its first and second derivatives (no mixed `theta phi`).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Jet3 {
    pub v: Complex64,
    pub r: Complex64,
    pub rr: Complex64,
    pub t: Complex64,
    pub tt: Complex64,
    pub p: Complex64,
    pub pp: Complex64,
    pub rt: Complex64,
    pub rp: Complex64,
}

/// `rho^e j_q(rho)`, with the `rho -> 0` limit.
fn pw(rho: f64, e: i32, q: usize, j: &[f64]) -> f64 {
    if rho == 0.0 {
        let total = e + q as i32;
        return match total.cmp(&0) {
            std::cmp::Ordering::Greater => 0.0,
            std::cmp::Ordering::Equal => 1.0 / (1..=q).fold(1.0, |acc, i| acc * (2 * i + 1) as f64),
            std::cmp::Ordering::Less => f64::NAN,
        };
    }
    rho.powi(e) * j[q]
}

/// `rho^s j_q` and its first two `rho` derivatives.
fn radial(s: i32, q: usize, rho: f64, j: &[f64]) -> (f64, f64, f64) {
    let sq = (s + q as i32) as f64;
    let v = pw(rho, s, q, j);
    let mut d1 = -pw(rho, s, q + 1, j);
    if sq != 0.0 {
        d1 += sq * pw(rho, s - 1, q, j);
    }
    let mut d2 = pw(rho, s, q + 2, j) - (2.0 * sq + 1.0) * pw(rho, s - 1, q + 1, j);
    if sq * (sq - 1.0) != 0.0 {
        d2 += sq * (sq - 1.0) * pw(rho, s - 2, q, j);
    }
    (v, d1, d2)
}
