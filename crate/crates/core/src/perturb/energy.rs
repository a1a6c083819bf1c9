//! Closed-form eigenvalue corrections.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BoundaryCondition, EnergyOptions, EnergyResult, Flag, ModeIndex};
use crate::error::{Error, Result};
use crate::shapes::HarmonicExpansion;
use crate::specfun::bessel::{fill_j, prime_from};
use crate::specfun::clebsch::cg;
use crate::specfun::zero_proximity;

/// Second-order ratio `E^(2)/E^(0)` with the resonance diagnostics of its terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondOrder {
    pub ratio: f64,
    pub flags: Vec<Flag>,
}

/// `beta^2/R0^2` or `alpha^2/R0^2`.
pub fn unperturbed_energy(mode: &ModeIndex, r0: f64) -> Result<f64> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::InvalidShape(format!("R0 must be positive, got {r0}")));
    }
    let x = mode.zero()?;
    Ok(x * x / (r0 * r0))
}

/// Always zero; errors for `l != 0`.
pub fn first_order_nondegenerate(mode: &ModeIndex) -> Result<f64> {
    require_l0(mode)?;
    Ok(0.0)
}

/// `E^(1)/E^(0)` for `l != 0` on an axisymmetric deformation.
pub fn first_order_degenerate(mode: &ModeIndex, exp: &HarmonicExpansion) -> Result<f64> {
    require_degenerate(mode, exp)?;
    let x = mode.zero()?;
    Ok(e1_ratio(mode, exp, x))
}

/// `E^(2)/E^(0)` for `l = 0`.
pub fn second_order_nondegenerate(
    mode: &ModeIndex,
    exp: &HarmonicExpansion,
    opts: &EnergyOptions,
) -> Result<SecondOrder> {
    require_l0(mode)?;
    let x = mode.zero()?;
    let a_max = exp.a_max();
    let j = bessel_table(x, a_max + 1);
    let mut ratio = 0.0;
    let mut flags = Vec::new();
    for p in 1..=a_max {
        let mut s = Complex64::new(0.0, 0.0);
        let mut weight = 0.0;
        for q in -(p as i32)..=p as i32 {
            let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
            s += exp.coeff(p, q) * exp.coeff(p, -q) * sign;
            weight += exp.coeff(p, q).norm_sqr();
        }
        if weight == 0.0 {
            continue;
        }
        let (jp, dp) = (j[p], prime_from(&j, p, x));
        let (factor, denom) = match mode.bc {
            BoundaryCondition::Dirichlet => (1.0 + x * dp / jp, jp),
            BoundaryCondition::Neumann => (-(1.0 + x * jp / dp), dp),
        };
        ratio += s.re / (2.0 * PI) * factor;
        check_resonance(&mut flags, mode.bc, p, x, denom, weight, opts)?;
    }
    Ok(SecondOrder { ratio, flags })
}

/// `E^(2)/E^(0)` for `l != 0` on an axisymmetric deformation.
pub fn second_order_degenerate(
    mode: &ModeIndex,
    exp: &HarmonicExpansion,
    opts: &EnergyOptions,
) -> Result<SecondOrder> {
    require_degenerate(mode, exp)?;
    let x = mode.zero()?;
    let l = mode.l as i32;
    let m = mode.m.abs();
    let a_max = exp.a_max() as i32;
    let lf = l as f64;
    let big_l = lf * (lf + 1.0);
    let d = x * x - big_l;
    let c = |a: i32| if a >= 1 { exp.axial(a as usize) } else { 0.0 };
    let p_max = a_max + l;
    let j = bessel_table(x, p_max as usize + 1);
    let e1 = e1_ratio(mode, exp, x);
    let neumann = mode.bc == BoundaryCondition::Neumann;

    let mut ratio = if neumann {
        (x * x - 3.0 * big_l) / d * e1 * e1 / 4.0 - big_l / d * e1 * e1_sum(l, m, exp, |_| 1.0)
    } else {
        e1 * e1 / 4.0
    };

    for a in 1..=a_max {
        if c(a) == 0.0 {
            continue;
        }
        for s in 1..=a_max {
            if c(s) == 0.0 {
                continue;
            }
            let pre = (((2 * a + 1) * (2 * s + 1)) as f64).sqrt() / (2.0 * PI) * c(a) * c(s);
            for k in (a - s).abs()..=(a + s).min(2 * l) {
                let g = cg(a, s, 0, 0, k, 0);
                let mut t = pre * g * g * cg(k, l, 0, 0, l, 0) * cg(k, l, 0, m, l, m);
                if neumann {
                    t *= 1.0 + ((k * (k + 1)) as f64 - 2.0 * big_l) / (2.0 * d);
                }
                ratio += t;
            }
        }
    }

    let mut flags = Vec::new();
    for p in m..=p_max {
        if p == l {
            continue;
        }
        let pf = p as f64;
        let pp = pf * (pf + 1.0);
        let lo = (l - p).abs().max(1);
        let hi = (l + p).min(a_max);
        let (mut sum_k, mut sum_s) = (0.0, 0.0);
        let (mut abs_k, mut abs_s) = (0.0, 0.0);
        let (jp, dp) = (j[p as usize], prime_from(&j, p as usize, x));
        for k in lo..=hi {
            let u = ((2 * k + 1) as f64).sqrt() * c(k) * cg(k, l, 0, 0, p, 0) * cg(k, l, 0, m, p, m);
            abs_k += u.abs();
            sum_k += if neumann {
                u * (1.0 + ((k * (k + 1)) as f64 + big_l - pp) / (2.0 * d))
            } else {
                u
            };
        }
        for s in lo..=hi {
            let v = ((2 * s + 1) as f64).sqrt() * c(s) * cg(s, p, 0, 0, l, 0) * cg(s, p, 0, m, l, m);
            abs_s += v.abs();
            sum_s += if neumann {
                let sf = s as f64;
                v * (1.0 + (2.0 * x * x + sf * (sf + 1.0) - pp - big_l) / 4.0 * jp / (x * dp))
            } else {
                v
            };
        }
        let weight = abs_k * abs_s;
        if weight == 0.0 {
            continue;
        }
        ratio += if neumann {
            -sum_k * sum_s / PI
        } else {
            sum_k * sum_s / (2.0 * PI) * x * dp / jp
        };
        let denom = if neumann { dp } else { jp };
        check_resonance(&mut flags, mode.bc, p as usize, x, denom, weight, opts)?;
    }
    Ok(SecondOrder { ratio, flags })
}

/// Corrected energy of one mode through second order.
pub fn energy(mode: &ModeIndex, exp: &HarmonicExpansion, opts: &EnergyOptions) -> Result<EnergyResult> {
    let e0 = unperturbed_energy(mode, exp.r0())?;
    let (ratio1, second) = if mode.l == 0 {
        (first_order_nondegenerate(mode)?, second_order_nondegenerate(mode, exp, opts)?)
    } else {
        (first_order_degenerate(mode, exp)?, second_order_degenerate(mode, exp, opts)?)
    };
    let mut flags = second.flags;
    if second.ratio.abs() > opts.breakdown_threshold {
        flags.push(Flag::LargeCorrection { ratio2: second.ratio });
    }
    if exp.truncation_warning() {
        flags.push(Flag::TruncationWarning);
    }
    let ratio2 = second.ratio;
    Ok(EnergyResult {
        mode: *mode,
        e0,
        e1: e0 * ratio1,
        e2: e0 * ratio2,
        total: e0 * (1.0 + ratio1 + ratio2),
        ratio1,
        ratio2,
        flags,
    })
}

/// `sum_k sqrt((4k+1)/pi) C_2k <2k l 0 0|l 0><2k l 0 m|l m> w(k)`.
fn e1_sum(l: i32, m: i32, exp: &HarmonicExpansion, w: impl Fn(i32) -> f64) -> f64 {
    (1..=l)
        .map(|k| {
            let a = 2 * k;
            ((4 * k + 1) as f64 / PI).sqrt()
                * exp.axial(a as usize)
                * cg(a, l, 0, 0, l, 0)
                * cg(a, l, 0, m, l, m)
                * w(k)
        })
        .sum()
}

pub(crate) fn e1_ratio(mode: &ModeIndex, exp: &HarmonicExpansion, x: f64) -> f64 {
    if mode.l == 0 {
        return 0.0;
    }
    let l = mode.l as i32;
    let m = mode.m.abs();
    match mode.bc {
        BoundaryCondition::Dirichlet => -e1_sum(l, m, exp, |_| 1.0),
        BoundaryCondition::Neumann => {
            let d = x * x - (l * (l + 1)) as f64;
            -e1_sum(l, m, exp, |k| 1.0 + (k * (2 * k + 1)) as f64 / d)
        }
    }
}

/// `j_0(x) ..= j_{l_max+1}(x)`.
pub(crate) fn bessel_table(x: f64, l_max: usize) -> Vec<f64> {
    let mut j = vec![0.0; l_max + 2];
    fill_j(x, &mut j);
    j
}

pub(crate) fn check_resonance(
    flags: &mut Vec<Flag>,
    bc: BoundaryCondition,
    p: usize,
    x: f64,
    denom: f64,
    weight: f64,
    opts: &EnergyOptions,
) -> Result<()> {
    if weight <= opts.weight_floor {
        return Ok(());
    }
    let proximity = zero_proximity(p as u32, x, bc.zero_kind())?;
    if proximity < opts.resonance_threshold {
        flags.push(Flag::NearResonance {
            p: p as u32,
            denom,
            proximity,
        });
    }
    Ok(())
}

fn require_l0(mode: &ModeIndex) -> Result<()> {
    if mode.l != 0 {
        return Err(Error::InvalidMode(format!("{mode} is degenerate; use the l != 0 formulas")));
    }
    Ok(())
}

fn require_degenerate(mode: &ModeIndex, exp: &HarmonicExpansion) -> Result<()> {
    if mode.l == 0 {
        return Err(Error::InvalidMode(format!("{mode} is non-degenerate; use the l = 0 formulas")));
    }
    if !exp.is_axisymmetric() {
        return Err(Error::Unsupported(
            "degenerate corrections require an axisymmetric deformation".into(),
        ));
    }
    Ok(())
}
