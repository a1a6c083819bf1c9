//! Spherical Bessel functions of the first kind.
//!
//! Evaluation strategy by region:
//! - `x < 1`: power series for each order;
//! - `x >= l_max`: upward recurrence from `j_0`, `j_1`;
//! - otherwise: Miller downward recurrence normalised against `j_0` or `j_1`.

use crate::error::{domain, Result};

/// Largest order accepted by the public entry points.
pub const MAX_ORDER: u32 = 200;

/// Upper end of the argument range covered by the accuracy guarantee.
pub const MAX_ARGUMENT: f64 = 200.0;

fn check(function: &'static str, l: u32, x: f64) -> Result<()> {
    if l > MAX_ORDER {
        return Err(domain(function, format!("order {l} exceeds {MAX_ORDER}")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain(function, format!("argument {x} must be finite and >= 0")));
    }
    Ok(())
}

/// `j_l(x)`.
pub fn spherical_bessel_j(l: u32, x: f64) -> Result<f64> {
    check("spherical_bessel_j", l, x)?;
    Ok(jl(l as usize, x))
}

/// `d j_l / dx`.
pub fn spherical_bessel_j_prime(l: u32, x: f64) -> Result<f64> {
    check("spherical_bessel_j_prime", l, x)?;
    Ok(jl_prime(l as usize, x))
}

/// `d^2 j_l / dx^2`, from the spherical Bessel equation.
pub fn spherical_bessel_j_second(l: u32, x: f64) -> Result<f64> {
    check("spherical_bessel_j_second", l, x)?;
    Ok(jl_second(l as usize, x))
}

/// `j_0(x), ..., j_{l_max}(x)` in one pass.
pub fn spherical_bessel_j_all(l_max: u32, x: f64) -> Result<Vec<f64>> {
    check("spherical_bessel_j_all", l_max, x)?;
    let mut out = vec![0.0; l_max as usize + 1];
    fill_j(x, &mut out);
    Ok(out)
}

pub(crate) fn jl(l: usize, x: f64) -> f64 {
    if x < 1.0 {
        return series(l, x);
    }
    let mut buf = vec![0.0; l + 1];
    fill_j(x, &mut buf);
    buf[l]
}

pub(crate) fn jl_prime(l: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if l == 1 { 1.0 / 3.0 } else { 0.0 };
    }
    let mut buf = vec![0.0; l + 2];
    fill_j(x, &mut buf);
    prime_from(&buf, l, x)
}

pub(crate) fn jl_second(l: usize, x: f64) -> f64 {
    if x == 0.0 {
        return match l {
            0 => -1.0 / 3.0,
            2 => 2.0 / 15.0,
            _ => 0.0,
        };
    }
    let mut buf = vec![0.0; l + 2];
    fill_j(x, &mut buf);
    let lf = l as f64;
    let d = prime_from(&buf, l, x);
    -2.0 / x * d - (1.0 - lf * (lf + 1.0) / (x * x)) * buf[l]
}

/// `j_l'` given a table holding at least orders `0..=l+1`.
pub(crate) fn prime_from(table: &[f64], l: usize, x: f64) -> f64 {
    if l == 0 {
        -table[1]
    } else {
        table[l - 1] - (l as f64 + 1.0) / x * table[l]
    }
}

/// Power series `j_l(x) = x^l / (2l+1)!! * sum_k (-x^2/2)^k / (k! (2l+3)...(2l+2k+1))`.
pub(crate) fn series(l: usize, x: f64) -> f64 {
    let mut lead = 1.0;
    for i in 1..=l {
        lead *= x / (2 * i + 1) as f64;
    }
    if lead == 0.0 {
        return 0.0;
    }
    let y = 0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= -y / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Fill `out[0..=L]` with `j_l(x)`.
pub(crate) fn fill_j(x: f64, out: &mut [f64]) {
    let lmax = out.len() - 1;
    if x == 0.0 {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[0] = 1.0;
        return;
    }
    if x < 1.0 {
        for (l, v) in out.iter_mut().enumerate() {
            *v = series(l, x);
        }
        return;
    }
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = (s / x - c) / x;
    if x >= lmax as f64 {
        out[0] = j0;
        if lmax >= 1 {
            out[1] = j1;
        }
        for l in 1..lmax {
            out[l + 1] = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
        }
        return;
    }
    // Miller: start well above both the requested order and the argument.
    let top = lmax.max(x as usize);
    let start = top + 20 + (40.0 * top as f64).sqrt() as usize;
    let mut next = 0.0_f64;
    let mut cur = 1e-280_f64;
    for l in (0..=start).rev() {
        if l <= lmax {
            out[l] = cur;
        }
        if l == 0 {
            break;
        }
        let prev = (2 * l + 1) as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            let k = 1e-250;
            cur *= k;
            next *= k;
            out.iter_mut().for_each(|v| *v *= k);
        }
    }
    let scale = if j0.abs() >= j1.abs() || lmax == 0 {
        j0 / out[0]
    } else {
        j1 / out[1]
    };
    out.iter_mut().for_each(|v| *v *= scale);
}
