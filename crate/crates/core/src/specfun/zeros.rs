//! Positive zeros of `j_l` and `j_l'`.
//!
//! Brackets come from interlacing: `beta_{n,l}` lies in `(beta_{n,l-1}, beta_{n+1,l-1})`
//! and, for `l >= 1`, `alpha_{n,l}` lies in `(beta_{n-1,l}, beta_{n,l})` with the
//! left end replaced by `sqrt(l(l+1))` for `n = 1`. Each bracket is refined by
//! Newton steps that fall back to bisection whenever they leave the bracket.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use super::bessel::{jl, jl_prime, jl_second};
use crate::error::{domain, Error, Result};

/// Which function a zero belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BesselZeroKind {
    /// `beta_{n,l}`: zeros of `j_l`.
    FunctionZero,
    /// `alpha_{n,l}`: zeros of `j_l'`, excluding `x = 0`.
    DerivativeZero,
}

impl BesselZeroKind {
    fn label(self) -> &'static str {
        match self {
            BesselZeroKind::FunctionZero => "j_l",
            BesselZeroKind::DerivativeZero => "j_l'",
        }
    }
}

type Key = (u32, u32, BesselZeroKind);

fn cache() -> &'static RwLock<HashMap<Key, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<Key, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `n`-th positive zero of `j_l` or `j_l'`.
pub fn bessel_zero(l: u32, n: u32, kind: BesselZeroKind) -> Result<f64> {
    if n == 0 {
        return Err(domain("bessel_zero", "zero index n starts at 1"));
    }
    if l > super::bessel::MAX_ORDER {
        return Err(domain("bessel_zero", format!("order {l} exceeds supported range")));
    }
    if let Some(v) = cache().read().unwrap().get(&(l, n, kind)) {
        return Ok(*v);
    }
    let v = compute(l, n, kind)?;
    cache().write().unwrap().insert((l, n, kind), v);
    Ok(v)
}

/// Distance from `x` to the nearest zero of `j_p` (or of `j_p'`) in units of `pi`.
pub fn zero_proximity(p: u32, x: f64, kind: BesselZeroKind) -> Result<f64> {
    let mut best = f64::INFINITY;
    let mut n = 1;
    loop {
        let z = bessel_zero(p, n, kind)?;
        best = best.min((x - z).abs());
        if z > x {
            break;
        }
        n += 1;
    }
    Ok(best / PI)
}

fn compute(l: u32, n: u32, kind: BesselZeroKind) -> Result<f64> {
    use BesselZeroKind::*;
    match (kind, l) {
        (FunctionZero, 0) => Ok(n as f64 * PI),
        (DerivativeZero, 0) => bessel_zero(1, n, FunctionZero),
        (FunctionZero, _) => {
            let lo = bessel_zero(l - 1, n, FunctionZero)?;
            let hi = bessel_zero(l - 1, n + 1, FunctionZero)?;
            refine(l, n, kind, lo, hi)
        }
        (DerivativeZero, _) => {
            let lf = l as f64;
            let lo = if n == 1 {
                (lf * (lf + 1.0)).sqrt()
            } else {
                bessel_zero(l, n - 1, FunctionZero)?
            };
            let hi = bessel_zero(l, n, FunctionZero)?;
            refine(l, n, kind, lo, hi)
        }
    }
}

fn refine(l: u32, n: u32, kind: BesselZeroKind, lo: f64, hi: f64) -> Result<f64> {
    let li = l as usize;
    let (f, df): (Box<dyn Fn(f64) -> f64>, Box<dyn Fn(f64) -> f64>) = match kind {
        BesselZeroKind::FunctionZero => (Box::new(move |x| jl(li, x)), Box::new(move |x| jl_prime(li, x))),
        BesselZeroKind::DerivativeZero => {
            (Box::new(move |x| jl_prime(li, x)), Box::new(move |x| jl_second(li, x)))
        }
    };
    let fail = |detail: String| Error::ZeroNotFound {
        kind: kind.label(),
        l,
        n,
        lo,
        hi,
        detail,
    };
    let (mut a, mut b) = (lo, hi);
    // Shrink off the bracket ends, which are themselves zeros of a neighbour.
    let eps = 1e-12 * b;
    a += eps;
    b -= eps;
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(fail(format!("no sign change (f(lo)={fa:e}, f(hi)={fb:e})")));
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let d = df(x);
        let newton = x - fx / d;
        let next = if d != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if (next - x).abs() <= 1e-15 * x || b - a <= 4.0 * f64::EPSILON * x {
            return Ok(next);
        }
        x = next;
    }
    Err(fail(format!("no convergence after 200 iterations, last bracket [{a}, {b}]")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use BesselZeroKind::*;

    /// Sign-change scan plus bisection, independent of the interlacing brackets.
    fn scan_oracle(l: usize, n: u32, deriv: bool) -> f64 {
        let f = |x: f64| if deriv { jl_prime(l, x) } else { jl(l, x) };
        let mut count = 0;
        let h = 1e-3;
        let mut x = 0.5;
        loop {
            let (a, b) = (x, x + h);
            if f(a).signum() != f(b).signum() {
                count += 1;
                if count == n {
                    let (mut lo, mut hi) = (a, b);
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        if f(mid).signum() == f(lo).signum() {
                            lo = mid
                        } else {
                            hi = mid
                        }
                    }
                    return 0.5 * (lo + hi);
                }
            }
            x = b;
        }
    }

    #[test]
    fn reference_values() {
        assert_eq!(bessel_zero(0, 1, FunctionZero).unwrap(), PI);
        assert!((bessel_zero(0, 1, DerivativeZero).unwrap() - 4.49341).abs() < 5e-6);
        // printed truncated: 4.5140996...
        assert!((bessel_zero(3, 1, DerivativeZero).unwrap() - 4.51409).abs() < 1e-5);
        assert!((bessel_zero(1, 1, DerivativeZero).unwrap() - 2.08157598).abs() < 1e-8);
    }

    #[test]
    fn against_scan() {
        for l in [0usize, 1, 2, 5, 9] {
            for n in 1..=4 {
                let a = bessel_zero(l as u32, n, FunctionZero).unwrap();
                assert!((a - scan_oracle(l, n, false)).abs() < 1e-10, "beta l={l} n={n}");
                let b = bessel_zero(l as u32, n, DerivativeZero).unwrap();
                let o = scan_oracle(l, n, true);
                assert!((b - o).abs() < 1e-10, "alpha l={l} n={n}");
            }
        }
    }

    #[test]
    fn back_substitution_and_interlacing() {
        for l in 0..=12u32 {
            for n in 1..=6u32 {
                let b = bessel_zero(l, n, FunctionZero).unwrap();
                assert!(jl(l as usize, b).abs() < 1e-9);
                let a = bessel_zero(l, n, DerivativeZero).unwrap();
                assert!(jl_prime(l as usize, a).abs() < 1e-9);
                assert!(b < bessel_zero(l + 1, n, FunctionZero).unwrap());
                assert!(bessel_zero(l + 1, n, FunctionZero).unwrap() < bessel_zero(l, n + 1, FunctionZero).unwrap());
                assert!(b < bessel_zero(l, n + 1, FunctionZero).unwrap());
                if l >= 1 {
                    assert!(a < bessel_zero(l + 1, n, DerivativeZero).unwrap());
                    assert!(bessel_zero(l + 1, n, DerivativeZero).unwrap() < bessel_zero(l, n + 1, DerivativeZero).unwrap());
                }
            }
        }
    }

    #[test]
    fn proximity() {
        let a10 = bessel_zero(0, 1, DerivativeZero).unwrap();
        let p = zero_proximity(3, a10, DerivativeZero).unwrap();
        assert!(p > 0.006 && p < 0.007, "{p}");
        assert_eq!(zero_proximity(0, PI, FunctionZero).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_index() {
        assert!(bessel_zero(0, 0, FunctionZero).is_err());
    }
}
