//! Clebsch-Gordan coefficients from the Racah sum in exact rational arithmetic.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Arguments of `<j1 j2 m1 m2 | j3 m3>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AngularMomentumTriple {
    pub j1: u32,
    pub j2: u32,
    pub j3: u32,
    pub m1: i32,
    pub m2: i32,
    pub m3: i32,
}

impl AngularMomentumTriple {
    pub fn new(j1: u32, j2: u32, j3: u32, m1: i32, m2: i32, m3: i32) -> Result<Self> {
        for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
            if m.unsigned_abs() > j {
                return Err(domain("AngularMomentumTriple", format!("|m|={} exceeds j={j}", m.abs())));
            }
        }
        Ok(Self { j1, j2, j3, m1, m2, m3 })
    }
}

/// `<j1 j2 m1 m2 | j3 m3>`.
pub fn clebsch_gordan(t: &AngularMomentumTriple) -> f64 {
    cg(t.j1 as i32, t.j2 as i32, t.m1, t.m2, t.j3 as i32, t.m3)
}

type Key = (i32, i32, i32, i32, i32, i32);

fn cache() -> &'static RwLock<HashMap<Key, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<Key, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `<j1 j2 m1 m2 | j m>` for arbitrary integers; zero outside the physical range.
pub(crate) fn cg(j1: i32, j2: i32, m1: i32, m2: i32, j: i32, m: i32) -> f64 {
    if j1 < 0 || j2 < 0 || j < 0 || m1 + m2 != m {
        return 0.0;
    }
    if m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return 0.0;
    }
    if j < (j1 - j2).abs() || j > j1 + j2 {
        return 0.0;
    }
    let key = (j1, j2, m1, m2, j, m);
    if let Some(v) = cache().read().unwrap().get(&key) {
        return *v;
    }
    let v = racah(j1, j2, m1, m2, j, m);
    cache().write().unwrap().insert(key, v);
    v
}

fn factorial(n: i32) -> BigInt {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= k;
    }
    f
}

fn racah(j1: i32, j2: i32, m1: i32, m2: i32, j: i32, m: i32) -> f64 {
    let f = factorial;
    let pre_num = BigInt::from(2 * j + 1)
        * f(j + j1 - j2)
        * f(j - j1 + j2)
        * f(j1 + j2 - j)
        * f(j + m)
        * f(j - m)
        * f(j1 - m1)
        * f(j1 + m1)
        * f(j2 - m2)
        * f(j2 + m2);
    let pre = BigRational::new(pre_num, f(j1 + j2 + j + 1));
    let mut sum = BigRational::zero();
    for k in 0..=(j1 + j2) {
        let args = [k, j1 + j2 - j - k, j1 - m1 - k, j2 + m2 - k, j - j2 + m1 + k, j - j1 - m2 + k];
        if args.iter().any(|&a| a < 0) {
            continue;
        }
        let den = args.iter().fold(BigInt::one(), |acc, &a| acc * f(a));
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    let sign = if sum.is_negative() { -1.0 } else { 1.0 };
    let square = pre * &sum * &sum;
    sign * square.to_f64().unwrap_or(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(j1: u32, j2: u32, m1: i32, m2: i32, j3: u32, m3: i32) -> f64 {
        clebsch_gordan(&AngularMomentumTriple::new(j1, j2, j3, m1, m2, m3).unwrap())
    }

    #[test]
    fn spec_examples() {
        for l in 0..15 {
            assert!((t(l, 0, 0, 0, l, 0) - 1.0).abs() < 1e-15);
        }
        assert!((t(1, 1, 0, 0, 0, 0) + 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(t(2, 1, 1, 1, 3, 1), 0.0);
        assert_eq!(t(1, 1, 0, 0, 3, 0), 0.0);
    }

    #[test]
    fn known_values() {
        // <1 1 1 -1 | 2 0> = 1/sqrt(6), <1/2 ...> not representable; <2 1 0 0|1 0> = -sqrt(2/5)
        assert!((t(1, 1, 1, -1, 2, 0) - (1.0f64 / 6.0).sqrt()).abs() < 1e-15);
        assert!((t(2, 1, 0, 0, 1, 0) + (2.0f64 / 5.0).sqrt()).abs() < 1e-15);
        // parity: <j1 j2 0 0 | j 0> vanishes when j1+j2+j is odd
        assert_eq!(t(2, 2, 0, 0, 3, 0), 0.0);
    }

    #[test]
    fn orthogonality() {
        for j1 in 0..=6i32 {
            for j2 in 0..=6i32 {
                for ja in (j1 - j2).abs()..=(j1 + j2) {
                    for jb in (j1 - j2).abs()..=(j1 + j2) {
                        for m in -ja.min(jb)..=ja.min(jb) {
                            let mut s = 0.0;
                            for m1 in -j1..=j1 {
                                let m2 = m - m1;
                                s += cg(j1, j2, m1, m2, ja, m) * cg(j1, j2, m1, m2, jb, m);
                            }
                            let want = if ja == jb { 1.0 } else { 0.0 };
                            assert!((s - want).abs() < 1e-10);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn large_arguments_stay_finite() {
        let v = cg(40, 30, 0, 0, 50, 0);
        assert!(v.is_finite() && v.abs() < 1.0 && v != 0.0);
        let mut s = 0.0;
        for j in 10..=70 {
            s += cg(40, 30, 3, -2, j, 1).powi(2);
        }
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn triple_validation() {
        assert!(AngularMomentumTriple::new(1, 1, 1, 2, 0, 2).is_err());
    }
}
