//! Gauss-Legendre rules on `[-1, 1]`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{domain, Result};

pub const MAX_NODES: usize = 512;

fn cache() -> &'static RwLock<HashMap<usize, Arc<Vec<(f64, f64)>>>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `n`-point rule as `(node, weight)` pairs in ascending node order.
pub fn gauss_legendre_nodes(n: usize) -> Result<Vec<(f64, f64)>> {
    Ok(rule(n)?.as_ref().clone())
}

pub(crate) fn rule(n: usize) -> Result<Arc<Vec<(f64, f64)>>> {
    if !(2..=MAX_NODES).contains(&n) {
        return Err(domain("gauss_legendre_nodes", format!("n={n} outside 2..={MAX_NODES}")));
    }
    if let Some(r) = cache().read().unwrap().get(&n) {
        return Ok(r.clone());
    }
    let r = Arc::new(build(n));
    cache().write().unwrap().insert(n, r.clone());
    Ok(r)
}

fn build(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_pair(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        out[n / 2].0 = 0.0;
    }
    out
}

/// `(P_n(x), P_n'(x))`.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrate `f` over `[a, b]` with an `n`-point rule.
#[cfg(test)]
pub(crate) fn integrate(n: usize, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> Result<f64> {
    let r = rule(n)?;
    let (h, c) = (0.5 * (b - a), 0.5 * (b + a));
    Ok(r.iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>() * h)
}
