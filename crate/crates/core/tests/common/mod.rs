//! Checks behind the acceptance criteria, shared by the acceptance harness and the test suites.
#![allow(dead_code)]

use std::f64::consts::PI;

use helmpert::catalog::{self, CatalogEntry};
use helmpert::perturb::{
    boundary_projection, boundary_residual, energy, first_order_wavefunction, residual_order_check,
    second_order_wavefunction, verify_inner_product,
};
use helmpert::shapes::{expand_with, DEFAULT_A_MAX, DEFAULT_QUAD_ORDER};
use helmpert::specfun::{
    bessel_zero, clebsch_gordan, spherical_harmonic, AngularMomentumTriple, BesselZeroKind,
};
use helmpert::spectrum::{compare_reference, ReferenceColumn};
use helmpert::{
    compute_spectrum, degeneracy_signature, BoundaryCondition, BoundaryShape, EnergyOptions, Flag,
    HarmonicExpansion, LevelTable, ModeIndex, SpectrumRequest,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BCS: [BoundaryCondition; 2] = [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann];
pub const TABLE_TOL: f64 = 2e-3;
pub const PERCENT_TOL: f64 = 0.01;

/// Outcome of one criterion.
#[derive(Debug, Default)]
pub struct Check {
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    pub count: usize,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.count += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn summary(&self) -> String {
        let mut s = format!("{} checks, {} failed", self.count, self.failures.len());
        for n in &self.notes {
            s += &format!("; {n}");
        }
        if !self.failures.is_empty() {
            s += &format!(": {}", self.failures.join(" | "));
        }
        s
    }
}

pub fn level_count(bc: BoundaryCondition) -> usize {
    match bc {
        BoundaryCondition::Dirichlet => 17,
        BoundaryCondition::Neumann => 16,
    }
}

pub fn catalog_expansion(entry: &CatalogEntry) -> HarmonicExpansion {
    expand_with(&entry.shape, &entry.expansion_options(DEFAULT_A_MAX, DEFAULT_QUAD_ORDER)).unwrap()
}

pub fn catalog_table(name: &str, bc: BoundaryCondition) -> LevelTable {
    let entry = catalog::lookup(name).unwrap();
    compute_spectrum(&SpectrumRequest::for_catalog(&entry, bc, level_count(bc))).unwrap()
}

/// Computed totals against the Ps column of the shipped tables.
pub fn table_reproduction(names: &[&str], bcs: &[BoundaryCondition]) -> Check {
    let mut c = Check::default();
    for name in names {
        for &bc in bcs {
            let t = catalog_table(name, bc);
            let reference = catalog::reference(name, bc).unwrap();
            let report = compare_reference(&t, &reference, ReferenceColumn::Ps).unwrap();
            c.expect(report.rows.len() == level_count(bc), || format!("{name} {bc}: row count"));
            for r in &report.rows {
                let d = (r.computed - r.reference).abs();
                c.expect(d <= TABLE_TOL, || format!("{name} {bc} ({},{},{}): {:.4} vs {}", r.n, r.l, r.m, r.computed, r.reference));
            }
        }
    }
    c
}

/// The marked rows of the pear tables carry a near-resonance flag.
pub fn resonance_flags() -> Check {
    let mut c = Check::default();
    for name in ["pear-a", "pear-b"] {
        for bc in BCS {
            let t = catalog_table(name, bc);
            let reference = catalog::reference(name, bc).unwrap();
            for rr in &reference.rows {
                let (n, l, m) = rr.label.unwrap();
                let row = t.rows.iter().find(|r| (r.n, r.l, r.m.unsigned_abs()) == (n, l, m)).unwrap();
                let near = row.flags.iter().any(|f| matches!(f, Flag::NearResonance { .. }));
                c.expect(near == rr.mark.is_some(), || {
                    format!("{name} {bc} row {} ({n},{l},{m}): mark {:?}, flags {:?}", rr.row, rr.mark, row.flags)
                });
            }
        }
    }
    c
}

/// Percent errors against the shipped Ns columns next to the printed ones.
pub fn percent_error_reproduction() -> Check {
    let mut c = Check::default();
    let mut worst = 0.0_f64;
    for name in catalog::NAMES {
        for bc in BCS {
            let t = catalog_table(name, bc);
            let reference = catalog::reference(name, bc).unwrap();
            let report = compare_reference(&t, &reference, ReferenceColumn::Ns).unwrap();
            for (r, rr) in report.rows.iter().zip(&reference.rows) {
                let (Some(printed), false) = (r.printed_error, r.flagged) else { continue };
                let d = (r.percent_error - printed).abs();
                worst = worst.max(d);
                c.expect(d <= PERCENT_TOL, || {
                    format!("{name} {bc} row {}: {:.4} vs printed {printed} (off {d:.4})", rr.row, r.percent_error)
                });
            }
        }
    }
    c.notes.push(format!("largest deviation {worst:.4} pp"));
    c
}

/// `j_l` by upward recurrence, used where `x > l`.
pub fn oracle_j(l: u32, x: f64) -> f64 {
    let (s, co) = x.sin_cos();
    let mut a = s / x;
    if l == 0 {
        return a;
    }
    let mut b = s / (x * x) - co / x;
    for k in 1..l {
        let next = (2 * k + 1) as f64 / x * b - a;
        a = b;
        b = next;
    }
    b
}

pub fn oracle_j_prime(l: u32, x: f64) -> f64 {
    if l == 0 {
        -oracle_j(1, x)
    } else {
        oracle_j(l - 1, x) - (l + 1) as f64 / x * oracle_j(l, x)
    }
}

/// Sphere: vanishing corrections and exact Bessel-zero energies.
pub fn sphere_exactness() -> Check {
    let mut c = Check::default();
    let beta10 = bessel_zero(0, 1, BesselZeroKind::FunctionZero).unwrap();
    c.expect(beta10 == PI, || format!("beta_1,0 = {beta10}"));
    let alpha10 = bessel_zero(0, 1, BesselZeroKind::DerivativeZero).unwrap();
    c.expect((alpha10 - 4.49341).abs() <= 5e-6, || format!("alpha_1,0 = {alpha10}"));

    let opts = EnergyOptions::default();
    for radius in [1.0, 1.7] {
        let shape = BoundaryShape::sphere(radius);
        let exp = expand_with(&shape, &Default::default()).unwrap();
        for bc in BCS {
            for n in 1..=3 {
                for l in 0..=4 {
                    for m in -(l as i32)..=l as i32 {
                        let mode = ModeIndex::new(n, l, m, bc).unwrap();
                        let e = energy(&mode, &exp, &opts).unwrap();
                        c.expect(e.e1.abs() < 1e-12 && e.e2.abs() < 1e-12, || format!("{mode}: E1 {} E2 {}", e.e1, e.e2));
                        let z = mode.zero().unwrap();
                        let residual = match bc {
                            BoundaryCondition::Dirichlet => oracle_j(l, z),
                            BoundaryCondition::Neumann => oracle_j_prime(l, z),
                        };
                        c.expect(residual.abs() < 1e-9, || format!("{mode}: zero {z} residual {residual}"));
                        let want = z * z / (radius * radius);
                        c.expect((e.e0 - want).abs() < 1e-9 * want, || format!("{mode}: E0 {} vs {want}", e.e0));
                    }
                }
            }
        }
        let t = compute_spectrum(&SpectrumRequest::new(shape, BoundaryCondition::Dirichlet, 9)).unwrap();
        c.expect(degeneracy_signature(&t) == vec![1, 3, 5], || format!("sphere signature {:?}", degeneracy_signature(&t)));
    }
    c
}

/// Clebsch-Gordan coefficient from the Racah sum, in floating point.
pub fn oracle_cg(j1: i32, j2: i32, m1: i32, m2: i32, j: i32, m: i32) -> f64 {
    if m1 + m2 != m || j < (j1 - j2).abs() || j > j1 + j2 || m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return 0.0;
    }
    let f = |n: i32| (1..=n).map(f64::from).product::<f64>();
    let pre = ((2 * j + 1) as f64 * f(j + j1 - j2) * f(j - j1 + j2) * f(j1 + j2 - j) / f(j1 + j2 + j + 1)).sqrt()
        * (f(j + m) * f(j - m) * f(j1 - m1) * f(j1 + m1) * f(j2 - m2) * f(j2 + m2)).sqrt();
    let mut s = 0.0;
    for k in 0..=(j1 + j2 - j) {
        let d = [j1 + j2 - j - k, j1 - m1 - k, j2 + m2 - k, j - j2 + m1 + k, j - j1 - m2 + k];
        if d.iter().any(|&v| v < 0) {
            continue;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += sign / (f(k) * d.iter().map(|&v| f(v)).product::<f64>());
    }
    pre * s
}

fn cg(j1: i32, j2: i32, m1: i32, m2: i32, j: i32, m: i32) -> f64 {
    match AngularMomentumTriple::new(j1 as u32, j2 as u32, j as u32, m1, m2, m) {
        Ok(t) => clebsch_gordan(&t),
        Err(_) => 0.0,
    }
}

pub fn clebsch_gordan_properties() -> Check {
    let mut c = Check::default();
    let jmax: i32 = 5;
    for j1 in 0..=jmax {
        for j2 in 0..=jmax {
            for j in 0..=(j1 + j2 + 1) {
                for m1 in -j1..=j1 {
                    for m2 in -j2..=j2 {
                        for m in [m1 + m2, m1 + m2 + 1] {
                            if m.abs() > j {
                                continue;
                            }
                            let v = cg(j1, j2, m1, m2, j, m);
                            let o = oracle_cg(j1, j2, m1, m2, j, m);
                            c.expect((v - o).abs() < 1e-10, || format!("<{j1} {m1} {j2} {m2}|{j} {m}> {v} vs {o}"));
                        }
                    }
                }
            }
            for ja in (j1 - j2).abs()..=(j1 + j2) {
                for jb in (j1 - j2).abs()..=(j1 + j2) {
                    for m in -ja.min(jb)..=ja.min(jb) {
                        let s: f64 = (-j1..=j1).map(|m1| cg(j1, j2, m1, m - m1, ja, m) * cg(j1, j2, m1, m - m1, jb, m)).sum();
                        let want = f64::from(u8::from(ja == jb));
                        c.expect((s - want).abs() < 1e-10, || format!("orthogonality {j1} {j2} {ja} {jb} {m}: {s}"));
                    }
                }
            }
        }
    }
    c
}

/// Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n.
pub fn oracle_gauss(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

pub fn harmonic_orthonormality() -> Check {
    let mut c = Check::default();
    let lmax = 8i32;
    let nodes = oracle_gauss(2 * lmax as usize + 2);
    let nphi = 2 * lmax as usize + 2;
    let grid: Vec<(f64, f64, f64)> = nodes
        .iter()
        .flat_map(|&(x, w)| {
            (0..nphi).map(move |k| (x.acos(), 2.0 * PI * k as f64 / nphi as f64, w * 2.0 * PI / nphi as f64))
        })
        .collect();
    let modes: Vec<(i32, i32)> = (0..=lmax).flat_map(|l| (-l..=l).map(move |m| (l, m))).collect();
    let values: Vec<Vec<_>> = modes
        .iter()
        .map(|&(l, m)| grid.iter().map(|&(t, p, _)| spherical_harmonic(l as u32, m, t, p).unwrap()).collect())
        .collect();
    for (i, a) in modes.iter().enumerate() {
        for (j, b) in modes.iter().enumerate().skip(i) {
            let s: num_complex::Complex64 =
                (0..grid.len()).map(|k| values[i][k] * values[j][k].conj() * grid[k].2).sum();
            let want = f64::from(u8::from(i == j));
            c.expect((s - want).norm() < 1e-10, || format!("<Y{a:?}|Y{b:?}> = {s}"));
        }
    }
    c
}

pub fn zero_interlacing() -> Check {
    let mut c = Check::default();
    use BesselZeroKind::{DerivativeZero, FunctionZero};
    let z = |l, n, k| bessel_zero(l, n, k).unwrap();
    for l in 0..=12u32 {
        for n in 1..=6u32 {
            let b = z(l, n, FunctionZero);
            c.expect(oracle_j(l, b).abs() < 1e-9, || format!("j_{l}(beta_{n},{l}) != 0"));
            c.expect(b < z(l + 1, n, FunctionZero) && z(l + 1, n, FunctionZero) < z(l, n + 1, FunctionZero), || {
                format!("beta interlacing at n={n} l={l}")
            });
            let a = z(l, n, DerivativeZero);
            c.expect(oracle_j_prime(l, a).abs() < 1e-9, || format!("j_{l}'(alpha_{n},{l}) != 0"));
            c.expect(a < z(l, n + 1, DerivativeZero), || format!("alpha ordering at n={n} l={l}"));
            if l >= 1 {
                c.expect(a < z(l + 1, n, DerivativeZero) && z(l + 1, n, DerivativeZero) < z(l, n + 1, DerivativeZero), || {
                    format!("alpha interlacing at n={n} l={l}")
                });
                c.expect(a < b, || format!("alpha_{n},{l} >= beta_{n},{l}"));
            }
        }
    }
    c
}

fn low_modes(bc: BoundaryCondition) -> Vec<ModeIndex> {
    let mut v = Vec::new();
    for n in 1..=2 {
        for l in 0..=2u32 {
            for m in -(l as i32)..=l as i32 {
                v.push(ModeIndex::new(n, l, m, bc).unwrap());
            }
        }
    }
    v
}

pub fn plus_minus_m() -> Check {
    let mut c = Check::default();
    let opts = EnergyOptions::default();
    for name in catalog::NAMES {
        let exp = catalog_expansion(&catalog::lookup(name).unwrap());
        for bc in BCS {
            for n in 1..=2 {
                for l in 1..=4u32 {
                    for m in 1..=l as i32 {
                        let p = energy(&ModeIndex::new(n, l, m, bc).unwrap(), &exp, &opts).unwrap();
                        let q = energy(&ModeIndex::new(n, l, -m, bc).unwrap(), &exp, &opts).unwrap();
                        let same = [(p.e0, q.e0), (p.e1, q.e1), (p.e2, q.e2), (p.total, q.total)]
                            .iter()
                            .all(|(a, b)| a.to_bits() == b.to_bits());
                        c.expect(same, || format!("{name} {bc} ({n},{l},+-{m})"));
                    }
                }
            }
        }
    }
    c
}

pub fn scaling() -> Check {
    let mut c = Check::default();
    let opts = EnergyOptions::default();
    for name in ["superegg-1.7", "oblate", "pear-b"] {
        let exp = catalog_expansion(&catalog::lookup(name).unwrap());
        for t in [0.5, 2.0, -1.3] {
            let scaled = exp.scaled(t);
            for bc in BCS {
                for mode in low_modes(bc) {
                    let a = energy(&mode, &exp, &opts).unwrap();
                    let b = energy(&mode, &scaled, &opts).unwrap();
                    let rel = |x: f64, y: f64| (x - y).abs() <= 1e-10 * y.abs().max(1e-300) || (x - y).abs() < 1e-14;
                    c.expect(rel(b.e1, t * a.e1), || format!("{name} t={t} {mode}: E1 {} vs {}", b.e1, t * a.e1));
                    c.expect(rel(b.e2, t * t * a.e2), || format!("{name} t={t} {mode}: E2 {} vs {}", b.e2, t * t * a.e2));
                }
            }
        }
    }
    c
}

pub fn route_equivalence() -> Check {
    let mut c = Check::default();
    let opts = EnergyOptions::default();
    for name in catalog::NAMES {
        let exp = catalog_expansion(&catalog::lookup(name).unwrap());
        for bc in BCS {
            for mode in low_modes(bc).into_iter().filter(|m| m.m >= 0) {
                for order in 1..=2 {
                    let v = verify_inner_product(&mode, &exp, order, &opts).unwrap();
                    let d = (v.inner_product - v.closed_form).abs();
                    c.expect(d <= 1e-6 * v.closed_form.abs() || d < 1e-12, || {
                        format!("{name} {mode} order {order}: {} vs {}", v.inner_product, v.closed_form)
                    });
                }
            }
        }
    }
    c
}

fn interior_points(r0: f64, rng: &mut ChaCha8Rng) -> Vec<(f64, f64, f64)> {
    (0..20)
        .map(|_| (r0 * rng.gen_range(0.05..0.95), rng.gen_range(0.05..PI - 0.05), rng.gen_range(0.0..2.0 * PI)))
        .collect()
}

/// Boundary residuals of every order and the order-by-order equations at random interior points.
pub fn wavefunction_residuals() -> (Check, Check) {
    let (mut boundary, mut interior) = (Check::default(), Check::default());
    let opts = EnergyOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for name in catalog::NAMES {
        let exp = catalog_expansion(&catalog::lookup(name).unwrap());
        for bc in BCS {
            for mode in low_modes(bc).into_iter().filter(|m| m.m >= 0) {
                let w = match second_order_wavefunction(&mode, &exp, &opts) {
                    Ok(w) => w,
                    Err(_) => {
                        boundary.notes.push(format!("{name} {mode}: no unit-norm second order, checked to first"));
                        first_order_wavefunction(&mode, &exp, &opts).unwrap()
                    }
                };
                for order in 0..=w.order {
                    let r = if order == 2 && w.is_partial(2) {
                        boundary_projection(&w, 2).unwrap()
                    } else {
                        boundary_residual(&w, order, 48).unwrap()
                    };
                    boundary.expect(r < 1e-7, || format!("{name} {mode} order {order}: {r:.2e}"));
                }
                let rep = residual_order_check(&w, &interior_points(w.r0, &mut rng)).unwrap();
                for (i, r) in rep.max_residual.iter().enumerate() {
                    interior.expect(*r < 1e-6, || format!("{name} {mode} order {i}: {r:.2e}"));
                }
            }
        }
    }
    (boundary, interior)
}

/// Splitting of degenerate multiplets and the signature relations between shapes.
pub fn degeneracy_signatures() -> Check {
    let mut c = Check::default();
    let opts = EnergyOptions::default();
    for name in catalog::NAMES {
        let exp = catalog_expansion(&catalog::lookup(name).unwrap());
        for bc in BCS {
            for l in 1..=4u32 {
                let mut totals: Vec<f64> = (-(l as i32)..=l as i32)
                    .map(|m| energy(&ModeIndex::new(1, l, m, bc).unwrap(), &exp, &opts).unwrap().total)
                    .collect();
                totals.sort_by(f64::total_cmp);
                totals.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs());
                c.expect(totals.len() == l as usize + 1, || format!("{name} {bc} l={l}: {} distinct", totals.len()));
            }
        }
    }
    let sig = |name: &str, bc| degeneracy_signature(&catalog_table(name, bc));
    let d = BoundaryCondition::Dirichlet;
    let nb = BoundaryCondition::Neumann;
    c.expect(sig("superegg-2.5", d) == sig("rounded-cylinder", d), || {
        format!("superegg-2.5 {:?} vs rounded cylinder {:?}", sig("superegg-2.5", d), sig("rounded-cylinder", d))
    });
    c.expect(sig("prolate", d) == sig("stadium", d), || {
        format!("prolate {:?} vs stadium {:?} (DBC)", sig("prolate", d), sig("stadium", d))
    });
    c.expect(sig("prolate", nb) != sig("stadium", nb), || format!("prolate and stadium NBC both {:?}", sig("stadium", nb)));
    c
}
