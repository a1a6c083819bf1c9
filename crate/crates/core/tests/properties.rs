mod common;

use common::*;
use helmpert::perturb::energy;
use helmpert::shapes::{expand_with, reconstruction_residual};
use helmpert::specfun::{clebsch_gordan, spherical_bessel_j, AngularMomentumTriple};
use helmpert::{BoundaryCondition, BoundaryShape, EnergyOptions, HarmonicExpansion, ModeIndex};
use proptest::prelude::*;

fn assert_passed(c: Check) {
    assert!(c.passed(), "{}", c.summary());
}

#[test]
fn clebsch_gordan_against_racah() {
    assert_passed(clebsch_gordan_properties());
}

#[test]
fn harmonics_orthonormal() {
    assert_passed(harmonic_orthonormality());
}

#[test]
fn zeros_interlace() {
    assert_passed(zero_interlacing());
}

#[test]
fn plus_minus_m_bit_exact() {
    assert_passed(plus_minus_m());
}

#[test]
fn corrections_scale_with_deformation() {
    assert_passed(scaling());
}

#[test]
fn inner_product_route_matches() {
    assert_passed(route_equivalence());
}

#[test]
fn residuals() {
    let (boundary, interior) = wavefunction_residuals();
    assert_passed(boundary);
    assert_passed(interior);
}

/// First-order shifts of a multiplet sum to zero.
#[test]
fn first_order_multiplet_sum() {
    let opts = EnergyOptions::default();
    for name in helmpert::catalog::NAMES {
        let exp = catalog_expansion(&helmpert::catalog::lookup(name).unwrap());
        if exp.axial(0).abs() > 1e-12 {
            continue;
        }
        for bc in BCS {
            for l in 1..=4u32 {
                let s: f64 = (-(l as i32)..=l as i32)
                    .map(|m| energy(&ModeIndex::new(1, l, m, bc).unwrap(), &exp, &opts).unwrap().e1)
                    .sum();
                assert!(s.abs() < 1e-10, "{name} {bc} l={l}: {s}");
            }
        }
    }
}

fn pear(c2: f64, c3: f64, c4: f64) -> BoundaryShape {
    BoundaryShape::Pear { c2, c3, c4, r0: 1.0 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cg_selection_rules(j1 in 0u32..8, j2 in 0u32..8, j in 0u32..16, m1 in -8i32..=8, m2 in -8i32..=8, m in -16i32..=16) {
        prop_assume!(m1.unsigned_abs() <= j1 && m2.unsigned_abs() <= j2 && m.unsigned_abs() <= j);
        if let Ok(t) = AngularMomentumTriple::new(j1, j2, j, m1, m2, m) {
            let v = clebsch_gordan(&t);
            let o = oracle_cg(j1 as i32, j2 as i32, m1, m2, j as i32, m);
            prop_assert!((v - o).abs() < 1e-10);
            if m1 + m2 != m || j > j1 + j2 || j < j1.abs_diff(j2) {
                prop_assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn bessel_matches_recurrence(l in 0u32..10, x in 12.0f64..60.0) {
        let v = spherical_bessel_j(l, x).unwrap();
        prop_assert!((v - oracle_j(l, x)).abs() < 1e-12);
    }

    #[test]
    fn pear_coefficients_verbatim(c2 in -0.2f64..0.2, c3 in -0.2f64..0.2, c4 in -0.1f64..0.1) {
        let shape = pear(c2, c3, c4);
        let exp = expand_with(&shape, &Default::default()).unwrap();
        prop_assert!((exp.axial(2) - c2).abs() < 1e-12);
        prop_assert!((exp.axial(3) - c3).abs() < 1e-12);
        prop_assert!((exp.axial(4) - c4).abs() < 1e-12);
        prop_assert!(reconstruction_residual(&exp, &shape) < 1e-12);
    }

    #[test]
    fn small_deformation_is_perturbative(c2 in -0.05f64..0.05, c3 in -0.05f64..0.05, n in 1u32..3, l in 0u32..4) {
        let exp = HarmonicExpansion::axisymmetric(1.0, &[0.0, 0.0, c2, c3]).unwrap();
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            for m in 0..=l as i32 {
                let mode = ModeIndex::new(n, l, m, bc).unwrap();
                let e = energy(&mode, &exp, &EnergyOptions::default()).unwrap();
                let size = c2.abs() + c3.abs();
                prop_assert!(e.e1.abs() <= 40.0 * size * e.e0);
                prop_assert!((e.total - (e.e0 + e.e1 + e.e2)).abs() < 1e-12 * e.total.abs());
                prop_assert!(e.total > 0.0);
            }
        }
    }

    #[test]
    fn spectrum_sorted_and_grouped(c2 in -0.1f64..0.1, c4 in -0.05f64..0.05) {
        use helmpert::{compute_spectrum, SpectrumRequest};
        let req = SpectrumRequest::new(pear(c2, 0.0, c4), BoundaryCondition::Dirichlet, 12);
        let t = compute_spectrum(&req).unwrap();
        prop_assert_eq!(t.rows.len(), 12);
        for w in t.rows.windows(2) {
            prop_assert!(w[0].total <= w[1].total);
            prop_assert!(w[1].group >= w[0].group);
        }
        for r in t.rows.iter().filter(|r| r.m != 0) {
            let twin = t.rows.iter().find(|s| (s.n, s.l, s.m) == (r.n, r.l, -r.m));
            if let Some(s) = twin {
                prop_assert_eq!(s.total.to_bits(), r.total.to_bits());
                prop_assert_eq!(s.group, r.group);
            }
        }
    }
}
