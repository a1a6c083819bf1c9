//! Prints one line per acceptance criterion.
//!
//! Exits non-zero when a criterion fails that is not listed in `KNOWN_RED`.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use helmpert::BoundaryCondition::{Dirichlet, Neumann};

/// Criteria that cannot be met from the shipped data (see the project notes).
const KNOWN_RED: [u32; 1] = [5];

fn merge(parts: Vec<(&str, Check)>) -> Check {
    let mut out = Check::default();
    for (label, c) in parts {
        out.count += c.count;
        out.failures.extend(c.failures.into_iter().map(|f| format!("{label}: {f}")));
        out.notes.extend(c.notes.into_iter().map(|n| format!("{label}: {n}")));
    }
    out
}

fn main() -> ExitCode {
    let first_group = ["superegg-1.7", "superegg-2.5", "stadium"];
    let second_group = ["oblate", "prolate", "rounded-cylinder"];
    let criteria: Vec<(u32, &str, Box<dyn Fn() -> Check>)> = vec![
        (1, "superegg and stadium DBC totals within 2e-3 of Ps", Box::new(move || table_reproduction(&first_group, &[Dirichlet]))),
        (2, "superegg and stadium NBC totals within 2e-3 of Ps", Box::new(move || table_reproduction(&first_group, &[Neumann]))),
        (3, "spheroid and rounded-cylinder totals within 2e-3 of Ps", Box::new(move || table_reproduction(&second_group, &BCS))),
        (
            4,
            "pear totals within 2e-3 of Ps, marked rows flagged",
            Box::new(|| {
                merge(vec![
                    ("totals", table_reproduction(&["pear-a", "pear-b"], &BCS)),
                    ("flags", resonance_flags()),
                ])
            }),
        ),
        (5, "printed percent errors within 0.01 pp", Box::new(percent_error_reproduction)),
        (6, "sphere exactness", Box::new(sphere_exactness)),
        (
            7,
            "property suite",
            Box::new(|| {
                let (boundary, interior) = wavefunction_residuals();
                merge(vec![
                    ("clebsch-gordan", clebsch_gordan_properties()),
                    ("harmonics", harmonic_orthonormality()),
                    ("zeros", zero_interlacing()),
                    ("+-m", plus_minus_m()),
                    ("scaling", scaling()),
                    ("routes", route_equivalence()),
                    ("boundary", boundary),
                    ("interior", interior),
                ])
            }),
        ),
        (8, "degeneracy signatures", Box::new(degeneracy_signatures)),
    ];

    let mut unexpected = false;
    for (id, title, run) in criteria {
        let start = Instant::now();
        let c = run();
        let status = if c.passed() { "PASS" } else { "FAIL" };
        let known = !c.passed() && KNOWN_RED.contains(&id);
        unexpected |= !c.passed() && !known;
        println!(
            "criterion {id}: {status} {title} ({}, {:.1}s){}",
            c.summary(),
            start.elapsed().as_secs_f64(),
            if known { " [known red]" } else { "" }
        );
    }
    if unexpected {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
