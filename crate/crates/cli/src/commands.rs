use std::f64::consts::PI;

use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use helmpert::format::{fixed3, pretty_table, round15, sig15};
use helmpert::perturb::{
    boundary_projection, boundary_residual, boundary_residual_at, energy, first_order_wavefunction,
    residual_order_check, second_order_wavefunction, verify_inner_product,
};
use helmpert::shapes::{expand_with, reconstruction_residual};
use helmpert::spectrum::{compare_reference, spectrum_from_expansion, ReferenceTable};
use helmpert::{BoundaryCondition, HarmonicExpansion, LevelTable, SpectrumRequest};

use crate::config::{Format, RunConfig};

/// Successful run; `code` is the process exit status.
pub struct Outcome {
    pub text: String,
    pub code: u8,
    pub note: Option<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, code: 0, note: None }
    }
}

pub const EXIT_GATE: u8 = 4;
pub const EXIT_PARTIAL: u8 = 3;

fn json_text<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn csv_text<R, I>(header: &[&str], rows: R) -> Result<String>
where
    R: IntoIterator<Item = I>,
    I: IntoIterator,
    I::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn expansion(cfg: &RunConfig) -> Result<HarmonicExpansion> {
    Ok(expand_with(&cfg.shape, &cfg.expansion_options())?)
}

fn default_levels(bc: BoundaryCondition) -> usize {
    match bc {
        BoundaryCondition::Dirichlet => 17,
        BoundaryCondition::Neumann => 16,
    }
}

fn level_table(cfg: &RunConfig, exp: &HarmonicExpansion, levels: usize) -> Result<LevelTable> {
    let mut req = SpectrumRequest::new(cfg.shape.clone(), cfg.bc, levels);
    req.a_max = cfg.a_max;
    req.quad_order = cfg.quad;
    req.n_max = cfg.n_max;
    req.l_max = cfg.l_max;
    req.reference_radius = cfg.expansion_options().reference_radius;
    req.options = cfg.options;
    let mut table = spectrum_from_expansion(&req, exp)?;
    if let Some(c) = &cfg.catalog {
        table.shape = c.description.to_string();
    }
    Ok(table)
}

/// Axial coefficients for each truncation order in `sweep` (default: the configured one).
pub fn coeffs(cfg: &RunConfig, sweep: &[usize]) -> Result<Outcome> {
    let orders = if sweep.is_empty() { vec![cfg.a_max] } else { sweep.to_vec() };
    let mut runs = Vec::with_capacity(orders.len());
    for &a_max in &orders {
        let mut opts = cfg.expansion_options();
        opts.a_max = a_max;
        let exp = expand_with(&cfg.shape, &opts)?;
        if !exp.is_axisymmetric() {
            bail!("coeffs lists axisymmetric expansions only");
        }
        let residual = reconstruction_residual(&exp, &cfg.shape);
        runs.push((exp, residual));
    }
    let warned: Vec<String> = runs
        .iter()
        .filter(|(e, _)| e.truncation_warning())
        .map(|(e, _)| e.a_max().to_string())
        .collect();
    let note = (!warned.is_empty())
        .then(|| format!("warning: coefficients have not decayed below 1e-6 at a_max = {}", warned.join(", ")));
    let text = match cfg.format {
        Format::Csv => {
            let mut s = String::from("a_max,a,C_a,abs_C_a,R0,residual\n");
            for (exp, residual) in &runs {
                for (i, v) in exp.axial_coefficients().iter().enumerate() {
                    s += &format!(
                        "{},{},{},{},{},{}\n",
                        exp.a_max(),
                        i + 1,
                        sig15(*v),
                        sig15(v.abs()),
                        sig15(exp.r0()),
                        sig15(*residual)
                    );
                }
            }
            s
        }
        Format::Json => json_text(&json!({
            "shape": cfg.shape.describe(),
            "expansions": runs.iter().map(|(exp, residual)| json!({
                "a_max": exp.a_max(),
                "R0": round15(exp.r0()),
                "residual": round15(*residual),
                "truncation_warning": exp.truncation_warning(),
                "coefficients": exp.axial_coefficients().iter().enumerate()
                    .map(|(i, v)| json!({"a": i + 1, "C_a": round15(*v)})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }))?,
        Format::Pretty => {
            let mut s = format!("# {}\n", cfg.shape.describe());
            for (exp, residual) in &runs {
                let rows: Vec<Vec<String>> = exp
                    .axial_coefficients()
                    .iter()
                    .enumerate()
                    .map(|(i, v)| vec![(i + 1).to_string(), format!("{v:.6e}"), format!("{:.3e}", v.abs())])
                    .collect();
                s += &format!(
                    "# a_max = {}, R0 = {}, reconstruction residual = {:.3e}\n{}",
                    exp.a_max(),
                    sig15(exp.r0()),
                    residual,
                    pretty_table(&["a", "C_a", "|C_a|"], &rows)
                );
            }
            s
        }
    };
    Ok(Outcome { text, code: 0, note })
}

pub fn spectrum(cfg: &RunConfig) -> Result<Outcome> {
    let exp = expansion(cfg)?;
    let table = level_table(cfg, &exp, cfg.levels.unwrap_or_else(|| default_levels(cfg.bc)))?;
    let flagged = table.rows.iter().filter(|r| r.is_flagged()).count();
    let text = match cfg.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json()? + "\n",
        Format::Pretty => table.to_pretty(),
    };
    let note = (flagged > 0).then(|| format!("{flagged} level(s) flagged as unreliable"));
    Ok(Outcome { text, code: 0, note })
}

pub fn compare(cfg: &RunConfig) -> Result<Outcome> {
    let (text, source) = cfg.reference_text()?;
    let reference = ReferenceTable::parse_csv(&text)?;
    let exp = expansion(cfg)?;
    let table = level_table(cfg, &exp, cfg.levels.unwrap_or(reference.rows.len()))?;
    let report = compare_reference(&table, &reference, cfg.column)?;
    let pass = report.passes(cfg.gate);
    let s = &report.summary;
    let text = match cfg.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json()? + "\n",
        Format::Pretty => format!("# {} ({}) against {source}\n{}", table.shape, cfg.bc, report.to_pretty()),
    };
    let note = format!(
        "max unflagged error {}% (gate {}%): {}; {} flagged row(s) excluded",
        fixed3(s.max_percent_error),
        cfg.gate,
        if pass { "pass" } else { "FAIL" },
        s.flagged
    );
    Ok(Outcome {
        text,
        code: if pass { 0 } else { EXIT_GATE },
        note: Some(note),
    })
}

pub fn wavefunction(cfg: &RunConfig) -> Result<Outcome> {
    let mode = cfg.mode_index()?;
    let exp = expansion(cfg)?;
    let w = if cfg.order == 2 {
        second_order_wavefunction(&mode, &exp, &cfg.options)?
    } else {
        first_order_wavefunction(&mode, &exp, &cfg.options)?
    };
    let partial = w.is_partial(cfg.order);
    let (nr, nt, np) = cfg.grid;
    let mut rows = Vec::with_capacity(nr * nt * np);
    for ir in 1..=nr {
        let r = w.r0 * ir as f64 / nr as f64;
        for it in 0..nt {
            let theta = if nt == 1 { PI / 2.0 } else { PI * it as f64 / (nt - 1) as f64 };
            for ip in 0..np {
                let phi = 2.0 * PI * ip as f64 / np as f64;
                let v = w.evaluate(r, theta, phi, cfg.order)?;
                let bc = if ir == nr && !partial && theta > 0.0 && theta < PI {
                    Some((0..=cfg.order).map(|i| boundary_residual_at(&w, i, theta, phi)).try_fold(0.0_f64, |a, b| b.map(|b| a.max(b)))?)
                } else {
                    None
                };
                rows.push((r, theta, phi, v, bc));
            }
        }
    }
    let header = ["r", "theta", "phi", "re", "im", "bc_residual"];
    let text = match cfg.format {
        Format::Csv | Format::Pretty => {
            let num = |x: f64| if cfg.format == Format::Csv { sig15(x) } else { format!("{x:.6}") };
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|(r, t, p, v, bc)| {
                    vec![
                        num(*r),
                        num(*t),
                        num(*p),
                        num(v.re),
                        num(v.im),
                        bc.map(|b| format!("{b:.3e}")).unwrap_or_default(),
                    ]
                })
                .collect();
            if cfg.format == Format::Csv {
                csv_text(&header, &cells)?
            } else {
                format!("# {} order {}\n{}", mode, cfg.order, pretty_table(&header, &cells))
            }
        }
        Format::Json => json_text(&json!({
            "mode": mode,
            "order": cfg.order,
            "partial": partial,
            "samples": rows.iter().map(|(r, t, p, v, bc)| json!({
                "r": round15(*r), "theta": round15(*t), "phi": round15(*p),
                "re": round15(v.re), "im": round15(v.im), "bc_residual": bc.map(round15),
            })).collect::<Vec<_>>(),
        }))?,
    };
    if partial {
        return Ok(Outcome {
            text,
            code: EXIT_PARTIAL,
            note: Some(format!(
                "warning: second-order wavefunction of degenerate mode {mode} is partial (l-multiplet part omitted)"
            )),
        });
    }
    Ok(Outcome::ok(text))
}

#[derive(Serialize)]
struct Diagnostics {
    mode: String,
    e0: f64,
    e1: f64,
    e2: f64,
    total: f64,
    flags: Vec<String>,
    route_delta: Vec<f64>,
    order_residual: Vec<f64>,
    boundary_residual: Vec<f64>,
    boundary_projection_order2: Option<f64>,
    wavefunction_order: u8,
}

pub fn diagnostics(cfg: &RunConfig) -> Result<Outcome> {
    let mode = cfg.mode_index()?;
    let exp = expansion(cfg)?;
    let e = energy(&mode, &exp, &cfg.options)?;
    let route_delta = (1..=2)
        .map(|o| verify_inner_product(&mode, &exp, o, &cfg.options).map(|c| (c.inner_product - c.closed_form).abs()))
        .collect::<helmpert::Result<Vec<_>>>()?;
    // near-resonant modes may admit no unit-norm second-order state
    let (w, fallback) = match second_order_wavefunction(&mode, &exp, &cfg.options) {
        Ok(w) => (w, None),
        Err(err) => (first_order_wavefunction(&mode, &exp, &cfg.options)?, Some(err.to_string())),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let points: Vec<(f64, f64, f64)> = (0..20)
        .map(|_| {
            (
                w.r0 * rng.gen_range(0.05..0.95),
                rng.gen_range(0.05..PI - 0.05),
                rng.gen_range(0.0..2.0 * PI),
            )
        })
        .collect();
    let order_residual = residual_order_check(&w, &points)?.max_residual;
    let top = if w.order < 2 || w.is_partial(2) { 1 } else { 2 };
    let boundary = (0..=top)
        .map(|o| boundary_residual(&w, o, 64))
        .collect::<helmpert::Result<Vec<_>>>()?;
    let projection = if w.order == 2 && w.is_partial(2) { Some(boundary_projection(&w, 2)?) } else { None };
    let d = Diagnostics {
        mode: mode.to_string(),
        e0: round15(e.e0),
        e1: round15(e.e1),
        e2: round15(e.e2),
        total: round15(e.total),
        flags: e.flags.iter().map(|f| f.to_string()).collect(),
        route_delta: route_delta.iter().copied().map(round15).collect(),
        order_residual: order_residual.iter().copied().map(round15).collect(),
        boundary_residual: boundary.iter().copied().map(round15).collect(),
        boundary_projection_order2: projection.map(round15),
        wavefunction_order: w.order,
    };
    let mut items: Vec<(String, String)> = vec![
        ("mode".into(), d.mode.clone()),
        ("E0".into(), sig15(e.e0)),
        ("E1".into(), sig15(e.e1)),
        ("E2".into(), sig15(e.e2)),
        ("total".into(), sig15(e.total)),
        ("flags".into(), d.flags.join(";")),
        ("wavefunction_order".into(), w.order.to_string()),
    ];
    for (i, v) in route_delta.iter().enumerate() {
        items.push((format!("route_delta_{}", i + 1), format!("{v:.3e}")));
    }
    for (i, v) in order_residual.iter().enumerate() {
        items.push((format!("order_residual_{i}"), format!("{v:.3e}")));
    }
    for (i, v) in boundary.iter().enumerate() {
        items.push((format!("boundary_residual_{i}"), format!("{v:.3e}")));
    }
    if let Some(p) = projection {
        items.push(("boundary_projection_2".into(), format!("{p:.3e}")));
    }
    let text = match cfg.format {
        Format::Json => json_text(&d)?,
        Format::Csv => csv_text(&["quantity", "value"], items.iter().map(|(k, v)| [k.as_str(), v.as_str()]))?,
        Format::Pretty => {
            let w = items.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            items.iter().map(|(k, v)| format!("{k:<w$}  {v}\n")).collect()
        }
    };
    let mut notes = Vec::new();
    if e.is_flagged() {
        notes.push(format!("level {mode} is flagged: {}", d.flags.join(", ")));
    }
    if let Some(err) = fallback {
        notes.push(format!("second-order wavefunction unavailable ({err}); residuals are first order"));
    }
    let note = (!notes.is_empty()).then(|| notes.join("\n"));
    Ok(Outcome { text, code: 0, note })
}
