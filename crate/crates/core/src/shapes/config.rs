use std::collections::BTreeMap;
use std::path::Path;

use super::{BoundaryShape, CustomRadial};
use crate::error::{Error, Result};

/// Shape parameters as read from the command line or a config file.
pub type ShapeParams = BTreeMap<String, String>;

fn number(params: &ShapeParams, keys: &[&str], default: Option<f64>) -> Result<f64> {
    for k in keys {
        if let Some(v) = params.get(*k) {
            return v
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("parameter {k}: '{v}' is not a number")));
        }
    }
    default.ok_or_else(|| Error::Parse(format!("missing shape parameter {}", keys[0])))
}

fn list(text: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("'{s}' is not a number")))
        })
        .collect()
}

fn check_known(kind: &str, params: &ShapeParams, known: &[&str]) -> Result<()> {
    for k in params.keys() {
        if !known.contains(&k.as_str()) {
            return Err(Error::Parse(format!(
                "unknown parameter '{k}' for shape '{kind}' (expected one of: {})",
                known.join(", ")
            )));
        }
    }
    Ok(())
}

/// Build a shape from its kind name and parameters.
///
/// | kind | parameters |
/// |---|---|
/// | `sphere` | `radius` (default 1) |
/// | `superegg` | `exponent` (alias `n`) |
/// | `spheroid` | `ra`, `rc` |
/// | `stadium` | `R`, `d` |
/// | `rounded-cylinder` | `R`, `d` |
/// | `pear` | `c2`, `c3`, `c4`, `r0` (default 1) |
/// | `custom` | `r0` + `coefficients` (list of C_1, C_2, ...), or `samples` (file of `theta r` rows) |
pub fn parse_shape(kind: &str, params: &ShapeParams) -> Result<BoundaryShape> {
    let shape = match kind {
        "sphere" => {
            check_known(kind, params, &["radius"])?;
            BoundaryShape::sphere(number(params, &["radius"], Some(1.0))?)
        }
        "superegg" => {
            check_known(kind, params, &["exponent", "n"])?;
            BoundaryShape::Superegg {
                exponent: number(params, &["exponent", "n"], None)?,
            }
        }
        "spheroid" => {
            check_known(kind, params, &["ra", "rc"])?;
            BoundaryShape::Spheroid {
                r_a: number(params, &["ra"], None)?,
                r_c: number(params, &["rc"], None)?,
            }
        }
        "stadium" => {
            check_known(kind, params, &["R", "d"])?;
            BoundaryShape::StadiumOfRevolution {
                r: number(params, &["R"], None)?,
                d: number(params, &["d"], None)?,
            }
        }
        "rounded-cylinder" => {
            check_known(kind, params, &["R", "d"])?;
            BoundaryShape::RoundedCylinder {
                r: number(params, &["R"], None)?,
                d: number(params, &["d"], None)?,
            }
        }
        "pear" => {
            check_known(kind, params, &["c2", "c3", "c4", "r0"])?;
            BoundaryShape::Pear {
                c2: number(params, &["c2"], None)?,
                c3: number(params, &["c3"], None)?,
                c4: number(params, &["c4"], None)?,
                r0: number(params, &["r0"], Some(1.0))?,
            }
        }
        "custom" => {
            check_known(kind, params, &["r0", "coefficients", "samples"])?;
            match (params.get("coefficients"), params.get("samples")) {
                (Some(c), None) => BoundaryShape::CustomRadial(CustomRadial::Coefficients {
                    r0: number(params, &["r0"], Some(1.0))?,
                    coeffs: list(c)?,
                }),
                (None, Some(path)) => read_samples(Path::new(path))?,
                _ => {
                    return Err(Error::Parse(
                        "custom shape needs exactly one of 'coefficients' or 'samples'".into(),
                    ))
                }
            }
        }
        other => return Err(Error::Parse(format!("unknown shape kind '{other}'"))),
    };
    shape.validate()?;
    Ok(shape)
}

/// Flat `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", i + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Parse(format!("config line {}: empty key", i + 1)));
        }
        if out.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Parse(format!("config line {}: duplicate key '{k}'", i + 1)));
        }
    }
    Ok(out)
}

/// Shape from config text: `shape = <kind>` plus that kind's parameters.
pub fn shape_from_config(text: &str) -> Result<BoundaryShape> {
    let mut params = parse_config(text)?;
    let kind = params
        .remove("shape")
        .ok_or_else(|| Error::Parse("config has no 'shape' key".into()))?;
    parse_shape(&kind, &params)
}

/// Two whitespace- or comma-separated columns `theta r`; `#` starts a comment.
fn read_samples(path: &Path) -> Result<BoundaryShape> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut theta = Vec::new();
    let mut radius = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v = list(line).map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), i + 1)))?;
        if v.len() != 2 {
            return Err(Error::Parse(format!("{}:{}: expected two columns", path.display(), i + 1)));
        }
        theta.push(v[0]);
        radius.push(v[1]);
    }
    Ok(BoundaryShape::CustomRadial(CustomRadial::Samples { theta, radius }))
}
