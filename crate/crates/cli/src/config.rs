//! Run configuration: command-line flags over config-file values over defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use helmpert::catalog;
use helmpert::shapes::{parse_config, parse_shape, ExpansionOptions, ReferenceRadius};
use helmpert::spectrum::ReferenceColumn;
use helmpert::{BoundaryCondition, BoundaryShape, EnergyOptions, ModeIndex};

pub const DATA_DIR_ENV: &str = "HELMPERT_DATA_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Pretty,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        <Format as ValueEnum>::from_str(s, true).map_err(|e| anyhow!(e))
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Shape kind (sphere, superegg, spheroid, stadium, rounded-cylinder, pear, custom)
    /// or a catalog name (superegg-1.7, superegg-2.5, stadium, oblate, prolate,
    /// rounded-cylinder, pear-a, pear-b).
    #[arg(long, global = true)]
    pub shape: Option<String>,
    /// Shape parameter, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE", global = true)]
    pub params: Vec<String>,
    #[arg(long, global = true, value_name = "dirichlet|neumann")]
    pub bc: Option<String>,
    /// Number of levels.
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    /// Harmonic truncation order.
    #[arg(long, global = true)]
    pub amax: Option<usize>,
    /// Starting quadrature order.
    #[arg(long, global = true)]
    pub quad: Option<usize>,
    #[arg(long, global = true)]
    pub nmax: Option<u32>,
    #[arg(long, global = true)]
    pub lmax: Option<u32>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long = "resonance-threshold", global = true)]
    pub resonance_threshold: Option<f64>,
    /// Flat key = value file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Options of the compare, wavefunction and diagnostics subcommands.
#[derive(Debug, Clone, Default)]
pub struct Extra {
    pub reference: Option<PathBuf>,
    pub gate: Option<f64>,
    pub column: Option<String>,
    pub mode: Option<String>,
    pub order: Option<u8>,
    pub grid: Option<String>,
}

const RUN_KEYS: [&str; 17] = [
    "shape",
    "bc",
    "levels",
    "amax",
    "quad",
    "nmax",
    "lmax",
    "format",
    "out",
    "resonance-threshold",
    "reference",
    "gate",
    "column",
    "mode",
    "order",
    "grid",
    "config",
];

/// Fully resolved configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub catalog: Option<catalog::CatalogEntry>,
    pub shape: BoundaryShape,
    pub bc: BoundaryCondition,
    pub levels: Option<usize>,
    pub a_max: usize,
    pub quad: usize,
    pub n_max: u32,
    pub l_max: u32,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub options: EnergyOptions,
    pub reference: Option<PathBuf>,
    pub gate: f64,
    pub column: ReferenceColumn,
    pub mode: Option<(u32, u32, i32)>,
    pub order: u8,
    pub grid: (usize, usize, usize),
}

fn parse_kv(s: &str) -> Result<(String, String)> {
    let (k, v) = s.split_once('=').ok_or_else(|| anyhow!("--param expects key=value, got '{s}'"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn pick<T: FromStr>(flag: Option<T>, file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    file.get(key)
        .map(|v| v.parse::<T>().map_err(|e| anyhow!("config key {key}: {e}")))
        .transpose()
}

fn positive<T: PartialOrd + Default + std::fmt::Display>(v: T, what: &str) -> Result<T> {
    if v > T::default() {
        Ok(v)
    } else {
        bail!("{what} must be positive, got {v}")
    }
}

fn parse_mode(s: &str) -> Result<(u32, u32, i32)> {
    let v: Vec<&str> = s.split(',').map(str::trim).collect();
    if v.len() != 3 {
        bail!("--mode expects n,l,m, got '{s}'");
    }
    Ok((v[0].parse()?, v[1].parse()?, v[2].parse()?))
}

fn parse_grid(s: &str) -> Result<(usize, usize, usize)> {
    let v: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("--grid expects NR,NTHETA,NPHI, got '{s}'"))?;
    match v[..] {
        [nr, nt, np] if nr > 0 && nt > 0 && np > 0 => Ok((nr, nt, np)),
        _ => bail!("--grid expects three positive counts NR,NTHETA,NPHI, got '{s}'"),
    }
}

impl RunConfig {
    pub fn resolve(common: &Common, extra: &Extra) -> Result<Self> {
        let mut file = match &common.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        let file_params: BTreeMap<String, String> = file
            .iter()
            .filter(|(k, _)| !RUN_KEYS.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        file.retain(|k, _| RUN_KEYS.contains(&k.as_str()));

        let shape_name = pick(common.shape.clone(), &file, "shape")?
            .ok_or_else(|| anyhow!("no shape given (use --shape or a config file)"))?;
        // file parameters belong to the file's shape
        let overridden = common.shape.is_some() && file.get("shape").is_some_and(|s| Some(s) != common.shape.as_ref());
        let mut params = if overridden {
            BTreeMap::new()
        } else {
            file_params
        };
        for p in &common.params {
            let (k, v) = parse_kv(p)?;
            params.insert(k, v);
        }
        let (catalog, shape) = match catalog::lookup(&shape_name) {
            Ok(entry) if params.is_empty() => (Some(entry.clone()), entry.shape),
            Ok(_) if parse_shape(&shape_name, &params).is_err() => {
                bail!("catalog shape '{shape_name}' takes no parameters")
            }
            _ => (None, parse_shape(&shape_name, &params)?),
        };

        let bc = pick(common.bc.clone(), &file, "bc")?
            .map(|s| s.parse::<BoundaryCondition>())
            .transpose()?
            .unwrap_or(BoundaryCondition::Dirichlet);
        let levels = pick(common.levels, &file, "levels")?
            .map(|v| positive(v, "levels"))
            .transpose()?;
        let defaults = ExpansionOptions::default();
        let a_max = positive(pick(common.amax, &file, "amax")?.unwrap_or(defaults.a_max), "amax")?;
        let quad = positive(pick(common.quad, &file, "quad")?.unwrap_or(defaults.quad_order), "quad")?;
        let n_max = positive(
            pick(common.nmax, &file, "nmax")?.unwrap_or(helmpert::spectrum::DEFAULT_N_MAX),
            "nmax",
        )?;
        let l_max = pick(common.lmax, &file, "lmax")?.unwrap_or(helmpert::spectrum::DEFAULT_L_MAX);
        let format = pick(common.format, &file, "format")?.unwrap_or(Format::Csv);
        let out = pick(common.out.clone(), &file, "out")?;
        let mut options = EnergyOptions::default();
        if let Some(t) = pick(common.resonance_threshold, &file, "resonance-threshold")? {
            options.resonance_threshold = positive(t, "resonance-threshold")?;
        }
        let reference = pick(extra.reference.clone(), &file, "reference")?;
        let gate = positive(pick(extra.gate, &file, "gate")?.unwrap_or(5.0), "gate")?;
        let column = pick(extra.column.clone(), &file, "column")?
            .map(|s| s.parse::<ReferenceColumn>())
            .transpose()?
            .unwrap_or_default();
        let mode = pick(extra.mode.clone(), &file, "mode")?
            .map(|s| parse_mode(&s))
            .transpose()?;
        let order = pick(extra.order, &file, "order")?.unwrap_or(1);
        if order > 2 {
            bail!("order must be 0, 1 or 2, got {order}");
        }
        let grid = parse_grid(&pick(extra.grid.clone(), &file, "grid")?.unwrap_or_else(|| "16,9,1".into()))?;
        Ok(Self {
            catalog,
            shape,
            bc,
            levels,
            a_max,
            quad,
            n_max,
            l_max,
            format,
            out,
            options,
            reference,
            gate,
            column,
            mode,
            order,
            grid,
        })
    }

    pub fn expansion_options(&self) -> ExpansionOptions {
        ExpansionOptions {
            a_max: self.a_max,
            quad_order: self.quad,
            reference_radius: self
                .catalog
                .as_ref()
                .map_or(ReferenceRadius::Mean, |c| c.reference_radius),
        }
    }

    pub fn mode_index(&self) -> Result<ModeIndex> {
        let (n, l, m) = self.mode.ok_or_else(|| anyhow!("--mode n,l,m is required"))?;
        Ok(ModeIndex::new(n, l, m, self.bc)?)
    }

    /// Explicit `--reference`, else `$HELMPERT_DATA_DIR/<name>-<bc>.csv`, else the shipped table.
    pub fn reference_text(&self) -> Result<(String, String)> {
        if let Some(p) = &self.reference {
            return Ok((read(p)?, p.display().to_string()));
        }
        let name = self
            .catalog
            .as_ref()
            .map(|c| c.name)
            .ok_or_else(|| anyhow!("--reference is required for shapes outside the catalog"))?;
        let file = format!("{name}-{}.csv", self.bc);
        if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
            let p = Path::new(&dir).join(&file);
            return Ok((read(&p)?, p.display().to_string()));
        }
        Ok((catalog::reference_csv(name, self.bc)?.to_string(), format!("shipped {file}")))
    }
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}
