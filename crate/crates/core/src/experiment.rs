//! Parameter sweeps behind the reproduction figures and the comparison
//! table, plus deterministic CSV/JSON output with a replayable manifest.
//!
//! Sweep points are evaluated in parallel; rows are always sorted by the
//! sweep keys before output, so results do not depend on scheduling.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Architecture, ConfigBuilder, Deployment, SystemConfig};
use crate::error::{Error, Result};
use crate::metrics::{asymptotic_gain_targets, capacity, default_dof_grid, fit_dof, gain_decomposition, gain_envelope};
use crate::tuner::deployed_channel;
use crate::units::LinkBudget;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const POWER_COLUMNS: &[&str] = &[
    "p_dbm",
    "n_per_side",
    "architecture",
    "scheme",
    "capacity_bits",
    "ref_slope1_bits",
    "ref_slope2_bits",
];
pub const GAIN_COLUMNS: &[&str] = &[
    "n_per_side",
    "scheme",
    "g_array",
    "g_mux",
    "array_target",
    "mux_target",
    "bound_lower_array",
    "bound_upper_array",
    "bound_lower_mux",
    "bound_upper_mux",
];
pub const CAPACITY_COLUMNS: &[&str] = &[
    "n_per_side",
    "p_dbm",
    "architecture",
    "scheme",
    "capacity_bits",
    "g_total",
    "gain_improvement_db",
    "capacity_improvement_bits",
];
pub const TABLE1_COLUMNS: &[&str] = &[
    "architecture",
    "dof_slope",
    "array_ratio_lo",
    "array_ratio_hi",
    "mux_present",
];

/// Antenna counts for the scaling-ratio columns of the comparison table.
pub const TABLE1_N_RANGE: (usize, usize) = (10, 2000);

/// `|det H|² / ||H||_F⁴` above which multiplexing gain counts as present.
pub const MUX_PRESENCE_THRESHOLD: f64 = 1e-12;

const ARCHITECTURES: [Architecture; 2] = [Architecture::Center, Architecture::End];
const SCHEMES: [Deployment; 2] = [Deployment::Uniform, Deployment::Tuned];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Power,
    Gains,
    Capacity,
    Table1,
}

impl SweepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepKind::Power => "power",
            SweepKind::Gains => "gains",
            SweepKind::Capacity => "capacity",
            SweepKind::Table1 => "table1",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            SweepKind::Power => POWER_COLUMNS,
            SweepKind::Gains => GAIN_COLUMNS,
            SweepKind::Capacity => CAPACITY_COLUMNS,
            SweepKind::Table1 => TABLE1_COLUMNS,
        }
    }
}

/// Everything needed to regenerate a dataset from a config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SweepRequest {
    Power {
        p_min: f64,
        p_max: f64,
        p_step: f64,
        n_values: Vec<usize>,
    },
    Gains {
        n_min: usize,
        n_max: usize,
        scheme: Deployment,
    },
    Capacity {
        n_values: Vec<usize>,
        p_values: Vec<f64>,
    },
    Table1,
}

impl SweepRequest {
    pub fn kind(&self) -> SweepKind {
        match self {
            SweepRequest::Power { .. } => SweepKind::Power,
            SweepRequest::Gains { .. } => SweepKind::Gains,
            SweepRequest::Capacity { .. } => SweepKind::Capacity,
            SweepRequest::Table1 => SweepKind::Table1,
        }
    }

    /// Default grids of the three figures and the table.
    pub fn figure_defaults() -> Vec<SweepRequest> {
        vec![
            SweepRequest::Power {
                p_min: 0.0,
                p_max: 100.0,
                p_step: 5.0,
                n_values: vec![1, 2, 4, 8, 16],
            },
            SweepRequest::Gains {
                n_min: 1,
                n_max: 2000,
                scheme: Deployment::Tuned,
            },
            SweepRequest::Gains {
                n_min: 1,
                n_max: 2000,
                scheme: Deployment::Uniform,
            },
            SweepRequest::Capacity {
                n_values: (1..=100).collect(),
                p_values: vec![0.0, 30.0],
            },
            SweepRequest::Table1,
        ]
    }

    pub fn run(&self, cfg: &SystemConfig<f64>) -> Result<Dataset> {
        match self {
            SweepRequest::Power {
                p_min,
                p_max,
                p_step,
                n_values,
            } => run_power_sweep(cfg, *p_min, *p_max, *p_step, n_values),
            SweepRequest::Gains { n_min, n_max, scheme } => run_gain_sweep(cfg, *n_min, *n_max, *scheme),
            SweepRequest::Capacity { n_values, p_values } => run_capacity_vs_n(cfg, n_values, p_values),
            SweepRequest::Table1 => run_table1(cfg),
        }
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Text(&'static str),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format_real(*v),
            Cell::Text(s) => (*s).to_string(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => (*v).into(),
            Cell::Real(v) => {
                let rounded: f64 = format_real(*v).parse().expect("formatted real parses");
                serde_json::Number::from_f64(rounded)
                    .map(Into::into)
                    .unwrap_or(serde_json::Value::Null)
            }
            Cell::Text(s) => (*s).into(),
            Cell::Bool(b) => (*b).into(),
        }
    }
}

/// Scientific notation with 15 significant digits.
pub fn format_real(v: f64) -> String {
    format!("{v:.14e}")
}

fn n_cell(n: usize) -> Cell {
    Cell::Int(n as u64)
}

/// A sweep result: fixed columns, rows in sweep-key order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub kind: SweepKind,
    rows: Vec<Vec<Cell>>,
}

impl Dataset {
    pub fn new(kind: SweepKind, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind,
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &'static [&'static str] {
        self.kind.columns()
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// Appends a row; it must match the schema and hold finite values.
    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns().len() {
            return Err(Error::invalid(
                "row",
                format!(
                    "{} sweep expects {} columns, got {}",
                    self.kind.as_str(),
                    self.columns().len(),
                    row.len()
                ),
            ));
        }
        if let Some((i, _)) = row
            .iter()
            .enumerate()
            .find(|(_, c)| matches!(c, Cell::Real(v) if !v.is_finite()))
        {
            return Err(Error::invalid(self.columns()[i], "non-finite value"));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Real value of `column` in `row`.
    pub fn real(&self, row: usize, column: &str) -> Option<f64> {
        let idx = self.columns().iter().position(|c| *c == column)?;
        match self.rows.get(row)?.get(idx)? {
            Cell::Real(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn text(&self, row: usize, column: &str) -> Option<String> {
        let idx = self.columns().iter().position(|c| *c == column)?;
        match self.rows.get(row)?.get(idx)? {
            Cell::Text(s) => Some((*s).to_string()),
            Cell::Bool(b) => Some(b.to_string()),
            Cell::Int(v) => Some(v.to_string()),
            Cell::Real(v) => Some(format_real(*v)),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns().join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| serde_json::Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let doc = serde_json::json!({
            "name": self.name,
            "kind": self.kind.as_str(),
            "columns": self.columns(),
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("dataset serializes");
        s.push('\n');
        s
    }
}

fn for_point(cfg: &SystemConfig<f64>, n: usize, arch: Architecture, scheme: Deployment) -> Result<SystemConfig<f64>> {
    Ok(cfg
        .clone()
        .with_n_per_side(n)?
        .with_architecture(arch)
        .with_deployment(scheme))
}

fn power_grid(p_min: f64, p_max: f64, p_step: f64) -> Result<Vec<f64>> {
    if !(p_min.is_finite() && p_max.is_finite()) {
        return Err(Error::invalid("p_min/p_max", "must be finite"));
    }
    if !(p_min < p_max) {
        return Err(Error::invalid(
            "p_min",
            format!("must be below p_max ({p_min} >= {p_max})"),
        ));
    }
    if !(p_step.is_finite() && p_step > 0.0) {
        return Err(Error::invalid("p_step", format!("must be positive, got {p_step}")));
    }
    let count = ((p_max - p_min) / p_step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| p_min + i as f64 * p_step).collect())
}

fn check_counts(key: &str, values: &[usize]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::invalid(key, "must not be empty"));
    }
    if values.contains(&0) {
        return Err(Error::invalid(key, "antenna counts must be >= 1"));
    }
    Ok(())
}

fn sorted_unique<T: Ord + Copy>(values: &[T]) -> Vec<T> {
    let mut v = values.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Capacity against transmit power per antenna count and architecture, with
/// slope-1 and slope-2 reference lines anchored at the top of the range.
pub fn run_power_sweep(
    cfg: &SystemConfig<f64>,
    p_min: f64,
    p_max: f64,
    p_step: f64,
    n_values: &[usize],
) -> Result<Dataset> {
    let grid = power_grid(p_min, p_max, p_step)?;
    check_counts("n", n_values)?;
    let ns = sorted_unique(n_values);
    let scheme = cfg.deployment;
    let tasks: Vec<(usize, Architecture)> = ns.iter().flat_map(|&n| ARCHITECTURES.map(|a| (n, a))).collect();
    type Series = Vec<(usize, usize, Architecture, [f64; 3])>;
    let series: Vec<Series> = tasks
        .par_iter()
        .map(|&(n, arch)| {
            let point = for_point(cfg, n, arch, scheme)?;
            let h = deployed_channel(&point)?.h;
            let caps: Vec<(f64, f64)> = grid
                .iter()
                .map(|&p| {
                    let b = LinkBudget::from_dbm(p, cfg.n0_dbm)?;
                    Ok(((b.p_t_watt / b.n0_watt).log2(), capacity(&h, &b)))
                })
                .collect::<Result<_>>()?;
            let (x_top, c_top) = *caps.last().expect("grid is non-empty");
            Ok(caps
                .iter()
                .enumerate()
                .map(|(i, &(x, c))| (i, n, arch, [c, c_top + (x - x_top), c_top + 2.0 * (x - x_top)]))
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<_> = series.into_iter().flatten().collect();
    rows.sort_by_key(|&(i, n, arch, _)| (i, n, arch));
    let mut ds = Dataset::new(SweepKind::Power, "power");
    for (i, n, arch, [c, r1, r2]) in rows {
        ds.push(vec![
            Cell::Real(grid[i]),
            n_cell(n),
            Cell::Text(arch.as_str()),
            Cell::Text(scheme.as_str()),
            Cell::Real(c),
            Cell::Real(r1),
            Cell::Real(r2),
        ])?;
    }
    Ok(ds)
}

/// Antenna counts for a gain sweep: every integer for short ranges, about
/// 64 log-spaced counts otherwise.
pub fn gain_sweep_counts(n_min: usize, n_max: usize) -> Result<Vec<usize>> {
    if n_min == 0 {
        return Err(Error::invalid("n_min", "must be >= 1"));
    }
    if n_max < n_min {
        return Err(Error::invalid("n_max", format!("must be >= n_min ({n_max} < {n_min})")));
    }
    if n_max - n_min <= 100 {
        return Ok((n_min..=n_max).collect());
    }
    let points = 64;
    let (lo, hi) = ((n_min as f64).ln(), (n_max as f64).ln());
    let mut v: Vec<usize> = (0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp().round() as usize)
        .collect();
    v.push(n_min);
    v.push(n_max);
    Ok(sorted_unique(&v))
}

/// Center-fed array and multiplexing gains against the antenna count, with
/// the dominant-term targets and their integral-bound envelope.
pub fn run_gain_sweep(cfg: &SystemConfig<f64>, n_min: usize, n_max: usize, scheme: Deployment) -> Result<Dataset> {
    let counts = gain_sweep_counts(n_min, n_max)?;
    let rows: Vec<Vec<Cell>> = counts
        .par_iter()
        .map(|&n| {
            let point = for_point(cfg, n, Architecture::Center, scheme)?;
            let g = gain_decomposition(&deployed_channel(&point)?.h, &point.budget);
            let (array_target, mux_target) =
                asymptotic_gain_targets(n, &point.budget, point.y_f, point.y_b, point.l_pa, point.wave.eta)?;
            let env = gain_envelope(&point, n)?;
            Ok(vec![
                n_cell(n),
                Cell::Text(scheme.as_str()),
                Cell::Real(g.g_array),
                Cell::Real(g.g_mux),
                Cell::Real(array_target),
                Cell::Real(mux_target),
                Cell::Real(env.array_lower),
                Cell::Real(env.array_upper),
                Cell::Real(env.mux_lower),
                Cell::Real(env.mux_upper),
            ])
        })
        .collect::<Result<_>>()?;
    let mut ds = Dataset::new(SweepKind::Gains, format!("gains_{}", scheme.as_str()));
    for row in rows {
        ds.push(row)?;
    }
    Ok(ds)
}

/// Capacity against antenna count for both architectures and both
/// deployments, with the center-over-end improvement of each pair.
pub fn run_capacity_vs_n(cfg: &SystemConfig<f64>, n_values: &[usize], p_values: &[f64]) -> Result<Dataset> {
    check_counts("n", n_values)?;
    if p_values.is_empty() {
        return Err(Error::invalid("p", "must not be empty"));
    }
    if let Some(p) = p_values.iter().find(|p| !p.is_finite()) {
        return Err(Error::invalid("p", format!("must be finite, got {p}")));
    }
    let ns = sorted_unique(n_values);
    let mut ps = p_values.to_vec();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    let tasks: Vec<(usize, Deployment)> = ns.iter().flat_map(|&n| SCHEMES.map(|s| (n, s))).collect();
    type PairRows = Vec<(usize, usize, Deployment, [(f64, f64); 2])>;
    let results: Vec<PairRows> = tasks
        .par_iter()
        .map(|&(n, scheme)| {
            let h = ARCHITECTURES
                .iter()
                .map(|&a| Ok(deployed_channel(&for_point(cfg, n, a, scheme)?)?.h))
                .collect::<Result<Vec<_>>>()?;
            ps.iter()
                .enumerate()
                .map(|(pi, &p)| {
                    let b = LinkBudget::from_dbm(p, cfg.n0_dbm)?;
                    let pair = [0, 1].map(|i| {
                        let g = gain_decomposition(&h[i], &b);
                        (g.capacity_bits, g.g_total)
                    });
                    Ok((n, pi, scheme, pair))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (n, pi, scheme, [center, end]) in results.into_iter().flatten() {
        let gain_db = 10.0 * (center.1 / end.1).log10();
        let cap_bits = center.0 - end.0;
        for (arch, (c, g)) in ARCHITECTURES.into_iter().zip([center, end]) {
            rows.push(((n, pi, arch, scheme), [c, g, gain_db, cap_bits]));
        }
    }
    rows.sort_by_key(|(k, _)| *k);
    let mut ds = Dataset::new(SweepKind::Capacity, "capacity");
    for ((n, pi, arch, scheme), [c, g, gain_db, cap_bits]) in rows {
        ds.push(vec![
            n_cell(n),
            Cell::Real(ps[pi]),
            Cell::Text(arch.as_str()),
            Cell::Text(scheme.as_str()),
            Cell::Real(c),
            Cell::Real(g),
            Cell::Real(gain_db),
            Cell::Real(cap_bits),
        ])?;
    }
    Ok(ds)
}

/// Measured counterpart of the architecture comparison table, one row per
/// architecture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub architecture: Architecture,
    pub dof_slope: f64,
    /// Extremes of `g_array / (ln² N / N)` over [`TABLE1_N_RANGE`].
    pub array_ratio_lo: f64,
    pub array_ratio_hi: f64,
    /// Extremes of `g_mux / (P_T ln⁴ N / N²)` over the same range.
    pub mux_ratio_lo: f64,
    pub mux_ratio_hi: f64,
    pub mux_present: bool,
}

/// Scaling ratios of the tuned deployment for one architecture.
pub fn table1_row(cfg: &SystemConfig<f64>, arch: Architecture) -> Result<Table1Row> {
    let base = cfg.clone().with_architecture(arch).with_deployment(Deployment::Tuned);
    let dof = fit_dof(&deployed_channel(&base)?.h, base.n0_dbm, &default_dof_grid())?;
    let counts = gain_sweep_counts(TABLE1_N_RANGE.0, TABLE1_N_RANGE.1)?;
    let samples: Vec<(f64, f64, f64)> = counts
        .par_iter()
        .map(|&n| {
            let point = base.clone().with_n_per_side(n)?;
            let h = deployed_channel(&point)?.h;
            let g = gain_decomposition(&h, &point.budget);
            let (nf, ln) = (n as f64, (n as f64).ln());
            let fro = h.frobenius_sq();
            Ok((
                g.g_array / (ln * ln / nf),
                g.g_mux / (point.budget.p_t_watt * ln.powi(4) / (nf * nf)),
                h.det().norm_sqr() / (fro * fro),
            ))
        })
        .collect::<Result<_>>()?;
    let fold = |f: fn(&(f64, f64, f64)) -> f64| {
        samples
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (array_ratio_lo, array_ratio_hi) = fold(|s| s.0);
    let (mux_ratio_lo, mux_ratio_hi) = fold(|s| s.1);
    let (_, det_ratio_max) = fold(|s| s.2);
    Ok(Table1Row {
        architecture: arch,
        dof_slope: dof.slope,
        array_ratio_lo,
        array_ratio_hi,
        mux_ratio_lo,
        mux_ratio_hi,
        mux_present: det_ratio_max > MUX_PRESENCE_THRESHOLD,
    })
}

pub fn run_table1(cfg: &SystemConfig<f64>) -> Result<Dataset> {
    let mut ds = Dataset::new(SweepKind::Table1, "table1");
    for arch in ARCHITECTURES {
        let r = table1_row(cfg, arch)?;
        ds.push(vec![
            Cell::Text(arch.as_str()),
            Cell::Real(r.dof_slope),
            Cell::Real(r.array_ratio_lo),
            Cell::Real(r.array_ratio_hi),
            Cell::Bool(r.mux_present),
        ])?;
    }
    Ok(ds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Usage(format!(
                "unknown output format {other:?}, expected csv or json"
            ))),
        }
    }
}

/// Grid actually evaluated by a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub n_per_side: Vec<usize>,
    pub p_dbm: Vec<f64>,
}

impl GridSummary {
    fn of(req: &SweepRequest, cfg: &SystemConfig<f64>) -> Result<Self> {
        Ok(match req {
            SweepRequest::Power {
                p_min,
                p_max,
                p_step,
                n_values,
            } => GridSummary {
                n_per_side: sorted_unique(n_values),
                p_dbm: power_grid(*p_min, *p_max, *p_step)?,
            },
            SweepRequest::Gains { n_min, n_max, .. } => GridSummary {
                n_per_side: gain_sweep_counts(*n_min, *n_max)?,
                p_dbm: vec![cfg.p_t_dbm],
            },
            SweepRequest::Capacity { n_values, p_values } => {
                let mut p = p_values.clone();
                p.sort_by(f64::total_cmp);
                p.dedup();
                GridSummary {
                    n_per_side: sorted_unique(n_values),
                    p_dbm: p,
                }
            }
            SweepRequest::Table1 => GridSummary {
                n_per_side: gain_sweep_counts(TABLE1_N_RANGE.0, TABLE1_N_RANGE.1)?,
                p_dbm: default_dof_grid(),
            },
        })
    }
}

/// Provenance record written next to every dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub sweep_kind: SweepKind,
    /// Resolved config, one entry per config key.
    pub config: BTreeMap<String, serde_json::Value>,
    pub request: SweepRequest,
    pub grid: GridSummary,
    pub format: OutputFormat,
    pub row_count: usize,
    /// Output file names, relative to the manifest's directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(
        cfg: &SystemConfig<f64>,
        request: &SweepRequest,
        dataset: &Dataset,
        format: OutputFormat,
    ) -> Result<Self> {
        let table: toml::Table = cfg.to_config_string().parse().expect("serialized config parses");
        let config = table
            .into_iter()
            .map(|(k, v)| {
                Ok((
                    k,
                    serde_json::to_value(v).map_err(|e| Error::invalid("config", e.to_string()))?,
                ))
            })
            .collect::<Result<_>>()?;
        Ok(RunManifest {
            tool: "cpass".into(),
            tool_version: TOOL_VERSION.into(),
            sweep_kind: request.kind(),
            config,
            request: request.clone(),
            grid: GridSummary::of(request, cfg)?,
            format,
            row_count: dataset.rows().len(),
            outputs: vec![format!("{}.{}", dataset.name, format.extension())],
        })
    }

    /// Rebuilds the config recorded in the manifest.
    pub fn config(&self) -> Result<SystemConfig<f64>> {
        let mut table = toml::Table::new();
        for (k, v) in &self.config {
            let value = toml::Value::try_from(v).map_err(|e| Error::invalid(k.clone(), e.to_string()))?;
            table.insert(k.clone(), value);
        }
        ConfigBuilder::parse(&table.to_string(), "manifest")?.build()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }
}

/// Re-runs the sweep a manifest describes.
pub fn replay(manifest: &RunManifest) -> Result<Dataset> {
    manifest.request.run(&manifest.config()?)
}

/// Runs `request` and writes the dataset plus its manifest into `out_dir`.
pub fn run_and_emit(
    cfg: &SystemConfig<f64>,
    request: &SweepRequest,
    format: OutputFormat,
    out_dir: &Path,
) -> Result<(Vec<PathBuf>, RunManifest)> {
    let ds = request.run(cfg)?;
    let manifest = RunManifest::new(cfg, request, &ds, format)?;
    emit(&ds, &manifest, out_dir)
}

/// Writes `dataset` in the manifest's format, then the manifest itself as
/// `<name>.manifest.json`. Returns the written paths.
pub fn emit(dataset: &Dataset, manifest: &RunManifest, out_dir: &Path) -> Result<(Vec<PathBuf>, RunManifest)> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let data_path = out_dir.join(format!("{}.{}", dataset.name, manifest.format.extension()));
    let body = match manifest.format {
        OutputFormat::Csv => dataset.to_csv(),
        OutputFormat::Json => dataset.to_json(),
    };
    std::fs::write(&data_path, body).map_err(|e| Error::io(&data_path, e))?;
    let manifest_path = out_dir.join(format!("{}.manifest.json", dataset.name));
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(&manifest_path, text).map_err(|e| Error::io(&manifest_path, e))?;
    Ok((vec![data_path, manifest_path], manifest.clone()))
}
