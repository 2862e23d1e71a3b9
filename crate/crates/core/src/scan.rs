//! Parameter scans and reports as deterministic tables.
//!
//! Every command maps a [`ScanConfig`] to an [`Output`]. Rows are computed in
//! parallel but always emitted in grid order, and numbers are printed with a
//! fixed, locale-independent format, so equal configs give equal bytes.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bogoliubov::analyse;
use crate::error::{Error, Result};
use crate::floquet::{compare_fidelity, SimConfig};
use crate::meanfield::{classify, Phase};
use crate::reduction::{
    effective_model, rwa_report, sideband_select, EffectiveModel, ModulationParams, Regime, Sidebands, SystemParams,
    DEFAULT_RWA_N_MAX, DEFAULT_RWA_THRESHOLD,
};

/// Offset on either side of a located boundary used to label its phases.
pub const BOUNDARY_PROBE: f64 = 1e-5;

// ---------------------------------------------------------------------------
// formatting

/// Twelve significant digits; scientific notation for `|x| < 1e-3` and
/// `|x| >= 1e12`; trailing zeros removed.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if !(1e-3..1e12).contains(&a) {
        let s = format!("{x:.11e}");
        let (mantissa, exponent) = s.split_once('e').expect("scientific format has an exponent");
        return format!("{}e{}", trim_zeros(mantissa), exponent);
    }
    let decimals = (11 - a.log10().floor() as i32).max(0) as usize;
    let s = trim_zeros(&format!("{x:.decimals$}"));
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => {
                // round-trip through the printed form so JSON and CSV agree
                let v: f64 = format_number(*x).parse().expect("formatted number parses");
                json!(v)
            }
            Cell::Num(x) => json!(format_number(*x)),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            Cell::Text(_) => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
            .collect();
        let doc = json!({ "columns": self.columns, "rows": rows });
        let mut s = serde_json::to_string(&doc).expect("table serialises");
        s.push('\n');
        s
    }
}

// ---------------------------------------------------------------------------
// configuration

/// `a` (single value) or `a:b:n` (`n >= 2` evenly spaced values, both ends
/// included).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl FromStr for Range {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("range {s:?} is not `a` or `a:b:n` with n >= 2"));
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |p: &str| p.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad);
        match parts.as_slice() {
            [a] => {
                let a = num(a)?;
                Ok(Range { start: a, end: a, count: 1 })
            }
            [a, b, n] => {
                let count: usize = n.parse().map_err(|_| bad())?;
                if count < 2 {
                    return Err(bad());
                }
                Ok(Range {
                    start: num(a)?,
                    end: num(b)?,
                    count,
                })
            }
            _ => Err(bad()),
        }
    }
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.end
                } else {
                    self.start + (self.end - self.start) * i as f64 / (self.count - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CriticalScan,
    CouplingScan,
    PhaseDiagram,
    SpectrumScan,
    Trajectory,
    ValidateRwa,
    ExactSim,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::CriticalScan,
        Command::CouplingScan,
        Command::PhaseDiagram,
        Command::SpectrumScan,
        Command::Trajectory,
        Command::ValidateRwa,
        Command::ExactSim,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::CriticalScan => "critical-scan",
            Command::CouplingScan => "coupling-scan",
            Command::PhaseDiagram => "phase-diagram",
            Command::SpectrumScan => "spectrum-scan",
            Command::Trajectory => "trajectory",
            Command::ValidateRwa => "validate-rwa",
            Command::ExactSim => "exact-sim",
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format {other:?} (expected csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidebandOverride {
    pub n0: i32,
    pub m0: i32,
}

/// One JSON document drives every command. Unset fields take the
/// command-specific defaults listed on [`ScanConfig::default_range`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub command: Option<Command>,
    pub omega0: f64,
    /// Dressed cavity frequency; the bare one is derived from `chi`.
    pub omega_c_prime: f64,
    pub g0: f64,
    pub chi: f64,
    pub n_qubits: u32,
    pub nu: f64,
    pub xi: f64,
    pub nu_range: Option<String>,
    pub xi_range: Option<String>,
    pub lr_range: Option<String>,
    pub lcr_range: Option<String>,
    pub threshold: f64,
    pub rwa_n_max: i32,
    pub sidebands: Option<SidebandOverride>,
    pub sim: Option<SimConfig>,
    /// Include the exact simulation in `validate-rwa`.
    pub run_sim: bool,
    /// Bisection stops once the bracket is narrower than this (absolute, in xi).
    pub boundary_tol: f64,
    pub format: Format,
    pub out: Option<String>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            command: None,
            omega0: 1.0,
            omega_c_prime: 1.0,
            g0: 0.06,
            chi: 0.0,
            n_qubits: 2,
            nu: 0.49,
            xi: 1.0,
            nu_range: None,
            xi_range: None,
            lr_range: None,
            lcr_range: None,
            threshold: DEFAULT_RWA_THRESHOLD,
            rwa_n_max: DEFAULT_RWA_N_MAX,
            sidebands: None,
            sim: None,
            run_sim: false,
            boundary_tol: 1e-9,
            format: Format::Csv,
            out: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Nu,
    Xi,
    Lr,
    Lcr,
}

impl ScanConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    /// Default ranges per command and axis.
    pub fn default_range(command: Command, axis: Axis) -> &'static str {
        match (command, axis) {
            (_, Axis::Nu) => "0.3:4.2:3901",
            (Command::Trajectory, Axis::Xi) => "0:4:401",
            (_, Axis::Xi) => "0:10:10001",
            (Command::SpectrumScan, Axis::Lr) => "0.5",
            (Command::SpectrumScan, Axis::Lcr) => "-2:2:401",
            (_, Axis::Lr | Axis::Lcr) => "-2:2:201",
        }
    }

    pub fn range(&self, command: Command, axis: Axis) -> Result<Range> {
        let given = match axis {
            Axis::Nu => &self.nu_range,
            Axis::Xi => &self.xi_range,
            Axis::Lr => &self.lr_range,
            Axis::Lcr => &self.lcr_range,
        };
        given
            .as_deref()
            .unwrap_or(Self::default_range(command, axis))
            .parse()
    }

    pub fn system(&self) -> Result<SystemParams> {
        SystemParams::with_dressed_cavity(self.omega0, self.omega_c_prime, self.g0, self.n_qubits, self.chi)
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn modulation(&self, xi: f64, nu: f64) -> Result<ModulationParams> {
        ModulationParams::new(xi, nu).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn sidebands_for(&self, sys: &SystemParams, md: &ModulationParams) -> Sidebands {
        match self.sidebands {
            Some(o) => Sidebands::with_indices(sys, md, o.n0, o.m0),
            None => sideband_select(sys, md),
        }
    }

    pub fn model_at(&self, sys: &SystemParams, xi: f64) -> Result<EffectiveModel> {
        let md = self.modulation(xi, self.nu)?;
        effective_model(sys, &md, &self.sidebands_for(sys, &md))
    }

    pub fn sim_config(&self) -> SimConfig {
        self.sim.clone().unwrap_or_else(|| SimConfig::new(self.n_qubits, 24))
    }
}

// ---------------------------------------------------------------------------
// commands

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Table(Table),
    Json(Value),
}

impl Document {
    pub fn render(&self, format: Format) -> String {
        match (self, format) {
            (Document::Table(t), Format::Csv) => t.to_csv(),
            (Document::Table(t), Format::Json) => t.to_json(),
            (Document::Json(v), _) => {
                let mut s = serde_json::to_string_pretty(v).expect("report serialises");
                s.push('\n');
                s
            }
        }
    }

    pub fn as_table(&self) -> Option<&Table> {
        match self {
            Document::Table(t) => Some(t),
            Document::Json(_) => None,
        }
    }
}

/// Main document plus named companions (written next to the main file).
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub primary: Document,
    pub companions: Vec<(String, Document)>,
    /// Set when a single requested point has an invalid effective model.
    pub invalid_regime: Option<String>,
}

impl Output {
    fn table(t: Table) -> Self {
        Self {
            primary: Document::Table(t),
            companions: Vec::new(),
            invalid_regime: None,
        }
    }
}

pub fn run(command: Command, cfg: &ScanConfig) -> Result<Output> {
    let out = match command {
        Command::CriticalScan => Output::table(critical_scan(cfg)?),
        Command::CouplingScan => Output::table(coupling_scan(cfg)?),
        Command::PhaseDiagram => Output::table(phase_diagram(cfg)?),
        Command::SpectrumScan => Output::table(spectrum_scan(cfg)?),
        Command::Trajectory => {
            let (rows, bounds) = trajectory(cfg)?;
            Output {
                primary: Document::Table(rows),
                companions: vec![("boundaries".into(), Document::Table(bounds))],
                invalid_regime: None,
            }
        }
        Command::ValidateRwa => validate_rwa(cfg)?,
        Command::ExactSim => exact_sim(cfg)?,
    };
    if let Document::Table(t) = &out.primary {
        validate_table(command, t)?;
    }
    Ok(out)
}

fn ratio(value: f64, crit: Option<f64>) -> f64 {
    match crit {
        Some(c) if c > 0.0 => value / c,
        _ => f64::NAN,
    }
}

fn valid_crit(model: &EffectiveModel) -> Option<f64> {
    (model.regime() == Regime::Valid).then_some(model.lambda_crit).flatten()
}

pub fn critical_scan(cfg: &ScanConfig) -> Result<Table> {
    let sys = cfg.system()?;
    let nus = cfg.range(Command::CriticalScan, Axis::Nu)?.values();
    let rows = nus
        .par_iter()
        .map(|&nu| -> Result<Vec<Cell>> {
            let md = cfg.modulation(0.0, nu)?;
            let sb = sideband_select(&sys, &md);
            let model = effective_model(&sys, &md, &sb)?;
            Ok(vec![
                Cell::Num(nu / sys.omega0),
                Cell::Int(sb.n0.into()),
                Cell::Int(sb.m0.into()),
                Cell::Num(model.lambda_crit.map_or(f64::NAN, |c| c / sys.omega0)),
                Cell::Text(model.regime().as_str().into()),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["nu_over_omega0", "n0", "m0", "lambda_crit_over_omega0", "status"]);
    t.rows = rows;
    Ok(t)
}

pub fn coupling_scan(cfg: &ScanConfig) -> Result<Table> {
    let sys = cfg.system()?;
    let xis = cfg.range(Command::CouplingScan, Axis::Xi)?.values();
    let rows = xis
        .par_iter()
        .map(|&xi| -> Result<Vec<Cell>> {
            let model = cfg.model_at(&sys, xi)?;
            let crit = valid_crit(&model);
            Ok(vec![
                Cell::Num(xi),
                Cell::Num(ratio(model.lambda_r, crit)),
                Cell::Num(ratio(model.lambda_cr, crit)),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["xi", "lambda_r_over_crit", "lambda_cr_over_crit"]);
    t.rows = rows;
    Ok(t)
}

/// Frequencies of the working point; couplings are then set on a grid.
fn base_model(cfg: &ScanConfig) -> Result<(EffectiveModel, f64)> {
    let sys = cfg.system()?;
    let model = cfg.model_at(&sys, cfg.xi)?;
    let crit = model.require_valid()?;
    if crit == 0.0 {
        return Err(Error::InvalidRegime("critical coupling vanishes at the working point".into()));
    }
    Ok((model, crit))
}

fn state_cells(model: &EffectiveModel, with_spectrum: bool) -> Vec<Cell> {
    match analyse(model) {
        Ok((gs, sp)) => {
            let mut cells = vec![
                Cell::Text(gs.phase.label().into()),
                Cell::Num(gs.alpha_scaled.re),
                Cell::Num(gs.alpha_scaled.im),
                Cell::Num(gs.beta_scaled.re),
                Cell::Num(gs.beta_scaled.im),
                Cell::Num(gs.energy_per_qubit),
            ];
            if with_spectrum {
                cells.push(Cell::Num(sp.omega_minus));
                cells.push(Cell::Num(sp.omega_plus));
            }
            cells
        }
        Err(_) => {
            let mut cells = vec![Cell::Text("error".into())];
            cells.extend((0..if with_spectrum { 7 } else { 5 }).map(|_| Cell::Num(f64::NAN)));
            cells
        }
    }
}

pub fn phase_diagram(cfg: &ScanConfig) -> Result<Table> {
    let (base, crit) = base_model(cfg)?;
    let lr = cfg.range(Command::PhaseDiagram, Axis::Lr)?;
    let lcr = cfg.range(Command::PhaseDiagram, Axis::Lcr)?;
    if lr.count < 2 || lcr.count < 2 {
        return Err(Error::Config("phase-diagram needs at least 2 points on each axis".into()));
    }
    let grid: Vec<(f64, f64)> = lr
        .values()
        .into_iter()
        .flat_map(|a| lcr.values().into_iter().map(move |b| (a, b)))
        .collect();
    let mut t = Table::new(&[
        "lr_over_crit",
        "lcr_over_crit",
        "phase",
        "re_alpha",
        "im_alpha",
        "re_beta",
        "im_beta",
        "energy",
        "omega_minus",
        "omega_plus",
    ]);
    t.rows = grid
        .par_iter()
        .map(|&(a, b)| {
            let mut row = vec![Cell::Num(a), Cell::Num(b)];
            row.extend(state_cells(&base.with_couplings(a * crit, b * crit), true));
            row
        })
        .collect();
    Ok(t)
}

pub fn spectrum_scan(cfg: &ScanConfig) -> Result<Table> {
    let (base, crit) = base_model(cfg)?;
    let lr = cfg.range(Command::SpectrumScan, Axis::Lr)?;
    let lcr = cfg.range(Command::SpectrumScan, Axis::Lcr)?;
    if lr.count < 2 && lcr.count < 2 {
        return Err(Error::Config("spectrum-scan needs at least 2 points on one axis".into()));
    }
    let grid: Vec<(f64, f64)> = lr
        .values()
        .into_iter()
        .flat_map(|a| lcr.values().into_iter().map(move |b| (a, b)))
        .collect();
    let mut t = Table::new(&["lr_over_crit", "lcr_over_crit", "phase", "omega_minus", "omega_plus", "stable"]);
    t.rows = grid
        .par_iter()
        .map(|&(a, b)| {
            let model = base.with_couplings(a * crit, b * crit);
            let mut row = vec![Cell::Num(a), Cell::Num(b)];
            match analyse(&model) {
                Ok((gs, sp)) => row.extend([
                    Cell::Text(gs.phase.label().into()),
                    Cell::Num(sp.omega_minus),
                    Cell::Num(sp.omega_plus),
                    Cell::Text(sp.stable.to_string()),
                ]),
                Err(_) => row.extend([
                    Cell::Text("error".into()),
                    Cell::Num(f64::NAN),
                    Cell::Num(f64::NAN),
                    Cell::Text("false".into()),
                ]),
            }
            row
        })
        .collect();
    Ok(t)
}

/// Where along the xi-trajectory the phase can change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    /// `lambda_r` changes sign.
    RotatingZero,
    /// `lambda_cr` changes sign.
    CounterRotatingZero,
    /// `|lambda_r| + |lambda_cr|` crosses the critical coupling.
    Critical,
}

impl BoundaryKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundaryKind::RotatingZero => "lambda_r_zero",
            BoundaryKind::CounterRotatingZero => "lambda_cr_zero",
            BoundaryKind::Critical => "critical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Boundary {
    pub xi: f64,
    pub kind: BoundaryKind,
    pub phase_before: Option<Phase>,
    pub phase_at: Option<Phase>,
    pub phase_after: Option<Phase>,
}

fn indicator(model: &EffectiveModel, kind: BoundaryKind) -> Option<f64> {
    let crit = valid_crit(model)?;
    Some(match kind {
        BoundaryKind::RotatingZero => model.lambda_r,
        BoundaryKind::CounterRotatingZero => model.lambda_cr,
        BoundaryKind::Critical => model.lambda_r.abs() + model.lambda_cr.abs() - crit,
    })
}

/// Phase-change points along the sampled xi values, refined by bisection.
pub fn trajectory_boundaries(cfg: &ScanConfig, xis: &[f64]) -> Result<Vec<Boundary>> {
    let sys = cfg.system()?;
    let (lo, hi) = xis
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let phase_at = |xi: f64| -> Option<Phase> {
        if xi < lo || xi > hi {
            return None;
        }
        cfg.model_at(&sys, xi).ok().and_then(|m| classify(&m).ok())
    };
    let f = |xi: f64, kind| cfg.model_at(&sys, xi).ok().and_then(|m| indicator(&m, kind));

    let kinds = [
        BoundaryKind::RotatingZero,
        BoundaryKind::CounterRotatingZero,
        BoundaryKind::Critical,
    ];
    let mut roots: Vec<(f64, BoundaryKind)> = Vec::new();
    for kind in kinds {
        let values: Vec<Option<f64>> = xis.iter().map(|&x| f(x, kind)).collect();
        for (i, v) in values.iter().enumerate() {
            if *v == Some(0.0) {
                roots.push((xis[i], kind));
            }
        }
        for i in 0..xis.len().saturating_sub(1) {
            let (Some(fa), Some(fb)) = (values[i], values[i + 1]) else {
                continue;
            };
            if fa == 0.0 || fb == 0.0 || fa.signum() == fb.signum() {
                continue;
            }
            let (mut a, mut b, mut fa) = (xis[i], xis[i + 1], fa);
            for _ in 0..200 {
                if (b - a).abs() <= cfg.boundary_tol {
                    break;
                }
                let m = 0.5 * (a + b);
                match f(m, kind) {
                    Some(fm) if fm == 0.0 => {
                        a = m;
                        b = m;
                    }
                    Some(fm) if fm.signum() == fa.signum() => {
                        a = m;
                        fa = fm;
                    }
                    Some(_) => b = m,
                    None => break,
                }
            }
            roots.push((0.5 * (a + b), kind));
        }
    }
    roots.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1 as u8).cmp(&(y.1 as u8))));

    Ok(roots
        .into_iter()
        .map(|(xi, kind)| Boundary {
            xi,
            kind,
            phase_before: phase_at(xi - BOUNDARY_PROBE),
            phase_at: phase_at(xi),
            phase_after: phase_at(xi + BOUNDARY_PROBE),
        })
        .filter(|b| b.phase_before != b.phase_after || b.phase_at != b.phase_before || b.phase_at != b.phase_after)
        .collect())
}

/// Ordered phases visited along the trajectory, with repeats collapsed.
pub fn phase_sequence(samples: &[(f64, Phase)], boundaries: &[Boundary]) -> Vec<Phase> {
    let mut events: Vec<(f64, Phase)> = samples.to_vec();
    events.extend(boundaries.iter().filter_map(|b| b.phase_at.map(|p| (b.xi, p))));
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut seq: Vec<Phase> = Vec::new();
    for (_, p) in events {
        if seq.last() != Some(&p) {
            seq.push(p);
        }
    }
    seq
}

fn phase_cell(p: Option<Phase>) -> Cell {
    Cell::Text(p.map_or("-", |p| p.label()).into())
}

pub fn trajectory(cfg: &ScanConfig) -> Result<(Table, Table)> {
    let sys = cfg.system()?;
    let xis = cfg.range(Command::Trajectory, Axis::Xi)?.values();
    let mut rows = Table::new(&[
        "xi",
        "lambda_r_over_crit",
        "lambda_cr_over_crit",
        "phase",
        "re_alpha",
        "im_alpha",
        "re_beta",
        "im_beta",
        "energy",
    ]);
    rows.rows = xis
        .par_iter()
        .map(|&xi| -> Result<Vec<Cell>> {
            let model = cfg.model_at(&sys, xi)?;
            let crit = valid_crit(&model);
            let mut row = vec![
                Cell::Num(xi),
                Cell::Num(ratio(model.lambda_r, crit)),
                Cell::Num(ratio(model.lambda_cr, crit)),
            ];
            row.extend(state_cells(&model, false));
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut bounds = Table::new(&["xi", "kind", "phase_before", "phase_at", "phase_after"]);
    bounds.rows = trajectory_boundaries(cfg, &xis)?
        .into_iter()
        .map(|b| {
            vec![
                Cell::Num(b.xi),
                Cell::Text(b.kind.as_str().into()),
                phase_cell(b.phase_before),
                phase_cell(b.phase_at),
                phase_cell(b.phase_after),
            ]
        })
        .collect();
    Ok((rows, bounds))
}

fn status<T: Serialize>(r: Result<T>) -> Value {
    match r {
        Ok(v) => json!({ "status": "ok", "value": v }),
        Err(e) => json!({ "status": "error", "message": e.to_string() }),
    }
}

pub fn validate_rwa(cfg: &ScanConfig) -> Result<Output> {
    let sys = cfg.system()?;
    let md = cfg.modulation(cfg.xi, cfg.nu)?;
    let sb = cfg.sidebands_for(&sys, &md);
    let model = effective_model(&sys, &md, &sb)?;
    let rwa = rwa_report(&sys, &md, &sb, cfg.threshold, cfg.rwa_n_max);
    let infinite = rwa.as_ref().map(|r| r.worst_sideband_ratio.is_infinite()).unwrap_or(false);
    let analysis = analyse(&model);
    let (gs, sp) = match analysis {
        Ok((g, s)) => (Ok(g), Ok(s)),
        Err(e) => {
            let msg = e.to_string();
            (Err(e), Err(Error::Numerical(msg)))
        }
    };
    let sim = if cfg.run_sim {
        let mut sc = cfg.sim_config();
        if cfg.sim.is_none() {
            sc.n_qubits = sys.n_qubits;
        }
        match compare_fidelity(&sc, &sys, &md, &sb) {
            Ok(r) => json!({
                "status": "ok",
                "min_fidelity": r.min_fidelity,
                "fidelity_target": r.fidelity_target,
                "target_met": r.min_fidelity >= r.fidelity_target,
                "target_note": "design target, not a derived bound",
                "warning": r.warning,
            }),
            Err(e) => json!({ "status": "error", "message": e.to_string() }),
        }
    } else {
        json!({ "status": "skipped" })
    };
    let invalid = model.require_valid().err().map(|e| e.to_string());
    let report = json!({
        "point": {
            "omega0": sys.omega0,
            "omega_c_prime": sys.omega_c_prime(),
            "g0": sys.g0,
            "chi": sys.chi,
            "n_qubits": sys.n_qubits,
            "nu": md.nu,
            "xi": md.xi,
        },
        "sidebands": sb,
        "rwa": status(rwa),
        "worst_ratio_infinite": infinite,
        "effective_model": { "regime": model.regime().as_str(), "value": model },
        "ground_state": status(gs),
        "spectrum": status(sp),
        "exact_sim": sim,
    });
    Ok(Output {
        primary: Document::Json(report),
        companions: Vec::new(),
        invalid_regime: invalid,
    })
}

pub fn exact_sim(cfg: &ScanConfig) -> Result<Output> {
    let sys = cfg.system()?;
    let md = cfg.modulation(cfg.xi, cfg.nu)?;
    let sb = cfg.sidebands_for(&sys, &md);
    let sc = cfg.sim_config();
    let report = compare_fidelity(&sc, &sys, &md, &sb)?;
    let mut t = Table::new(&["t", "fidelity", "norm"]);
    t.rows = (0..report.times.len())
        .map(|i| {
            vec![
                Cell::Num(report.times[i]),
                Cell::Num(report.fidelity[i]),
                Cell::Num(report.norm[i]),
            ]
        })
        .collect();
    let summary = json!({
        "min_fidelity": report.min_fidelity,
        "fidelity_target": report.fidelity_target,
        "target_met": report.min_fidelity >= report.fidelity_target,
        "max_norm_drift": report.max_norm_drift,
        "rwa": report.rwa,
        "warning": report.warning,
        "sim": sc,
    });
    Ok(Output {
        primary: Document::Table(t),
        companions: vec![("summary".into(), Document::Json(summary))],
        invalid_regime: None,
    })
}

// ---------------------------------------------------------------------------
// post-emission checks

/// Re-checks emitted rows against the invariants of the producing module.
pub fn validate_table(command: Command, t: &Table) -> Result<()> {
    let fail = |i: usize, what: &str| Err(Error::Numerical(format!("{} row {i}: {what}", command.name())));
    match command {
        Command::PhaseDiagram | Command::Trajectory => {
            let col = |n: &str| t.column(n).expect("schema column");
            let (p, ra, ia, rb, ib) = (col("phase"), col("re_alpha"), col("im_alpha"), col("re_beta"), col("im_beta"));
            for (i, row) in t.rows.iter().enumerate() {
                let Some(Ok(phase)) = row[p].as_text().map(str::parse::<Phase>) else {
                    continue;
                };
                let v = |c: usize| row[c].as_f64().unwrap_or(f64::NAN);
                let bad_beta = v(rb).powi(2) + v(ib).powi(2) > 1.0 + 1e-12;
                let ok = match phase {
                    Phase::Normal => [ra, ia, rb, ib].iter().all(|&c| v(c) == 0.0),
                    Phase::SE => v(ia) == 0.0 && v(ib) == 0.0,
                    Phase::SM => v(ra) == 0.0 && v(rb) == 0.0,
                    Phase::SEMa | Phase::SEMb => true,
                };
                if !ok || bad_beta {
                    return fail(i, &format!("displacements violate the {phase} pattern"));
                }
                if let (Some(a), Some(b)) = (t.column("omega_minus"), t.column("omega_plus")) {
                    let (wm, wp) = (v(a), v(b));
                    if !(wm >= 0.0 && wp >= wm) {
                        return fail(i, "excitation energies must satisfy 0 <= omega_minus <= omega_plus");
                    }
                }
            }
        }
        Command::CriticalScan => {
            let (c, s) = (t.column("lambda_crit_over_omega0").unwrap(), t.column("status").unwrap());
            for (i, row) in t.rows.iter().enumerate() {
                if row[s].as_text() == Some("ok") && !(row[c].as_f64().unwrap_or(f64::NAN) > 0.0) {
                    return fail(i, "valid regime needs a positive critical coupling");
                }
            }
        }
        Command::SpectrumScan => {
            let (a, b) = (t.column("omega_minus").unwrap(), t.column("omega_plus").unwrap());
            for (i, row) in t.rows.iter().enumerate() {
                let (wm, wp) = (row[a].as_f64().unwrap_or(0.0), row[b].as_f64().unwrap_or(0.0));
                if wm > wp {
                    return fail(i, "omega_minus exceeds omega_plus");
                }
            }
        }
        Command::CouplingScan | Command::ValidateRwa | Command::ExactSim => {}
    }
    Ok(())
}

/// Parses a CSV produced by [`Table::to_csv`]. Cells that parse as numbers
/// become [`Cell::Num`].
pub fn parse_csv(text: &str) -> Result<Table> {
    let csv_err = |e: csv::Error| Error::Config(format!("invalid CSV: {e}"));
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let columns = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in r.records() {
        let cells = record
            .map_err(csv_err)?
            .iter()
            .map(|c| match c.parse::<f64>() {
                Ok(x) => Cell::Num(x),
                Err(_) => Cell::Text(c.to_string()),
            })
            .collect();
        rows.push(cells);
    }
    Ok(Table { columns, rows })
}
