//! Spectral characteristics over parameter ranges: critical couplings where a
//! level crosses E = 0, level orderings, crossings between labelled levels,
//! and tabulated sweeps.
//!
//! Parameters are plain doubles here. Each point is one independent solve,
//! by the grid oracle unless AIM is requested. With the oracle an infinite
//! radius is realised as a wall at [`FREE_RADIUS`]; AIM solves the free
//! problem directly.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::aim::{aim_solve_level, AimOptions};
use crate::error::{Error, Result};
use crate::oracle;
use crate::precision::{format_significant, PrecisionCtx};
use crate::types::{LevelLabel, PotentialSpec, SolverKind};

/// Wall radius standing in for free space in oracle scans.
pub const FREE_RADIUS: f64 = 100.0;

/// Energies closer than this are reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// |E| target when locating a critical coupling.
pub const BC_ENERGY_TOL: f64 = 1e-8;

/// Parameter tolerance for crossings.
pub const CROSSING_TOL: f64 = 1e-8;

/// Significant digits of energies in exported tables.
pub const EXPORT_DIGITS: usize = 18;

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanSolver {
    Oracle,
    /// AIM at the given mantissa width, seeded by the oracle.
    Aim { bits: u32 },
}

impl Default for ScanSolver {
    fn default() -> Self {
        ScanSolver::Oracle
    }
}

impl ScanSolver {
    pub fn kind(&self) -> SolverKind {
        match self {
            ScanSolver::Oracle => SolverKind::GridOracle,
            ScanSolver::Aim { .. } => SolverKind::Aim,
        }
    }
}

/// A point (a, b, R) in parameter space; `radius = None` is free space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub a: f64,
    pub b: f64,
    pub radius: Option<f64>,
}

impl ScanPoint {
    pub fn new(a: f64, b: f64, radius: Option<f64>) -> Self {
        Self { a, b, radius }
    }

    fn with(&self, param: Param, value: f64) -> Self {
        let mut p = *self;
        match param {
            Param::A => p.a = value,
            Param::B => p.b = value,
            Param::R => p.radius = Some(value),
        }
        p
    }
}

impl fmt::Display for ScanPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.radius {
            Some(r) => write!(f, "a={} b={} R={}", self.a, self.b, r),
            None => write!(f, "a={} b={} R=inf", self.a, self.b),
        }
    }
}

/// Energy of one labelled level at one parameter point.
pub fn level_energy(point: &ScanPoint, label: LevelLabel, solver: ScanSolver) -> Result<Float> {
    if point.radius.is_none() && point.b == 0.0 && point.a > 0.0 {
        // hydrogen-like: -a^2 / (2 nu^2)
        let nu = f64::from(label.principal());
        let bits = match solver {
            ScanSolver::Oracle => 64,
            ScanSolver::Aim { bits } => bits,
        };
        let a = Float::with_val(bits, point.a);
        return Ok(-(a.square() / (2.0 * nu * nu)));
    }
    match solver {
        ScanSolver::Oracle => {
            let radius = point.radius.unwrap_or(FREE_RADIUS);
            let spec = PotentialSpec::new(point.a, point.b, Some(radius), 64)?;
            Ok(oracle::solve_level(&spec, label)?.energy)
        }
        ScanSolver::Aim { bits } => {
            let spec = PotentialSpec::new(point.a, point.b, point.radius, bits)?;
            let opts = AimOptions { precision: PrecisionCtx::for_bits(bits)?, ..AimOptions::default() };
            Ok(aim_solve_level(&spec, label, &opts)?.energy)
        }
    }
}

fn energy_f64(point: &ScanPoint, label: LevelLabel, solver: ScanSolver) -> Result<f64> {
    level_energy(point, label, solver).map(|e| e.to_f64())
}

/// Coupling b_c at which a level passes through E = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalCoupling {
    pub label: LevelLabel,
    pub a: f64,
    /// `None` for free space.
    pub radius: Option<f64>,
    pub b_c: f64,
    /// Final bisection interval: E < 0 at the left end, E > 0 at the right.
    pub bracket: (f64, f64),
    pub energy_at_bc: f64,
}

/// Bisects b -> E(a, b, R) for the zero crossing; E rises strictly with b.
pub fn find_bc(a: f64, radius: Option<f64>, label: LevelLabel, window: (f64, f64), solver: ScanSolver) -> Result<CriticalCoupling> {
    let (mut lo, mut hi) = window;
    if !(lo >= 0.0 && hi > lo) {
        return Err(Error::InvalidInput(format!("b window ({lo}, {hi}) must satisfy 0 <= low < high")));
    }
    let energy = |b: f64| energy_f64(&ScanPoint::new(a, b, radius), label, solver);
    let e_lo = energy(lo)?;
    let e_hi = energy(hi)?;
    if !(e_lo < 0.0 && e_hi > 0.0) {
        return Err(Error::NoSignChange(format!(
            "{label} at a={a}: E({lo}) = {e_lo:.3e}, E({hi}) = {e_hi:.3e}; the level does not cross zero in the window"
        )));
    }
    let mut e_mid = e_lo;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        e_mid = energy(mid)?;
        if e_mid < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if e_mid.abs() <= BC_ENERGY_TOL && hi - lo <= 1e-7 * hi {
            break;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(CriticalCoupling { label, a, radius, b_c: 0.5 * (lo + hi), bracket: (lo, hi), energy_at_bc: e_mid })
}

/// Default search window for b_c: from 0 to just above the envelope estimate
/// (27/32) a^4 / nu^4, which b_c never exceeds.
pub fn default_bc_window(a: f64, label: LevelLabel) -> (f64, f64) {
    let nu = f64::from(label.principal());
    (0.0, 1.05 * 27.0 / 32.0 * a.powi(4) / nu.powi(4))
}

/// Literature values of b_c at a = 1, R = 100, as (label, printed value).
pub const REFERENCE_BC: [(&str, &str); 10] = [
    ("1s", "0.32533"),
    ("2s", "0.004831"),
    ("2p", "0.00771"),
    ("3s", "0.00042"),
    ("3p", "0.00051"),
    ("3d", "0.00079"),
    ("4s", "0.00007"),
    ("4p", "0.00008"),
    ("4d", "0.00010"),
    ("4f", "0.00015"),
];

/// A computed b_c that differs from its reference value by more than one
/// unit in the last printed digit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcDiscrepancy {
    pub label: LevelLabel,
    pub reference: f64,
    pub computed: f64,
    pub tolerance: f64,
}

impl fmt::Display for BcDiscrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "b_c({}) = {:.6e} computed, reference {} (allowed deviation {:.0e})",
            self.label, self.computed, self.reference, self.tolerance
        )
    }
}

/// One unit in the last digit of a decimal literal.
pub fn last_digit_unit(literal: &str) -> f64 {
    let decimals = literal.split_once('.').map_or(0, |(_, frac)| frac.len());
    10f64.powi(-(decimals as i32))
}

/// Compares computed couplings with [`REFERENCE_BC`], returning only the
/// disagreements.
pub fn compare_with_reference(computed: &[CriticalCoupling]) -> Vec<BcDiscrepancy> {
    let mut out = Vec::new();
    for (name, value) in REFERENCE_BC {
        let label: LevelLabel = name.parse().expect("reference labels are well formed");
        let Some(cc) = computed.iter().find(|c| c.label == label) else { continue };
        let reference: f64 = value.parse().expect("reference values are well formed");
        let tolerance = last_digit_unit(value);
        if (cc.b_c - reference).abs() > tolerance {
            out.push(BcDiscrepancy { label, reference, computed: cc.b_c, tolerance });
        }
    }
    out
}

/// Levels sorted by energy; levels within [`DEGENERACY_TOL`] share a group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingTable {
    pub parameters: ScanPoint,
    /// Ascending groups of (label, energy); a group with several members is a
    /// degeneracy.
    pub groups: Vec<Vec<(LevelLabel, f64)>>,
}

impl OrderingTable {
    /// Labels in ascending order, degenerate groups listed by l.
    pub fn sequence(&self) -> Vec<LevelLabel> {
        self.groups.iter().flat_map(|g| g.iter().map(|(l, _)| *l)).collect()
    }

    pub fn degeneracies(&self) -> impl Iterator<Item = &Vec<(LevelLabel, f64)>> {
        self.groups.iter().filter(|g| g.len() > 1)
    }

    /// Names of the first `k` groups; degenerate members are joined by `=`.
    pub fn leading(&self, k: usize) -> Vec<String> {
        self.groups
            .iter()
            .take(k)
            .map(|g| g.iter().map(|(l, _)| l.name()).collect::<Vec<_>>().join("="))
            .collect()
    }
}

impl fmt::Display for OrderingTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.leading(self.groups.len()).join(" "))
    }
}

/// Solves every label at one point and sorts by energy.
pub fn ordering(point: &ScanPoint, labels: &[LevelLabel], solver: ScanSolver) -> Result<OrderingTable> {
    let energies: Vec<(LevelLabel, f64)> = labels
        .par_iter()
        .map(|&l| energy_f64(point, l, solver).map(|e| (l, e)))
        .collect::<Result<_>>()?;
    let mut sorted = energies;
    sorted.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.l.cmp(&y.0.l)));
    let mut groups: Vec<Vec<(LevelLabel, f64)>> = Vec::new();
    for item in sorted {
        match groups.last_mut() {
            Some(g) if (item.1 - g[0].1).abs() <= DEGENERACY_TOL => g.push(item),
            _ => groups.push(vec![item]),
        }
    }
    for g in &mut groups {
        g.sort_by_key(|(l, _)| l.l);
    }
    Ok(OrderingTable { parameters: *point, groups })
}

/// A scanned parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Param {
    A,
    B,
    R,
}

impl Param {
    pub fn name(&self) -> &'static str {
        match self {
            Param::A => "a",
            Param::B => "b",
            Param::R => "R",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "a" => Ok(Param::A),
            "b" => Ok(Param::B),
            "R" | "r" | "radius" => Ok(Param::R),
            other => Err(Error::InvalidInput(format!("unknown parameter '{other}' (use a, b or R)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingEvent {
    /// The level lower in energy at the left end of the window.
    pub level_lo: LevelLabel,
    pub level_hi: LevelLabel,
    pub parameter: Param,
    pub crossing_value: f64,
    pub energies_equal_at: f64,
    pub bracket: (f64, f64),
}

/// Bisects E(first) - E(second) as `vary` moves across `window`, the other
/// parameters held at `base`.
pub fn find_crossing(
    pair: (LevelLabel, LevelLabel),
    vary: Param,
    base: &ScanPoint,
    window: (f64, f64),
    solver: ScanSolver,
) -> Result<CrossingEvent> {
    if vary == Param::A {
        return Err(Error::InvalidInput("crossings are scanned in b or R".into()));
    }
    let (mut lo, mut hi) = window;
    if !(hi > lo) {
        return Err(Error::InvalidInput(format!("empty window ({lo}, {hi})")));
    }
    let diff = |x: f64| -> Result<(f64, f64)> {
        let p = base.with(vary, x);
        let e1 = energy_f64(&p, pair.0, solver)?;
        let e2 = energy_f64(&p, pair.1, solver)?;
        Ok((e1 - e2, 0.5 * (e1 + e2)))
    };
    let (d_lo, _) = diff(lo)?;
    let (d_hi, _) = diff(hi)?;
    if d_lo == 0.0 || d_hi == 0.0 || (d_lo < 0.0) == (d_hi < 0.0) {
        return Err(Error::NoSignChange(format!(
            "{} and {} keep their order for {vary} in ({lo}, {hi})",
            pair.0, pair.1
        )));
    }
    let (level_lo, level_hi) = if d_lo < 0.0 { pair } else { (pair.1, pair.0) };
    let rising = d_lo < 0.0;
    let mut common = 0.0;
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= CROSSING_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (d, e) = diff(mid)?;
        common = e;
        if (d < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CrossingEvent {
        level_lo,
        level_hi,
        parameter: vary,
        crossing_value: 0.5 * (lo + hi),
        energies_equal_at: common,
        bracket: (lo, hi),
    })
}

/// Values taken by one swept parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: Param,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn linspace(param: Param, start: f64, end: f64, count: usize) -> Self {
        let values = match count {
            0 => Vec::new(),
            1 => vec![start],
            _ => (0..count).map(|i| start + (end - start) * i as f64 / (count - 1) as f64).collect(),
        };
        Self { param, values }
    }

    /// `count` points spaced evenly in log10 between `start` and `end`.
    pub fn logspace(param: Param, start: f64, end: f64, count: usize) -> Result<Self> {
        if !(start > 0.0 && end > 0.0) {
            return Err(Error::InvalidInput("logspace bounds must be positive".into()));
        }
        let lin = Self::linspace(param, start.log10(), end.log10(), count);
        Ok(Self { param, values: lin.values.into_iter().map(|v| 10f64.powf(v)).collect() })
    }
}

/// A one- or two-axis grid of solves.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ScanPoint,
    pub axes: Vec<Axis>,
    pub labels: Vec<LevelLabel>,
    pub solver: ScanSolver,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param1: f64,
    pub param2: Option<f64>,
    pub label_n: u32,
    pub label_l: u32,
    pub label_name: String,
    /// Decimal with [`EXPORT_DIGITS`] significant digits; empty if the solve
    /// failed.
    pub energy: String,
    pub solver: String,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::InvalidInput(format!("unknown export format '{other}'"))),
        }
    }
}

/// Runs the grid. Rows come out in grid order (first axis outermost), then
/// label order, independent of how the solves were scheduled. Failed solves
/// give rows with `converged = false`.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let (first, second) = match spec.axes.as_slice() {
        [x] => (x, None),
        [x, y] => (x, Some(y)),
        _ => return Err(Error::InvalidInput("a sweep needs one or two axes".into())),
    };
    if second.is_some_and(|y| y.param == first.param) {
        return Err(Error::InvalidInput(format!("axis {} given twice", first.param)));
    }
    let mut jobs = Vec::new();
    for &x in &first.values {
        match second {
            None => {
                for &label in &spec.labels {
                    jobs.push((x, None, label));
                }
            }
            Some(axis) => {
                for &y in &axis.values {
                    for &label in &spec.labels {
                        jobs.push((x, Some(y), label));
                    }
                }
            }
        }
    }
    let solver_name = spec.solver.kind().to_string();
    let rows = jobs
        .par_iter()
        .map(|&(x, y, label)| {
            let mut point = spec.base.with(first.param, x);
            if let (Some(axis), Some(y)) = (second, y) {
                point = point.with(axis.param, y);
            }
            let energy = level_energy(&point, label, spec.solver).ok();
            SweepRow {
                param1: x,
                param2: y,
                label_n: label.n,
                label_l: label.l,
                label_name: label.name(),
                converged: energy.is_some(),
                energy: energy.map_or_else(String::new, |e| format_significant(&e, EXPORT_DIGITS)),
                solver: solver_name.clone(),
            }
        })
        .collect();
    Ok(rows)
}

pub fn write_rows<W: Write>(rows: &[SweepRow], format: ExportFormat, out: W) -> std::result::Result<(), String> {
    match format {
        ExportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["param1", "param2", "label_n", "label_l", "label_name", "energy", "solver", "converged"])
                .map_err(|e| e.to_string())?;
            for r in rows {
                w.write_record([
                    r.param1.to_string(),
                    r.param2.map_or_else(String::new, |v| v.to_string()),
                    r.label_n.to_string(),
                    r.label_l.to_string(),
                    r.label_name.clone(),
                    r.energy.clone(),
                    r.solver.clone(),
                    r.converged.to_string(),
                ])
                .map_err(|e| e.to_string())?;
            }
            w.flush().map_err(|e| e.to_string())
        }
        ExportFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows).map_err(|e| e.to_string())?;
            writeln!(out).map_err(|e| e.to_string())
        }
    }
}

/// Runs the sweep and writes it to `path`.
pub fn sweep_export(spec: &SweepSpec, path: &Path, format: ExportFormat) -> Result<Vec<SweepRow>> {
    let rows = sweep(spec)?;
    let file = File::create(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    write_rows(&rows, format, BufWriter::new(file)).map_err(|message| Error::Serialize { path: path.to_path_buf(), message })?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lbl(s: &str) -> LevelLabel {
        s.parse().unwrap()
    }

    #[test]
    fn hydrogen_ordering_reports_degeneracy() {
        let labels = LevelLabel::up_to(3, 2);
        let t = ordering(&ScanPoint::new(1.0, 0.0, None), &labels, ScanSolver::Oracle).unwrap();
        assert_eq!(t.leading(3), ["1s", "2s=2p", "3s=3p=3d"]);
        assert_eq!(t.degeneracies().count(), 2);
    }

    #[test]
    fn ground_state_critical_coupling() {
        let cc = find_bc(1.0, Some(100.0), lbl("1s"), default_bc_window(1.0, lbl("1s")), ScanSolver::Oracle).unwrap();
        assert!((cc.b_c - 0.32533).abs() < 1e-4, "{cc:?}");
        assert!(cc.energy_at_bc.abs() <= BC_ENERGY_TOL);
        let w = cc.bracket.1 - cc.bracket.0;
        let e = |b: f64| energy_f64(&ScanPoint::new(1.0, b, Some(100.0)), lbl("1s"), ScanSolver::Oracle).unwrap();
        assert!(e(cc.b_c - 10.0 * w) < 0.0 && e(cc.b_c + 10.0 * w) > 0.0);
    }

    #[test]
    fn critical_coupling_scales_as_a_to_the_fourth() {
        // E(a, b, R) = E(2a, 16b, R/2) / 4
        let s = lbl("1s");
        let one = find_bc(1.0, Some(100.0), s, default_bc_window(1.0, s), ScanSolver::Oracle).unwrap();
        let two = find_bc(2.0, Some(50.0), s, default_bc_window(2.0, s), ScanSolver::Oracle).unwrap();
        assert!((two.b_c / one.b_c - 16.0).abs() < 16.0 * 1e-6, "{} vs {}", two.b_c, one.b_c);
    }

    #[test]
    fn repulsive_coulomb_never_crosses_zero() {
        let r = find_bc(-1.0, Some(100.0), lbl("1s"), (0.0, 1.0), ScanSolver::Oracle);
        assert!(matches!(r, Err(Error::NoSignChange(_))));
    }

    #[test]
    fn ground_state_never_crosses() {
        let r = find_crossing((lbl("1s"), lbl("2p")), Param::B, &ScanPoint::new(1.0, 0.0, None), (0.0, 0.5), ScanSolver::Oracle);
        assert!(matches!(r, Err(Error::NoSignChange(_))));
    }

    #[test]
    fn crossing_flips_order_once() {
        let base = ScanPoint::new(1.0, 0.0, Some(100.0));
        let ev = find_crossing((lbl("3s"), lbl("4f")), Param::B, &base, (0.001, 0.5), ScanSolver::Oracle).unwrap();
        assert_eq!(ev.level_lo, lbl("3s"));
        let labels = [lbl("3s"), lbl("4f")];
        let before = ordering(&base.with(Param::B, ev.bracket.0 * 0.9), &labels, ScanSolver::Oracle).unwrap();
        let after = ordering(&base.with(Param::B, ev.bracket.1 * 1.1), &labels, ScanSolver::Oracle).unwrap();
        assert_eq!(before.sequence(), labels);
        assert_eq!(after.sequence(), [lbl("4f"), lbl("3s")]);
        // the order is the same everywhere else on a coarse grid
        for i in 1..10 {
            let b = 0.001 + (0.5 - 0.001) * f64::from(i) / 10.0;
            let d = energy_f64(&base.with(Param::B, b), labels[0], ScanSolver::Oracle).unwrap()
                - energy_f64(&base.with(Param::B, b), labels[1], ScanSolver::Oracle).unwrap();
            assert_eq!(d < 0.0, b < ev.crossing_value, "b = {b}");
        }
    }

    #[test]
    fn sweep_rows_are_deterministic() {
        let spec = SweepSpec {
            base: ScanPoint::new(1.0, 0.5, None),
            axes: vec![Axis::linspace(Param::R, 1.0, 2.0, 3)],
            labels: vec![lbl("1s"), lbl("2p")],
            solver: ScanSolver::Oracle,
        };
        let rows = sweep(&spec).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!((rows[0].param1, rows[0].label_name.as_str()), (1.0, "1s"));
        assert_eq!((rows[1].param1, rows[1].label_name.as_str()), (1.0, "2p"));
        assert!(rows[0].energy.starts_with("2.4999999") || rows[0].energy.starts_with("2.5000000"));
        let mut first = Vec::new();
        let mut second = Vec::new();
        write_rows(&rows, ExportFormat::Csv, &mut first).unwrap();
        write_rows(&sweep(&spec).unwrap(), ExportFormat::Csv, &mut second).unwrap();
        assert_eq!(first, second);
        let text = String::from_utf8(first).unwrap();
        assert!(text.starts_with("param1,param2,label_n,label_l,label_name,energy,solver,converged\n"));
    }

    #[test]
    fn export_reports_path_on_failure() {
        let spec = SweepSpec {
            base: ScanPoint::new(1.0, 0.5, Some(1.0)),
            axes: vec![Axis::linspace(Param::B, 0.5, 0.5, 1)],
            labels: vec![lbl("1s")],
            solver: ScanSolver::Oracle,
        };
        let bad = Path::new("/nonexistent-dir/out.csv");
        match sweep_export(&spec, bad, ExportFormat::Csv) {
            Err(Error::Io { path, .. }) => assert_eq!(path, bad),
            other => panic!("expected an I/O error, got {other:?}"),
        }
    }

    #[test]
    fn reference_units() {
        assert_eq!(last_digit_unit("0.32533"), 1e-5);
        assert_eq!(last_digit_unit("0.004831"), 1e-6);
        let cc = CriticalCoupling { label: lbl("2s"), a: 1.0, radius: Some(100.0), b_c: 0.0049, bracket: (0.0, 0.0), energy_at_bc: 0.0 };
        let d = compare_with_reference(&[cc]);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].reference, 0.004831);
    }

    #[test]
    fn logspace_endpoints() {
        let ax = Axis::logspace(Param::B, 1e-5, 1e-2, 4).unwrap();
        assert!((ax.values[0] - 1e-5).abs() < 1e-18);
        assert!((ax.values[3] - 1e-2).abs() < 1e-15);
        assert!(Axis::logspace(Param::B, 0.0, 1.0, 3).is_err());
    }
}
