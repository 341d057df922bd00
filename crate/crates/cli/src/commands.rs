use std::io::Write;

use qconfine_core::bounds::{critical_b_estimate, envelope_bound, heisenberg_lower, CriticalChoice, EnvelopeVariant};
use qconfine_core::exact::{confined_qes_solve, free_qes_solve, FixedParam, QESCondition};
use qconfine_core::precision::{format_fixed, format_significant, parse_float};
use qconfine_core::rug::Float;
use qconfine_core::scan::{self, Axis, ExportFormat, Param, ScanPoint, ScanSolver, SweepSpec};
use qconfine_core::{aim_solve_level, oracle, AimOptions, EigenResult, LevelLabel, PotentialSpec, PrecisionCtx};
use serde_json::{json, Value};

use crate::args::{Command, Settings};
use crate::report::{group_digits, Format, Report};
use crate::CliError;

/// Decimals printed for arbitrary-precision energies.
const DECIMALS: usize = 18;
/// Decimals printed for grid-oracle energies, which are good to about 1e-10.
const ORACLE_DECIMALS: usize = 12;
/// Decimals printed for quasi-exact couplings.
const EXACT_DECIMALS: usize = 20;
/// AIM and oracle energies agreeing to this are reported as in agreement.
const AGREEMENT_TOL: f64 = 1e-8;

pub fn execute(command: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    let s = command.settings()?;
    let default_format = match command {
        Command::Sweep(_) => "csv",
        _ => "text",
    };
    let format = Format::parse(s.get("format").unwrap_or(default_format))?;
    let report = match command {
        Command::Solve(_) => solve(&s)?,
        Command::Exact(_) => exact(&s)?,
        Command::Bounds(_) => bounds(&s)?,
        Command::ScanBc(_) => scan_bc(&s)?,
        Command::Ordering(_) => ordering(&s)?,
        Command::Cross(_) => cross(&s)?,
        Command::Sweep(_) => return sweep(&s, format, out),
    };
    report.emit(format, command.name(), s.get("output"), out)
}

fn bits(s: &Settings) -> Result<u32, CliError> {
    s.parse_or("precision-bits", 256u32)
}

fn precision(s: &Settings) -> Result<PrecisionCtx, CliError> {
    let bits = bits(s)?;
    let ctx = match s.parse::<f64>("tol")? {
        Some(tol) => PrecisionCtx::new(bits, tol),
        None => PrecisionCtx::for_bits(bits),
    };
    ctx.map_err(|e| CliError::Usage(e.to_string()))
}

fn potential(s: &Settings, bits: u32) -> Result<PotentialSpec, CliError> {
    Ok(PotentialSpec::parse(s.require("a")?, s.require("b")?, s.radius(), bits)?)
}

fn label(s: &Settings) -> Result<LevelLabel, CliError> {
    Ok(LevelLabel::new(s.parse_or("nodes", 0u32)?, s.parse_or("l", 0u32)?))
}

fn labels(s: &Settings, default: &str) -> Result<Vec<LevelLabel>, CliError> {
    let list = s.get("levels").unwrap_or(default);
    list.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<LevelLabel>().map_err(|e| CliError::Usage(format!("--levels: {e}"))))
        .collect()
}

fn scan_point(s: &Settings, varied: &[Param]) -> Result<ScanPoint, CliError> {
    let get = |key: &str, p: Param| -> Result<f64, CliError> {
        if varied.contains(&p) {
            Ok(s.parse(key)?.unwrap_or(0.0))
        } else {
            s.required(key)
        }
    };
    let radius = match s.radius() {
        Some(r) => Some(r.parse::<f64>().map_err(|_| CliError::Usage(format!("invalid value '{r}' for --radius")))?),
        None => None,
    };
    Ok(ScanPoint::new(get("a", Param::A)?, get("b", Param::B)?, radius))
}

fn scan_solver(s: &Settings) -> Result<ScanSolver, CliError> {
    match s.get("solver").unwrap_or("oracle") {
        "oracle" => Ok(ScanSolver::Oracle),
        "aim" => Ok(ScanSolver::Aim { bits: bits(s)? }),
        other => Err(CliError::Usage(format!("--solver {other} is not available here (use oracle or aim)"))),
    }
}

fn energy_text(e: &Float, decimals: usize) -> (String, String) {
    let plain = format_fixed(e, decimals);
    let grouped = group_digits(&plain);
    (plain, grouped)
}

fn radius_json(spec: &PotentialSpec) -> Value {
    spec.confinement.radius().map_or(Value::Null, |r| json!(format_significant(r, 20)))
}

fn solve(s: &Settings) -> Result<Report, CliError> {
    let ctx = precision(s)?;
    let spec = potential(s, ctx.mantissa_bits())?;
    let label = label(s)?;
    let which = s.get("solver").unwrap_or("aim");
    let (use_aim, use_oracle) = match which {
        "aim" => (true, false),
        "oracle" => (false, true),
        "both" => (true, true),
        other => return Err(CliError::Usage(format!("unknown solver '{other}' (use aim, oracle or both)"))),
    };
    let mut results: Vec<(EigenResult, usize)> = Vec::new();
    if use_aim {
        let r0 = s.get("r0").map(|v| parse_float(ctx.mantissa_bits(), v)).transpose()?;
        let opts = AimOptions {
            precision: ctx,
            r0,
            max_iter: s.parse_or("max-iter", qconfine_core::aim::DEFAULT_MAX_ITER)?,
            window: None,
        };
        results.push((aim_solve_level(&spec, label, &opts)?, DECIMALS));
    }
    if use_oracle {
        results.push((oracle::solve_level(&spec, label)?, ORACLE_DECIMALS));
    }

    let mut text = format!("{spec}  level {label} (n={}, l={})\n", label.n, label.l);
    let mut rows = Vec::new();
    let mut json_results = Vec::new();
    for (r, decimals) in &results {
        let (plain, grouped) = energy_text(&r.energy, *decimals);
        let what = if r.solver == qconfine_core::SolverKind::Aim { "N" } else { "refinements" };
        text.push_str(&format!("{:<7} E = {plain}   {grouped}   {what}={}\n", r.solver.to_string(), r.iterations));
        rows.push(vec![
            r.solver.to_string(),
            label.n.to_string(),
            label.l.to_string(),
            label.name(),
            plain.clone(),
            r.iterations.to_string(),
        ]);
        json_results.push(json!({
            "solver": r.solver.to_string(),
            "energy": plain,
            "iterations": r.iterations,
            "bits": r.precision_used.mantissa_bits(),
        }));
    }
    let mut json = json!({
        "a": format_significant(&spec.a, 20),
        "b": format_significant(&spec.b, 20),
        "radius": radius_json(&spec),
        "level": label.name(),
        "n": label.n,
        "l": label.l,
        "results": json_results,
    });
    if results.len() == 2 {
        let d = (results[0].0.energy_f64() - results[1].0.energy_f64()).abs();
        let agree = d <= AGREEMENT_TOL;
        text.push_str(&format!("agreement {agree} (|dE| = {d:.1e}, tolerance {AGREEMENT_TOL:.0e})\n"));
        json["agreement"] = json!(agree);
        json["difference"] = json!(d);
    }
    let header = ["solver", "label_n", "label_l", "label_name", "energy", "iterations"].map(String::from).to_vec();
    Ok(Report { text, json, table: Some((header, rows)) })
}

fn poly_text(q: &QESCondition) -> String {
    let mut terms = Vec::new();
    for (k, c) in q.poly_coeffs.coeffs().iter().enumerate() {
        let v = format_significant(c, 12);
        terms.push(match k {
            0 => v,
            1 => format!("({v}) r"),
            _ => format!("({v}) r^{k}"),
        });
    }
    terms.join(" + ")
}

fn exact(s: &Settings) -> Result<Report, CliError> {
    let ctx = precision(s)?;
    let bits = ctx.mantissa_bits();
    let n: u32 = s.required("n")?;
    let l: u32 = s.parse_or("l", 0)?;
    let fixed = FixedParam::parse(s.require("fix")?, bits)?;
    let confined = s.flag("confined")?;
    let sols = if confined { confined_qes_solve(n, l, &fixed, &ctx)? } else { free_qes_solve(n, l, &fixed, &ctx)? };

    let d = |x: &Float| format_fixed(x, EXACT_DECIMALS);
    let mut text = format!(
        "{} quasi-exact solutions, degree {n}, l={l}, {}: {}\n",
        if confined { "confined" } else { "free" },
        fixed.name(),
        sols.len()
    );
    let mut rows = Vec::new();
    let mut list = Vec::new();
    for (i, q) in sols.iter().enumerate() {
        let radius = q.radius.as_ref().map_or("inf".to_string(), d);
        let (e_plain, e_grouped) = energy_text(&q.energy, EXACT_DECIMALS);
        let residual = q.max_residual().to_f64();
        text.push_str(&format!("\n[{}] level {}, nodes={}\n", i + 1, q.label, q.node_count));
        text.push_str(&format!("  a        = {}\n", d(&q.a)));
        text.push_str(&format!("  b        = {}\n", d(&q.b)));
        text.push_str(&format!("  sqrt(2b) = {}\n", d(&q.sqrt_2b())));
        text.push_str(&format!("  R        = {radius}\n"));
        text.push_str(&format!("  E        = {e_plain}   {e_grouped}\n"));
        text.push_str(&format!("  residual = {residual:.1e}\n"));
        text.push_str(&format!("  f(r)     = {}\n", poly_text(q)));
        rows.push(vec![
            q.n.to_string(),
            q.label.n.to_string(),
            q.label.l.to_string(),
            q.label.name(),
            d(&q.a),
            d(&q.b),
            radius.clone(),
            e_plain.clone(),
            q.node_count.to_string(),
            format!("{residual:.3e}"),
        ]);
        list.push(json!({
            "degree": q.n,
            "level": q.label.name(),
            "a": d(&q.a),
            "b": d(&q.b),
            "sqrt_2b": d(&q.sqrt_2b()),
            "radius": q.radius.as_ref().map(d),
            "energy": e_plain,
            "node_count": q.node_count,
            "max_residual": residual,
            "poly_coeffs": q.poly_coeffs.coeffs().iter().map(|c| format_significant(c, 20)).collect::<Vec<_>>(),
        }));
    }
    let header = ["degree", "label_n", "label_l", "label_name", "a", "b", "radius", "energy", "nodes", "residual"]
        .map(String::from)
        .to_vec();
    Ok(Report { text, json: json!({ "confined": confined, "solutions": list }), table: Some((header, rows)) })
}

fn bounds(s: &Settings) -> Result<Report, CliError> {
    let bits = bits(s)?;
    let spec = potential(s, bits)?;
    let label = label(s)?;
    let mut text = format!("{spec}  level {label}\n");
    let mut json = json!({ "level": label.name() });
    let h = heisenberg_lower(&spec)?;
    text.push_str(&format!("heisenberg lower bound   {}\n", format_fixed(&h, DECIMALS)));
    json["heisenberg_lower"] = json!(format_fixed(&h, DECIMALS));
    if spec.confinement.is_free() && !(spec.b.is_zero() && spec.a <= 0) {
        for (name, v) in [
            ("lower envelope", EnvelopeVariant::LowerEnvelope),
            ("upper envelope", EnvelopeVariant::UpperEnvelope),
            ("sum approximation", EnvelopeVariant::SumApprox),
        ] {
            let e = envelope_bound(&spec, label, v)?;
            let note = if e.outside_derivation { "  (a <= 0: not a proven bound)" } else { "" };
            text.push_str(&format!("{name:<24} {}{note}\n", format_fixed(&e.value, DECIMALS)));
            json[name.replace(' ', "_")] = json!({ "value": format_fixed(&e.value, DECIMALS), "outside_derivation": e.outside_derivation });
        }
    }
    if spec.a > 0 {
        let mut choices = vec![("b_c upper estimate", CriticalChoice::UpperBound), ("b_c lower estimate", CriticalChoice::LowerBound)];
        if label.n == 0 {
            choices.push(("b_c sum estimate", CriticalChoice::SumLower));
        }
        for (name, choice) in choices {
            let v = critical_b_estimate(&spec.a, label, choice)?;
            text.push_str(&format!("{name:<24} {}\n", format_significant(&v, 12)));
            json[name.replace(' ', "_")] = json!(format_significant(&v, 12));
        }
    }
    Ok(Report { text, json, table: None })
}

fn scan_bc(s: &Settings) -> Result<Report, CliError> {
    let a: f64 = s.required("a")?;
    let point = scan_point(s, &[Param::B])?;
    let solver = scan_solver(s)?;
    let mut text = format!("critical couplings at a={a} R={}\n", point.radius.map_or("inf".into(), |r| r.to_string()));
    let mut rows = Vec::new();
    let mut found = Vec::new();
    for label in labels(s, "1s")? {
        let (lo, hi) = scan::default_bc_window(a, label);
        let window = (s.parse_or("b-min", lo)?, s.parse_or("b-max", hi)?);
        let cc = scan::find_bc(a, point.radius, label, window, solver)?;
        let bc = format_significant(&Float::with_val(64, cc.b_c), 6);
        text.push_str(&format!(
            "{:<4} b_c = {bc}   bracket [{:.10e}, {:.10e}]   E(b_c) = {:.1e}\n",
            label.name(),
            cc.bracket.0,
            cc.bracket.1,
            cc.energy_at_bc
        ));
        rows.push(vec![label.n.to_string(), label.l.to_string(), label.name(), bc, cc.bracket.0.to_string(), cc.bracket.1.to_string()]);
        found.push(cc);
    }
    let reference_setting = a == 1.0 && point.radius.map_or(true, |r| r == scan::FREE_RADIUS);
    let discrepancies = if reference_setting { scan::compare_with_reference(&found) } else { Vec::new() };
    for d in &discrepancies {
        text.push_str(&format!("discrepancy: {d}\n"));
    }
    let json = json!({ "critical_couplings": found, "discrepancies": discrepancies });
    let header = ["label_n", "label_l", "label_name", "b_c", "bracket_lo", "bracket_hi"].map(String::from).to_vec();
    Ok(Report { text, json, table: Some((header, rows)) })
}

fn ordering(s: &Settings) -> Result<Report, CliError> {
    let point = scan_point(s, &[])?;
    let labels = LevelLabel::up_to(s.parse_or("max-nu", 7)?, s.parse_or("max-l", 4)?);
    let table = scan::ordering(&point, &labels, scan_solver(s)?)?;
    let count = s.parse_or("count", table.groups.len())?;
    let mut text = format!("{point}\n{}\n", table.leading(count).join(" "));
    let mut rows = Vec::new();
    for (rank, group) in table.groups.iter().take(count).enumerate() {
        for (label, e) in group {
            let degenerate = group.len() > 1;
            text.push_str(&format!("{:>3}  {:<4} {e:>22.12}{}\n", rank + 1, label.name(), if degenerate { "  degenerate" } else { "" }));
            rows.push(vec![(rank + 1).to_string(), label.n.to_string(), label.l.to_string(), label.name(), format!("{e:.12}"), degenerate.to_string()]);
        }
    }
    let json = json!({ "parameters": point, "sequence": table.leading(count), "groups": table.groups.iter().take(count).collect::<Vec<_>>() });
    let header = ["rank", "label_n", "label_l", "label_name", "energy", "degenerate"].map(String::from).to_vec();
    Ok(Report { text, json, table: Some((header, rows)) })
}

fn cross(s: &Settings) -> Result<Report, CliError> {
    let pair = s.require("pair")?;
    let parts: Vec<&str> = pair.split([',', '/']).map(str::trim).collect();
    let [first, second] = parts.as_slice() else {
        return Err(CliError::Usage(format!("--pair expects two levels such as 3s,4f, got '{pair}'")));
    };
    let parse = |t: &str| t.parse::<LevelLabel>().map_err(|e| CliError::Usage(format!("--pair: {e}")));
    let pair = (parse(first)?, parse(second)?);
    let vary: Param = s.require("vary")?.parse().map_err(|e: qconfine_core::Error| CliError::Usage(e.to_string()))?;
    let window = (s.required("from")?, s.required("to")?);
    let base = scan_point(s, &[vary])?;
    let ev = scan::find_crossing(pair, vary, &base, window, scan_solver(s)?)?;
    let text = format!(
        "{} and {} cross at {} = {:.10} (E = {:.10})\n{} lies lower for {} < {:.10}\n",
        pair.0, pair.1, ev.parameter, ev.crossing_value, ev.energies_equal_at, ev.level_lo, ev.parameter, ev.crossing_value
    );
    let json = serde_json::to_value(&ev).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(Report { text, json, table: None })
}

fn axis(s: &Settings, suffix: &str) -> Result<Option<Axis>, CliError> {
    let Some(name) = s.get(&format!("vary{suffix}")) else { return Ok(None) };
    let param: Param = name.parse().map_err(|e: qconfine_core::Error| CliError::Usage(e.to_string()))?;
    let from: f64 = s.required(&format!("from{suffix}"))?;
    let to: f64 = s.required(&format!("to{suffix}"))?;
    let count: usize = s.required(&format!("count{suffix}"))?;
    if count == 0 {
        return Err(CliError::Usage(format!("--count{suffix} must be positive")));
    }
    if s.flag(&format!("log{suffix}"))? {
        Ok(Some(Axis::logspace(param, from, to, count).map_err(|e| CliError::Usage(e.to_string()))?))
    } else {
        Ok(Some(Axis::linspace(param, from, to, count)))
    }
}

fn sweep(s: &Settings, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let first = axis(s, "")?.ok_or_else(|| CliError::Usage("missing --vary".into()))?;
    let mut axes = vec![first];
    axes.extend(axis(s, "2")?);
    let varied: Vec<Param> = axes.iter().map(|a| a.param).collect();
    let spec = SweepSpec { base: scan_point(s, &varied)?, axes, labels: labels(s, "")?, solver: scan_solver(s)? };
    if spec.labels.is_empty() {
        return Err(CliError::Usage("missing --levels".into()));
    }
    let rows = scan::sweep(&spec)?;
    let export = match format {
        Format::Csv | Format::Text => ExportFormat::Csv,
        Format::Json => ExportFormat::Json,
    };
    let mut body = Vec::new();
    scan::write_rows(&rows, export, &mut body).map_err(CliError::Io)?;
    match s.get("output") {
        Some(path) => {
            std::fs::write(path, &body).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
            writeln!(out, "wrote {} rows to {path}", rows.len()).map_err(|e| CliError::Io(e.to_string()))
        }
        None => out.write_all(&body).map_err(|e| CliError::Io(e.to_string())),
    }
}
