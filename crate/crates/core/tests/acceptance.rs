//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qconfine_core::bounds::{critical_b_estimate, envelope_bound, CriticalChoice, EnvelopeVariant};
use qconfine_core::exact::{confined_qes_solve, free_qes_solve, FixedParam, QESCondition};
use qconfine_core::oracle;
use qconfine_core::precision::parse_float;
use qconfine_core::rug::Float;
use qconfine_core::scan::{self, ScanPoint, ScanSolver};
use qconfine_core::{aim_solve_level, AimOptions, LevelLabel, PotentialSpec, PrecisionCtx};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const BITS: u32 = 256;

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

/// Accumulates named checks.
#[derive(Default)]
struct Checks {
    failed: usize,
    total: usize,
    details: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, line: String) {
        self.total += 1;
        if !ok {
            self.failed += 1;
        }
        self.details.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.details.push(format!("note {line}"));
    }

    fn finish(self, what: &str) -> Outcome {
        Outcome {
            pass: self.failed == 0,
            summary: format!("{what}: {}/{} checks", self.total - self.failed, self.total),
            details: self.details,
        }
    }
}

fn f(s: &str) -> Float {
    parse_float(BITS, s).unwrap()
}

fn spec(a: &str, b: &str, radius: Option<&str>) -> PotentialSpec {
    PotentialSpec::parse(a, b, radius, BITS).unwrap()
}

fn aim(spec: &PotentialSpec, n: u32, l: u32) -> (Float, Duration) {
    let start = Instant::now();
    let r = aim_solve_level(spec, LevelLabel::new(n, l), &AimOptions::default());
    let e = r.unwrap_or_else(|e| panic!("AIM failed for {spec} ({n},{l}): {e}")).energy;
    (e, start.elapsed())
}

fn diff(x: &Float, reference: &str) -> f64 {
    Float::with_val(BITS, x - f(reference)).abs().to_f64()
}

fn rel(x: &Float, y: &Float) -> f64 {
    let d = Float::with_val(BITS, x - y).abs();
    (d / Float::with_val(BITS, y.abs_ref()).max(&Float::with_val(BITS, 1e-300))).to_f64()
}

fn free_aim_table() -> Outcome {
    let mut c = Checks::default();
    let cases = [
        ("1", 1, 0, "2.5", 1e-18),
        ("1", 0, 0, "0.179668484653553873", 1e-15),
        ("1", 1, 1, "3.801929609626278046", 1e-15),
        ("1", 1, 4, "7.058140776824529475", 1e-15),
        ("-1", 0, 0, "2.5", 1e-18),
        ("-1", 1, 0, "4.380233836413610273", 1e-15),
    ];
    for (a, n, l, reference, tol) in cases {
        let (e, t) = aim(&spec(a, "0.5", None), n, l);
        let d = diff(&e, reference);
        c.check(d <= tol && t.as_secs_f64() <= 60.0, format!("a={a} (n,l)=({n},{l}) |E-{reference}| = {d:.1e} (tol {tol:.0e}) in {:.1} s", t.as_secs_f64()));
    }
    c.finish("free AIM energies")
}

fn confined_aim_table() -> Outcome {
    let mut c = Checks::default();
    let cases = [
        ("1", "0.5", "1", 0, 0, "2.5", 1e-18),
        ("1", "0.5", "1", 0, 1, "8.404448391842929575", 1e-15),
        ("1", "0.5", "1", 4, 0, "119.493804921354632859", 1e-15),
        ("-1", "0.5", "1", 0, 0, "7.427602986235605737", 1e-15),
        ("-1", "0.5", "1", 4, 0, "127.540759830804826131", 1e-15),
        ("1", "0.5", "0.1", 0, 0, "468.994438340395273843", 1e-15),
        ("-5", "0.5", "1", 0, 0, "15.581919590917726881", 1e-15),
        ("1", "0.1", "1", 0, 0, "2.399281395696719214", 1e-15),
        ("1", "10", "1", 0, 0, "4.698782960476752179", 1e-15),
    ];
    for (a, b, r, n, l, reference, tol) in cases {
        let (e, t) = aim(&spec(a, b, Some(r)), n, l);
        let d = diff(&e, reference);
        c.check(d <= tol, format!("a={a} b={b} R={r} (n,l)=({n},{l}) |E-{reference}| = {d:.1e} in {:.1} s", t.as_secs_f64()));
    }
    c.finish("confined AIM energies")
}

fn closest<'a>(sols: &'a [QESCondition], key: impl Fn(&QESCondition) -> f64, target: f64) -> &'a QESCondition {
    sols.iter()
        .min_by(|x, y| (key(x) - target).abs().total_cmp(&(key(y) - target).abs()))
        .expect("at least one solution")
}

fn qes_anchors() -> Outcome {
    let mut c = Checks::default();
    let ctx = PrecisionCtx::default();
    let radius = |q: &QESCondition| q.radius.as_ref().map_or(f64::NAN, Float::to_f64);

    let sols = confined_qes_solve(2, 0, &FixedParam::A(f("1")), &ctx).unwrap();
    let q = closest(&sols, radius, 2.0843);
    let (ds, dr, de) = (
        diff(&q.sqrt_2b(), "0.76025880213480504582"),
        diff(q.radius.as_ref().unwrap(), "2.0843217092058454961"),
        diff(&q.energy, "3.4211646096066227062"),
    );
    c.check(ds.max(dr).max(de) <= 1e-15, format!("n=2 fixed a=1: sqrt(2b) {ds:.1e}, R {dr:.1e}, E {de:.1e}, nodes {}", q.node_count));
    c.note(format!("n=2 fixed a=1 has {} solutions in total", sols.len()));

    let sols = confined_qes_solve(2, 0, &FixedParam::sqrt_2b(f("2")), &ctx).unwrap();
    let q = closest(&sols, |q| q.a.to_f64(), -1.6219);
    let (da, dr, de) = (
        diff(&q.a, "-1.6219380762368883824"),
        diff(q.radius.as_ref().unwrap(), "1.0232416568868508038"),
        diff(&q.energy, "9"),
    );
    c.check(da.max(dr).max(de) <= 1e-15, format!("n=2 fixed sqrt(2b)=2: a {da:.1e}, R {dr:.1e}, E {de:.1e}"));

    let sols = confined_qes_solve(1, 0, &FixedParam::A(f("1")), &ctx).unwrap();
    let plus = (5.0 + 5f64.sqrt()) / 2.0;
    let q = closest(&sols, radius, plus);
    let r_exact = (Float::with_val(BITS, 5).sqrt() + 5u32) / 2u32;
    let dr = rel(q.radius.as_ref().unwrap(), &r_exact);
    let (db, de) = (diff(&q.b, "0.02"), diff(&q.energy, "0.7"));
    c.check(dr.max(db).max(de) <= 1e-20, format!("n=1 fixed a=1, R=(5+sqrt5)/2: R {dr:.1e}, b {db:.1e}, E {de:.1e}, nodes {}", q.node_count));

    let sols = confined_qes_solve(0, 0, &FixedParam::A(f("1")), &ctx).unwrap();
    let ok = sols.len() == 1 && {
        let q = &sols[0];
        diff(&q.b, "0.5").max(diff(q.radius.as_ref().unwrap(), "1")).max(diff(&q.energy, "2.5")) <= 1e-20
    };
    c.check(ok, format!("n=0 fixed a=1 gives (a,b,R,E)=(1,0.5,1,2.5): {} solution(s)", sols.len()));
    c.finish("quasi-exact anchors")
}

fn eigenfunction_residuals() -> Outcome {
    let mut c = Checks::default();
    let ctx = PrecisionCtx::default();
    let mut conditions = Vec::new();
    for n in 1..=3 {
        for l in 0..=2 {
            conditions.extend(free_qes_solve(n, l, &FixedParam::B(f("0.5")), &ctx).unwrap_or_default());
            conditions.extend(free_qes_solve(n, l, &FixedParam::A(f("1")), &ctx).unwrap_or_default());
        }
    }
    for n in 0..=3 {
        for l in 0..=1 {
            conditions.extend(confined_qes_solve(n, l, &FixedParam::A(f("1")), &ctx).unwrap_or_default());
            conditions.extend(confined_qes_solve(n, l, &FixedParam::sqrt_2b(f("2")), &ctx).unwrap_or_default());
        }
    }
    let mut rng = StdRng::seed_from_u64(20);
    let mut worst = 0.0f64;
    for q in &conditions {
        let end = q.radius.as_ref().map_or(6.0, Float::to_f64);
        let mut max = 0.0f64;
        for _ in 0..20 {
            let r = Float::with_val(BITS, rng.gen_range(1e-3..1.0) * end);
            let res = q.eigenfunction_residual(&r).unwrap().to_f64();
            max = max.max(res);
        }
        worst = worst.max(max);
        if max > 1e-20 {
            c.check(false, format!("n={} l={} a={:.6} residual {max:.1e}", q.n, q.label.l, q.a.to_f64()));
        }
    }
    c.check(!conditions.is_empty() && worst <= 1e-20, format!("{} solutions x 20 points, worst relative residual {worst:.1e}", conditions.len()));
    c.finish("eigenfunction residuals")
}

fn cross_solver() -> Outcome {
    let mut c = Checks::default();
    let cases: [(&str, &str, Option<&str>, u32, u32); 20] = [
        ("1", "0.1", None, 0, 0),
        ("1", "0.5", None, 1, 1),
        ("1", "2", None, 2, 2),
        ("-1", "0.1", None, 0, 1),
        ("-1", "0.5", None, 2, 0),
        ("-1", "2", None, 1, 2),
        ("1", "0.5", None, 0, 2),
        ("-1", "0.1", None, 1, 0),
        ("1", "2", None, 1, 0),
        ("-1", "0.5", None, 2, 1),
        ("1", "0.1", Some("1"), 0, 0),
        ("1", "0.5", Some("2"), 1, 1),
        ("1", "2", Some("1.5"), 2, 2),
        ("-1", "0.1", Some("3"), 0, 1),
        ("-1", "0.5", Some("1"), 2, 0),
        ("-1", "2", Some("2"), 1, 2),
        ("1", "0.5", Some("0.5"), 1, 0),
        ("-1", "0.1", Some("1"), 0, 2),
        ("1", "2", Some("3"), 2, 1),
        ("-1", "0.5", Some("2"), 0, 0),
    ];
    for (a, b, r, n, l) in cases {
        let s = spec(a, b, r);
        let (e_aim, t) = aim(&s, n, l);
        let e_grid = oracle::solve_level(&s, LevelLabel::new(n, l)).unwrap().energy_f64();
        let d = (e_aim.to_f64() - e_grid).abs();
        c.check(d <= 1e-8, format!("{s} (n,l)=({n},{l}): AIM {:.12} grid {e_grid:.12} |diff| {d:.1e} ({:.1} s)", e_aim.to_f64(), t.as_secs_f64()));
    }
    c.finish("AIM vs grid oracle")
}

fn properties() -> Outcome {
    let mut c = Checks::default();

    // scaling: E(a, b, R) = E(sa, s^4 b, R/s) / s^2
    let cases = [
        ("1", "0.5", "1", 0, 0),
        ("-1", "0.5", "1", 0, 1),
        ("1", "0.1", "2", 1, 0),
        ("2", "1", "1.5", 0, 2),
        ("-2", "0.3", "0.8", 1, 1),
        ("0.5", "2", "1", 0, 0),
        ("1", "0.5", "3", 0, 1),
        ("-1", "1", "2", 1, 0),
        ("3", "0.2", "1", 0, 0),
        ("1", "5", "0.7", 0, 3),
    ];
    let mut worst = 0.0f64;
    for (a, b, r, n, l) in cases {
        let (e, _) = aim(&spec(a, b, Some(r)), n, l);
        for sigma in ["0.5", "2"] {
            let s = f(sigma);
            let sa = Float::with_val(BITS, f(a) * &s);
            let s4 = Float::with_val(BITS, s.square_ref()).square();
            let sb = Float::with_val(BITS, f(b) * &s4);
            let sr = Float::with_val(BITS, f(r) / &s);
            let scaled = PotentialSpec::from_parts(sa, sb, qconfine_core::Confinement::Wall(sr)).unwrap();
            let (es, _) = aim(&scaled, n, l);
            let back = Float::with_val(BITS, es / Float::with_val(BITS, s.square_ref()));
            let d = rel(&back, &e);
            worst = worst.max(d);
            if d > 1e-12 {
                c.check(false, format!("scaling a={a} b={b} R={r} ({n},{l}) sigma={sigma}: rel {d:.1e}"));
            }
        }
    }
    c.check(worst <= 1e-12, format!("scaling law on {} confined cases, sigma in {{0.5, 2}}: worst rel {worst:.1e}", cases.len()));

    // monotonicity on the tabulated grids
    let grid = |name: &str, points: Vec<PotentialSpec>, increasing: bool, c: &mut Checks| {
        let energies: Vec<Float> = points.iter().map(|s| aim(s, 0, 0).0).collect();
        let ok = energies.windows(2).all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] });
        let shown: Vec<String> = energies.iter().map(|e| format!("{:.6}", e.to_f64())).collect();
        c.check(ok, format!("{name}: {}", shown.join(" ")));
    };
    let radii = ["0.1", "0.5", "1", "2", "3", "4", "5"];
    grid("E decreases with R (a=1, b=0.5)", radii.iter().map(|r| spec("1", "0.5", Some(r))).collect(), false, &mut c);
    let couplings = ["-10", "-5", "-1", "0", "1", "5", "10"];
    grid("E decreases with a (b=0.5, R=1)", couplings.iter().map(|a| spec(a, "0.5", Some("1"))).collect(), false, &mut c);
    let bs = ["0.1", "0.2", "0.5", "1", "2", "5", "10"];
    grid("E increases with b (a=1, R=1)", bs.iter().map(|b| spec("1", b, Some("1"))).collect(), true, &mut c);

    // envelope sandwich on the free levels checked above
    let free_levels = [("1", 1, 0), ("1", 0, 0), ("1", 1, 1), ("1", 1, 4), ("-1", 0, 0), ("-1", 1, 0)];
    for (a, n, l) in free_levels {
        let s = spec(a, "0.5", None);
        let label = LevelLabel::new(n, l);
        let (e, _) = aim(&s, n, l);
        let lo = envelope_bound(&s, label, EnvelopeVariant::LowerEnvelope).unwrap();
        let hi = envelope_bound(&s, label, EnvelopeVariant::UpperEnvelope).unwrap();
        let holds = lo.value <= e && e <= hi.value;
        let line = format!("sandwich a={a} {label}: {:.6} <= {:.6} <= {:.6}", lo.value.to_f64(), e.to_f64(), hi.value.to_f64());
        if lo.outside_derivation {
            // the upper envelope needs V concave in r^2, i.e. a > 0
            c.note(format!("{line} holds={holds} (a <= 0, not a proven bound)"));
        } else {
            c.check(holds, line);
        }
    }

    // sum approximation is exact for pure oscillator and pure Coulomb
    let mut worst_sum = 0.0f64;
    for (n, l) in [(0, 0), (1, 0), (0, 2), (2, 1)] {
        let label = LevelLabel::new(n, l);
        let osc = spec("0", "0.5", None);
        let (e, _) = aim(&osc, n, l);
        let v = envelope_bound(&osc, label, EnvelopeVariant::SumApprox).unwrap().value;
        worst_sum = worst_sum.max(rel(&v, &e));
        let coul = spec("1", "0", None);
        let v = envelope_bound(&coul, label, EnvelopeVariant::SumApprox).unwrap().value;
        let nu = f64::from(label.principal());
        let exact = Float::with_val(BITS, -1) / Float::with_val(BITS, 2.0 * nu * nu);
        worst_sum = worst_sum.max(rel(&v, &exact));
    }
    c.check(worst_sum <= 1e-12, format!("sum approximation at a=0 (vs AIM) and b=0 (vs hydrogen): worst rel {worst_sum:.1e}"));

    // critical-coupling estimates against scanned b_c
    let one = f("1");
    for name in ["1s", "2p", "3d", "4f"] {
        let label: LevelLabel = name.parse().unwrap();
        let bc = scan::find_bc(1.0, Some(scan::FREE_RADIUS), label, scan::default_bc_window(1.0, label), ScanSolver::Oracle)
            .unwrap()
            .b_c;
        let upper = critical_b_estimate(&one, label, CriticalChoice::UpperBound).unwrap().to_f64();
        let lower = critical_b_estimate(&one, label, CriticalChoice::LowerBound).unwrap().to_f64();
        let sum = critical_b_estimate(&one, label, CriticalChoice::SumLower).unwrap().to_f64();
        c.check(upper >= bc, format!("(i) {name}: estimate {upper:.6e} >= b_c {bc:.6e}"));
        c.check(lower <= bc, format!("(ii) {name}: estimate {lower:.6e} <= b_c {bc:.6e}"));
        c.check(sum <= bc, format!("(iii) {name}: estimate {sum:.6e} <= b_c {bc:.6e}"));
    }
    c.finish("scaling, monotonicity and bounds")
}

fn critical_couplings() -> Outcome {
    let mut c = Checks::default();
    let bc = |name: &str, radius: f64| {
        let label: LevelLabel = name.parse().unwrap();
        scan::find_bc(1.0, Some(radius), label, scan::default_bc_window(1.0, label), ScanSolver::Oracle).unwrap()
    };
    let mut all = Vec::new();
    for (name, _) in scan::REFERENCE_BC {
        all.push(bc(name, 100.0));
    }
    let get = |name: &str| all.iter().find(|x| x.label == name.parse().unwrap()).unwrap().b_c;
    c.check((get("1s") - 0.32533).abs() <= 1e-4, format!("b_c(1s) = {:.6} (reference 0.32533)", get("1s")));
    c.check((get("4f") - 0.00015).abs() <= 2e-5, format!("b_c(4f) = {:.6} (reference 0.00015)", get("4f")));
    for name in ["4s", "4p"] {
        let near = bc(name, 30.0).b_c;
        c.check(near < get(name), format!("b_c({name}) falls from {:.6e} at R=100 to {near:.6e} at R=30", get(name)));
    }
    let listed: Vec<String> = all.iter().map(|x| format!("{}={:.6}", x.label, x.b_c)).collect();
    c.note(format!("b_c at a=1, R=100: {}", listed.join(" ")));
    for d in scan::compare_with_reference(&all) {
        c.note(format!("discrepancy: {d}"));
    }
    c.finish("critical couplings")
}

fn crossings() -> Outcome {
    let mut c = Checks::default();
    let lbl = |s: &str| -> LevelLabel { s.parse().unwrap() };
    match scan::find_crossing((lbl("3s"), lbl("4f")), scan::Param::B, &ScanPoint::new(1.0, 0.0, Some(100.0)), (0.001, 0.5), ScanSolver::Oracle) {
        Ok(ev) => c.check(true, format!("(3s,4f) cross at b = {:.8} (E = {:.8})", ev.crossing_value, ev.energies_equal_at)),
        Err(e) => c.check(false, format!("(3s,4f) crossing in b: {e}")),
    }
    match scan::find_crossing((lbl("3s"), lbl("4d")), scan::Param::R, &ScanPoint::new(1.0, 0.5, None), (1.0, 20.0), ScanSolver::Oracle) {
        Ok(ev) => c.check(true, format!("(3s,4d) cross at R = {:.8} (E = {:.8})", ev.crossing_value, ev.energies_equal_at)),
        Err(e) => c.check(false, format!("(3s,4d) crossing in R: {e}")),
    }
    // orderings use s..g levels, the range the reference sequences cover
    let labels = LevelLabel::up_to(7, 4);
    for (radius, expected) in [
        (None, "1s 2p 2s 3d 3p 4f 3s 4d 5g"),
        (Some(1.0), "1s 2p 3d 2s 4f 3p 5g 4d 3s"),
    ] {
        let t = scan::ordering(&ScanPoint::new(1.0, 0.5, radius), &labels, ScanSolver::Oracle).unwrap();
        let got = t.leading(9).join(" ");
        let at = radius.map_or("inf".to_string(), |r| r.to_string());
        c.check(got == expected, format!("ordering at a=1 b=0.5 R={at}: {got}"));
    }
    c.finish("crossings and orderings")
}

fn shared_eigenvalue() -> Outcome {
    let mut c = Checks::default();
    let ctx = PrecisionCtx::default();
    let mut cases = Vec::new();
    for (n, l) in [(1, 0), (1, 1), (2, 0)] {
        cases.extend(free_qes_solve(n, l, &FixedParam::B(f("0.5")), &ctx).unwrap().into_iter().filter(|q| q.node_count > 0));
    }
    for q in &cases {
        let bound = q.poly_coeffs.root_bound().unwrap();
        let nodes = q.poly_coeffs.real_roots_in(&Float::with_val(BITS, 0), &bound, 1024);
        for (k, node) in nodes.iter().filter(|x| **x > 0).enumerate() {
            let boxed = PotentialSpec::from_parts(q.a.clone(), q.b.clone(), qconfine_core::Confinement::Wall(node.clone())).unwrap();
            let (e, _) = aim(&boxed, k as u32, q.label.l);
            let d = Float::with_val(BITS, &e - &q.energy).abs().to_f64();
            c.check(d <= 1e-10, format!(
                "free a={:.6} l={} E={:.6}: wall at node {} (r={:.6}) gives |dE| = {d:.1e}",
                q.a.to_f64(), q.label.l, q.energy.to_f64(), k + 1, node.to_f64()
            ));
        }
    }
    c.finish("shared eigenvalue at a node")
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("free AIM regression", free_aim_table),
        ("confined AIM regression", confined_aim_table),
        ("quasi-exact closed forms", qes_anchors),
        ("eigenfunction residuals", eigenfunction_residuals),
        ("cross-solver equivalence", cross_solver),
        ("property suites", properties),
        ("critical couplings", critical_couplings),
        ("crossing structure", crossings),
        ("shared eigenvalue", shared_eigenvalue),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failures = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| Outcome {
            pass: false,
            summary: format!(
                "panicked: {}",
                e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default()
            ),
            details: Vec::new(),
        });
        if !outcome.pass {
            failures += 1;
        }
        println!(
            "criterion {} [{}]: {} - {} ({:.1} s)",
            i + 1,
            title,
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.summary,
            start.elapsed().as_secs_f64()
        );
        for d in &outcome.details {
            println!("    {d}");
        }
    }
    println!("acceptance: {} failed", failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
