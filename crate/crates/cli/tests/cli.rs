use std::fs;

use qconfine_cli::{run_with, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_USAGE};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qconfine").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn solve_free_excited_state() {
    let (code, out, _) = run(&["solve", "--a", "1", "--b", "0.5", "--l", "0", "--nodes", "1"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("2.500000000000000000"), "{out}");
    assert!(out.contains("2.500~000~000~000~000~000"), "{out}");
}

#[test]
fn solve_with_both_solvers_reports_agreement() {
    let (code, out, _) = run(&["solve", "--a", "1", "--b", "0.5", "--radius", "1", "--l", "0", "--nodes", "0", "--solver", "both"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("aim") && out.contains("oracle"), "{out}");
    assert!(out.contains("agreement true"), "{out}");
}

#[test]
fn exact_confined_degree_two() {
    let (code, out, _) = run(&["exact", "--confined", "--n", "2", "--l", "0", "--fix", "a=1"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("0.76025880213480504582"), "{out}");
    assert!(out.contains("2.0843217092058454961"), "{out}");
    assert!(out.contains("3.42116460960662270"), "{out}");
}

#[test]
fn json_output_parses() {
    let (code, out, _) = run(&["solve", "--a", "-1", "--b", "0.5", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["results"][0]["energy"], "2.500000000000000000");
    assert_eq!(v["level"], "1s");
}

#[test]
fn usage_errors_exit_with_two() {
    let (code, _, err) = run(&["solve", "--a", "1"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--b"), "{err}");
    let (code, _, err) = run(&["solve", "--a", "1", "--b", "0.5", "--frobnicate", "2"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--frobnicate"), "{err}");
    assert_eq!(run(&["solve", "--a", "1", "--b", "0.5", "--format", "xml"]).0, EXIT_USAGE);
    assert_eq!(run(&["solve", "--a", "x", "--b", "0.5"]).0, EXIT_USAGE);
    assert_eq!(run(&["bounds", "--a", "1", "--b", "0.5", "--format", "csv"]).0, EXIT_USAGE);
}

#[test]
fn non_convergence_exits_with_three() {
    let (code, _, err) = run(&["solve", "--a", "1", "--b", "0.5", "--max-iter", "4"]);
    assert_eq!(code, EXIT_NOT_CONVERGED, "{err}");
    assert!(err.contains("hint:"), "{err}");
    let (code, _, err) = run(&["cross", "--pair", "1s,2p", "--vary", "b", "--from", "0", "--to", "0.5", "--a", "1"]);
    assert_eq!(code, EXIT_NOT_CONVERGED);
    assert!(err.starts_with("NoSignChange"), "{err}");
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# repulsive Coulomb ground state\na = -1\nb = 0.5\nnodes = 0\nprecision_bits = 256\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let (code, out, _) = run(&["solve", "--config", cfg]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("2.500000000000000000"), "{out}");
    let (code, out, _) = run(&["solve", "--config", cfg, "--a", "1"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("0.179668484653553873"), "{out}");
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    fs::write(&cfg, "a = 1\nflavour = strange\n").unwrap();
    let (code, _, err) = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("flavour"), "{err}");
}

#[test]
fn sweep_files_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = |path: &std::path::Path| {
        let path = path.to_str().unwrap().to_string();
        let mut v: Vec<String> = "sweep --a 1 --b 0.5 --vary R --from 1 --to 3 --count 3 --levels 3s,4d,4f,5g --output"
            .split(' ')
            .map(String::from)
            .collect();
        v.push(path);
        v
    };
    let go = |v: Vec<String>| run(&v.iter().map(String::as_str).collect::<Vec<_>>()).0;
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    assert_eq!(go(args(&first)), EXIT_OK);
    assert_eq!(go(args(&second)), EXIT_OK);
    let a = fs::read(&first).unwrap();
    assert_eq!(a, fs::read(&second).unwrap());
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("param1,param2,label_n,label_l,label_name,energy,solver,converged"));
    assert_eq!(lines.count(), 12);
}

#[test]
fn two_axis_json_sweep() {
    let (code, out, _) = run(&[
        "sweep", "--a", "1", "--vary", "b", "--from", "0.1", "--to", "0.5", "--count", "2", "--vary2", "R", "--from2", "1", "--to2", "2",
        "--count2", "2", "--levels", "1s", "--format", "json",
    ]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[1]["param1"], 0.1);
    assert_eq!(rows[1]["param2"], 2.0);
    assert_eq!(rows[0]["converged"], true);
}

#[test]
fn hydrogen_ordering_marks_degeneracy() {
    let (code, out, _) = run(&["ordering", "--a", "1", "--b", "0", "--max-nu", "3", "--count", "3"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("1s 2s=2p 3s=3p=3d"), "{out}");
    assert!(out.contains("degenerate"), "{out}");
}

#[test]
fn bounds_and_critical_estimates() {
    let (code, out, _) = run(&["bounds", "--a", "1", "--b", "0.5"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("b_c upper estimate       0.843750000000"), "{out}");
    let (code, out, _) = run(&["bounds", "--a", "-1", "--b", "0.5"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("not a proven bound"), "{out}");
}

#[test]
fn critical_coupling_table() {
    let (code, out, _) = run(&["scan-bc", "--a", "1", "--radius", "100", "--levels", "1s", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("label_n,label_l,label_name,b_c,bracket_lo,bracket_hi\n0,0,1s,0.325329,"), "{out}");
}
