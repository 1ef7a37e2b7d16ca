use pairy_cli::run;
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pairy").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = call(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn topological_tau_p3() {
    let (code, out, err) = call(&["tau-topological", "--p", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "-1/3*t1^2*t2 - 2/27*t2^4");
    assert!(err.contains("\"p\":3"));
}

#[test]
fn derive_airy_matches() {
    let (code, out, _) = call(&["derive", "--equation", "Y3", "--p", "2", "--n", "0"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("D^4.Q + 6*(D^2.Q)^2 - 4*E.D.Q + 2*D.Q = 0"));
    assert_eq!(out.lines().nth(1), Some("MATCH: target airy-y3"));
}

#[test]
fn derive_reports_unsupported() {
    let (code, _, err) = call(&["derive", "--equation", "Y4", "--p", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("supported"));
}

#[test]
fn bad_input_exits_2() {
    assert_eq!(call(&["bogus"]).0, 2);
    assert_eq!(call(&["fredholm", "--E", "1,0"]).0, 2);
    assert_eq!(call(&["fredholm", "--E", "0,1", "--preset", "cauchy"]).0, 2);
    assert_eq!(call(&["theta"]).0, 2);
}

#[test]
fn theta_p4() {
    let (_, out, _) = call(&["theta", "--p", "4"]);
    assert_eq!(out, "theta0 = -t1 + 9/8*t3^2\ntheta1 = -2*t2\ntheta2 = -3*t3\n");
}

#[test]
fn fredholm_output_echoes_config_and_repeats() {
    let args = ["fredholm", "--preset", "pearcey", "--tau", "1", "--E", "-1,1", "--m", "40"];
    let a = call(&args);
    let b = call(&args);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a.1).unwrap();
    assert_eq!(v["config"]["E"], "-1,1");
    assert_eq!(v["config"]["preset"], "pearcey");
    let q = v["result"]["Q"].as_f64().unwrap();
    assert!(q < 0.0 && q > -1.0);
    assert!(a.1.contains("e-1") || a.1.contains("e0"));
}

#[test]
fn kernel_representations_agree() {
    let base = ["eval-kernel", "--p", "2", "--lambda", "0.3", "--lambda-prime", "-0.4"];
    let d = json(&[&base[..], &["--rep", "double"]].concat());
    let i = json(&[&base[..], &["--rep", "iiks"]].concat());
    let (a, b) = (d["result"]["value"].as_f64().unwrap(), i["result"]["value"].as_f64().unwrap());
    assert!((a - b).abs() < 1e-10 * a.abs());
}

#[test]
fn residual_with_grid_dump() {
    let dir = std::env::temp_dir().join(format!("pairy-grid-{}.csv", std::process::id()));
    let path = dir.to_str().unwrap();
    let v = json(&["pde-residual", "--equation", "airy-y3", "--preset", "airy", "--E", "-1,1", "--m", "40", "--dump-grid", path]);
    assert!(v["result"]["relative"].as_f64().unwrap() < 1e-2);
    assert_eq!(v["config"]["h_shift"].as_f64(), Some(0.05));
    let csv = std::fs::read_to_string(&dir).unwrap();
    std::fs::remove_file(&dir).unwrap();
    assert!(csv.starts_with("shift,dilation,t1,w,Q\n"));
    assert!(csv.lines().count() > 5);
}

#[test]
fn residual_of_derived_equation() {
    let v = json(&["pde-residual", "--equation", "Y3", "--preset", "pearcey", "--E", "-1,1", "--m", "40"]);
    assert_eq!(v["result"]["id"], "Y3:p=3:n=0");
    assert!(v["result"]["order"].as_f64().unwrap() > 1.5);
}

#[test]
fn residual_rejects_wrong_preset() {
    let (code, _, _) = call(&["pde-residual", "--equation", "pearcey-y3", "--preset", "airy", "--E", "-1,1"]);
    assert_eq!(code, 2);
}

#[test]
fn phi_airy_value() {
    // Phi^- = 2 sqrt(pi) Ai for p = 2 in the library's contour orientation.
    let v = json(&["phi", "--p", "2", "--sign", "-", "--u", "0"]);
    let re = v["result"]["value"][0].as_f64().unwrap();
    let ai0 = 0.355_028_053_887_817_2;
    assert!((re - 2.0 * std::f64::consts::PI.sqrt() * ai0).abs() < 1e-10, "{re}");
}

#[test]
fn hirota_schur_check() {
    let (code, out, _) = call(&["hirota", "--check-schur", "--max-weight", "4"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("PASS"));
    assert_eq!(call(&["hirota"]).0, 2);
}

#[test]
fn asymptotics_of_empty_set() {
    let v = json(&["asymptotics", "--tau", "4,8", "--E", ""]);
    for row in v["result"]["rows"].as_array().unwrap() {
        assert_eq!(row["deviation"].as_f64(), Some(0.0));
    }
}

#[test]
fn accept_exit_codes() {
    let (code, out, _) = call(&["accept", "--only", "1,3"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 2);
    let (code, out, _) = call(&["accept", "--only", "5"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("FAIL  5"));
    assert_eq!(call(&["accept", "--only", "11"]).0, 2);
}
