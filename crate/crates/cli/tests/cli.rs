use std::f64::consts::PI;
use std::fs;
use std::process::{Command, Output};

fn hcmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcmc"))
        .args(args)
        .output()
        .expect("run hcmc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn summary(o: &Output, key: &str) -> String {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
        .unwrap_or_else(|| panic!("no {key} in {}", stdout(o)))
}

fn read_csv(path: &std::path::Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let header = rdr.headers().unwrap().iter().map(str::to_string).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect();
    (header, rows)
}

#[test]
fn sphere_profile_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("profile.csv");
    let o = hcmc(&[
        "sphere",
        "--epsilon",
        "1",
        "--sigma",
        "1",
        "--R",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["r", "f", "f_r", "f_R"]);
    assert_eq!(rows.len(), 201);
    // f(R) = 0 and the derivatives are blank there.
    let last = rows.last().unwrap();
    assert_eq!(last[0].parse::<f64>().unwrap(), 1.0);
    assert_eq!(last[1].parse::<f64>().unwrap(), 0.0);
    assert!(last[2].is_empty() && last[3].is_empty());
    // f(0;1) = 1/2 + π/4 at ε = σ = 1.
    let f0: f64 = rows[0][1].parse().unwrap();
    assert!((f0 - (0.5 + PI / 4.0)).abs() < 1e-12);
    assert_eq!(summary(&o, "mean_curvature").parse::<f64>().unwrap(), 1.0);
}

#[test]
fn sphere_euclidean_area() {
    let o = hcmc(&["sphere", "--epsilon", "1", "--sigma", "1e-8", "--R", "1"]);
    assert!(o.status.success());
    let area: f64 = summary(&o, "area").parse().unwrap();
    assert!((area - 4.0 * PI).abs() <= 1e-4, "{area}");
}

#[test]
fn sphere_limits_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("limits.csv");
    let o = hcmc(&[
        "sphere",
        "--R",
        "2",
        "--sigma",
        "0.5",
        "--limits",
        out.to_str().unwrap(),
        "--samples",
        "11",
    ]);
    assert!(o.status.success());
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["r", "f", "round", "pansu"]);
    assert_eq!(rows.len(), 11);
    let round: f64 = rows[5][2].parse().unwrap();
    assert!((round - 3f64.sqrt()).abs() < 1e-15);
}

#[test]
fn bad_input_exits_2() {
    let missing = hcmc(&["sphere", "--epsilon", "1"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("--R"));
    assert_eq!(hcmc(&["sphere", "--R", "-1"]).status.code(), Some(2));
    assert_eq!(
        hcmc(&["sphere", "--R", "1", "--epsilon", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(hcmc(&["sphere", "--R", "nope"]).status.code(), Some(2));
    assert_eq!(
        hcmc(&["calibration", "--delta", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(hcmc(&["meridian", "--step", "0"]).status.code(), Some(2));
    assert_eq!(hcmc(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_default_grid_passes() {
    let o = hcmc(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let lines: Vec<_> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 8);
    assert!(lines.iter().all(|l| l.starts_with("PASS ")));
}

#[test]
fn verify_negative_control_fails() {
    let o = hcmc(&["verify", "--perturb-h", "1e-3", "--json", "-"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], false);
    let checks = v["checks"].as_array().unwrap();
    let failed: Vec<_> = checks
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].clone())
        .collect();
    assert_eq!(failed, ["k0_vanishes"]);
    assert_eq!(v["perturb_h"], 1e-3);
}

#[test]
fn verify_json_to_stdout_and_single_spec() {
    let o = hcmc(&[
        "verify",
        "--epsilon",
        "2",
        "--sigma",
        "2",
        "--R",
        "2",
        "--json",
        "-",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["specs"], serde_json::json!([[2.0, 2.0, 2.0]]));
    for c in v["checks"].as_array().unwrap() {
        assert!(c["measured"].as_f64().unwrap() <= c["tolerance"].as_f64().unwrap());
    }
}

#[test]
fn meridian_preset_runs_pole_to_pole() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("meridian.obj");
    let o = hcmc(&["meridian", "--figure1", "--out", obj.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(summary(&o, "reached_south_pole"), "true");
    assert!(summary(&o, "max_leaf_drift").parse::<f64>().unwrap() <= 1e-8);
    assert!(summary(&o, "max_geodesic_residual").parse::<f64>().unwrap() <= 1e-6);
    let text = fs::read_to_string(&obj).unwrap();
    let verts: Vec<[f64; 3]> = text
        .lines()
        .filter_map(|l| l.strip_prefix("v "))
        .map(|l| {
            let v: Vec<f64> = l.split(' ').map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect();
    let n: usize = summary(&o, "samples").parse().unwrap();
    assert_eq!(verts.len(), n);
    let lines: Vec<_> = text.lines().filter(|l| l.starts_with("l ")).collect();
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0].split(' ').count(), n + 1);
    // Starts near the north pole, ends at the south pole f(0) = −t.
    let (first, last) = (verts[0], verts[n - 1]);
    assert!(first[2] > 0.0 && last[2] < 0.0);
    assert_eq!(last[0], 0.0);
    assert!((first[2] + last[2]).abs() < 1e-3);
}

#[test]
fn meridian_csv_and_gnuplot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    let dat = dir.path().join("m.dat");
    assert!(
        hcmc(&["meridian", "--figure1", "--out", csv.to_str().unwrap()])
            .status
            .success()
    );
    assert!(
        hcmc(&["meridian", "--figure1", "--out", dat.to_str().unwrap()])
            .status
            .success()
    );
    let (header, rows) = read_csv(&csv);
    assert_eq!(header, ["s", "x", "y", "t", "m_x", "m_y", "m_t"]);
    let s: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(s.windows(2).all(|w| w[1] > w[0]));
    let text = fs::read_to_string(&dat).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# s x y t m_x m_y m_t");
    let body: Vec<_> = lines.collect();
    assert_eq!(body.len(), rows.len());
    assert_eq!(body[3], rows[3].join(" "));
}

#[test]
fn meridian_pansu_deviation_shrinks_with_epsilon() {
    let dev = |e: &str| -> f64 {
        summary(&hcmc(&["meridian", "--epsilon", e]), "pansu_deviation")
            .parse()
            .unwrap()
    };
    let (a, b, c) = (dev("0.5"), dev("0.25"), dev("0.125"));
    assert!(a > b && b > c, "{a} {b} {c}");
}

#[test]
fn isoperim_min_slack_nonnegative() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("iso.csv");
    let o = hcmc(&[
        "isoperim",
        "--delta",
        "0.3",
        "--n",
        "20",
        "--seed",
        "7",
        "--csv",
        table.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["min_slack"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["n_competitors"], 20);
    assert_eq!(v["bound"], "quadratic");
    assert!((v["exponent_fit"].as_f64().unwrap() - 2.0).abs() <= 0.1);
    let (header, rows) = read_csv(&table);
    assert_eq!(header, ["index", "symdiff", "deficit", "bound", "slack"]);
    assert_eq!(rows.len(), 20);
    let cubic = hcmc(&["isoperim", "--delta", "0", "--n", "4"]);
    assert!(cubic.status.success());
    let v: serde_json::Value = serde_json::from_slice(&cubic.stdout).unwrap();
    assert_eq!(v["bound"], "cubic");
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &["isoperim", "--seed", "3", "--n", "5"][..],
        &["verify", "--seed", "9", "--json", "-"][..],
        &["curvature", "--samples", "16"][..],
    ] {
        let (a, b) = (hcmc(args), hcmc(args));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let diff = hcmc(&["isoperim", "--seed", "4", "--n", "5"]);
    assert_ne!(
        diff.stdout,
        hcmc(&["isoperim", "--seed", "3", "--n", "5"]).stdout
    );
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# geometry\nepsilon = 2\nsigma = 0.5\nR = 3\n").unwrap();
    let c = cfg.to_str().unwrap();
    let from_file = hcmc(&["--config", c, "sphere"]);
    assert!(from_file.status.success());
    assert_eq!(
        summary(&from_file, "mean_curvature")
            .parse::<f64>()
            .unwrap(),
        1.0 / 6.0
    );
    let flag_wins = hcmc(&["sphere", "--config", c, "--epsilon", "1"]);
    assert_eq!(
        summary(&flag_wins, "mean_curvature")
            .parse::<f64>()
            .unwrap(),
        1.0 / 3.0
    );
    // The preset beats the file, flags beat the preset.
    let preset = hcmc(&["--config", c, "meridian", "--figure1", "--R", "1"]);
    assert_eq!(summary(&preset, "reached_south_pole"), "true");
    fs::write(&cfg, "radius = 1\n").unwrap();
    assert_eq!(hcmc(&["--config", c, "sphere"]).status.code(), Some(2));
    assert_eq!(
        hcmc(&["--config", "/nonexistent/run.cfg", "sphere", "--R", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn curvature_k0_vanishes() {
    let o = hcmc(&[
        "curvature",
        "--epsilon",
        "1",
        "--sigma",
        "2",
        "--R",
        "2",
        "--samples",
        "32",
    ]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap().len(), 12);
    let hm = 1.0 / 2.0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let v: Vec<f64> = rec.iter().map(|x| x.parse().unwrap()).collect();
        assert!(v[11] <= 1e-10);
        assert!((v[7] + v[8] - 2.0 * hm).abs() < 1e-12);
        assert!((v[4] + v[6] - 2.0 * hm).abs() < 1e-12);
    }
}

#[test]
fn calibration_grid_satisfies_the_bounds() {
    let o = hcmc(&["calibration", "--grid", "12"]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["r", "t", "u", "side", "div_v", "h_lambda", "bound_slack"]
    );
    let mut checked = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let get = |i: usize| rec[i].parse::<f64>().ok();
        let h = get(5).unwrap();
        assert!(h <= 1.0 + 1e-12);
        if let Some(div) = get(4) {
            assert!((0.5 * div - h).abs() <= 1e-5, "{rec:?}");
            checked += 1;
        }
        if let Some(slack) = get(6) {
            assert!(slack >= 0.0);
        }
    }
    assert!(checked > 100);
}

#[test]
fn foliation_fields_are_unit() {
    let o = hcmc(&["foliation", "--grid", "9", "--extent", "1.5"]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let v: Vec<f64> = rec.iter().map(|x| x.parse().unwrap_or(f64::NAN)).collect();
        if v[3].is_nan() {
            continue;
        }
        let n = (v[3] * v[3] + v[4] * v[4] + v[5] * v[5]).sqrt();
        let m = (v[9] * v[9] + v[10] * v[10] + v[11] * v[11]).sqrt();
        assert!((n - 1.0).abs() < 1e-12 && (m - 1.0).abs() < 1e-12);
        assert!((v[3] * v[9] + v[4] * v[10] + v[5] * v[11]).abs() < 1e-12);
    }
}

#[test]
fn help_lists_columns() {
    let o = hcmc(&["calibration", "--help"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for col in ["div_v", "h_lambda", "bound_slack"] {
        assert!(text.contains(col), "{col}");
    }
}
