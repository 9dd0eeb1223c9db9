use jager_lab::cli::{run, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn jager_lab(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("jager-lab").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).expect("utf-8 stdout"),
        stderr: String::from_utf8(err).expect("utf-8 stderr"),
    }
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn expand_reports_digits_and_coefficients() {
    let o = jager_lab(&["expand", "--k", "1/2", "--x0", "3/10", "-n", "3"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!(o.stdout.starts_with("n,a_n,p_n,q_n,p_n/q_n,theta_n\n"));
    let rows = csv_rows(&o.stdout);
    let digits: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(digits, ["1", "2", "0"]);
    let theta: Vec<f64> = rows.iter().map(|r| r[5].parse().unwrap()).collect();
    for (got, want) in theta.iter().zip([0.3, 0.85, 0.575]) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

#[test]
fn expand_golden_decimal_approaches_inverse_sqrt5() {
    let o = jager_lab(&[
        "--mode",
        "ext",
        "expand",
        "--k",
        "1",
        "--x0",
        "0.6180339887498949",
        "-n",
        "20",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let rows = csv_rows(&o.stdout);
    assert!(rows.iter().all(|r| r[1] == "0"));
    let last: f64 = rows.last().unwrap()[5].parse().unwrap();
    assert!((last - 1.0 / 5f64.sqrt()).abs() < 1e-6, "{last}");
}

#[test]
fn exact_orbit_terminates_on_rational_input() {
    let o = jager_lab(&[
        "--mode", "exact", "orbit", "--k", "2", "--x0", "2/3", "-n", "5",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let rows = csv_rows(&o.stdout);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][3], "0.3333333333333333");
    assert_eq!(rows[0][4], "0");
    assert!(o.stderr.contains("terminated at n = 1"));
}

#[test]
fn json_output_is_parseable() {
    let o = jager_lab(&[
        "--format", "json", "orbit", "--k", "0.7", "--x0", "0.3", "-n", "4",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).expect("json");
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn usage_errors_exit_with_two() {
    let cases: [&[&str]; 6] = [
        &["--mode", "exact", "expand", "--k", "1", "--x0", "0.5"],
        &["expand", "--k", "-1", "--x0", "0.5"],
        &["expand", "--k", "1", "--x0", "1.5"],
        &["region", "--k", "1", "--which", "p0"],
        &["witness", "--k", "1"],
        &["verify", "--suite", "bogus"],
    ];
    for args in cases {
        let o = jager_lab(args);
        assert_eq!(o.code, EXIT_USAGE, "{args:?}: {}", o.stdout);
        assert!(o.stderr.starts_with("error:"), "{args:?}: {}", o.stderr);
    }
    assert_eq!(jager_lab(&["frobnicate"]).code, EXIT_USAGE);
}

#[test]
fn gamma_literal_region_for_k_one_is_the_unit_quadrangle() {
    let o = jager_lab(&["region", "--k", "1", "--which", "gamma-literal"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let rows = csv_rows(&o.stdout);
    let starts: Vec<(f64, f64)> = rows
        .iter()
        .step_by(2)
        .map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap()))
        .collect();
    assert_eq!(starts, [(0.0, 0.0), (1.0, 0.0), (0.5, 0.5), (0.0, 0.5)]);
}

#[test]
fn p0_region_lists_five_items_with_expected_endpoints() {
    let o = jager_lab(&["region", "--k", "0.5", "--which", "p0", "--points", "8"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let rows = csv_rows(&o.stdout);
    let mut labels: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    labels.dedup();
    assert_eq!(
        labels,
        [
            "p0_item_1",
            "p0_item_2",
            "p0_item_3",
            "p0_item_4",
            "p0_item_5"
        ]
    );
    let item = |label: &str| -> Vec<(f64, f64)> {
        rows.iter()
            .filter(|r| r[0] == label)
            .map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap()))
            .collect()
    };
    let ends = |pts: &[(f64, f64)]| {
        let mut e = [pts[0], pts[pts.len() - 1]];
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    };
    let close = |a: [(f64, f64); 2], b: [(f64, f64); 2]| {
        a.iter()
            .zip(&b)
            .all(|(p, q)| (p.0 - q.0).abs() < 1e-12 && (p.1 - q.1).abs() < 1e-12)
    };
    assert!(close(ends(&item("p0_item_1")), [(1.0, 0.5), (2.0, 0.0)]));
    assert!(close(ends(&item("p0_item_5")), [(0.5, 1.0), (1.0, 0.5)]));
}

#[test]
fn witness_json_has_coincident_images() {
    let o = jager_lab(&["--format", "json", "witness", "--k", "0.5", "--seed", "3"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert!(v["image_gap"].as_f64().unwrap() < 1e-12);
    assert!(v["separation"].as_f64().unwrap() > 0.1);
}

#[test]
fn verify_is_deterministic_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let args = [
        "verify",
        "--suite",
        "containment",
        "--samples",
        "200",
        "--k-list",
        "0.5,2",
        "--seed",
        "9",
        "--out",
        out.to_str().unwrap(),
    ];
    let first = jager_lab(&args);
    assert_eq!(first.code, EXIT_OK, "{}", first.stderr);
    let report = std::fs::read_to_string(out.join("report.json")).unwrap();
    let second = jager_lab(&args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(
        report,
        std::fs::read_to_string(out.join("report.json")).unwrap()
    );
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["seed"], 9);
}

#[test]
fn verify_without_boundary_slack_reports_failures() {
    let o = jager_lab(&[
        "--eps-boundary",
        "0",
        "verify",
        "--suite",
        "containment",
        "--samples",
        "200",
        "--k-list",
        "0.5",
    ]);
    assert_eq!(o.code, EXIT_CHECK_FAILED);
    assert!(o.stdout.contains(",FAIL"));
    assert!(o.stderr.contains("check containment at k = 0.5 failed"));
}

#[test]
fn plot_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = jager_lab(&[
        "plot",
        "--k",
        "0.5",
        "--out",
        dir.path().to_str().unwrap(),
        "--samples",
        "20",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let pairs = std::fs::read_to_string(dir.path().join("jager_pairs.csv")).unwrap();
    assert!(pairs.starts_with("k,x0_seed_index,n,u,v,x_n,y_n,a_n\n"));
    let boundary = std::fs::read_to_string(dir.path().join("region_boundary.csv")).unwrap();
    assert!(boundary.starts_with("label,u,v\n"));
    assert!(boundary.contains("hyperbola_arc,"));
}
