use std::fs;
use std::process::{Command, Output};

fn dh_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dh-lab"))
        .args(args)
        .env_remove("DH_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn verify_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = dh_lab(&["verify", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["closed"], true);
    assert_eq!(v["moment_identity"], true);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&dh_lab(&["verify", "--window", "4", "1"])), 2);
    assert_eq!(code(&dh_lab(&["density", "--bins", "1"])), 2);
    assert_eq!(code(&dh_lab(&[])), 2);
}

#[test]
fn degenerate_params_exit_one() {
    assert_eq!(code(&dh_lab(&["verify", "--params", "0", "5"])), 1);
    assert_eq!(
        code(&dh_lab(&[
            "density",
            "--params",
            "0",
            "5",
            "--samples",
            "1000"
        ])),
        1
    );
}

#[test]
fn density_is_byte_identical_across_runs_and_threads() {
    let args = [
        "density",
        "--samples",
        "200000",
        "--bins",
        "20",
        "--seed",
        "7",
    ];
    let a = dh_lab(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_dh-lab"))
        .args(args)
        .env("DH_LAB_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("# generator:"));
    assert!(text.contains("# seed: 7"));
    assert!(text.contains("bin_center,analytic_density,mc_density,stderr,z_score"));
}

#[test]
fn density_too_few_samples_fails_tolerance() {
    let o = dh_lab(&["density", "--samples", "400", "--bins", "40"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("increase --samples"));
}

#[test]
fn flat_density_passes() {
    let o = dh_lab(&["density", "--flat", "--samples", "400000", "--bins", "10"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("# mode: flat"));
}

#[test]
fn logconcavity_modes() {
    assert_eq!(code(&dh_lab(&["logconcavity", "--analytic"])), 3);
    assert_eq!(
        code(&dh_lab(&[
            "logconcavity",
            "--analytic",
            "--window",
            "2",
            "3"
        ])),
        3
    );

    let dir = tempfile::tempdir().unwrap();
    let concave = dir.path().join("gauss.csv");
    let mut text = String::from("# gaussian\ns,f\n");
    for i in 0..=40 {
        let s = -2.0 + 0.1 * i as f64;
        text += &format!("{s},{}\n", (-s * s).exp());
    }
    fs::write(&concave, text).unwrap();
    assert_eq!(
        code(&dh_lab(&[
            "logconcavity",
            "--input",
            concave.to_str().unwrap()
        ])),
        0
    );

    let bimodal = dir.path().join("rho.csv");
    let mut text = String::new();
    for i in 0..=400 {
        let s = 0.5 + 0.01 * i as f64;
        text += &format!("{s},{}\n", 1.0 + (2.0 - s) * (3.0 - s));
    }
    fs::write(&bimodal, text).unwrap();
    assert_eq!(
        code(&dh_lab(&[
            "logconcavity",
            "--input",
            bimodal.to_str().unwrap()
        ])),
        3
    );

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "0,1\n0.1,oops\n").unwrap();
    assert_eq!(
        code(&dh_lab(&["logconcavity", "--input", bad.to_str().unwrap()])),
        2
    );

    let negative = dir.path().join("neg.csv");
    fs::write(&negative, "0,1\n0.1,-1\n0.2,1\n").unwrap();
    assert_eq!(
        code(&dh_lab(&[
            "logconcavity",
            "--input",
            negative.to_str().unwrap()
        ])),
        1
    );

    let zero = dir.path().join("zero.csv");
    fs::write(&zero, "0,1\n0.1,0\n0.2,1\n").unwrap();
    assert_eq!(
        code(&dh_lab(&[
            "logconcavity",
            "--input",
            zero.to_str().unwrap()
        ])),
        1
    );
}

#[test]
fn toric_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let tri = dir.path().join("tri.json");
    fs::write(
        &tri,
        r#"{"dim":2,"halfspaces":[{"a":[-1,0],"b":0},{"a":[0,-1],"b":0},{"a":[1,1],"b":1}]}"#,
    )
    .unwrap();
    let out = dir.path().join("profile.csv");
    let o = dh_lab(&[
        "toric",
        "--input",
        tri.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(&out)
        .unwrap()
        .contains("s,volume,stderr"));

    let tet = dir.path().join("tet.json");
    fs::write(
        &tet,
        r#"{"dim":3,"halfspaces":[{"a":[-1,0,0],"b":0},{"a":[0,-1,0],"b":0},{"a":[0,0,-1],"b":0},{"a":[1,1,1],"b":1}]}"#,
    )
    .unwrap();
    let args = [
        "toric",
        "--input",
        tet.to_str().unwrap(),
        "--bins",
        "10",
        "--samples",
        "20000",
    ];
    let a = dh_lab(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, dh_lab(&args).stdout);

    let cube = dir.path().join("cube.json");
    fs::write(
        &cube,
        r#"{"dim":3,"halfspaces":[{"a":[1,0,0],"b":1},{"a":[-1,0,0],"b":0},{"a":[0,1,0],"b":1},{"a":[0,-1,0],"b":0},{"a":[0,0,1],"b":1},{"a":[0,0,-1],"b":0}]}"#,
    )
    .unwrap();
    let o = dh_lab(&[
        "toric",
        "--input",
        cube.to_str().unwrap(),
        "--axis",
        "0",
        "--bins",
        "8",
        "--samples",
        "5000",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let flat = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = flat
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect();
    assert_eq!(rows.len(), 8);
    for r in rows {
        let v: f64 = r.split(',').nth(1).unwrap().parse().unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{r}");
    }

    let open = dir.path().join("open.json");
    fs::write(
        &open,
        r#"{"dim":2,"halfspaces":[{"a":[-1,0],"b":0},{"a":[0,-1],"b":0}]}"#,
    )
    .unwrap();
    assert_eq!(
        code(&dh_lab(&["toric", "--input", open.to_str().unwrap()])),
        1
    );

    let empty = dir.path().join("empty.json");
    fs::write(
        &empty,
        r#"{"dim":1,"halfspaces":[{"a":[1],"b":-1},{"a":[-1],"b":0}]}"#,
    )
    .unwrap();
    assert_eq!(
        code(&dh_lab(&["toric", "--input", empty.to_str().unwrap()])),
        1
    );

    let junk = dir.path().join("junk.json");
    fs::write(&junk, "{not json").unwrap();
    assert_eq!(
        code(&dh_lab(&["toric", "--input", junk.to_str().unwrap()])),
        2
    );
    assert_eq!(code(&dh_lab(&["toric"])), 2);
}
