use std::process::{Command, Output};

fn seqrac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqrac"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn probs_prints_csv_with_header() {
    let o = seqrac(&["probs", "--eta0", "1", "--eta1", "1", "--alpha", "45", "--beta", "45"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "theta_lambda_deg,eta0,eta1,alpha_deg,beta_deg,p_ab,p_ac,p_abc,p_ab_bruteforce,p_ac_bruteforce,p_abc_bruteforce"
    );
    assert_eq!(
        lines.next().unwrap(),
        ",1.000000,1.000000,45.00,45.00,0.853553,0.676777,0.426777,0.853553,0.676777,0.426777"
    );
}

#[test]
fn ranges_expand_to_rows() {
    let o = seqrac(&["optimize", "--theta-lambda", "2:8:7"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 8);
}

#[test]
fn json_output_parses() {
    let o = seqrac(&["--format", "json", "optimize", "--eta0", "0.848", "--eta1", "0.848"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["branch"], "optimized");
    let alpha = v[0]["alpha_deg"].as_f64().unwrap();
    assert!((alpha - 22.4).abs() < 0.1);
}

#[test]
fn errors_are_one_line_and_nonzero() {
    for args in [
        vec!["probs", "--eta0", "1.5"],
        vec!["probs", "--alpha", "abc"],
        vec!["tables", "--which", "IX"],
        vec!["bounds", "--p-ab", "0.8", "--p-ac", "0.7", "--eta0", "0", "--eta1", "0"],
        vec!["frobnicate"],
    ] {
        let o = seqrac(&args);
        assert!(!o.status.success(), "{args:?}");
        let err = stderr(&o);
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
        assert!(err.starts_with("error: "), "{err}");
    }
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let o = seqrac(&["--out", path.to_str().unwrap(), "probs"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn identical_config_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, args: &[&str]| {
        let path = dir.path().join(name);
        let mut full = vec!["--out", path.to_str().unwrap()];
        full.extend_from_slice(args);
        assert!(seqrac(&full).status.success());
        std::fs::read(path).unwrap()
    };
    let mc = ["--seed", "17", "mc", "--theta-lambda", "4", "--optimized", "--runs", "3"];
    assert_eq!(run("a.csv", &mc), run("b.csv", &mc));
    let region = ["--grid", "31", "region"];
    assert_eq!(run("c.csv", &region), run("d.csv", &region));
    let other = ["--seed", "18", "mc", "--theta-lambda", "4", "--optimized", "--runs", "3"];
    assert_ne!(run("a.csv", &mc), run("e.csv", &other));
}

#[test]
fn region_boundary_passes_the_unbiased_corner() {
    let o = seqrac(&["--grid", "241", "region"]);
    assert!(o.status.success());
    let step = 1.0 / 240.0;
    let target = std::f64::consts::FRAC_1_SQRT_2;
    let near = stdout(&o).lines().skip(1).any(|l| {
        let f: Vec<f64> = l.split(',').skip(2).map(|x| x.parse().unwrap()).collect();
        (f[0] - target).abs() <= step && (f[1] - target).abs() <= step
    });
    assert!(near);
}

#[test]
fn tables_report_and_strict_mode() {
    let o = seqrac(&["tables", "--which", "III", "--strict"]);
    assert!(o.status.success());
    assert!(stderr(&o).starts_with("tables: 21 pass, 0 fail"));

    let o = seqrac(&["tables", "--which", "I"]);
    assert!(o.status.success());
    let rows = stdout(&o)
        .lines()
        .filter(|l| l.contains(",alpha_deg,"))
        .count();
    assert_eq!(rows, 16);

    // The published β at θ_λ = 8° in table I is out of line with its
    // neighbours, so strict mode reports it.
    let o = seqrac(&["tables", "--which", "I", "--strict"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn entropy_and_bounds_subcommands() {
    let o = seqrac(&["entropy", "--i-ab", "2.141", "--i-ac", "2.308"]);
    assert!(o.status.success());
    let last = stdout(&o).lines().nth(1).unwrap().to_string();
    let total: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
    assert!((total - 0.194).abs() < 0.005);

    let o = seqrac(&["bounds", "--p-ab", "0.7915", "--p-ac", "0.7685"]);
    assert!(o.status.success());
    let row: Vec<String> = stdout(&o).lines().nth(1).unwrap().split(',').map(String::from).collect();
    let low: f64 = row[2].parse().unwrap();
    let up: f64 = row[3].parse().unwrap();
    assert!((low - 0.826).abs() < 0.01 && (up - 0.853).abs() < 0.01);
}

#[test]
fn help_exits_cleanly() {
    let o = seqrac(&["--help"]);
    assert!(o.status.success());
    for sub in ["probs", "optimize", "region", "bounds", "entropy", "mc", "tables"] {
        assert!(stdout(&o).contains(sub), "{sub}");
    }
}
