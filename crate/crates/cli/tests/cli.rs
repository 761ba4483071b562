use std::process::{Command, Output};

fn qstirling(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qstirling"))
        .args(args)
        .env_remove("QSTIRLING_MAX_K")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qstirling(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn poly_text_is_graded_lex() {
    for m in ["1^2 2^2", "1^3 2", "3,1"] {
        assert_eq!(stdout(&["poly", "-m", m]), "2x^2y^2z + x^2yz^2 + xy^2z^2\n");
    }
}

#[test]
fn poly_big_coefficients_agree() {
    let a = stdout(&[
        "poly",
        "-m",
        "1^2 2 3^2",
        "--family",
        "trees",
        "--format",
        "json",
    ]);
    let b = stdout(&[
        "poly",
        "-m",
        "1^2 2 3^2",
        "--family",
        "trees",
        "--format",
        "json",
        "--big",
    ]);
    assert_eq!(a, b);
}

#[test]
fn gamma_csv_for_stirling() {
    assert_eq!(
        stdout(&["gamma", "-m", "1^2 2^2", "--family", "stirling", "--format", "csv"]),
        "i,j,value\n1,2,1\n2,1,1\n"
    );
}

#[test]
fn gamma_methods_agree() {
    let expand = stdout(&[
        "gamma",
        "-m",
        "1^2 2 3^2",
        "--family",
        "itrees",
        "--format",
        "json",
    ]);
    let count = stdout(&[
        "gamma",
        "-m",
        "1^2 2 3^2",
        "--family",
        "itrees",
        "--method",
        "count",
        "--format",
        "json",
    ]);
    assert_eq!(expand, count);
}

#[test]
fn enumerate_kinds() {
    assert_eq!(
        stdout(&["enumerate", "-m", "1^2 2^2"]),
        "1 1 2 2\n1 2 2 1\n2 1 1 2\n2 2 1 1\n"
    );
    assert_eq!(
        stdout(&[
            "enumerate",
            "-m",
            "1^2 2^2",
            "--kind",
            "stirling",
            "--format",
            "csv"
        ]),
        "word\n1 1 2 2\n1 2 2 1\n2 2 1 1\n"
    );
    assert_eq!(
        stdout(&["enumerate", "-m", "1^2 2^2", "--kind", "all"])
            .lines()
            .count(),
        6
    );
    assert_eq!(
        stdout(&["enumerate", "-m", "1^2 2^2", "--kind", "trees"])
            .lines()
            .count(),
        4
    );
}

#[test]
fn orbit_records() {
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&["orbit", "-m", "1^2 2^2", "--format", "json"])).unwrap();
    let sizes: usize = json
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["size"].as_u64().unwrap() as usize)
        .sum();
    assert_eq!(sizes, 4);
    assert_eq!(json[0]["representative"], "0(1(1),2(2))");
    assert_eq!(json[0]["polynomial"], "x^2y + xy^2");
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("qstirling-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("poly.txt");
    let out = qstirling(&["poly", "-m", "1^2 2^2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        "2x^2y^2z + x^2yz^2 + xy^2z^2\n"
    );
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn verify_passes_and_reports_json() {
    let json: serde_json::Value = serde_json::from_str(&stdout(&[
        "verify", "fs", "--range", "K<=4", "--format", "json",
    ]))
    .unwrap();
    assert_eq!(json["suite"], "fs");
    assert_eq!(json["failures"].as_array().unwrap().len(), 0);
    assert!(json["checks"].as_u64().unwrap() > 0);
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "all", "--range", "1^2 2 3"];
    let strip = |s: String| {
        s.lines()
            .filter(|l| !l.contains("ms"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(stdout(&args)), strip(stdout(&args)));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["poly", "-m", "1^0"][..],
        &["poly", "-m", "1^2", "--family", "nope"],
        &["orbit", "-m", "1^2 2", "--family", "quasi"],
        &[
            "gamma", "-m", "1^2 2", "--family", "quasi", "--method", "count",
        ],
        &["verify", "bogus"],
        &["verify", "stats", "--range", "K<=12"],
        &["verify", "fs", "--range", "n<=3"],
        &["verify", "stats", "--format", "csv"],
    ] {
        assert_eq!(qstirling(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn ceiling_comes_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_qstirling"))
        .args(["verify", "stats", "--range", "K<=4"])
        .env("QSTIRLING_MAX_K", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
