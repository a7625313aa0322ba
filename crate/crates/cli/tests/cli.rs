use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn pzeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pzeta"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn validate_exit_codes() {
    let ok = pzeta(&["validate", &corpus("example.json")]);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    assert!(stdout(&ok).lines().skip(1).all(|l| l.contains(",pass,")));

    let inverted = pzeta(&["validate", &corpus("invalid/inverted-loop.json")]);
    assert_eq!(code(&inverted), 1);
    assert!(stdout(&inverted).contains("no-inversions,fail"));

    let malformed = pzeta(&["validate", &corpus("invalid/bad-voltage.json")]);
    assert_eq!(code(&malformed), 3);
    assert!(stderr(&malformed).contains("error:"));

    let missing = pzeta(&["validate", &corpus("no-such-file.json")]);
    assert_eq!(code(&missing), 3);
}

#[test]
fn spectrum_both_methods_agree_on_example() {
    let out = pzeta(&[
        "spectrum",
        &corpus("example.json"),
        "--max-length",
        "12",
        "--method",
        "both",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,PL_oracle,PL_zeta,L"));
    let rows: Vec<Vec<u64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r[1] == r[2]));
    assert_eq!(rows[2], vec![3, 4, 4, 4]);
}

#[test]
fn spectrum_of_path_is_empty() {
    let out = pzeta(&["spectrum", &corpus("path.json"), "--max-length", "12"]);
    assert_eq!(code(&out), 0);
    for line in stdout(&out).lines().skip(1) {
        assert!(line.split(',').skip(1).all(|x| x == "0"), "{line}");
    }
}

#[test]
fn spectrum_reports_stabilizer_witness() {
    let out = pzeta(&[
        "spectrum",
        &corpus("invalid/stabilizer-z2.json"),
        "--max-length",
        "8",
    ]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("stabilizer violation at length 4"), "{err}");
    assert!(err.contains("voltage s"), "{err}");
}

#[test]
fn zeta_prints_exact_rationals() {
    let out = pzeta(&["zeta", &corpus("example.json"), "--order", "6"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("m,log_Z,Z,N_m,PL\n"));
    assert!(text.contains("\n3,4,4,12,4\n"), "{text}");
    assert!(text.contains("\n6,18,26,108,16\n"), "{text}");

    // [u^9] log Z = N_9 / 9 = 2172 / 9
    let longer = stdout(&pzeta(&["zeta", &corpus("example.json"), "--order", "9"]));
    assert_eq!(longer.lines().last(), Some("9,724/3,340,2172,240"));
}

#[test]
fn xi_check_passes_and_rejects_bad_points() {
    let out = pzeta(&["xi-check", &corpus("example.json"), "--u", "2", "--tol", "1e-6"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).lines().nth(1).unwrap().ends_with(",true"));

    let all = pzeta(&["xi-check", &corpus("example.json")]);
    assert_eq!(code(&all), 0);
    assert_eq!(stdout(&all).lines().count(), 5);

    let inv_sqrt_q = format!("{}", 1.0 / 3f64.sqrt());
    assert_eq!(
        code(&pzeta(&["xi-check", &corpus("example.json"), "--u", &inv_sqrt_q])),
        3
    );
    assert_eq!(
        code(&pzeta(&["xi-check", &corpus("example.json"), "--u", "0.9"])),
        3
    );
}

#[test]
fn xi_check_reports_non_convergence() {
    let out = pzeta(&[
        "xi-check",
        &corpus("square.json"),
        "--u",
        "2",
        "--quad-tol",
        "0",
        "--quad-cap",
        "32",
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn conjugate_with_seed_is_consistent() {
    let out = pzeta(&["conjugate", &corpus("example.json"), "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 22);
    assert!(text.ends_with("# overall,consistent\n"));
}

#[test]
fn compare_outcomes() {
    let same = pzeta(&["compare", &corpus("example.json"), &corpus("example.json")]);
    assert_eq!(code(&same), 0);
    assert!(stdout(&same).contains("multiplicity-one,consistent"));

    let shifted = pzeta(&[
        "compare",
        &corpus("example.json"),
        &corpus("example-shifted.json"),
    ]);
    assert_eq!(code(&shifted), 0);

    let different = pzeta(&["compare", &corpus("example.json"), &corpus("square.json")]);
    assert_eq!(code(&different), 2);
    assert!(stderr(&different).contains("first disagreement at n = 3"));

    let q_mismatch = pzeta(&["compare", &corpus("example.json"), &corpus("ladder.json")]);
    assert_eq!(code(&q_mismatch), 3);
}

#[test]
fn outputs_are_reproducible_and_carry_config() {
    let args = [
        "conjugate",
        &corpus("square.json"),
        "--seed",
        "11",
        "--trials",
        "5",
        "--format",
        "json",
    ];
    let a = pzeta(&args);
    let b = pzeta(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
    let header = stderr(&a);
    assert!(header.starts_with("# pzeta "));
    assert!(header.contains("\"seed\":11"));
    let json: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(json["header"]["config"]["trials"], 5);
    assert_eq!(json["overall"], "consistent");

    let par = pzeta(&["spectrum", &corpus("honeycomb.json")]);
    let seq = pzeta(&["spectrum", &corpus("honeycomb.json"), "--sequential"]);
    assert_eq!(par.stdout, seq.stdout);
}
