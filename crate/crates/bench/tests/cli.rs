use std::process::Command;

use maxlab_core::sparse::mm;

fn bench() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bench"));
    cmd.env_remove("BENCH_THREADS");
    cmd
}

fn records(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(|r| r.unwrap()).collect()
}

#[test]
fn solve_direct_case() {
    let out = bench().args(["solve", "--k", "1", "--ppw", "10", "--solver", "lu"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(recs.len(), 1);
    assert_eq!(&recs[0][5], "4");
    assert_eq!(&recs[0][8], "direct");
    assert!(recs[0][12].parse::<f64>().unwrap() <= 1e-12);
}

#[test]
fn unconverged_case_sets_exit_code() {
    let out = bench()
        .args(["solve", "--k", "1", "--n", "4", "--solver", "gmres", "--max-iter", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let recs = records(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(&recs[0][8], ">5*");
}

#[test]
fn bad_input_is_a_usage_error() {
    let out = bench().args(["run", "--suite", "no-such-suite"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
}

#[test]
fn config_file_with_overrides_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cases.toml");
    std::fs::write(
        &cfg,
        r#"
        [[case]]
        k = 1.0
        n = 4
        solver = "lu"
        label = "direct"

        [[case]]
        k = 1.0
        n = 4
        solver = "gmres"
        expect_convergence = false
        max_iter = 3

        [[case]]
        k = 1.0
        n = 4
        solver = "ras:2:1"
        "#,
    )
    .unwrap();
    let table = dir.path().join("out.csv");
    let out = bench()
        .env("BENCH_THREADS", "2")
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&table)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&std::fs::read_to_string(&table).unwrap());
    let solvers: Vec<&str> = recs.iter().map(|r| &r[7]).collect();
    assert_eq!(solvers, ["lu", "gmres", "ras:2:1"]);
    assert_eq!(&recs[0][0], "direct");
    assert_eq!(&recs[1][8], ">3*");
    assert_eq!(&recs[2][9], "true");
}

#[test]
fn markdown_output() {
    let out = bench()
        .args(["solve", "--k", "1", "--n", "4", "--solver", "gmres", "--max-iter", "2", "--format", "markdown"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("| row |"));
    assert!(text.contains(">2* ("));
}

#[test]
fn export_matrices_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = bench().args(["export-matrices", "--n", "4", "--dir"]).arg(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let c = mm::read::<f64>(&dir.path().join("C.mtx")).unwrap();
    let g = mm::read::<f64>(&dir.path().join("G.mtx")).unwrap();
    let p = mm::read::<f64>(&dir.path().join("Pcurl.mtx")).unwrap();
    assert_eq!(c.nrows(), g.nrows());
    assert_eq!(p.ncols(), 3 * g.ncols());
    let cg = c.matmul(&g).unwrap();
    assert!(cg.max_abs() <= 1e-12 * c.max_abs());
}

#[test]
fn list_names_everything() {
    let out = bench().arg("list").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["hx-k2pi", "blr-table", "spai", "ras", "hx"] {
        assert!(text.contains(name), "{name} missing from {text}");
    }
}
