use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bieuler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bieuler"))
        .args(args)
        .output()
        .expect("spawn bieuler")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data lines of a CSV, without `#` metadata.
fn data_lines(csv: &str) -> Vec<String> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(String::from)
        .collect()
}

#[test]
fn exact_family_rows() {
    let o = bieuler(&["exact", "--family", "comb", "--m-max", "7"]);
    assert!(o.status.success());
    let lines = data_lines(&stdout(&o));
    assert_eq!(lines[0], "m,n,euler");
    assert_eq!(lines.last().unwrap(), "7,14,291407424");
}

#[test]
fn exact_graph_file_and_warning() {
    let dir = tempfile::tempdir().unwrap();
    let tri = dir.path().join("k3.txt");
    fs::write(&tri, "3\n0 1\n1 2\n2 0\n").unwrap();
    let o = bieuler(&["exact", "--graph", tri.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("not bipartite"));
    assert_eq!(data_lines(&stdout(&o)).last().unwrap(), "3,0");

    let c4 = dir.path().join("c4.txt");
    fs::write(&c4, "4\n0 1\n1 2\n2 3\n3 0\n").unwrap();
    let o = bieuler(&[
        "exact",
        "--graph",
        c4.to_str().unwrap(),
        "--s",
        "-",
        "--m-max",
        "2",
        "--json",
    ]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    // E(C₄ □_∅ P₂) = C(8,4) · 4 · 4
    assert_eq!(v["rows"][1]["euler"], "1120");
}

#[test]
fn compare_exit_code_follows_thresholds() {
    let o = bieuler(&["compare", "--family", "path", "--m-max", "10"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(data_lines(&stdout(&o))
        .iter()
        .any(|l| l.starts_with("6,61,")));
    // a single term cannot reach 1e-6 at m = 8
    let o = bieuler(&[
        "compare", "--family", "comb", "--m-max", "8", "--roots", "1", "--steps", "4096",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn scan_columns() {
    let o = bieuler(&[
        "scan",
        "--problem",
        "grid2",
        "--points",
        "5",
        "--steps",
        "1024",
    ]);
    assert!(o.status.success());
    let lines = data_lines(&stdout(&o));
    assert_eq!(lines[0], "lambda,hprime1");
    // λ = 0 is excluded
    assert_eq!(lines.len(), 1 + 4);
    let o = bieuler(&[
        "scan",
        "--problem",
        "classical",
        "--log",
        "--lmin",
        "0.1",
        "--lmax",
        "0.7",
        "--points",
        "4",
        "--steps",
        "1024",
    ]);
    assert_eq!(data_lines(&stdout(&o)).len(), 1 + 8);
}

#[test]
fn comb_outputs_and_eigenfunction_file() {
    let dir = tempfile::tempdir().unwrap();
    let ef = dir.path().join("ef.csv");
    let o = bieuler(&[
        "comb",
        "--steps",
        "4096",
        "--m-max",
        "2",
        "--emit-eigenfunctions",
        ef.to_str().unwrap(),
        "--json",
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let l1 = v["eigenpairs"]["rows"][0]["lambda"].as_f64().unwrap();
    assert!((l1 - 0.437141117).abs() < 1e-6);
    assert_eq!(v["series"]["rows"].as_array().unwrap().len(), 2);
    let csv = fs::read_to_string(ef).unwrap();
    assert!(data_lines(&csv)[0].starts_with("x,comb_f1"));
}

#[test]
fn spectrum_json() {
    let dir = tempfile::tempdir().unwrap();
    let p2 = dir.path().join("p2.txt");
    fs::write(&p2, "2\n0 1\n").unwrap();
    let o = bieuler(&[
        "spectrum",
        "--graph",
        p2.to_str().unwrap(),
        "--s",
        "0,1",
        "--nodes",
        "400",
        "--top",
        "2",
        "--volume-samples",
        "100000",
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let l1 = v["entries"][0]["lambda"].as_f64().unwrap();
    assert!((l1 - 0.3644).abs() < 0.05, "{l1}");
    assert!(v["entries"][0]["stderr"].as_f64().unwrap() > 0.0);
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn report_inventory_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let base = [
        "report",
        "--steps",
        "1024",
        "--scan-points",
        "41",
        "--stride",
        "64",
        "--m-max",
        "6",
    ];
    let mut args: Vec<&str> = base.to_vec();
    args.extend(["--out", a.to_str().unwrap()]);
    assert!(bieuler(&args).status.success());
    let names: Vec<String> = read_dir_sorted(&a).into_iter().map(|f| f.0).collect();
    assert_eq!(
        names,
        [
            "eigenfunctions.csv",
            "fig2.csv",
            "fig4.csv",
            "manifest.json",
            "table1_comb.csv",
            "table1_grid2.csv",
            "table2.csv",
            "table3.csv"
        ]
    );
    let manifest = a.join("manifest.json");
    let o = Command::new(env!("CARGO_BIN_EXE_bieuler"))
        .args([
            "report",
            "--from-manifest",
            manifest.to_str().unwrap(),
            "--out",
            b.to_str().unwrap(),
        ])
        .env("EULER_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(read_dir_sorted(&a), read_dir_sorted(&b));
}

#[test]
fn report_single_family() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let o = bieuler(&[
        "report",
        "--families",
        "comb",
        "--steps",
        "1024",
        "--scan-points",
        "21",
        "--m-max",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let names: Vec<String> = read_dir_sorted(&out).into_iter().map(|f| f.0).collect();
    assert_eq!(
        names,
        [
            "eigenfunctions.csv",
            "fig2.csv",
            "manifest.json",
            "table1_comb.csv",
            "table2.csv"
        ]
    );
    let ef = fs::read_to_string(out.join("eigenfunctions.csv")).unwrap();
    assert!(!ef.contains("grid2"));
}

#[test]
fn bad_input_is_an_error() {
    let o = bieuler(&["comb", "--roots", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--roots"));
}
