use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use polysig::paths::sample_brownian_batch;
use polysig_cli::io::{read_batch_json, write_batch_json, BatchFile};
use tempfile::TempDir;

fn polysig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polysig")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct CsvRow {
    scheme: String,
    param: String,
    mape: f64,
    seconds: f64,
}

fn parse_report(text: &str) -> Vec<CsvRow> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("scheme,param,mape,seconds"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            CsvRow {
                scheme: f[0].into(),
                param: f[1].into(),
                mape: f[2].parse().unwrap(),
                seconds: f[3].parse().unwrap(),
            }
        })
        .collect()
}

#[test]
fn kernel_of_constant_path_is_one() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.csv", "t,a,b\n0,1,2\n0.5,1,2\n1,1,2\n");
    let y = write(&dir, "y.json", r#"{"dim": 2, "paths": [[[0, 0], [1, -2], [0.5, 3]]]}"#);
    assert_eq!(stdout(&polysig(&["kernel", s(&c), s(&y)])).trim(), "1.0000000000000000e0");
}

#[test]
fn kernel_of_unit_segments() {
    let dir = TempDir::new().unwrap();
    let u = write(&dir, "u.csv", "0\n1\n");
    let v: f64 = stdout(&polysig(&["kernel", s(&u), s(&u), "--scheme", "polyapprox", "--order", "12"]))
        .trim()
        .parse()
        .unwrap();
    assert!((v - 2.2795853023360673).abs() < 1e-14, "{v}");
    let fd = stdout(&polysig(&["kernel", s(&u), s(&u), "--scheme", "fd2", "--refine", "1"]));
    assert_eq!(fd.trim().parse::<f64>().unwrap(), 2.25);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let u = write(&dir, "u.csv", "0\n1\n");
    let plane = write(&dir, "p.csv", "0,0\n1,1\n");
    let garbage = write(&dir, "g.json", "{not json");
    for args in [
        vec!["kernel", s(&u), s(&plane)],
        vec!["kernel", s(&u), s(&garbage)],
        vec!["kernel", s(&u), "/nonexistent/file.csv"],
    ] {
        let out = polysig(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn memory_cap_exits_with_three() {
    let out = polysig(&["bench-mape", "--seed", "1", "--batch", "2", "--memory-cap", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error:") && err.contains("1000"), "{err}");
}

#[test]
fn batch_file_round_trip_is_bitwise() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("batch.json");
    let paths = sample_brownian_batch(9, 5, 7, 3).unwrap();
    write_batch_json(&file, &paths).unwrap();
    assert_eq!(read_batch_json(&file).unwrap(), paths);
    let text = std::fs::read_to_string(&file).unwrap();
    let batch: BatchFile = serde_json::from_str(&text).unwrap();
    assert_eq!(batch.dim, 3);
}

#[test]
fn gram_and_mmd_commands() {
    let dir = TempDir::new().unwrap();
    let xs = dir.path().join("x.json");
    write_batch_json(&xs, &sample_brownian_batch(1, 3, 5, 2).unwrap()).unwrap();
    let ys = dir.path().join("y.json");
    write_batch_json(&ys, &sample_brownian_batch(2, 4, 6, 2).unwrap()).unwrap();

    let g = stdout(&polysig(&["gram", s(&xs), s(&ys), "--workers", "2"]));
    let rows: Vec<Vec<f64>> = g.lines().map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!((rows.len(), rows[0].len()), (3, 4));

    let biased: f64 = stdout(&polysig(&["mmd", s(&xs), s(&ys), "--biased"])).trim().parse().unwrap();
    assert!(biased >= 0.0);
    let p: f64 = stdout(&polysig(&["permtest", s(&xs), s(&ys), "--seed", "4", "--permutations", "50"]))
        .trim()
        .parse()
        .unwrap();
    assert!((1.0 / 51.0..=1.0).contains(&p));

    // randomized commands refuse to run without a seed
    assert_eq!(polysig(&["permtest", s(&xs), s(&ys)]).status.code(), Some(2));
}

#[test]
fn bench_mape_on_brownian_paths() {
    let out = stdout(&polysig(&[
        "bench-mape", "--seed", "3", "--points", "10", "--batch", "8", "--orders", "2,10", "--schemes", "polyapprox,fd2",
    ]));
    let rows = parse_report(&out);
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert!(r.mape >= 0.0 && r.seconds > 0.0);
    }
    let find = |scheme: &str, param: &str| rows.iter().find(|r| r.scheme == scheme && r.param == param).unwrap().mape;
    assert!(find("polyapprox", "10") <= 1e-12);
    let fd = find("fd2", "2");
    assert!((1e-4..=1e-2).contains(&fd), "{fd}");
}

#[test]
fn bench_mape_on_sincos_paths() {
    let out = stdout(&polysig(&[
        "bench-mape", "--seed", "5", "--generator", "sincos", "--points", "50", "--batch", "4", "--orders", "6",
        "--schemes", "polyinterp,fd2",
    ]));
    let rows = parse_report(&out);
    assert!(rows[0].mape < rows[1].mape, "interp {} vs fd {}", rows[0].mape, rows[1].mape);
}

#[test]
fn bench_writes_csv_to_out_and_summary_to_stdout() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("report.csv");
    let summary = stdout(&polysig(&[
        "bench-mape", "--seed", "1", "--batch", "2", "--orders", "4", "--schemes", "polyapprox", "--out", s(&file),
    ]));
    assert!(summary.contains('%'));
    let rows = parse_report(&std::fs::read_to_string(&file).unwrap());
    assert_eq!(rows.len(), 1);
}

#[test]
fn worker_count_does_not_change_mape() {
    let out = stdout(&polysig(&[
        "bench-time", "--seed", "2", "--lengths", "8", "--dims", "2", "--workers", "1,4", "--batch", "8", "--repeats", "1",
    ]));
    let rows = parse_report(&out);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].mape.to_bits(), rows[1].mape.to_bits());
    assert!(rows[1].param.ends_with("workers=4"));
}
