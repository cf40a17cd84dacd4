//! Wall-time scaling of `bench-time`. Kept as one test so nothing else in
//! this binary competes for the CPU while it runs; each ratio is the median
//! of three runs.

use std::process::Command;

fn seconds(args: &[&str]) -> Vec<f64> {
    let out = Command::new(env!("CARGO_BIN_EXE_polysig")).args(args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect()
}

fn median_ratio(args: &[&str]) -> (f64, Vec<f64>) {
    let mut ratios: Vec<f64> = (0..3)
        .map(|_| {
            let t = seconds(args);
            t[1] / t[0]
        })
        .collect();
    ratios.sort_by(f64::total_cmp);
    (ratios[1], ratios)
}

#[test]
fn time_scales_with_length_and_dimension() {
    let (ratio, all) = median_ratio(&["bench-time", "--seed", "1", "--lengths", "80,160", "--batch", "6", "--repeats", "5"]);
    assert!((3.2..=5.0).contains(&ratio), "length ratios {all:?}");

    let (ratio, all) = median_ratio(&[
        "bench-time", "--seed", "1", "--order", "2", "--lengths", "10", "--dims", "1024,2048", "--batch", "8",
        "--repeats", "5",
    ]);
    assert!((1.5..=2.5).contains(&ratio), "dimension ratios {all:?}");
}
