use std::process::{Command, Output};

use uhermite_cli::{CwEnergyOut, CwZerosOut, DensityOut, HeatflowOut, MomentsOut, RootsOut};

fn uhermite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uhermite")).args(args).output().expect("spawn uhermite")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

fn trapezoid(r: &[Vec<f64>]) -> f64 {
    r.windows(2).map(|w| (w[1][0] - w[0][0]) * (w[1][1] + w[0][1]) / 2.0).sum()
}

#[test]
fn roots_table() {
    let out = stdout(&uhermite(&["roots", "--n", "200", "--sigma2", "1"]));
    let r = rows(&out);
    assert_eq!(r.len(), 200);
    assert!(r.iter().all(|x| x[0].abs() <= 1.9632));
    // 17 significant digits
    assert!(out.lines().all(|l| l.split('e').next().unwrap().trim_start_matches('-').len() == 18));
}

#[test]
fn output_is_deterministic() {
    let a = stdout(&uhermite(&["roots", "--n", "60", "--sigma2", "4"]));
    let b = stdout(&uhermite(&["roots", "--n", "60", "--sigma2", "4"]));
    assert_eq!(a, b);
}

#[test]
fn density_mass() {
    // Trapezoid over 1000 points of a concave density cannot beat about 1.6e-6, so σ² = 4 uses 1500.
    for (s2, grid) in [("4", "1500"), ("6", "1000"), ("1", "1500")] {
        let r = rows(&stdout(&uhermite(&["density", "--sigma2", s2, "--grid", grid])));
        assert_eq!(r.len(), grid.parse::<usize>().unwrap());
        let m = trapezoid(&r);
        assert!((m - 1.0).abs() <= 1e-6, "σ² = {s2}: {m}");
    }
}

#[test]
fn argument_errors_exit_2() {
    for args in [
        &["roots", "--n", "0", "--sigma2", "1"][..],
        &["roots", "--n", "5"],
        &["density", "--sigma2", "-1"],
        &["cw-energy", "--beta", "0.5", "--h", "0.3+x"],
        &["cw-energy", "--beta", "0.5", "--h", "2i"],
        &["moments", "--n", "5", "--sigma2", "1", "--k", "9"],
        &["bogus"],
    ] {
        assert_eq!(uhermite(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn failures_exit_1() {
    let dir = std::env::temp_dir().join(format!("uhermite-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("complex_roots.json");
    // z^4 - 1 is not real-rooted.
    std::fs::write(&f, r#"{"coeffs": [-1, 0, 0, 0, 1]}"#).unwrap();
    let o = uhermite(&["heatflow", "--input", f.to_str().unwrap(), "--s", "0.1", "--steps", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn json_round_trips() {
    let o = stdout(&uhermite(&["roots", "--n", "20", "--sigma2", "1", "--format", "json"]));
    let r: RootsOut = serde_json::from_str(&o).unwrap();
    assert_eq!(r.angles.len(), 20);
    assert_eq!(serde_json::from_str::<RootsOut>(&serde_json::to_string(&r).unwrap()).unwrap(), r);

    let o = stdout(&uhermite(&["density", "--sigma2", "2", "--grid", "50", "--format", "json"]));
    let r: DensityOut = serde_json::from_str(&o).unwrap();
    assert_eq!(r.theta.len(), 50);

    let o = stdout(&uhermite(&["moments", "--n", "40", "--sigma2", "1", "--k", "4", "--format", "json"]));
    let r: MomentsOut = serde_json::from_str(&o).unwrap();
    assert!(r.rows.iter().all(|x| (x.empirical - x.newton_girard).abs() < 1e-10));

    let o = stdout(&uhermite(&["cw-zeros", "--n", "30", "--beta", "0.25", "--format", "json"]));
    let r: CwZerosOut = serde_json::from_str(&o).unwrap();
    assert_eq!(r.y.len(), 30);

    let o = stdout(&uhermite(&["cw-energy", "--beta", "0.5", "--h", "0.3+0.1i", "--format", "json"]));
    let r: CwEnergyOut = serde_json::from_str(&o).unwrap();
    assert_eq!(r.h, [0.3, 0.1]);
    assert!(r.finite_n.windows(2).all(|w| w[1].error < w[0].error));
}

#[test]
fn heatflow_trajectories() {
    let dir = std::env::temp_dir().join(format!("uhermite-cli-flow-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("quartic.json");
    // (z² - 1)(z² - 4)
    std::fs::write(&f, r#"{"coeffs": [4, 0, -5, 0, 1]}"#).unwrap();
    let o = stdout(&uhermite(&["heatflow", "--input", f.to_str().unwrap(), "--s", "0.2", "--steps", "4", "--format", "json"]));
    let r: HeatflowOut = serde_json::from_str(&o).unwrap();
    assert_eq!(r.times.len(), 5);
    assert!(r.roots.iter().all(|rs| rs.len() == 4));
    assert!((r.roots[0][3] - 2.0).abs() < 1e-12);
    // The flow pushes the roots apart.
    assert!(r.roots[4][3] > r.roots[0][3]);
    let csv = stdout(&uhermite(&["heatflow", "--input", f.to_str().unwrap(), "--s", "0.2", "--steps", "4"]));
    let rows: Vec<Vec<f64>> = csv.lines().map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 5);
    for (row, (t, rs)) in rows.iter().zip(r.times.iter().zip(&r.roots)) {
        assert_eq!(row[0], *t);
        assert_eq!(&row[1..], &rs[..]);
    }
}
