use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn penrose(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_penrose"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn maxwellian_is_stable() {
    let dir = TempDir::new().unwrap();
    let o = penrose(dir.path(), &["analyze", "--profile", "maxwellian:0,1", "--k-scan", "0.05:5:60"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.path().join("report.json"));
    assert_eq!(r["verdict"], "stable");
    assert_eq!(fs::read_dir(dir.path().join("contours")).unwrap().count(), 60);
}

#[test]
fn bimaxwellian_violates_at_origin() {
    let dir = TempDir::new().unwrap();
    let o = penrose(dir.path(), &["analyze", "--profile", "bimax:1,1"]);
    assert_eq!(code(&o), 10);
    let r = json(&dir.path().join("report.json"));
    let v = r["violations"].as_array().unwrap();
    assert_eq!(v.len(), 1);
    assert!(v[0]["u"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn sweep_then_critical_analysis() {
    let dir = TempDir::new().unwrap();
    let o = penrose(dir.path(), &["sweep", "bimax", "--bracket", "0.75:1.0"]);
    assert_eq!(code(&o), 0);
    let s = json(&dir.path().join("sweep.json"));
    let c = s["c_star"].as_f64().unwrap();
    // mpmath findroot of PV ∫ f0'/v dv at 30 digits
    assert!((c - 0.924_138_873_004_591_8).abs() < 1e-6, "{c}");
    let log = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(log.starts_with("c,pv\n") && log.lines().count() > 20);

    let spec = format!("bimax:{c},1");
    let o = penrose(dir.path(), &["analyze", "--profile", &spec]);
    assert_eq!(code(&o), 20, "{}", stdout(&o));
}

#[test]
fn triplet_lists_six_indefinite_frames() {
    let dir = TempDir::new().unwrap();
    let o = penrose(dir.path(), &["triplet", "+-+"]);
    assert_eq!(code(&o), 0);
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines, ["indefinite", "(0-+)", "(--+)", "(-0+)", "(-++)", "(-+0)", "(-+-)"]);
    let o = penrose(dir.path(), &["triplet", "++-"]);
    assert_eq!(stdout(&o).lines().next(), Some("definite"));
    assert_eq!(code(&penrose(dir.path(), &["triplet", "+x+"])), 2);
}

/// Winding of a closed pixel polygon around `(x, y)`.
fn polygon_winding(pts: &[(f64, f64)], x: f64, y: f64) -> i32 {
    let mut w = 0;
    for s in pts.windows(2) {
        let ((x0, y0), (x1, y1)) = (s[0], s[1]);
        let side = (x1 - x0) * (y - y0) - (x - x0) * (y1 - y0);
        if y0 <= y && y1 > y && side > 0.0 {
            w += 1;
        } else if y0 > y && y1 <= y && side < 0.0 {
            w -= 1;
        }
    }
    w
}

fn svg_path(svg: &str) -> Vec<(f64, f64)> {
    let d = svg.split("d=\"").nth(1).unwrap().split('"').next().unwrap();
    let mut pts: Vec<(f64, f64)> = d
        .split_whitespace()
        .filter(|t| *t != "Z")
        .map(|t| {
            let (a, b) = t.trim_start_matches(['M', 'L']).split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    pts.push(pts[0]);
    pts
}

fn crosshair(svg: &str) -> (f64, f64) {
    let line = svg.split("<line ").nth(1).unwrap();
    let attr = |name: &str| -> f64 {
        line.split(&format!("{name}=\"")).nth(1).unwrap().split('"').next().unwrap().parse().unwrap()
    };
    (0.5 * (attr("x1") + attr("x2")), attr("y1"))
}

#[test]
fn penrose_svg_for_maxwellian_misses_origin() {
    let dir = TempDir::new().unwrap();
    let svg = dir.path().join("out.svg");
    let o = penrose(dir.path(), &["penrose", "--profile", "maxwellian:0,1", "--k", "1", "--svg", svg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&svg).unwrap();
    let (x, y) = crosshair(&text);
    assert_eq!(polygon_winding(&svg_path(&text), x, y), 0);

    let o = penrose(dir.path(), &["penrose", "--profile", "bimax:1,1", "--k", "0.4", "--svg", svg.to_str().unwrap()]);
    // the Langmuir branch skims the origin here, so only the exit code is checked
    assert_eq!(code(&o), 10);
    assert!(dir.path().join("contour.csv").exists());
}

#[test]
fn signature_and_roots_outputs() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&penrose(dir.path(), &["signature", "--profile", "bimax:1,1"])), 0);
    let sig = fs::read_to_string(dir.path().join("signature.csv")).unwrap();
    assert!(sig.starts_with("u,sigma\n"));
    let signs: Vec<f64> = sig.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(signs.contains(&1.0) && signs.contains(&-1.0));

    assert_eq!(code(&penrose(dir.path(), &["roots", "--profile", "bimax:1,1", "--k", "0.4"])), 10);
    let r = json(&dir.path().join("roots.json"));
    let im = r["roots"][0]["im"].as_f64().unwrap();
    assert!((im - 0.09603576034606855).abs() < 1e-9);
}

#[test]
fn destabilize_writes_profile_and_reports() {
    let dir = TempDir::new().unwrap();
    let o = penrose(
        dir.path(),
        &["destabilize", "--profile", "maxwellian:0,1", "--kind", "w11", "--u0", "0", "--h", "0.05"],
    );
    assert_eq!(code(&o), 10, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.path().join("report.json"));
    assert_eq!(r["winding_before"], 0);
    assert_eq!(r["winding_after"], 1);
    assert_eq!(r["zero_count_delta"], 2);
    assert!(r["unstable_k_band"]["k_hi"].as_f64().unwrap() > 0.0);
    let prof = fs::read_to_string(dir.path().join("perturbed_profile.csv")).unwrap();
    assert!(prof.starts_with("v,f0,f0p\n"));
    for f in ["contour_before.csv", "contour_after.csv"] {
        assert!(dir.path().join(f).exists());
    }
    let o = penrose(dir.path(), &["destabilize", "--profile", "bimax:1,1", "--kind", "w11", "--u0", "0"]);
    assert!(code(&o) >= 30);
}

#[test]
fn simulate_reports_growth() {
    let dir = TempDir::new().unwrap();
    let o = penrose(dir.path(), &["simulate", "--profile", "maxwellian:0,1", "--k", "1", "--t-end", "20"]);
    assert_eq!(code(&o), 0);
    let s = json(&dir.path().join("summary.json"));
    assert_eq!(s["stable"], true);
    assert!(s["recurrence_time"].as_f64().unwrap() > 20.0);
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,norm_f,H_L,P_L\n"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&penrose(dir.path(), &["frobnicate"])), 2);
    assert_eq!(code(&penrose(dir.path(), &["analyze", "--profile", "gauss:0,1"])), 2);
    assert_eq!(code(&penrose(dir.path(), &["analyze", "--profile", "maxwellian:0,1", "--k-scan", "1:2"])), 2);
    let o = penrose(dir.path(), &["analyze", "--profile", "missing.toml"]);
    assert_eq!(code(&o), 37);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let runs: Vec<TempDir> = (0..2).map(|_| TempDir::new().unwrap()).collect();
    for (i, dir) in runs.iter().enumerate() {
        let mut args = vec!["analyze", "--profile", "bimax:1,1", "--k-scan", "0.1:2:12"];
        if i == 1 {
            args.push("--sequential");
        }
        assert_eq!(code(&penrose(dir.path(), &args)), 10);
        assert_eq!(code(&penrose(dir.path(), &["simulate", "--profile", "bimax:1,1", "--k", "0.4", "--t-end", "30"])), 10);
    }
    let files = ["report.json", "trajectory.csv", "summary.json", "contours/contour_005.csv"];
    for f in files {
        let a = fs::read(runs[0].path().join(f)).unwrap();
        let b = fs::read(runs[1].path().join(f)).unwrap();
        assert!(a == b, "{f} differs between runs");
    }
}
