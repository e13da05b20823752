use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use penrose_core::dispersion::{
    contour_from_table, critical_separation_in, find_roots_uhp, penrose_contour, penrose_test_with,
    winding_number, KScan, PenroseContour, PenroseOptions, PvTable, RootInfo, StabilityReport, Verdict,
};
use penrose_core::dynamics::{growth_rate, integrate, IntegrateOptions, ModeState};
use penrose_core::equilibrium::ProfileSpec;
use penrose_core::exec;
use penrose_core::export::{contour_svg, fmt_f64, write_contour_csv, write_json, write_table};
use penrose_core::perturbation::{
    destabilize_embedded, destabilize_k0, destabilize_rearrangement, destabilize_w11, Bump, Destabilization,
};
use penrose_core::signature::{continuum_signature, little_big_man, ModeTriplet};
use penrose_core::{Error, Execution, Profile, Result};
use serde_json::json;

use crate::{Cli, Command, Kind, Outcome};

pub fn run(cli: &Cli, exec: Execution) -> Result<Outcome> {
    let out = cli.out.as_path();
    match &cli.command {
        Command::Analyze { profile, k_scan } => analyze(out, profile, *k_scan, exec),
        Command::Penrose { profile, k, svg, csv } => penrose(out, profile, *k, svg.as_deref(), csv.as_deref()),
        Command::Signature { profile } => signature(out, profile),
        Command::Roots { profile, k } => roots(out, profile, *k),
        Command::Destabilize { profile, kind, u0, h, amplitude, radius } => {
            destabilize(out, profile, *kind, *u0, *h, *amplitude, *radius)
        }
        Command::Simulate { profile, k, dt, t_end, record_every } => {
            simulate(out, profile, *k, *dt, *t_end, *record_every)
        }
        Command::Sweep { family, width, bracket } => sweep(out, family, *width, bracket.as_deref()),
        Command::Triplet { signs } => triplet(signs),
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    create_at(&dir.join(name))
}

fn create_at(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn verdict_outcome(report: &StabilityReport) -> Outcome {
    if report.verdict == Verdict::Unstable {
        Outcome::Unstable
    } else if report.critical {
        Outcome::Critical
    } else {
        Outcome::Stable
    }
}

fn analyze(out: &Path, spec: &ProfileSpec, scan: KScan, exec: Execution) -> Result<Outcome> {
    let p = spec.load()?;
    let report = penrose_test_with(&p, &PenroseOptions { scan, exec, roots: true })?;
    let table = PvTable::new(&p, exec);
    let ks: Vec<f64> = report.per_k.iter().map(|s| s.k).collect();
    let contours = exec::map(exec, &ks, |&k| contour_from_table(&p, &table, k));
    write_json(create(out, "report.json")?, &report)?;
    let dir = out.join("contours");
    for (i, c) in contours.iter().enumerate() {
        write_contour_csv(create(&dir, &format!("contour_{i:03}.csv"))?, c)?;
    }
    let outcome = verdict_outcome(&report);
    println!(
        "{}{}; max winding {}; {} violation(s)",
        match report.verdict {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
        },
        if report.critical { " (critical state)" } else { "" },
        report.max_winding(),
        report.violations.len()
    );
    Ok(outcome)
}

fn penrose(out: &Path, spec: &ProfileSpec, k: f64, svg: Option<&Path>, csv: Option<&Path>) -> Result<Outcome> {
    let p = spec.load()?;
    let contour = penrose_contour(&p, k)?;
    let csv = csv.map(Path::to_path_buf).unwrap_or_else(|| out.join("contour.csv"));
    let svg = svg.map(Path::to_path_buf).unwrap_or_else(|| out.join("contour.svg"));
    write_contour_csv(create_at(&csv)?, &contour)?;
    write_svg(&svg, &contour)?;
    match winding_number(&contour) {
        Ok(w) => {
            println!("winding {w} at k = {k}");
            Ok(if w > 0 { Outcome::Unstable } else { Outcome::Stable })
        }
        Err(Error::CriticalState { u, distance }) => {
            println!("contour passes within {distance:e} of the origin at u = {u}");
            Ok(Outcome::Critical)
        }
        Err(e) => Err(e),
    }
}

fn write_svg(path: &std::path::Path, contour: &PenroseContour) -> Result<()> {
    use std::io::Write;
    let mut w = create_at(path)?;
    w.write_all(contour_svg(contour).as_bytes())?;
    w.flush()?;
    Ok(())
}

fn signature(out: &Path, spec: &ProfileSpec) -> Result<Outcome> {
    let p = spec.load()?;
    let off = p.frame_offset();
    let grid = *p.grid();
    let rows = (0..grid.len()).map(|i| {
        let u = grid.node(i);
        vec![u + off, f64::from(continuum_signature(&p, u))]
    });
    write_table(create(out, "signature.csv")?, &["u", "sigma"], rows)?;
    Ok(Outcome::Stable)
}

fn roots(out: &Path, spec: &ProfileSpec, k: f64) -> Result<Outcome> {
    let p = spec.load()?;
    let off = p.frame_offset();
    let roots: Vec<RootInfo> = find_roots_uhp(&p, k)?
        .into_iter()
        .map(|u| RootInfo { re: u.re + off, im: u.im, growth: k * u.im })
        .collect();
    write_json(create(out, "roots.json")?, &json!({ "k": k, "roots": roots }))?;
    for r in &roots {
        println!("u = {} + {}i, growth {}", fmt_f64(r.re), fmt_f64(r.im), fmt_f64(r.growth));
    }
    Ok(if roots.is_empty() { Outcome::Stable } else { Outcome::Unstable })
}

fn destabilize(
    out: &Path,
    spec: &ProfileSpec,
    kind: Kind,
    u0: Option<f64>,
    h: f64,
    amplitude: f64,
    radius: Option<f64>,
) -> Result<Outcome> {
    let p = spec.load()?;
    let need_u0 = || u0.ok_or_else(|| Error::Config("--u0 is required for this kind".into()));
    let d: Destabilization = match kind {
        Kind::W11 => destabilize_w11(&p, need_u0()?, h)?,
        Kind::Rearrangement => destabilize_rearrangement(&p, need_u0()?, h)?,
        Kind::K0 => {
            let u = match u0 {
                Some(u) => u,
                None => *penrose_core::dispersion::k0_critical_scan(&p)
                    .first()
                    .ok_or_else(|| Error::Domain("profile has no k = 0 critical point".into()))?,
            };
            destabilize_k0(&p, u, amplitude, radius.unwrap_or(0.15))?
        }
        Kind::Embedded => {
            let center = match u0 {
                Some(u) => u,
                None => penrose_core::dispersion::embedded_mode_scan(&p)
                    .first()
                    .map(|m| m.u)
                    .ok_or_else(|| Error::Domain("profile hosts no embedded mode".into()))?,
            };
            destabilize_embedded(&p, Bump::new(center, radius.unwrap_or(0.5), amplitude)?)?
        }
    };

    let perturbed = &d.profile;
    let off = perturbed.frame_offset();
    let grid = *perturbed.grid();
    let rows = (0..grid.len()).map(|i| {
        let v = grid.node(i);
        vec![v + off, perturbed.f0(v), perturbed.df(v)]
    });
    write_table(create(out, "perturbed_profile.csv")?, &["v", "f0", "f0p"], rows)?;

    let k = d.summary.unstable_k_band.map_or(1.0, |b| b.representative());
    write_contour_csv(create(out, "contour_before.csv")?, &penrose_contour(&p, k)?)?;
    write_contour_csv(create(out, "contour_after.csv")?, &penrose_contour(perturbed, k)?)?;
    let report = json!({
        "kind": d.summary.kind,
        "norm_w11": d.summary.norm_w11,
        "winding_before": d.summary.winding_before,
        "winding_after": d.summary.winding_after,
        "unstable_k_band": d.summary.unstable_k_band,
        "zero_count_delta": d.summary.zero_count_delta,
        "contour_k": k,
        "summary": d.summary,
        "before": d.before,
        "after": d.after,
    });
    write_json(create(out, "report.json")?, &report)?;
    println!(
        "{:?}: ||df0||_W11 = {}, winding {} -> {}",
        d.summary.kind,
        fmt_f64(d.summary.norm_w11),
        d.summary.winding_before,
        d.summary.winding_after
    );
    Ok(verdict_outcome(&d.after))
}

fn simulate(
    out: &Path,
    spec: &ProfileSpec,
    k: f64,
    dt: Option<f64>,
    t_end: Option<f64>,
    record_every: usize,
) -> Result<Outcome> {
    let p = spec.load()?;
    let mut state = ModeState::default_accessible(&p, k)?;
    let mut opts = IntegrateOptions::defaults(k, p.grid());
    opts.dt = dt.unwrap_or(opts.dt);
    opts.t_end = t_end.unwrap_or(opts.t_end);
    opts.record_every = record_every.max(1);
    let traj = integrate(&mut state, &p, &opts)?;
    let rows = traj.points.iter().map(|pt| {
        let (h, m) = pt.conserved.map_or((f64::NAN, f64::NAN), |c| (c.h_l, c.p_l));
        vec![pt.t, pt.norm, h, m]
    });
    write_table(create(out, "trajectory.csv")?, &["t", "norm_f", "H_L", "P_L"], rows)?;
    let rate = growth_rate(&traj);
    let drift = traj.relative_drift();
    let summary = json!({
        "k": k,
        "dt": opts.dt,
        "t_end": opts.t_end,
        "gamma": rate.gamma,
        "stable": rate.stable,
        "recurrence_time": traj.recurrence_time,
        "past_recurrence": traj.past_recurrence(),
        "overflow": traj.overflow,
        "drift_h_l": drift.map(|d| d.0),
        "drift_p_l": drift.map(|d| d.1),
    });
    write_json(create(out, "summary.json")?, &summary)?;
    if traj.past_recurrence() {
        eprintln!(
            "warning: run passes the recurrence time {}; late-time norms include grid echoes",
            traj.recurrence_time
        );
    }
    match rate.gamma {
        Some(g) => println!("gamma = {}", fmt_f64(g)),
        None => println!("gamma undefined (zero data)"),
    }
    Ok(if rate.stable { Outcome::Stable } else { Outcome::Unstable })
}

fn sweep(out: &Path, family: &str, width: f64, bracket: Option<&str>) -> Result<Outcome> {
    if family != "bimax" {
        return Err(Error::Config(format!("sweep supports only `bimax`, got `{family}`")));
    }
    let (lo, hi) = match bracket {
        None => (0.75 * width, width),
        Some(b) => {
            let bad = || Error::Config(format!("bracket `{b}` is not lo:hi"));
            let (a, c) = b.split_once(':').ok_or_else(bad)?;
            (a.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?)
        }
    };
    let sep = critical_separation_in(width, lo, hi)?;
    write_table(create(out, "sweep.csv")?, &["c", "pv"], sep.log.iter().map(|s| vec![s.c, s.pv]))?;
    write_json(create(out, "sweep.json")?, &sep)?;
    println!("c* = {}", fmt_f64(sep.c_star));
    Ok(Outcome::Stable)
}

fn triplet(signs: &str) -> Result<Outcome> {
    let t: ModeTriplet = signs.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
    let lbm = little_big_man(&t);
    println!("{}", if lbm.definite_achievable { "definite" } else { "indefinite" });
    for s in t.frame_sequence() {
        println!("({s})");
    }
    Ok(Outcome::Stable)
}
