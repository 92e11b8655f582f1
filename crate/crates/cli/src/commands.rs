//! Scenario runners: each writes a CSV (and optionally a summary JSON and an
//! SVG plot) and returns the process exit status.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use twomode_core::spectrum::default_ratio_grid;
use twomode_core::{evolve_mixture, spectrum_sweep, Direction, MergeSchedule, Trajectory};

use crate::config::RunConfig;
use crate::plot::{self, Panel, Series};
use crate::CliError;

pub const MERGE_COLUMNS: [&str; 10] = [
    "t", "U0t", "U", "J", "eta", "theta", "phi", "energy", "norm_drift", "spread90",
];

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display())))?;
            Ok(Box::new(io::BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn csv_writer(path: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>, CliError> {
    Ok(csv::WriterBuilder::new().from_writer(open_out(path)?))
}

/// Shortest round-trip text, switching to exponent form for very small or
/// very large magnitudes so tiny drifts stay readable.
fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn finish(mut w: csv::Writer<Box<dyn Write>>) -> Result<(), CliError> {
    w.flush().map_err(CliError::Io)
}

/// `<out>.summary.json` next to the CSV, or stderr without `--out`.
fn write_summary(out: Option<&Path>, summary: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(summary).expect("summary serializes");
    match out {
        Some(p) => {
            let path = summary_path(p);
            std::fs::write(&path, text + "\n")
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            eprintln!("{text}");
            Ok(())
        }
    }
}

pub fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.json")
}

fn write_plot(path: Option<&Path>, panels: &[Panel]) -> Result<(), CliError> {
    if let Some(p) = path {
        std::fs::write(p, plot::render(panels))
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

fn record_row(schedule: &MergeSchedule, traj: &Trajectory, i: usize) -> Vec<String> {
    let r = &traj.records[i];
    vec![
        num(r.t),
        num(schedule.u0() * r.t),
        num(r.u),
        num(r.j),
        num(r.reading.eta),
        num(r.reading.theta),
        num(r.reading.phi),
        num(r.energy),
        num(r.norm_drift),
        r.spread90.map(|s| s.to_string()).unwrap_or_default(),
    ]
}

#[derive(Serialize)]
struct Calibration {
    u0: f64,
    j0: f64,
    n_cal: u64,
    ratio: f64,
    sigma_r: f64,
    sigma_z: f64,
    separation0: f64,
    initial_tunneling_fraction: f64,
}

fn calibration(s: &MergeSchedule) -> Calibration {
    let g = s.geometry();
    Calibration {
        u0: s.u0(),
        j0: s.j0(),
        n_cal: s.n_cal(),
        ratio: s.ratio(),
        sigma_r: g.sigma_r,
        sigma_z: g.sigma_z,
        separation0: g.separation0,
        initial_tunneling_fraction: g.initial_tunneling_fraction(),
    }
}

fn run_one(config: &RunConfig, direction: Direction, t_merge: f64) -> Result<(MergeSchedule, Trajectory), CliError> {
    let mixture = config.initial_state()?;
    let schedule = config.schedule(&mixture, direction, t_merge)?;
    log::info!(
        "{direction} merge, t_m = {t_merge}: {} sectors, U0 = {}, J0 = {}",
        mixture.sectors().len(),
        schedule.u0(),
        schedule.j0()
    );
    let traj = evolve_mixture(&mixture, &schedule, &config.evolution()).map_err(CliError::from_core)?;
    log::info!("t_m = {t_merge}: eta_final = {}", traj.last().reading.eta);
    Ok((schedule, traj))
}

fn merge_panels(runs: &[(&str, &Trajectory)]) -> Vec<Panel> {
    let series = |f: &dyn Fn(&twomode_core::SampleRecord) -> f64, name: &str| -> Vec<Series> {
        runs.iter()
            .enumerate()
            .map(|(i, (label, t))| Series {
                label: format!("{name} {label}").trim().to_string(),
                points: t.records.iter().map(|r| (r.t, f(r))).collect(),
                dashed: i > 0,
            })
            .collect()
    };
    let mut angles = series(&|r| r.reading.theta, "theta");
    for mut s in series(&|r| r.reading.phi, "phi") {
        s.dashed = true;
        angles.push(s);
    }
    vec![
        Panel {
            title: "Largest condensate fraction".into(),
            x_label: "U0 t".into(),
            y_label: "eta".into(),
            log_x: false,
            series: series(&|r| r.reading.eta, "eta"),
            legend: true,
        },
        Panel {
            title: "Condensate mode angles".into(),
            x_label: "U0 t".into(),
            y_label: "theta, phi".into(),
            log_x: false,
            series: angles,
            legend: true,
        },
        Panel {
            title: "Coefficients".into(),
            x_label: "U0 t".into(),
            y_label: "U, J".into(),
            log_x: false,
            series: series(&|r| r.u, "U").into_iter().chain(series(&|r| r.j, "J")).collect(),
            legend: true,
        },
    ]
}

pub fn run_merge(config: &RunConfig) -> Result<(), CliError> {
    let (schedule, traj) = run_one(config, config.direction.into(), config.t_merge)?;
    let mut w = csv_writer(config.out.as_deref())?;
    w.write_record(MERGE_COLUMNS).map_err(CliError::from_csv)?;
    for i in 0..traj.records.len() {
        w.write_record(record_row(&schedule, &traj, i)).map_err(CliError::from_csv)?;
    }
    finish(w)?;

    let last = traj.last();
    let mut summary = serde_json::to_value(config).expect("config serializes");
    let extra = json!({
        "eta_final": last.reading.eta,
        "theta_final": last.reading.theta,
        "phi_final": last.reading.phi,
        "spread90_final": last.spread90,
        "max_norm_drift": traj.max_norm_drift(),
        "n_mean": traj.n_mean,
        "eta_normalization": "mean total atom number",
        "sectors": traj.steps.len(),
        "steps": traj.steps.iter().map(|s| s.1).max(),
        "calibration": calibration(&schedule),
    });
    summary.as_object_mut().unwrap().extend(extra.as_object().unwrap().clone());
    write_summary(config.out.as_deref(), &summary)?;
    write_plot(config.plot.as_deref(), &merge_panels(&[("", &traj)]))
}

pub fn run_spectrum(config: &RunConfig) -> Result<(), CliError> {
    let n = config.spectrum_n()?;
    let grid = match &config.ratios {
        Some(r) => r.clone(),
        None => default_ratio_grid(n, config.grid_points),
    };
    if grid.is_empty() {
        return Err(CliError::Config("ratio grid is empty".into()));
    }
    let table = spectrum_sweep(n, &grid).map_err(CliError::from_core)?;
    let mut w = csv_writer(config.out.as_deref())?;
    w.write_record(["ratio", "level_index", "energy_shifted"]).map_err(CliError::from_csv)?;
    for (ratio, levels) in table.ratios.iter().zip(&table.levels) {
        for (l, e) in levels.iter().enumerate() {
            w.write_record([num(*ratio), l.to_string(), num(*e)]).map_err(CliError::from_csv)?;
        }
    }
    finish(w)?;

    let log_x = table.ratios.iter().all(|&r| r > 0.0);
    let series = (0..=n as usize)
        .map(|l| Series {
            label: format!("level {l}"),
            points: table.ratios.iter().zip(&table.levels).map(|(r, lv)| (*r, lv[l])).collect(),
            dashed: false,
        })
        .collect();
    write_plot(
        config.plot.as_deref(),
        &[Panel {
            title: format!("Spectrum, N = {n}"),
            x_label: "J/U".into(),
            y_label: "E - E0 (units of U)".into(),
            log_x,
            series,
            legend: false,
        }],
    )
}

pub fn run_sweep(config: &RunConfig) -> Result<(), CliError> {
    if config.t_merge_list.is_empty() {
        return Err(CliError::Config("t_merge list is empty".into()));
    }
    if let Some(bad) = config.t_merge_list.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(CliError::Config(format!("t_merge {bad} must be positive")));
    }
    let rows: Vec<Result<Trajectory, CliError>> = config
        .t_merge_list
        .par_iter()
        .map(|&tm| run_one(config, config.direction.into(), tm).map(|(_, t)| t))
        .collect();

    let mut w = csv_writer(config.out.as_deref())?;
    w.write_record(["t_merge", "eta_final", "theta_final", "phi_final", "spread90", "status"])
        .map_err(CliError::from_csv)?;
    let mut successes = 0;
    let mut failures = Vec::new();
    for (tm, row) in config.t_merge_list.iter().zip(&rows) {
        match row {
            Ok(t) => {
                successes += 1;
                let r = t.last();
                w.write_record([
                    num(*tm),
                    num(r.reading.eta),
                    num(r.reading.theta),
                    num(r.reading.phi),
                    r.spread90.map(|s| s.to_string()).unwrap_or_default(),
                    "ok".to_string(),
                ])
                .map_err(CliError::from_csv)?;
            }
            Err(e) => {
                failures.push(format!("t_merge {tm}: {e}"));
                w.write_record([num(*tm), String::new(), String::new(), String::new(), String::new(), format!("error: {e}")])
                    .map_err(CliError::from_csv)?;
            }
        }
    }
    finish(w)?;
    if successes == 0 {
        return Err(CliError::Numerical(failures.join("; ")));
    }
    for f in failures {
        log::warn!("{f}");
    }
    Ok(())
}

pub fn run_compare(config: &RunConfig) -> Result<(), CliError> {
    let (s_r, radial) = run_one(config, Direction::Radial, config.t_merge)?;
    let (s_a, axial) = run_one(config, Direction::Axial, config.t_merge)?;

    let mut header = vec!["t".to_string(), "U0t".to_string()];
    for suffix in ["radial", "axial"] {
        for col in &MERGE_COLUMNS[2..] {
            header.push(format!("{col}_{suffix}"));
        }
    }
    let mut w = csv_writer(config.out.as_deref())?;
    w.write_record(&header).map_err(CliError::from_csv)?;
    for i in 0..radial.records.len() {
        let mut row = record_row(&s_r, &radial, i);
        row.extend(record_row(&s_a, &axial, i).into_iter().skip(2));
        w.write_record(&row).map_err(CliError::from_csv)?;
    }
    finish(w)?;

    let mut summary = serde_json::to_value(config).expect("config serializes");
    let extra = json!({
        "eta_final_radial": radial.last().reading.eta,
        "eta_final_axial": axial.last().reading.eta,
        "theta_final_radial": radial.last().reading.theta,
        "theta_final_axial": axial.last().reading.theta,
        "phi_final_radial": radial.last().reading.phi,
        "phi_final_axial": axial.last().reading.phi,
        "calibration_radial": calibration(&s_r),
        "calibration_axial": calibration(&s_a),
    });
    summary.as_object_mut().unwrap().extend(extra.as_object().unwrap().clone());
    write_summary(config.out.as_deref(), &summary)?;
    write_plot(config.plot.as_deref(), &merge_panels(&[("radial", &radial), ("axial", &axial)]))
}
