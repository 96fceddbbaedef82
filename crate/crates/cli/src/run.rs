//! Subcommand implementations. Each runner validates the full configuration
//! before creating any output file, fans independent grid points out to the
//! rayon pool, and writes rows in grid order so results are byte-identical
//! for any thread count.

use crate::config::{sweep_value_to_internal, ConfigError, RunConfig, SweepVarConfig};
use crate::csvfmt::{fmt, fmt_opt, CsvWriter};
use electromech::covariance::{
    drift_matrix, entanglement_sweep, stability, Stability, SweepPoint, SweepVar,
};
use electromech::linear_response::SymmetricGrid;
use electromech::model::derive;
use electromech::squeezing::{max_squeezing_scan, squeezing_spectrum, ScanRow, SqueezingError};
use electromech::steady_state::{
    bistability_curve, mean_fields_on_curve, mean_fields_zero_field_branch, turning_points,
};
use electromech_oracle::{run_standard_checks, FaultInjection, VerificationReport};
use rayon::prelude::*;
use serde::Serialize;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed: {failed} of {total} checks")]
    VerificationFailed { failed: usize, total: usize },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Numerical(_) | RunError::Io(_) => 2,
            RunError::VerificationFailed { .. } => 3,
        }
    }
}

fn out_file(dir: &Path, name: &str) -> Result<BufWriter<File>, RunError> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

pub fn run_bistability(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let section = cfg
        .bistability
        .as_ref()
        .ok_or(ConfigError::MissingSection("bistability"))?;
    let grid = section.i_b_grid.values()?;
    let p = cfg.params.to_angular()?;
    let d = derive(&p).map_err(|e| RunError::Numerical(e.to_string()))?;
    for w in electromech::model::validate_dispersive(&p, &d) {
        eprintln!("warning: {w}");
    }
    let curve = bistability_curve(&d, &p, &grid).map_err(|e| RunError::Numerical(e.to_string()))?;
    let tps = turning_points(&curve, &d, &p);
    // cross-tag the classical slope hint with the eigenvalue criterion at
    // each point's own mean fields
    let stable_eig: Vec<bool> = curve
        .par_iter()
        .map(|pt| {
            let m = mean_fields_on_curve(pt.i_b, &d, &p);
            let r = drift_matrix(&d, &m, &p);
            stability(&r, &p) == Stability::Stable
        })
        .collect();

    let mut w = CsvWriter::new(
        out_file(out_dir, "bistability.csv")?,
        &[
            "P_watt",
            "I_a",
            "I_b",
            "branch",
            "stable_hint",
            "stable_eig",
            "F_factor",
        ],
    )?;
    for (pt, eig) in curve.iter().zip(&stable_eig) {
        w.row(&[
            fmt(pt.power),
            fmt(pt.i_a),
            fmt(pt.i_b),
            pt.branch.as_str().to_string(),
            pt.stable_hint.to_string(),
            eig.to_string(),
            fmt(pt.f_factor),
        ])?;
    }
    w.finish()?;

    let mut w = CsvWriter::new(out_file(out_dir, "turning_points.csv")?, &["P_watt", "I_b"])?;
    for tp in &tps {
        w.row(&[fmt(tp.power), fmt(tp.i_b)])?;
    }
    w.finish()?;
    println!(
        "bistability: {} points, {} turning point(s)",
        curve.len(),
        tps.len()
    );
    for tp in &tps {
        println!(
            "  turning point: P = {:.4e} W at I_b = {:.4e}",
            tp.power, tp.i_b
        );
    }
    Ok(vec![
        out_dir.join("bistability.csv"),
        out_dir.join("turning_points.csv"),
    ])
}

pub fn run_squeezing(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let section = cfg
        .squeezing
        .as_ref()
        .ok_or(ConfigError::MissingSection("squeezing"))?;
    let p = cfg.params.to_angular()?;
    let grid = SymmetricGrid::symmetric(
        section.omega_grid.max_abs_over_omega_m * p.omega_m,
        section.omega_grid.n,
    )
    .map_err(|e| ConfigError::Grid(e.to_string()))?;

    if let Some(scan_spec) = &section.power_scan {
        let powers = scan_spec.values()?;
        // fan chunks of the power grid out to the pool; merge preserves order
        let chunk = powers
            .len()
            .div_ceil(rayon::current_num_threads().max(1) * 4)
            .max(1);
        let rows: Vec<ScanRow> = powers
            .par_chunks(chunk)
            .map(|ps| max_squeezing_scan(&p, ps, &grid).rows)
            .flatten()
            .collect();
        let mut w = CsvWriter::new(
            out_file(out_dir, "squeezing_scan.csv")?,
            &["P_watt", "S_min", "stable"],
        )?;
        for row in &rows {
            w.row(&[fmt(row.power), fmt_opt(row.s_min), row.stable.to_string()])?;
        }
        w.finish()?;
        let optimum = rows
            .iter()
            .filter_map(|r| r.s_min.map(|s| (r.power, s)))
            .fold(None::<(f64, f64)>, |best, cand| match best {
                Some((_, s)) if s <= cand.1 => best,
                _ => Some(cand),
            });
        match optimum {
            Some((p_opt, s_min)) => println!(
                "squeezing scan: optimum S_min = {:.4} at P = {:.4e} W ({:.1}% below SQL)",
                s_min,
                p_opt,
                (1.0 - s_min) * 100.0
            ),
            None => println!("squeezing scan: no stable point in the power grid"),
        }
        return Ok(vec![out_dir.join("squeezing_scan.csv")]);
    }

    let d = derive(&p).map_err(|e| RunError::Numerical(e.to_string()))?;
    let m =
        mean_fields_zero_field_branch(&d, &p).map_err(|e| RunError::Numerical(e.to_string()))?;
    let mut w = CsvWriter::new(
        out_file(out_dir, "squeezing.csv")?,
        &["omega_over_omega_m", "S_minus", "S_plus", "stable"],
    )?;
    match squeezing_spectrum(&d, &m, &p, &grid) {
        Ok(spectrum) => {
            let n_squeezed = spectrum.iter().filter(|pt| pt.is_squeezed()).count();
            for pt in &spectrum {
                w.row(&[
                    fmt(pt.omega / p.omega_m),
                    fmt(pt.s_minus),
                    fmt(pt.s_plus),
                    "true".to_string(),
                ])?;
            }
            w.finish()?;
            println!(
                "squeezing: {} grid points, {} below the SQL",
                spectrum.len(),
                n_squeezed
            );
        }
        Err(SqueezingError::UnstablePoint) => {
            // flagged per row rather than crashing
            for &omega in grid.values() {
                w.row(&[
                    fmt(omega / p.omega_m),
                    "nan".to_string(),
                    "nan".to_string(),
                    "false".to_string(),
                ])?;
            }
            w.finish()?;
            eprintln!("warning: operating point unstable; spectrum columns are nan");
        }
        Err(e) => return Err(RunError::Numerical(e.to_string())),
    }
    Ok(vec![out_dir.join("squeezing.csv")])
}

pub fn run_entanglement(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let section = cfg
        .entanglement
        .as_ref()
        .ok_or(ConfigError::MissingSection("entanglement"))?;
    let values = section.grid.values()?;
    let p = cfg.params.to_angular()?;
    let var = match section.sweep {
        SweepVarConfig::TC => SweepVar::TC,
        SweepVarConfig::TA => SweepVar::TA,
        SweepVarConfig::DeltaA => SweepVar::DeltaA,
        SweepVarConfig::Power => SweepVar::Power,
    };
    let internal: Vec<f64> = values
        .iter()
        .map(|&v| sweep_value_to_internal(section.sweep, v))
        .collect();
    let chunk = internal
        .len()
        .div_ceil(rayon::current_num_threads().max(1) * 4)
        .max(1);
    let points: Vec<SweepPoint> = internal
        .par_chunks(chunk)
        .map(|vals| entanglement_sweep(&p, var, vals))
        .flatten()
        .collect();

    let mut w = CsvWriter::new(
        out_file(out_dir, "entanglement.csv")?,
        &["sweep_value", "E_N", "stable"],
    )?;
    for (cfg_value, pt) in values.iter().zip(&points) {
        w.row(&[fmt(*cfg_value), fmt_opt(pt.e_n), pt.stable.to_string()])?;
    }
    w.finish()?;
    let positive = points
        .iter()
        .filter(|pt| pt.e_n.unwrap_or(0.0) > 0.0)
        .count();
    println!(
        "entanglement: {} points, {} with E_N > 0, {} unstable",
        points.len(),
        positive,
        points.iter().filter(|pt| !pt.stable).count()
    );
    Ok(vec![out_dir.join("entanglement.csv")])
}

#[derive(Serialize)]
struct ReportJson<'a> {
    check_name: &'a str,
    max_abs_error: f64,
    max_rel_error: f64,
    n_points: usize,
    pass: bool,
    notes: &'a str,
}

#[derive(Serialize)]
struct VerifyJson<'a> {
    checks: Vec<ReportJson<'a>>,
    pass: bool,
}

pub fn run_verify(out_dir: &Path, fault: FaultInjection) -> Result<Vec<PathBuf>, RunError> {
    let reports: Vec<VerificationReport> = run_standard_checks(fault);
    for rep in &reports {
        println!("{rep}");
    }
    let pass = reports.iter().all(|r| r.pass);
    let json = VerifyJson {
        checks: reports
            .iter()
            .map(|r| ReportJson {
                check_name: &r.check_name,
                max_abs_error: r.max_abs_error,
                max_rel_error: r.max_rel_error,
                n_points: r.n_points,
                pass: r.pass,
                notes: &r.notes,
            })
            .collect(),
        pass,
    };
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join("verify_report.json");
    let mut file = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(&mut file, &json)?;
    use std::io::Write;
    file.write_all(b"\n")?;
    file.flush()?;
    if !pass {
        return Err(RunError::VerificationFailed {
            failed: reports.iter().filter(|r| !r.pass).count(),
            total: reports.len(),
        });
    }
    Ok(vec![path])
}

impl From<serde_json::Error> for RunError {
    fn from(e: serde_json::Error) -> Self {
        RunError::Io(std::io::Error::other(e))
    }
}
