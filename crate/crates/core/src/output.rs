//! Machine-readable inputs and outputs: sample files, `rmse.csv`,
//! `bounds.csv` and `report.json`.
//!
//! Floating-point columns use Rust's shortest round-trip scientific
//! formatting, so files are locale independent and byte-identical for
//! identical results.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;
use serde_json::json;

use crate::bench::{AggregateReport, BoundsRow, Scenario, ScenarioOutcome, SweepVar};
use crate::error::{Error, Result};
use crate::signal::CVector;

pub const RMSE_CSV_HEADER: &str = "sweep_var,sweep_value,estimator,freq_index,rmse_rad,crb_sqrt_rad,acrb_sqrt_rad,trials,failures,crb_mean_sqrt_rad";
pub const BOUNDS_CSV_HEADER: &str = "sweep_var,sweep_value,freq_index,sigma2,lambda,crb_sqrt_rad,acrb_sqrt_rad";

/// Reads complex samples, one `re,im` pair per line. A non-numeric first
/// line is taken as a header; blank lines are skipped.
pub fn read_samples<R: BufRead>(reader: R) -> Result<CVector> {
    let mut values = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let parsed = match fields.as_slice() {
            [re, im] => re.parse::<f64>().ok().zip(im.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some((re, im)) if re.is_finite() && im.is_finite() => values.push(Complex64::new(re, im)),
            None if n == 0 => continue,
            _ => {
                return Err(Error::config(
                    format!("samples line {}", n + 1),
                    format!("expected two finite numbers `re,im`, got `{trimmed}`"),
                ))
            }
        }
    }
    if values.is_empty() {
        return Err(Error::config("samples", "file contains no samples"));
    }
    Ok(CVector::from_vec(values))
}

pub fn load_samples(path: impl AsRef<Path>) -> Result<CVector> {
    let path = path.as_ref();
    let file = fs::File::open(path)
        .map_err(|e| Error::config("input", format!("cannot open {}: {e}", path.display())))?;
    read_samples(std::io::BufReader::new(file))
}

pub fn write_samples<W: Write>(y: &CVector, mut w: W) -> Result<()> {
    writeln!(w, "re,im")?;
    for z in y.iter() {
        writeln!(w, "{:e},{:e}", z.re, z.im)?;
    }
    Ok(())
}

fn sweep_value(var: SweepVar, v: f64) -> String {
    match var {
        SweepVar::Samples => format!("{}", v as usize),
        SweepVar::Snr => format!("{v}"),
    }
}

pub fn write_rmse_csv<W: Write>(report: &AggregateReport, mut w: W) -> Result<()> {
    writeln!(w, "{RMSE_CSV_HEADER}")?;
    let var = report.sweep_var;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{:e},{:e},{:e},{},{},{:e}",
            var.name(),
            sweep_value(var, r.sweep_value),
            r.estimator.name(),
            r.freq_index,
            r.rmse_rad,
            r.crb_sqrt_rad,
            r.acrb_sqrt_rad,
            r.trials,
            r.failures,
            r.crb_mean_sqrt_rad,
        )?;
    }
    Ok(())
}

pub fn write_bounds_csv<W: Write>(rows: &[BoundsRow], var: SweepVar, mut w: W) -> Result<()> {
    writeln!(w, "{BOUNDS_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{:e},{:e},{:e},{:e}",
            var.name(),
            sweep_value(var, r.sweep_value),
            r.freq_index,
            r.sigma2,
            r.lambda,
            r.crb_sqrt_rad,
            r.acrb_sqrt_rad,
        )?;
    }
    Ok(())
}

/// Full configuration echo, seeding rule, aggregate results and timings.
pub fn report_json(scenario: &Scenario, outcome: &ScenarioOutcome, threads: Option<usize>) -> serde_json::Value {
    let failures: usize = outcome.report.rows.iter().map(|r| r.failures).sum();
    json!({
        "scenario": scenario,
        "seeds": {
            "master": scenario.seed,
            "child_rule": "splitmix64(splitmix64(splitmix64(master) ^ sweep_index) ^ trial_index), ChaCha8 stream per trial",
        },
        "threads": threads,
        "aggregate": outcome.report,
        "failures_total": failures,
        "timings_ms": outcome.timings,
        "notes": {
            "crb": "crb_sqrt_rad is sqrt of the CRB diagonal averaged over trial draws; crb_mean_sqrt_rad averages the square roots",
            "acrb": "approximate hybrid bound evaluated at the mean frequencies; valid only for large prior concentrations",
        },
    })
}

/// Writes `rmse.csv` and `report.json` into `dir`, creating it if needed.
pub fn write_benchmark(
    dir: impl AsRef<Path>,
    scenario: &Scenario,
    outcome: &ScenarioOutcome,
    threads: Option<usize>,
) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut csv = Vec::new();
    write_rmse_csv(&outcome.report, &mut csv)?;
    fs::write(dir.join("rmse.csv"), csv)?;
    let json = serde_json::to_string_pretty(&report_json(scenario, outcome, threads))?;
    fs::write(dir.join("report.json"), json + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_with_and_without_header() {
        let with = read_samples("re,im\n1,0\n0.5, -2\n\n".as_bytes()).unwrap();
        assert_eq!(with.len(), 2);
        assert_eq!(with[1], Complex64::new(0.5, -2.0));
        let without = read_samples("1,1\n2,2\n".as_bytes()).unwrap();
        assert_eq!(without.len(), 2);
    }

    #[test]
    fn malformed_samples_name_the_line() {
        match read_samples("re,im\n1,0\n1;2\n".as_bytes()) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "samples line 3"),
            other => panic!("{other:?}"),
        }
        assert!(read_samples("re,im\n".as_bytes()).is_err());
        assert!(read_samples("1,nan\n".as_bytes()).is_err());
    }

    #[test]
    fn sample_round_trip() {
        let y = CVector::from_vec(vec![Complex64::new(0.1, -1e-300), Complex64::new(3.0, 7.25)]);
        let mut buf = Vec::new();
        write_samples(&y, &mut buf).unwrap();
        assert_eq!(read_samples(buf.as_slice()).unwrap(), y);
    }
}
