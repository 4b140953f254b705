//! Writing a run report to disk: `report.json`, CSV tables and optional
//! binary field dumps.

use std::fs;
use std::path::{Path, PathBuf};

use crate::cli::run::RunReport;
use crate::error::{Error, Result};
use crate::torus::io::{write_hermitian, write_potential};

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_table(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// The numeric payload as canonical JSON; equal configs give equal bytes.
pub fn payload_json(report: &RunReport) -> String {
    serde_json::to_string(&report.payload).expect("payload serializes")
}

/// Writes every artifact and returns the paths written.
pub fn write_artifacts(report: &RunReport, dir: &Path, dump_fields: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written: Vec<PathBuf> = Vec::new();
    let mut put = |name: &str| -> PathBuf {
        let p = dir.join(name);
        written.push(p.clone());
        p
    };

    let json = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(put("report.json"), json + "\n")?;

    let p = &report.payload;
    if !p.suites.is_empty() {
        let header = strings(&[
            "suite", "property", "samples", "failures", "tolerance", "worst_value", "worst_slack", "worst_sample", "passed",
        ]);
        let rows: Vec<Vec<String>> = p
            .suites
            .iter()
            .flat_map(|s| {
                s.properties.iter().map(|o| {
                    vec![
                        s.suite.to_string(),
                        o.name.clone(),
                        o.samples.to_string(),
                        o.failures.to_string(),
                        num(o.tolerance),
                        num(o.worst_value),
                        num(o.worst_slack),
                        o.worst_sample.to_string(),
                        o.passed.to_string(),
                    ]
                })
            })
            .collect();
        write_table(&put("properties.csv"), &header, &rows)?;
    }

    if let Some(s) = &p.solve {
        let header = strings(&[
            "path", "param", "c", "calibrated", "residual_sup", "max_p", "max_q", "newton_iterations",
        ]);
        let mut rows = Vec::new();
        let mut history = Vec::new();
        for trail in &s.trails {
            for (k, st) in trail.states.iter().enumerate() {
                rows.push(vec![
                    st.path.name().to_string(),
                    num(st.param),
                    num(st.c),
                    num(st.calibrated),
                    num(st.residual_sup),
                    num(st.max_p),
                    num(st.max_q),
                    st.newton_iterations.to_string(),
                ]);
                for (it, r) in st.residual_history.iter().enumerate() {
                    history.push(vec![st.path.name().to_string(), k.to_string(), it.to_string(), num(*r)]);
                }
            }
        }
        write_table(&put("convergence.csv"), &header, &rows)?;
        write_table(
            &put("newton_history.csv"),
            &strings(&["path", "state", "iteration", "residual_sup"]),
            &history,
        )?;
    }

    if let Some(st) = &p.stability {
        let labels: Vec<String> = st
            .family
            .rows
            .first()
            .map(|r| r.profiles.iter().map(|q| q.label.clone()).collect())
            .unwrap_or_default();
        let mut header = vec!["t".to_string()];
        for l in &labels {
            header.push(format!("{l}:min"));
            header.push(format!("{l}:mean"));
        }
        let rows: Vec<Vec<String>> = st
            .family
            .rows
            .iter()
            .map(|r| {
                let mut row = vec![num(r.t)];
                for q in &r.profiles {
                    row.push(num(q.min_margin));
                    row.push(num(q.mean_margin));
                }
                row
            })
            .collect();
        write_table(&put("margins.csv"), &header, &rows)?;
        if let Some(m) = &st.monotonicity {
            let rows: Vec<Vec<String>> = m
                .rows
                .iter()
                .map(|r| vec![num(r.t_lo), num(r.t_hi), r.subset.clone(), num(r.slice_min), num(r.mean)])
                .collect();
            write_table(
                &put("monotonicity.csv"),
                &strings(&["t_lo", "t_hi", "subset", "slice_min", "mean"]),
                &rows,
            )?;
        }
    }

    if dump_fields {
        if let Some(f) = &report.fields {
            write_potential(&put("phi.bin"), &f.grid, &f.phi)?;
            put("phi.bin.hdr");
            write_hermitian(&put("omega.bin"), &f.grid, &f.omega)?;
            put("omega.bin.hdr");
        }
    }
    Ok(written)
}
