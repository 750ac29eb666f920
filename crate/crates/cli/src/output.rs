//! Atomic artifact writing and the on-disk formats.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use spinamp::{LogFit, SweepRow, TraceResult};

use crate::config::RunConfig;
use crate::error::CliError;

pub const TRACE_HEADER: [&str; 7] = ["r", "Mz0", "Mz1", "contrast", "Q0", "Q1", "fidelity"];
pub const SWEEP_HEADER: [&str; 6] = ["n", "N", "r_star", "contrast_sat", "Q_sat", "fidelity_sat"];

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Artifacts held in memory until everything has been computed.
#[derive(Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, name: String, bytes: Vec<u8>) {
        self.files.push((name, bytes));
    }

    pub fn names(&self) -> Vec<String> {
        self.files.iter().map(|(n, _)| n.clone()).collect()
    }

    /// Writes each file through a temp file in `dir` and a rename.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let mut written = Vec::new();
        for (name, bytes) in self.files {
            let path = dir.join(&name);
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
            tmp.write_all(&bytes).map_err(|e| CliError::io(&path, e))?;
            tmp.as_file()
                .sync_all()
                .map_err(|e| CliError::io(&path, e))?;
            tmp.persist(&path)
                .map_err(|e| CliError::io(&path, e.error))?;
            written.push(path);
        }
        Ok(written)
    }
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn trace_csv(t: &TraceResult) -> Vec<u8> {
    csv_bytes(
        &TRACE_HEADER,
        (0..t.len()).map(|k| {
            let mut row = vec![(k + 1).to_string()];
            row.extend(
                [
                    t.mz0[k],
                    t.mz1[k],
                    t.contrast[k],
                    t.q0[k],
                    t.q1[k],
                    t.fidelity[k],
                ]
                .into_iter()
                .map(fmt_f64),
            );
            row
        }),
    )
}

pub fn sweep_csv(rows: &[SweepRow]) -> Vec<u8> {
    csv_bytes(
        &SWEEP_HEADER,
        rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                r.dim.to_string(),
                r.r_star.map(|x| x.to_string()).unwrap_or_default(),
                fmt_f64(r.contrast_sat),
                fmt_f64(r.q_sat),
                fmt_f64(r.fidelity_sat),
            ]
        }),
    )
}

/// Parses a trace file back. `n_amplifier` and `threshold` are not stored in
/// the file; `r_star` is recomputed from them.
pub fn parse_trace_csv(
    bytes: &[u8],
    n_amplifier: usize,
    threshold: f64,
) -> Result<TraceResult, String> {
    let mut rdr = csv::Reader::from_reader(bytes);
    let header = rdr.headers().map_err(|e| e.to_string())?.clone();
    if header.iter().ne(TRACE_HEADER) {
        return Err(format!("unexpected header {header:?}"));
    }
    let mut t = TraceResult {
        n_amplifier,
        threshold,
        mz0: Vec::new(),
        mz1: Vec::new(),
        contrast: Vec::new(),
        q0: Vec::new(),
        q1: Vec::new(),
        fidelity: Vec::new(),
        r_star: None,
    };
    for rec in rdr.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let v: Vec<f64> = rec
            .iter()
            .skip(1)
            .map(|s| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}")))
            .collect::<Result<_, _>>()?;
        if v.len() != 6 {
            return Err(format!("row has {} values", v.len() + 1));
        }
        t.mz0.push(v[0]);
        t.mz1.push(v[1]);
        t.contrast.push(v[2]);
        t.q0.push(v[3]);
        t.q1.push(v[4]);
        t.fidelity.push(v[5]);
        if t.r_star.is_none() && v[2] >= threshold {
            t.r_star = Some(t.contrast.len());
        }
    }
    Ok(t)
}

#[derive(Serialize)]
pub struct Metadata<'a, S: Serialize> {
    pub command: &'a str,
    pub version: &'a str,
    pub timestamp: String,
    pub config: &'a RunConfig,
    pub files: Vec<String>,
    pub summary: S,
}

pub fn metadata_json<S: Serialize>(
    command: &str,
    config: &RunConfig,
    files: Vec<String>,
    summary: S,
) -> Vec<u8> {
    let meta = Metadata {
        command,
        version: env!("CARGO_PKG_VERSION"),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        config,
        files,
        summary,
    };
    let mut out = serde_json::to_vec_pretty(&meta).expect("metadata serializes");
    out.push(b'\n');
    out
}

#[derive(Serialize)]
pub struct FitReport {
    /// Least-squares fit of r_star against log2 N, when at least two sizes
    /// reached the threshold.
    pub fit: Option<LogFit>,
    pub sizes_reaching_threshold: usize,
}

pub fn fit_json(report: &FitReport) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(report).expect("fit serializes");
    out.push(b'\n');
    out
}

pub fn run_plot_script(trace_file: &str) -> Vec<u8> {
    format!(
        r#"# Plots {trace_file}; run from the directory holding it.
import csv
import matplotlib.pyplot as plt

with open("{trace_file}") as f:
    rows = list(csv.DictReader(f))
r = [int(x["r"]) for x in rows]
col = lambda k: [float(x[k]) for x in rows]

fig, ax = plt.subplots(3, 1, sharex=True, figsize=(6, 8))
ax[0].plot(r, col("contrast"), "o-", ms=3)
ax[0].set_ylabel("contrast C")
ax[1].plot(r, col("Q0"), label="Q0")
ax[1].plot(r, col("Q1"), label="Q1")
ax[1].set_ylabel("Meyer-Wallach Q")
ax[1].legend()
ax[2].semilogy(r, col("fidelity"))
ax[2].set_ylabel("branch fidelity")
ax[2].set_xlabel("repetitions r")
fig.tight_layout()
fig.savefig("{trace_file}".replace(".csv", ".png"), dpi=150)
"#
    )
    .into_bytes()
}

pub fn sweep_plot_script(table_file: &str, trace_files: &[String]) -> Vec<u8> {
    let traces = trace_files
        .iter()
        .map(|f| format!("{f:?}"))
        .collect::<Vec<_>>()
        .join(", ");
    format!(
        r#"# Plots {table_file} and its traces; run from the directory holding them.
import csv
import math
import matplotlib.pyplot as plt

fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
for name in [{traces}]:
    with open(name) as f:
        rows = list(csv.DictReader(f))
    left.plot([int(x["r"]) for x in rows], [float(x["contrast"]) for x in rows], label=name)
left.set_xlabel("repetitions r")
left.set_ylabel("contrast C")
left.legend(fontsize=7)

with open("{table_file}") as f:
    rows = [x for x in csv.DictReader(f) if x["r_star"]]
right.plot([math.log2(int(x["N"])) for x in rows], [int(x["r_star"]) for x in rows], "o-")
right.set_xlabel("log2 N")
right.set_ylabel("r*")
fig.tight_layout()
fig.savefig("{table_file}".replace(".csv", ".png"), dpi=150)
"#
    )
    .into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.0, 6.000000000000002, 1e-300, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            assert!(s.split('e').next().unwrap().replace(['-', '.'], "").len() >= 15);
        }
    }

    #[test]
    fn trace_round_trip() {
        let t = TraceResult {
            n_amplifier: 2,
            threshold: 0.5,
            mz0: vec![2.0, 2.0],
            mz1: vec![1.0 / 3.0, -1.5],
            contrast: vec![0.8333333333333334, 1.75],
            q0: vec![0.0, 0.0],
            q1: vec![0.1, 0.7],
            fidelity: vec![0.9, std::f64::consts::PI / 10.0],
            r_star: Some(1),
        };
        let bytes = trace_csv(&t);
        assert!(bytes.starts_with(b"r,Mz0,Mz1,contrast,Q0,Q1,fidelity\n"));
        assert_eq!(parse_trace_csv(&bytes, 2, 0.5).unwrap(), t);
    }
}
