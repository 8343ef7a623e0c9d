//! CSV, aligned-text and JSON rendering of experiment rows.
//!
//! Floats are written with Rust's shortest round-trip formatting, which does
//! not depend on locale. Every CSV row carries the tool version and the base
//! seed of its experiment.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::experiments::{AccuracyRow, BenchmarkRow, PerturbationRow, PerturbationTrial, RecoveryRow, VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    Csv,
    #[default]
    Text,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "text" | "txt" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected csv, text or json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Text => "text",
            Format::Json => "json",
        })
    }
}

pub trait Table: Serialize {
    fn headers() -> Vec<&'static str>;
    fn cells(&self, precise: bool) -> Vec<String>;
}

fn num(x: f64, precise: bool) -> String {
    if precise {
        format!("{x:e}")
    } else if x.is_finite() && x != 0.0 && (x.abs() >= 1e4 || x.abs() < 1e-2) {
        format!("{x:.3e}")
    } else {
        format!("{x:.4}")
    }
}

fn opt(x: Option<f64>, precise: bool) -> String {
    x.map_or_else(|| "-".to_string(), |v| num(v, precise))
}

fn err(e: &Option<String>) -> String {
    e.clone().unwrap_or_default()
}

impl Table for AccuracyRow {
    fn headers() -> Vec<&'static str> {
        vec!["t", "trials", "seed", "eps1", "eps2", "eps3", "eps4", "mean_t_r", "mean_t_c", "error"]
    }

    fn cells(&self, precise: bool) -> Vec<String> {
        vec![
            self.t.to_string(),
            self.trials.to_string(),
            self.seed.to_string(),
            opt(self.eps1, precise),
            opt(self.eps2, precise),
            opt(self.eps3, precise),
            opt(self.eps4, precise),
            opt(self.mean_seconds_real, precise),
            opt(self.mean_seconds_complex, precise),
            err(&self.error),
        ]
    }
}

impl Table for PerturbationRow {
    fn headers() -> Vec<&'static str> {
        vec![
            "t", "mode", "eps_target", "eps_measured_max", "trials", "seed", "forward_error_max", "bound_max",
            "ratio_min", "ratio_median", "violations", "flagged", "error",
        ]
    }

    fn cells(&self, precise: bool) -> Vec<String> {
        vec![
            self.t.to_string(),
            self.mode.to_string(),
            num(self.eps_target, precise),
            num(self.eps_measured_max, precise),
            self.trials.to_string(),
            self.seed.to_string(),
            num(self.forward_error_max, precise),
            num(self.bound_max, precise),
            num(self.ratio_min, precise),
            num(self.ratio_median, precise),
            self.violations.to_string(),
            self.flagged.to_string(),
            err(&self.error),
        ]
    }
}

impl Table for PerturbationTrial {
    fn headers() -> Vec<&'static str> {
        vec!["t", "mode", "eps_target", "eps_measured", "trial", "seed", "forward_error", "bound"]
    }

    fn cells(&self, precise: bool) -> Vec<String> {
        vec![
            self.t.to_string(),
            self.mode.to_string(),
            num(self.eps_target, precise),
            num(self.eps_measured, precise),
            self.trial.to_string(),
            self.seed.to_string(),
            num(self.forward_error, precise),
            num(self.bound, precise),
        ]
    }
}

impl Table for RecoveryRow {
    fn headers() -> Vec<&'static str> {
        vec!["t", "trials", "seed", "eps_r", "eps_c", "error"]
    }

    fn cells(&self, precise: bool) -> Vec<String> {
        vec![
            self.t.to_string(),
            self.trials.to_string(),
            self.seed.to_string(),
            opt(self.eps_r, precise),
            opt(self.eps_c, precise),
            err(&self.error),
        ]
    }
}

impl Table for BenchmarkRow {
    fn headers() -> Vec<&'static str> {
        vec![
            "t", "trials", "seed", "mean_t_r", "median_t_r", "mean_t_c", "median_t_c", "flops_r", "flops_c", "error",
        ]
    }

    fn cells(&self, precise: bool) -> Vec<String> {
        vec![
            self.t.to_string(),
            self.trials.to_string(),
            self.seed.to_string(),
            opt(self.mean_real, precise),
            opt(self.median_real, precise),
            opt(self.mean_complex, precise),
            opt(self.median_complex, precise),
            self.flops_real.to_string(),
            self.flops_complex.to_string(),
            err(&self.error),
        ]
    }
}

#[derive(Serialize)]
struct JsonTable<'a, T> {
    version: &'a str,
    rows: &'a [T],
}

pub fn render<T: Table>(rows: &[T], format: Format) -> anyhow::Result<String> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = T::headers();
            header.push("version");
            w.write_record(&header)?;
            for row in rows {
                let mut cells = row.cells(true);
                cells.push(VERSION.to_string());
                w.write_record(&cells)?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&JsonTable { version: VERSION, rows })?;
            s.push('\n');
            Ok(s)
        }
        Format::Text => {
            let header: Vec<String> = T::headers().into_iter().map(String::from).collect();
            let body: Vec<Vec<String>> = rows.iter().map(|r| r.cells(false)).collect();
            let mut widths: Vec<usize> = header.iter().map(String::len).collect();
            for line in &body {
                for (w, c) in widths.iter_mut().zip(line) {
                    *w = (*w).max(c.len());
                }
            }
            let mut out = String::new();
            for line in std::iter::once(&header).chain(&body) {
                let cells: Vec<String> = line.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
                out.push_str(cells.join("  ").trim_end());
                out.push('\n');
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> RecoveryRow {
        RecoveryRow {
            t: 3,
            trials: 5,
            seed: 7,
            eps_r: Some(1.25e-15),
            eps_c: None,
            error: None,
        }
    }

    #[test]
    fn csv_has_header_version_and_round_trip_floats() {
        let s = render(&[row()], Format::Csv).unwrap();
        let mut r = csv::Reader::from_reader(s.as_bytes());
        let h = r.headers().unwrap().clone();
        assert_eq!(h.iter().next_back(), Some("version"));
        let rec = r.records().next().unwrap().unwrap();
        assert_eq!(rec[3].parse::<f64>().unwrap(), 1.25e-15);
        assert_eq!(&rec[4], "-");
        assert_eq!(&rec[6], VERSION);
    }

    #[test]
    fn text_is_aligned() {
        let s = render(&[row(), row()], Format::Text).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].trim_start().starts_with('t'));
        assert_eq!(lines[1], lines[2]);
    }

    #[test]
    fn json_parses() {
        let s = render(&[row()], Format::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["rows"][0]["t"], 3);
        assert_eq!(v["version"], VERSION);
    }

    #[test]
    fn format_parsing() {
        assert_eq!("CSV".parse::<Format>().unwrap(), Format::Csv);
        assert!("xml".parse::<Format>().is_err());
    }
}
