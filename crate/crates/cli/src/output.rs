//! CSV emission. Every table has a fixed header and column order; reals are
//! written in fixed-point notation with at least six significant digits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use momab::simulator::{BatchSummary, Trajectory};

use crate::error::CliError;

pub const SUMMARY_HEADER: [&str; 12] = [
    "instance",
    "policy",
    "T",
    "runs",
    "regret_mean",
    "regret_std",
    "cert_rate",
    "mean_cert_round",
    "lemma1_violations",
    "lemma2_violations",
    "lemma3_violations",
    "omega_holds_rate",
];

pub const TRAJECTORY_HEADER: [&str; 4] = [
    "round",
    "mean_cum_regret_wgfc",
    "mean_cum_regret_pucb",
    "cert_fraction",
];

pub const SWEEP_HEADER: [&str; 8] = [
    "delta",
    "m",
    "C_PUCB",
    "pucb_mean",
    "pucb_std",
    "wgfc_mean",
    "wgfc_std",
    "cert_rate",
];

pub const LOWER_BOUND_HEADER: [&str; 5] = [
    "delta_sc",
    "regret_mean",
    "regret_over_logT",
    "lower_bound_constant",
    "theorem1_bound",
];

/// Fixed-point with enough decimals for six significant digits.
pub fn real(value: f64) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value:.6}");
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(6) as usize;
    format!("{value:.decimals$}")
}

pub fn optional_real(value: Option<f64>) -> String {
    value.map(real).unwrap_or_default()
}

/// Label fields may contain commas; quote them when needed.
pub fn text(value: &str) -> String {
    if value.contains([',', '"', '\n']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    columns: usize,
    body: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut body = header.join(",");
        body.push('\n');
        Self {
            columns: header.len(),
            body,
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "row width differs from header");
        let _ = writeln!(self.body, "{}", fields.join(","));
    }

    pub fn as_str(&self) -> &str {
        &self.body
    }

    pub fn write(&self, dir: &Path, name: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = dir.join(name);
        std::fs::write(&path, &self.body).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }
}

pub fn summary_row(summary: &BatchSummary) -> Vec<String> {
    let diag = summary.diagnostics;
    let count = |f: fn(&momab::simulator::DiagnosticsSummary) -> u64| {
        diag.as_ref().map(|d| f(d).to_string()).unwrap_or_default()
    };
    vec![
        text(&summary.label),
        summary.policy.name().to_string(),
        summary.horizon.to_string(),
        summary.runs.to_string(),
        real(summary.regret_mean),
        real(summary.regret_std),
        real(summary.certification_rate),
        optional_real(summary.mean_certification_round),
        count(|d| d.lemma1_violations),
        count(|d| d.lemma2_violations),
        count(|d| d.lemma3_violations),
        optional_real(diag.map(|d| d.omega_holds_rate)),
    ]
}

/// Per-round table; either policy column may be absent. The certification
/// fraction comes from the width-guided runs.
pub fn trajectory_table(wgfc: Option<&Trajectory>, pucb: Option<&Trajectory>) -> Table {
    let mut table = Table::new(&TRAJECTORY_HEADER);
    let rounds = wgfc
        .or(pucb)
        .map_or(0, |t| t.mean_cumulative_regret.len());
    for i in 0..rounds {
        table.row(&[
            (i + 1).to_string(),
            wgfc.map(|t| real(t.mean_cumulative_regret[i])).unwrap_or_default(),
            pucb.map(|t| real(t.mean_cumulative_regret[i])).unwrap_or_default(),
            wgfc.map(|t| real(t.certification_fraction[i])).unwrap_or_default(),
        ]);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    fn significant_digits(s: &str) -> usize {
        s.trim_start_matches('-')
            .chars()
            .filter(char::is_ascii_digit)
            .skip_while(|&c| c == '0')
            .count()
    }

    #[test]
    fn reals_keep_six_significant_digits() {
        for v in [306.37, 0.000123456, 21439.0, 1.0, 0.5, 143.8249, 1.0e-9, 123456789.5] {
            let s = real(v);
            assert!(significant_digits(&s) >= 6, "{v} -> {s}");
            assert!((s.parse::<f64>().unwrap() - v).abs() <= v.abs() * 1e-5);
        }
        assert_eq!(real(0.0), "0.000000");
        assert_eq!(real(306.37), "306.370000");
    }

    #[test]
    fn text_quotes_commas() {
        assert_eq!(text("plain"), "plain");
        assert_eq!(text("a,b"), "\"a,b\"");
    }

    #[test]
    fn table_has_header_and_rows() {
        let mut t = Table::new(&["a", "b"]);
        t.row(&["1".into(), "2".into()]);
        assert_eq!(t.as_str(), "a,b\n1,2\n");
    }
}
