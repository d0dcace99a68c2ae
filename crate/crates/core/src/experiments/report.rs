use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::stats::RunningStats;

use super::params::Params;

/// One aggregated statistic: the mean of `series` at abscissa `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub x: f64,
    pub series: String,
    pub mean: f64,
    pub std_error: f64,
    pub replicates: u64,
}

impl Cell {
    pub fn from_stats(x: f64, series: impl Into<String>, stats: &RunningStats) -> Self {
        Self {
            x,
            series: series.into(),
            mean: stats.mean(),
            std_error: stats.std_error(),
            replicates: stats.count(),
        }
    }
}

/// A pass/fail flag against a declared tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }

    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: value < threshold,
        }
    }

    pub fn flag(name: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.into(),
            value: if pass { 1.0 } else { 0.0 },
            threshold: 1.0,
            pass,
        }
    }
}

/// Informational scalar (fitted slope, theoretical bound, ...).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub name: String,
    /// Meaning of [`Cell::x`]: `n`, `m` or `s`.
    pub x_name: String,
    pub config: Params,
    pub cells: Vec<Cell>,
    pub metrics: Vec<Metric>,
    pub checks: Vec<Check>,
    /// Wall-clock time; kept out of the CSV files so they stay reproducible.
    pub elapsed_seconds: f64,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>, x_name: impl Into<String>, config: Params) -> Self {
        Self {
            name: name.into(),
            x_name: x_name.into(),
            config,
            cells: Vec::new(),
            metrics: Vec::new(),
            checks: Vec::new(),
            elapsed_seconds: 0.0,
        }
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.push(Metric {
            name: name.into(),
            value,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn series(&self, name: &str) -> Vec<&Cell> {
        self.cells.iter().filter(|c| c.series == name).collect()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn metric_value(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == name).map(|m| m.value)
    }

    /// `experiment, x_name, x, series, mean, std_error, replicates`
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "experiment,x_name,x,series,mean,std_error,replicates")?;
        for c in &self.cells {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                self.name, self.x_name, c.x, c.series, c.mean, c.std_error, c.replicates
            )?;
        }
        Ok(())
    }

    /// `kind, name, value, threshold, pass`; metrics leave the last two empty.
    pub fn write_checks_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "kind,name,value,threshold,pass")?;
        for m in &self.metrics {
            writeln!(out, "metric,{},{},,", m.name, m.value)?;
        }
        for c in &self.checks {
            writeln!(out, "check,{},{},{},{}", c.name, c.value, c.threshold, c.pass)?;
        }
        Ok(())
    }

    /// Human-readable block: metrics, then one line per check.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{}: {} ({} cells, {:.1}s)",
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.cells.len(),
            self.elapsed_seconds
        );
        for m in &self.metrics {
            let _ = writeln!(s, "  {} = {:.6e}", m.name, m.value);
        }
        for c in &self.checks {
            let _ = writeln!(
                s,
                "  [{}] {}: {:.6e} (threshold {:.6e})",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.value,
                c.threshold
            );
        }
        s
    }
}

/// Long-format plot data `x, series, mean, stderr`.
pub fn emit_plot_data<W: Write>(report: &ExperimentReport, mut out: W) -> Result<()> {
    writeln!(out, "x,series,mean,stderr")?;
    for c in &report.cells {
        writeln!(out, "{},{},{},{}", c.x, c.series, c.mean, c.std_error)?;
    }
    Ok(())
}
