use std::io::Write;

use crate::error::{Error, Result};
use crate::graphon::TypeMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathSource {
    Moran,
    WrightFisher,
}

/// Type frequencies recorded on a grid of rescaled times.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationPath {
    pub sample_times: Vec<f64>,
    pub frequencies: Vec<TypeMeasure<f64>>,
    pub source: PathSource,
}

impl PopulationPath {
    pub fn len(&self) -> usize {
        self.sample_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample_times.is_empty()
    }

    pub fn m(&self) -> usize {
        self.frequencies.first().map_or(0, |y| y.m())
    }

    pub fn last(&self) -> Option<&TypeMeasure<f64>> {
        self.frequencies.last()
    }
}

/// `0, ds, 2 ds, ...` up to and including `horizon` (within rounding).
pub fn grid_times(horizon: f64, ds: f64) -> Result<Vec<f64>> {
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(Error::config(format!("horizon must be non-negative, got {horizon}")));
    }
    if !(ds > 0.0) || !ds.is_finite() {
        return Err(Error::config(format!("grid_ds must be positive, got {ds}")));
    }
    let steps = (horizon / ds + 1e-9).floor() as usize;
    Ok((0..=steps).map(|i| i as f64 * ds).collect())
}

/// CSV with columns `s, Y_0, ..., Y_m, replicate`, one block of rows per path.
pub fn write_paths_csv<W: Write>(mut out: W, paths: &[PopulationPath]) -> Result<()> {
    let m = paths.first().map_or(0, PopulationPath::m);
    let mut header = vec!["s".to_string()];
    header.extend((0..=m).map(|l| format!("Y_{l}")));
    header.push("replicate".into());
    writeln!(out, "{}", header.join(","))?;
    for (rep, path) in paths.iter().enumerate() {
        if path.m() != m {
            return Err(Error::config("all paths in one file must have the same number of types"));
        }
        for (s, y) in path.sample_times.iter().zip(&path.frequencies) {
            write!(out, "{s}")?;
            for w in y.weights() {
                write!(out, ",{w}")?;
            }
            writeln!(out, ",{rep}")?;
        }
    }
    Ok(())
}
