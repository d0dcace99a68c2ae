use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::step::read_numeric_rows;
use super::Kernel;

/// Default resolution of landscapes sampled from a function.
pub const DEFAULT_LANDSCAPE_POINTS: usize = 1025;

/// Symmetric continuous map `[0,1]^2 -> [0,1]` from a pair of fitness values
/// to a connection probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConnectionFunction {
    /// `r(u, v) = u v`
    Product,
    /// `r(u, v) = min(u, v)`
    Min,
    Constant { c: f64 },
    /// Type-connection matrix `r_{ij}` attached to the type points
    /// `i / size`, extended bilinearly and held constant beyond `(size-1)/size`.
    Block { size: usize, values: Vec<f64> },
    /// Samples on the uniform grid `i / (size - 1)`, bilinear in between.
    Grid { size: usize, values: Vec<f64> },
}

impl ConnectionFunction {
    pub fn constant(c: f64) -> Result<Self> {
        check_prob("constant", c)?;
        Ok(Self::Constant { c })
    }

    pub fn block(size: usize, values: Vec<f64>) -> Result<Self> {
        check_matrix(size, &values)?;
        Ok(Self::Block { size, values })
    }

    /// The two-type matrix `[[alpha, delta], [delta, beta]]`.
    pub fn two_type(alpha: f64, beta: f64, delta: f64) -> Result<Self> {
        Self::block(2, vec![alpha, delta, delta, beta])
    }

    pub fn grid(size: usize, values: Vec<f64>) -> Result<Self> {
        if size < 2 {
            return Err(Error::config("a grid connection function needs at least 2x2 samples"));
        }
        check_matrix(size, &values)?;
        Ok(Self::Grid { size, values })
    }

    /// Tabulates a symmetric function on a `size x size` grid.
    pub fn tabulate(size: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let step = 1.0 / (size - 1) as f64;
        let values = (0..size * size)
            .map(|idx| f((idx / size) as f64 * step, (idx % size) as f64 * step))
            .collect();
        Self::grid(size, values)
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        // argument order fixed so interpolation rounding is symmetric too
        let (u, v) = if u <= v { (u, v) } else { (v, u) };
        match self {
            Self::Product => u * v,
            Self::Min => u.min(v),
            Self::Constant { c } => *c,
            Self::Block { size, values } => {
                let scale = *size as f64;
                bilinear(*size, values, u * scale, v * scale)
            }
            Self::Grid { size, values } => {
                let scale = (*size - 1) as f64;
                bilinear(*size, values, u * scale, v * scale)
            }
        }
    }

    /// CSV matrix of a grid function, preceded by a comment documenting the grid.
    pub fn write_grid_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let Self::Grid { size, values } = self else {
            return Err(Error::config("only grid connection functions serialise to CSV"));
        };
        writeln!(
            out,
            "# uniform grid on [0,1]^2: row i, column j holds r(i/{g}, j/{g})",
            g = size - 1
        )?;
        for row in values.chunks(*size) {
            let line: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn read_grid_csv<R: BufRead>(input: R) -> Result<Self> {
        let rows = read_numeric_rows(input)?;
        let size = rows.len();
        let mut values = Vec::with_capacity(size * size);
        for (line, row) in rows {
            if row.len() != size {
                return Err(Error::parse(line, format!("expected {size} columns, found {}", row.len())));
            }
            values.extend(row);
        }
        Self::grid(size, values)
    }
}

impl Kernel for ConnectionFunction {
    fn eval(&self, x: f64, y: f64) -> f64 {
        ConnectionFunction::eval(self, x, y)
    }
}

/// Bilinear interpolation on node coordinates `0..size`, clamped to the last node.
fn bilinear(size: usize, values: &[f64], p: f64, q: f64) -> f64 {
    let (i0, fi) = split(size, p);
    let (j0, fj) = split(size, q);
    let at = |i: usize, j: usize| values[i * size + j];
    let i1 = (i0 + 1).min(size - 1);
    let j1 = (j0 + 1).min(size - 1);
    if fi == 0.0 && fj == 0.0 {
        return at(i0, j0);
    }
    let top = at(i0, j0) * (1.0 - fj) + at(i0, j1) * fj;
    let bottom = at(i1, j0) * (1.0 - fj) + at(i1, j1) * fj;
    top * (1.0 - fi) + bottom * fi
}

fn split(size: usize, p: f64) -> (usize, f64) {
    let last = (size - 1) as f64;
    let p = p.clamp(0.0, last);
    let i = p.floor();
    if i >= last {
        (size - 1, 0.0)
    } else {
        (i as usize, p - i)
    }
}

fn check_prob(what: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::config(format!("{what} = {x} outside [0, 1]")))
    }
}

fn check_matrix(size: usize, values: &[f64]) -> Result<()> {
    if size == 0 || values.len() != size * size {
        return Err(Error::config(format!(
            "matrix has {} entries, expected {size}x{size}",
            values.len()
        )));
    }
    for i in 0..size {
        for j in 0..size {
            check_prob("matrix entry", values[i * size + j])?;
            if values[i * size + j] != values[j * size + i] {
                return Err(Error::config(format!("matrix entries ({i},{j}) and ({j},{i}) differ")));
            }
        }
    }
    Ok(())
}

/// Continuous fitness landscape `[0,1] -> [0,1]`, piecewise linear through
/// its knots and constant beyond the outermost ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landscape {
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl Landscape {
    pub fn from_knots(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.is_empty() || xs.len() != values.len() {
            return Err(Error::config("landscape knots and values must be non-empty and of equal length"));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("landscape knots must be strictly increasing"));
        }
        for (&x, &v) in xs.iter().zip(&values) {
            check_prob("landscape knot", x)?;
            check_prob("landscape value", v)?;
        }
        Ok(Self { xs, values })
    }

    pub fn identity() -> Self {
        Self {
            xs: vec![0.0, 1.0],
            values: vec![0.0, 1.0],
        }
    }

    /// Samples on the uniform grid `i / (len - 1)`.
    pub fn from_grid(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::config("a landscape grid needs at least two samples"));
        }
        let g = (values.len() - 1) as f64;
        let xs = (0..values.len()).map(|i| i as f64 / g).collect();
        Self::from_knots(xs, values)
    }

    pub fn sample(f: impl Fn(f64) -> f64, points: usize) -> Result<Self> {
        let g = (points - 1) as f64;
        Self::from_grid((0..points).map(|i| f(i as f64 / g)).collect())
    }

    /// Linear interpolation through the values at the type points `l / (m + 1)`.
    pub fn at_type_points(values: &[f64]) -> Result<Self> {
        let types = values.len();
        let xs = (0..types).map(|l| l as f64 / types as f64).collect();
        Self::from_knots(xs, values.to_vec())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let idx = self.xs.partition_point(|&k| k <= x);
        if idx == 0 {
            return self.values[0];
        }
        let i = idx - 1;
        if i + 1 == self.xs.len() || self.xs[i] == x {
            return self.values[i];
        }
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    /// Values at the type points of an `(m + 1)`-type population.
    pub fn type_values(&self, types: usize) -> Vec<f64> {
        (0..types)
            .map(|l| self.eval(l as f64 / types as f64))
            .collect()
    }
}
