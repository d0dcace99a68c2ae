use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::measure::TypeMeasure;
use super::Kernel;

/// Piecewise-constant graphon on the blocks `[b_j, b_{j+1}) x [b_l, b_{l+1})`.
///
/// Blocks may have zero width. Evaluation is right-continuous: a point on a
/// breakpoint belongs to the block on its right, and `x = 1` belongs to the
/// last block of positive width.
#[derive(Debug, Clone, PartialEq)]
pub struct StepGraphon<T: Scalar = f64> {
    breakpoints: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> StepGraphon<T> {
    pub fn new(breakpoints: Vec<T>, values: Vec<T>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::config("a step graphon needs at least one block"));
        }
        let blocks = breakpoints.len() - 1;
        if values.len() != blocks * blocks {
            return Err(Error::config(format!(
                "value matrix has {} entries, expected {blocks}x{blocks}",
                values.len()
            )));
        }
        if breakpoints[0] != T::zero() || breakpoints[blocks] != T::one() {
            return Err(Error::config("breakpoints must start at 0 and end at 1"));
        }
        if breakpoints.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::config("breakpoints must be non-decreasing"));
        }
        for i in 0..blocks {
            for j in 0..blocks {
                let v = &values[i * blocks + j];
                if *v < T::zero() || *v > T::one() {
                    return Err(Error::config(format!(
                        "block value ({i},{j}) = {} outside [0, 1]",
                        v.to_f64()
                    )));
                }
                if *v != values[j * blocks + i] {
                    return Err(Error::config(format!("block values ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    /// Blocks sized by the weights of `mu`, in type order.
    pub fn from_measure(mu: &TypeMeasure<T>, values: Vec<T>) -> Result<Self> {
        let mut breakpoints = Vec::with_capacity(mu.num_types() + 1);
        breakpoints.push(T::zero());
        breakpoints.extend(mu.cumulative().iter().cloned());
        Self::new(breakpoints, values)
    }

    /// `n` equal blocks with the given value matrix.
    pub fn equipartition(n: usize, values: Vec<T>) -> Result<Self> {
        let breakpoints = (0..=n).map(|i| T::ratio(i as u128, n as u128)).collect();
        Self::new(breakpoints, values)
    }

    pub fn constant(c: T) -> Result<Self> {
        Self::new(vec![T::zero(), T::one()], vec![c])
    }

    pub fn blocks(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> &T {
        &self.values[i * self.blocks() + j]
    }

    pub fn widths(&self) -> Vec<T> {
        self.breakpoints
            .windows(2)
            .map(|w| w[1].clone() - w[0].clone())
            .collect()
    }

    /// Number of blocks of positive width.
    pub fn effective_blocks(&self) -> usize {
        self.breakpoints.windows(2).filter(|w| w[1] > w[0]).count()
    }

    /// Block containing `x` under the right-continuous convention.
    pub fn block_index(&self, x: &T) -> usize {
        let blocks = self.blocks();
        if *x >= T::one() {
            return self
                .breakpoints
                .windows(2)
                .rposition(|w| w[1] > w[0])
                .unwrap_or(blocks - 1);
        }
        let idx = self.breakpoints.partition_point(|b| b <= x);
        idx.saturating_sub(1).min(blocks - 1)
    }

    pub fn eval_at(&self, x: &T, y: &T) -> T {
        self.value(self.block_index(x), self.block_index(y)).clone()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> StepGraphon<U> {
        StepGraphon {
            breakpoints: self.breakpoints.iter().map(&f).collect(),
            values: self.values.iter().map(&f).collect(),
        }
    }
}

impl StepGraphon<f64> {
    /// CSV: breakpoints on the first row, then one row of the value matrix per block.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", join(&self.breakpoints))?;
        for row in self.values.chunks(self.blocks()) {
            writeln!(out, "{}", join(row))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let rows = read_numeric_rows(input)?;
        let mut rows = rows.into_iter();
        let (_, breakpoints) = rows
            .next()
            .ok_or_else(|| Error::parse(1, "missing breakpoint row"))?;
        let blocks = breakpoints.len().saturating_sub(1);
        let mut values = Vec::with_capacity(blocks * blocks);
        for (line, row) in rows {
            if row.len() != blocks {
                return Err(Error::parse(line, format!("expected {blocks} values, found {}", row.len())));
            }
            values.extend(row);
        }
        Self::new(breakpoints, values)
    }
}

impl Kernel for StepGraphon<f64> {
    fn eval(&self, x: f64, y: f64) -> f64 {
        *self.value(self.block_index(&x), self.block_index(&y))
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format!("{x}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Non-empty, non-comment rows of comma-separated floats, tagged with their 1-based line.
pub(crate) fn read_numeric_rows<R: BufRead>(input: R) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut rows = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let row = trimmed
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::parse(i + 1, format!("{t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((i + 1, row));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_continuous_block_lookup() {
        let h = StepGraphon::new(vec![0.0, 0.7, 1.0], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(h.block_index(&0.0), 0);
        assert_eq!(h.block_index(&0.69), 0);
        assert_eq!(h.block_index(&0.7), 1);
        assert_eq!(h.block_index(&1.0), 1);
        assert_eq!(h.eval(0.2, 0.9), 0.0);
    }

    #[test]
    fn zero_width_blocks_are_never_selected() {
        let mu = TypeMeasure::new(vec![0.5, 0.0, 0.5, 0.0]).unwrap();
        let h = StepGraphon::from_measure(&mu, (0..16).map(|i| if i % 5 == 0 { 1.0 } else { 0.5 }).collect())
            .unwrap();
        assert_eq!(h.blocks(), 4);
        assert_eq!(h.effective_blocks(), 2);
        assert_eq!(h.block_index(&0.5), 2);
        assert_eq!(h.block_index(&1.0), 2);
    }

    #[test]
    fn rejects_asymmetric_or_out_of_range_values() {
        assert!(StepGraphon::new(vec![0.0, 0.5, 1.0], vec![1.0, 0.2, 0.3, 1.0]).is_err());
        assert!(StepGraphon::new(vec![0.0, 1.0], vec![1.5]).is_err());
        assert!(StepGraphon::new(vec![0.0, 0.6, 0.4, 1.0], vec![0.0; 9]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let h = StepGraphon::new(vec![0.0, 0.25, 1.0], vec![0.1, 0.2, 0.2, 0.9]).unwrap();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "0,0.25,1\n0.1,0.2\n0.2,0.9\n");
        let back = StepGraphon::read_csv(&buf[..]).unwrap();
        assert_eq!(back, h);
    }
}
