use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::graphon::TypeMeasure;
use crate::rng::{rng_from_seed, SimRng};

use super::path::{grid_times, PathSource, PopulationPath};

/// Types of `n` individuals from `m + 1` possible types.
#[derive(Debug, Clone, PartialEq)]
pub struct MoranState {
    types: Vec<u32>,
    counts: Vec<u64>,
    /// Unscaled elapsed time.
    clock: f64,
}

impl MoranState {
    pub fn from_types(m: usize, types: Vec<u32>) -> Result<Self> {
        if m < 1 {
            return Err(Error::config("the Moran model needs m >= 1"));
        }
        if types.is_empty() {
            return Err(Error::config("the Moran model needs n >= 1"));
        }
        let mut counts = vec![0u64; m + 1];
        for &t in &types {
            let slot = counts
                .get_mut(t as usize)
                .ok_or_else(|| Error::config(format!("type label {t} exceeds m = {m}")))?;
            *slot += 1;
        }
        Ok(Self {
            types,
            counts,
            clock: 0.0,
        })
    }

    /// Individuals `0..X_0` get type 0, the next `X_1` type 1, and so on.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let types = counts
            .iter()
            .enumerate()
            .flat_map(|(l, &c)| std::iter::repeat_n(l as u32, c as usize))
            .collect();
        Self::from_types(counts.len().saturating_sub(1), types)
    }

    /// Counts `n * Y` rounded by largest remainder so they sum to `n`.
    pub fn from_measure(n: usize, mu: &TypeMeasure<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("the Moran model needs n >= 1"));
        }
        let scaled: Vec<f64> = mu.weights().iter().map(|w| w * n as f64).collect();
        let mut counts: Vec<u64> = scaled.iter().map(|x| x.floor() as u64).collect();
        let assigned: u64 = counts.iter().sum();
        let mut order: Vec<usize> = (0..counts.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = scaled[a] - scaled[a].floor();
            let rb = scaled[b] - scaled[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &l in order.iter().take((n as u64).saturating_sub(assigned) as usize) {
            counts[l] += 1;
        }
        Self::from_counts(&counts)
    }

    pub fn n(&self) -> usize {
        self.types.len()
    }

    pub fn m(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn types(&self) -> &[u32] {
        &self.types
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    /// `tau_i = type_i / (m + 1)`
    pub fn type_point(&self, i: usize) -> f64 {
        self.types[i] as f64 / (self.m() + 1) as f64
    }

    pub fn frequencies(&self) -> TypeMeasure<f64> {
        TypeMeasure::from_counts(&self.counts).expect("counts sum to n >= 1")
    }

    fn is_absorbed(&self) -> bool {
        self.counts.iter().any(|&c| c as usize == self.types.len())
    }

    /// Individual `i` adopts the type of individual `j`.
    fn copy(&mut self, i: usize, j: usize) {
        let (from, to) = (self.types[i], self.types[j]);
        if from != to {
            self.counts[from as usize] -= 1;
            self.counts[to as usize] += 1;
            self.types[i] = to;
        }
        debug_assert_eq!(self.counts.iter().sum::<u64>() as usize, self.types.len());
    }
}

/// Event-driven Moran model: the superposition of the `n` rate-one clocks is
/// a single rate-`n` clock, and at each ring a uniformly chosen individual
/// copies a uniformly chosen individual (possibly itself).
#[derive(Debug, Clone)]
pub struct MoranSim {
    state: MoranState,
    rng: SimRng,
    next_event: f64,
}

impl MoranSim {
    pub fn new(initial: MoranState, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let n = initial.n() as f64;
        let first: f64 = rng.sample::<f64, _>(Exp1) / n;
        Self {
            next_event: initial.clock + first,
            state: initial,
            rng,
        }
    }

    pub fn state(&self) -> &MoranState {
        &self.state
    }

    pub fn into_state(self) -> MoranState {
        self.state
    }

    /// Rescaled time `s = t / n`.
    pub fn time(&self) -> f64 {
        self.state.clock / self.state.n() as f64
    }

    /// Runs every event at unscaled time `<= n s`; the state is then the
    /// cadlag value at rescaled time `s`.
    pub fn advance_to(&mut self, s: f64) {
        let n = self.state.n();
        let target = s * n as f64;
        while self.next_event <= target {
            if self.state.is_absorbed() {
                self.next_event = f64::INFINITY;
                break;
            }
            let i = self.rng.random_range(0..n);
            let j = self.rng.random_range(0..n);
            self.state.copy(i, j);
            self.next_event += self.rng.sample::<f64, _>(Exp1) / n as f64;
        }
        if target > self.state.clock {
            self.state.clock = target;
        }
    }
}

/// Moran path on the grid `0, ds, ..., horizon` of rescaled time.
pub fn simulate_moran(initial: &MoranState, horizon: f64, grid_ds: f64, seed: u64) -> Result<PopulationPath> {
    let times = grid_times(horizon, grid_ds)?;
    let mut sim = MoranSim::new(initial.clone(), seed);
    let mut frequencies = Vec::with_capacity(times.len());
    for &s in &times {
        sim.advance_to(s);
        frequencies.push(sim.state().frequencies());
    }
    Ok(PopulationPath {
        sample_times: times,
        frequencies,
        source: PathSource::Moran,
    })
}
