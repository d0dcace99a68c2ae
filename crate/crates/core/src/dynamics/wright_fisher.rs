use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graphon::TypeMeasure;
use crate::rng::{rng_from_seed, SimRng};

use super::path::{grid_times, PathSource, PopulationPath};

/// Default Euler-Maruyama step in rescaled time.
pub const DEFAULT_DT: f64 = 1e-4;

/// State-dependent factor `sigma(y)` multiplying the resampling rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateModulator {
    #[default]
    None,
    /// `sigma(y) = (1 - sum_k y_k^2) / 2`, which is `x (1 - x)` for two types.
    OhtaKimura,
}

impl RateModulator {
    pub fn sigma(&self, y: &[f64]) -> f64 {
        match self {
            Self::None => 1.0,
            Self::OhtaKimura => 0.5 * (1.0 - y.iter().map(|v| v * v).sum::<f64>()),
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "none" | "" => Ok(Self::None),
            "ohta_kimura" | "ohta-kimura" => Ok(Self::OhtaKimura),
            other => Err(Error::config(format!("unknown modulator '{other}' (expected none or ohta_kimura)"))),
        }
    }
}

/// Euler-Maruyama integrator for the Wright-Fisher diffusion on the simplex
/// with diffusion matrix `2 sigma(y) (diag(y) - y y^T)`.
///
/// The noise is `B z` with `B = diag(sqrt y) - y sqrt(y)^T`, which satisfies
/// `B B^T = diag(y) - y y^T` and has zero column sums, so every step stays on
/// the hyperplane `sum y = 1` and costs `O(m)`.
#[derive(Debug, Clone)]
pub struct WrightFisherSim {
    y: Vec<f64>,
    time: f64,
    dt: f64,
    modulator: RateModulator,
    rng: SimRng,
    sqrt_y: Vec<f64>,
    z: Vec<f64>,
}

impl WrightFisherSim {
    pub fn new(y0: &TypeMeasure<f64>, dt: f64, modulator: RateModulator, seed: u64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::config(format!("dt must be positive, got {dt}")));
        }
        let k = y0.num_types();
        Ok(Self {
            y: y0.weights().to_vec(),
            time: 0.0,
            dt,
            modulator,
            rng: rng_from_seed(seed),
            sqrt_y: vec![0.0; k],
            z: vec![0.0; k],
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.y
    }

    pub fn measure(&self) -> TypeMeasure<f64> {
        TypeMeasure::new(self.y.clone()).expect("state is kept on the simplex")
    }

    fn step(&mut self, h: f64) {
        let scale = (2.0 * self.modulator.sigma(&self.y) * h).max(0.0).sqrt();
        if scale == 0.0 {
            return;
        }
        let mut s = 0.0;
        for k in 0..self.y.len() {
            self.sqrt_y[k] = self.y[k].sqrt();
            self.z[k] = self.rng.sample(StandardNormal);
            s += self.sqrt_y[k] * self.z[k];
        }
        let mut total = 0.0;
        for k in 0..self.y.len() {
            let v = self.y[k] + scale * (self.sqrt_y[k] * self.z[k] - self.y[k] * s);
            self.y[k] = v.clamp(0.0, 1.0);
            total += self.y[k];
        }
        for v in &mut self.y {
            *v /= total;
        }
    }

    /// Integrates up to rescaled time `s`; the last step is shortened to land
    /// exactly on `s`.
    pub fn advance_to(&mut self, s: f64) {
        while self.time < s {
            let remaining = s - self.time;
            if remaining <= self.dt * 1e-9 {
                self.time = s;
                break;
            }
            let h = self.dt.min(remaining);
            self.step(h);
            self.time += h;
        }
    }
}

pub fn simulate_wright_fisher(
    y0: &TypeMeasure<f64>,
    horizon: f64,
    dt: f64,
    grid_ds: f64,
    seed: u64,
    modulator: RateModulator,
) -> Result<PopulationPath> {
    let times = grid_times(horizon, grid_ds)?;
    let mut sim = WrightFisherSim::new(y0, dt, modulator, seed)?;
    let mut frequencies = Vec::with_capacity(times.len());
    for &s in &times {
        sim.advance_to(s);
        frequencies.push(sim.measure());
    }
    Ok(PopulationPath {
        sample_times: times,
        frequencies,
        source: PathSource::WrightFisher,
    })
}
