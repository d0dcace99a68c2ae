use std::time::Instant;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;

use crate::density::step_budget;
use crate::density::Plan;
use crate::dynamics::{connection_matrix, MoranState};
use crate::error::{Error, Result};
use crate::graph::MotifGraph;
use crate::graphon::ConnectionFunction;
use crate::rng::{replicate_seed, rng_from_seed};
use crate::scalar::Scalar;
use crate::stats::loglog_slope;

use super::params::Params;
use super::report::{Cell, Check, ExperimentReport};

/// Probability that ordered draws without replacement from an urn with
/// `counts[l]` balls of colour `l` produce the colours `draws`, in order.
/// More draws than balls give 0 (with a warning).
pub fn urn_probability<T: Scalar>(counts: &[u64], draws: &[usize]) -> T {
    let total: u64 = counts.iter().sum();
    if draws.len() as u64 > total {
        log::warn!("{} draws from an urn of {total} balls", draws.len());
        return T::zero();
    }
    let mut used = vec![0u64; counts.len()];
    let mut p = T::one();
    for (t, &colour) in draws.iter().enumerate() {
        if colour >= counts.len() || counts[colour] == used[colour] {
            return T::zero();
        }
        let left = counts[colour] - used[colour];
        p = p * T::ratio(left as u128, (total - t as u64) as u128);
        used[colour] += 1;
    }
    p
}

/// `sum over colour tuples of urn_probability(X, l) * prod_{ij in E(F)} P[l_i][l_j]`
/// for a row-major type-connection matrix `P`.
pub fn conditional_mean_inj_matrix<T: Scalar>(f: &MotifGraph, counts: &[u64], p: &[T]) -> Result<T> {
    let types = counts.len();
    if p.len() != types * types {
        return Err(Error::config(format!(
            "connection matrix has {} entries for {types} types",
            p.len()
        )));
    }
    let total: u64 = counts.iter().sum();
    if f.k() as u64 > total {
        return Ok(T::zero());
    }
    let live: Vec<usize> = (0..types).filter(|&l| counts[l] > 0).collect();
    let limit = step_budget(f.k());
    if live.len() > limit {
        return Err(Error::Budget {
            k: f.k(),
            blocks: live.len(),
            limit,
        });
    }
    let plan = Plan::new(f);
    let mut walk = UrnWalk {
        plan: &plan,
        counts,
        live: &live,
        p,
        total,
        used: vec![0; types],
        chosen: vec![0; f.k()],
    };
    Ok(walk.sum(0))
}

struct UrnWalk<'a, T> {
    plan: &'a Plan,
    counts: &'a [u64],
    live: &'a [usize],
    p: &'a [T],
    total: u64,
    used: Vec<u64>,
    chosen: Vec<usize>,
}

impl<T: Scalar> UrnWalk<'_, T> {
    fn sum(&mut self, level: usize) -> T {
        let types = self.counts.len();
        let mut acc = T::zero();
        for &l in self.live {
            let left = self.counts[l] - self.used[l];
            if left == 0 {
                continue;
            }
            let mut factor = T::ratio(left as u128, (self.total - level as u64) as u128);
            for &q in &self.plan.back[level] {
                factor = factor * self.p[self.chosen[q] * types + l].clone();
            }
            if factor.is_zero() {
                continue;
            }
            if level + 1 == self.chosen.len() {
                acc = acc + factor;
            } else {
                self.chosen[level] = l;
                self.used[l] += 1;
                acc = acc + factor * self.sum(level + 1);
                self.used[l] -= 1;
            }
        }
        acc
    }
}

/// Expected injective density of the snapshot graph given the current types:
/// the urn average of `prod r(H_{l_i}, H_{l_j})`.
pub fn conditional_mean_inj(
    f: &MotifGraph,
    state: &MoranState,
    landscape_values: &[f64],
    r: &ConnectionFunction,
) -> Result<f64> {
    if landscape_values.len() != state.m() + 1 {
        return Err(Error::config(format!(
            "landscape covers {} types, population has {}",
            landscape_values.len(),
            state.m() + 1
        )));
    }
    conditional_mean_inj_matrix(f, state.counts(), &connection_matrix(landscape_values, r))
}

/// Max over random urns and colour tuples of `n |urn - prod Y|`, computed
/// exactly; bounded in `n` when the sampling-without-replacement error is `O(1/n)`.
pub fn urn_rate_check(params: &Params) -> Result<ExperimentReport> {
    let started = Instant::now();
    let n_list = params.list_usize_or("n_list", &[10, 100, 1000])?;
    let states = params.usize_or("states", 1000)?;
    let k_max = params.usize_or("k_max", 4)?;
    let m_max = params.usize_or("m_max", 3)?;
    let seed = params.u64_or("seed", 1)?;
    if k_max == 0 || m_max == 0 {
        return Err(Error::config("parameters 'k_max' and 'm_max' must be positive"));
    }
    if let Some(&n) = n_list.iter().find(|&&n| n < k_max) {
        return Err(Error::config(format!("parameter 'n_list': n = {n} is smaller than k_max = {k_max}")));
    }

    let mut report = ExperimentReport::new("urn_rate", "n", params.clone());
    let mut maxima = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    for (i, &n) in n_list.iter().enumerate() {
        let mut rng = rng_from_seed(replicate_seed(seed, i as u64));
        let mut max_scaled = BigRational::from_count(0);
        for _ in 0..states {
            let m = rng.random_range(1..=m_max);
            let mut counts = vec![0u64; m + 1];
            for _ in 0..n {
                counts[rng.random_range(0..=m)] += 1;
            }
            let k = rng.random_range(1..=k_max);
            let draws: Vec<usize> = (0..k).map(|_| rng.random_range(0..=m)).collect();
            let urn: BigRational = urn_probability(&counts, &draws);
            let product = draws
                .iter()
                .fold(BigRational::from_count(1), |acc, &l| acc * BigRational::ratio(counts[l] as u128, n as u128));
            let scaled = (urn - product).abs() * BigRational::from_count(n as u128);
            // |prod a_t - prod b_t| <= sum |a_t - b_t| <= C(k,2) / (n - k + 1)
            let bound = (k * (k - 1) / 2) as f64 * n as f64 / (n - k + 1) as f64;
            if bound > 0.0 {
                worst_ratio = worst_ratio.max(scaled.to_f64() / bound);
            } else if !scaled.is_zero() {
                worst_ratio = f64::INFINITY;
            }
            if scaled > max_scaled {
                max_scaled = scaled;
            }
        }
        let value = max_scaled.to_f64();
        maxima.push(value);
        report.cells.push(Cell {
            x: n as f64,
            series: "max_n_gap".into(),
            mean: value,
            std_error: 0.0,
            replicates: states as u64,
        });
    }
    let xs: Vec<f64> = n_list.iter().map(|&n| n as f64).collect();
    let slope = loglog_slope(&xs, &maxima);
    report.metric("loglog_slope", slope);
    report.checks.push(Check::at_most("n_gap_within_bound", worst_ratio, 1.0));
    report.checks.push(Check::at_most("no_growth_slope", if slope.is_nan() { 0.0 } else { slope }, 0.1));
    report.elapsed_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}
