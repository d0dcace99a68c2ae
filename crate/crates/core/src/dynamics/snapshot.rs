use crate::error::{Error, Result};
use crate::graph::FiniteGraph;
use crate::graphon::{ConnectionFunction, TypeMeasure};
use crate::rng::{splitmix64, unit_f64};

use super::moran::MoranState;

/// Time-independent uniforms `U_ij = U_ji`, computed on demand from the seed
/// and the unordered pair instead of stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeNoise {
    pub seed: u64,
}

impl EdgeNoise {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        let h = splitmix64(self.seed ^ splitmix64(a as u64));
        unit_f64(splitmix64(h ^ splitmix64((b as u64).wrapping_add(0x632B_E59B_D9B4_E019))))
    }
}

/// `P[a][b] = r(H_a, H_b)` for all type pairs, row-major.
pub fn connection_matrix(landscape_values: &[f64], r: &ConnectionFunction) -> Vec<f64> {
    let k = landscape_values.len();
    let mut p = vec![0.0; k * k];
    for a in 0..k {
        for b in a..k {
            let v = r.eval(landscape_values[a], landscape_values[b]);
            p[a * k + b] = v;
            p[b * k + a] = v;
        }
    }
    p
}

/// Connects `i` and `j` iff `U_ij < r(H(tau_i), H(tau_j))`.
pub fn snapshot_graph(
    state: &MoranState,
    landscape_values: &[f64],
    r: &ConnectionFunction,
    noise: &EdgeNoise,
) -> Result<FiniteGraph> {
    let k = state.m() + 1;
    if landscape_values.len() != k {
        return Err(Error::config(format!(
            "landscape covers {} types, population has {k}",
            landscape_values.len()
        )));
    }
    let p = connection_matrix(landscape_values, r);
    let types = state.types();
    let n = state.n();
    let mut g = FiniteGraph::empty(n);
    for i in 0..n {
        let row = &p[types[i] as usize * k..][..k];
        for j in i + 1..n {
            if noise.value(i, j) < row[types[j] as usize] {
                g.add_edge(i, j);
            }
        }
    }
    Ok(g)
}

/// `Y_l = X_l / n`.
pub fn empirical_measure(state: &MoranState) -> TypeMeasure<f64> {
    state.frequencies()
}
