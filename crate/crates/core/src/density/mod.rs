//! Subgraph densities of finite graphs and graphons, and the truncated
//! subgraph distance.

mod count;
mod dsub;
mod mc;
mod step;

pub use count::{
    density_gap_bound, gap_bound, hom_count, hom_count_backtrack, hom_count_matrix, hom_density,
    hom_density_exact, inj_count, inj_density, inj_density_exact, MatrixKind,
};
pub use dsub::{d_sub_truncated, density_of, DsubEstimate};
pub use mc::{mc_density, VertexMeasure};
pub use step::{step_budget, step_density, step_density_estimate};

use std::fmt;

use serde::Serialize;

use crate::graph::MotifGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactBacktrack,
    MatrixSpecial,
    BlockSum,
    MonteCarlo,
}

impl Method {
    pub fn is_exact(self) -> bool {
        !matches!(self, Method::MonteCarlo)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::ExactBacktrack => "exact_backtrack",
            Method::MatrixSpecial => "matrix_special",
            Method::BlockSum => "block_sum",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A density value with its Monte Carlo standard error (zero for exact methods).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub value: f64,
    pub std_error: f64,
    pub method: Method,
    /// Number of Monte Carlo samples; zero for exact methods.
    pub samples: u64,
}

impl DensityEstimate {
    pub fn exact(value: f64, method: Method) -> Self {
        debug_assert!(method.is_exact());
        Self {
            value,
            std_error: 0.0,
            method,
            samples: 0,
        }
    }
}

/// Vertex order for tuple enumeration: start from a maximum-degree vertex,
/// then repeatedly take the vertex with most already-placed neighbours.
#[derive(Debug, Clone)]
pub(crate) struct Plan {
    pub order: Vec<usize>,
    /// `back[p]`: positions `q < p` adjacent to `order[p]`.
    pub back: Vec<Vec<usize>>,
}

impl Plan {
    pub fn new(f: &MotifGraph) -> Self {
        let k = f.k();
        let mut placed = vec![false; k];
        let mut order = Vec::with_capacity(k);
        while order.len() < k {
            let next = (0..k)
                .filter(|&v| !placed[v])
                .max_by_key(|&v| {
                    let linked = f.neighbors(v).filter(|&u| placed[u]).count();
                    (linked, f.degree(v), std::cmp::Reverse(v))
                })
                .expect("unplaced vertex remains");
            placed[next] = true;
            order.push(next);
        }
        let mut position = vec![0; k];
        for (p, &v) in order.iter().enumerate() {
            position[v] = p;
        }
        let back = order
            .iter()
            .enumerate()
            .map(|(p, &v)| {
                let mut qs: Vec<usize> = f.neighbors(v).map(|u| position[u]).filter(|&q| q < p).collect();
                qs.sort_unstable();
                qs
            })
            .collect();
        Self { order, back }
    }
}
