//! Numerical witnesses: graph/graphon convergence as `n` and `m` grow,
//! concentration of snapshot densities, urn and density-gap rates, the
//! two-type moment identities, and the Example scenarios that configure them.

mod common;
mod concentration;
mod gap;
mod moments;
mod params;
mod report;
mod theorem13;
mod theorem17;
mod urn;

pub use concentration::{concentration_check, mcdiarmid_bound};
pub use gap::{gap_rate_check, max_gap, random_graph};
pub use moments::heterozygosity_check;
pub use params::{beta22_discretization, canonical_key, initial_measure, scenario, Params, Scenario};
pub use report::{emit_plot_data, Cell, Check, ExperimentReport, Metric};
pub use theorem13::theorem13_experiment;
pub use theorem17::{lump, theorem17_experiment};
pub use urn::{conditional_mean_inj, conditional_mean_inj_matrix, urn_probability, urn_rate_check};
