//! Population processes (Moran, Wright-Fisher), fitness landscapes, and the
//! rule that turns a population into a graph snapshot.

mod landscape;
mod moran;
mod path;
mod snapshot;
mod wright_fisher;

pub use landscape::{evaluate_landscape, LandscapeSpec};
pub use moran::{simulate_moran, MoranSim, MoranState};
pub use path::{grid_times, write_paths_csv, PathSource, PopulationPath};
pub use snapshot::{connection_matrix, empirical_measure, snapshot_graph, EdgeNoise};
pub use wright_fisher::{simulate_wright_fisher, RateModulator, WrightFisherSim, DEFAULT_DT};
