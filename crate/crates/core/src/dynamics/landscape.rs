use crate::error::{Error, Result};
use crate::graphon::{ConnectionFunction, Landscape, TypeMeasure};

/// How the fitness of each type is obtained from the current frequencies.
#[derive(Debug, Clone, PartialEq)]
pub enum LandscapeSpec {
    /// `H(u) = u`
    Identity,
    /// `H(l / (m+1)) = Y_l`, linearly interpolated in between.
    Frequency,
    /// `H(l / (m+1))` is the total frequency of the partners `j` with
    /// `f(l / (m+1), j / (m+1)) >= c`.
    Threshold { f: ConnectionFunction, c: f64 },
    /// A fixed landscape independent of the population.
    UserGrid(Landscape),
}

impl LandscapeSpec {
    pub fn threshold(f: ConnectionFunction, c: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::config(format!("landscape.c must lie in (0, 1), got {c}")));
        }
        Ok(Self::Threshold { f, c })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Frequency => "frequency",
            Self::Threshold { .. } => "threshold",
            Self::UserGrid(_) => "user_grid",
        }
    }

    /// Whether the landscape changes with the population.
    pub fn is_dynamic(&self) -> bool {
        matches!(self, Self::Frequency | Self::Threshold { .. })
    }
}

/// Fitness values `H(l / (m+1))` for `l = 0..=m`.
pub fn evaluate_landscape(spec: &LandscapeSpec, y: &TypeMeasure<f64>) -> Vec<f64> {
    let types = y.num_types();
    let point = |l: usize| l as f64 / types as f64;
    match spec {
        LandscapeSpec::Identity => (0..types).map(point).collect(),
        LandscapeSpec::Frequency => y.weights().to_vec(),
        LandscapeSpec::Threshold { f, c } => (0..types)
            .map(|l| {
                // fold from +0.0: an empty f64 `sum` is -0.0
                let total = (0..types)
                    .filter(|&j| f.eval(point(l), point(j)) >= *c)
                    .fold(0.0, |acc, j| acc + y.weights()[j]);
                total.min(1.0)
            })
            .collect(),
        LandscapeSpec::UserGrid(h) => h.type_values(types),
    }
}
