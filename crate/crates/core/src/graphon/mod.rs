//! Graphon representations: step graphons, composed kernels
//! `r(H(inv F(x)), H(inv F(y)))`, and the type measures they are built from.

mod connection;
mod measure;
mod step;

pub use connection::{ConnectionFunction, Landscape, DEFAULT_LANDSCAPE_POINTS};
pub use measure::{DistributionFunction, TypeMeasure, UniformCdf};
pub use step::StepGraphon;

use crate::error::{Error, Result};

/// A symmetric measurable function `[0,1]^2 -> [0,1]` that can be evaluated pointwise.
pub trait Kernel: Sync {
    fn eval(&self, x: f64, y: f64) -> f64;
}

impl<K: Kernel + ?Sized> Kernel for &K {
    fn eval(&self, x: f64, y: f64) -> f64 {
        (**self).eval(x, y)
    }
}

/// `h(x, y) = r(H(inv F(x)), H(inv F(y)))`.
///
/// Without a type measure the inverse is the identity, which gives the kernel
/// `r(H(x), H(y))` on the type space itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposedKernel {
    pub connection: ConnectionFunction,
    pub landscape: Landscape,
    pub measure: Option<TypeMeasure<f64>>,
}

impl ComposedKernel {
    pub fn new(connection: ConnectionFunction, landscape: Landscape, measure: Option<TypeMeasure<f64>>) -> Self {
        Self {
            connection,
            landscape,
            measure,
        }
    }

    /// The kernel equivalent to [`step_graphon_at`] for the same inputs.
    pub fn at_types(mu: &TypeMeasure<f64>, landscape_values: &[f64], r: &ConnectionFunction) -> Result<Self> {
        check_types(mu, landscape_values)?;
        Ok(Self::new(
            r.clone(),
            Landscape::at_type_points(landscape_values)?,
            Some(mu.clone()),
        ))
    }

    fn inverse(&self, u: f64) -> f64 {
        match &self.measure {
            Some(mu) => mu.generalized_inverse(&u),
            None => u,
        }
    }

    /// Evaluation with domain checking.
    pub fn eval_checked(&self, x: f64, y: f64) -> Result<f64> {
        for (what, v) in [("x", x), ("y", y)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain { what, value: v });
            }
        }
        Ok(self.eval(x, y))
    }
}

impl Kernel for ComposedKernel {
    fn eval(&self, x: f64, y: f64) -> f64 {
        let hx = self.landscape.eval(self.inverse(x));
        let hy = self.landscape.eval(self.inverse(y));
        self.connection.eval(hx, hy)
    }
}

/// Block graphon of an `(m+1)`-type population: block widths are the type
/// frequencies, block `(j, l)` holds `r(H_j, H_l)` where `H_l` is the fitness
/// of type `l`.
pub fn step_graphon_at(
    mu: &TypeMeasure<f64>,
    landscape_values: &[f64],
    r: &ConnectionFunction,
) -> Result<StepGraphon<f64>> {
    check_types(mu, landscape_values)?;
    let types = mu.num_types();
    let mut values = vec![0.0; types * types];
    for j in 0..types {
        for l in j..types {
            let v = r.eval(landscape_values[j], landscape_values[l]);
            values[j * types + l] = v;
            values[l * types + j] = v;
        }
    }
    StepGraphon::from_measure(mu, values)
}

fn check_types(mu: &TypeMeasure<f64>, landscape_values: &[f64]) -> Result<()> {
    if landscape_values.len() != mu.num_types() {
        return Err(Error::config(format!(
            "landscape covers {} types, population has {}",
            landscape_values.len(),
            mu.num_types()
        )));
    }
    Ok(())
}

/// Any graphon the density evaluators accept.
#[derive(Debug, Clone, PartialEq)]
pub enum Graphon {
    Step(StepGraphon<f64>),
    Composed(ComposedKernel),
    Function(ConnectionFunction),
}

impl Kernel for Graphon {
    fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Graphon::Step(h) => h.eval(x, y),
            Graphon::Composed(h) => h.eval(x, y),
            Graphon::Function(r) => r.eval(x, y),
        }
    }
}

impl From<StepGraphon<f64>> for Graphon {
    fn from(h: StepGraphon<f64>) -> Self {
        Graphon::Step(h)
    }
}

impl From<ComposedKernel> for Graphon {
    fn from(h: ComposedKernel) -> Self {
        Graphon::Composed(h)
    }
}

impl From<ConnectionFunction> for Graphon {
    fn from(r: ConnectionFunction) -> Self {
        Graphon::Function(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{rng_from_seed, SimRng};
    use rand::Rng;

    #[test]
    fn example_one_blocks() {
        let mu = TypeMeasure::new(vec![0.7, 0.3]).unwrap();
        let r = ConnectionFunction::two_type(0.9, 0.6, 0.1).unwrap();
        let h = step_graphon_at(&mu, &[0.0, 0.5], &r).unwrap();
        assert_eq!(h.breakpoints(), &[0.0, 0.7, 1.0]);
        assert_eq!(h.eval(0.3, 0.3), 0.9);
        assert_eq!(h.eval(0.8, 0.95), 0.6);
        assert_eq!(h.eval(0.3, 0.8), 0.1);
        assert_eq!(h.eval(0.8, 0.3), 0.1);
    }

    #[test]
    fn degenerate_measure_gives_constant_graphon() {
        let mu = TypeMeasure::point_mass(3, 0).unwrap();
        let h = step_graphon_at(&mu, &[0.4, 0.1, 0.2, 0.3], &ConnectionFunction::Product).unwrap();
        for &(x, y) in &[(0.0, 0.0), (0.5, 0.2), (1.0, 1.0)] {
            assert!((h.eval(x, y) - 0.16).abs() < 1e-15);
        }
    }

    #[test]
    fn product_values_by_hand() {
        let mu = TypeMeasure::new(vec![0.5, 0.5]).unwrap();
        let h = step_graphon_at(&mu, &[0.2, 0.8], &ConnectionFunction::Product).unwrap();
        let expected = [0.04, 0.16, 0.16, 0.64];
        for (v, e) in h.values().iter().zip(expected) {
            assert!((v - e).abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_eval_examples() {
        let one = ComposedKernel::new(ConnectionFunction::constant(1.0).unwrap(), Landscape::identity(), None);
        assert_eq!(one.eval(0.3, 0.8), 1.0);
        let xy = ComposedKernel::new(ConnectionFunction::Product, Landscape::identity(), None);
        assert!((xy.eval(0.5, 0.4) - 0.2).abs() < 1e-15);
        assert!(matches!(xy.eval_checked(1.2, 0.1), Err(Error::Domain { .. })));
    }

    fn random_instance(rng: &mut SimRng) -> (TypeMeasure<f64>, Vec<f64>, ConnectionFunction) {
        let types = rng.random_range(2..9);
        let raw: Vec<f64> = (0..types)
            .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() })
            .collect();
        let total: f64 = raw.iter().sum::<f64>().max(1e-9);
        let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        if w.iter().all(|&x| x == 0.0) {
            w[0] = 1.0;
        }
        let mu = TypeMeasure::new(w).unwrap();
        let landscape: Vec<f64> = (0..types).map(|_| rng.random()).collect();
        let r = match rng.random_range(0..3) {
            0 => ConnectionFunction::Product,
            1 => ConnectionFunction::Min,
            _ => ConnectionFunction::tabulate(9, |u, v| ((u + v) / 2.0).powi(2)).unwrap(),
        };
        (mu, landscape, r)
    }

    #[test]
    fn step_graphon_matches_composed_kernel_pointwise() {
        let mut rng = rng_from_seed(11);
        for _ in 0..50 {
            let (mu, landscape, r) = random_instance(&mut rng);
            let step = step_graphon_at(&mu, &landscape, &r).unwrap();
            let composed = ComposedKernel::at_types(&mu, &landscape, &r).unwrap();
            let width_sum: f64 = step.widths().iter().sum();
            assert!((width_sum - 1.0).abs() < 1e-12);
            for _ in 0..1000 {
                let (x, y): (f64, f64) = (rng.random(), rng.random());
                assert_eq!(step.eval(x, y), composed.eval(x, y));
                assert_eq!(composed.eval(x, y), composed.eval(y, x));
            }
        }
    }
}
