use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;

use serde_json::{Map, Value};

use crate::dynamics::LandscapeSpec;
use crate::error::{Error, Result};
use crate::graph::{motif_from_name, MotifGraph};
use crate::graphon::{ConnectionFunction, Landscape, TypeMeasure};

/// Flat key/value run configuration. Keys use `_` and `.` separators
/// (`grid_ds`, `landscape.c`, `r.kind`); values are JSON scalars, or strings
/// holding comma-separated lists.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    map: BTreeMap<String, Value>,
}

/// `--n-list` and `n_list` name the same key; `grid` is short for `grid_ds`.
pub fn canonical_key(key: &str) -> String {
    let key = key.trim_start_matches('-').replace('-', "_");
    match key.as_str() {
        "grid" => "grid_ds".into(),
        "f_grid" => "landscape.f_grid".into(),
        "c" => "landscape.c".into(),
        _ => key,
    }
}

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    /// Flattens a JSON object; nested objects become dotted keys.
    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::config("the configuration document must be a JSON object"))?;
        let mut params = Self::new();
        flatten("", obj, &mut params.map);
        Ok(params)
    }

    pub fn to_json(&self) -> Value {
        Value::Object(self.map.iter().map(|(k, v)| (k.clone(), v.clone())).collect())
    }

    /// Sets a key from command-line text: numbers and booleans are typed,
    /// everything else is kept as a string.
    pub fn set_text(&mut self, key: &str, text: &str) {
        let value = if let Ok(i) = text.parse::<i64>() {
            Value::from(i)
        } else if let Some(x) = text.parse::<f64>().ok().filter(|x| x.is_finite()) {
            Value::from(x)
        } else if let Ok(b) = text.parse::<bool>() {
            Value::from(b)
        } else {
            Value::from(text)
        };
        self.map.insert(canonical_key(key), value);
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.map.insert(canonical_key(key), value.into());
    }

    /// Sets `key` only if it is absent.
    pub fn set_default(&mut self, key: &str, value: impl Into<Value>) {
        self.map.entry(canonical_key(key)).or_insert_with(|| value.into());
    }

    pub fn merge(&mut self, other: &Params) {
        for (k, v) in &other.map {
            self.map.insert(k.clone(), v.clone());
        }
    }

    pub fn contains(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }

    pub fn raw(&self, key: &str) -> Option<&Value> {
        self.map.get(key)
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => as_f64(v).map(Some).ok_or_else(|| bad(key, "a number", v)),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        self.f64(key)?.ok_or_else(|| missing(key))
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => as_u64(v).ok_or_else(|| bad(key, "a non-negative integer", v)),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.u64_or(key, default as u64)? as usize)
    }

    pub fn str(&self, key: &str) -> Result<Option<String>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(v @ (Value::Number(_) | Value::Bool(_))) => Ok(Some(v.to_string())),
            Some(v) => Err(bad(key, "a string", v)),
        }
    }

    pub fn str_or(&self, key: &str, default: &str) -> Result<String> {
        Ok(self.str(key)?.unwrap_or_else(|| default.to_string()))
    }

    fn list(&self, key: &str) -> Option<Vec<Value>> {
        match self.map.get(key)? {
            Value::Array(items) => Some(items.clone()),
            Value::String(s) => Some(
                s.split([',', ';'])
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(|t| Value::from(t.to_string()))
                    .collect(),
            ),
            v => Some(vec![v.clone()]),
        }
    }

    pub fn list_f64(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(items) = self.list(key) else {
            return Ok(None);
        };
        items
            .iter()
            .map(|v| as_f64(v).ok_or_else(|| bad(key, "a list of numbers", v)))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    pub fn list_f64_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        Ok(self.list_f64(key)?.unwrap_or_else(|| default.to_vec()))
    }

    pub fn list_usize_or(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        let Some(items) = self.list(key) else {
            return Ok(default.to_vec());
        };
        items
            .iter()
            .map(|v| as_u64(v).map(|x| x as usize).ok_or_else(|| bad(key, "a list of non-negative integers", v)))
            .collect()
    }

    /// Motif names separated by commas; literal motifs (`k=3;edges=...`)
    /// contain commas themselves and are separated by `|` instead.
    pub fn motifs_or(&self, key: &str, default: &[&str]) -> Result<Vec<MotifGraph>> {
        let names: Vec<String> = match self.map.get(key) {
            None => default.iter().map(|s| s.to_string()).collect(),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string()))
                .collect(),
            Some(Value::String(s)) => {
                let sep = if s.contains("k=") { '|' } else { ',' };
                s.split(sep).map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect()
            }
            Some(v) => return Err(bad(key, "a list of motif names", v)),
        };
        if names.is_empty() {
            return Err(Error::config(format!("parameter '{key}': at least one motif is required")));
        }
        names
            .iter()
            .map(|name| motif_from_name(name).map_err(|e| Error::config(format!("parameter '{key}': {e}"))))
            .collect()
    }
}

fn flatten(prefix: &str, obj: &Map<String, Value>, out: &mut BTreeMap<String, Value>) {
    for (k, v) in obj {
        let key = if prefix.is_empty() {
            canonical_key(k)
        } else {
            canonical_key(&format!("{prefix}.{k}"))
        };
        match v {
            Value::Object(inner) => flatten(&key, inner, out),
            _ => {
                out.insert(key, v.clone());
            }
        }
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
    .filter(|x: &f64| x.is_finite())
}

fn as_u64(v: &Value) -> Option<u64> {
    match v {
        Value::Number(n) => n.as_u64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

fn bad(key: &str, expected: &str, got: &Value) -> Error {
    Error::config(format!("parameter '{key}': expected {expected}, got {got}"))
}

fn missing(key: &str) -> Error {
    Error::config(format!("missing parameter '{key}'"))
}

/// Population model shared by the experiments: connection function,
/// landscape, number of types and initial frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub m: usize,
    pub landscape: LandscapeSpec,
    pub r: ConnectionFunction,
    pub y0: TypeMeasure<f64>,
}

/// `F(x) = 3x^2 - 2x^3`, the distribution function of Beta(2, 2).
fn beta22_cdf(x: f64) -> f64 {
    x * x * (3.0 - 2.0 * x)
}

/// Beta(2,2) mass of `[l/(m+1), (l+1)/(m+1))` placed on atom `l`.
pub fn beta22_discretization(m: usize) -> TypeMeasure<f64> {
    let types = (m + 1) as f64;
    let weights = (0..=m)
        .map(|l| beta22_cdf((l + 1) as f64 / types) - beta22_cdf(l as f64 / types))
        .collect();
    TypeMeasure::new(weights).expect("discretized density is a probability vector")
}

/// Builds the named scenario:
///
/// * `example1`: type-connection matrix (`alpha`, `beta`, `delta` for two
///   types, or `r.matrix` as `a,b;c,d` rows) with the identity landscape;
/// * `example2`: `r(u,v) = uv` with the frequency landscape;
/// * `example3`: threshold landscape (`landscape.c`, and `landscape.f_grid`
///   CSV path or `landscape.f` in {product, min}) with `r(u,v) = uv`;
/// * `custom`: everything from `landscape.variant` and `r.kind`.
///
/// `landscape.variant` and `r.kind` override the named defaults, and `y0` is
/// either `Y_0` (two types), a comma list of `m+1` weights, `uniform` or
/// `beta22`.
pub fn scenario(name: &str, params: &Params) -> Result<Scenario> {
    let default_m = match name {
        "example1" => 1,
        "example2" => 3,
        "example3" => 9,
        "custom" => 1,
        other => {
            return Err(Error::config(format!(
                "parameter 'scenario': unknown scenario '{other}' (expected example1, example2, example3 or custom)"
            )))
        }
    };
    let m = params.usize_or("m", default_m)?;
    if m < 1 {
        return Err(Error::config("parameter 'm': at least two types are required (m >= 1)"));
    }

    let r = match (name, params.contains("r.kind")) {
        (_, true) => connection_from_params(params, m)?,
        ("example1", false) => example1_matrix(params, m)?,
        ("custom", false) => ConnectionFunction::Product,
        _ => ConnectionFunction::Product,
    };

    let default_variant = match name {
        "example1" => "identity",
        "example2" => "frequency",
        "example3" => "threshold",
        _ => "identity",
    };
    let variant = params.str_or("landscape.variant", default_variant)?;
    let landscape = landscape_from_params(&variant, params)?;
    let y0 = initial_measure(params, m)?;
    Ok(Scenario {
        name: name.to_string(),
        m,
        landscape,
        r,
        y0,
    })
}

fn example1_matrix(params: &Params, m: usize) -> Result<ConnectionFunction> {
    if params.contains("r.matrix") {
        return matrix_from_params(params, m);
    }
    if m != 1 {
        return Err(Error::config(format!(
            "parameter 'r.matrix': required for example1 with m = {m} (alpha/beta/delta only describe two types)"
        )));
    }
    let alpha = params.require_f64("alpha")?;
    let beta = params.require_f64("beta")?;
    let delta = params.require_f64("delta")?;
    ConnectionFunction::two_type(alpha, beta, delta).map_err(|e| Error::config(format!("parameters 'alpha/beta/delta': {e}")))
}

fn matrix_from_params(params: &Params, m: usize) -> Result<ConnectionFunction> {
    let text = params.str("r.matrix")?.ok_or_else(|| missing("r.matrix"))?;
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::config(format!("parameter 'r.matrix': cannot parse '{}'", t.trim())))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let size = rows.len();
    if size != m + 1 || rows.iter().any(|r| r.len() != size) {
        return Err(Error::config(format!(
            "parameter 'r.matrix': expected a {0}x{0} matrix for m = {m}",
            m + 1
        )));
    }
    ConnectionFunction::block(size, rows.concat()).map_err(|e| Error::config(format!("parameter 'r.matrix': {e}")))
}

fn connection_from_params(params: &Params, m: usize) -> Result<ConnectionFunction> {
    let kind = params.str_or("r.kind", "product")?;
    match kind.as_str() {
        "product" => Ok(ConnectionFunction::Product),
        "min" => Ok(ConnectionFunction::Min),
        "constant" => ConnectionFunction::constant(params.require_f64("r.c")?)
            .map_err(|e| Error::config(format!("parameter 'r.c': {e}"))),
        "block" | "matrix" => matrix_from_params(params, m),
        "grid" => {
            let path = params.str("r.grid")?.ok_or_else(|| missing("r.grid"))?;
            read_grid(&path, "r.grid")
        }
        other => Err(Error::config(format!(
            "parameter 'r.kind': unknown connection function '{other}' (expected product, min, constant, block or grid)"
        ))),
    }
}

fn read_grid(path: &str, key: &str) -> Result<ConnectionFunction> {
    let file = File::open(path).map_err(|e| Error::config(format!("parameter '{key}': cannot open '{path}': {e}")))?;
    ConnectionFunction::read_grid_csv(BufReader::new(file)).map_err(|e| Error::config(format!("parameter '{key}': {e}")))
}

fn landscape_from_params(variant: &str, params: &Params) -> Result<LandscapeSpec> {
    match variant {
        "identity" => Ok(LandscapeSpec::Identity),
        "frequency" => Ok(LandscapeSpec::Frequency),
        "threshold" => {
            let c = params.require_f64("landscape.c")?;
            let f = if let Some(path) = params.str("landscape.f_grid")? {
                read_grid(&path, "landscape.f_grid")?
            } else {
                match params.str_or("landscape.f", "product")?.as_str() {
                    "product" => ConnectionFunction::Product,
                    "min" => ConnectionFunction::Min,
                    other => {
                        return Err(Error::config(format!(
                            "parameter 'landscape.f': unknown mutual fitness function '{other}' (expected product or min, or give landscape.f_grid)"
                        )))
                    }
                }
            };
            LandscapeSpec::threshold(f, c).map_err(|e| Error::config(format!("parameter 'landscape.c': {e}")))
        }
        "user_grid" => {
            let values = params
                .list_f64("landscape.h_grid")?
                .ok_or_else(|| missing("landscape.h_grid"))?;
            Landscape::from_grid(values)
                .map(LandscapeSpec::UserGrid)
                .map_err(|e| Error::config(format!("parameter 'landscape.h_grid': {e}")))
        }
        other => Err(Error::config(format!(
            "parameter 'landscape.variant': unknown variant '{other}' (expected identity, frequency, threshold or user_grid)"
        ))),
    }
}

/// Initial frequencies from the `y0` key (default uniform).
pub fn initial_measure(params: &Params, m: usize) -> Result<TypeMeasure<f64>> {
    let text = params.str("y0")?;
    let uniform = || TypeMeasure::new(vec![1.0 / (m + 1) as f64; m + 1]);
    let mu = match text.as_deref() {
        None | Some("uniform") => uniform(),
        Some("beta22") => Ok(beta22_discretization(m)),
        Some(_) => {
            let values = params.list_f64("y0")?.unwrap_or_default();
            let weights = match values.len() {
                1 if m == 1 => vec![values[0], 1.0 - values[0]],
                len if len == m + 1 => values,
                len => {
                    return Err(Error::config(format!(
                        "parameter 'y0': expected {} weights (or one value when m = 1), got {len}",
                        m + 1
                    )))
                }
            };
            TypeMeasure::new(weights)
        }
    };
    mu.map_err(|e| Error::config(format!("parameter 'y0': {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, &str)]) -> Params {
        let mut p = Params::new();
        for (k, v) in pairs {
            p.set_text(k, v);
        }
        p
    }

    #[test]
    fn keys_are_normalised() {
        let p = params(&[("--n-list", "100,400"), ("grid", "0.05")]);
        assert_eq!(p.list_usize_or("n_list", &[]).unwrap(), vec![100, 400]);
        assert_eq!(p.f64("grid_ds").unwrap(), Some(0.05));
    }

    #[test]
    fn errors_name_the_key() {
        let p = params(&[("n", "abc")]);
        let err = p.usize_or("n", 1).unwrap_err().to_string();
        assert!(err.contains("'n'"), "{err}");
        let err = scenario("example1", &Params::new()).unwrap_err().to_string();
        assert!(err.contains("'alpha'"), "{err}");
    }

    #[test]
    fn json_round_trip() {
        let p = params(&[("n", "500"), ("landscape.c", "0.3"), ("motifs", "edge,triangle")]);
        let q = Params::from_json(&p.to_json()).unwrap();
        assert_eq!(p, q);
        let nested: Value = serde_json::json!({"landscape": {"variant": "frequency"}, "n": 3});
        let flat = Params::from_json(&nested).unwrap();
        assert_eq!(flat.str("landscape.variant").unwrap().as_deref(), Some("frequency"));
    }

    #[test]
    fn example1_is_block_matrix_with_identity_landscape() {
        let sc = scenario("example1", &params(&[("alpha", "0.9"), ("beta", "0.6"), ("delta", "0.1")])).unwrap();
        assert_eq!(sc.m, 1);
        assert_eq!(sc.r, ConnectionFunction::two_type(0.9, 0.6, 0.1).unwrap());
        assert_eq!(sc.landscape, LandscapeSpec::Identity);
    }

    #[test]
    fn example2_and_example3() {
        let sc = scenario("example2", &params(&[("m", "3")])).unwrap();
        assert_eq!(sc.r, ConnectionFunction::Product);
        assert_eq!(sc.landscape, LandscapeSpec::Frequency);
        assert_eq!(sc.y0.num_types(), 4);

        let sc = scenario("example3", &params(&[("c", "0.3")])).unwrap();
        assert_eq!(sc.r, ConnectionFunction::Product);
        assert!(matches!(sc.landscape, LandscapeSpec::Threshold { c, .. } if c == 0.3));
        assert!(scenario("example3", &Params::new()).is_err());
        assert!(scenario("example4", &Params::new()).is_err());
    }

    #[test]
    fn initial_measures() {
        let p = params(&[("y0", "0.3")]);
        assert_eq!(initial_measure(&p, 1).unwrap().weights(), &[0.3, 0.7]);
        let p = params(&[("y0", "0.2,0.3,0.5")]);
        assert_eq!(initial_measure(&p, 2).unwrap().weights(), &[0.2, 0.3, 0.5]);
        assert!(initial_measure(&params(&[("y0", "0.2,0.3")]), 2).is_err());
        assert!(initial_measure(&params(&[("y0", "0.2,0.3,0.6")]), 2).is_err());
        let b = beta22_discretization(39);
        let total: f64 = b.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        // symmetric density
        assert!((b.weights()[0] - b.weights()[39]).abs() < 1e-12);
    }
}
