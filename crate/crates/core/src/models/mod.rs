//! Built-in models and the parameter-file registry.

pub mod audit;
pub mod counterexample;
pub mod futile;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::EpsPolytope;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::system::SlowFastSystem;

pub use counterexample::CounterexampleParams;
pub use futile::{FutileCycle, FutileCycleParams, MassAction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKey {
    FutileCycle,
    FutileCycleReduced,
    FutileCycleMassAction,
    Counterexample,
}

impl ModelKey {
    pub const ALL: [ModelKey; 4] = [
        ModelKey::FutileCycle,
        ModelKey::FutileCycleReduced,
        ModelKey::FutileCycleMassAction,
        ModelKey::Counterexample,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKey::FutileCycle => "futile-cycle",
            ModelKey::FutileCycleReduced => "futile-cycle-reduced",
            ModelKey::FutileCycleMassAction => "futile-cycle-mass-action",
            ModelKey::Counterexample => "counterexample",
        }
    }

    pub fn default_eps(self) -> f64 {
        match self {
            ModelKey::Counterexample => 2.0,
            _ => 1e-3,
        }
    }
}

impl fmt::Display for ModelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKey::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<_> = ModelKey::ALL.iter().map(|k| k.as_str()).collect();
                Error::Config(format!("unknown model `{s}` (known: {})", known.join(", ")))
            })
    }
}

/// Contents of a parameter file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub model: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("parameter file: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model<T: Real> {
    FutileCycle(FutileCycleParams<T>),
    FutileCycleReduced(FutileCycleParams<T>),
    FutileCycleMassAction(FutileCycleParams<T>),
    Counterexample(CounterexampleParams<T>),
}

fn futile_from(params: &BTreeMap<String, f64>, eps: Option<f64>, default_eps: f64) -> Result<FutileCycleParams<f64>> {
    let mut p = FutileCycleParams::all_ones(default_eps)?;
    for (name, &v) in params {
        p.set(name, v)?;
    }
    p.parameter_set()?;
    if let Some(eps) = eps {
        if params.contains_key("E_tot") {
            let implied = p.eps();
            if (implied - eps).abs() > 1e-12 * eps.abs().max(implied.abs()) {
                return Err(Error::InvalidParameter(format!(
                    "eps = {eps} disagrees with E_tot/S_tot = {implied}"
                )));
            }
        } else {
            let c = if params.contains_key("F_tot") { p.c() } else { 1.0 };
            p.e_tot = eps * p.s_tot;
            p.f_tot = c * p.e_tot;
        }
    } else if !params.contains_key("E_tot") {
        p.e_tot = default_eps * p.s_tot;
        p.f_tot = p.e_tot;
    }
    p.validated()
}

fn cast_futile<T: Real>(p: &FutileCycleParams<f64>) -> FutileCycleParams<T> {
    let v = p.values();
    let mut out = FutileCycleParams::<T>::all_ones(T::of(1e-3)).expect("defaults are valid");
    for (name, x) in futile::PARAM_NAMES.iter().zip(v) {
        out.set(name, T::of(x)).expect("known name");
    }
    out
}

impl<T: Real> Model<T> {
    /// The model with every parameter at its default.
    pub fn default_for(key: ModelKey) -> Self {
        Self::from_spec(&ModelSpec {
            model: key.as_str().into(),
            params: BTreeMap::new(),
            eps: None,
        })
        .expect("defaults are valid")
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        let key: ModelKey = spec.model.parse()?;
        if let Some(eps) = spec.eps {
            if !(eps > 0.0) || !eps.is_finite() {
                return Err(Error::DegenerateTimescale(eps));
            }
        }
        Ok(match key {
            ModelKey::Counterexample => {
                let eps = T::of(spec.eps.unwrap_or(key.default_eps()));
                let mut cp = CounterexampleParams::new(eps)?;
                for (name, &v) in &spec.params {
                    match name.as_str() {
                        "a" => cp.a = T::of(v),
                        "b1" => cp.b1 = T::of(v),
                        _ => {
                            return Err(Error::InvalidParameter(format!(
                                "unknown counterexample parameter `{name}`"
                            )))
                        }
                    }
                }
                Model::Counterexample(CounterexampleParams::with_box(cp.eps, cp.a, cp.b1)?)
            }
            _ => {
                let p = cast_futile(&futile_from(&spec.params, spec.eps, key.default_eps())?);
                match key {
                    ModelKey::FutileCycle => Model::FutileCycle(p),
                    ModelKey::FutileCycleReduced => Model::FutileCycleReduced(p),
                    _ => Model::FutileCycleMassAction(p),
                }
            }
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_spec(&ModelSpec::from_json(text)?)
    }

    pub fn key(&self) -> ModelKey {
        match self {
            Model::FutileCycle(_) => ModelKey::FutileCycle,
            Model::FutileCycleReduced(_) => ModelKey::FutileCycleReduced,
            Model::FutileCycleMassAction(_) => ModelKey::FutileCycleMassAction,
            Model::Counterexample(_) => ModelKey::Counterexample,
        }
    }

    pub fn eps(&self) -> T {
        match self {
            Model::FutileCycle(p) | Model::FutileCycleReduced(p) | Model::FutileCycleMassAction(p) => p.eps(),
            Model::Counterexample(cp) => cp.eps,
        }
    }

    /// Upper end of the admissible ε range.
    pub fn eps_max(&self) -> T {
        match self {
            Model::FutileCycle(p) | Model::FutileCycleReduced(p) | Model::FutileCycleMassAction(p) => p.eps0(),
            Model::Counterexample(_) => T::max_value(),
        }
    }

    pub fn with_eps(&self, eps: T) -> Result<Self> {
        Ok(match self {
            Model::FutileCycle(p) => Model::FutileCycle(p.with_eps(eps)?),
            Model::FutileCycleReduced(p) => Model::FutileCycleReduced(p.with_eps(eps)?),
            Model::FutileCycleMassAction(p) => Model::FutileCycleMassAction(p.with_eps(eps)?),
            Model::Counterexample(cp) => Model::Counterexample(CounterexampleParams::with_box(eps, cp.a, cp.b1)?),
        })
    }

    pub fn futile_params(&self) -> Option<&FutileCycleParams<T>> {
        match self {
            Model::FutileCycle(p) | Model::FutileCycleReduced(p) | Model::FutileCycleMassAction(p) => Some(p),
            Model::Counterexample(_) => None,
        }
    }

    /// The slow–fast form and its domain, for models that have one.
    pub fn slow_fast(&self) -> Option<(SlowFastSystem<T>, EpsPolytope<T>)> {
        match self {
            Model::FutileCycle(p) => {
                let fc = p.scaled();
                Some((fc.system(), fc.domain()))
            }
            Model::Counterexample(cp) => Some((cp.system(), cp.domain())),
            _ => None,
        }
    }

    /// Parameter values by name, for reports.
    pub fn parameters(&self) -> BTreeMap<String, f64> {
        match self {
            Model::FutileCycle(p) | Model::FutileCycleReduced(p) | Model::FutileCycleMassAction(p) => futile::PARAM_NAMES
                .iter()
                .zip(p.values())
                .map(|(n, v)| (n.to_string(), v.as_f64()))
                .collect(),
            Model::Counterexample(cp) => [("a", cp.a), ("b1", cp.b1), ("eps", cp.eps)]
                .into_iter()
                .map(|(n, v)| (n.to_string(), v.as_f64()))
                .collect(),
        }
    }
}

/// The bistable futile-cycle parameter file shipped in `data/`.
pub const BISTABLE_FUTILE_CYCLE: &str = include_str!("../../../../data/futile_cycle_bistable.json");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_round_trip() {
        for k in ModelKey::ALL {
            assert_eq!(k.as_str().parse::<ModelKey>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.as_str()));
        }
        assert!("futile".parse::<ModelKey>().is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(Model::<f64>::from_json(r#"{"model":"futile-cycle","params":{},"eps":1e-3,"x":1}"#).is_err());
        assert!(Model::<f64>::from_json(r#"{"model":"futile-cycle","params":{"k9":1}}"#).is_err());
        assert!(Model::<f64>::from_json(r#"{"model":"counterexample","params":{"d":1}}"#).is_err());
        assert!(Model::<f64>::from_json(r#"{"model":"futile-cycle","params":{"k1":-1}}"#).is_err());
        assert!(Model::<f64>::from_json(r#"{"model":"futile-cycle","eps":0.9}"#).is_err());
        assert!(Model::<f64>::from_json(r#"{"model":"futile-cycle","eps":0}"#).is_err());
    }

    #[test]
    fn eps_sets_enzyme_total() {
        let m = Model::<f64>::from_json(r#"{"model":"futile-cycle","params":{"S_tot":2},"eps":0.01}"#).unwrap();
        let p = m.futile_params().unwrap();
        assert!((p.e_tot - 0.02).abs() < 1e-15 && (p.c() - 1.0).abs() < 1e-12);
        assert!((m.eps() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn bistable_file_loads() {
        let m = Model::<f64>::from_json(BISTABLE_FUTILE_CYCLE).unwrap();
        assert_eq!(m.key(), ModelKey::FutileCycle);
        assert!((m.eps() - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn defaults() {
        let m = Model::<f64>::default_for(ModelKey::Counterexample);
        assert_eq!(m.eps(), 2.0);
        let m = Model::<f32>::default_for(ModelKey::FutileCycle);
        assert!((m.eps() - 1e-3).abs() < 1e-9);
    }
}
