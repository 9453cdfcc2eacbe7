use std::path::Path;

use serde::{Deserialize, Serialize};

use super::experiments::{ConvergenceParams, LaplaceParams, ScnnParams, TransferParams};
use super::sampling::{Sampling, SignalFn};
use super::GraphonFamily;
use crate::error::{Error, Result};
use crate::filters::FilterSpec;
use crate::scnn::ScnnSpec;
use crate::unbounded::TargetSign;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Converge,
    Transfer,
    Scnn,
    Laplace,
}

/// A JSON experiment description. Fields not used by the chosen experiment
/// are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub graphon: Option<String>,
    #[serde(default)]
    pub filter: Option<String>,
    /// Path of an `scnn/1` network file.
    #[serde(default)]
    pub spec: Option<String>,
    #[serde(default)]
    pub signals: Option<Vec<String>>,
    #[serde(default)]
    pub sizes: Option<Vec<usize>>,
    #[serde(default)]
    pub n1: Option<usize>,
    #[serde(default)]
    pub n2: Option<usize>,
    #[serde(default)]
    pub sampling: Option<Sampling>,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub k: Option<u32>,
    #[serde(default)]
    pub scale: Option<f64>,
    #[serde(default)]
    pub model_sign: Option<bool>,
}

/// Typed parameters of a validated configuration.
#[derive(Debug, Clone)]
pub enum Experiment {
    Converge(ConvergenceParams),
    Transfer(TransferParams),
    Scnn(ScnnParams),
    Laplace(LaplaceParams),
}

fn need<T: Clone>(v: &Option<T>, field: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::Config(format!("field `{field}`: required for this experiment")))
}

fn field_err(field: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::Config(format!("field `{field}`: {e}"))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn unused(&self, fields: &[(&str, bool)]) -> Result<()> {
        for (name, present) in fields {
            if *present {
                return Err(Error::Config(format!(
                    "field `{name}`: not used by the {:?} experiment",
                    self.experiment
                )));
            }
        }
        Ok(())
    }

    fn trials(&self) -> Result<usize> {
        let t = self.trials.unwrap_or(1);
        if t == 0 {
            return Err(Error::Config("field `trials`: must be at least 1".into()));
        }
        Ok(t)
    }

    fn sizes(&self) -> Result<Vec<usize>> {
        let sizes = need(&self.sizes, "sizes")?;
        if sizes.is_empty() || sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("field `sizes`: must be non-empty and strictly increasing".into()));
        }
        Ok(sizes)
    }

    fn pair(&self) -> Result<(usize, usize)> {
        let (n1, n2) = (need(&self.n1, "n1")?, need(&self.n2, "n2")?);
        if n1 < 2 || n2 < 2 {
            return Err(Error::Config("fields `n1`, `n2`: need at least 2 nodes".into()));
        }
        Ok((n1, n2))
    }

    fn graphon(&self) -> Result<GraphonFamily> {
        GraphonFamily::parse(&need(&self.graphon, "graphon")?).map_err(field_err("graphon"))
    }

    fn filter(&self) -> Result<FilterSpec> {
        FilterSpec::parse(&need(&self.filter, "filter")?).map_err(field_err("filter"))
    }

    fn name(&self, default: &str) -> String {
        self.name.clone().unwrap_or_else(|| default.to_string())
    }

    /// Checks every field and resolves names into typed parameters.
    pub fn validate(&self) -> Result<Experiment> {
        let seed = self.seed.unwrap_or(0);
        let sampling = self.sampling.unwrap_or(Sampling::Grid);
        let laplace_only = [
            ("lambda", self.lambda.is_some()),
            ("k", self.k.is_some()),
            ("scale", self.scale.is_some()),
            ("model_sign", self.model_sign.is_some()),
        ];
        match self.experiment {
            ExperimentKind::Converge => {
                self.unused(&laplace_only)?;
                self.unused(&[("spec", self.spec.is_some()), ("signals", self.signals.is_some())])?;
                self.unused(&[("n1", self.n1.is_some()), ("n2", self.n2.is_some())])?;
                Ok(Experiment::Converge(ConvergenceParams {
                    name: self.name("converge"),
                    graphon: self.graphon()?,
                    filter: self.filter()?,
                    sizes: self.sizes()?,
                    sampling,
                    trials: self.trials()?,
                    seed,
                }))
            }
            ExperimentKind::Transfer => {
                self.unused(&laplace_only)?;
                self.unused(&[("spec", self.spec.is_some()), ("signals", self.signals.is_some())])?;
                self.unused(&[("sizes", self.sizes.is_some())])?;
                let (n1, n2) = self.pair()?;
                Ok(Experiment::Transfer(TransferParams {
                    name: self.name("transfer"),
                    graphon: self.graphon()?,
                    filter: self.filter()?,
                    n1,
                    n2,
                    sampling: self.sampling.unwrap_or(Sampling::Iid),
                    trials: self.trials()?,
                    seed,
                }))
            }
            ExperimentKind::Scnn => {
                self.unused(&laplace_only)?;
                self.unused(&[("filter", self.filter.is_some()), ("sizes", self.sizes.is_some())])?;
                let path = need(&self.spec, "spec")?;
                let spec = ScnnSpec::read(Path::new(&path)).map_err(field_err("spec"))?;
                let (n1, n2) = self.pair()?;
                let signals = match &self.signals {
                    Some(s) => s.iter().map(|x| SignalFn::parse(x)).collect::<Result<Vec<_>>>().map_err(field_err("signals"))?,
                    None => default_signals(spec.widths()[0]),
                };
                Ok(Experiment::Scnn(ScnnParams {
                    name: self.name("scnn"),
                    label: path,
                    spec,
                    graphon: self.graphon()?,
                    signals,
                    n1,
                    n2,
                    sampling: self.sampling.unwrap_or(Sampling::Iid),
                    trials: self.trials()?,
                    seed,
                }))
            }
            ExperimentKind::Laplace => {
                self.unused(&[
                    ("graphon", self.graphon.is_some()),
                    ("filter", self.filter.is_some()),
                    ("spec", self.spec.is_some()),
                    ("signals", self.signals.is_some()),
                    ("n1", self.n1.is_some()),
                    ("n2", self.n2.is_some()),
                    ("sampling", self.sampling.is_some()),
                    ("trials", self.trials.is_some()),
                ])?;
                let lambda = need(&self.lambda, "lambda")?;
                if !(lambda > 0.0) {
                    return Err(Error::Config("field `lambda`: must be positive".into()));
                }
                let power = need(&self.k, "k")?;
                if power == 0 {
                    return Err(Error::Config("field `k`: must be at least 1".into()));
                }
                let sizes = self.sizes()?;
                if sizes[0] < 3 {
                    return Err(Error::Config("field `sizes`: finite-difference graphs need n >= 3".into()));
                }
                Ok(Experiment::Laplace(LaplaceParams {
                    name: self.name("laplace"),
                    lambda,
                    power,
                    sizes,
                    scale: self.scale,
                    sign: if self.model_sign == Some(true) { TargetSign::Model } else { TargetSign::Stencil },
                }))
            }
        }
    }
}

/// Input features used when a network config names none: `u`, `cos`,
/// `sin`, `one`, then repeating.
pub fn default_signals(width: usize) -> Vec<SignalFn> {
    let cycle = [SignalFn::Linear, SignalFn::Cos, SignalFn::Sin, SignalFn::One];
    (0..width).map(|i| cycle[i % cycle.len()]).collect()
}
