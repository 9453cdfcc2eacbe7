use std::fmt;
use std::path::Path;

use crate::domain::io::parse_matrix;
use crate::domain::{GraphonEvaluator, Partition, StepGraphon};
use crate::error::{Error, Result};

/// Named graphons used by the experiments.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphonFamily {
    Const(f64),
    /// `W(u,v) = uv`.
    Product,
    /// `W(u,v) = min(u,v)`.
    Min,
    /// `W(u,v) = e^{−s|u−v|}`.
    ExpDist(f64),
    /// `k` equal blocks, `p_in` on the diagonal blocks and `p_out` elsewhere.
    Sbm { k: usize, p_in: f64, p_out: f64 },
    /// A step graphon on a uniform partition, read from a file.
    Step { source: String, graphon: StepGraphon },
}

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::param(format!("{what} must be finite")))
    }
}

impl GraphonFamily {
    pub fn sbm(k: usize, p_in: f64, p_out: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("sbm needs at least one block"));
        }
        Ok(Self::Sbm { k, p_in: finite(p_in, "p_in")?, p_out: finite(p_out, "p_out")? })
    }

    /// Parses `const:p`, `product`, `min`, `expdist:s`, `sbm:k,p_in,p_out`
    /// or `step:<file>` (a `gso v1` matrix read as block values).
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("graphon {s:?}: {why}"));
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad(&format!("bad number {t:?}")));
        match s {
            "product" => return Ok(Self::Product),
            "min" => return Ok(Self::Min),
            _ => {}
        }
        let (name, arg) = s.split_once(':').ok_or_else(|| bad("unknown graphon"))?;
        match name {
            "const" => Ok(Self::Const(finite(num(arg)?, "p")?)),
            "expdist" => Ok(Self::ExpDist(finite(num(arg)?, "s")?)),
            "sbm" => {
                let parts: Vec<&str> = arg.split(',').collect();
                if parts.len() != 3 {
                    return Err(bad("expected sbm:k,p_in,p_out"));
                }
                let k = parts[0].parse().map_err(|_| bad("bad block count"))?;
                Self::sbm(k, num(parts[1])?, num(parts[2])?)
            }
            "step" => {
                let text = std::fs::read_to_string(Path::new(arg))?;
                let graphon = StepGraphon::uniform(parse_matrix(&text)?)?;
                Ok(Self::Step { source: arg.to_string(), graphon })
            }
            _ => Err(bad("unknown graphon")),
        }
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        match self {
            Self::Const(p) => *p,
            Self::Product => u * v,
            Self::Min => u.min(v),
            Self::ExpDist(s) => (-s * (u - v).abs()).exp(),
            Self::Sbm { k, p_in, p_out } => {
                let block = |x: f64| ((x * *k as f64) as usize).min(k - 1);
                if block(u) == block(v) {
                    *p_in
                } else {
                    *p_out
                }
            }
            Self::Step { graphon, .. } => graphon.eval(u, v),
        }
    }

    /// `sup |W|` on `[0,1]^2`.
    pub fn bound(&self) -> f64 {
        match self {
            Self::Const(p) => p.abs(),
            Self::Product | Self::Min => 1.0,
            Self::ExpDist(s) => {
                if *s >= 0.0 {
                    1.0
                } else {
                    (-s).exp()
                }
            }
            Self::Sbm { p_in, p_out, .. } => p_in.abs().max(p_out.abs()),
            Self::Step { graphon, .. } => graphon.bound(),
        }
    }

    pub fn evaluator(&self) -> GraphonEvaluator {
        let me = self.clone();
        GraphonEvaluator::new(self.bound(), move |u, v| me.eval(u, v))
    }

    /// The exact step representation, for step-valued families.
    pub fn as_step(&self) -> Option<StepGraphon> {
        match self {
            Self::Const(p) => Some(StepGraphon::constant(*p)),
            Self::Sbm { k, p_in, p_out } => {
                let values = nalgebra::DMatrix::from_fn(*k, *k, |i, j| if i == j { *p_in } else { *p_out });
                Some(StepGraphon::new(Partition::uniform(*k).ok()?, values).ok()?)
            }
            Self::Step { graphon, .. } => Some(graphon.clone()),
            _ => None,
        }
    }

    /// Nondecreasing in each argument on `[0,1]`.
    pub fn is_monotone(&self) -> bool {
        matches!(self, Self::Const(_) | Self::Product | Self::Min)
    }
}

impl fmt::Display for GraphonFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Const(p) => write!(f, "const:{p}"),
            Self::Product => f.write_str("product"),
            Self::Min => f.write_str("min"),
            Self::ExpDist(s) => write!(f, "expdist:{s}"),
            Self::Sbm { k, p_in, p_out } => write!(f, "sbm:{k},{p_in},{p_out}"),
            Self::Step { source, .. } => write!(f, "step:{source}"),
        }
    }
}
