use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::scalar::{from_rational, parse_rational, Scalar};

use super::{AlgoTwo, DegreeGreedy, EvenSpread, Greedy, LevelTarget, LinearGrowth, Null, Strategy, StrategyError};

/// An increasing level map with `σ(0) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sigma {
    Identity,
    /// `σ(i) = k·i`
    Stride(usize),
    /// `σ(1), σ(2), …`; undefined past the list.
    Explicit(Vec<usize>),
}

impl Sigma {
    pub fn at(&self, i: usize) -> Option<usize> {
        if i == 0 {
            return Some(0);
        }
        match self {
            Sigma::Identity => Some(i),
            Sigma::Stride(k) => i.checked_mul(*k),
            Sigma::Explicit(v) => v.get(i - 1).copied(),
        }
    }

    fn parse(text: &str) -> Result<Self, StrategyError> {
        let bad = || StrategyError::InvalidConfig(format!("bad sigma {text:?}"));
        match text {
            "id" | "identity" => Ok(Sigma::Identity),
            _ => {
                if let Some(k) = text.strip_prefix("stride:") {
                    let k: usize = k.parse().map_err(|_| bad())?;
                    if k == 0 {
                        return Err(bad());
                    }
                    return Ok(Sigma::Stride(k));
                }
                let v = text
                    .split(['/', ';'])
                    .map(|x| x.trim().parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| bad())?;
                if v.is_empty() || v[0] == 0 || v.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(bad());
                }
                Ok(Sigma::Explicit(v))
            }
        }
    }
}

/// `{"strategy": name, "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub strategy: String,
    #[serde(default)]
    pub params: Map<String, Value>,
}

impl StrategyConfig {
    pub fn named(name: &str) -> Self {
        StrategyConfig { strategy: name.to_string(), params: Map::new() }
    }

    fn param_text(&self, key: &str) -> Option<String> {
        self.params.get(key).map(|v| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        })
    }

    fn rational_param<S: Scalar>(&self, key: &str, default: &str) -> Result<S, StrategyError> {
        let text = self.param_text(key).unwrap_or_else(|| default.to_string());
        let r = parse_rational(&text).map_err(|e| StrategyError::InvalidConfig(e.to_string()))?;
        Ok(from_rational(&r))
    }

    /// Instantiates a fresh strategy.
    pub fn build<S: Scalar>(&self) -> Result<Box<dyn Strategy<S>>, StrategyError> {
        let strategy: Box<dyn Strategy<S>> = match self.strategy.as_str() {
            "gr" | "greedy" => Box::new(Greedy),
            "algo2" => Box::new(AlgoTwo::new()),
            "degree" => Box::new(DegreeGreedy),
            "even" => Box::new(EvenSpread),
            "null" => Box::new(Null),
            "level_target" => {
                let c = self.rational_param("C", "2")?;
                let sigma = match self.params.get("sigma") {
                    Some(Value::Array(items)) => Sigma::parse(
                        &items.iter().map(Value::to_string).collect::<Vec<_>>().join(";"),
                    )?,
                    _ => Sigma::parse(&self.param_text("sigma").unwrap_or_else(|| "id".into()))?,
                };
                Box::new(LevelTarget::new(c, sigma))
            }
            "linear_growth" => {
                let c = self.rational_param("C", "2")?;
                let n0 = self.param_text("n0").unwrap_or_else(|| "100".into());
                let n0: u64 = n0
                    .parse()
                    .map_err(|_| StrategyError::InvalidConfig(format!("bad n0 {n0:?}")))?;
                Box::new(LinearGrowth::new(c, n0))
            }
            other => return Err(StrategyError::Unknown(other.to_string())),
        };
        Ok(strategy)
    }
}

/// Parses `name` or `name:key=value,key=value` (or a JSON object) into a
/// configuration.
pub fn parse_strategy_spec(spec: &str) -> Result<StrategyConfig, StrategyError> {
    let spec = spec.trim();
    if spec.starts_with('{') {
        return serde_json::from_str(spec).map_err(|e| StrategyError::InvalidConfig(e.to_string()));
    }
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut params = Map::new();
    for item in rest.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| StrategyError::InvalidConfig(format!("expected key=value, got {item:?}")))?;
        params.insert(k.trim().to_string(), Value::String(v.trim().to_string()));
    }
    Ok(StrategyConfig { strategy: name.to_string(), params })
}
