//! Experiment configuration. Defaults come from the shipped JSON schema;
//! a config file and then command-line overrides are merged on top.

use anyhow::{anyhow, bail, Context, Result};
use contact_order::CurveSpec;
use eigenfunction_bases::Family;
use exponent_model::LebesgueExponent;
use restriction_lab::LambdaGrid;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

pub const SCHEMA_SRC: &str = include_str!("../schema/experiment.schema.json");

pub fn schema() -> &'static Value {
    static SCHEMA: OnceLock<Value> = OnceLock::new();
    SCHEMA.get_or_init(|| serde_json::from_str(SCHEMA_SRC).expect("shipped schema is valid JSON"))
}

/// Collect `default` values from a schema node, descending into objects.
fn defaults_of(node: &Value) -> Value {
    let mut out = node.get("default").cloned().unwrap_or(Value::Null);
    if let Some(props) = node.get("properties").and_then(Value::as_object) {
        let mut obj = match out {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        for (k, v) in props {
            let d = defaults_of(v);
            if !d.is_null() || v.get("default").is_some() {
                obj.entry(k.clone()).or_insert(d);
            }
        }
        out = Value::Object(obj);
    }
    out
}

/// The configuration with every field at its schema default.
pub fn schema_defaults() -> Value {
    defaults_of(schema())
}

pub fn family_defaults(family: Family) -> Value {
    schema()["x-family-defaults"][family.as_str()].clone()
}

fn feasibility_max(family: Family) -> f64 {
    schema()["x-feasibility"][family.as_str()]["max"].as_f64().expect("feasibility bound in schema")
}

/// Recursive merge: objects merge key-wise, everything else is replaced.
/// `null` in `top` leaves `base` unchanged.
pub fn merge(base: &mut Value, top: &Value) {
    match (base, top) {
        (_, Value::Null) => {}
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                merge(b.entry(k.clone()).or_insert(Value::Null), v);
            }
        }
        (b, t) => *b = t.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveInput {
    Short(String),
    Full(CurveSpec),
}

impl CurveInput {
    pub fn spec(&self) -> Result<CurveSpec> {
        match self {
            CurveInput::Short(s) => CurveSpec::parse_short(s).with_context(|| format!("curve `{s}`")),
            CurveInput::Full(c) => Ok(c.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QInput {
    Text(String),
    Number(f64),
}

impl QInput {
    pub fn parse(&self) -> Result<LebesgueExponent> {
        let s = match self {
            QInput::Text(s) => s.clone(),
            QInput::Number(x) => x.to_string(),
        };
        let q = LebesgueExponent::parse(&s).ok_or_else(|| anyhow!("invalid exponent `{s}`"))?;
        if let LebesgueExponent::Finite(r) = &q {
            if *r < exponent_model::rat(2, 1) {
                bail!("q = {s} lies below 2");
            }
        }
        Ok(q)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremizeConfig {
    pub curve: Option<CurveInput>,
    pub sigma: u32,
    pub lambda: f64,
    pub c_width: f64,
    pub t0: f64,
    pub ascent_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictConfig {
    pub sigma_list: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowcheckConfig {
    pub starts: usize,
    pub symbols: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolylabConfig {
    pub sigma_max: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub symbol: String,
    pub curve: CurveInput,
    pub lambda_grid: LambdaGrid,
    pub q_list: Vec<QInput>,
    pub j_max: usize,
    pub rtol: f64,
    pub seed: u64,
    pub output: PathBuf,
    pub tolerance: Option<f64>,
    pub predict: PredictConfig,
    pub extremize: ExtremizeConfig,
    pub flowcheck: FlowcheckConfig,
    pub polylab: PolylabConfig,
}

impl ExperimentConfig {
    /// Schema defaults, then `family` defaults, then the file, then `overrides`.
    pub fn resolve(family: Option<Family>, file: Option<&Path>, overrides: &Value) -> Result<Self> {
        let mut v = schema_defaults();
        if let Some(f) = family {
            merge(&mut v, &family_defaults(f));
        }
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let user: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            if !user.is_object() {
                bail!("{}: top level must be an object", path.display());
            }
            merge(&mut v, &user);
        }
        merge(&mut v, overrides);
        let cfg: ExperimentConfig = serde_json::from_value(v).context("configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.lambda_grid;
        if !(g.min > 0.0 && g.max > g.min && g.points_per_decade > 0.0 && g.jitter_group >= 1) {
            bail!("lambda_grid needs 0 < min < max, points_per_decade > 0, jitter_group ≥ 1");
        }
        if let Some(f) = self.family() {
            let top = feasibility_max(f);
            if g.max > top {
                bail!("lambda_grid.max = {} exceeds the {} limit {top}", g.max, f);
            }
        }
        if self.q_list.is_empty() {
            bail!("q_list is empty");
        }
        for q in &self.q_list {
            q.parse()?;
        }
        if !(2..=12).contains(&self.j_max) {
            bail!("j_max must lie in 2..=12");
        }
        if !(self.rtol > 0.0 && self.rtol <= 0.1) {
            bail!("rtol must lie in (0, 0.1]");
        }
        if let Some(t) = self.tolerance {
            if t.is_nan() || t <= 0.0 {
                bail!("tolerance must be positive");
            }
        }
        self.curve.spec()?;
        symbol_core::SymbolModel::from_name(&self.symbol).with_context(|| format!("symbol `{}`", self.symbol))?;
        Ok(())
    }

    pub fn family(&self) -> Option<Family> {
        restriction_lab::sweep::family_of(&self.symbol)
    }

    pub fn q_values(&self) -> Result<Vec<LebesgueExponent>> {
        self.q_list.iter().map(QInput::parse).collect()
    }

    pub fn tolerance_for(&self, family: Family) -> f64 {
        self.tolerance
            .or_else(|| family_defaults(family)["tolerance"].as_f64())
            .expect("family tolerance in schema")
    }

    pub fn contact_config(&self) -> contact_order::ContactConfig {
        contact_order::ContactConfig { j_max: self.j_max, rtol: self.rtol, ..Default::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_deserialize() {
        let c = ExperimentConfig::resolve(None, None, &Value::Null).unwrap();
        assert_eq!(c.symbol, "torus_laplace");
        assert_eq!(c.lambda_grid.jitter_group, 3);
        assert_eq!(c.j_max, 8);
        assert_eq!(c.tolerance, None);
        assert_eq!(c.tolerance_for(Family::Hermite), 0.06);
    }

    #[test]
    fn family_then_override() {
        let o = serde_json::json!({"lambda_grid": {"max": 900}, "seed": 5});
        let c = ExperimentConfig::resolve(Some(Family::Sphere), None, &o).unwrap();
        assert_eq!(c.symbol, "sphere_laplace");
        assert_eq!(c.lambda_grid.min, 50.0);
        assert_eq!(c.lambda_grid.max, 900.0);
        assert_eq!(c.seed, 5);
    }

    #[test]
    fn infeasible_grid_is_rejected() {
        let o = serde_json::json!({"lambda_grid": {"max": 7000}});
        assert!(ExperimentConfig::resolve(Some(Family::Hermite), None, &o).is_err());
        let o = serde_json::json!({"q_list": ["3/2"]});
        assert!(ExperimentConfig::resolve(None, None, &o).is_err());
        let o = serde_json::json!({"colour": 1});
        assert!(ExperimentConfig::resolve(None, None, &o).is_err());
    }
}
