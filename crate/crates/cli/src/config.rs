//! JSON configuration files for the batch commands.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use nsumkit::montecarlo::RetroSampling;
use nsumkit::{CaseStudy, ZConvention};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// The seven published case studies.
pub const CASE_STUDIES: &str = include_str!("../fixtures/case_studies.json");

/// Reads a config file. A run manifest is accepted too; its embedded
/// configuration is used.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    let mut value: serde_json::Value = serde_json::from_str(text)?;
    if let Some(obj) = value.as_object_mut() {
        if obj.contains_key("command") && obj.contains_key("config") {
            value = obj.remove("config").unwrap();
        }
    }
    Ok(serde_json::from_value(value)?)
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_alpha() -> f64 {
    0.05
}

fn default_retro_replicates() -> u64 {
    nsumkit::montecarlo::DEFAULT_RETRO_REPLICATES
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RetroConfig {
    pub cases: Vec<CaseStudy>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_retro_replicates")]
    pub replicates: u64,
    #[serde(default)]
    pub sampling: RetroSampling,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RetroFile {
    Full(RetroConfig),
    Cases(Vec<CaseStudy>),
}

impl RetroConfig {
    pub fn from_cases(cases: Vec<CaseStudy>) -> Self {
        RetroConfig {
            cases,
            epsilon: default_epsilon(),
            alpha: default_alpha(),
            replicates: default_retro_replicates(),
            sampling: RetroSampling::default(),
            seed: 0,
        }
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        let file: RetroFile = match path {
            Some(p) => load(p)?,
            None => parse(CASE_STUDIES)?,
        };
        Ok(match file {
            RetroFile::Full(c) => c,
            RetroFile::Cases(cases) => Self::from_cases(cases),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridConfig {
    #[serde(default = "grid_m", alias = "M")]
    pub m: u64,
    #[serde(default = "grid_q")]
    pub q: Vec<f64>,
    #[serde(default = "grid_d_bar")]
    pub d_bar: Vec<f64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "unit")]
    pub design_effect: f64,
    #[serde(default)]
    pub z: ZConvention,
}

fn grid_m() -> u64 {
    10_000
}

fn grid_q() -> Vec<f64> {
    vec![0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5]
}

fn grid_d_bar() -> Vec<f64> {
    vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0]
}

fn unit() -> f64 {
    1.0
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            m: grid_m(),
            q: grid_q(),
            d_bar: grid_d_bar(),
            epsilon: default_epsilon(),
            alpha: default_alpha(),
            design_effect: 1.0,
            z: ZConvention::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_cases_match_library() {
        let cfg = RetroConfig::load(None).unwrap();
        assert_eq!(cfg.cases, CaseStudy::published());
        assert_eq!(cfg.replicates, 10_000);
    }

    #[test]
    fn manifest_is_accepted_as_config() {
        let direct: GridConfig = parse(r#"{"M": 500, "q": [0.1]}"#).unwrap();
        let wrapped: GridConfig = parse(r#"{"command": "grid", "config": {"m": 500, "q": [0.1]}, "seed": 0}"#).unwrap();
        assert_eq!(direct.m, 500);
        assert_eq!(wrapped.m, 500);
        assert_eq!(wrapped.q, vec![0.1]);
    }
}
