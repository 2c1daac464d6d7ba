//! Flag / config-file / default resolution.
//!
//! Precedence: command-line flag > `--config` file entry > built-in
//! default. The resolved set is echoed into the run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{json, Value};

use parosc::{DriveParams64, SimConfig64};

use crate::CliError;

/// Optional key-value configuration file (TOML).
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub h: Option<f64>,
    pub eps_bar: Option<f64>,
    pub r: Option<f64>,
    pub nu: Option<u32>,
    pub n_max: Option<usize>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub norm_tol: Option<f64>,
    pub tail_tol: Option<f64>,
    pub quadrature_tol: Option<f64>,
    pub max_step_fraction: Option<f64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub samples: Option<usize>,
    pub x0: Option<f64>,
    pub v0: Option<f64>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub r_steps: Option<usize>,
    pub model: Option<String>,
    pub fit_n_min: Option<usize>,
    pub fit_n_max: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))
    }
}

pub fn pick<T: Copy>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

pub fn pick_opt<T: Copy>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

pub fn require<T: Copy>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T, CliError> {
    flag.or(file)
        .ok_or_else(|| CliError::Usage(format!("missing required parameter --{name}")))
}

/// Resolved drive triple plus the manifest echo of how it was specified.
pub fn resolve_drive(
    h: Option<f64>,
    eps_bar: Option<f64>,
    r: Option<f64>,
    nu: Option<u32>,
    file: &FileConfig,
) -> Result<DriveParams64, CliError> {
    let h = require(h, file.h, "h")?;
    let nu = require(nu, file.nu, "nu")?;
    let eps_bar = pick_opt(eps_bar, file.eps_bar);
    let r = pick_opt(r, file.r);
    match (eps_bar, r) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give either --eps-bar or --r, not both".into(),
        )),
        (Some(e), None) => DriveParams64::new(h, e, nu).map_err(CliError::usage_from),
        (None, Some(r)) => DriveParams64::from_ratio(h, r, nu).map_err(CliError::usage_from),
        (None, None) => DriveParams64::new(h, 0.0, nu).map_err(CliError::usage_from),
    }
}

pub fn resolve_sim_config(
    abs_tol: Option<f64>,
    rel_tol: Option<f64>,
    n_max: Option<usize>,
    file: &FileConfig,
) -> Result<SimConfig64, CliError> {
    let defaults = SimConfig64::default();
    let config = SimConfig64 {
        abs_tol: pick(abs_tol, file.abs_tol, defaults.abs_tol),
        rel_tol: pick(rel_tol, file.rel_tol, defaults.rel_tol),
        max_step_fraction: file.max_step_fraction.unwrap_or(defaults.max_step_fraction),
        n_max: pick(n_max, file.n_max, defaults.n_max),
        tail_tol: file.tail_tol.unwrap_or(defaults.tail_tol),
        quadrature_tol: file.quadrature_tol.unwrap_or(defaults.quadrature_tol),
        norm_tol: file.norm_tol.unwrap_or(defaults.norm_tol),
    };
    config.validate().map_err(CliError::usage_from)?;
    Ok(config)
}

/// Manifest echo of the resolved physics and numerics parameters.
pub fn manifest_params(params: &DriveParams64, config: &SimConfig64) -> BTreeMap<String, Value> {
    let mut map = BTreeMap::new();
    map.insert("h".into(), json!(params.h()));
    map.insert("eps_bar".into(), json!(params.eps_bar()));
    map.insert("r".into(), json!(params.ratio()));
    map.insert("nu".into(), json!(params.nu()));
    map.insert("tau_final".into(), json!(params.tau_final()));
    merge_config(&mut map, config);
    map
}

pub fn merge_config(map: &mut BTreeMap<String, Value>, config: &SimConfig64) {
    map.insert("abs_tol".into(), json!(config.abs_tol));
    map.insert("rel_tol".into(), json!(config.rel_tol));
    map.insert("max_step_fraction".into(), json!(config.max_step_fraction));
    map.insert("n_max".into(), json!(config.n_max));
    map.insert("tail_tol".into(), json!(config.tail_tol));
    map.insert("quadrature_tol".into(), json!(config.quadrature_tol));
    map.insert("norm_tol".into(), json!(config.norm_tol));
}
