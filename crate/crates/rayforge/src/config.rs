//! Run configuration: embedded defaults, optional JSON file, then flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use rayforge_core::certificates::{ExpansivityConfig, ExternalConstants, RigidityConfig};
use rayforge_core::clusters::{GridConfig, EPS_POT};
use rayforge_core::{RayConfig, SolveConfig};

use crate::error::{CliError, CliResult};

pub const CONFIG_ENV: &str = "RAYFORGE_CONFIG";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub beta: f64,
    pub m_rho: f64,
    pub a: f64,
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tol: f64,
    pub ray_tol: f64,
    pub eps_pot: f64,
    pub eps_sv: f64,
    pub r_big: f64,
    pub cert_depth: usize,
    pub max_iter: usize,
    pub newton_budget: usize,
    pub rigidity_resolution: usize,
    pub all_pairs: bool,
    pub expansivity_steps: usize,
    pub c_exp: Option<f64>,
    pub c_log: Option<f64>,
    /// Enables the separation and clusters-inside checks (and the homotopy
    /// check when word lengths are given).
    pub constants: Option<Constants>,
    /// Directory for outputs when a command gets no `--out`.
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let solve = SolveConfig::default();
        let ray = RayConfig::default();
        RunConfig {
            tol: solve.tol,
            ray_tol: ray.tol,
            eps_pot: EPS_POT,
            eps_sv: solve.eps_sv,
            r_big: ray.r_big,
            cert_depth: solve.cert_depth,
            max_iter: solve.max_iter,
            newton_budget: solve.newton_budget,
            rigidity_resolution: RigidityConfig::default().resolution,
            all_pairs: false,
            expansivity_steps: ExpansivityConfig::default().steps,
            c_exp: None,
            c_log: None,
            constants: None,
            out_dir: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_owned(), source })?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| CliError::parse(path.display().to_string(), e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let positive = [
            ("tol", self.tol),
            ("ray_tol", self.ray_tol),
            ("eps_pot", self.eps_pot),
            ("eps_sv", self.eps_sv),
            ("r_big", self.r_big),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{name} must be positive and finite (got {v})")));
            }
        }
        let budgets = [
            ("max_iter", self.max_iter),
            ("newton_budget", self.newton_budget),
            ("rigidity_resolution", self.rigidity_resolution),
            ("expansivity_steps", self.expansivity_steps),
        ];
        for (name, v) in budgets {
            if v < 1 {
                return Err(CliError::Config(format!("{name} must be at least 1")));
            }
        }
        for (name, v) in [("c_exp", self.c_exp), ("c_log", self.c_log)] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return Err(CliError::Config(format!("{name} must be positive (got {v})")));
                }
            }
        }
        if let Some(k) = &self.constants {
            if !(k.beta > 0.0 && k.m_rho > 0.0 && k.a > 0.0 && k.c > 0.0) {
                return Err(CliError::Config("condition constants must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn ray(&self) -> RayConfig {
        RayConfig { tol: self.ray_tol, r_big: self.r_big }
    }

    pub fn grid(&self) -> GridConfig {
        GridConfig { ray: self.ray(), eps_pot: self.eps_pot }
    }

    pub fn solve(&self) -> SolveConfig {
        SolveConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            newton_budget: self.newton_budget,
            eps_sv: self.eps_sv,
            cert_depth: self.cert_depth,
            ray: self.ray(),
        }
    }

    pub fn rigidity(&self) -> RigidityConfig {
        RigidityConfig { resolution: self.rigidity_resolution, all_pairs: self.all_pairs }
    }

    pub fn external(&self) -> Option<ExternalConstants> {
        self.constants.as_ref().map(|k| ExternalConstants { beta: k.beta, m_rho: k.m_rho, a: k.a, c: k.c })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
