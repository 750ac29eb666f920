use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use spinamp::{
    CouplingModel, ExpParams, KickConvention, MapOrder, MapParams, Mode, ProtocolSpec, Scheme,
    TargetState,
};

use crate::error::CliError;

pub const OUT_DIR_ENV: &str = "SPINAMP_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "spinamp-out";

/// Everything needed to reproduce a run or a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scheme: Scheme,
    /// One size for `run`, any number for `sweep`.
    pub n: Vec<usize>,
    pub target: TargetState,
    pub mode: Mode,
    pub first_spin: usize,
    /// `t·b₁₂`.
    pub t_pert: f64,
    /// `T·b₁₂`.
    pub t_free: f64,
    pub r_max: usize,
    pub b0: f64,
    /// `None` keeps nearest-neighbour couplings only.
    pub decay_exponent: Option<f64>,
    pub map_order: MapOrder,
    pub kick_convention: KickConvention,
    pub threshold: f64,
    pub exp: ExpParams,
    pub output_dir: Option<PathBuf>,
    /// File stem of every artifact.
    pub name: Option<String>,
    pub plot: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::RandomMap,
            n: vec![6],
            target: TargetState::One,
            mode: Mode::Reduced,
            first_spin: 0,
            t_pert: MapParams::DEFAULT_T_PERT,
            t_free: MapParams::DEFAULT_T_FREE,
            r_max: 300,
            b0: 1.0,
            decay_exponent: Some(3.0),
            map_order: MapOrder::DipolarFirst,
            kick_convention: KickConvention::PauliSum,
            threshold: 0.9,
            exp: ExpParams::default(),
            output_dir: None,
            name: None,
            plot: false,
        }
    }
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{field}: {msg}"))
}

impl RunConfig {
    pub fn validate(&self, sweep: bool) -> Result<(), CliError> {
        if self.n.is_empty() {
            return Err(invalid("n", "at least one size is required"));
        }
        if !sweep && self.n.len() != 1 {
            return Err(invalid(
                "n",
                "run takes a single size; use sweep for several",
            ));
        }
        if sweep && self.scheme != Scheme::RandomMap {
            return Err(invalid("scheme", "sweep only supports random-map"));
        }
        for spec in self.specs() {
            spec.validate().map_err(|e| invalid("n", e))?;
        }
        if self.scheme == Scheme::RandomMap {
            if !self.threshold.is_finite() {
                return Err(invalid("threshold", "must be finite"));
            }
            if self.r_max == 0 {
                return Err(invalid("r_max", "must be at least 1"));
            }
            for (field, t) in [("t_pert", self.t_pert), ("t_free", self.t_free)] {
                if !t.is_finite() {
                    return Err(invalid(field, "must be finite"));
                }
            }
            if !self.b0.is_finite() || self.b0 == 0.0 {
                return Err(invalid("b0", "must be finite and nonzero"));
            }
            if let Some(p) = self.decay_exponent {
                if p.is_nan() || p < 0.0 {
                    return Err(invalid("decay_exponent", "must be non-negative"));
                }
            }
            for &n in &self.n {
                self.map_params(n)?
                    .validate(n)
                    .map_err(|e| invalid("couplings", e))?;
            }
        }
        self.exp.validate().map_err(|e| invalid("exp", e))?;
        if let Some(name) = &self.name {
            if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
                return Err(invalid("name", "must be a plain file stem"));
            }
        }
        // the dense backend needs the whole register below the cap
        if self.exp.method == spinamp::ExpMethod::DenseEig {
            let cap = self.exp.dense_cap;
            for spec in self.specs() {
                let dim = 1usize << spec.n_total();
                if dim > cap {
                    return Err(invalid(
                        "exp.dense_cap",
                        format!("dimension {dim} exceeds the dense cap {cap}"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn specs(&self) -> Vec<ProtocolSpec> {
        self.n
            .iter()
            .map(|&n| ProtocolSpec {
                first_spin: self.first_spin,
                ..ProtocolSpec::new(self.scheme, n, self.target, self.mode)
            })
            .collect()
    }

    pub fn couplings(&self, n: usize) -> Result<CouplingModel, CliError> {
        let c = match self.decay_exponent {
            Some(p) => CouplingModel::linear_chain(n, self.b0, p),
            None => CouplingModel::nearest_neighbor(n, self.b0),
        };
        c.map_err(|e| invalid("decay_exponent", e))
    }

    pub fn map_params(&self, n: usize) -> Result<MapParams, CliError> {
        Ok(MapParams {
            t_pert: self.t_pert,
            t_free: self.t_free,
            r_max: self.r_max,
            couplings: self.couplings(n)?,
            map_order: self.map_order,
            kick_convention: self.kick_convention,
        })
    }

    pub fn stem(&self, sweep: bool) -> String {
        if let Some(name) = &self.name {
            return name.clone();
        }
        if sweep {
            format!("sweep-{}", self.scheme.name())
        } else {
            format!("{}-n{}", self.scheme.name(), self.n[0])
        }
    }

    /// Explicit directory, then the environment, then the built-in default.
    pub fn resolve_output_dir(&mut self) {
        if self.output_dir.is_none() {
            self.output_dir = Some(
                std::env::var_os(OUT_DIR_ENV)
                    .filter(|v| !v.is_empty())
                    .map(PathBuf::from)
                    .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
            );
        }
    }

    /// Reads a bare config or the `config` member of a metadata file.
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))?;
        let inner = match value.get("config") {
            Some(c) if value.get("version").is_some() => c.clone(),
            _ => value,
        };
        serde_json::from_value(inner)
            .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }
}
