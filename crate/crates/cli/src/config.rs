//! Run configuration: TOML with sections, schema-validated with explicit
//! field paths, plus a documented environment-variable override layer with
//! prefix `GBCERT_`.

use gbcert_core::fock::MomentumLattice;
use gbcert_core::krein::Tolerances;
use gbcert_core::twopoint::QuadratureParams;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid config at {field}: {reason}")]
    ConfigInvalid { field: String, reason: String },
    #[error("cannot read config: {0}")]
    Unreadable(String),
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::ConfigInvalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub box_length: f64,
    pub k_max: i32,
    /// Explicit mode list; when present it overrides the cubic enumeration.
    #[serde(default)]
    pub modes: Option<Vec<[i32; 3]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockConfig {
    pub n_max: usize,
    pub dim_limit: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub tol_eq: f64,
    pub tol_null: f64,
    pub tol_obs: f64,
    pub tol_gauge: f64,
    pub loc_tol: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeConfig {
    pub lambda: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFunctionConfig {
    pub center: [f64; 4],
    pub width: f64,
    pub components: [f64; 4],
    /// Optional cosine-modulation wave vector (momentum ring).
    #[serde(default)]
    pub momentum_ring: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub directions: usize,
    pub radial_points: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub mass_step: f64,
    pub rich_tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeConfig,
    pub fock: FockConfig,
    pub tolerances: ToleranceConfig,
    pub gauge: Vec<GaugeConfig>,
    pub test_functions: Vec<TestFunctionConfig>,
    pub quadrature: QuadratureConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let mut config: RunConfig =
            toml::from_str(text).map_err(|e| ConfigError::Unreadable(e.to_string()))?;
        config.apply_env_overrides()?;
        config.validate()?;
        Ok(config)
    }

    /// Environment overrides with prefix `GBCERT_`. Supported keys:
    /// `GBCERT_FOCK_N_MAX`, `GBCERT_LATTICE_K_MAX`, and
    /// `GBCERT_TOLERANCES_<NAME>` for the five tolerance fields.
    fn apply_env_overrides(&mut self) -> Result<(), ConfigError> {
        fn parse<T: std::str::FromStr>(field: &str, raw: &str) -> Result<T, ConfigError> {
            raw.parse()
                .map_err(|_| invalid(field, format!("cannot parse override {raw:?}")))
        }
        if let Ok(raw) = std::env::var("GBCERT_FOCK_N_MAX") {
            self.fock.n_max = parse("fock.n_max", &raw)?;
        }
        if let Ok(raw) = std::env::var("GBCERT_LATTICE_K_MAX") {
            self.lattice.k_max = parse("lattice.k_max", &raw)?;
        }
        let tol_fields: [(&str, &mut f64); 5] = [
            ("TOL_EQ", &mut self.tolerances.tol_eq),
            ("TOL_NULL", &mut self.tolerances.tol_null),
            ("TOL_OBS", &mut self.tolerances.tol_obs),
            ("TOL_GAUGE", &mut self.tolerances.tol_gauge),
            ("LOC_TOL", &mut self.tolerances.loc_tol),
        ];
        for (name, slot) in tol_fields {
            if let Ok(raw) = std::env::var(format!("GBCERT_TOLERANCES_{name}")) {
                *slot = parse(&format!("tolerances.{}", name.to_lowercase()), &raw)?;
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        fn positive(x: f64) -> bool {
            x.is_finite() && x > 0.0
        }
        if !positive(self.lattice.box_length) {
            return Err(invalid("lattice.box_length", "must be positive"));
        }
        if self.lattice.k_max < 1 {
            return Err(invalid("lattice.k_max", "must be at least 1"));
        }
        if let Some(modes) = &self.lattice.modes {
            if modes.is_empty() {
                return Err(invalid("lattice.modes", "must be nonempty when given"));
            }
            if modes.iter().any(|m| *m == [0, 0, 0]) {
                return Err(invalid("lattice.modes", "the zero mode is excluded"));
            }
        }
        if self.fock.n_max < 1 {
            return Err(invalid("fock.n_max", "must be at least 1"));
        }
        if self.fock.dim_limit < 8 {
            return Err(invalid("fock.dim_limit", "too small to hold any basis"));
        }
        let tols = [
            ("tolerances.tol_eq", self.tolerances.tol_eq),
            ("tolerances.tol_null", self.tolerances.tol_null),
            ("tolerances.tol_obs", self.tolerances.tol_obs),
            ("tolerances.tol_gauge", self.tolerances.tol_gauge),
            ("tolerances.loc_tol", self.tolerances.loc_tol),
        ];
        for (field, value) in tols {
            if !positive(value) {
                return Err(invalid(field, "tolerances must be positive"));
            }
        }
        if self.gauge.is_empty() {
            return Err(invalid("gauge", "at least one gauge pair is required"));
        }
        for gp in &self.gauge {
            if (gp.lambda - 1.0).abs() < self.tolerances.tol_gauge {
                return Err(invalid(
                    "gauge.lambda",
                    format!(
                        "lambda = {} is within tol_gauge of the excluded Landau point 1",
                        gp.lambda
                    ),
                ));
            }
        }
        if self.test_functions.len() < 2 {
            return Err(invalid("test_functions", "need at least two entries"));
        }
        for tf in &self.test_functions {
            if !positive(tf.width) {
                return Err(invalid("test_functions.width", "must be positive"));
            }
        }
        let q = &self.quadrature;
        if q.directions < 2 {
            return Err(invalid("quadrature.directions", "need at least 2"));
        }
        if q.radial_points < 2 {
            return Err(invalid("quadrature.radial_points", "need at least 2"));
        }
        if !positive(q.r_min) || q.r_min >= q.r_max {
            return Err(invalid("quadrature.r_min", "need 0 < r_min < r_max"));
        }
        if !positive(q.mass_step) {
            return Err(invalid("quadrature.mass_step", "must be positive"));
        }
        if !positive(q.rich_tol) {
            return Err(invalid("quadrature.rich_tol", "must be positive"));
        }
        Ok(())
    }

    pub fn lattice(&self) -> MomentumLattice {
        match &self.lattice.modes {
            Some(modes) => MomentumLattice::from_modes(self.lattice.box_length, modes.clone())
                .expect("validated mode list"),
            None => MomentumLattice::cubic(self.lattice.box_length, self.lattice.k_max),
        }
    }

    pub fn core_tolerances(&self) -> Tolerances {
        Tolerances {
            herm: self.tolerances.tol_eq,
            eq: self.tolerances.tol_eq,
            null: self.tolerances.tol_null,
            pd: 1e-12,
        }
    }

    pub fn quadrature_params(&self) -> QuadratureParams {
        QuadratureParams {
            directions: self.quadrature.directions,
            radial_points: self.quadrature.radial_points,
            r_min: self.quadrature.r_min,
            r_max: self.quadrature.r_max,
            mass_step: self.quadrature.mass_step,
            rich_tol: self.quadrature.rich_tol,
            tol_gauge: self.tolerances.tol_gauge,
        }
    }
}
