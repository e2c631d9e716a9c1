//! Run configuration: a TOML file with sections, every key defaulted,
//! unknown keys rejected. Environment variables `RAREFY_<SECTION>_<KEY>`
//! (or `RAREFY_<KEY>` for top-level keys) override file values.

use std::fmt;
use std::path::Path;

use rarefy_core::harness::{Schedule, ScheduleMode, SweepSpec};
use rarefy_core::solver::{ConvectiveFlux, Limiter, SolverConfig, TimeIntegrator};
use rarefy_core::{GasModel, PrimitiveState, WaveSetup};
use serde::{Deserialize, Serialize};

pub const ENV_PREFIX: &str = "RAREFY_";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub out_dir: String,
    /// Sweep worker budget; 0 means one per available core.
    pub workers: usize,
    pub seed: u64,
    pub gas: GasSection,
    pub right: RightSection,
    pub schedule: ScheduleSection,
    pub solver: SolverSection,
    pub wave: WaveSection,
    pub profile: ProfileSection,
    pub simulate: SimulateSection,
    pub sweep: SweepSection,
    pub verify: VerifySection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GasSection {
    pub gamma: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RightSection {
    pub rho: f64,
    pub u: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    Practical,
    PaperAsymptotic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleSection {
    pub mode: ScheduleKind,
    /// Exponent of the practical schedule `nu = delta = eps^b`.
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FluxKind {
    Rusanov,
    Hll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimiterKind {
    Minmod,
    VanLeer,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegratorKind {
    SspRk2,
    SplitRkl2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub cfl: f64,
    pub visc_safety: f64,
    pub flux: FluxKind,
    pub limiter: LimiterKind,
    /// Integrator for `simulate`; sweeps use `sweep.integrator`.
    pub integrator: IntegratorKind,
    /// Fan edges stay this fraction of the domain width from the boundaries.
    pub domain_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveSection {
    pub nu: f64,
    pub xi_min: f64,
    pub xi_max: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileSection {
    pub nu: f64,
    pub delta: f64,
    pub t: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub samples: usize,
    pub selfcheck: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub eps: f64,
    pub n_cells: usize,
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub eps: Vec<f64>,
    pub cells_per_eps: f64,
    pub t_min: f64,
    pub measure_times: Vec<f64>,
    pub error_margin: f64,
    pub apriori_factor: f64,
    pub integrator: IntegratorKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    /// Random states for the invariant checks.
    pub states: usize,
    /// Random queries of the characteristic solve.
    pub burgers_queries: usize,
    /// Also run the solver verification (about ten seconds).
    pub solver: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            out_dir: "out".into(),
            workers: 0,
            seed: 20240917,
            gas: GasSection::default(),
            right: RightSection::default(),
            schedule: ScheduleSection::default(),
            solver: SolverSection::default(),
            wave: WaveSection::default(),
            profile: ProfileSection::default(),
            simulate: SimulateSection::default(),
            sweep: SweepSection::default(),
            verify: VerifySection::default(),
        }
    }
}

impl Default for GasSection {
    fn default() -> Self {
        Self {
            gamma: 1.4,
            alpha: 0.5,
        }
    }
}

impl Default for RightSection {
    fn default() -> Self {
        Self {
            rho: 1.0,
            u: 0.0,
            theta: 1.0,
        }
    }
}

impl Default for ScheduleSection {
    fn default() -> Self {
        Self {
            mode: ScheduleKind::Practical,
            b: 1.0 / 3.0,
        }
    }
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverConfig::default();
        Self {
            cfl: s.cfl,
            visc_safety: s.visc_safety,
            flux: FluxKind::Rusanov,
            limiter: LimiterKind::Minmod,
            integrator: IntegratorKind::SspRk2,
            domain_margin: 0.1,
        }
    }
}

impl Default for WaveSection {
    fn default() -> Self {
        Self {
            nu: 0.1,
            xi_min: -5.0,
            xi_max: 2.0,
            samples: 701,
        }
    }
}

impl Default for ProfileSection {
    fn default() -> Self {
        Self {
            nu: 0.1,
            delta: 0.1,
            t: 1.0,
            x_min: -5.0,
            x_max: 2.0,
            samples: 701,
            selfcheck: true,
        }
    }
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self {
            eps: 1e-2,
            n_cells: 2000,
            t_end: 1.0,
            snapshot_times: vec![0.5],
        }
    }
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            eps: vec![8e-3, 4e-3, 2e-3, 1e-3],
            cells_per_eps: 8.0,
            t_min: 0.5,
            measure_times: vec![0.5, 0.75, 1.0],
            error_margin: 0.05,
            apriori_factor: 10.0,
            integrator: IntegratorKind::SplitRkl2,
        }
    }
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            states: 100,
            burgers_queries: 1_000_000,
            solver: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<rarefy_core::Error> for ConfigError {
    fn from(e: rarefy_core::Error) -> Self {
        ConfigError(e.to_string())
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(format!("config: {}", e.message().trim())))
    }

    /// Reads `path` (defaults when `None`), then applies environment overrides.
    pub fn load(
        path: Option<&Path>,
        env: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self, ConfigError> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| ConfigError(format!("{}: {e}", p.display())))?,
            None => String::new(),
        };
        let cfg = Self::from_toml_str(&text)?;
        let cfg = cfg.with_env(env)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies `RAREFY_*` overrides. Values are parsed as TOML literals
    /// (`1e-3`, `[0.5, 1.0]`, `true`) and fall back to plain strings.
    pub fn with_env(
        self,
        env: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self, ConfigError> {
        let mut overrides: Vec<(String, String)> = env
            .into_iter()
            .filter(|(k, _)| k.starts_with(ENV_PREFIX))
            .collect();
        if overrides.is_empty() {
            return Ok(self);
        }
        overrides.sort();
        let mut table = toml::Table::try_from(&self).map_err(|e| ConfigError(e.to_string()))?;
        for (key, raw) in overrides {
            let path = key[ENV_PREFIX.len()..].to_ascii_lowercase();
            let slot = locate(&mut table, &path)
                .ok_or_else(|| ConfigError(format!("unknown environment override {key}")))?;
            *slot = parse_literal(&raw);
        }
        table.try_into().map_err(|e: toml::de::Error| {
            ConfigError(format!("environment override: {}", e.message().trim()))
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.gas_model()?;
        self.setup()?;
        self.schedule()?;
        self.solver_config(IntegratorKind::SspRk2).validate()?;
        Ok(())
    }

    pub fn gas_model(&self) -> Result<GasModel, ConfigError> {
        GasModel::new(self.gas.gamma, self.gas.alpha).map_err(|e| ConfigError(format!("gas: {e}")))
    }

    pub fn setup(&self) -> Result<WaveSetup, ConfigError> {
        let right = PrimitiveState::new(self.right.rho, self.right.u, self.right.theta);
        WaveSetup::new(self.gas_model()?, right).map_err(|e| ConfigError(format!("right: {e}")))
    }

    pub fn schedule(&self) -> Result<Schedule, ConfigError> {
        let mode = match self.schedule.mode {
            ScheduleKind::Practical => ScheduleMode::Practical { b: self.schedule.b },
            ScheduleKind::PaperAsymptotic => ScheduleMode::PaperAsymptotic,
        };
        Schedule::for_gas(&self.gas_model()?, mode)
            .map_err(|e| ConfigError(format!("schedule: {e}")))
    }

    pub fn solver_config(&self, integrator: IntegratorKind) -> SolverConfig {
        SolverConfig {
            cfl: self.solver.cfl,
            visc_safety: self.solver.visc_safety,
            flux: match self.solver.flux {
                FluxKind::Rusanov => ConvectiveFlux::Rusanov,
                FluxKind::Hll => ConvectiveFlux::Hll,
            },
            limiter: match self.solver.limiter {
                LimiterKind::Minmod => Limiter::Minmod,
                LimiterKind::VanLeer => Limiter::VanLeer,
                LimiterKind::Mc => Limiter::MonotonizedCentral,
            },
            integrator: match integrator {
                IntegratorKind::SspRk2 => TimeIntegrator::SspRk2,
                IntegratorKind::SplitRkl2 => TimeIntegrator::SplitRkl2,
            },
            ..SolverConfig::default()
        }
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec, ConfigError> {
        let mut spec = SweepSpec::new(self.setup()?, self.schedule()?);
        spec.cells_per_eps = self.sweep.cells_per_eps;
        spec.domain_margin = self.solver.domain_margin;
        spec.error_margin = self.sweep.error_margin;
        spec.t_min = self.sweep.t_min;
        spec.measure_times = self.sweep.measure_times.clone();
        spec.apriori_factor = self.sweep.apriori_factor;
        spec.solver = self.solver_config(self.sweep.integrator);
        spec.validate()
            .map_err(|e| ConfigError(format!("sweep: {e}")))?;
        Ok(spec)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

/// Finds the value addressed by `section_key` (or a top-level `key`). Keys
/// themselves may contain underscores, so every split point is tried.
fn locate<'a>(table: &'a mut toml::Table, path: &str) -> Option<&'a mut toml::Value> {
    if table.contains_key(path) && !table[path].is_table() {
        return table.get_mut(path);
    }
    let split = path
        .match_indices('_')
        .map(|(i, _)| i)
        .find(|&i| matches!(table.get(&path[..i]), Some(toml::Value::Table(t)) if t.contains_key(&path[i + 1..])))?;
    match table.get_mut(&path[..split]) {
        Some(toml::Value::Table(t)) => t.get_mut(&path[split + 1..]),
        _ => None,
    }
}

fn parse_literal(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&doc) {
        Ok(mut t) => t
            .remove("v")
            .unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::from_toml_str("").unwrap(), RunConfig::default());
        assert!(RunConfig::default().validate().is_ok());
    }

    #[test]
    fn sections_parse() {
        let c = RunConfig::from_toml_str(
            "workers = 2\n[gas]\ngamma = 2.0\nalpha = 1.0\n[solver]\nlimiter = \"van-leer\"\nflux = \"hll\"\n[sweep]\neps = [1e-2]\n",
        )
        .unwrap();
        assert_eq!(c.workers, 2);
        assert_eq!(c.gas.gamma, 2.0);
        assert_eq!(c.solver.limiter, LimiterKind::VanLeer);
        assert_eq!(c.sweep.eps, vec![1e-2]);
        assert_eq!(c.right, RightSection::default());
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let e = RunConfig::from_toml_str("[gas]\ngama = 2.0\n").unwrap_err();
        assert!(e.0.contains("gama"), "{e}");
        let e = RunConfig::from_toml_str("[solvr]\n").unwrap_err();
        assert!(e.0.contains("solvr"), "{e}");
    }

    #[test]
    fn env_overrides() {
        let env = vec![
            ("RAREFY_GAS_GAMMA".to_string(), "1.6".to_string()),
            ("RAREFY_SWEEP_EPS".to_string(), "[4e-3, 2e-3]".to_string()),
            ("RAREFY_SWEEP_CELLS_PER_EPS".to_string(), "4".to_string()),
            ("RAREFY_OUT_DIR".to_string(), "results".to_string()),
            (
                "RAREFY_SCHEDULE_MODE".to_string(),
                "paper-asymptotic".to_string(),
            ),
            ("OTHER".to_string(), "ignored".to_string()),
        ];
        let c = RunConfig::default().with_env(env).unwrap();
        assert_eq!(c.gas.gamma, 1.6);
        assert_eq!(c.sweep.eps, vec![4e-3, 2e-3]);
        assert_eq!(c.sweep.cells_per_eps, 4.0);
        assert_eq!(c.out_dir, "results");
        assert_eq!(c.schedule.mode, ScheduleKind::PaperAsymptotic);
        let e = RunConfig::default()
            .with_env(vec![("RAREFY_GAS_BETA".to_string(), "1".to_string())])
            .unwrap_err();
        assert!(e.0.contains("RAREFY_GAS_BETA"));
    }

    #[test]
    fn invalid_values_name_the_section() {
        let e = RunConfig::load(
            None,
            vec![("RAREFY_GAS_GAMMA".to_string(), "0.9".to_string())],
        )
        .unwrap_err();
        assert!(e.0.starts_with("gas"), "{e}");
    }

    #[test]
    fn round_trips_through_toml() {
        let c = RunConfig::default();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), c);
    }
}
