//! Run configuration: one JSON document shared by every subcommand.
//!
//! Missing sections and fields fall back to the defaults below; unknown keys
//! are rejected. Serializing a parsed configuration yields the fully
//! resolved document, which parses back to the identical configuration, so
//! emitted metadata can be replayed as-is.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::floquet::AxisSpec;
use crate::ode::{ForcingSeries, IntegrationMethod, ModelParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub forcing: ForcingConfig,
    pub integrator: IntegratorConfig,
    pub quad_points: QuadPoints,
    pub bifurcation: BifurcationConfig,
    pub shoot: ShootConfig,
    pub converge: ConvergeConfig,
    pub chart: ChartConfig,
    pub transition: TransitionConfig,
    pub slowflow: SlowflowConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QuadPoints(pub usize);

impl Default for QuadPoints {
    fn default() -> Self {
        QuadPoints(crate::averaging::DEFAULT_QUAD_POINTS)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub omega_n: f64,
    pub omega_p: f64,
    pub epsilon: f64,
    pub alpha: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            omega_n: 1.0,
            omega_p: 1.0,
            epsilon: 0.01,
            alpha: 1.0,
        }
    }
}

impl ModelConfig {
    pub fn build(&self) -> Result<ModelParams, Error> {
        ModelParams::new(self.omega_n, self.omega_p, self.epsilon, self.alpha)
    }

    pub fn require_resonant(&self) -> Result<ModelParams, Error> {
        let p = self.build()?;
        if !p.is_resonant() {
            return Err(Error::InvalidParameter(format!(
                "this command needs resonant parameters (omega_n == omega_p), got {} and {}",
                self.omega_n, self.omega_p
            )));
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForcingConfig {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl Default for ForcingConfig {
    fn default() -> Self {
        Self {
            a: vec![1.0],
            b: vec![],
        }
    }
}

impl ForcingConfig {
    pub fn build(&self) -> ForcingSeries {
        ForcingSeries::new(self.a.clone(), self.b.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegratorMode {
    Fixed,
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub tol: f64,
    pub steps_per_period: usize,
    /// Monodromy mode for chart sweeps and boundary bisection.
    pub mode: IntegratorMode,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            tol: crate::ode::DEFAULT_TOL,
            steps_per_period: crate::ode::DEFAULT_STEPS_PER_PERIOD,
            mode: IntegratorMode::Fixed,
        }
    }
}

impl IntegratorConfig {
    /// Monodromy method after applying the global `--fixed-step` override.
    pub fn monodromy_method(&self, force_fixed: bool) -> IntegrationMethod {
        match (self.mode, force_fixed) {
            (IntegratorMode::Adaptive, false) => IntegrationMethod::Adaptive { tol: self.tol },
            _ => IntegrationMethod::FixedStep {
                steps_per_period: self.steps_per_period,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisConfig {
    pub fn build(&self) -> Result<AxisSpec, Error> {
        AxisSpec::new(self.min, self.max, self.count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BifurcationConfig {
    pub x0: AxisConfig,
    pub y0: AxisConfig,
}

impl Default for BifurcationConfig {
    fn default() -> Self {
        Self {
            x0: AxisConfig {
                min: -1.5,
                max: 1.5,
                count: 21,
            },
            y0: AxisConfig {
                min: -1.5,
                max: 1.5,
                count: 21,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShootConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Starting point; the averaging prediction when absent.
    pub z_init: Option<[f64; 2]>,
}

impl Default for ShootConfig {
    fn default() -> Self {
        Self {
            tol: crate::orbit::DEFAULT_SHOOT_TOL,
            max_iter: crate::orbit::DEFAULT_SHOOT_MAX_ITER,
            z_init: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergeConfig {
    pub eps_list: Vec<f64>,
    pub tol: f64,
}

impl Default for ConvergeConfig {
    fn default() -> Self {
        Self {
            eps_list: vec![1e-2, 5e-3, 2.5e-3],
            tol: crate::orbit::DEFAULT_SHOOT_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChartConfig {
    pub delta: AxisConfig,
    pub epsilon: AxisConfig,
    pub margin: f64,
}

impl Default for ChartConfig {
    fn default() -> Self {
        Self {
            delta: AxisConfig {
                min: 0.0,
                max: 2.5,
                count: 101,
            },
            epsilon: AxisConfig {
                min: 0.0,
                max: 0.5,
                count: 21,
            },
            margin: crate::floquet::DEFAULT_MARGIN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransitionConfig {
    pub eps_values: Vec<f64>,
    /// Also locate the boundaries numerically by bisection.
    pub bisect: bool,
    pub bisect_tol: f64,
}

impl Default for TransitionConfig {
    fn default() -> Self {
        Self {
            eps_values: vec![0.0, 0.05, 0.1, 0.15, 0.2],
            bisect: true,
            bisect_tol: crate::floquet::DEFAULT_BISECT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlowflowConfig {
    pub omega_1: f64,
    /// Detuning sweep for bifurcation events.
    pub sweep: Option<AxisConfig>,
    /// Optional slow-flow trajectory exported as CSV.
    pub trajectory: Option<TrajectoryConfig>,
}

impl Default for SlowflowConfig {
    fn default() -> Self {
        Self {
            omega_1: 1.0,
            sweep: Some(AxisConfig {
                min: -1.0,
                max: 1.0,
                count: 41,
            }),
            trajectory: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectoryConfig {
    pub m0: f64,
    pub n0: f64,
    pub t1_max: f64,
    pub samples: usize,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self {
            m0: 0.5,
            n0: 0.0,
            t1_max: 50.0,
            samples: 500,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("config parse error: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_resolves_to_defaults() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.model.omega_n, 1.0);
        assert_eq!(cfg.quad_points.0, 2048);
        assert_eq!(cfg.chart.delta.count, 101);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_json(r#"{"modle": {}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"model": {"omega": 1.0}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"shoot": {"tolerance": 1e-10}}"#).is_err());
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = RunConfig::from_json(r#"{"model": {"epsilon": 0.02}, "quad_points": 512}"#)
            .unwrap();
        let echoed = serde_json::to_string(&cfg).unwrap();
        let back = RunConfig::from_json(&echoed).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(back.model.epsilon, 0.02);
        assert_eq!(back.quad_points.0, 512);
    }

    #[test]
    fn resonance_guard() {
        let cfg = RunConfig::from_json(r#"{"model": {"omega_p": 2.0}}"#).unwrap();
        assert!(cfg.model.build().is_ok());
        assert!(matches!(
            cfg.model.require_resonant(),
            Err(Error::InvalidParameter(_))
        ));
    }
}
