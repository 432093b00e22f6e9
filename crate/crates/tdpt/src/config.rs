//! Experiment configuration and the built-in figure presets.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tdpt_core::forward::SourceReceiverLayout;
use tdpt_core::geometry::{make_shape, Inclusion, ShapeKind};
use tdpt_core::reconstruction::lsq::{RCOND_NOISELESS, RCOND_NOISY};
use tdpt_core::reconstruction::shape::StepRule;
use tdpt_core::reconstruction::Schedule;
use tdpt_core::tensors::{uniform_grid, FrequencySet};

use crate::error::CliError;

/// Reference shape `B` (normalized to unit area and centroid at the origin).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ShapeSpec {
    Disk,
    Ellipse { a: f64, b: f64 },
    Flower { petals: u32, amplitude: f64 },
    Kite,
}

impl ShapeSpec {
    pub fn kind(&self) -> ShapeKind {
        match *self {
            ShapeSpec::Disk => ShapeKind::Disk,
            ShapeSpec::Ellipse { a, b } => ShapeKind::Ellipse { a, b },
            ShapeSpec::Flower { petals, amplitude } => ShapeKind::Flower { petals, amplitude },
            ShapeSpec::Kite => ShapeKind::Kite,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutShape {
    Circle,
    Square,
}

/// Coincident transmitter/receiver array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutSpec {
    pub kind: LayoutShape,
    pub count: usize,
    /// Circle radius or half side of the square.
    #[serde(default = "one")]
    pub size: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            start: 0.0,
            end: 5.0,
            count: 512,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRuleSpec {
    Gradient,
    GaussNewton,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub enabled: bool,
    pub k_max: u32,
    pub iterations: usize,
    pub rel_tol: f64,
    pub nodes: usize,
    pub step_rule: StepRuleSpec,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let s = Schedule::default();
        Self {
            enabled: false,
            k_max: s.k_max,
            iterations: s.max_iterations,
            rel_tol: s.rel_tol,
            nodes: s.nodes,
            step_rule: StepRuleSpec::Gradient,
        }
    }
}

/// One experiment: inclusion, acquisition, noise, tensor order and reconstruction settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub shape: ShapeSpec,
    /// Boundary nodes of the reference shape.
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    pub eps: f64,
    pub contrast: f64,
    pub center: [f64; 2],
    pub layout: LayoutSpec,
    pub rho: f64,
    /// Positive frequency grid steps `L`; the set holds `2L` frequencies.
    pub l_count: usize,
    /// Low-frequency exclusion radius; one grid step when absent.
    #[serde(default)]
    pub rho0: Option<f64>,
    #[serde(default)]
    pub times: TimeGrid,
    #[serde(default)]
    pub noise_percent: f64,
    #[serde(default)]
    pub seed: u64,
    /// Largest recovered tensor order `n`.
    pub order: u32,
    /// SVD cutoff of the least-squares recovery; chosen from the noise level when absent.
    #[serde(default)]
    pub rcond: Option<f64>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    /// Used when the data-driven size estimate is unavailable or non-physical.
    #[serde(default)]
    pub volume_prior: Option<f64>,
    #[serde(default)]
    pub contrast_prior: Option<f64>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

fn default_nodes() -> usize {
    128
}

fn default_output() -> PathBuf {
    PathBuf::from("tdpt-output")
}

const Z1: [f64; 2] = [0.3, -0.1];
const Z2: [f64; 2] = [0.0, 0.25];

impl ExperimentConfig {
    /// Presets for the first-order TDPT reconstruction (3), its noiseless error curves (4) and
    /// the fine-shape reconstruction (5).
    pub fn paper_figure(figure: u32) -> Result<Self, CliError> {
        let base = Self {
            name: String::new(),
            shape: ShapeSpec::Flower {
                petals: 3,
                amplitude: 0.2,
            },
            nodes: default_nodes(),
            eps: 0.05,
            contrast: 3.0,
            center: Z1,
            layout: LayoutSpec {
                kind: LayoutShape::Circle,
                count: 70,
                size: 1.0,
            },
            rho: PI,
            l_count: 128,
            rho0: None,
            times: TimeGrid::default(),
            noise_percent: 20.0,
            seed: 1,
            order: 1,
            rcond: None,
            optimizer: OptimizerConfig::default(),
            volume_prior: Some(0.0025),
            contrast_prior: Some(3.0),
            output_dir: PathBuf::new(),
        };
        let cfg = match figure {
            3 => Self {
                name: "figure3".into(),
                output_dir: "tdpt-output/figure3".into(),
                ..base
            },
            4 => Self {
                name: "figure4".into(),
                shape: ShapeSpec::Kite,
                center: Z2,
                layout: LayoutSpec {
                    kind: LayoutShape::Square,
                    count: 80,
                    size: 1.0,
                },
                noise_percent: 0.0,
                output_dir: "tdpt-output/figure4".into(),
                ..base
            },
            5 => Self {
                name: "figure5".into(),
                rho: PI / 8.0,
                l_count: 32,
                order: 4,
                optimizer: OptimizerConfig {
                    enabled: true,
                    ..OptimizerConfig::default()
                },
                output_dir: "tdpt-output/figure5".into(),
                ..base
            },
            other => {
                return Err(CliError::Config(format!(
                    "no preset for figure {other}; use 3, 4 or 5"
                )))
            }
        };
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps must lie in (0, 1), got {}", self.eps));
        }
        if !(self.contrast > 0.0) || self.contrast == 1.0 {
            return bad(format!(
                "contrast must be positive and ≠ 1, got {}",
                self.contrast
            ));
        }
        if !(self.rho > 0.0) || self.rho * self.eps >= 1.0 {
            return bad(format!(
                "rho must satisfy 0 < rho < 1/eps, got {}",
                self.rho
            ));
        }
        if self.l_count == 0 {
            return bad("l_count must be positive".into());
        }
        if !(1..=6).contains(&self.order) {
            return bad(format!("order must lie in 1..=6, got {}", self.order));
        }
        if self.layout.count < 2 * self.order as usize + 1 || !(self.layout.size > 0.0) {
            return bad(format!(
                "layout needs at least {} points and a positive size",
                2 * self.order + 1
            ));
        }
        if !(self.noise_percent >= 0.0) || !self.noise_percent.is_finite() {
            return bad(format!(
                "noise_percent must be nonnegative, got {}",
                self.noise_percent
            ));
        }
        if self.times.count < 2 || !(self.times.end > self.times.start) {
            return bad("time grid needs count ≥ 2 and end > start".into());
        }
        if self.nodes < 32 || self.nodes % 2 != 0 {
            return bad(format!("nodes must be even and ≥ 32, got {}", self.nodes));
        }
        if let Some(r) = self.rho0 {
            if !(r >= 0.0 && r < self.rho) {
                return bad(format!("rho0 must lie in [0, rho), got {r}"));
            }
        }
        if self.optimizer.enabled {
            let o = &self.optimizer;
            if o.k_max < 2 || o.k_max > 2 * self.order {
                return bad(format!(
                    "optimizer.k_max must lie in 2..={}, got {}",
                    2 * self.order,
                    o.k_max
                ));
            }
            if o.nodes < 32 || o.nodes % 2 != 0 {
                return bad(format!(
                    "optimizer.nodes must be even and ≥ 32, got {}",
                    o.nodes
                ));
            }
        }
        for (name, v) in [
            ("volume_prior", self.volume_prior),
            ("contrast_prior", self.contrast_prior),
        ] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return bad(format!("{name} must be positive, got {v}"));
                }
            }
        }
        if self.contrast_prior == Some(1.0) {
            return bad("contrast_prior must differ from 1".into());
        }
        let inclusion = self.inclusion()?;
        self.layout()
            .validate(&inclusion)
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn inclusion(&self) -> Result<Inclusion, CliError> {
        let base = make_shape(self.shape.kind(), self.nodes)
            .map_err(|e| CliError::Config(e.to_string()))?;
        Inclusion::new(base, self.center, self.eps, self.contrast)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn layout(&self) -> SourceReceiverLayout {
        match self.layout.kind {
            LayoutShape::Circle => {
                SourceReceiverLayout::circle(self.layout.count, self.layout.size)
            }
            LayoutShape::Square => {
                SourceReceiverLayout::square(self.layout.count, self.layout.size)
            }
        }
    }

    pub fn frequency_set(&self) -> Result<FrequencySet, CliError> {
        let r = match self.rho0 {
            Some(r) => FrequencySet::new(self.rho, self.l_count, r),
            None => FrequencySet::with_default_exclusion(self.rho, self.l_count),
        };
        r.map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn time_grid(&self) -> Vec<f64> {
        uniform_grid(self.times.start, self.times.end, self.times.count)
    }

    pub fn rcond(&self) -> f64 {
        self.rcond.unwrap_or(if self.noise_percent > 0.0 {
            RCOND_NOISY
        } else {
            RCOND_NOISELESS
        })
    }

    pub fn schedule(&self) -> Schedule {
        let o = &self.optimizer;
        Schedule {
            k_max: o.k_max,
            max_iterations: o.iterations,
            rel_tol: o.rel_tol,
            nodes: o.nodes,
            step_rule: match o.step_rule {
                StepRuleSpec::Gradient => StepRule::Gradient,
                StepRuleSpec::GaussNewton => StepRule::GaussNewton,
            },
        }
    }
}
