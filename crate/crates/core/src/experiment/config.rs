//! Scenario files.
//!
//! A scenario is a TOML document with one table per module plus a list of
//! `[[policy]]` entries:
//!
//! ```toml
//! name = "single_tier"
//!
//! [deployment]
//! model = "ppp"
//! lambda = 50.0
//!
//! [window]
//! inner_side = 3.0
//! guard = 1.5
//!
//! [run]
//! replications = 100
//! master_seed = 7
//! velocities = [0.0, 50.0, 100.0]
//!
//! [[policy]]
//! kind = "best_connected"
//!
//! [[policy]]
//! kind = "location_aware"
//! ic = true
//! location_threshold = { per_sqrt_lambda = 0.5 }
//! ```
//!
//! Omitted tables take the defaults of the corresponding `Default` impls.
//! Command-line flags (`--seed`, `--replications`) override file values.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{PcpParams, Window};
use crate::metrics::from_db;
use crate::mobility::WalkParams;
use crate::policy::{PolicyConfig, PolicyKind};

/// A threshold either in absolute units or scaled by the network intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    /// km for distances, km² for areas.
    Absolute(f64),
    /// `c / lambda`.
    PerLambda(f64),
    /// `c / sqrt(lambda)`.
    PerSqrtLambda(f64),
}

impl Threshold {
    pub fn resolve(self, lambda: f64) -> f64 {
        match self {
            Threshold::Absolute(x) => x,
            Threshold::PerLambda(c) => c / lambda,
            Threshold::PerSqrtLambda(c) => c / lambda.sqrt(),
        }
    }

    pub fn constant(self) -> f64 {
        match self {
            Threshold::Absolute(x) | Threshold::PerLambda(x) | Threshold::PerSqrtLambda(x) => x,
        }
    }

    /// Same unit, different constant.
    pub fn with_constant(self, c: f64) -> Self {
        match self {
            Threshold::Absolute(_) => Threshold::Absolute(c),
            Threshold::PerLambda(_) => Threshold::PerLambda(c),
            Threshold::PerSqrtLambda(_) => Threshold::PerSqrtLambda(c),
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Threshold::Absolute(_) => "absolute",
            Threshold::PerLambda(_) => "per_lambda",
            Threshold::PerSqrtLambda(_) => "per_sqrt_lambda",
        }
    }
}

fn one() -> f64 {
    1.0
}

fn four() -> f64 {
    4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum DeploymentConfig {
    Ppp {
        /// BS/km²
        lambda: f64,
        #[serde(default = "one")]
        power: f64,
        #[serde(default = "four")]
        path_loss_exp: f64,
    },
    Matern {
        lambda_p: f64,
        /// mean daughters per cluster
        lambda_c: f64,
        /// km
        radius: f64,
        #[serde(default = "one")]
        p1: f64,
        p2: f64,
        #[serde(default = "four")]
        eta1: f64,
        #[serde(default = "four")]
        eta2: f64,
    },
}

impl DeploymentConfig {
    /// Intensity used to scale thresholds and walk steps (λ or λ′).
    pub fn intensity(&self) -> f64 {
        match *self {
            DeploymentConfig::Ppp { lambda, .. } => lambda,
            DeploymentConfig::Matern { lambda_p, lambda_c, .. } => lambda_p * lambda_c + lambda_p,
        }
    }

    pub fn pcp_params(&self) -> Option<PcpParams> {
        match *self {
            DeploymentConfig::Ppp { .. } => None,
            DeploymentConfig::Matern {
                lambda_p,
                lambda_c,
                radius,
                p1,
                p2,
                eta1,
                eta2,
            } => Some(PcpParams {
                lambda_p,
                lambda_c,
                radius,
                p1,
                p2,
                eta1,
                eta2,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowConfig {
    /// Side of the square measurement region, km.
    pub inner_side: f64,
    /// Guard band around it, km. Defaults to `5 / sqrt(intensity)`.
    pub guard: Option<f64>,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            inner_side: 3.0,
            guard: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub noise_power: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MobilityConfig {
    /// km per replication
    pub trajectory_length: f64,
    /// Walk step and bisection tolerance, km; derived from the intensity when absent.
    pub step: Option<f64>,
    pub tol: Option<f64>,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        MobilityConfig {
            trajectory_length: 2.0,
            step: None,
            tol: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub samples_per_km: usize,
    pub cell_area_probes: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            samples_per_km: 1000,
            cell_area_probes: crate::policy::DEFAULT_AREA_PROBES,
        }
    }
}

fn default_thresholds_db() -> Vec<f64> {
    (-10..=20).step_by(2).map(f64::from).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub replications: usize,
    pub master_seed: u64,
    /// km/h
    #[serde(default)]
    pub velocities: Vec<f64>,
    /// s
    #[serde(default = "one")]
    pub ho_delay: f64,
    /// Hz
    #[serde(default = "default_bandwidth")]
    pub bandwidth: f64,
    #[serde(default = "default_thresholds_db")]
    pub coverage_thresholds_db: Vec<f64>,
    #[serde(default = "default_max_resamples")]
    pub max_resamples: usize,
    /// Worker threads; all available cores when absent.
    #[serde(default)]
    pub threads: Option<usize>,
}

fn default_bandwidth() -> f64 {
    10e6
}

fn default_max_resamples() -> usize {
    100
}

/// One `[[policy]]` entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    /// Output directory name; derived from kind and flags when absent.
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub location_threshold: Option<Threshold>,
    #[serde(default)]
    pub size_threshold: Option<Threshold>,
    #[serde(default)]
    pub ic: bool,
    #[serde(default)]
    pub comp: bool,
}

impl PolicySpec {
    pub fn new(kind: PolicyKind) -> Self {
        PolicySpec {
            kind,
            label: None,
            location_threshold: None,
            size_threshold: None,
            ic: false,
            comp: false,
        }
    }

    pub fn ic(mut self, ic: bool) -> Self {
        self.ic = ic;
        self
    }

    pub fn comp(mut self, comp: bool) -> Self {
        self.comp = comp;
        self
    }

    pub fn location(mut self, t: Threshold) -> Self {
        self.location_threshold = Some(t);
        self
    }

    pub fn size(mut self, t: Threshold) -> Self {
        self.size_threshold = Some(t);
        self
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        let mut s = self.kind.short().to_string();
        if self.kind != PolicyKind::BestConnected {
            if self.comp {
                s.push_str("_comp");
            }
            if self.ic {
                s.push_str("_ic");
            }
        }
        s
    }

    /// Absolute-unit policy for a network of the given intensity.
    pub fn resolve(&self, lambda: f64) -> PolicyConfig {
        PolicyConfig {
            kind: self.kind,
            location_threshold: self.location_threshold.map(|t| t.resolve(lambda)),
            size_threshold: self.size_threshold.map(|t| t.resolve(lambda)),
            comp: self.comp && self.kind != PolicyKind::BestConnected,
            ic: self.ic && self.kind != PolicyKind::BestConnected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub deployment: DeploymentConfig,
    #[serde(default)]
    pub window: WindowConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default)]
    pub mobility: MobilityConfig,
    #[serde(default)]
    pub sampling: SamplingConfig,
    pub run: RunConfig,
    #[serde(rename = "policy", default)]
    pub policies: Vec<PolicySpec>,
}

fn check(ok: bool, field: &str, reason: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(field, reason))
    }
}

fn positive(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| {
            let msg = e.message();
            let missing = msg.strip_prefix("missing field `").and_then(|m| m.split('`').next());
            let spanned = e.span().map(|r| text[r].lines().next().unwrap_or("").trim().to_string());
            let field = match (missing, spanned) {
                (Some(m), _) => m.to_string(),
                (None, Some(t)) if !t.is_empty() => t,
                _ => "<document>".into(),
            };
            Error::config(field, msg.to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config serializes")
    }

    /// SHA-256 of the canonical TOML rendering, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn intensity(&self) -> f64 {
        self.deployment.intensity()
    }

    pub fn window(&self) -> Result<Window> {
        let guard = self.window.guard.unwrap_or(5.0 / self.intensity().sqrt());
        Window::around_square(self.window.inner_side, guard).map_err(|e| Error::config("window", e.to_string()))
    }

    pub fn walk(&self) -> WalkParams {
        let auto = WalkParams::for_intensity(self.intensity());
        WalkParams {
            step: self.mobility.step.unwrap_or(auto.step),
            tol: self.mobility.tol.unwrap_or(auto.tol),
        }
    }

    pub fn samples_per_replication(&self) -> usize {
        ((self.sampling.samples_per_km as f64 * self.mobility.trajectory_length).ceil() as usize).max(1)
    }

    /// Coverage thresholds in linear scale.
    pub fn coverage_thresholds(&self) -> Vec<f64> {
        self.run.coverage_thresholds_db.iter().map(|&t| from_db(t)).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.policies.iter().map(PolicySpec::label).collect()
    }

    pub fn validate(&self) -> Result<()> {
        check(!self.name.is_empty(), "name", "must not be empty")?;
        check(
            self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'),
            "name",
            "use letters, digits, `_` or `-`",
        )?;
        match self.deployment {
            DeploymentConfig::Ppp {
                lambda,
                power,
                path_loss_exp,
            } => {
                check(positive(lambda), "deployment.lambda", "must be positive")?;
                check(positive(power), "deployment.power", "must be positive")?;
                check(path_loss_exp > 2.0, "deployment.path_loss_exp", "must exceed 2")?;
            }
            DeploymentConfig::Matern { .. } => {
                let p = self.deployment.pcp_params().expect("matern");
                p.validate().map_err(|e| match e {
                    Error::InvalidParameter { name, reason } => Error::config(format!("deployment.{name}"), reason),
                    other => Error::config("deployment", other.to_string()),
                })?;
            }
        }
        check(positive(self.window.inner_side), "window.inner_side", "must be positive")?;
        if let Some(g) = self.window.guard {
            check(g >= 0.0 && g.is_finite(), "window.guard", "must be non-negative")?;
        }
        self.window()?;
        check(self.channel.noise_power >= 0.0, "channel.noise_power", "must be non-negative")?;
        let len = self.mobility.trajectory_length;
        check(positive(len), "mobility.trajectory_length", "must be positive")?;
        check(
            len <= self.window.inner_side,
            "mobility.trajectory_length",
            "must not exceed window.inner_side",
        )?;
        let walk = self.walk();
        check(positive(walk.tol), "mobility.tol", "must be positive")?;
        check(walk.step >= walk.tol, "mobility.step", "must be at least mobility.tol")?;
        check(self.sampling.samples_per_km > 0, "sampling.samples_per_km", "must be positive")?;
        check(self.sampling.cell_area_probes > 0, "sampling.cell_area_probes", "must be positive")?;
        check(self.run.replications > 0, "run.replications", "must be positive")?;
        check(
            self.run.velocities.iter().all(|&v| v >= 0.0 && v.is_finite()),
            "run.velocities",
            "must be finite and non-negative",
        )?;
        check(
            self.run.ho_delay >= 0.0 && self.run.ho_delay.is_finite(),
            "run.ho_delay",
            "must be non-negative",
        )?;
        check(positive(self.run.bandwidth), "run.bandwidth", "must be positive")?;
        let th = &self.run.coverage_thresholds_db;
        check(!th.is_empty(), "run.coverage_thresholds_db", "must not be empty")?;
        check(
            th.iter().all(|t| t.is_finite()) && th.windows(2).all(|w| w[0] < w[1]),
            "run.coverage_thresholds_db",
            "must be finite and strictly increasing",
        )?;
        check(self.run.max_resamples > 0, "run.max_resamples", "must be positive")?;
        if let Some(t) = self.run.threads {
            check(t > 0, "run.threads", "must be positive")?;
        }
        check(!self.policies.is_empty(), "policy", "at least one [[policy]] is required")?;
        let mut seen = HashSet::new();
        for (i, p) in self.policies.iter().enumerate() {
            let label = p.label();
            check(
                !label.is_empty() && !label.contains(['/', '\\']) && label != "." && label != "..",
                &format!("policy[{i}].label"),
                "must be a plain directory name",
            )?;
            check(seen.insert(label.clone()), &format!("policy[{i}].label"), format!("duplicate label `{label}`"))?;
            let needs_l = matches!(p.kind, PolicyKind::LocationAware | PolicyKind::Hybrid);
            let needs_s = matches!(p.kind, PolicyKind::SizeAware | PolicyKind::Hybrid);
            if needs_l {
                let l = p.location_threshold;
                check(l.is_some(), &format!("policy[{i}].location_threshold"), format!("required by {}", p.kind))?;
            }
            if needs_s {
                let s = p.size_threshold;
                check(s.is_some(), &format!("policy[{i}].size_threshold"), format!("required by {}", p.kind))?;
            }
            for (name, t) in [("location_threshold", p.location_threshold), ("size_threshold", p.size_threshold)] {
                if let Some(t) = t {
                    let c = t.constant();
                    check(c >= 0.0 && !c.is_nan(), &format!("policy[{i}].{name}"), "must be non-negative")?;
                }
            }
        }
        Ok(())
    }
}
