use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use clap::Args;
use ioncavity::params::hz_to_rad;
use ioncavity::{PhysicalParams, SystemConfig};
use serde::{Deserialize, Serialize};

/// Physical parameters as written in a config file: frequencies in Hz,
/// `kappa` in 1/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub g_hz: f64,
    pub g_cap_hz: f64,
    pub eta_c: f64,
    pub eta_l: f64,
    pub phi: f64,
    pub kappa: f64,
    pub omega0_hz: f64,
    pub omega_c_hz: f64,
    pub omega_l_hz: f64,
    pub nu_hz: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self {
            g_hz: 3e7,
            g_cap_hz: 5e5,
            eta_c: 0.2,
            eta_l: 0.2,
            phi: FRAC_PI_4,
            kappa: 0.0,
            omega0_hz: 0.0,
            omega_c_hz: 0.0,
            omega_l_hz: 0.0,
            nu_hz: 0.0,
        }
    }
}

impl ParamsConfig {
    pub fn physical(&self) -> PhysicalParams {
        PhysicalParams {
            omega0: hz_to_rad(self.omega0_hz),
            omega_c: hz_to_rad(self.omega_c_hz),
            omega_l: hz_to_rad(self.omega_l_hz),
            nu: hz_to_rad(self.nu_hz),
            g: hz_to_rad(self.g_hz),
            g_cap: hz_to_rad(self.g_cap_hz),
            eta_c: self.eta_c,
            eta_l: self.eta_l,
            phi: self.phi,
            kappa: self.kappa,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Cutoffs {
    pub phonon: usize,
    pub photon: usize,
}

impl Default for Cutoffs {
    fn default() -> Self {
        Self { phonon: 5, photon: 5 }
    }
}

impl Cutoffs {
    pub fn system(&self, trap_count: usize) -> ioncavity::Result<SystemConfig> {
        SystemConfig::new(trap_count, self.phonon, self.photon)
    }
}

/// Everything a run depends on besides the subcommand arguments.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub params: ParamsConfig,
    pub cutoffs: Cutoffs,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        self.params.physical().validate().context("invalid parameters")?;
        self.cutoffs.system(2).context("invalid cutoffs")?;
        Ok(())
    }
}

/// Flags overriding the config file.
#[derive(Args, Clone, Debug, Default)]
pub struct Overrides {
    /// JSON run configuration; flags below take precedence.
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    /// Ion-cavity coupling g in Hz.
    #[arg(long, global = true)]
    pub g_hz: Option<f64>,
    /// Ion-laser coupling G in Hz.
    #[arg(long, global = true)]
    pub g_cap_hz: Option<f64>,
    #[arg(long, global = true)]
    pub eta_c: Option<f64>,
    #[arg(long, global = true)]
    pub eta_l: Option<f64>,
    /// Position of the ion in the standing wave, radians.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Cavity decay rate in 1/s.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long, global = true)]
    pub phonon_cutoff: Option<usize>,
    #[arg(long, global = true)]
    pub photon_cutoff: Option<usize>,
}

impl Overrides {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let p = &mut cfg.params;
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut p.g_hz, self.g_hz);
        set(&mut p.g_cap_hz, self.g_cap_hz);
        set(&mut p.eta_c, self.eta_c);
        set(&mut p.eta_l, self.eta_l);
        set(&mut p.phi, self.phi);
        set(&mut p.kappa, self.kappa);
        if let Some(n) = self.phonon_cutoff {
            cfg.cutoffs.phonon = n;
        }
        if let Some(n) = self.photon_cutoff {
            cfg.cutoffs.photon = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
