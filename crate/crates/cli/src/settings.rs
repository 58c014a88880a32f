//! Flat experiment settings (config file and flags) and their resolution.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use epw::sampling::{SamplerConfig, SamplingStrategy, SetKind};
use serde::{Deserialize, Serialize};

use crate::error::{config_err, CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    SphericalModes,
    RandomExpansion,
    Fundamental,
    SvdSpectrum,
}

impl ExperimentName {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::SphericalModes => "spherical-modes",
            ExperimentName::RandomExpansion => "random-expansion",
            ExperimentName::Fundamental => "fundamental",
            ExperimentName::SvdSpectrum => "svd-spectrum",
        }
    }
}

/// `ball`, `cube` or `mesh:<path>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DomainSpec {
    Ball,
    Cube,
    Mesh(PathBuf),
}

impl FromStr for DomainSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ball" => Ok(DomainSpec::Ball),
            "cube" => Ok(DomainSpec::Cube),
            _ => match s.strip_prefix("mesh:") {
                Some(p) if !p.is_empty() => Ok(DomainSpec::Mesh(PathBuf::from(p))),
                _ => config_err(format!("domain `{s}` is not ball, cube or mesh:<path>")),
            },
        }
    }
}

impl TryFrom<String> for DomainSpec {
    type Error = CliError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DomainSpec> for String {
    fn from(d: DomainSpec) -> String {
        match d {
            DomainSpec::Ball => "ball".into(),
            DomainSpec::Cube => "cube".into(),
            DomainSpec::Mesh(p) => format!("mesh:{}", p.display()),
        }
    }
}

impl DomainSpec {
    pub fn load(&self) -> Result<epw::geometry::Domain> {
        use epw::geometry::Domain;
        Ok(match self {
            DomainSpec::Ball => Domain::ball(),
            DomainSpec::Cube => Domain::cube(),
            DomainSpec::Mesh(p) => Domain::mesh_ingest(p)?,
        })
    }
}

/// Scaling of the waves in an approximation set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// √(μ_N(y)/P) for EPW sets and P^{-1/2} for PPW sets.
    Density,
    /// Unit maximum modulus on the boundary nodes.
    Linf,
    /// Unit scale.
    None,
}

impl FromStr for Normalization {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "density" => Ok(Normalization::Density),
            "linf" => Ok(Normalization::Linf),
            "none" => Ok(Normalization::None),
            _ => config_err(format!("normalization `{s}` is not density, linf or none")),
        }
    }
}

/// Every setting is optional; a config file and the command line each give one,
/// and flags win.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    pub kappa: Option<f64>,
    pub p: Option<Vec<usize>>,
    pub l: Option<usize>,
    pub s: Option<usize>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub domain: Option<DomainSpec>,
    pub set: Option<SetKind>,
    pub normalization: Option<Normalization>,
    pub offset: Option<f64>,
    pub max_ell: Option<usize>,
    pub strategy: Option<SamplingStrategy>,
    pub out: Option<PathBuf>,
    pub quick: Option<bool>,
}

macro_rules! overlay {
    ($base:expr, $over:expr, $($f:ident),*) => {
        Settings { $($f: $over.$f.or($base.$f)),* }
    };
}

impl Settings {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: Settings) -> Settings {
        overlay!(self, over, kappa, p, l, s, epsilon, seed, domain, set, normalization, offset, max_ell, strategy, out, quick)
    }
}

/// Settings resolved for one experiment. Omitted sizes follow the tuning rules.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    pub kappa: f64,
    pub p: Option<Vec<usize>>,
    pub l: Option<usize>,
    pub s: Option<usize>,
    pub epsilon: Option<f64>,
    pub seed: u64,
    pub domain: DomainSpec,
    pub set: Option<SetKind>,
    pub normalization: Option<Normalization>,
    /// Source distance to the domain in wavelengths.
    pub offset: f64,
    pub max_ell: Option<usize>,
    pub strategy: SamplingStrategy,
    pub quick: bool,
}

impl ExperimentSpec {
    pub fn new(name: ExperimentName, settings: &Settings) -> Result<Self> {
        let quick = settings.quick.unwrap_or(false);
        let kappa = settings.kappa.unwrap_or(if quick { 4.0 } else { 6.0 });
        if !(kappa > 0.0) || !kappa.is_finite() {
            return config_err(format!("kappa = {kappa} must be positive"));
        }
        if let Some(e) = settings.epsilon {
            if !(e > 0.0 && e <= 1.0) {
                return config_err(format!("epsilon = {e} must lie in (0, 1]"));
            }
        }
        if let Some(p) = &settings.p {
            if p.is_empty() || p.contains(&0) {
                return config_err("p must list positive set sizes");
            }
        }
        let offset = settings.offset.unwrap_or(2.0 / 3.0);
        if !(offset > 0.0) {
            return config_err(format!("offset = {offset} must be positive"));
        }
        Ok(ExperimentSpec {
            name,
            kappa,
            p: settings.p.clone(),
            l: settings.l,
            s: settings.s,
            epsilon: settings.epsilon,
            seed: settings.seed.unwrap_or(0),
            domain: settings.domain.clone().unwrap_or(match name {
                ExperimentName::Fundamental => DomainSpec::Cube,
                _ => DomainSpec::Ball,
            }),
            set: settings.set,
            normalization: settings.normalization,
            offset,
            max_ell: settings.max_ell,
            strategy: settings.strategy.unwrap_or(SamplingStrategy::QuasiRandom),
            quick,
        })
    }

    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig { strategy: self.strategy, seed: self.seed, ..SamplerConfig::default() }
    }

    pub fn sets(&self) -> Vec<SetKind> {
        match self.set {
            Some(k) => vec![k],
            None => vec![SetKind::Ppw, SetKind::Epw],
        }
    }

    /// ⌈m κ⌉.
    pub fn kappa_multiple(&self, m: f64) -> usize {
        (m * self.kappa - 1e-9).ceil() as usize
    }
}
