//! Resolved run configuration. Every report embeds one, and feeding it back
//! through `--config` reproduces the report.

use std::path::PathBuf;

use friedrichs_core::{ModelParams, QuadratureConfig, ThresholdPoint, TorusPoint, VFunction};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::expr::parse_v;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Band edges and discrete eigenvalues of the fibre operator at one k
    Spectrum,
    /// Essential spectrum of the full operator on a k-grid
    Bands,
    /// Critical couplings μ_l, μ_r and the crossing value γ*
    Critical,
    /// Threshold verdict at 0 (origin) or 27/2 (a point of Λ)
    Classify,
    /// Sign of μ_l - μ_r over a range of γ
    ScanGamma,
    /// Self-checks of the model's exact statements for one v
    Verify,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub gamma: Option<f64>,
    pub mu: Option<f64>,
}

pub const DEFAULT_GAMMA_RANGE: [f64; 2] = [0.1, 8.9];
pub const DEFAULT_STEPS: usize = 50;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub model: ModelSpec,
    /// Coupling function as written by the user.
    pub v: String,
    pub quadrature: QuadratureConfig,
    pub k: Option<[f64; 3]>,
    pub point: Option<ThresholdPoint>,
    /// Which point of Λ the `critical`, `scan-gamma` and `verify` commands
    /// single out.
    pub i: Option<usize>,
    pub resolution: Option<usize>,
    pub gamma_range: Option<[f64; 2]>,
    pub steps: Option<usize>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            model: ModelSpec::default(),
            v: "1".into(),
            quadrature: QuadratureConfig::default(),
            k: None,
            point: None,
            i: None,
            resolution: None,
            gamma_range: None,
            steps: None,
            output_path: None,
            format: Format::Json,
        }
    }

    pub fn coupling(&self) -> Result<VFunction, CliError> {
        Ok(parse_v(&self.v)?)
    }

    pub fn gamma(&self) -> Result<f64, CliError> {
        let g = self.model.gamma.ok_or_else(|| missing("--gamma"))?;
        if !g.is_finite() {
            return Err(CliError::Config("γ must be finite".into()));
        }
        Ok(g)
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        let mu = self.model.mu.ok_or_else(|| missing("--mu"))?;
        Ok(ModelParams::new(self.gamma()?, mu)?)
    }

    pub fn k_point(&self) -> Result<TorusPoint, CliError> {
        let k = self.k.ok_or_else(|| missing("--k"))?;
        if k.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Config("k must be finite".into()));
        }
        Ok(TorusPoint::new(k))
    }

    pub fn lambda_index(&self) -> Result<usize, CliError> {
        let i = self.i.unwrap_or(1);
        if !(1..=8).contains(&i) {
            return Err(CliError::Config(format!("Λ index {i} is outside 1..=8")));
        }
        Ok(i)
    }

    /// Checks everything that can be checked without numerics.
    pub fn validate(&self) -> Result<(), CliError> {
        self.quadrature.validate()?;
        self.coupling()?;
        if self.i.is_some() {
            self.lambda_index()?;
        }
        match self.command {
            Command::Spectrum => {
                self.params()?;
                self.k_point()?;
            }
            Command::Bands => {
                self.params()?;
                self.resolution.ok_or_else(|| missing("--resolution"))?;
            }
            Command::Critical => {
                self.gamma()?;
            }
            Command::Classify => {
                self.params()?;
                let point = self.point.ok_or_else(|| missing("--point"))?;
                point.k()?;
            }
            Command::ScanGamma => {
                let [a, b] = self.gamma_range.unwrap_or(DEFAULT_GAMMA_RANGE);
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(CliError::Config("γ range must be finite with min < max".into()));
                }
                if self.steps.unwrap_or(DEFAULT_STEPS) < 2 {
                    return Err(CliError::Config("a γ scan needs at least 2 steps".into()));
                }
            }
            Command::Verify => {}
        }
        if self.format == Format::Csv && !matches!(self.command, Command::Spectrum | Command::Bands | Command::ScanGamma) {
            return Err(CliError::Config("CSV output is available for spectrum, bands and scan-gamma".into()));
        }
        Ok(())
    }
}

fn missing(flag: &str) -> CliError {
    CliError::Config(format!("this command needs {flag}"))
}

/// `origin`, `lambda:i`, or `lambda` together with a separate index.
pub fn parse_point(s: &str, index: Option<usize>) -> Result<ThresholdPoint, CliError> {
    let s = s.trim().to_ascii_lowercase();
    if s == "origin" {
        return Ok(ThresholdPoint::Origin);
    }
    let i = match s.strip_prefix("lambda") {
        Some("") => index.unwrap_or(1),
        Some(rest) => rest
            .strip_prefix(':')
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| CliError::Config(format!("bad threshold point {s:?}")))?,
        None => return Err(CliError::Config(format!("bad threshold point {s:?}; use origin or lambda:i"))),
    };
    let point = ThresholdPoint::Lambda(i);
    point.k()?;
    Ok(point)
}

/// Three comma-separated coordinates.
pub fn parse_k(s: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::Config(format!("k must be three comma-separated numbers, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut k = [0.0; 3];
    for (slot, p) in k.iter_mut().zip(parts) {
        *slot = p.parse().map_err(|_| bad())?;
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_syntax() {
        assert_eq!(parse_point("origin", None).unwrap(), ThresholdPoint::Origin);
        assert_eq!(parse_point("lambda:7", None).unwrap(), ThresholdPoint::Lambda(7));
        assert_eq!(parse_point("Lambda", Some(3)).unwrap(), ThresholdPoint::Lambda(3));
        assert!(parse_point("lambda:9", None).is_err());
        assert!(parse_point("lambda:x", None).is_err());
        assert!(parse_point("pi", None).is_err());
    }

    #[test]
    fn k_syntax() {
        assert_eq!(parse_k("0, -1.5,2e-1").unwrap(), [0.0, -1.5, 0.2]);
        assert!(parse_k("1,2").is_err());
        assert!(parse_k("1,2,x").is_err());
    }

    #[test]
    fn required_fields_per_command() {
        let mut c = RunConfig::new(Command::Spectrum);
        c.model = ModelSpec {
            gamma: Some(1.0),
            mu: Some(0.5),
        };
        assert!(c.validate().is_err());
        c.k = Some([0.0; 3]);
        assert!(c.validate().is_ok());
        c.format = Format::Csv;
        assert!(c.validate().is_ok());

        let mut c = RunConfig::new(Command::Classify);
        c.model.gamma = Some(4.0);
        c.model.mu = Some(1.0);
        assert!(c.validate().is_err());
        c.point = Some(ThresholdPoint::Lambda(2));
        assert!(c.validate().is_ok());
        c.format = Format::Csv;
        assert!(c.validate().is_err());

        let mut c = RunConfig::new(Command::Bands);
        c.model.gamma = Some(1.0);
        c.model.mu = Some(-1.0);
        c.resolution = Some(8);
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let mut c = RunConfig::new(Command::Classify);
        c.point = Some(ThresholdPoint::Lambda(4));
        c.k = Some([0.1, 0.2, 0.3]);
        c.v = "cos(p1) + 0.5".into();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), c);
    }
}
