use std::path::Path;

use hk1lab::arith::parse_rational;
use hk1lab::suite::DEFAULT_SEED;
use hk1lab::{SpectrumPoint, SystemParams};
use serde::{Deserialize, Serialize};

/// Everything a run depends on. Rational entries are `"num/den"` strings;
/// absent sequences default to the base-2 van der Corput points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub k_seq: Vec<u32>,
    pub stage_count: usize,
    pub grid_resolution: usize,
    pub seed: u64,
    /// Interval points `t_n`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_seq: Option<Vec<String>>,
    /// Phases `θ_n` of the circle points `z_n = e^{2πiθ_n}`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_seq: Option<Vec<String>>,
    /// Corner stage `n` of the obstruction.
    pub corner: usize,
    /// Sup-norm `M` of the phase correction `M·sin(2πθ)`.
    pub amplitude: f64,
    /// Target stage `m` of the obstruction; the smallest admissible when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_stage: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = SystemParams::default();
        Self {
            k_seq: p.k_seq,
            stage_count: p.stage_count,
            grid_resolution: p.grid_resolution,
            seed: DEFAULT_SEED,
            t_seq: None,
            z_seq: None,
            corner: 1,
            amplitude: 0.0,
            target_stage: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Params(#[from] hk1lab::Error),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.display().to_string(), source })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse { path: path.display().to_string(), source })
    }

    fn points(
        raw: &[String],
        make: impl Fn(hk1lab::Rational) -> Option<SpectrumPoint>,
        what: &str,
    ) -> Result<Vec<SpectrumPoint>, ConfigError> {
        raw.iter()
            .map(|s| {
                parse_rational(s)
                    .and_then(&make)
                    .ok_or_else(|| ConfigError::Invalid(format!("{what} entry {s:?} is not a valid \"num/den\" point")))
            })
            .collect()
    }

    pub fn params(&self) -> Result<SystemParams, ConfigError> {
        let mut p = SystemParams::with_default_sequences(self.k_seq.clone(), self.stage_count, self.grid_resolution);
        if let Some(t) = &self.t_seq {
            p.t_seq = Self::points(t, SpectrumPoint::interval, "t_seq")?;
        }
        if let Some(z) = &self.z_seq {
            p.z_seq = Self::points(z, |r| Some(SpectrumPoint::circle(r)), "z_seq")?;
        }
        if !self.amplitude.is_finite() || self.amplitude < 0.0 {
            return Err(ConfigError::Invalid(format!(
                "amplitude must be a finite nonnegative number, got {}",
                self.amplitude
            )));
        }
        p.validate()?;
        Ok(p)
    }
}
