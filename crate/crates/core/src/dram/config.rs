use super::energy::EnergyParams;
use super::geometry::DramGeometry;
use super::timing::TimingParams;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Device parameters: geometry, timing and energy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub geometry: DramGeometry,
    pub timing: TimingParams,
    pub energy: EnergyParams,
}

/// Map a TOML error to a config error with a 1-based line number.
pub(crate) fn toml_error(text: &str, e: &toml::de::Error) -> Error {
    let line = e
        .span()
        .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
        .unwrap_or(0);
    Error::Config {
        line,
        msg: e.message().to_string(),
    }
}

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.timing.validate()?;
        self.energy.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let c = SimConfig::default();
        assert_eq!(SimConfig::from_toml_str(&c.to_toml_string()).unwrap(), c);
    }

    #[test]
    fn partial_file_uses_defaults() {
        let c = SimConfig::from_toml_str("[geometry]\nbanks_per_chip = 16\nrows_per_bank = 64\ncols_per_row = 8\nbits_per_col = 8\nbank_group_size = 4\n").unwrap();
        assert_eq!(c.geometry.banks_per_chip, 16);
        assert_eq!(c.timing, TimingParams::default());
    }

    #[test]
    fn errors_report_line() {
        let err = SimConfig::from_toml_str("[timing]\nt_rcd = 15.0\nt_bogus = 1\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 3, .. }), "{err:?}");
        let err = SimConfig::from_toml_str("[timing]\nt_rcd = \n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn invariants_enforced() {
        let mut c = SimConfig::default();
        c.timing.t_rc = 40.0;
        assert!(SimConfig::from_toml_str(&c.to_toml_string()).is_err());
    }
}
