use crate::backends::BackendKind;
use crate::dram::{toml_error, DramGeometry, EnergyParams, SimConfig, TimingParams};
use crate::error::{Error, Result};
use crate::threshold::TlpeFunc;
use crate::workloads::{parse_size, AddStrategy, HostCostModel};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Host time per byte operation that makes the offloaded AES stages about
/// 40 times slower on the host than on CIDAN for a full row of blocks,
/// matching the reported speed-up of the offloaded share.
pub const AES_NS_PER_HOST_BYTE: f64 = 2.231;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MicrobenchConfig {
    pub ops: Vec<TlpeFunc>,
    pub sizes: Vec<String>,
}

impl Default for MicrobenchConfig {
    fn default() -> Self {
        MicrobenchConfig {
            ops: vec![TlpeFunc::Not, TlpeFunc::And, TlpeFunc::Or, TlpeFunc::Xor],
            sizes: vec!["1Mb".into(), "2Mb".into(), "4Mb".into()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AesConfig {
    pub blocks: usize,
    pub key_bits: u32,
    /// Host profile for SubBytes and ShiftRows.
    pub host: HostCostModel,
}

impl Default for AesConfig {
    fn default() -> Self {
        AesConfig {
            blocks: 8192,
            key_bits: 128,
            host: HostCostModel {
                ns_per_host_byte: AES_NS_PER_HOST_BYTE,
                ..HostCostModel::ZERO
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphConfig {
    /// Synthetic graphs sized like the named datasets.
    pub datasets: Vec<String>,
    /// Edge-list file used instead of the synthetic datasets.
    pub edge_list: Option<PathBuf>,
    pub pairs: usize,
    pub host: HostCostModel,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            datasets: vec!["facebook".into(), "amazon".into(), "dblp".into()],
            edge_list: None,
            pairs: 8,
            host: HostCostModel::ZERO,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DnaConfig {
    pub pattern_len: usize,
    pub text_len: usize,
    pub alphabet: String,
    /// Literal sequences replacing the random pattern and text.
    pub pattern: Option<String>,
    pub text: Option<String>,
    /// Sequence files (one sequence each, whitespace ignored).
    pub pattern_file: Option<PathBuf>,
    pub text_file: Option<PathBuf>,
    pub add: AddStrategy,
    pub host: HostCostModel,
}

impl Default for DnaConfig {
    fn default() -> Self {
        DnaConfig {
            pattern_len: 64,
            text_len: 256,
            alphabet: "ACGT".into(),
            pattern: None,
            text: None,
            pattern_file: None,
            text_file: None,
            add: AddStrategy::Host,
            host: HostCostModel::ZERO,
        }
    }
}

/// Everything an experiment run depends on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub backends: Vec<BackendKind>,
    pub output_dir: Option<PathBuf>,
    pub geometry: DramGeometry,
    pub timing: TimingParams,
    pub energy: EnergyParams,
    pub microbench: MicrobenchConfig,
    pub aes: AesConfig,
    pub graph: GraphConfig,
    pub dna: DnaConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 42,
            backends: vec![BackendKind::Cidan, BackendKind::Redram, BackendKind::Ambit],
            output_dir: None,
            geometry: DramGeometry::default(),
            timing: TimingParams::default(),
            energy: EnergyParams::default(),
            microbench: MicrobenchConfig::default(),
            aes: AesConfig::default(),
            graph: GraphConfig::default(),
            dna: DnaConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Load and validate; relative file references resolve against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_toml_str(&std::fs::read_to_string(path)?)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.graph.edge_list, &mut cfg.dna.pattern_file, &mut cfg.dna.text_file]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        cfg.check_files()?;
        Ok(cfg)
    }

    pub fn sim(&self) -> SimConfig {
        SimConfig {
            geometry: self.geometry,
            timing: self.timing,
            energy: self.energy,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sim().validate()?;
        if self.backends.is_empty() {
            return Err(Error::Invalid("no back-ends selected".into()));
        }
        for s in &self.microbench.sizes {
            parse_size(s)?;
        }
        if ![128, 192, 256].contains(&self.aes.key_bits) {
            return Err(Error::Invalid(format!("AES key of {} bits", self.aes.key_bits)));
        }
        if self.aes.blocks == 0 || self.graph.pairs == 0 || self.dna.pattern_len == 0 {
            return Err(Error::Invalid("workload sizes must be positive".into()));
        }
        if self.dna.alphabet.is_empty() {
            return Err(Error::Invalid("empty DNA alphabet".into()));
        }
        for h in [&self.aes.host, &self.graph.host, &self.dna.host] {
            h.validate()?;
        }
        Ok(())
    }

    /// Every referenced input file exists.
    pub fn check_files(&self) -> Result<()> {
        for p in [&self.graph.edge_list, &self.dna.pattern_file, &self.dna.text_file]
            .into_iter()
            .flatten()
        {
            if !p.is_file() {
                return Err(Error::Io(format!("{} does not exist", p.display())));
            }
        }
        Ok(())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serialises")
    }

    /// SHA-256 of the canonical TOML form, leaving out the output
    /// directory (it does not affect results).
    pub fn hash(&self) -> String {
        let canon = ExperimentConfig {
            output_dir: None,
            ..self.clone()
        };
        let digest = Sha256::digest(canon.to_toml_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_hash() {
        let c = ExperimentConfig::default();
        let back = ExperimentConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
        let mut d = c.clone();
        d.seed += 1;
        assert_ne!(d.hash(), c.hash());
        d.seed -= 1;
        d.output_dir = Some("elsewhere".into());
        assert_eq!(d.hash(), c.hash());
    }

    #[test]
    fn errors_name_the_line() {
        let text = "seed = 1\n\n[timing]\nt_rcd = \"fast\"\n";
        match ExperimentConfig::from_toml_str(text) {
            Err(Error::Config { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(ExperimentConfig::from_toml_str("sed = 1\n"), Err(Error::Config { line: 1, .. })));
    }

    #[test]
    fn missing_files_rejected() {
        let mut c = ExperimentConfig::default();
        c.graph.edge_list = Some("/nonexistent/edges.txt".into());
        assert!(c.check_files().is_err());
    }
}
