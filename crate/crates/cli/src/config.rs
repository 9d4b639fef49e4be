use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use daokpi_core::abi::{GovernanceInterface, GovernanceMapping};
use daokpi_core::chain::{ChainEndpoint, ContractKind, ContractRef};
use daokpi_core::harmonize::TreasuryValuation;
use daokpi_core::pipeline::DaoSource;
use daokpi_core::primitives::Address;
use daokpi_core::report::Format;
use daokpi_core::stats::DEFAULT_ALPHA;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_SECONDS_PER_BLOCK: i64 = 12;

#[derive(Debug, Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn cfg_err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_spb() -> i64 {
    DEFAULT_SECONDS_PER_BLOCK
}

fn default_concurrency() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub chain_id: u64,
    /// `https://...`, or `fixture:<dir>` to replay recorded responses.
    /// `${VAR}` is replaced from the environment.
    pub rpc_url: String,
    pub max_block_span: u64,
    pub rate_limit: f64,
    #[serde(default)]
    pub max_results: Option<usize>,
    pub snapshot_block: u64,
    #[serde(default = "default_spb")]
    pub seconds_per_block: i64,
}

impl ChainConfig {
    pub fn endpoint(&self) -> ChainEndpoint {
        ChainEndpoint {
            chain_id: self.chain_id,
            rpc_url: self.rpc_url.clone(),
            max_block_span: self.max_block_span,
            rate_limit: self.rate_limit,
            max_results: self.max_results,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractConfig {
    pub address: Address,
    #[serde(default)]
    pub deploy_block: u64,
}

/// A bundled framework preset, or an ABI file plus a mapping file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MappingRef {
    Preset(String),
    Files { abi: PathBuf, mapping: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DaoConfig {
    pub dao_id: String,
    pub chain_id: u64,
    pub mapping: MappingRef,
    pub governance: Vec<ContractConfig>,
    pub token: ContractConfig,
    #[serde(default)]
    pub treasury_addresses: Vec<Address>,
    #[serde(default)]
    pub locked_addresses: Vec<Address>,
    #[serde(default)]
    pub fully_automated: Option<bool>,
    /// Minimum `for + abstain` weight, as a decimal integer string.
    #[serde(default)]
    pub quorum: Option<String>,
    #[serde(default)]
    pub treasury: Option<TreasuryValuation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub formats: Option<Vec<String>>,
    /// DAOs drawn in the radar chart, in order.
    #[serde(default)]
    pub radar_daos: Option<Vec<String>>,
    #[serde(default = "default_concurrency")]
    pub fetch_concurrency: usize,
    pub chains: Vec<ChainConfig>,
    pub daos: Vec<DaoConfig>,
}

/// A validated project with paths resolved against the config file.
#[derive(Debug, Clone)]
pub struct Project {
    pub base_dir: PathBuf,
    pub config: ProjectConfig,
    pub output_dir: PathBuf,
    pub chains: BTreeMap<u64, ChainConfig>,
}

/// Replaces `${NAME}` with the environment variable `NAME`.
pub fn substitute_env(s: &str, lookup: impl Fn(&str) -> Option<String>) -> Result<String, ConfigError> {
    let mut out = String::new();
    let mut rest = s;
    while let Some(start) = rest.find("${") {
        out.push_str(&rest[..start]);
        let end = rest[start..].find('}').ok_or_else(|| cfg_err(format!("unterminated ${{ in {s:?}")))? + start;
        let name = &rest[start + 2..end];
        let value = lookup(name).ok_or_else(|| cfg_err(format!("environment variable {name} is not set")))?;
        out.push_str(&value);
        rest = &rest[end + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

impl Project {
    pub fn load(path: &Path) -> Result<Project, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| cfg_err(format!("cannot read {}: {e}", path.display())))?;
        let config: ProjectConfig = toml::from_str(&text).map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Project::new(config, base_dir)
    }

    pub fn new(mut config: ProjectConfig, base_dir: PathBuf) -> Result<Project, ConfigError> {
        for c in &mut config.chains {
            c.rpc_url = substitute_env(&c.rpc_url, |k| std::env::var(k).ok())?;
        }
        let output_dir = base_dir.join(&config.output_dir);
        let mut p = Project { base_dir, config, output_dir, chains: BTreeMap::new() };
        p.validate()?;
        Ok(p)
    }

    fn validate(&mut self) -> Result<(), ConfigError> {
        let c = &self.config;
        if !(c.alpha > 0.0 && c.alpha < 1.0) {
            return Err(cfg_err(format!("alpha must lie in (0, 1), got {}", c.alpha)));
        }
        if c.fetch_concurrency == 0 {
            return Err(cfg_err("fetch_concurrency must be at least 1"));
        }
        self.formats()?;
        for chain in &c.chains {
            chain.endpoint().validate().map_err(|e| cfg_err(format!("chain {}: {e}", chain.chain_id)))?;
            if chain.seconds_per_block <= 0 {
                return Err(cfg_err(format!("chain {}: seconds_per_block must be positive", chain.chain_id)));
            }
            if self.chains.insert(chain.chain_id, chain.clone()).is_some() {
                return Err(cfg_err(format!("chain {} configured twice", chain.chain_id)));
            }
        }
        if c.daos.is_empty() {
            return Err(cfg_err("no DAOs configured"));
        }
        let mut ids = BTreeSet::new();
        for d in &c.daos {
            if d.dao_id.is_empty() || d.dao_id.contains(['/', '\\']) || d.dao_id.starts_with('.') {
                return Err(cfg_err(format!("invalid dao_id {:?}", d.dao_id)));
            }
            if !ids.insert(d.dao_id.as_str()) {
                return Err(cfg_err(format!("duplicate dao_id {:?}", d.dao_id)));
            }
            if !self.chains.contains_key(&d.chain_id) {
                return Err(cfg_err(format!("{}: chain {} has no endpoint", d.dao_id, d.chain_id)));
            }
            if d.governance.is_empty() {
                return Err(cfg_err(format!("{}: no governance contract", d.dao_id)));
            }
            if let Some(q) = &d.quorum {
                if q.is_empty() || !q.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(cfg_err(format!("{}: quorum {q:?} is not a decimal integer", d.dao_id)));
                }
            }
            self.interface(d)?;
        }
        Ok(())
    }

    pub fn formats(&self) -> Result<BTreeSet<Format>, ConfigError> {
        match &self.config.formats {
            None => Ok(Format::ALL.into_iter().collect()),
            Some(list) => list.iter().map(|s| s.parse().map_err(cfg_err)).collect(),
        }
    }

    pub fn interface(&self, d: &DaoConfig) -> Result<GovernanceInterface, ConfigError> {
        let ctx = |e: &dyn std::fmt::Display| cfg_err(format!("{}: mapping: {e}", d.dao_id));
        match &d.mapping {
            MappingRef::Preset(name) => GovernanceInterface::preset(name).map_err(|e| ctx(&e)),
            MappingRef::Files { abi, mapping } => {
                let read = |p: &PathBuf| {
                    let full = self.base_dir.join(p);
                    fs::read_to_string(&full).map_err(|e| ctx(&format!("{}: {e}", full.display())))
                };
                let mapping = GovernanceMapping::from_json(&read(mapping)?).map_err(|e| ctx(&e))?;
                GovernanceInterface::load(&read(abi)?, mapping).map_err(|e| ctx(&e))
            }
        }
    }

    pub fn chain(&self, chain_id: u64) -> &ChainConfig {
        &self.chains[&chain_id]
    }

    pub fn source(&self, d: &DaoConfig) -> DaoSource {
        let contract = |c: &ContractConfig, kind| ContractRef {
            address: c.address,
            chain_id: d.chain_id,
            deploy_block: c.deploy_block,
            kind,
        };
        DaoSource {
            dao_id: d.dao_id.clone(),
            chain_id: d.chain_id,
            governance: d.governance.iter().map(|g| contract(g, ContractKind::Governance)).collect(),
            token: contract(&d.token, ContractKind::Token),
            treasury: d.treasury.clone(),
            treasury_addresses: d.treasury_addresses.iter().copied().collect(),
            locked_addresses: d.locked_addresses.iter().copied().collect(),
            fully_automated: d.fully_automated,
            quorum: d.quorum.as_ref().and_then(|q| q.parse().ok()),
        }
    }

    pub fn dao_ids(&self) -> Vec<String> {
        self.config.daos.iter().map(|d| d.dao_id.clone()).collect()
    }
}
