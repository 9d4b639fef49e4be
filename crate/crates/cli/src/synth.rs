use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use daokpi_core::chain::{ChainClient, RecordingTransport};
use daokpi_core::pipeline::fetch_dao;
use daokpi_core::synth::{self, GroundTruth, SynthDao};

use crate::config::{ChainConfig, ContractConfig, DaoConfig, MappingRef, ProjectConfig, DEFAULT_SECONDS_PER_BLOCK};
use crate::stages::StageError;

pub const CONFIG_FILE: &str = "daokpi.toml";
pub const GROUND_TRUTH_FILE: &str = "ground_truth.json";

const STAGE: &str = "synth";

fn fixture_dir(chain_id: u64) -> PathBuf {
    PathBuf::from("fixtures").join(format!("chain-{chain_id}"))
}

fn dao_config(d: &SynthDao) -> DaoConfig {
    let src = d.source();
    DaoConfig {
        dao_id: d.dao_id.clone(),
        chain_id: d.spec.chain_id,
        mapping: MappingRef::Preset(d.spec.framework.clone()),
        governance: vec![ContractConfig { address: d.governance, deploy_block: d.deploy_block }],
        token: ContractConfig { address: d.token, deploy_block: d.deploy_block },
        treasury_addresses: src.treasury_addresses.into_iter().collect(),
        locked_addresses: src.locked_addresses.into_iter().collect(),
        fully_automated: src.fully_automated,
        quorum: None,
        treasury: src.treasury,
    }
}

/// Builds the config for a generated corpus, with every chain replayed
/// from its fixture directory.
pub fn project_config(daos: &[SynthDao], snapshot_block: u64) -> ProjectConfig {
    let mut chains: BTreeMap<u64, ChainConfig> = BTreeMap::new();
    for d in daos {
        let id = d.spec.chain_id;
        chains.entry(id).or_insert_with(|| {
            let ep = synth::endpoint(id, &format!("fixture:{}", fixture_dir(id).display()));
            ChainConfig {
                chain_id: id,
                rpc_url: ep.rpc_url,
                max_block_span: ep.max_block_span,
                rate_limit: ep.rate_limit,
                max_results: ep.max_results,
                snapshot_block,
                seconds_per_block: DEFAULT_SECONDS_PER_BLOCK,
            }
        });
    }
    ProjectConfig {
        output_dir: PathBuf::from("out"),
        alpha: daokpi_core::stats::DEFAULT_ALPHA,
        formats: None,
        radar_daos: None,
        fetch_concurrency: 4,
        chains: chains.into_values().collect(),
        daos: daos.iter().map(dao_config).collect(),
    }
}

/// Writes `daokpi.toml`, recorded node responses under `fixtures/`, and
/// `ground_truth.json` into `dir`.
pub fn write_project(dir: &Path, seed: u64, count: usize) -> Result<(), StageError> {
    let io = |p: &Path, e: std::io::Error| StageError::new(STAGE, format!("cannot write {}: {e}", p.display()));
    let daos = synth::corpus(seed, count).map_err(|e| StageError::new(STAGE, e.to_string()))?;
    let node = synth::build_node(&daos);
    let snapshot = node.head();
    let config = project_config(&daos, snapshot);

    for chain in &config.chains {
        let fixtures = dir.join(fixture_dir(chain.chain_id));
        if fixtures.exists() {
            fs::remove_dir_all(&fixtures).map_err(|e| io(&fixtures, e))?;
        }
        let recorder = RecordingTransport::new(&node, &fixtures).map_err(|e| io(&fixtures, e))?;
        let client = ChainClient::new(chain.endpoint(), recorder);
        for d in daos.iter().filter(|d| d.spec.chain_id == chain.chain_id) {
            fetch_dao(&client, &d.source(), snapshot)
                .map_err(|e| StageError::new(STAGE, format!("{}: {e}", d.dao_id)))?;
        }
    }

    let toml_text = toml::to_string(&config).map_err(|e| StageError::new(STAGE, e.to_string()))?;
    let path = dir.join(CONFIG_FILE);
    fs::write(&path, toml_text).map_err(|e| io(&path, e))?;

    let truth: BTreeMap<&str, &GroundTruth> = daos.iter().map(|d| (d.dao_id.as_str(), &d.truth)).collect();
    let mut text = serde_json::to_string_pretty(&truth).expect("ground truth serializes");
    text.push('\n');
    let path = dir.join(GROUND_TRUTH_FILE);
    fs::write(&path, text).map_err(|e| io(&path, e))
}
