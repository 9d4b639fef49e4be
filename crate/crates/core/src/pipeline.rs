//! The per-DAO stages between a node and a [`DaoRecord`]: fetch raw logs,
//! decode them, and build the harmonised record.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::abi::{
    erc20_decoder, event_topic, map_to_governance, transfer_spec, DropReport, GovernanceInterface,
    TimedGovernanceEvent, TokenTransfer, VoteClock,
};
use crate::chain::{BlockTag, ChainClient, ChainError, ContractRef, RawLog, TokenMetadata, Transport};
use crate::harmonize::{
    build_dao_record, dedup_and_validate, enrich_timestamps, BalanceError, DaoInputs, DaoRecord, ProposalPolicy,
    TreasuryValuation, ValidationReport,
};
use crate::primitives::{opt_dec_biguint, Address};

/// How many mapping rejections are kept verbatim in a decoded document.
const REJECTION_SAMPLES: usize = 20;

/// Everything the pipeline needs to know about one DAO besides its chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DaoSource {
    pub dao_id: String,
    pub chain_id: u64,
    pub governance: Vec<ContractRef>,
    pub token: ContractRef,
    #[serde(default)]
    pub treasury: Option<TreasuryValuation>,
    #[serde(default)]
    pub treasury_addresses: BTreeSet<Address>,
    #[serde(default)]
    pub locked_addresses: BTreeSet<Address>,
    #[serde(default)]
    pub fully_automated: Option<bool>,
    #[serde(default, with = "opt_dec_biguint")]
    pub quorum: Option<BigUint>,
}

/// Fetch-stage output: logs and block times exactly as the node returned them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawDao {
    pub dao_id: String,
    pub chain_id: u64,
    pub snapshot_block: u64,
    pub snapshot_time: i64,
    pub governance_logs: Vec<RawLog>,
    pub token_logs: Vec<RawLog>,
    pub timestamps: BTreeMap<u64, i64>,
    pub token: TokenMetadata,
}

pub fn fetch_dao<T: Transport>(
    client: &ChainClient<T>,
    src: &DaoSource,
    snapshot_block: u64,
) -> Result<RawDao, ChainError> {
    let mut governance_logs = Vec::new();
    for c in &src.governance {
        if c.deploy_block <= snapshot_block {
            governance_logs.extend(client.fetch_logs(c, c.deploy_block, snapshot_block, None)?);
        }
    }
    let token_logs = if src.token.deploy_block <= snapshot_block {
        client.fetch_logs(&src.token, src.token.deploy_block, snapshot_block, Some(event_topic(&transfer_spec())))?
    } else {
        Vec::new()
    };
    let blocks: BTreeSet<u64> =
        governance_logs.iter().chain(&token_logs).map(|l| l.block_number).chain([snapshot_block]).collect();
    let timestamps = client.fetch_block_timestamps(&blocks)?;
    let token = client.fetch_token_metadata(&src.token, BlockTag::Number(snapshot_block))?;
    Ok(RawDao {
        dao_id: src.dao_id.clone(),
        chain_id: src.chain_id,
        snapshot_block,
        snapshot_time: timestamps[&snapshot_block],
        governance_logs,
        token_logs,
        timestamps,
        token,
    })
}

/// Decode-stage output: normalized governance events and token transfers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedDao {
    pub dao_id: String,
    pub chain_id: u64,
    pub snapshot_block: u64,
    pub snapshot_time: i64,
    pub framework: String,
    pub clock: VoteClock,
    pub governance: Vec<TimedGovernanceEvent>,
    pub transfers: Vec<TokenTransfer>,
    pub timestamps: BTreeMap<u64, i64>,
    pub token: TokenMetadata,
    pub drops: DropReport,
    pub validation: ValidationReport,
    /// Decoded events whose fields did not fit the framework mapping.
    pub mapping_rejections: u64,
    pub rejection_samples: Vec<String>,
}

pub fn decode_dao(raw: &RawDao, iface: &GovernanceInterface) -> DecodedDao {
    let (mut gov_events, mut drops) = iface.decoder().decode_all(&raw.governance_logs);
    let (mut token_events, token_drops) = erc20_decoder().decode_all(&raw.token_logs);
    drops.merge(token_drops);
    enrich_timestamps(&mut gov_events, &raw.timestamps);
    enrich_timestamps(&mut token_events, &raw.timestamps);
    let (gov_events, mut validation) = dedup_and_validate(gov_events);
    let (token_events, token_validation) = dedup_and_validate(token_events);
    validation.merge(&token_validation);

    let mut governance = Vec::new();
    let mut mapping_rejections = 0;
    let mut rejection_samples = Vec::new();
    for ev in &gov_events {
        match map_to_governance(ev, &iface.mapping) {
            Ok(Some(event)) => governance.push(TimedGovernanceEvent {
                event,
                contract: ev.contract,
                block_number: ev.block_number,
                log_index: ev.log_index,
                tx_hash: ev.tx_hash,
                timestamp_utc: ev.timestamp_utc,
            }),
            Ok(None) => {}
            Err(e) => {
                mapping_rejections += 1;
                if rejection_samples.len() < REJECTION_SAMPLES {
                    rejection_samples.push(format!("block {} log {}: {e}", ev.block_number, ev.log_index));
                }
            }
        }
    }
    let transfers = token_events.iter().filter_map(TokenTransfer::from_decoded).collect();
    DecodedDao {
        dao_id: raw.dao_id.clone(),
        chain_id: raw.chain_id,
        snapshot_block: raw.snapshot_block,
        snapshot_time: raw.snapshot_time,
        framework: iface.mapping.framework.clone(),
        clock: iface.mapping.clock,
        governance,
        transfers,
        timestamps: raw.timestamps.clone(),
        token: raw.token.clone(),
        drops,
        validation,
        mapping_rejections,
        rejection_samples,
    }
}

pub fn build_record(d: &DecodedDao, src: &DaoSource, seconds_per_block: i64) -> Result<DaoRecord, BalanceError> {
    build_dao_record(DaoInputs {
        dao_id: &d.dao_id,
        chain_id: d.chain_id,
        snapshot_block: d.snapshot_block,
        governance: &d.governance,
        transfers: &d.transfers,
        token: Some(&d.token),
        timestamps: &d.timestamps,
        policy: ProposalPolicy { quorum: src.quorum.clone(), now: d.snapshot_time, clock: d.clock, seconds_per_block },
        treasury: src.treasury.as_ref(),
        treasury_addresses: &src.treasury_addresses,
        locked_addresses: &src.locked_addresses,
        fully_automated: src.fully_automated,
        validation: d.validation.clone(),
    })
}
