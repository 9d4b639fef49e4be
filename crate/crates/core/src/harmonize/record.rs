use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::activity::{classify_timeline, ActivityTier};
use super::balances::{BalanceError, BalanceLedger};
use super::proposals::{summarize_proposals, ProposalPolicy, ProposalReport, ProposalSummary};
use super::validate::ValidationReport;
use crate::abi::{GovernanceEvent, TimedGovernanceEvent, TokenTransfer};
use crate::chain::TokenMetadata;
use crate::primitives::{big_ratio, big_to_f64, dec_biguint, Address, H256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreasuryHolding {
    pub asset: String,
    pub amount: f64,
    pub price_usd: f64,
}

/// USD prices at the snapshot date, supplied from outside the chain.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TreasuryValuation {
    #[serde(default)]
    pub holdings: Vec<TreasuryHolding>,
    /// Values governance tokens sitting in treasury addresses, if set.
    #[serde(default)]
    pub governance_token_price_usd: Option<f64>,
}

impl TreasuryValuation {
    pub fn value(&self, treasury_tokens: &BigUint, decimals: u8) -> f64 {
        let listed: f64 = self.holdings.iter().map(|h| h.amount * h.price_usd).sum();
        let own = self
            .governance_token_price_usd
            .map(|p| big_to_f64(treasury_tokens) / 10f64.powi(i32::from(decimals)) * p)
            .unwrap_or(0.0);
        listed + own
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrityReport {
    pub validation: ValidationReport,
    pub proposals: ProposalReport,
    pub warnings: Vec<String>,
}

/// The harmonised view of one DAO at its snapshot block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DaoRecord {
    pub dao_id: String,
    pub chain_id: u64,
    pub snapshot_block: u64,
    pub snapshot_time: i64,
    pub proposals: Vec<ProposalSummary>,
    pub voters: BTreeSet<Address>,
    pub proposers: BTreeSet<Address>,
    /// Addresses holding a nonzero token balance at the snapshot.
    pub total_members: u64,
    /// Addresses that voted or proposed.
    pub active_members: u64,
    pub treasury_usd: Option<f64>,
    #[serde(with = "dec_biguint")]
    pub total_supply: BigUint,
    #[serde(with = "dec_biguint")]
    pub circulating_supply: BigUint,
    pub token_symbol: String,
    pub token_decimals: u8,
    pub largest_holder: Option<Address>,
    /// Largest holder's fraction of circulating supply.
    pub largest_holder_share: Option<f64>,
    pub fully_automated: bool,
    /// Whether any proposal was executed by the governance contract itself.
    pub automation_detected: bool,
    pub proposer_concentration: Option<f64>,
    /// Times of distinct governance transactions, ascending.
    pub activity: Vec<i64>,
    pub tier: ActivityTier,
    pub integrity: IntegrityReport,
}

impl DaoRecord {
    pub fn approved_count(&self) -> usize {
        self.proposals.iter().filter(|p| p.outcome == super::Outcome::Approved).count()
    }
}

pub struct DaoInputs<'a> {
    pub dao_id: &'a str,
    pub chain_id: u64,
    pub snapshot_block: u64,
    pub governance: &'a [TimedGovernanceEvent],
    /// Sorted by `(block_number, log_index)`.
    pub transfers: &'a [TokenTransfer],
    pub token: Option<&'a TokenMetadata>,
    pub timestamps: &'a BTreeMap<u64, i64>,
    /// `policy.now` doubles as the snapshot time.
    pub policy: ProposalPolicy,
    pub treasury: Option<&'a TreasuryValuation>,
    pub treasury_addresses: &'a BTreeSet<Address>,
    pub locked_addresses: &'a BTreeSet<Address>,
    pub fully_automated: Option<bool>,
    pub validation: ValidationReport,
}

pub fn build_dao_record(inp: DaoInputs<'_>) -> Result<DaoRecord, BalanceError> {
    let mut warnings = Vec::new();
    let governance: Vec<TimedGovernanceEvent> =
        inp.governance.iter().filter(|e| e.block_number <= inp.snapshot_block).cloned().collect();

    let (proposals, proposal_report) = summarize_proposals(&governance, inp.timestamps, &inp.policy);
    let proposers: BTreeSet<Address> = proposals.iter().map(|p| p.proposer).collect();
    let voters: BTreeSet<Address> = governance
        .iter()
        .filter_map(|e| match &e.event {
            GovernanceEvent::VoteCast { voter, .. } => Some(*voter),
            _ => None,
        })
        .collect();
    let active_members = voters.union(&proposers).count() as u64;

    let mut ledger = BalanceLedger::new();
    ledger.advance(inp.transfers, inp.snapshot_block)?;
    let burn_sinks = BTreeSet::from([Address::DEAD]);
    let total_members = ledger.balances().keys().filter(|a| !a.is_burn()).count() as u64;
    if active_members > total_members {
        warnings.push(format!(
            "{active_members} active members exceed {total_members} token holders; participation is capped at 1"
        ));
    }

    let total_supply = ledger.supply();
    let excluded: BTreeSet<Address> =
        inp.treasury_addresses.iter().chain(inp.locked_addresses).chain(&burn_sinks).copied().collect();
    let circulating_supply = &total_supply - ledger.held_by(&excluded);
    let largest = ledger.largest_holder(&excluded);
    let largest_holder_share = largest.and_then(|(_, b)| big_ratio(b, &circulating_supply));

    let (token_symbol, token_decimals) = match inp.token {
        Some(m) => {
            if m.total_supply != total_supply {
                warnings.push(format!(
                    "reported totalSupply {} differs from minted minus burned {}",
                    m.total_supply, total_supply
                ));
            }
            if m.decimals_defaulted {
                warnings.push("token has no decimals(); assumed 18".into());
            }
            (m.symbol.clone(), m.decimals)
        }
        None => (String::new(), 18),
    };
    let treasury_usd = inp.treasury.map(|t| t.value(&ledger.held_by(inp.treasury_addresses), token_decimals));

    let mut by_proposer: BTreeMap<Address, usize> = BTreeMap::new();
    for p in &proposals {
        *by_proposer.entry(p.proposer).or_default() += 1;
    }
    let proposer_concentration = by_proposer.values().max().map(|top| *top as f64 / proposals.len() as f64);

    let automation_detected = governance.iter().any(|e| matches!(e.event, GovernanceEvent::ProposalExecuted { .. }));

    let mut txs: BTreeMap<H256, i64> = BTreeMap::new();
    for e in &governance {
        txs.entry(e.tx_hash).or_insert(e.timestamp_utc);
    }
    let mut activity: Vec<i64> = txs.into_values().collect();
    activity.sort_unstable();
    let now = inp.policy.now;

    Ok(DaoRecord {
        dao_id: inp.dao_id.to_string(),
        chain_id: inp.chain_id,
        snapshot_block: inp.snapshot_block,
        snapshot_time: now,
        tier: classify_timeline(&activity, now),
        proposals,
        voters,
        proposers,
        total_members,
        active_members,
        treasury_usd,
        total_supply,
        circulating_supply,
        token_symbol,
        token_decimals,
        largest_holder: largest.map(|(a, _)| a),
        largest_holder_share,
        fully_automated: inp.fully_automated.unwrap_or(automation_detected),
        automation_detected,
        proposer_concentration,
        activity,
        integrity: IntegrityReport { validation: inp.validation, proposals: proposal_report, warnings },
    })
}
