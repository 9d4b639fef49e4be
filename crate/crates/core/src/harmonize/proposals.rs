use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::abi::{GovernanceEvent, Support, TimedGovernanceEvent, VoteClock};
use crate::primitives::{dec_biguint, opt_dec_biguint, Address};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Approved,
    Rejected,
    Canceled,
    Pending,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProposalSummary {
    pub contract: Address,
    #[serde(with = "dec_biguint")]
    pub proposal_id: BigUint,
    pub proposer: Address,
    pub created_block: u64,
    pub created_at: i64,
    pub voting_start: i64,
    pub voting_end: i64,
    pub outcome: Outcome,
    pub executed: bool,
    #[serde(with = "dec_biguint")]
    pub votes_for: BigUint,
    #[serde(with = "dec_biguint")]
    pub votes_against: BigUint,
    #[serde(with = "dec_biguint")]
    pub votes_abstain: BigUint,
    pub vote_count: u64,
}

impl ProposalSummary {
    pub fn duration_seconds(&self) -> i64 {
        self.voting_end - self.voting_start
    }

    pub fn duration_days(&self) -> f64 {
        self.duration_seconds() as f64 / 86_400.0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProposalReport {
    /// Votes on proposals with no creation event.
    pub orphan_votes: u64,
    /// Execute, cancel or queue events with no creation event.
    pub orphan_lifecycle: u64,
    pub duplicate_creations: u64,
    /// Proposals dropped because a window bound had no usable timestamp.
    pub unresolved_windows: u64,
}

/// Converts block numbers to UTC seconds. Blocks missing from the map are
/// extrapolated from the nearest known block at a fixed block time, which
/// covers voting windows that end after the snapshot.
#[derive(Debug, Clone, Copy)]
pub struct BlockClock<'a> {
    pub known: &'a BTreeMap<u64, i64>,
    pub seconds_per_block: i64,
}

impl BlockClock<'_> {
    pub fn at(&self, block: u64) -> Option<i64> {
        if let Some(ts) = self.known.get(&block) {
            return Some(*ts);
        }
        let spb = self.seconds_per_block;
        if let Some((b, ts)) = self.known.range(..block).next_back() {
            return Some(ts + (block - b) as i64 * spb);
        }
        self.known.range(block..).next().map(|(b, ts)| ts - (b - block) as i64 * spb)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProposalPolicy {
    /// Minimum `for + abstain` weight; `None` disables the check.
    #[serde(default, with = "opt_dec_biguint")]
    pub quorum: Option<BigUint>,
    /// Evaluation time (snapshot block timestamp); windows ending later are pending.
    pub now: i64,
    #[serde(default)]
    pub clock: VoteClock,
    pub seconds_per_block: i64,
}

struct Draft {
    summary: ProposalSummary,
    canceled: bool,
}

/// Folds governance events into one summary per created proposal, in
/// creation order.
///
/// Outcome, first match wins: executed on chain → approved; canceled →
/// canceled; window still open at `policy.now` → pending; `for > against`
/// with quorum met → approved; otherwise rejected.
pub fn summarize_proposals(
    events: &[TimedGovernanceEvent],
    timestamps: &BTreeMap<u64, i64>,
    policy: &ProposalPolicy,
) -> (Vec<ProposalSummary>, ProposalReport) {
    let clock = BlockClock { known: timestamps, seconds_per_block: policy.seconds_per_block };
    let to_utc = |v: u64| match policy.clock {
        VoteClock::Block => clock.at(v),
        VoteClock::Timestamp => i64::try_from(v).ok(),
    };
    let mut report = ProposalReport::default();
    let mut order: Vec<(Address, BigUint)> = Vec::new();
    let mut drafts: HashMap<(Address, BigUint), Draft> = HashMap::new();

    let mut sorted: Vec<&TimedGovernanceEvent> = events.iter().collect();
    sorted.sort_by_key(|e| (e.block_number, e.log_index));

    for te in &sorted {
        if let GovernanceEvent::ProposalCreated { proposal_id, proposer, vote_start, vote_end, .. } = &te.event {
            let key = (te.contract, proposal_id.clone());
            if drafts.contains_key(&key) {
                report.duplicate_creations += 1;
                continue;
            }
            let (Some(start), Some(end)) = (to_utc(*vote_start), to_utc(*vote_end)) else {
                report.unresolved_windows += 1;
                continue;
            };
            order.push(key.clone());
            drafts.insert(
                key,
                Draft {
                    summary: ProposalSummary {
                        contract: te.contract,
                        proposal_id: proposal_id.clone(),
                        proposer: *proposer,
                        created_block: te.block_number,
                        created_at: te.timestamp_utc,
                        voting_start: start,
                        voting_end: end,
                        outcome: Outcome::Pending,
                        executed: false,
                        votes_for: BigUint::default(),
                        votes_against: BigUint::default(),
                        votes_abstain: BigUint::default(),
                        vote_count: 0,
                    },
                    canceled: false,
                },
            );
        }
    }

    for te in &sorted {
        let key = (te.contract, te.event.proposal_id().clone());
        let draft = drafts.get_mut(&key);
        match (&te.event, draft) {
            (GovernanceEvent::ProposalCreated { .. }, _) => {}
            (GovernanceEvent::VoteCast { .. }, None) => report.orphan_votes += 1,
            (_, None) => {
                log::warn!("proposal {} on {} has lifecycle events but no creation event", key.1, key.0);
                report.orphan_lifecycle += 1;
            }
            (GovernanceEvent::VoteCast { support, weight, .. }, Some(d)) => {
                let s = &mut d.summary;
                s.vote_count += 1;
                match support {
                    Support::For => s.votes_for += weight,
                    Support::Against => s.votes_against += weight,
                    Support::Abstain => s.votes_abstain += weight,
                }
            }
            (GovernanceEvent::ProposalExecuted { .. }, Some(d)) => d.summary.executed = true,
            (GovernanceEvent::ProposalCanceled { .. }, Some(d)) => d.canceled = true,
            (GovernanceEvent::ProposalQueued { .. }, Some(_)) => {}
        }
    }

    let summaries = order
        .into_iter()
        .map(|key| {
            let Draft { mut summary, canceled } = drafts.remove(&key).expect("drafted");
            summary.outcome = outcome(&summary, canceled, policy);
            summary
        })
        .collect();
    (summaries, report)
}

fn outcome(s: &ProposalSummary, canceled: bool, policy: &ProposalPolicy) -> Outcome {
    if s.executed {
        Outcome::Approved
    } else if canceled {
        Outcome::Canceled
    } else if s.voting_end > policy.now {
        Outcome::Pending
    } else {
        let quorum_met = policy.quorum.as_ref().is_none_or(|q| &(&s.votes_for + &s.votes_abstain) >= q);
        if s.votes_for > s.votes_against && quorum_met {
            Outcome::Approved
        } else {
            Outcome::Rejected
        }
    }
}
