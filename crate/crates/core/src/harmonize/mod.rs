//! Turning decoded events into per-DAO records: deduplication, balance
//! replay, proposal outcomes and activity tiers.

mod activity;
mod balances;
mod proposals;
mod record;
mod validate;

pub use activity::{classify_activity, classify_timeline, ActivityTier, DAY};
pub use balances::{reconstruct_balances, BalanceError, BalanceLedger};
pub use proposals::{summarize_proposals, BlockClock, Outcome, ProposalPolicy, ProposalReport, ProposalSummary};
pub use record::{build_dao_record, DaoInputs, DaoRecord, IntegrityReport, TreasuryHolding, TreasuryValuation};
pub use validate::{dedup_and_validate, enrich_timestamps, ValidationReport};
