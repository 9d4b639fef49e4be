//! Generated DAOs run through fetch, decode, build and KPI assessment must
//! reproduce the generator's ground truth.

use daokpi_core::abi::GovernanceInterface;
use daokpi_core::chain::mock::MockNode;
use daokpi_core::chain::ChainClient;
use daokpi_core::kpi::{assess_record, Kpi};
use daokpi_core::pipeline::{build_record, decode_dao, fetch_dao};
use daokpi_core::synth::{self, random_spec, SynthDao, SECONDS_PER_BLOCK};

pub const RATE_TOL: f64 = 1e-12;
pub const FIRST_SEED: u64 = 1000;
pub const SPECS: u64 = 25;

fn same_eq<T: PartialEq + std::fmt::Debug>(got: T, want: T, what: String) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: {got:?} vs {want:?}"))
    }
}

fn same_rate(got: Option<f64>, want: Option<f64>, what: String) -> Result<(), String> {
    let close = match (got, want) {
        (Some(x), Some(y)) => (x - y).abs() <= RATE_TOL,
        (x, y) => x == y,
    };
    if close {
        Ok(())
    } else {
        Err(format!("{what}: {got:?} vs {want:?}"))
    }
}

/// The 25 fixed-seed DAOs.
pub fn specs() -> Vec<SynthDao> {
    (0..SPECS).map(|i| synth::generate(&format!("dao-{i:02}"), &random_spec(FIRST_SEED + i)).unwrap()).collect()
}

pub fn check(d: &SynthDao, node: &MockNode, snapshot: u64) -> Result<(), String> {
    let id = &d.dao_id;
    let client = ChainClient::new(synth::endpoint(1, "mock"), node);
    let src = d.source();
    let raw = fetch_dao(&client, &src, snapshot).map_err(|e| format!("{id} fetch: {e}"))?;
    let iface = GovernanceInterface::preset(&d.spec.framework).map_err(|e| format!("{id}: {e}"))?;
    let decoded = decode_dao(&raw, &iface);
    same_eq(decoded.drops.total().dropped(), 0, format!("{id} dropped logs"))?;
    same_eq(decoded.mapping_rejections, 0, format!("{id} mapping rejections"))?;
    let record = build_record(&decoded, &src, SECONDS_PER_BLOCK).map_err(|e| format!("{id} build: {e}"))?;
    let a = assess_record(&record);
    let t = &d.truth;

    same_eq(record.total_members, t.total_members, format!("{id} members"))?;
    same_eq(record.active_members, t.active_members, format!("{id} active"))?;
    same_eq(record.proposals.len() as u64, t.proposal_count, format!("{id} proposals"))?;
    same_eq(record.approved_count() as u64, t.approved, format!("{id} approved"))?;
    same_eq(record.proposals.iter().map(|p| p.vote_count).sum::<u64>(), t.vote_count, format!("{id} votes"))?;
    same_eq(&record.voters.iter().copied().collect::<Vec<_>>(), &t.voters, format!("{id} voters"))?;
    same_eq(&record.total_supply, &t.total_supply, format!("{id} supply"))?;
    same_eq(&record.circulating_supply, &t.circulating_supply, format!("{id} circulating"))?;
    same_eq(record.largest_holder, Some(t.largest_holder), format!("{id} largest holder"))?;
    same_eq(record.fully_automated, t.fully_automated, format!("{id} automation"))?;
    same_eq(record.treasury_usd, Some(t.treasury_usd), format!("{id} treasury"))?;

    let m = &a.metrics;
    same_rate(m.participation.rate, Some(t.participation_rate), format!("{id} participation rate"))?;
    same_rate(m.treasury.circulating_pct, Some(t.circulating_pct), format!("{id} circulating pct"))?;
    same_rate(m.decentralisation.largest_holder_share, Some(t.largest_holder_share), format!("{id} holder share"))?;
    same_rate(m.voting.approval_rate, t.approval_rate, format!("{id} approval"))?;
    same_rate(m.voting.avg_duration_days, t.avg_duration_days, format!("{id} duration"))?;
    same_rate(m.proposer_concentration, t.proposer_concentration, format!("{id} proposer concentration"))?;

    let levels = [t.participation, t.funds, t.voting, t.decentralisation];
    for (i, kpi) in Kpi::ALL.into_iter().enumerate() {
        same_eq(a.get(kpi).level(), levels[i], format!("{id} {} level", kpi.name()))?;
        same_eq(a.get(kpi).score_centi(), t.scores_centi[i], format!("{id} {} score", kpi.name()))?;
    }
    same_eq(a.composite.map(|c| (c * 100.0).round() as u32), t.composite_centi, format!("{id} composite"))
}

/// Runs every spec through one shared node.
pub fn check_all(daos: &[SynthDao]) -> Result<(), String> {
    let node = synth::build_node(daos);
    let snapshot = node.head();
    daos.iter().try_for_each(|d| check(d, &node, snapshot))
}
