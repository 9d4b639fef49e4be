//! Seeded generator of synthetic DAOs with known KPI ground truth.
//!
//! Every DAO is emitted as encoded wire logs (token transfers plus
//! governance events) that the ordinary decoding pipeline consumes. The
//! [`GroundTruth`] is computed from the generator's own bookkeeping and an
//! independent level classifier, never from pipeline code.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abi::{encode_log, transfer_spec, AbiEventSpec, AbiValue, EventRole, GovernanceInterface, SolType, Support};
use crate::chain::mock::{MockNode, MockToken};
use crate::chain::{ChainEndpoint, ContractKind, ContractRef, RawLog};
use crate::harmonize::{TreasuryHolding, TreasuryValuation};
use crate::kpi::Level;
use crate::pipeline::DaoSource;
use crate::primitives::{dec_biguint, Address, H256};
use crate::rng::SplitMix64;

pub const SECONDS_PER_BLOCK: i64 = 12;
pub const GENESIS_TIME: i64 = 1_600_000_000;
pub const TOKEN_DECIMALS: u8 = 18;
pub const TOKEN_SYMBOL: &str = "SYN";
const BLOCKS_PER_DAY: f64 = 86_400.0 / SECONDS_PER_BLOCK as f64;
const MINTS_PER_BLOCK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HolderDistribution {
    /// Balances uniform between 1 and 1000 tokens.
    Uniform,
    /// Pareto tail with shape `alpha`, scale 10 tokens.
    Pareto { alpha: f64 },
    /// One holder owns `share` of circulating supply, the rest are uniform.
    SingleWhale { share: f64 },
}

fn bravo() -> String {
    "governor_bravo".into()
}

fn mainnet() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub seed: u64,
    pub member_count: u64,
    pub participation_target: f64,
    pub proposal_count: u64,
    pub approval_target: f64,
    pub duration_days_range: (f64, f64),
    pub holder_distribution: HolderDistribution,
    pub automated: bool,
    pub treasury_usd: f64,
    /// Fraction of total supply minted to the treasury address.
    #[serde(default)]
    pub treasury_token_share: f64,
    #[serde(default = "bravo")]
    pub framework: String,
    #[serde(default = "mainnet")]
    pub chain_id: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            seed: 0,
            member_count: 100,
            participation_target: 0.25,
            proposal_count: 10,
            approval_target: 0.6,
            duration_days_range: (3.0, 7.0),
            holder_distribution: HolderDistribution::Uniform,
            automated: true,
            treasury_usd: 5e8,
            treasury_token_share: 0.0,
            framework: bravo(),
            chain_id: mainnet(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("{field} must lie in [0, 1], got {value}")]
    OutOfRange { field: &'static str, value: f64 },
    #[error("infeasible spec: {0}")]
    Infeasible(String),
    #[error("unknown governance framework {0:?}")]
    UnknownFramework(String),
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        for (field, value) in [
            ("participation_target", self.participation_target),
            ("approval_target", self.approval_target),
            ("treasury_token_share", self.treasury_token_share),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(SpecError::OutOfRange { field, value });
            }
        }
        let infeasible = |m: &str| Err(SpecError::Infeasible(m.to_string()));
        if self.treasury_token_share >= 1.0 {
            return infeasible("the treasury cannot hold the entire supply");
        }
        let (lo, hi) = self.duration_days_range;
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
            return infeasible("duration_days_range must satisfy 0 <= min <= max");
        }
        if !(self.treasury_usd.is_finite() && self.treasury_usd >= 0.0) {
            return infeasible("treasury_usd must be a nonnegative number");
        }
        match self.holder_distribution {
            HolderDistribution::Pareto { alpha } if !(alpha.is_finite() && alpha > 0.0) => {
                return infeasible("pareto alpha must be positive");
            }
            HolderDistribution::SingleWhale { share } if !(share > 0.0 && share < 1.0) => {
                return Err(SpecError::OutOfRange { field: "single_whale.share", value: share });
            }
            _ => {}
        }
        if self.member_count == 0 && (self.participation_target > 0.0 || self.proposal_count > 0) {
            return infeasible("participation or proposals need at least one member");
        }
        if self.proposal_count == 0 && (self.participation_target > 0.0 || self.approval_target > 0.0) {
            return infeasible("participation and approval targets need at least one proposal");
        }
        if self.member_count > 1_000_000 {
            return infeasible("member_count above 1,000,000");
        }
        if crate::abi::presets::governance(&self.framework).is_none() {
            return Err(SpecError::UnknownFramework(self.framework.clone()));
        }
        Ok(())
    }
}

/// KPI inputs and expected levels, counted while generating.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub total_members: u64,
    pub active_members: u64,
    pub participation_rate: f64,
    pub proposal_count: u64,
    pub approved: u64,
    pub approval_rate: Option<f64>,
    pub avg_duration_days: Option<f64>,
    pub vote_count: u64,
    pub voters: Vec<Address>,
    pub proposers: Vec<Address>,
    #[serde(with = "dec_biguint")]
    pub minted: BigUint,
    #[serde(with = "dec_biguint")]
    pub burned: BigUint,
    #[serde(with = "dec_biguint")]
    pub total_supply: BigUint,
    #[serde(with = "dec_biguint")]
    pub circulating_supply: BigUint,
    pub circulating_pct: f64,
    pub largest_holder: Address,
    pub largest_holder_share: f64,
    pub proposer_concentration: Option<f64>,
    pub treasury_usd: f64,
    pub fully_automated: bool,
    pub participation: Option<Level>,
    pub funds: Option<Level>,
    pub voting: Option<Level>,
    pub decentralisation: Option<Level>,
    /// Scores in hundredths, in KPI order participation, funds, voting,
    /// decentralisation.
    pub scores_centi: [Option<u32>; 4],
    pub composite_centi: Option<u32>,
}

/// One generated DAO: its contracts, wire logs and ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthDao {
    pub dao_id: String,
    pub spec: SynthSpec,
    pub governance: Address,
    pub token: Address,
    pub treasury: Address,
    pub deploy_block: u64,
    /// Last block carrying any of this DAO's logs.
    pub last_block: u64,
    #[serde(with = "dec_biguint")]
    pub token_supply: BigUint,
    pub logs: Vec<RawLog>,
    pub truth: GroundTruth,
}

impl SynthDao {
    /// Adds the DAO's logs and token contract to `node`.
    pub fn install(&self, node: &mut MockNode) {
        node.add_logs(self.logs.iter().cloned());
        node.add_token(
            self.token,
            MockToken {
                decimals: Some(TOKEN_DECIMALS),
                total_supply: self.token_supply.clone(),
                symbol: TOKEN_SYMBOL.into(),
            },
        );
    }
}

/// Endpoint settings under which synthetic fixtures are recorded.
pub fn endpoint(chain_id: u64, rpc_url: &str) -> ChainEndpoint {
    ChainEndpoint { chain_id, rpc_url: rpc_url.into(), max_block_span: 50_000, rate_limit: 1e6, max_results: None }
}

impl SynthDao {
    /// The pipeline configuration matching this DAO. The treasury is valued
    /// as a single stablecoin holding worth exactly `treasury_usd`.
    pub fn source(&self) -> DaoSource {
        let contract = |address, kind| ContractRef {
            address,
            chain_id: self.spec.chain_id,
            deploy_block: self.deploy_block,
            kind,
        };
        DaoSource {
            dao_id: self.dao_id.clone(),
            chain_id: self.spec.chain_id,
            governance: vec![contract(self.governance, ContractKind::Governance)],
            token: contract(self.token, ContractKind::Token),
            treasury: Some(TreasuryValuation {
                holdings: vec![TreasuryHolding {
                    asset: "USDC".into(),
                    amount: self.spec.treasury_usd,
                    price_usd: 1.0,
                }],
                governance_token_price_usd: None,
            }),
            treasury_addresses: BTreeSet::from([self.treasury]),
            locked_addresses: BTreeSet::new(),
            fully_automated: None,
            quorum: None,
        }
    }
}

/// A mock chain holding every DAO in `daos`, with a linear block clock.
pub fn build_node(daos: &[SynthDao]) -> MockNode {
    let head = daos.iter().map(|d| d.last_block).max().unwrap_or(0) + 100;
    let mut node = MockNode::new(head);
    node.set_linear_clock(GENESIS_TIME, SECONDS_PER_BLOCK);
    for d in daos {
        d.install(&mut node);
    }
    node
}

pub fn block_time(block: u64) -> i64 {
    GENESIS_TIME + block as i64 * SECONDS_PER_BLOCK
}

/// A varied spec derived from `seed`, for building corpora.
pub fn random_spec(seed: u64) -> SynthSpec {
    let mut r = SplitMix64::new(seed ^ 0x5EED_5EED_5EED_5EED);
    let frameworks = ["governor_bravo", "governor_alpha", "oz_governor"];
    let holder_distribution = match r.below(3) {
        0 => HolderDistribution::Uniform,
        1 => HolderDistribution::Pareto { alpha: 0.8 + r.next_f64() * 2.0 },
        _ => HolderDistribution::SingleWhale { share: 0.02 + r.next_f64() * 0.9 },
    };
    let lo = r.next_f64() * 10.0;
    SynthSpec {
        seed,
        member_count: r.range_inclusive(5, 400),
        participation_target: [0.02, 0.05, 0.2, 0.35, 0.6, 0.9][r.below(6) as usize] + r.next_f64() * 0.02,
        proposal_count: r.range_inclusive(1, 40),
        approval_target: r.next_f64(),
        duration_days_range: (lo, lo + r.next_f64() * 8.0),
        holder_distribution,
        automated: r.below(2) == 1,
        treasury_usd: 10f64.powf(5.0 + r.next_f64() * 5.0).round(),
        treasury_token_share: if r.below(2) == 1 { r.next_f64() * 0.8 } else { 0.0 },
        framework: frameworks[r.below(3) as usize].into(),
        chain_id: 1,
    }
}

/// `count` DAOs named `synth-00`, `synth-01`, ... with specs from `seed`.
pub fn corpus(seed: u64, count: usize) -> Result<Vec<SynthDao>, SpecError> {
    let mut r = SplitMix64::new(seed);
    (0..count).map(|i| generate(&format!("synth-{i:02}"), &random_spec(r.next_u64()))).collect()
}

fn one_token() -> BigUint {
    BigUint::from(10u32).pow(u32::from(TOKEN_DECIMALS))
}

/// `whole` tokens plus random dust below one token.
fn tokens(r: &mut SplitMix64, whole: u64) -> BigUint {
    BigUint::from(whole) * one_token() + BigUint::from(r.below(1_000_000_000_000_000_000))
}

/// Between `lo` and `hi` whole tokens, plus dust.
fn tokens_in(r: &mut SplitMix64, lo: u64, hi: u64) -> BigUint {
    let whole = r.range_inclusive(lo, hi);
    tokens(r, whole)
}

fn ratio(a: &BigUint, b: &BigUint) -> f64 {
    a.to_f64().unwrap_or(f64::INFINITY) / b.to_f64().unwrap_or(f64::INFINITY)
}

fn fresh_address(r: &mut SplitMix64, taken: &mut BTreeSet<Address>) -> Address {
    loop {
        let a = Address(r.bytes::<20>());
        if !a.is_burn() && taken.insert(a) {
            return a;
        }
    }
}

/// Pending log: ordered by block, then by emission order within the block.
struct Emit {
    block: u64,
    address: Address,
    topics: Vec<H256>,
    data: Vec<u8>,
}

struct Encoder {
    iface: GovernanceInterface,
}

impl Encoder {
    fn role_event(&self, pick: impl Fn(&EventRole) -> bool) -> (&AbiEventSpec, &EventRole) {
        let (name, role) = self.iface.mapping.events.iter().find(|(_, r)| pick(r)).expect("mapping covers every role");
        (self.iface.spec(name).expect("mapping validated against ABI"), role)
    }

    /// Encodes `spec` with the named parameters set and all others zeroed.
    fn encode(spec: &AbiEventSpec, named: &[(&str, AbiValue)]) -> (Vec<H256>, Vec<u8>) {
        let values: Vec<AbiValue> = spec
            .inputs
            .iter()
            .map(|p| named.iter().find(|(n, _)| *n == p.name).map(|(_, v)| v.clone()).unwrap_or_else(|| zero(&p.kind)))
            .collect();
        encode_log(spec, &values).expect("generated values fit their types")
    }

    fn support(&self, spec: &AbiEventSpec, param: &str, s: Support) -> AbiValue {
        let kind = &spec.inputs.iter().find(|p| p.name == param).expect("support param").kind;
        if *kind == SolType::Bool {
            return AbiValue::Bool(s == Support::For);
        }
        let code = self.iface.mapping.support_values.iter().find(|(_, v)| **v == s).map(|(k, _)| k.as_str());
        AbiValue::Uint(code.and_then(|c| c.parse::<u64>().ok()).expect("support code mapped").into())
    }

    fn supports_abstain(&self, spec: &AbiEventSpec, param: &str) -> bool {
        let kind = &spec.inputs.iter().find(|p| p.name == param).expect("support param").kind;
        *kind != SolType::Bool && self.iface.mapping.support_values.values().any(|v| *v == Support::Abstain)
    }
}

fn zero(t: &SolType) -> AbiValue {
    match t {
        SolType::Address => AbiValue::Address(Address::ZERO),
        SolType::Bool => AbiValue::Bool(false),
        SolType::Uint(_) => AbiValue::Uint(BigUint::zero()),
        SolType::Int(_) => AbiValue::Int(0.into()),
        SolType::FixedBytes(n) => AbiValue::FixedBytes(vec![0; usize::from(*n)]),
        SolType::Bytes => AbiValue::Bytes(Vec::new()),
        SolType::String => AbiValue::String(String::new()),
        SolType::FixedArray(inner, k) => AbiValue::Array(vec![zero(inner); *k]),
        SolType::Array(_) => AbiValue::Array(Vec::new()),
        SolType::Tuple(ts) => AbiValue::Array(ts.iter().map(zero).collect()),
    }
}

struct Proposal {
    id: u64,
    proposer: Address,
    created: u64,
    start: u64,
    end: u64,
    approved: bool,
    voters: Vec<Address>,
}

pub fn generate(dao_id: &str, spec: &SynthSpec) -> Result<SynthDao, SpecError> {
    spec.validate()?;
    let iface = GovernanceInterface::preset(&spec.framework)
        .map_err(|_| SpecError::UnknownFramework(spec.framework.clone()))?;
    let enc = Encoder { iface };
    let mut r = SplitMix64::new(spec.seed);
    let mut taken = BTreeSet::new();
    let governance = fresh_address(&mut r, &mut taken);
    let token = fresh_address(&mut r, &mut taken);
    let treasury = fresh_address(&mut r, &mut taken);
    let members: Vec<Address> = (0..spec.member_count).map(|_| fresh_address(&mut r, &mut taken)).collect();
    let deploy_block = 1 + r.below(1000);

    // Initial allocation.
    let alloc: Vec<BigUint> = match spec.holder_distribution {
        HolderDistribution::Uniform => members.iter().map(|_| tokens_in(&mut r, 1, 1000)).collect(),
        HolderDistribution::Pareto { alpha } => members
            .iter()
            .map(|_| {
                let u = 1.0 - r.next_f64();
                let whole = (10.0 * u.powf(-1.0 / alpha)).ceil().min(1e12) as u64;
                tokens(&mut r, whole)
            })
            .collect(),
        HolderDistribution::SingleWhale { share } => {
            let mut v: Vec<BigUint> = members.iter().map(|_| tokens_in(&mut r, 1, 1000)).collect();
            if v.len() > 1 {
                let others: BigUint = v[1..].iter().sum();
                let whale = (others.to_f64().unwrap_or(0.0) * share / (1.0 - share)).round();
                v[0] = BigUint::from(whale.max(1.0) as u128);
            }
            v
        }
    };
    let member_supply: BigUint = alloc.iter().sum();
    let treasury_alloc = if spec.treasury_token_share > 0.0 {
        let s = spec.treasury_token_share;
        BigUint::from((member_supply.to_f64().unwrap_or(0.0) * s / (1.0 - s)).round() as u128)
    } else {
        BigUint::zero()
    };

    let mut emits: Vec<Emit> = Vec::new();
    let transfer = transfer_spec();
    let emit_transfer = |emits: &mut Vec<Emit>, block: u64, from: Address, to: Address, amount: &BigUint| {
        let (topics, data) = Encoder::encode(
            &transfer,
            &[
                ("from", AbiValue::Address(from)),
                ("to", AbiValue::Address(to)),
                ("value", AbiValue::Uint(amount.clone())),
            ],
        );
        emits.push(Emit { block, address: token, topics, data });
    };

    let mut block = deploy_block;
    let mut recipients: Vec<(Address, BigUint)> = members.iter().copied().zip(alloc.iter().cloned()).collect();
    if !treasury_alloc.is_zero() {
        recipients.push((treasury, treasury_alloc.clone()));
    }
    for chunk in recipients.chunks(MINTS_PER_BLOCK) {
        for (to, amount) in chunk {
            emit_transfer(&mut emits, block, Address::ZERO, *to, amount);
        }
        block += 1;
    }
    let minted: BigUint = recipients.iter().map(|(_, a)| a).sum();

    // Governance timeline.
    let active: Vec<Address> = members.iter().copied().filter(|_| r.next_f64() < spec.participation_target).collect();
    let n = spec.proposal_count as usize;
    let approved_n = (spec.approval_target * n as f64).round() as usize;
    let mut approved_flags: Vec<bool> = (0..n).map(|i| i < approved_n).collect();
    r.shuffle(&mut approved_flags);
    let gov_start = block + 10;
    let mut created = gov_start;
    let (dlo, dhi) = spec.duration_days_range;
    let mut proposals: Vec<Proposal> = Vec::with_capacity(n);
    for (i, approved) in approved_flags.into_iter().enumerate() {
        let proposer = if active.is_empty() {
            members[r.below(members.len() as u64) as usize]
        } else {
            active[r.below(active.len() as u64) as usize]
        };
        let days = dlo + r.next_f64() * (dhi - dlo);
        let start = created + 1 + r.below(10);
        let end = start + (days * BLOCKS_PER_DAY).round() as u64;
        proposals.push(Proposal { id: i as u64 + 1, proposer, created, start, end, approved, voters: Vec::new() });
        created += 50 + r.below(5000);
    }
    let proposer_set: BTreeSet<Address> = proposals.iter().map(|p| p.proposer).collect();
    for v in &active {
        if proposer_set.contains(v) && r.below(2) == 0 {
            continue;
        }
        let k = 1 + r.below(3.min(n as u64)) as usize;
        let mut picks: Vec<usize> = (0..n).collect();
        r.shuffle(&mut picks);
        for &p in &picks[..k] {
            proposals[p].voters.push(*v);
        }
    }
    for p in &mut proposals {
        if p.approved && p.voters.is_empty() {
            p.voters.push(p.proposer);
        }
    }

    let (created_spec, created_role) = enc.role_event(|r| matches!(r, EventRole::ProposalCreated { .. }));
    let (vote_spec, vote_role) = enc.role_event(|r| matches!(r, EventRole::VoteCast { .. }));
    let (queue_spec, queue_role) = enc.role_event(|r| matches!(r, EventRole::ProposalQueued { .. }));
    let (exec_spec, exec_role) = enc.role_event(|r| matches!(r, EventRole::ProposalExecuted { .. }));
    let EventRole::ProposalCreated { proposal_id: c_id, proposer: c_prop, vote_start, vote_end, description } =
        created_role
    else {
        unreachable!()
    };
    let EventRole::VoteCast { voter: v_voter, proposal_id: v_id, support: v_support, weight: v_weight } = vote_role
    else {
        unreachable!()
    };
    let EventRole::ProposalQueued { proposal_id: q_id, eta: q_eta } = queue_role else { unreachable!() };
    let EventRole::ProposalExecuted { proposal_id: e_id } = exec_role else { unreachable!() };
    let abstain_ok = enc.supports_abstain(vote_spec, v_support);

    let mut vote_count = 0u64;
    let mut executed = 0u64;
    let mut last_block = block;
    for p in &proposals {
        let id = AbiValue::Uint(p.id.into());
        let (topics, data) = Encoder::encode(
            created_spec,
            &[
                (c_id, id.clone()),
                (c_prop, AbiValue::Address(p.proposer)),
                (vote_start, AbiValue::Uint(p.start.into())),
                (vote_end, AbiValue::Uint(p.end.into())),
                (description, AbiValue::String(format!("{dao_id} proposal {}", p.id))),
            ],
        );
        emits.push(Emit { block: p.created, address: governance, topics, data });

        // The first voter decides the outcome by outweighing everyone else.
        let weights: Vec<BigUint> = p.voters.iter().skip(1).map(|_| tokens_in(&mut r, 1, 100)).collect();
        let decisive: BigUint = weights.iter().sum::<BigUint>() + one_token();
        for (j, voter) in p.voters.iter().enumerate() {
            let (support, weight) = if j == 0 {
                (if p.approved { Support::For } else { Support::Against }, decisive.clone())
            } else {
                let s = match r.below(if abstain_ok { 3 } else { 2 }) {
                    0 => Support::For,
                    1 => Support::Against,
                    _ => Support::Abstain,
                };
                (s, weights[j - 1].clone())
            };
            let at = p.start + r.below(p.end - p.start + 1);
            let (topics, data) = Encoder::encode(
                vote_spec,
                &[
                    (v_voter, AbiValue::Address(*voter)),
                    (v_id, id.clone()),
                    (v_support, enc.support(vote_spec, v_support, support)),
                    (v_weight, AbiValue::Uint(weight)),
                ],
            );
            emits.push(Emit { block: at, address: governance, topics, data });
            vote_count += 1;
        }
        last_block = last_block.max(p.end);
        if p.approved && spec.automated {
            let eta = block_time(p.end + 1) + 2 * 86_400;
            let (topics, data) =
                Encoder::encode(queue_spec, &[(q_id, id.clone()), (q_eta, AbiValue::Uint((eta as u64).into()))]);
            emits.push(Emit { block: p.end + 1, address: governance, topics, data });
            let (topics, data) = Encoder::encode(exec_spec, &[(e_id, id)]);
            emits.push(Emit { block: p.end + 2, address: governance, topics, data });
            executed += 1;
            last_block = last_block.max(p.end + 2);
        }
    }

    // Secondary-market transfers and burns across the whole timeline,
    // never emptying a member's balance.
    let mut balances: BTreeMap<Address, BigUint> = recipients.iter().cloned().collect();
    let mut burned = BigUint::zero();
    let transfer_count = members.len() / 2 + if members.is_empty() { 0 } else { 3 };
    let mut blocks: Vec<u64> = (0..transfer_count).map(|_| r.range_inclusive(block, last_block.max(block))).collect();
    blocks.sort_unstable();
    for (i, at) in blocks.into_iter().enumerate() {
        let from = members[r.below(members.len() as u64) as usize];
        let bal = balances[&from].clone();
        let (to, amount) = match i % 8 {
            0 => (Address::ZERO, &bal / 4u32),
            1 => (Address::DEAD, &bal / 4u32),
            _ => {
                let to = members[r.below(members.len() as u64) as usize];
                let cap = &bal / 2u32;
                let amount = if cap.is_zero() { cap } else { BigUint::from(r.below(cap.to_u64().unwrap_or(u64::MAX))) };
                (to, amount)
            }
        };
        *balances.get_mut(&from).expect("member") -= &amount;
        if to.is_zero() {
            burned += &amount;
        } else {
            *balances.entry(to).or_default() += &amount;
        }
        emit_transfer(&mut emits, at, from, to, &amount);
    }

    // Wire form: log indices count up within each block.
    emits.sort_by_key(|e| e.block);
    let mut logs = Vec::with_capacity(emits.len());
    let mut index_in_block: BTreeMap<u64, u64> = BTreeMap::new();
    for e in emits {
        let idx = index_in_block.entry(e.block).or_default();
        logs.push(RawLog {
            address: e.address,
            topics: e.topics,
            data: e.data,
            block_number: e.block,
            tx_hash: H256(r.bytes::<32>()),
            log_index: *idx,
            block_timestamp: 0,
        });
        *idx += 1;
    }

    let total_supply = &minted - &burned;
    let zero = BigUint::zero();
    let dead = balances.get(&Address::DEAD).unwrap_or(&zero);
    let treasury_held = balances.get(&treasury).unwrap_or(&zero);
    let circulating = &total_supply - dead - treasury_held;
    let holders = balances.iter().filter(|(a, b)| !a.is_burn() && !b.is_zero()).count() as u64;
    let (largest_holder, largest) = balances
        .iter()
        .filter(|(a, _)| !a.is_burn() && **a != treasury)
        .fold((Address::ZERO, &zero), |best, (a, b)| if b > best.1 { (*a, b) } else { best });

    let voters: BTreeSet<Address> = proposals.iter().flat_map(|p| p.voters.iter().copied()).collect();
    let active_set: BTreeSet<Address> = voters.union(&proposer_set).copied().collect();
    let mut per_proposer: BTreeMap<Address, u64> = BTreeMap::new();
    for p in &proposals {
        *per_proposer.entry(p.proposer).or_default() += 1;
    }
    let durations: Vec<f64> =
        proposals.iter().map(|p| ((p.end - p.start) as i64 * SECONDS_PER_BLOCK) as f64 / 86_400.0).collect();
    let approved = proposals.iter().filter(|p| p.approved).count() as u64;

    let participation_rate = if holders == 0 { 0.0 } else { (active_set.len() as f64 / holders as f64).min(1.0) };
    let approval_rate = (n > 0).then(|| approved as f64 / n as f64);
    let avg_duration_days = (n > 0).then(|| durations.iter().sum::<f64>() / n as f64);
    let circulating_pct = ratio(&circulating, &total_supply);
    let largest_holder_share = ratio(largest, &circulating);
    let fully_automated = executed > 0;

    let participation = (holders > 0).then(|| oracle::participation(participation_rate));
    let funds = Some(oracle::funds(spec.treasury_usd, circulating_pct));
    let voting = approval_rate.zip(avg_duration_days).map(|(a, d)| oracle::voting(a, d));
    let decentralisation = (!circulating.is_zero())
        .then(|| oracle::decentralisation(largest_holder_share, participation, fully_automated));
    let scores_centi = [
        participation.map(|l| oracle::score(0, l)),
        funds.map(|l| oracle::score(1, l)),
        voting.map(|l| oracle::score(2, l)),
        decentralisation.map(|l| oracle::score(3, l)),
    ];
    let composite_centi = scores_centi.iter().copied().sum::<Option<u32>>();

    let truth = GroundTruth {
        total_members: holders,
        active_members: active_set.len() as u64,
        participation_rate,
        proposal_count: n as u64,
        approved,
        approval_rate,
        avg_duration_days,
        vote_count,
        voters: voters.into_iter().collect(),
        proposers: proposer_set.into_iter().collect(),
        minted: minted.clone(),
        burned,
        total_supply: total_supply.clone(),
        circulating_supply: circulating,
        circulating_pct,
        largest_holder,
        largest_holder_share,
        proposer_concentration: per_proposer.values().max().map(|m| *m as f64 / n as f64),
        treasury_usd: spec.treasury_usd,
        fully_automated,
        participation,
        funds,
        voting,
        decentralisation,
        scores_centi,
        composite_centi,
    };
    Ok(SynthDao {
        dao_id: dao_id.to_string(),
        spec: spec.clone(),
        governance,
        token,
        treasury,
        deploy_block,
        last_block: last_block.max(block),
        token_supply: total_supply,
        logs,
        truth,
    })
}

/// Stand-alone classifier used only to produce expected levels.
mod oracle {
    use crate::kpi::Level;

    pub fn participation(rate: f64) -> Level {
        if rate > 0.40 {
            Level::High
        } else if rate >= 0.10 {
            Level::Medium
        } else {
            Level::Low
        }
    }

    pub fn funds(usd: f64, circulating: f64) -> Level {
        if usd > 1_000_000_000.0 {
            Level::High
        } else if usd < 100_000_000.0 {
            Level::Low
        } else if circulating > 0.5 {
            Level::MediumHigh
        } else {
            Level::MediumLow
        }
    }

    pub fn voting(approval: f64, days: f64) -> Level {
        let window_ok = (3.0..=14.0).contains(&days);
        if approval > 0.70 && window_ok {
            Level::High
        } else if approval >= 0.30 && window_ok {
            Level::Medium
        } else {
            Level::Low
        }
    }

    pub fn decentralisation(share: f64, participation: Option<Level>, automated: bool) -> Level {
        let engaged = matches!(participation, Some(Level::Medium | Level::High));
        if share < 0.10 {
            Level::High
        } else if share < 0.33 {
            match (engaged, automated) {
                (true, true) => Level::MediumHigh,
                (true, false) => Level::Medium,
                _ => Level::MediumLow,
            }
        } else if share < 0.66 {
            Level::MediumLow
        } else {
            Level::Low
        }
    }

    /// Index 0..4 is participation, funds, voting, decentralisation.
    pub fn score(kpi: usize, level: Level) -> u32 {
        let table: [[u32; 5]; 4] = [
            // Low, Medium-Low, Medium, Medium-High, High
            [100, 0, 200, 0, 300],
            [75, 150, 0, 225, 300],
            [100, 0, 200, 0, 300],
            [60, 120, 180, 240, 300],
        ];
        let col = match level {
            Level::Low => 0,
            Level::MediumLow => 1,
            Level::Medium => 2,
            Level::MediumHigh => 3,
            Level::High => 4,
        };
        table[kpi][col]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whale_spec_is_low_decentralisation() {
        let spec = SynthSpec {
            seed: 42,
            holder_distribution: HolderDistribution::SingleWhale { share: 0.70 },
            ..Default::default()
        };
        let d = generate("whale", &spec).unwrap();
        assert_eq!(d.truth.decentralisation, Some(Level::Low));
        assert!((d.truth.largest_holder_share - 0.70).abs() < 0.01);
    }

    #[test]
    fn participation_target_is_met() {
        let spec = SynthSpec {
            seed: 7,
            participation_target: 0.5,
            member_count: 1000,
            proposal_count: 30,
            ..Default::default()
        };
        let d = generate("p", &spec).unwrap();
        assert!((d.truth.participation_rate - 0.5).abs() <= 0.02, "{}", d.truth.participation_rate);
        assert_eq!(d.truth.participation_rate, d.truth.active_members as f64 / d.truth.total_members as f64);
    }

    #[test]
    fn same_spec_same_bytes() {
        let spec = random_spec(3);
        let a = serde_json::to_string(&generate("x", &spec).unwrap()).unwrap();
        let b = serde_json::to_string(&generate("x", &spec).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn infeasible_specs_rejected() {
        let bad = SynthSpec { member_count: 0, participation_target: 0.3, ..Default::default() };
        assert!(matches!(generate("x", &bad), Err(SpecError::Infeasible(_))));
        let bad = SynthSpec { approval_target: 1.5, ..Default::default() };
        assert!(matches!(bad.validate(), Err(SpecError::OutOfRange { .. })));
        let bad = SynthSpec { framework: "dao_stack".into(), ..Default::default() };
        assert_eq!(bad.validate(), Err(SpecError::UnknownFramework("dao_stack".into())));
    }

    #[test]
    fn approval_count_is_exact() {
        let spec = SynthSpec { seed: 1, proposal_count: 20, approval_target: 0.35, ..Default::default() };
        assert_eq!(generate("a", &spec).unwrap().truth.approved, 7);
    }

    #[test]
    fn every_framework_encodes() {
        for fw in crate::abi::presets::PRESET_NAMES {
            let spec = SynthSpec { framework: fw.into(), ..Default::default() };
            assert!(!generate("f", &spec).unwrap().logs.is_empty(), "{fw}");
        }
    }
}
