//! Normalization of framework-specific governance events.
//!
//! Governor Alpha, Governor Bravo and OpenZeppelin Governor name their
//! events and parameters differently. A [`GovernanceMapping`] table, loaded
//! from config, says which event plays which role and which parameter holds
//! each field, so the rest of the pipeline only sees [`GovernanceEvent`].

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::codec::AbiValue;
use super::log::DecodedEvent;
use super::spec::{parse_abi_lenient, AbiEventSpec, SkippedEvent};
use super::{AbiError, LogDecoder};
use crate::primitives::{dec_biguint, Address, H256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    Against,
    For,
    Abstain,
}

/// Whether `vote_start` / `vote_end` are block numbers or UTC seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoteClock {
    #[default]
    Block,
    Timestamp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum EventRole {
    ProposalCreated { proposal_id: String, proposer: String, vote_start: String, vote_end: String, description: String },
    VoteCast { voter: String, proposal_id: String, support: String, weight: String },
    ProposalExecuted { proposal_id: String },
    ProposalCanceled { proposal_id: String },
    ProposalQueued { proposal_id: String, eta: String },
}

impl EventRole {
    fn referenced_params(&self) -> Vec<&str> {
        match self {
            EventRole::ProposalCreated { proposal_id, proposer, vote_start, vote_end, description } => {
                vec![proposal_id, proposer, vote_start, vote_end, description]
            }
            EventRole::VoteCast { voter, proposal_id, support, weight } => vec![voter, proposal_id, support, weight],
            EventRole::ProposalExecuted { proposal_id } | EventRole::ProposalCanceled { proposal_id } => {
                vec![proposal_id]
            }
            EventRole::ProposalQueued { proposal_id, eta } => vec![proposal_id, eta],
        }
    }
}

/// Event-name to role table for one governance framework.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GovernanceMapping {
    pub framework: String,
    #[serde(default)]
    pub clock: VoteClock,
    /// Integer support codes, e.g. `{"0": "against", "1": "for", "2": "abstain"}`.
    /// Boolean support parameters always read `false = against, true = for`.
    #[serde(default)]
    pub support_values: BTreeMap<String, Support>,
    pub events: BTreeMap<String, EventRole>,
    /// Optional precomputed topic-0 values by event name.
    #[serde(default)]
    pub topics: BTreeMap<String, H256>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MappingError {
    #[error("mapping {framework}: event {event} is not in the ABI")]
    UnknownEvent { framework: String, event: String },
    #[error("mapping {framework}: event {event} has no parameter {param}")]
    UnknownParam { framework: String, event: String, param: String },
    #[error("parameter {param} of {event} has unexpected value {value}")]
    BadValue { event: String, param: String, value: String },
    #[error("proposal {proposal_id}: vote_start {start} after vote_end {end}")]
    InvertedWindow { proposal_id: String, start: u64, end: u64 },
    #[error("invalid mapping document: {0}")]
    Parse(String),
}

impl GovernanceMapping {
    pub fn from_json(text: &str) -> Result<Self, MappingError> {
        serde_json::from_str(text).map_err(|e| MappingError::Parse(e.to_string()))
    }

    /// Checks every referenced event and parameter against the ABI.
    pub fn validate(&self, specs: &[AbiEventSpec]) -> Result<(), MappingError> {
        for (event, role) in &self.events {
            let spec = specs.iter().find(|s| &s.name == event).ok_or_else(|| MappingError::UnknownEvent {
                framework: self.framework.clone(),
                event: event.clone(),
            })?;
            for param in role.referenced_params() {
                if !spec.inputs.iter().any(|i| i.name == param) {
                    return Err(MappingError::UnknownParam {
                        framework: self.framework.clone(),
                        event: event.clone(),
                        param: param.to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GovernanceEvent {
    ProposalCreated {
        #[serde(with = "dec_biguint")]
        proposal_id: BigUint,
        proposer: Address,
        vote_start: u64,
        vote_end: u64,
        description: String,
    },
    VoteCast {
        voter: Address,
        #[serde(with = "dec_biguint")]
        proposal_id: BigUint,
        support: Support,
        #[serde(with = "dec_biguint")]
        weight: BigUint,
    },
    ProposalExecuted {
        #[serde(with = "dec_biguint")]
        proposal_id: BigUint,
    },
    ProposalCanceled {
        #[serde(with = "dec_biguint")]
        proposal_id: BigUint,
    },
    ProposalQueued {
        #[serde(with = "dec_biguint")]
        proposal_id: BigUint,
        eta: u64,
    },
}

impl GovernanceEvent {
    pub fn proposal_id(&self) -> &BigUint {
        match self {
            GovernanceEvent::ProposalCreated { proposal_id, .. }
            | GovernanceEvent::VoteCast { proposal_id, .. }
            | GovernanceEvent::ProposalExecuted { proposal_id }
            | GovernanceEvent::ProposalCanceled { proposal_id }
            | GovernanceEvent::ProposalQueued { proposal_id, .. } => proposal_id,
        }
    }
}

/// A governance event with its on-chain position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedGovernanceEvent {
    #[serde(flatten)]
    pub event: GovernanceEvent,
    pub contract: Address,
    pub block_number: u64,
    pub log_index: u64,
    pub tx_hash: H256,
    pub timestamp_utc: i64,
}

struct Fields<'a> {
    ev: &'a DecodedEvent,
}

impl Fields<'_> {
    fn get(&self, name: &str) -> Result<&AbiValue, MappingError> {
        self.ev.param(name).ok_or_else(|| self.bad(name, "<missing>"))
    }

    fn bad(&self, param: &str, value: impl ToString) -> MappingError {
        MappingError::BadValue { event: self.ev.event_name.clone(), param: param.to_string(), value: value.to_string() }
    }

    fn uint(&self, name: &str) -> Result<BigUint, MappingError> {
        match self.get(name)? {
            AbiValue::Uint(v) => Ok(v.clone()),
            other => Err(self.bad(name, format!("{other:?}"))),
        }
    }

    fn u64(&self, name: &str) -> Result<u64, MappingError> {
        let v = self.uint(name)?;
        v.to_u64().ok_or_else(|| self.bad(name, v))
    }

    fn address(&self, name: &str) -> Result<Address, MappingError> {
        self.get(name)?.as_address().ok_or_else(|| self.bad(name, "not an address"))
    }

    fn text(&self, name: &str) -> Result<String, MappingError> {
        match self.get(name)? {
            AbiValue::String(s) => Ok(s.clone()),
            AbiValue::Hashed(h) => Ok(h.to_string()),
            other => Err(self.bad(name, format!("{other:?}"))),
        }
    }
}

/// Normalizes `decoded` via `mapping`. Returns `Ok(None)` when the event
/// plays no role in the KPIs (admin events, token transfers).
pub fn map_to_governance(
    decoded: &DecodedEvent,
    mapping: &GovernanceMapping,
) -> Result<Option<GovernanceEvent>, MappingError> {
    let Some(role) = mapping.events.get(&decoded.event_name) else {
        return Ok(None);
    };
    let f = Fields { ev: decoded };
    let ev = match role {
        EventRole::ProposalCreated { proposal_id, proposer, vote_start, vote_end, description } => {
            let (start, end) = (f.u64(vote_start)?, f.u64(vote_end)?);
            let id = f.uint(proposal_id)?;
            if start > end {
                return Err(MappingError::InvertedWindow { proposal_id: id.to_string(), start, end });
            }
            GovernanceEvent::ProposalCreated {
                proposal_id: id,
                proposer: f.address(proposer)?,
                vote_start: start,
                vote_end: end,
                description: f.text(description)?,
            }
        }
        EventRole::VoteCast { voter, proposal_id, support, weight } => {
            let support_value = match f.get(support)? {
                AbiValue::Bool(true) => Some(Support::For),
                AbiValue::Bool(false) => Some(Support::Against),
                AbiValue::Uint(v) => mapping.support_values.get(&v.to_string()).copied(),
                _ => None,
            };
            GovernanceEvent::VoteCast {
                voter: f.address(voter)?,
                proposal_id: f.uint(proposal_id)?,
                support: support_value.ok_or_else(|| f.bad(support, format!("{:?}", f.get(support).ok())))?,
                weight: f.uint(weight)?,
            }
        }
        EventRole::ProposalExecuted { proposal_id } => {
            GovernanceEvent::ProposalExecuted { proposal_id: f.uint(proposal_id)? }
        }
        EventRole::ProposalCanceled { proposal_id } => {
            GovernanceEvent::ProposalCanceled { proposal_id: f.uint(proposal_id)? }
        }
        EventRole::ProposalQueued { proposal_id, eta } => {
            GovernanceEvent::ProposalQueued { proposal_id: f.uint(proposal_id)?, eta: f.u64(eta)? }
        }
    };
    Ok(Some(ev))
}

/// A governance contract interface: its ABI events plus the role mapping.
#[derive(Debug, Clone)]
pub struct GovernanceInterface {
    pub specs: Vec<AbiEventSpec>,
    pub skipped: Vec<SkippedEvent>,
    pub mapping: GovernanceMapping,
}

#[derive(Debug, Error)]
pub enum InterfaceError {
    #[error(transparent)]
    Abi(#[from] AbiError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error("unknown mapping preset {0:?}")]
    UnknownPreset(String),
}

impl GovernanceInterface {
    pub fn load(abi_text: &str, mapping: GovernanceMapping) -> Result<Self, InterfaceError> {
        let (specs, skipped) = parse_abi_lenient(abi_text)?;
        mapping.validate(&specs)?;
        Ok(GovernanceInterface { specs, skipped, mapping })
    }

    /// One of the shipped framework mappings: `governor_alpha`,
    /// `governor_bravo`, or `oz_governor`.
    pub fn preset(name: &str) -> Result<Self, InterfaceError> {
        let (abi, mapping) =
            super::presets::governance(name).ok_or_else(|| InterfaceError::UnknownPreset(name.into()))?;
        Self::load(abi, GovernanceMapping::from_json(mapping)?)
    }

    pub fn decoder(&self) -> LogDecoder {
        let mut d = LogDecoder::default();
        for spec in &self.specs {
            d.insert(spec.clone(), self.mapping.topics.get(&spec.name).copied());
        }
        d.mark_unsupported(&self.skipped);
        d
    }

    pub fn spec(&self, name: &str) -> Option<&AbiEventSpec> {
        self.specs.iter().find(|s| s.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decoded(name: &str, params: Vec<(&str, AbiValue)>) -> DecodedEvent {
        DecodedEvent {
            event_name: name.into(),
            contract: Address::ZERO,
            params: params
                .into_iter()
                .map(|(n, value)| super::super::log::DecodedParam { name: n.into(), value })
                .collect(),
            block_number: 1,
            tx_hash: H256::default(),
            log_index: 0,
            timestamp_utc: 0,
        }
    }

    fn u(v: u64) -> AbiValue {
        AbiValue::Uint(v.into())
    }

    #[test]
    fn bravo_support_two_is_abstain() {
        let gov = GovernanceInterface::preset("governor_bravo").unwrap();
        let ev = decoded(
            "VoteCast",
            vec![
                ("voter", AbiValue::Address(Address([7; 20]))),
                ("proposalId", u(3)),
                ("support", u(2)),
                ("votes", u(100)),
                ("reason", AbiValue::String(String::new())),
            ],
        );
        match map_to_governance(&ev, &gov.mapping).unwrap() {
            Some(GovernanceEvent::VoteCast { support, .. }) => assert_eq!(support, Support::Abstain),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn alpha_bool_support() {
        let gov = GovernanceInterface::preset("governor_alpha").unwrap();
        let ev = decoded(
            "VoteCast",
            vec![
                ("voter", AbiValue::Address(Address([7; 20]))),
                ("proposalId", u(3)),
                ("support", AbiValue::Bool(false)),
                ("votes", u(100)),
            ],
        );
        let mapped = map_to_governance(&ev, &gov.mapping).unwrap().unwrap();
        assert!(matches!(mapped, GovernanceEvent::VoteCast { support: Support::Against, .. }));
    }

    #[test]
    fn transfer_is_irrelevant() {
        let gov = GovernanceInterface::preset("oz_governor").unwrap();
        let ev = decoded("Transfer", vec![]);
        assert_eq!(map_to_governance(&ev, &gov.mapping).unwrap(), None);
    }

    #[test]
    fn unknown_support_code_is_rejected() {
        let gov = GovernanceInterface::preset("governor_bravo").unwrap();
        let ev = decoded(
            "VoteCast",
            vec![
                ("voter", AbiValue::Address(Address([7; 20]))),
                ("proposalId", u(3)),
                ("support", u(9)),
                ("votes", u(100)),
                ("reason", AbiValue::String(String::new())),
            ],
        );
        assert!(matches!(map_to_governance(&ev, &gov.mapping), Err(MappingError::BadValue { .. })));
    }

    #[test]
    fn mapping_with_missing_param_fails_at_load() {
        let abi = super::super::presets::governance("governor_bravo").unwrap().0;
        let mut mapping = GovernanceInterface::preset("governor_bravo").unwrap().mapping;
        mapping
            .events
            .insert("ProposalExecuted".into(), EventRole::ProposalExecuted { proposal_id: "proposalId".into() });
        assert_eq!(
            GovernanceInterface::load(abi, mapping).unwrap_err().to_string(),
            "mapping governor_bravo: event ProposalExecuted has no parameter proposalId"
        );
    }

    #[test]
    fn presets_load() {
        for name in ["governor_alpha", "governor_bravo", "oz_governor"] {
            let g = GovernanceInterface::preset(name).unwrap();
            assert!(g.spec("ProposalCreated").is_some(), "{name}");
            assert!(g.spec("VoteCast").is_some(), "{name}");
            assert!(g.spec("ProposalExecuted").is_some(), "{name}");
        }
        assert!(GovernanceInterface::preset("aragon").is_err());
    }
}
