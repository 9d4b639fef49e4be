use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::codec::{decode_tuple, decode_word, encode_tuple, encode_word, AbiValue};
use super::spec::{event_topic, AbiEventSpec, SkippedEvent};
use super::AbiError;
use crate::chain::RawLog;
use crate::primitives::{keccak256, Address, H256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodedParam {
    pub name: String,
    pub value: AbiValue,
}

/// A log decoded against its ABI event spec.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodedEvent {
    pub event_name: String,
    pub contract: Address,
    pub params: Vec<DecodedParam>,
    pub block_number: u64,
    pub tx_hash: H256,
    pub log_index: u64,
    pub timestamp_utc: i64,
}

impl DecodedEvent {
    pub fn param(&self, name: &str) -> Option<&AbiValue> {
        self.params.iter().find(|p| p.name == name).map(|p| &p.value)
    }

    pub fn key(&self) -> crate::chain::LogKey {
        (self.block_number, self.tx_hash, self.log_index)
    }
}

/// Decodes `log` against `spec`. Indexed parameters come from topics in
/// order; the rest are ABI-decoded from `data`.
pub fn decode_log(spec: &AbiEventSpec, log: &RawLog) -> Result<DecodedEvent, AbiError> {
    let topic_offset = if spec.anonymous {
        0
    } else {
        let expected = event_topic(spec);
        match log.topics.first() {
            Some(t) if *t == expected => 1,
            found => {
                return Err(AbiError::WrongEvent { expected: spec.name.clone(), found: found.copied() });
            }
        }
    };
    let indexed = spec.indexed_count();
    if log.topics.len() != topic_offset + indexed {
        return Err(AbiError::Malformed(format!(
            "{} expects {} topics, log has {}",
            spec.name,
            topic_offset + indexed,
            log.topics.len()
        )));
    }
    if !log.data.len().is_multiple_of(32) {
        return Err(AbiError::Malformed(format!("data length {} is not a multiple of 32", log.data.len())));
    }

    let body_types: Vec<_> = spec.inputs.iter().filter(|p| !p.indexed).map(|p| p.kind.clone()).collect();
    let mut body = decode_tuple(&body_types, &log.data, 0)?.into_iter();
    let mut topics = log.topics[topic_offset..].iter();

    let mut params = Vec::with_capacity(spec.inputs.len());
    for p in &spec.inputs {
        let value = if p.indexed {
            let topic = topics.next().expect("topic count checked");
            if p.kind.is_elementary() && !p.kind.is_dynamic() {
                decode_word(&p.kind, &topic.0)?
            } else {
                AbiValue::Hashed(*topic)
            }
        } else {
            body.next().expect("decode_tuple returns one value per type")
        };
        params.push(DecodedParam { name: p.name.clone(), value });
    }

    Ok(DecodedEvent {
        event_name: spec.name.clone(),
        contract: log.address,
        params,
        block_number: log.block_number,
        tx_hash: log.tx_hash,
        log_index: log.log_index,
        timestamp_utc: log.block_timestamp,
    })
}

/// Inverse of [`decode_log`]: rebuilds `(topics, data)` from decoded values.
pub fn encode_log(spec: &AbiEventSpec, values: &[AbiValue]) -> Result<(Vec<H256>, Vec<u8>), AbiError> {
    if values.len() != spec.inputs.len() {
        return Err(AbiError::Encode(format!(
            "{} expects {} values, got {}",
            spec.name,
            spec.inputs.len(),
            values.len()
        )));
    }
    let mut topics = Vec::new();
    if !spec.anonymous {
        topics.push(event_topic(spec));
    }
    let mut body_types = Vec::new();
    let mut body_values = Vec::new();
    for (p, v) in spec.inputs.iter().zip(values) {
        if p.indexed {
            let topic = match v {
                AbiValue::Hashed(h) => *h,
                _ if p.kind.is_elementary() && !p.kind.is_dynamic() => H256(encode_word(&p.kind, v)?),
                // Indexed dynamic values are stored as the hash of their encoding.
                AbiValue::String(s) => keccak256(s.as_bytes()),
                AbiValue::Bytes(b) => keccak256(b),
                _ => return Err(AbiError::Encode(format!("cannot index {} value {v:?}", p.kind))),
            };
            topics.push(topic);
        } else {
            body_types.push(p.kind.clone());
            body_values.push(v.clone());
        }
    }
    Ok((topics, encode_tuple(&body_types, &body_values)?))
}

/// Per-contract accounting of decode outcomes; `logs_in == decoded + dropped()`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropCounts {
    pub logs_in: u64,
    pub decoded: u64,
    pub unknown_event: u64,
    pub malformed: u64,
    pub unsupported: u64,
}

impl DropCounts {
    pub fn dropped(&self) -> u64 {
        self.unknown_event + self.malformed + self.unsupported
    }

    fn add(&mut self, c: &DropCounts) {
        self.logs_in += c.logs_in;
        self.decoded += c.decoded;
        self.unknown_event += c.unknown_event;
        self.malformed += c.malformed;
        self.unsupported += c.unsupported;
    }

    pub fn is_balanced(&self) -> bool {
        self.logs_in == self.decoded + self.dropped()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropReport {
    pub per_contract: BTreeMap<Address, DropCounts>,
}

impl DropReport {
    pub fn merge(&mut self, other: DropReport) {
        for (addr, c) in other.per_contract {
            self.per_contract.entry(addr).or_default().add(&c);
        }
    }

    pub fn total(&self) -> DropCounts {
        let mut t = DropCounts::default();
        self.per_contract.values().for_each(|c| t.add(c));
        t
    }
}

/// Topic-indexed set of event specs for one contract interface.
#[derive(Debug, Clone, Default)]
pub struct LogDecoder {
    // Spec plus whether its topic came from config rather than the signature.
    by_topic: HashMap<H256, (AbiEventSpec, bool)>,
    anonymous: Vec<AbiEventSpec>,
    unsupported: HashMap<H256, String>,
}

impl LogDecoder {
    pub fn new(specs: impl IntoIterator<Item = AbiEventSpec>) -> Self {
        let mut d = LogDecoder::default();
        for s in specs {
            d.insert(s, None);
        }
        d
    }

    /// Registers `spec`; `topic` overrides the computed topic-0.
    pub fn insert(&mut self, spec: AbiEventSpec, topic: Option<H256>) {
        if spec.anonymous {
            self.anonymous.push(spec);
        } else {
            let computed = event_topic(&spec);
            let topic = topic.unwrap_or(computed);
            self.by_topic.entry(topic).or_insert((spec, topic != computed));
        }
    }

    pub fn mark_unsupported(&mut self, skipped: &[SkippedEvent]) {
        for s in skipped {
            self.unsupported.insert(s.topic, s.name.clone());
        }
    }

    pub fn spec_for(&self, topic: &H256) -> Option<&AbiEventSpec> {
        self.by_topic.get(topic).map(|(s, _)| s)
    }

    fn decode_one(&self, log: &RawLog) -> Result<DecodedEvent, AbiError> {
        if let Some(topic0) = log.topics.first() {
            if let Some((spec, overridden)) = self.by_topic.get(topic0) {
                if !overridden {
                    return decode_log(spec, log);
                }
                let anon = AbiEventSpec { anonymous: true, ..spec.clone() };
                return decode_log(&anon, &RawLog { topics: log.topics[1..].to_vec(), ..log.clone() });
            }
            if let Some(name) = self.unsupported.get(topic0) {
                return Err(AbiError::UnsupportedType(name.clone()));
            }
        }
        // Anonymous events carry no signature topic; take the first spec in
        // ABI order whose layout fits.
        self.anonymous
            .iter()
            .find_map(|spec| decode_log(spec, log).ok())
            .ok_or(AbiError::UnknownEvent(log.topics.first().copied()))
    }

    /// Decodes every log, skipping the ones that fail and counting why.
    pub fn decode_all(&self, logs: &[RawLog]) -> (Vec<DecodedEvent>, DropReport) {
        let mut out = Vec::with_capacity(logs.len());
        let mut report = DropReport::default();
        for log in logs {
            let counts = report.per_contract.entry(log.address).or_default();
            counts.logs_in += 1;
            match self.decode_one(log) {
                Ok(ev) => {
                    counts.decoded += 1;
                    out.push(ev);
                }
                Err(AbiError::UnknownEvent(_)) | Err(AbiError::WrongEvent { .. }) => counts.unknown_event += 1,
                Err(AbiError::UnsupportedType(_)) => counts.unsupported += 1,
                Err(e) => {
                    log::debug!("dropping log {}:{}: {e}", log.block_number, log.log_index);
                    counts.malformed += 1;
                }
            }
        }
        (out, report)
    }
}
