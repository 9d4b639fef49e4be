use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::primitives::{self, hex_bytes, Address, HexError, H256};

/// Connection parameters for one EVM network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainEndpoint {
    pub chain_id: u64,
    /// `https://...` for a node provider, `fixture:<dir>` for recorded responses.
    pub rpc_url: String,
    /// Provider cap on the block span of a single `eth_getLogs` query.
    pub max_block_span: u64,
    /// Requests per second.
    pub rate_limit: f64,
    /// Provider hard cap on results per `eth_getLogs` response, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_results: Option<usize>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EndpointError {
    #[error("max_block_span must be at least 1")]
    ZeroSpan,
    #[error("rate_limit must be positive, got {0}")]
    BadRate(f64),
    #[error("max_results must be at least 1")]
    ZeroResults,
}

impl ChainEndpoint {
    pub fn validate(&self) -> Result<(), EndpointError> {
        if self.max_block_span == 0 {
            return Err(EndpointError::ZeroSpan);
        }
        if !(self.rate_limit > 0.0 && self.rate_limit.is_finite()) {
            return Err(EndpointError::BadRate(self.rate_limit));
        }
        if self.max_results == Some(0) {
            return Err(EndpointError::ZeroResults);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractKind {
    Governance,
    Token,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractRef {
    pub address: Address,
    pub chain_id: u64,
    pub deploy_block: u64,
    pub kind: ContractKind,
}

/// An undecoded event log as returned by `eth_getLogs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawLog {
    pub address: Address,
    pub topics: Vec<H256>,
    #[serde(with = "hex_bytes")]
    pub data: Vec<u8>,
    pub block_number: u64,
    pub tx_hash: H256,
    pub log_index: u64,
    /// UTC seconds; zero until enriched with block timestamps.
    #[serde(default)]
    pub block_timestamp: i64,
}

/// Global identity of a log.
pub type LogKey = (u64, H256, u64);

#[derive(Debug, Error)]
pub enum RpcLogError {
    #[error("log field {0} missing or not a string")]
    Field(&'static str),
    #[error("log has {0} topics, at most 4 allowed")]
    TooManyTopics(usize),
    #[error(transparent)]
    Hex(#[from] HexError),
}

impl RawLog {
    pub fn key(&self) -> LogKey {
        (self.block_number, self.tx_hash, self.log_index)
    }

    /// Parses one entry of an `eth_getLogs` result.
    pub fn from_rpc(v: &Value) -> Result<RawLog, RpcLogError> {
        let field = |name: &'static str| v.get(name).and_then(Value::as_str).ok_or(RpcLogError::Field(name));
        let topics = v
            .get("topics")
            .and_then(Value::as_array)
            .ok_or(RpcLogError::Field("topics"))?
            .iter()
            .map(|t| t.as_str().ok_or(RpcLogError::Field("topics")).and_then(|s| Ok(s.parse::<H256>()?)))
            .collect::<Result<Vec<_>, _>>()?;
        if topics.len() > 4 {
            return Err(RpcLogError::TooManyTopics(topics.len()));
        }
        let block_timestamp = match v.get("blockTimestamp").and_then(Value::as_str) {
            Some(s) => primitives::parse_quantity(s)? as i64,
            None => 0,
        };
        Ok(RawLog {
            address: field("address")?.parse()?,
            topics,
            data: primitives::parse_hex_bytes(field("data")?)?,
            block_number: primitives::parse_quantity(field("blockNumber")?)?,
            tx_hash: field("transactionHash")?.parse()?,
            log_index: primitives::parse_quantity(field("logIndex")?)?,
            block_timestamp,
        })
    }

    pub fn to_rpc(&self) -> Value {
        json!({
            "address": self.address.to_string(),
            "topics": self.topics.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "data": format!("0x{}", hex::encode(&self.data)),
            "blockNumber": primitives::quantity(self.block_number),
            "transactionHash": self.tx_hash.to_string(),
            "logIndex": primitives::quantity(self.log_index),
            "removed": false,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenMetadata {
    pub decimals: u8,
    #[serde(with = "primitives::dec_biguint")]
    pub total_supply: BigUint,
    pub symbol: String,
    /// True when the decimals call reverted and the 18-decimal default applied.
    #[serde(default)]
    pub decimals_defaulted: bool,
}
