//! An in-process JSON-RPC node serving a fixed chain snapshot.
//!
//! Used by tests and by the synthetic project generator, which records the
//! node's answers into a fixture directory.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Mutex;

use num_bigint::BigUint;
use serde_json::{json, Value};

use super::transport::{error_body, result_body, Transport, TransportError};
use super::RawLog;
use crate::abi::{encode_tuple, AbiValue, SolType};
use crate::primitives::{self, Address, H256};

pub const SELECTOR_DECIMALS: [u8; 4] = [0x31, 0x3c, 0xe5, 0x67];
pub const SELECTOR_TOTAL_SUPPLY: [u8; 4] = [0x18, 0x16, 0x0d, 0xdd];
pub const SELECTOR_SYMBOL: [u8; 4] = [0x95, 0xd8, 0x9b, 0x41];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MockToken {
    /// `None` makes the `decimals()` call revert.
    pub decimals: Option<u8>,
    pub total_supply: BigUint,
    pub symbol: String,
}

#[derive(Debug, Default)]
pub struct MockNode {
    head: u64,
    logs: BTreeMap<Address, Vec<RawLog>>,
    timestamps: BTreeMap<u64, i64>,
    linear_clock: Option<(i64, i64)>,
    tokens: BTreeMap<Address, MockToken>,
    max_results: Option<usize>,
    pending_failures: AtomicU32,
    requests: Mutex<Vec<(String, Value)>>,
}

impl MockNode {
    pub fn new(head: u64) -> Self {
        MockNode { head, ..Default::default() }
    }

    pub fn head(&self) -> u64 {
        self.head
    }

    pub fn add_logs(&mut self, logs: impl IntoIterator<Item = RawLog>) {
        for log in logs {
            self.logs.entry(log.address).or_default().push(log);
        }
        for v in self.logs.values_mut() {
            v.sort_by_key(|l| (l.block_number, l.log_index));
        }
    }

    pub fn set_timestamp(&mut self, block: u64, ts: i64) {
        self.timestamps.insert(block, ts);
    }

    /// Every block not explicitly set gets `genesis + block * seconds_per_block`.
    pub fn set_linear_clock(&mut self, genesis: i64, seconds_per_block: i64) {
        self.linear_clock = Some((genesis, seconds_per_block));
    }

    pub fn add_token(&mut self, address: Address, token: MockToken) {
        self.tokens.insert(address, token);
    }

    /// Silently truncate `eth_getLogs` results at `cap` entries.
    pub fn set_max_results(&mut self, cap: Option<usize>) {
        self.max_results = cap;
    }

    /// The next `n` requests fail with a transient 503.
    pub fn fail_next(&self, n: u32) {
        self.pending_failures.store(n, Ordering::SeqCst);
    }

    pub fn requests(&self) -> Vec<(String, Value)> {
        self.requests.lock().unwrap().clone()
    }

    pub fn request_count(&self, method: &str) -> usize {
        self.requests.lock().unwrap().iter().filter(|(m, _)| m == method).count()
    }

    pub fn timestamp(&self, block: u64) -> Option<i64> {
        if block > self.head {
            return None;
        }
        self.timestamps.get(&block).copied().or_else(|| self.linear_clock.map(|(g, s)| g + block as i64 * s))
    }

    fn get_logs(&self, params: &Value) -> Result<Value, String> {
        let filter = params.get(0).ok_or("missing filter")?;
        let block = |k: &str| -> Result<u64, String> {
            let s = filter.get(k).and_then(Value::as_str).ok_or(format!("missing {k}"))?;
            primitives::parse_quantity(s).map_err(|e| e.to_string())
        };
        let (from, to) = (block("fromBlock")?, block("toBlock")?);
        let address: Address = filter
            .get("address")
            .and_then(Value::as_str)
            .ok_or("missing address")?
            .parse()
            .map_err(|e: primitives::HexError| e.to_string())?;
        let topic0: Option<H256> = match filter.get("topics").and_then(|t| t.get(0)).and_then(Value::as_str) {
            Some(s) => Some(s.parse().map_err(|e: primitives::HexError| e.to_string())?),
            None => None,
        };
        let mut out: Vec<Value> = self
            .logs
            .get(&address)
            .into_iter()
            .flatten()
            .filter(|l| (from..=to).contains(&l.block_number))
            .filter(|l| topic0.is_none_or(|t| l.topics.first() == Some(&t)))
            .map(RawLog::to_rpc)
            .collect();
        if let Some(cap) = self.max_results {
            out.truncate(cap);
        }
        Ok(Value::Array(out))
    }

    fn call(&self, params: &Value) -> Result<String, String> {
        let tx = params.get(0).ok_or("missing call object")?;
        let to: Address = tx
            .get("to")
            .and_then(Value::as_str)
            .ok_or("missing to")?
            .parse()
            .map_err(|e: primitives::HexError| e.to_string())?;
        let data = tx.get("data").or_else(|| tx.get("input")).and_then(Value::as_str).unwrap_or("0x");
        let data = primitives::parse_hex_bytes(data).map_err(|e| e.to_string())?;
        let Some(token) = self.tokens.get(&to) else {
            // Calls to an address without code succeed with empty output.
            return Ok(result_body(json!("0x")));
        };
        let encoded = match data.get(..4) {
            Some(s) if s == SELECTOR_DECIMALS => match token.decimals {
                Some(d) => encode_tuple(&[SolType::Uint(8)], &[AbiValue::Uint(d.into())]),
                None => return Ok(error_body(3, "execution reverted")),
            },
            Some(s) if s == SELECTOR_TOTAL_SUPPLY => {
                encode_tuple(&[SolType::Uint(256)], &[AbiValue::Uint(token.total_supply.clone())])
            }
            Some(s) if s == SELECTOR_SYMBOL => {
                encode_tuple(&[SolType::String], &[AbiValue::String(token.symbol.clone())])
            }
            _ => return Ok(error_body(3, "execution reverted")),
        }
        .map_err(|e| e.to_string())?;
        Ok(result_body(json!(format!("0x{}", hex::encode(encoded)))))
    }

    fn handle(&self, method: &str, params: &Value) -> Result<String, String> {
        match method {
            "eth_blockNumber" => Ok(result_body(json!(primitives::quantity(self.head)))),
            "eth_getLogs" => self.get_logs(params).map(result_body),
            "eth_getBlockByNumber" => {
                let tag = params.get(0).and_then(Value::as_str).ok_or("missing block")?;
                let block = primitives::parse_quantity(tag).map_err(|e| e.to_string())?;
                Ok(result_body(match self.timestamp(block) {
                    Some(ts) => json!({
                        "number": primitives::quantity(block),
                        "timestamp": primitives::quantity(ts as u64),
                    }),
                    None => Value::Null,
                }))
            }
            "eth_call" => self.call(params),
            other => Ok(error_body(-32601, &format!("the method {other} does not exist/is not available"))),
        }
    }
}

impl Transport for MockNode {
    fn send(&self, method: &str, params: &Value) -> Result<String, TransportError> {
        self.requests.lock().unwrap().push((method.to_string(), params.clone()));
        let failing =
            self.pending_failures.fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| n.checked_sub(1)).is_ok();
        if failing {
            return Err(TransportError::Http { status: 503, body: "service unavailable".into() });
        }
        self.handle(method, params).or_else(|msg| Ok(error_body(-32602, &msg)))
    }
}
