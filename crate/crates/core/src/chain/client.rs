use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};
use thiserror::Error;

use super::mock::{SELECTOR_DECIMALS, SELECTOR_SYMBOL, SELECTOR_TOTAL_SUPPLY};
use super::transport::{parse_response, Transport, TransportError};
use super::types::{ChainEndpoint, ContractKind, ContractRef, LogKey, RawLog, TokenMetadata};
use crate::abi::{decode_tuple, AbiValue, SolType};
use crate::primitives::{self, Address, H256};
use crate::rng::SplitMix64;

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("inverted block range: from {from} > to {to}")]
    InvertedRange { from: u64, to: u64 },
    #[error("{method}: {source}")]
    Transport {
        method: String,
        #[source]
        source: TransportError,
    },
    #[error("{method}: gave up after {attempts} attempts, last error: {last}")]
    RetriesExhausted { method: String, attempts: u32, last: TransportError },
    #[error("provider still truncates logs for single block {block}")]
    Truncated { block: u64 },
    #[error("unknown block {0}")]
    UnknownBlock(u64),
    #[error("no contract deployed at {0}")]
    NotAContract(Address),
    #[error("contract {address} is not a {expected:?} contract")]
    WrongKind { address: Address, expected: ContractKind },
    #[error("unexpected response to {method}: {detail}")]
    BadResponse { method: String, detail: String },
}

/// Exponential backoff: `base * 2^attempt`, stretched by up to 25% jitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub jitter: bool,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_attempts: 5, base_delay: Duration::from_millis(500), jitter: true }
    }
}

impl RetryPolicy {
    pub fn delay(&self, attempt: u32, rng: &mut SplitMix64) -> Duration {
        let base = self.base_delay.saturating_mul(1u32 << attempt.min(16));
        if self.jitter {
            base.mul_f64(1.0 + 0.25 * rng.next_f64())
        } else {
            base
        }
    }
}

/// Token bucket shared by every request to one endpoint.
#[derive(Debug)]
pub struct RateLimiter {
    rate: f64,
    burst: f64,
    state: Mutex<(f64, Instant)>,
}

impl RateLimiter {
    pub fn new(rate: f64, burst: f64) -> Self {
        let burst = burst.max(1.0);
        RateLimiter { rate, burst, state: Mutex::new((burst, Instant::now())) }
    }

    /// Blocks until a token is available.
    pub fn acquire(&self) {
        loop {
            let wait = {
                let mut s = self.state.lock().unwrap();
                let now = Instant::now();
                s.0 = (s.0 + now.duration_since(s.1).as_secs_f64() * self.rate).min(self.burst);
                s.1 = now;
                if s.0 >= 1.0 {
                    s.0 -= 1.0;
                    return;
                }
                (1.0 - s.0) / self.rate
            };
            thread::sleep(Duration::from_secs_f64(wait));
        }
    }
}

/// Block tag for state reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockTag {
    Latest,
    Number(u64),
}

impl BlockTag {
    fn to_json(self) -> Value {
        match self {
            BlockTag::Latest => json!("latest"),
            BlockTag::Number(n) => json!(primitives::quantity(n)),
        }
    }
}

/// JSON-RPC client for one endpoint: chunked log retrieval, cached block
/// timestamps, and token metadata calls. Safe to share across threads.
pub struct ChainClient<T> {
    endpoint: ChainEndpoint,
    transport: T,
    limiter: RateLimiter,
    retry: RetryPolicy,
    jitter: Mutex<SplitMix64>,
    timestamps: Mutex<BTreeMap<u64, i64>>,
}

impl<T: Transport> ChainClient<T> {
    pub fn new(endpoint: ChainEndpoint, transport: T) -> Self {
        let seed = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos() as u64).unwrap_or(0);
        ChainClient {
            limiter: RateLimiter::new(endpoint.rate_limit, 1.0),
            endpoint,
            transport,
            retry: RetryPolicy::default(),
            jitter: Mutex::new(SplitMix64::new(seed)),
            timestamps: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn endpoint(&self) -> &ChainEndpoint {
        &self.endpoint
    }

    pub fn transport(&self) -> &T {
        &self.transport
    }

    fn call(&self, method: &str, params: Value) -> Result<Value, ChainError> {
        let mut last = None;
        for attempt in 0..self.retry.max_attempts.max(1) {
            self.limiter.acquire();
            match self.transport.send(method, &params).and_then(|body| parse_response(&body)) {
                Ok(v) => return Ok(v),
                Err(e) if e.is_transient() => {
                    log::warn!("{method} attempt {} failed: {e}", attempt + 1);
                    if attempt + 1 < self.retry.max_attempts {
                        let delay = self.retry.delay(attempt, &mut self.jitter.lock().unwrap());
                        thread::sleep(delay);
                    }
                    last = Some(e);
                }
                Err(source) => return Err(ChainError::Transport { method: method.to_string(), source }),
            }
        }
        Err(ChainError::RetriesExhausted {
            method: method.to_string(),
            attempts: self.retry.max_attempts.max(1),
            last: last.expect("at least one attempt"),
        })
    }

    pub fn block_number(&self) -> Result<u64, ChainError> {
        let v = self.call("eth_blockNumber", json!([]))?;
        v.as_str()
            .and_then(|s| primitives::parse_quantity(s).ok())
            .ok_or_else(|| ChainError::BadResponse { method: "eth_blockNumber".into(), detail: v.to_string() })
    }

    fn get_logs(&self, address: Address, from: u64, to: u64, topic0: Option<H256>) -> Result<Vec<RawLog>, ChainError> {
        let mut filter = json!({
            "address": address.to_string(),
            "fromBlock": primitives::quantity(from),
            "toBlock": primitives::quantity(to),
        });
        if let Some(t) = topic0 {
            filter["topics"] = json!([t.to_string()]);
        }
        let v = self.call("eth_getLogs", json!([filter]))?;
        let bad = |detail: String| ChainError::BadResponse { method: "eth_getLogs".into(), detail };
        v.as_array()
            .ok_or_else(|| bad("result is not an array".into()))?
            .iter()
            .map(|l| RawLog::from_rpc(l).map_err(|e| bad(e.to_string())))
            .collect()
    }

    /// All logs emitted by `contract` in `[from_block, to_block]`, ordered by
    /// `(block_number, log_index)`. The range is queried in chunks of
    /// `max_block_span`; a chunk that hits the provider's result cap is
    /// halved until it fits.
    pub fn fetch_logs(
        &self,
        contract: &ContractRef,
        from_block: u64,
        to_block: u64,
        topic0: Option<H256>,
    ) -> Result<Vec<RawLog>, ChainError> {
        if from_block > to_block {
            return Err(ChainError::InvertedRange { from: from_block, to: to_block });
        }
        let span = self.endpoint.max_block_span.max(1);
        let mut pending: VecDeque<(u64, u64)> = VecDeque::new();
        let mut start = from_block;
        loop {
            let end = start.saturating_add(span - 1).min(to_block);
            pending.push_back((start, end));
            if end == to_block {
                break;
            }
            start = end + 1;
        }

        let mut seen: BTreeMap<LogKey, RawLog> = BTreeMap::new();
        while let Some((a, b)) = pending.pop_front() {
            let truncated = match self.get_logs(contract.address, a, b, topic0) {
                Ok(logs) => {
                    let capped = self.endpoint.max_results.is_some_and(|cap| logs.len() >= cap);
                    if !capped {
                        for l in logs {
                            if l.address == contract.address && (a..=b).contains(&l.block_number) {
                                seen.entry(l.key()).or_insert(l);
                            }
                        }
                    }
                    capped
                }
                Err(ChainError::Transport { source, .. }) if source.is_too_many_results() => true,
                Err(e) => return Err(e),
            };
            if truncated {
                if a == b {
                    return Err(ChainError::Truncated { block: a });
                }
                let mid = a + (b - a) / 2;
                pending.push_front((mid + 1, b));
                pending.push_front((a, mid));
            }
        }
        let mut out: Vec<RawLog> = seen.into_values().collect();
        out.sort_by_key(|l| (l.block_number, l.log_index, l.tx_hash));
        Ok(out)
    }

    /// UTC timestamps for `blocks`. Each block is requested at most once
    /// per client.
    pub fn fetch_block_timestamps(&self, blocks: &BTreeSet<u64>) -> Result<BTreeMap<u64, i64>, ChainError> {
        let missing: Vec<u64> = {
            let cache = self.timestamps.lock().unwrap();
            blocks.iter().copied().filter(|b| !cache.contains_key(b)).collect()
        };
        for b in missing {
            let v = self.call("eth_getBlockByNumber", json!([primitives::quantity(b), false]))?;
            if v.is_null() {
                return Err(ChainError::UnknownBlock(b));
            }
            let ts = v
                .get("timestamp")
                .and_then(Value::as_str)
                .and_then(|s| primitives::parse_quantity(s).ok())
                .ok_or_else(|| ChainError::BadResponse {
                    method: "eth_getBlockByNumber".into(),
                    detail: v.to_string(),
                })?;
            self.timestamps.lock().unwrap().insert(b, ts as i64);
        }
        let cache = self.timestamps.lock().unwrap();
        Ok(blocks.iter().map(|b| (*b, cache[b])).collect())
    }

    fn eth_call(&self, to: Address, selector: [u8; 4], block: BlockTag) -> Result<Vec<u8>, ChainError> {
        let params = json!([{ "to": to.to_string(), "data": format!("0x{}", hex::encode(selector)) }, block.to_json()]);
        let v = self.call("eth_call", params)?;
        v.as_str()
            .and_then(|s| primitives::parse_hex_bytes(s).ok())
            .ok_or_else(|| ChainError::BadResponse { method: "eth_call".into(), detail: v.to_string() })
    }

    /// Reads `decimals`, `totalSupply` and `symbol`. A reverting `decimals`
    /// call falls back to 18.
    pub fn fetch_token_metadata(&self, token: &ContractRef, block: BlockTag) -> Result<TokenMetadata, ChainError> {
        if token.kind != ContractKind::Token {
            return Err(ChainError::WrongKind { address: token.address, expected: ContractKind::Token });
        }
        let supply_out = match self.eth_call(token.address, SELECTOR_TOTAL_SUPPLY, block) {
            Ok(out) => out,
            Err(ChainError::Transport { source, .. }) if source.is_revert() => Vec::new(),
            Err(e) => return Err(e),
        };
        let total_supply = match decode_tuple(&[SolType::Uint(256)], &supply_out, 0).ok().as_deref() {
            Some([AbiValue::Uint(v)]) => v.clone(),
            _ => return Err(ChainError::NotAContract(token.address)),
        };

        let decimals = match self.eth_call(token.address, SELECTOR_DECIMALS, block) {
            Ok(out) => match decode_tuple(&[SolType::Uint(8)], &out, 0).ok().as_deref() {
                Some([AbiValue::Uint(v)]) => u8::try_from(v).ok().filter(|d| *d <= 77),
                _ => None,
            },
            Err(ChainError::Transport { source, .. }) if source.is_revert() => None,
            Err(e) => return Err(e),
        };
        if decimals.is_none() {
            log::warn!("token {} has no usable decimals(); assuming 18", token.address);
        }

        let symbol = match self.eth_call(token.address, SELECTOR_SYMBOL, block) {
            Ok(out) => decode_symbol(&out),
            Err(ChainError::Transport { source, .. }) if source.is_revert() => String::new(),
            Err(e) => return Err(e),
        };

        Ok(TokenMetadata {
            decimals: decimals.unwrap_or(18),
            total_supply,
            symbol,
            decimals_defaulted: decimals.is_none(),
        })
    }
}

// Older tokens (MKR, SAI) return `bytes32` instead of `string`.
fn decode_symbol(out: &[u8]) -> String {
    if let Ok(v) = decode_tuple(&[SolType::String], out, 0) {
        if let [AbiValue::String(s)] = v.as_slice() {
            return s.clone();
        }
    }
    if out.len() == 32 {
        let end = out.iter().position(|&b| b == 0).unwrap_or(32);
        return String::from_utf8_lossy(&out[..end]).into_owned();
    }
    String::new()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::mock::{MockNode, MockToken};
    use num_bigint::BigUint;

    fn endpoint(span: u64) -> ChainEndpoint {
        ChainEndpoint { chain_id: 1, rpc_url: "mock".into(), max_block_span: span, rate_limit: 1e6, max_results: None }
    }

    fn fast() -> RetryPolicy {
        RetryPolicy { max_attempts: 5, base_delay: Duration::from_millis(1), jitter: true }
    }

    fn contract(address: Address) -> ContractRef {
        ContractRef { address, chain_id: 1, deploy_block: 0, kind: ContractKind::Governance }
    }

    #[test]
    fn inverted_range_is_an_argument_error() {
        let client = ChainClient::new(endpoint(10), MockNode::new(1000));
        let err = client.fetch_logs(&contract(Address([1; 20])), 100, 99, None).unwrap_err();
        assert!(matches!(err, ChainError::InvertedRange { from: 100, to: 99 }));
    }

    #[test]
    fn empty_contract_yields_empty_list() {
        let client = ChainClient::new(endpoint(10), MockNode::new(1000));
        assert!(client.fetch_logs(&contract(Address([1; 20])), 0, 999, None).unwrap().is_empty());
    }

    #[test]
    fn transient_failures_are_retried() {
        let node = MockNode::new(10);
        node.fail_next(3);
        let client = ChainClient::new(endpoint(10), node).with_retry(fast());
        assert_eq!(client.block_number().unwrap(), 10);
        assert_eq!(client.transport().request_count("eth_blockNumber"), 4);
    }

    #[test]
    fn retry_budget_exhaustion_carries_last_message() {
        let node = MockNode::new(10);
        node.fail_next(100);
        let client = ChainClient::new(endpoint(10), node).with_retry(fast());
        match client.block_number().unwrap_err() {
            ChainError::RetriesExhausted { attempts: 5, last, .. } => {
                assert!(last.to_string().contains("service unavailable"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn timestamps_are_cached() {
        let mut node = MockNode::new(100);
        node.set_timestamp(15, 1_700_000_000);
        let client = ChainClient::new(endpoint(10), node);
        let blocks = BTreeSet::from([15]);
        let a = client.fetch_block_timestamps(&blocks).unwrap();
        let b = client.fetch_block_timestamps(&blocks).unwrap();
        assert_eq!(a, BTreeMap::from([(15, 1_700_000_000)]));
        assert_eq!(a, b);
        assert_eq!(client.transport().request_count("eth_getBlockByNumber"), 1);
        assert!(client.fetch_block_timestamps(&BTreeSet::new()).unwrap().is_empty());
    }

    #[test]
    fn unknown_block_is_named() {
        let client = ChainClient::new(endpoint(10), MockNode::new(100));
        let err = client.fetch_block_timestamps(&BTreeSet::from([5000])).unwrap_err();
        assert!(matches!(err, ChainError::UnknownBlock(5000)));
    }

    #[test]
    fn token_metadata_and_defaults() {
        let mut node = MockNode::new(100);
        let supply = BigUint::from(10u32).pow(27);
        node.add_token(
            Address([2; 20]),
            MockToken { decimals: Some(18), total_supply: supply.clone(), symbol: "GOV".into() },
        );
        node.add_token(Address([3; 20]), MockToken { decimals: None, total_supply: 5u32.into(), symbol: "OLD".into() });
        let client = ChainClient::new(endpoint(10), node);
        let token =
            |a| ContractRef { address: Address([a; 20]), chain_id: 1, deploy_block: 0, kind: ContractKind::Token };

        let m = client.fetch_token_metadata(&token(2), BlockTag::Latest).unwrap();
        assert_eq!((m.decimals, m.total_supply, m.symbol.as_str()), (18, supply, "GOV"));

        let m = client.fetch_token_metadata(&token(3), BlockTag::Number(50)).unwrap();
        assert_eq!(m.decimals, 18);
        assert!(m.decimals_defaulted);

        assert!(matches!(client.fetch_token_metadata(&token(9), BlockTag::Latest), Err(ChainError::NotAContract(_))));
        assert!(matches!(
            client.fetch_token_metadata(&contract(Address([2; 20])), BlockTag::Latest),
            Err(ChainError::WrongKind { .. })
        ));
    }

    #[test]
    fn bytes32_symbol() {
        let mut out = [0u8; 32];
        out[..3].copy_from_slice(b"MKR");
        assert_eq!(decode_symbol(&out), "MKR");
    }
}
