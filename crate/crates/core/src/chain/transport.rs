use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransportError {
    #[error("provider unreachable: {0}")]
    Unreachable(String),
    #[error("HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("RPC error {code}: {message}")]
    Rpc { code: i64, message: String },
    #[error("no recorded response for {method} (key {key})")]
    MissingFixture { method: String, key: String },
    #[error("invalid provider response: {0}")]
    InvalidResponse(String),
}

impl TransportError {
    /// Worth retrying with backoff.
    pub fn is_transient(&self) -> bool {
        match self {
            TransportError::Unreachable(_) => true,
            TransportError::Http { status, .. } => *status == 429 || *status >= 500,
            TransportError::Rpc { code, message } => {
                *code == 429 || message.to_ascii_lowercase().contains("rate limit")
            }
            _ => false,
        }
    }

    /// A provider refusing a log query for returning too many results.
    pub fn is_too_many_results(&self) -> bool {
        match self {
            TransportError::Rpc { code, message } => {
                let m = message.to_ascii_lowercase();
                *code == -32005
                    || m.contains("more than")
                    || m.contains("too many")
                    || m.contains("response size")
                    || m.contains("block range")
            }
            _ => false,
        }
    }

    pub fn is_revert(&self) -> bool {
        match self {
            TransportError::Rpc { code, message } => *code == 3 || message.to_ascii_lowercase().contains("revert"),
            _ => false,
        }
    }
}

/// Carries one JSON-RPC request to a provider and returns the verbatim
/// response body.
pub trait Transport: Send + Sync {
    fn send(&self, method: &str, params: &Value) -> Result<String, TransportError>;
}

impl<T: Transport + ?Sized> Transport for &T {
    fn send(&self, method: &str, params: &Value) -> Result<String, TransportError> {
        (**self).send(method, params)
    }
}

impl<T: Transport + ?Sized> Transport for Box<T> {
    fn send(&self, method: &str, params: &Value) -> Result<String, TransportError> {
        (**self).send(method, params)
    }
}

pub fn request_body(method: &str, params: &Value) -> Value {
    json!({ "jsonrpc": "2.0", "id": 1, "method": method, "params": params })
}

/// Unwraps a JSON-RPC response envelope into its `result`.
pub fn parse_response(body: &str) -> Result<Value, TransportError> {
    let mut v: Value = serde_json::from_str(body).map_err(|e| TransportError::InvalidResponse(e.to_string()))?;
    if let Some(err) = v.get("error").filter(|e| !e.is_null()) {
        return Err(TransportError::Rpc {
            code: err.get("code").and_then(Value::as_i64).unwrap_or(0),
            message: err.get("message").and_then(Value::as_str).unwrap_or("").to_string(),
        });
    }
    v.get_mut("result")
        .map(Value::take)
        .ok_or_else(|| TransportError::InvalidResponse("response has neither result nor error".into()))
}

pub fn result_body(result: Value) -> String {
    json!({ "jsonrpc": "2.0", "id": 1, "result": result }).to_string()
}

pub fn error_body(code: i64, message: &str) -> String {
    json!({ "jsonrpc": "2.0", "id": 1, "error": { "code": code, "message": message } }).to_string()
}

/// Fixture key: SHA-256 over the canonical (sorted-key) JSON of
/// `{"method": ..., "params": ...}`.
pub fn request_key(method: &str, params: &Value) -> String {
    let canonical = json!({ "method": method, "params": params }).to_string();
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub fn fixture_path(dir: &Path, method: &str, params: &Value) -> PathBuf {
    dir.join(format!("{}.json", request_key(method, params)))
}

/// Replays recorded provider responses from a directory, one file per request.
#[derive(Debug, Clone)]
pub struct FixtureTransport {
    dir: PathBuf,
}

impl FixtureTransport {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FixtureTransport { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

impl Transport for FixtureTransport {
    fn send(&self, method: &str, params: &Value) -> Result<String, TransportError> {
        let path = fixture_path(&self.dir, method, params);
        fs::read_to_string(&path).map_err(|_| TransportError::MissingFixture {
            method: method.to_string(),
            key: request_key(method, params),
        })
    }
}

/// Forwards to `inner` and writes every definitive response into `dir`
/// in the layout [`FixtureTransport`] reads.
pub struct RecordingTransport<T> {
    inner: T,
    dir: PathBuf,
}

impl<T: Transport> RecordingTransport<T> {
    pub fn new(inner: T, dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(RecordingTransport { inner, dir })
    }
}

impl<T: Transport> Transport for RecordingTransport<T> {
    fn send(&self, method: &str, params: &Value) -> Result<String, TransportError> {
        let body = self.inner.send(method, params)?;
        let transient = matches!(parse_response(&body), Err(ref e) if e.is_transient());
        if !transient {
            fs::write(fixture_path(&self.dir, method, params), &body)
                .map_err(|e| TransportError::Unreachable(format!("cannot record fixture: {e}")))?;
        }
        Ok(body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_ignores_object_key_order() {
        let a: Value = serde_json::from_str(r#"[{"toBlock":"0x2","fromBlock":"0x1"}]"#).unwrap();
        let b: Value = serde_json::from_str(r#"[{"fromBlock":"0x1","toBlock":"0x2"}]"#).unwrap();
        assert_eq!(request_key("eth_getLogs", &a), request_key("eth_getLogs", &b));
        assert_ne!(request_key("eth_getLogs", &a), request_key("eth_call", &a));
    }

    #[test]
    fn envelope_parsing() {
        assert_eq!(parse_response(&result_body(json!("0x10"))).unwrap(), json!("0x10"));
        let err = parse_response(&error_body(3, "execution reverted")).unwrap_err();
        assert!(err.is_revert());
        assert!(!err.is_transient());
        assert!(parse_response("{}").is_err());
        assert!(parse_response("not json").is_err());
    }

    #[test]
    fn error_classes() {
        assert!(TransportError::Http { status: 503, body: String::new() }.is_transient());
        assert!(!TransportError::Http { status: 400, body: String::new() }.is_transient());
        let cap = TransportError::Rpc { code: -32005, message: "query returned more than 10000 results".into() };
        assert!(cap.is_too_many_results());
    }
}
