//! EVM JSON-RPC access: log retrieval, block timestamps, token metadata,
//! and fixture replay.

mod client;
pub mod mock;
pub mod transport;
mod types;

pub use client::{BlockTag, ChainClient, ChainError, RateLimiter, RetryPolicy};
pub use transport::{FixtureTransport, RecordingTransport, Transport, TransportError};
pub use types::{ChainEndpoint, ContractKind, ContractRef, EndpointError, LogKey, RawLog, RpcLogError, TokenMetadata};
