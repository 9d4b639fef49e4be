//! Contract ABI parsing, event topics, and log decoding.

mod codec;
pub mod governance;
mod log;
pub mod presets;
mod spec;
mod token;
mod types;

use thiserror::Error;

use crate::primitives::H256;

pub use codec::{decode_tuple, decode_word, encode_tuple, encode_word, AbiValue};
pub use governance::{
    map_to_governance, EventRole, GovernanceEvent, GovernanceInterface, GovernanceMapping, InterfaceError,
    MappingError, Support, TimedGovernanceEvent, VoteClock,
};
pub use log::{decode_log, encode_log, DecodedEvent, DecodedParam, DropCounts, DropReport, LogDecoder};
pub use spec::{event_topic, parse_abi, parse_abi_lenient, AbiEventSpec, AbiParam, SkippedEvent};
pub use token::{erc20_decoder, erc20_events, transfer_spec, TokenTransfer};
pub use types::SolType;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbiError {
    #[error("malformed ABI document at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unsupported parameter type {0}")]
    UnsupportedType(String),
    #[error("event {event} declares {count} indexed inputs")]
    TooManyIndexed { event: String, count: usize },
    #[error("log is not a {expected} event (topic0 {found:?})")]
    WrongEvent { expected: String, found: Option<H256> },
    #[error("no event matches topic0 {0:?}")]
    UnknownEvent(Option<H256>),
    #[error("malformed log: {0}")]
    Malformed(String),
    #[error("cannot encode: {0}")]
    Encode(String),
}
