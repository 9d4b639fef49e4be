use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::codec::AbiValue;
use super::log::DecodedEvent;
use super::spec::{parse_abi, AbiEventSpec};
use super::{presets, LogDecoder};
use crate::primitives::{dec_biguint, Address, H256};

/// An ERC-20 `Transfer`. Mints come from the zero address, burns go to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenTransfer {
    pub from: Address,
    pub to: Address,
    #[serde(with = "dec_biguint")]
    pub amount: BigUint,
    pub block_number: u64,
    pub log_index: u64,
    #[serde(default)]
    pub tx_hash: H256,
}

impl TokenTransfer {
    pub fn is_mint(&self) -> bool {
        self.from.is_zero()
    }

    pub fn is_burn(&self) -> bool {
        self.to.is_zero()
    }

    /// Reads a decoded `Transfer` positionally, since parameter names vary
    /// between tokens (`from/to/value`, `src/dst/wad`).
    pub fn from_decoded(ev: &DecodedEvent) -> Option<TokenTransfer> {
        if ev.event_name != "Transfer" || ev.params.len() != 3 {
            return None;
        }
        match (&ev.params[0].value, &ev.params[1].value, &ev.params[2].value) {
            (AbiValue::Address(from), AbiValue::Address(to), AbiValue::Uint(amount)) => Some(TokenTransfer {
                from: *from,
                to: *to,
                amount: amount.clone(),
                block_number: ev.block_number,
                log_index: ev.log_index,
                tx_hash: ev.tx_hash,
            }),
            _ => None,
        }
    }
}

pub fn erc20_events() -> Vec<AbiEventSpec> {
    parse_abi(presets::ERC20_ABI).expect("bundled ERC-20 ABI parses")
}

pub fn erc20_decoder() -> LogDecoder {
    LogDecoder::new(erc20_events())
}

pub fn transfer_spec() -> AbiEventSpec {
    erc20_events().into_iter().find(|s| s.name == "Transfer").expect("Transfer in ERC-20 ABI")
}
