use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::abi::TokenTransfer;
use crate::primitives::Address;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BalanceError {
    #[error("balance of {address} goes negative at block {block} (log {log_index})")]
    Negative { address: Address, block: u64, log_index: u64 },
    #[error("transfer at block {block} log {log_index} is out of order")]
    Unsorted { block: u64, log_index: u64 },
}

/// Running token balances replayed from `Transfer` events.
///
/// Mints (from the zero address) and burns (to the zero address) are
/// tracked separately so that `Σ balances + burned == minted` always holds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BalanceLedger {
    balances: BTreeMap<Address, BigUint>,
    minted: BigUint,
    burned: BigUint,
    position: Option<(u64, u64)>,
}

impl BalanceLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn apply(&mut self, t: &TokenTransfer) -> Result<(), BalanceError> {
        let pos = (t.block_number, t.log_index);
        if self.position.is_some_and(|p| pos <= p) {
            return Err(BalanceError::Unsorted { block: t.block_number, log_index: t.log_index });
        }
        if t.is_mint() {
            self.minted += &t.amount;
        } else if !t.amount.is_zero() {
            let bal = self.balances.get_mut(&t.from).filter(|b| **b >= t.amount).ok_or(BalanceError::Negative {
                address: t.from,
                block: t.block_number,
                log_index: t.log_index,
            })?;
            *bal -= &t.amount;
            if bal.is_zero() {
                self.balances.remove(&t.from);
            }
        }
        if t.is_burn() {
            self.burned += &t.amount;
        } else if !t.amount.is_zero() {
            *self.balances.entry(t.to).or_default() += &t.amount;
        }
        self.position = Some(pos);
        Ok(())
    }

    /// Applies every transfer in `transfers` up to and including `at_block`
    /// that lies after the ledger's current position.
    pub fn advance(&mut self, transfers: &[TokenTransfer], at_block: u64) -> Result<(), BalanceError> {
        let start = match self.position {
            Some(p) => transfers.partition_point(|t| (t.block_number, t.log_index) <= p),
            None => 0,
        };
        for t in transfers[start..].iter().take_while(|t| t.block_number <= at_block) {
            self.apply(t)?;
        }
        Ok(())
    }

    /// Nonzero balances only.
    pub fn balances(&self) -> &BTreeMap<Address, BigUint> {
        &self.balances
    }

    pub fn balance_of(&self, a: &Address) -> BigUint {
        self.balances.get(a).cloned().unwrap_or_default()
    }

    pub fn minted(&self) -> &BigUint {
        &self.minted
    }

    pub fn burned(&self) -> &BigUint {
        &self.burned
    }

    /// `minted − burned`, equal to the sum of all balances.
    pub fn supply(&self) -> BigUint {
        &self.minted - &self.burned
    }

    pub fn holder_count(&self) -> usize {
        self.balances.len()
    }

    /// Sum of balances held by `addresses`.
    pub fn held_by(&self, addresses: &BTreeSet<Address>) -> BigUint {
        addresses.iter().filter_map(|a| self.balances.get(a)).sum()
    }

    /// Largest holder outside `excluded`; ties go to the lowest address.
    pub fn largest_holder(&self, excluded: &BTreeSet<Address>) -> Option<(Address, &BigUint)> {
        self.balances.iter().filter(|(a, _)| !excluded.contains(a)).fold(
            None,
            |best: Option<(Address, &BigUint)>, (a, b)| match best {
                Some((_, bb)) if bb >= b => best,
                _ => Some((*a, b)),
            },
        )
    }
}

/// Balances at the end of `at_block`. `transfers` must be sorted by
/// `(block_number, log_index)`; zero balances are omitted.
pub fn reconstruct_balances(
    transfers: &[TokenTransfer],
    at_block: u64,
) -> Result<BTreeMap<Address, BigUint>, BalanceError> {
    let mut ledger = BalanceLedger::new();
    ledger.advance(transfers, at_block)?;
    Ok(ledger.balances)
}
