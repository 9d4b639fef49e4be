use daokpi_core::abi::{erc20_decoder, TokenTransfer};
use daokpi_core::chain::RawLog;
use daokpi_core::harmonize::BalanceLedger;
use daokpi_core::primitives::Address;
use daokpi_core::synth::{corpus, SynthDao};
use num_bigint::BigUint;

pub fn transfers_of(logs: &[RawLog], token: Address) -> Result<Vec<TokenTransfer>, String> {
    let token_logs: Vec<_> = logs.iter().filter(|l| l.address == token).cloned().collect();
    let (events, drops) = erc20_decoder().decode_all(&token_logs);
    let dropped = drops.total().dropped();
    if dropped > 0 {
        return Err(format!("{dropped} transfer logs dropped"));
    }
    Ok(events.iter().filter_map(TokenTransfer::from_decoded).collect())
}

pub fn conserved(ledger: &BalanceLedger) -> bool {
    let held: BigUint = ledger.balances().values().sum();
    held + ledger.burned() == *ledger.minted()
}

/// Generated corpus plus one DAO per governance framework.
pub fn fixtures() -> Vec<SynthDao> {
    let mut daos = corpus(77, 12).unwrap();
    daos.extend(super::logs::sample_daos());
    daos
}

/// Replays the DAO's transfers block by block, checking conservation at
/// every boundary and the final totals against ground truth. Returns the
/// number of transfers.
pub fn check(d: &SynthDao) -> Result<usize, String> {
    let id = &d.dao_id;
    let transfers = transfers_of(&d.logs, d.token).map_err(|e| format!("{id}: {e}"))?;
    if transfers.is_empty() {
        return Err(format!("{id}: no transfers"));
    }
    let mut ledger = BalanceLedger::new();
    let mut blocks: Vec<u64> = transfers.iter().map(|t| t.block_number).collect();
    blocks.dedup();
    for b in blocks {
        ledger.advance(&transfers, b).map_err(|e| format!("{id} at block {b}: {e}"))?;
        if !conserved(&ledger) {
            return Err(format!("{id}: not conserved at block {b}"));
        }
    }
    if ledger.minted() != &d.truth.minted || ledger.burned() != &d.truth.burned {
        return Err(format!("{id}: minted/burned differ from ground truth"));
    }
    if ledger.supply() != d.truth.total_supply {
        return Err(format!("{id}: supply differs from ground truth"));
    }
    Ok(transfers.len())
}
