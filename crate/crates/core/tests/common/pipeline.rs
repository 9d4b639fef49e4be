//! Synthetic DAOs run through fetch, decode, build and assessment on an
//! in-memory node.

use daokpi_core::abi::GovernanceInterface;
use daokpi_core::chain::ChainClient;
use daokpi_core::harmonize::DaoRecord;
use daokpi_core::kpi::{assess_record, KpiAssessment};
use daokpi_core::pipeline::{build_record, decode_dao, fetch_dao};
use daokpi_core::synth::{self, SynthDao, SECONDS_PER_BLOCK};

pub fn run(daos: &[SynthDao]) -> (Vec<DaoRecord>, Vec<KpiAssessment>) {
    let node = synth::build_node(daos);
    let client = ChainClient::new(synth::endpoint(1, "mock"), &node);
    let records: Vec<DaoRecord> = daos
        .iter()
        .map(|d| {
            let src = d.source();
            let raw = fetch_dao(&client, &src, node.head()).expect("fetch");
            let decoded = decode_dao(&raw, &GovernanceInterface::preset(&d.spec.framework).expect("preset"));
            build_record(&decoded, &src, SECONDS_PER_BLOCK).expect("record")
        })
        .collect();
    let assessments = records.iter().map(assess_record).collect();
    (records, assessments)
}
