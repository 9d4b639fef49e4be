use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use daokpi_core::chain::{ChainClient, Transport};
use daokpi_core::harmonize::{ActivityTier, DaoRecord};
use daokpi_core::kpi::{assess_record, KpiAssessment};
use daokpi_core::pipeline::{build_record, decode_dao, fetch_dao, DecodedDao, RawDao};
use daokpi_core::report::{analyze, build_bundle, emit, Format, StatReport};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::Project;
use crate::http::transport_for;

pub const HARMONISED_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
#[error("{stage}: {message}")]
pub struct StageError {
    pub stage: &'static str,
    pub message: String,
}

impl StageError {
    pub fn new(stage: &'static str, message: impl Into<String>) -> Self {
        StageError { stage, message: message.into() }
    }
}

/// Where each stage reads and writes under the output directory.
#[derive(Debug, Clone)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Layout { root: root.into() }
    }
    pub fn raw(&self, dao_id: &str) -> PathBuf {
        self.root.join("raw").join(format!("{dao_id}.json"))
    }
    pub fn decoded(&self, dao_id: &str) -> PathBuf {
        self.root.join("decoded").join(format!("{dao_id}.json"))
    }
    pub fn harmonised(&self, dao_id: &str) -> PathBuf {
        self.root.join("harmonised").join(format!("{dao_id}.json"))
    }
    pub fn manifest(&self) -> PathBuf {
        self.root.join("harmonised").join("manifest.json")
    }
    pub fn assessments(&self) -> PathBuf {
        self.root.join("kpi").join("assessments.json")
    }
    pub fn stat_report(&self) -> PathBuf {
        self.root.join("stats").join("stat_report.json")
    }
    pub fn report_dir(&self) -> PathBuf {
        self.root.join("report")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub chain_id: u64,
    pub snapshot_block: u64,
    pub framework: String,
    /// SHA-256 of the fetch-stage document the record was built from.
    pub raw_sha256: String,
    pub decoded_sha256: String,
    pub undecodable_logs: u64,
    pub mapping_rejections: u64,
}

/// One DAO of the harmonised dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonisedDoc {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub record: DaoRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub dao_id: String,
    pub chain_id: u64,
    pub snapshot_block: u64,
    pub tier: ActivityTier,
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub daos: Vec<ManifestEntry>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("stage documents serialize");
    s.push('\n');
    s
}

fn write_text(stage: &'static str, path: &Path, text: &str) -> Result<(), StageError> {
    let io = |e: std::io::Error| StageError::new(stage, format!("cannot write {}: {e}", path.display()));
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, text).map_err(io)
}

/// Reads a previous stage's output, naming the stage that produces it when
/// the file is absent.
fn read_input(stage: &'static str, path: &Path, producer: &str) -> Result<String, StageError> {
    if !path.exists() {
        return Err(StageError::new(stage, format!("missing input {}; run `{producer}` first", path.display())));
    }
    fs::read_to_string(path).map_err(|e| StageError::new(stage, format!("cannot read {}: {e}", path.display())))
}

fn parse<T: DeserializeOwned>(stage: &'static str, path: &Path, text: &str) -> Result<T, StageError> {
    serde_json::from_str(text).map_err(|e| StageError::new(stage, format!("{}: {e}", path.display())))
}

fn read_json<T: DeserializeOwned>(stage: &'static str, path: &Path, producer: &str) -> Result<T, StageError> {
    parse(stage, path, &read_input(stage, path, producer)?)
}

/// Runtime overrides from the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub snapshot_block: Option<u64>,
    pub alpha: Option<f64>,
    pub formats: Option<BTreeSet<Format>>,
    pub radar_daos: Option<Vec<String>>,
}

pub fn fetch(p: &Project, layout: &Layout, ov: &Overrides) -> Result<(), StageError> {
    const STAGE: &str = "fetch";
    let clients: BTreeMap<u64, ChainClient<Box<dyn Transport>>> = p
        .chains
        .values()
        .map(|c| (c.chain_id, ChainClient::new(c.endpoint(), transport_for(&c.rpc_url, &p.base_dir))))
        .collect();
    let daos = &p.config.daos;
    let next = AtomicUsize::new(0);
    let failures = Mutex::new(Vec::new());
    let workers = p.config.fetch_concurrency.min(daos.len());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(d) = daos.get(i) else { break };
                let chain = p.chain(d.chain_id);
                let snapshot = ov.snapshot_block.unwrap_or(chain.snapshot_block);
                log::info!("fetching {} on chain {} up to block {snapshot}", d.dao_id, d.chain_id);
                let outcome = fetch_dao(&clients[&d.chain_id], &p.source(d), snapshot)
                    .map_err(|e| StageError::new(STAGE, format!("{}: {e}", d.dao_id)))
                    .and_then(|raw| write_text(STAGE, &layout.raw(&d.dao_id), &to_json(&raw)));
                if let Err(e) = outcome {
                    failures.lock().unwrap().push((i, e));
                }
            });
        }
    });
    let mut failures = failures.into_inner().unwrap();
    failures.sort_by_key(|(i, _)| *i);
    match failures.into_iter().next() {
        Some((_, e)) => Err(e),
        None => Ok(()),
    }
}

pub fn decode(p: &Project, layout: &Layout) -> Result<(), StageError> {
    const STAGE: &str = "decode";
    for d in &p.config.daos {
        let path = layout.raw(&d.dao_id);
        let raw: RawDao = read_json(STAGE, &path, "fetch")?;
        let iface = p.interface(d).map_err(|e| StageError::new(STAGE, e.to_string()))?;
        let decoded = decode_dao(&raw, &iface);
        if decoded.drops.total().dropped() > 0 || decoded.mapping_rejections > 0 {
            log::warn!(
                "{}: {} undecodable logs, {} mapping rejections",
                d.dao_id,
                decoded.drops.total().dropped(),
                decoded.mapping_rejections
            );
        }
        write_text(STAGE, &layout.decoded(&d.dao_id), &to_json(&decoded))?;
    }
    Ok(())
}

pub fn build(p: &Project, layout: &Layout) -> Result<(), StageError> {
    const STAGE: &str = "build";
    let mut entries = Vec::new();
    for d in &p.config.daos {
        let raw_text = read_input(STAGE, &layout.raw(&d.dao_id), "fetch")?;
        let decoded_path = layout.decoded(&d.dao_id);
        let decoded_text = read_input(STAGE, &decoded_path, "decode")?;
        let decoded: DecodedDao = parse(STAGE, &decoded_path, &decoded_text)?;
        let seconds_per_block = p.chain(d.chain_id).seconds_per_block;
        let record = build_record(&decoded, &p.source(d), seconds_per_block)
            .map_err(|e| StageError::new(STAGE, format!("{}: {e}", d.dao_id)))?;
        for w in &record.integrity.warnings {
            log::warn!("{}: {w}", d.dao_id);
        }
        let doc = HarmonisedDoc {
            schema_version: HARMONISED_SCHEMA_VERSION,
            provenance: Provenance {
                chain_id: record.chain_id,
                snapshot_block: record.snapshot_block,
                framework: decoded.framework.clone(),
                raw_sha256: sha256_hex(raw_text.as_bytes()),
                decoded_sha256: sha256_hex(decoded_text.as_bytes()),
                undecodable_logs: decoded.drops.total().dropped(),
                mapping_rejections: decoded.mapping_rejections,
            },
            record,
        };
        let text = to_json(&doc);
        write_text(STAGE, &layout.harmonised(&d.dao_id), &text)?;
        entries.push(ManifestEntry {
            dao_id: d.dao_id.clone(),
            chain_id: doc.record.chain_id,
            snapshot_block: doc.record.snapshot_block,
            tier: doc.record.tier,
            file: format!("{}.json", d.dao_id),
            sha256: sha256_hex(text.as_bytes()),
        });
    }
    entries.sort_by(|a, b| a.dao_id.cmp(&b.dao_id));
    let manifest = Manifest { schema_version: HARMONISED_SCHEMA_VERSION, daos: entries };
    write_text(STAGE, &layout.manifest(), &to_json(&manifest))
}

/// Loads every record listed in the harmonised manifest.
pub fn load_records(stage: &'static str, layout: &Layout) -> Result<Vec<DaoRecord>, StageError> {
    let manifest: Manifest = read_json(stage, &layout.manifest(), "build")?;
    let dir = layout.manifest().parent().map(Path::to_path_buf).unwrap_or_default();
    manifest
        .daos
        .iter()
        .map(|e| read_json::<HarmonisedDoc>(stage, &dir.join(&e.file), "build").map(|d| d.record))
        .collect()
}

pub fn kpi(layout: &Layout) -> Result<(), StageError> {
    const STAGE: &str = "kpi";
    let records = load_records(STAGE, layout)?;
    let assessments: Vec<KpiAssessment> = records.iter().map(assess_record).collect();
    write_text(STAGE, &layout.assessments(), &to_json(&assessments))
}

pub fn stats(layout: &Layout, alpha: f64) -> Result<(), StageError> {
    const STAGE: &str = "stats";
    let assessments: Vec<KpiAssessment> = read_json(STAGE, &layout.assessments(), "kpi")?;
    let report = analyze(&assessments, alpha);
    write_text(STAGE, &layout.stat_report(), &to_json(&report))
}

pub fn report(
    layout: &Layout,
    formats: &BTreeSet<Format>,
    radar_daos: Option<&[String]>,
) -> Result<Vec<PathBuf>, StageError> {
    const STAGE: &str = "report";
    let records = load_records(STAGE, layout)?;
    let assessments: Vec<KpiAssessment> = read_json(STAGE, &layout.assessments(), "kpi")?;
    let stats: StatReport = read_json(STAGE, &layout.stat_report(), "stats")?;
    let bundle = build_bundle(&records, &assessments, stats, radar_daos);
    for o in &bundle.omissions {
        log::warn!("{}: {} omitted: {}", o.chart, o.dao_id, o.reason);
    }
    let dir = layout.report_dir();
    emit(&bundle, &dir, formats).map_err(|e| StageError::new(STAGE, format!("cannot write {}: {e}", dir.display())))
}
