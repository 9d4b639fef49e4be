use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{AbiError, SolType};
use crate::primitives::{keccak256, H256};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbiParam {
    pub name: String,
    pub kind: SolType,
    pub indexed: bool,
}

/// One `"type": "event"` entry of an ABI document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbiEventSpec {
    pub name: String,
    pub inputs: Vec<AbiParam>,
    pub anonymous: bool,
}

impl AbiEventSpec {
    /// `Name(type1,type2,...)` with canonical type names.
    pub fn signature(&self) -> String {
        let types: Vec<String> = self.inputs.iter().map(|p| p.kind.to_string()).collect();
        format!("{}({})", self.name, types.join(","))
    }

    pub fn indexed_count(&self) -> usize {
        self.inputs.iter().filter(|p| p.indexed).count()
    }

    pub fn is_supported(&self) -> bool {
        self.inputs.iter().all(|p| p.kind.is_supported())
    }

    fn validate(&self) -> Result<(), AbiError> {
        let limit = if self.anonymous { 4 } else { 3 };
        if self.indexed_count() > limit {
            return Err(AbiError::TooManyIndexed { event: self.name.clone(), count: self.indexed_count() });
        }
        Ok(())
    }
}

/// Topic-0 of a non-anonymous event: Keccak-256 of its canonical signature.
pub fn event_topic(spec: &AbiEventSpec) -> H256 {
    keccak256(spec.signature().as_bytes())
}

#[derive(Deserialize)]
struct RawEntry {
    #[serde(rename = "type", default)]
    kind: Option<String>,
    #[serde(default)]
    name: String,
    #[serde(default)]
    inputs: Vec<RawParam>,
    #[serde(default)]
    anonymous: bool,
}

#[derive(Deserialize)]
struct RawParam {
    #[serde(default)]
    name: String,
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    indexed: bool,
    #[serde(default)]
    components: Option<Vec<RawParam>>,
}

fn param_type(p: &RawParam) -> Result<SolType, AbiError> {
    let components = match &p.components {
        Some(c) => Some(c.iter().map(param_type).collect::<Result<Vec<_>, _>>()?),
        None => None,
    };
    SolType::parse(&p.kind, components)
}

/// An event that parsed but uses types the codec does not decode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedEvent {
    pub name: String,
    pub topic: H256,
    pub reason: String,
}

fn parse_entries(abi_text: &str) -> Result<Vec<AbiEventSpec>, AbiError> {
    let doc: Value = serde_json::from_str(abi_text).map_err(|e| AbiError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    // Some explorers wrap the ABI as `{"abi": [...]}`.
    let entries = match doc {
        Value::Array(_) => doc,
        Value::Object(mut m) if m.contains_key("abi") => m.remove("abi").unwrap_or(Value::Null),
        _ => Value::Null,
    };
    let entries: Vec<RawEntry> = serde_json::from_value(entries).map_err(|e| AbiError::Parse {
        line: 0,
        column: 0,
        message: format!("not an ABI entry list: {e}"),
    })?;

    let mut specs = Vec::new();
    for entry in entries.into_iter().filter(|e| e.kind.as_deref() == Some("event")) {
        let inputs = entry
            .inputs
            .iter()
            .map(|p| Ok(AbiParam { name: p.name.clone(), kind: param_type(p)?, indexed: p.indexed }))
            .collect::<Result<Vec<_>, AbiError>>()?;
        let spec = AbiEventSpec { name: entry.name, inputs, anonymous: entry.anonymous };
        spec.validate()?;
        specs.push(spec);
    }
    Ok(specs)
}

/// Parses an ABI document and returns its event entries; functions,
/// constructors, and errors are ignored. Any event using a type the codec
/// cannot decode (tuples, nested arrays) is an error.
pub fn parse_abi(abi_text: &str) -> Result<Vec<AbiEventSpec>, AbiError> {
    let specs = parse_entries(abi_text)?;
    if let Some(bad) = specs.iter().flat_map(|s| &s.inputs).find(|p| !p.kind.is_supported()) {
        return Err(AbiError::UnsupportedType(bad.kind.to_string()));
    }
    Ok(specs)
}

/// Like [`parse_abi`], but events with undecodable types are set aside
/// (with their topics) so matching logs can be counted as dropped.
pub fn parse_abi_lenient(abi_text: &str) -> Result<(Vec<AbiEventSpec>, Vec<SkippedEvent>), AbiError> {
    let (ok, skipped): (Vec<_>, Vec<_>) = parse_entries(abi_text)?.into_iter().partition(AbiEventSpec::is_supported);
    let skipped = skipped
        .into_iter()
        .map(|s| SkippedEvent {
            topic: event_topic(&s),
            reason: format!("unsupported parameter types in {}", s.signature()),
            name: s.name,
        })
        .collect();
    Ok((ok, skipped))
}
