//! Standard head/tail ABI encoding for the supported type subset.

use num_bigint::{BigInt, BigUint, Sign};
use serde::{Deserialize, Serialize};

use super::{AbiError, SolType};
use crate::primitives::{dec_bigint, dec_biguint, hex_bytes, Address, H256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum AbiValue {
    Address(Address),
    Bool(bool),
    #[serde(with = "dec_biguint")]
    Uint(BigUint),
    #[serde(with = "dec_bigint")]
    Int(BigInt),
    #[serde(with = "hex_bytes")]
    FixedBytes(Vec<u8>),
    #[serde(with = "hex_bytes")]
    Bytes(Vec<u8>),
    String(String),
    Array(Vec<AbiValue>),
    /// An indexed dynamic parameter: only its Keccak-256 digest is on chain.
    Hashed(H256),
}

impl AbiValue {
    pub fn as_uint(&self) -> Option<&BigUint> {
        match self {
            AbiValue::Uint(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_address(&self) -> Option<Address> {
        match self {
            AbiValue::Address(a) => Some(*a),
            _ => None,
        }
    }
}

fn malformed(msg: impl Into<String>) -> AbiError {
    AbiError::Malformed(msg.into())
}

fn word(data: &[u8], at: usize) -> Result<&[u8; 32], AbiError> {
    data.get(at..at.checked_add(32).ok_or_else(|| malformed("offset overflow"))?)
        .map(|w| w.try_into().expect("32-byte slice"))
        .ok_or_else(|| malformed(format!("word at {at} past end of {} data bytes", data.len())))
}

fn word_as_usize(w: &[u8; 32]) -> Result<usize, AbiError> {
    if w[..24].iter().any(|&b| b != 0) {
        return Err(malformed("offset or length does not fit in 64 bits"));
    }
    usize::try_from(u64::from_be_bytes(w[24..].try_into().unwrap())).map_err(|_| malformed("offset too large"))
}

/// Decodes one 32-byte word holding an elementary static value.
pub fn decode_word(kind: &SolType, w: &[u8; 32]) -> Result<AbiValue, AbiError> {
    match kind {
        SolType::Address => {
            if w[..12].iter().any(|&b| b != 0) {
                return Err(malformed("address word has dirty high bytes"));
            }
            Ok(AbiValue::Address(Address(w[12..].try_into().unwrap())))
        }
        SolType::Bool => match (w[..31].iter().all(|&b| b == 0), w[31]) {
            (true, 0) => Ok(AbiValue::Bool(false)),
            (true, 1) => Ok(AbiValue::Bool(true)),
            _ => Err(malformed("bool word is neither 0 nor 1")),
        },
        SolType::Uint(bits) => {
            let v = BigUint::from_bytes_be(w);
            if v.bits() > u64::from(*bits) {
                return Err(malformed(format!("value exceeds uint{bits}")));
            }
            Ok(AbiValue::Uint(v))
        }
        SolType::Int(bits) => {
            let v = if w[0] & 0x80 != 0 {
                let inverted: Vec<u8> = w.iter().map(|b| !b).collect();
                -(BigInt::from_bytes_be(Sign::Plus, &inverted) + BigInt::from(1))
            } else {
                BigInt::from_bytes_be(Sign::Plus, w)
            };
            let limit = BigInt::from(1) << (*bits - 1);
            if v >= limit || v < -limit {
                return Err(malformed(format!("value exceeds int{bits}")));
            }
            Ok(AbiValue::Int(v))
        }
        SolType::FixedBytes(n) => {
            let n = usize::from(*n);
            if w[n..].iter().any(|&b| b != 0) {
                return Err(malformed(format!("bytes{n} has dirty padding")));
            }
            Ok(AbiValue::FixedBytes(w[..n].to_vec()))
        }
        other => Err(malformed(format!("{other} is not a single-word type"))),
    }
}

fn decode_at(kind: &SolType, data: &[u8], at: usize) -> Result<AbiValue, AbiError> {
    match kind {
        SolType::Bytes | SolType::String => {
            let len = word_as_usize(word(data, at)?)?;
            let start = at + 32;
            let bytes = data
                .get(start..start.checked_add(len).ok_or_else(|| malformed("length overflow"))?)
                .ok_or_else(|| malformed(format!("{len}-byte payload at {start} past end of data")))?;
            if matches!(kind, SolType::String) {
                Ok(AbiValue::String(String::from_utf8_lossy(bytes).into_owned()))
            } else {
                Ok(AbiValue::Bytes(bytes.to_vec()))
            }
        }
        SolType::Array(inner) => {
            let len = word_as_usize(word(data, at)?)?;
            // Every element needs at least one head word.
            if len > data.len() / 32 {
                return Err(malformed(format!("array length {len} exceeds data size")));
            }
            let types = vec![(**inner).clone(); len];
            Ok(AbiValue::Array(decode_tuple(&types, data, at + 32)?))
        }
        SolType::FixedArray(inner, k) => {
            let types = vec![(**inner).clone(); *k];
            Ok(AbiValue::Array(decode_tuple(&types, data, at)?))
        }
        SolType::Tuple(_) => Err(AbiError::UnsupportedType(kind.to_string())),
        _ => decode_word(kind, word(data, at)?),
    }
}

/// Decodes `types` laid out as a tuple starting at `base`.
pub fn decode_tuple(types: &[SolType], data: &[u8], base: usize) -> Result<Vec<AbiValue>, AbiError> {
    let mut head = base;
    let mut out = Vec::with_capacity(types.len());
    for kind in types {
        if !kind.is_supported() {
            return Err(AbiError::UnsupportedType(kind.to_string()));
        }
        if kind.is_dynamic() {
            let offset = word_as_usize(word(data, head)?)?;
            let at = base.checked_add(offset).ok_or_else(|| malformed("offset overflow"))?;
            if at >= data.len() {
                return Err(malformed(format!("tail offset {offset} out of bounds")));
            }
            out.push(decode_at(kind, data, at)?);
        } else {
            out.push(decode_at(kind, data, head)?);
        }
        head += kind.head_size();
    }
    Ok(out)
}

fn type_mismatch(kind: &SolType, value: &AbiValue) -> AbiError {
    AbiError::Encode(format!("value {value:?} does not match type {kind}"))
}

/// Encodes an elementary static value as one word.
pub fn encode_word(kind: &SolType, value: &AbiValue) -> Result<[u8; 32], AbiError> {
    let mut w = [0u8; 32];
    match (kind, value) {
        (SolType::Address, AbiValue::Address(a)) => w = a.to_word(),
        (SolType::Bool, AbiValue::Bool(b)) => w[31] = u8::from(*b),
        (SolType::Uint(bits), AbiValue::Uint(v)) => {
            if v.bits() > u64::from(*bits) {
                return Err(type_mismatch(kind, value));
            }
            let bytes = v.to_bytes_be();
            w[32 - bytes.len()..].copy_from_slice(&bytes);
        }
        (SolType::Int(bits), AbiValue::Int(v)) => {
            let limit = BigInt::from(1) << (*bits - 1);
            if *v >= limit || *v < -limit.clone() {
                return Err(type_mismatch(kind, value));
            }
            let bytes = v.to_signed_bytes_be();
            let fill = if v.sign() == Sign::Minus { 0xff } else { 0 };
            w = [fill; 32];
            w[32 - bytes.len()..].copy_from_slice(&bytes);
        }
        (SolType::FixedBytes(n), AbiValue::FixedBytes(b)) if b.len() == usize::from(*n) => {
            w[..b.len()].copy_from_slice(b);
        }
        _ => return Err(type_mismatch(kind, value)),
    }
    Ok(w)
}

fn padded(bytes: &[u8]) -> Vec<u8> {
    let mut out = bytes.to_vec();
    out.resize(bytes.len().div_ceil(32) * 32, 0);
    out
}

fn encode_value(kind: &SolType, value: &AbiValue) -> Result<Vec<u8>, AbiError> {
    match (kind, value) {
        (SolType::Bytes, AbiValue::Bytes(b)) => {
            let mut out = encode_word(&SolType::Uint(256), &AbiValue::Uint(b.len().into()))?.to_vec();
            out.extend(padded(b));
            Ok(out)
        }
        (SolType::String, AbiValue::String(s)) => {
            let mut out = encode_word(&SolType::Uint(256), &AbiValue::Uint(s.len().into()))?.to_vec();
            out.extend(padded(s.as_bytes()));
            Ok(out)
        }
        (SolType::Array(inner), AbiValue::Array(items)) => {
            let mut out = encode_word(&SolType::Uint(256), &AbiValue::Uint(items.len().into()))?.to_vec();
            out.extend(encode_tuple(&vec![(**inner).clone(); items.len()], items)?);
            Ok(out)
        }
        (SolType::FixedArray(inner, k), AbiValue::Array(items)) if items.len() == *k => {
            encode_tuple(&vec![(**inner).clone(); *k], items)
        }
        _ if kind.is_elementary() && !kind.is_dynamic() => Ok(encode_word(kind, value)?.to_vec()),
        _ => Err(type_mismatch(kind, value)),
    }
}

/// Standard tuple encoding: static values inline, dynamic values as offsets into the tail.
pub fn encode_tuple(types: &[SolType], values: &[AbiValue]) -> Result<Vec<u8>, AbiError> {
    if types.len() != values.len() {
        return Err(AbiError::Encode(format!("{} types but {} values", types.len(), values.len())));
    }
    let head_len: usize = types.iter().map(SolType::head_size).sum();
    let mut head = Vec::with_capacity(head_len);
    let mut tail = Vec::new();
    for (kind, value) in types.iter().zip(values) {
        let enc = encode_value(kind, value)?;
        if kind.is_dynamic() {
            let offset = head_len + tail.len();
            head.extend(encode_word(&SolType::Uint(256), &AbiValue::Uint(offset.into()))?);
            tail.extend(enc);
        } else {
            head.extend(enc);
        }
    }
    head.extend(tail);
    Ok(head)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> SolType {
        SolType::parse(s, None).unwrap()
    }

    #[test]
    fn negative_int_round_trip() {
        let v = AbiValue::Int(BigInt::from(-5));
        let w = encode_word(&t("int256"), &v).unwrap();
        assert_eq!(w[0], 0xff);
        assert_eq!(w[31], 0xfb);
        assert_eq!(decode_word(&t("int256"), &w).unwrap(), v);
        assert_eq!(decode_word(&t("int8"), &w).unwrap(), v);
    }

    #[test]
    fn range_checks() {
        let mut w = [0u8; 32];
        w[30] = 1;
        assert!(decode_word(&t("uint8"), &w).is_err());
        assert!(decode_word(&t("uint16"), &w).is_ok());
        w = [0u8; 32];
        w[31] = 2;
        assert!(decode_word(&t("bool"), &w).is_err());
        w = [0u8; 32];
        w[0] = 1;
        assert!(decode_word(&t("address"), &w).is_err());
    }

    #[test]
    fn string_layout() {
        let enc =
            encode_tuple(&[t("uint256"), t("string")], &[AbiValue::Uint(7u8.into()), AbiValue::String("hi".into())])
                .unwrap();
        assert_eq!(enc.len(), 128);
        assert_eq!(enc[63], 0x40);
        assert_eq!(enc[95], 2);
        assert_eq!(&enc[96..98], b"hi");
    }

    #[test]
    fn rejects_out_of_bounds_offset() {
        let mut data = vec![0u8; 32];
        data[31] = 0x40;
        assert!(matches!(decode_tuple(&[t("string")], &data, 0), Err(AbiError::Malformed(_))));
    }

    #[test]
    fn rejects_oversized_length() {
        let mut data = vec![0u8; 64];
        data[31] = 0x20;
        data[63] = 0xff;
        assert!(matches!(decode_tuple(&[t("bytes")], &data, 0), Err(AbiError::Malformed(_))));
        assert!(matches!(decode_tuple(&[t("uint256[]")], &data, 0), Err(AbiError::Malformed(_))));
    }
}
