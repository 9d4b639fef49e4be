//! Fixed-width chain identifiers and serde helpers shared by every stage.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HexError {
    #[error("missing 0x prefix in {0:?}")]
    MissingPrefix(String),
    #[error("expected {expected} hex digits, got {got} in {input:?}")]
    Length { expected: usize, got: usize, input: String },
    #[error("invalid hex in {0:?}")]
    Invalid(String),
}

fn parse_fixed<const N: usize>(s: &str) -> Result<[u8; N], HexError> {
    let digits =
        s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).ok_or_else(|| HexError::MissingPrefix(s.to_string()))?;
    if digits.len() != 2 * N {
        return Err(HexError::Length { expected: 2 * N, got: digits.len(), input: s.to_string() });
    }
    let mut out = [0u8; N];
    hex::decode_to_slice(digits, &mut out).map_err(|_| HexError::Invalid(s.to_string()))?;
    Ok(out)
}

/// A 20-byte EVM account or contract address.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Address(pub [u8; 20]);

impl Address {
    pub const ZERO: Address = Address([0u8; 20]);

    /// `0x000000000000000000000000000000000000dEaD`, the conventional burn sink.
    pub const DEAD: Address = Address([0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0xde, 0xad]);

    pub fn is_zero(&self) -> bool {
        self.0 == [0u8; 20]
    }

    pub fn is_burn(&self) -> bool {
        self.is_zero() || *self == Self::DEAD
    }

    /// Left-pads the address into a 32-byte ABI word.
    pub fn to_word(&self) -> [u8; 32] {
        let mut w = [0u8; 32];
        w[12..].copy_from_slice(&self.0);
        w
    }
}

impl FromStr for Address {
    type Err = HexError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_fixed::<20>(s).map(Address)
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", hex::encode(self.0))
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A 32-byte word: transaction hashes, log topics, Keccak digests.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct H256(pub [u8; 32]);

impl FromStr for H256 {
    type Err = HexError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_fixed::<32>(s).map(H256)
    }
}

impl fmt::Display for H256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", hex::encode(self.0))
    }
}

impl fmt::Debug for H256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! string_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(Address);
string_serde!(H256);

/// Keccak-256 of `bytes`.
pub fn keccak256(bytes: &[u8]) -> H256 {
    use sha3::{Digest, Keccak256};
    let digest = Keccak256::digest(bytes);
    let mut out = [0u8; 32];
    out.copy_from_slice(&digest);
    H256(out)
}

/// Parses a `0x`-prefixed hex quantity (`"0x1a"`) as used by JSON-RPC.
pub fn parse_quantity(s: &str) -> Result<u64, HexError> {
    let digits = s.strip_prefix("0x").ok_or_else(|| HexError::MissingPrefix(s.to_string()))?;
    if digits.is_empty() {
        return Err(HexError::Invalid(s.to_string()));
    }
    u64::from_str_radix(digits, 16).map_err(|_| HexError::Invalid(s.to_string()))
}

pub fn quantity(n: u64) -> String {
    format!("0x{n:x}")
}

pub fn parse_hex_bytes(s: &str) -> Result<Vec<u8>, HexError> {
    let digits = s.strip_prefix("0x").ok_or_else(|| HexError::MissingPrefix(s.to_string()))?;
    hex::decode(digits).map_err(|_| HexError::Invalid(s.to_string()))
}

/// Serde adapter: `Vec<u8>` as a `0x` hex string.
pub mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("0x{}", hex::encode(v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_hex_bytes(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter: `BigUint` as a decimal string, since token amounts overflow JSON numbers.
pub mod dec_biguint {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub mod dec_bigint {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub mod opt_dec_biguint {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.collect_str(v),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| s.parse().map_err(serde::de::Error::custom)).transpose()
    }
}

/// Lossy `BigUint` to `f64`, rounding to nearest.
pub fn big_to_f64(v: &BigUint) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::INFINITY)
}

/// `num / den` as `f64`; `None` when `den` is zero.
pub fn big_ratio(num: &BigUint, den: &BigUint) -> Option<f64> {
    if den == &BigUint::default() {
        None
    } else {
        Some(big_to_f64(num) / big_to_f64(den))
    }
}
