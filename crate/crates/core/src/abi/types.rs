use std::fmt;

use super::AbiError;

/// A Solidity parameter type.
///
/// `Tuple` and nested arrays are representable so that their canonical
/// signatures (and therefore topics) can still be computed, but the codec
/// refuses to decode them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SolType {
    Address,
    Bool,
    Uint(u16),
    Int(u16),
    FixedBytes(u8),
    Bytes,
    String,
    FixedArray(Box<SolType>, usize),
    Array(Box<SolType>),
    Tuple(Vec<SolType>),
}

impl SolType {
    /// Parses a type string from an ABI document. `components` supplies the
    /// member types when the base type is `tuple`.
    pub fn parse(s: &str, components: Option<Vec<SolType>>) -> Result<SolType, AbiError> {
        let s = s.trim();
        if let Some(open) = s.rfind('[') {
            if !s.ends_with(']') {
                return Err(AbiError::UnsupportedType(s.to_string()));
            }
            let inner = SolType::parse(&s[..open], components)?;
            let dim = &s[open + 1..s.len() - 1];
            return if dim.is_empty() {
                Ok(SolType::Array(Box::new(inner)))
            } else {
                let k: usize = dim.parse().map_err(|_| AbiError::UnsupportedType(s.to_string()))?;
                if k == 0 {
                    return Err(AbiError::UnsupportedType(s.to_string()));
                }
                Ok(SolType::FixedArray(Box::new(inner), k))
            };
        }
        let ty = match s {
            "address" => SolType::Address,
            "bool" => SolType::Bool,
            "string" => SolType::String,
            "bytes" => SolType::Bytes,
            "uint" => SolType::Uint(256),
            "int" => SolType::Int(256),
            "byte" => SolType::FixedBytes(1),
            "tuple" => match components {
                Some(c) => SolType::Tuple(c),
                None => return Err(AbiError::UnsupportedType(s.to_string())),
            },
            _ => {
                let bits = |digits: &str| -> Option<u16> {
                    let n: u16 = digits.parse().ok()?;
                    (n.is_multiple_of(8) && (8..=256).contains(&n) && !digits.starts_with('0')).then_some(n)
                };
                if let Some(d) = s.strip_prefix("uint") {
                    SolType::Uint(bits(d).ok_or_else(|| AbiError::UnsupportedType(s.to_string()))?)
                } else if let Some(d) = s.strip_prefix("int") {
                    SolType::Int(bits(d).ok_or_else(|| AbiError::UnsupportedType(s.to_string()))?)
                } else if let Some(d) = s.strip_prefix("bytes") {
                    match d.parse::<u8>() {
                        Ok(n) if (1..=32).contains(&n) && !d.starts_with('0') => SolType::FixedBytes(n),
                        _ => return Err(AbiError::UnsupportedType(s.to_string())),
                    }
                } else {
                    return Err(AbiError::UnsupportedType(s.to_string()));
                }
            }
        };
        Ok(ty)
    }

    pub fn is_elementary(&self) -> bool {
        !matches!(self, SolType::FixedArray(..) | SolType::Array(_) | SolType::Tuple(_))
    }

    /// Whether the codec handles this type: elementary types and one-level
    /// arrays (fixed or dynamic) of elementary types.
    pub fn is_supported(&self) -> bool {
        match self {
            SolType::Tuple(_) => false,
            SolType::FixedArray(inner, _) | SolType::Array(inner) => inner.is_elementary(),
            _ => true,
        }
    }

    pub fn is_dynamic(&self) -> bool {
        match self {
            SolType::Bytes | SolType::String | SolType::Array(_) => true,
            SolType::FixedArray(inner, _) => inner.is_dynamic(),
            SolType::Tuple(members) => members.iter().any(SolType::is_dynamic),
            _ => false,
        }
    }

    /// Bytes occupied in the head of an enclosing tuple.
    pub fn head_size(&self) -> usize {
        if self.is_dynamic() {
            return 32;
        }
        match self {
            SolType::FixedArray(inner, k) => inner.head_size() * k,
            SolType::Tuple(members) => members.iter().map(SolType::head_size).sum(),
            _ => 32,
        }
    }
}

impl fmt::Display for SolType {
    /// Canonical form used in event signatures (`uint` becomes `uint256`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolType::Address => f.write_str("address"),
            SolType::Bool => f.write_str("bool"),
            SolType::Uint(n) => write!(f, "uint{n}"),
            SolType::Int(n) => write!(f, "int{n}"),
            SolType::FixedBytes(n) => write!(f, "bytes{n}"),
            SolType::Bytes => f.write_str("bytes"),
            SolType::String => f.write_str("string"),
            SolType::FixedArray(inner, k) => write!(f, "{inner}[{k}]"),
            SolType::Array(inner) => write!(f, "{inner}[]"),
            SolType::Tuple(members) => {
                f.write_str("(")?;
                for (i, m) in members.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{m}")?;
                }
                f.write_str(")")
            }
        }
    }
}
