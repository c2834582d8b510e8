//! Electronic Product Codes: tag URI parsing and rendering, the SGTIN-96
//! codec, and the numeric accessors the addressing methods consume.

mod sgtin;
mod uri;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::bit_length_big;

pub use sgtin::{
    decode_sgtin96, encode_sgtin96, PartitionRow, Sgtin96Fields, SGTIN96_HEADER,
    SGTIN96_SERIAL_BITS, SGTIN_PARTITIONS,
};
pub use uri::{parse_tag_uri, Giai96Fields, Sgln96Fields, TAG_URI_PREFIX};

/// Largest EPC width the codec models.
pub const MAX_EPC_BITS: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EpcError {
    #[error("malformed tag URI: {0}")]
    Malformed(String),
    #[error("unknown scheme {0:?}")]
    UnknownScheme(String),
    #[error("field {field} out of range: {reason}")]
    FieldRange { field: &'static str, reason: String },
    #[error("serial number needs {bits} bits, field holds {max}")]
    SerialTooWide { bits: u32, max: u32 },
    #[error("field {field} value {value} overflows {bits} bits")]
    FieldOverflow { field: &'static str, value: u64, bits: u32 },
    #[error("wrong header 0x{0:02x}")]
    WrongHeader(u8),
    #[error("invalid partition {0}")]
    InvalidPartition(u8),
    #[error("value needs {bits} bits, declared width is {declared}")]
    ValueTooWide { bits: u32, declared: u32 },
    #[error("invalid declared width {0}")]
    InvalidWidth(u32),
    #[error("invalid numeric EPC {0:?}")]
    InvalidNumber(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "sgtin-96")]
    Sgtin96,
    #[serde(rename = "giai-96")]
    Giai96,
    #[serde(rename = "sgln-96")]
    Sgln96,
    #[serde(rename = "usdod-96")]
    Usdod96,
    #[serde(rename = "raw")]
    Raw,
}

impl Scheme {
    pub const ALL: [Scheme; 5] =
        [Scheme::Sgtin96, Scheme::Giai96, Scheme::Sgln96, Scheme::Usdod96, Scheme::Raw];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Sgtin96 => "sgtin-96",
            Scheme::Giai96 => "giai-96",
            Scheme::Sgln96 => "sgln-96",
            Scheme::Usdod96 => "usdod-96",
            Scheme::Raw => "raw",
        }
    }

    /// Fixed width of a named scheme; `None` for raw.
    pub fn fixed_bits(self) -> Option<u32> {
        match self {
            Scheme::Raw => None,
            _ => Some(96),
        }
    }

    /// Width of the serial / individual-reference field. For giai-96 this
    /// is the widest across partitions; the URI parser checks the exact one.
    pub fn serial_field_bits(self) -> u32 {
        match self {
            Scheme::Sgtin96 => SGTIN96_SERIAL_BITS,
            Scheme::Giai96 => 62,
            Scheme::Sgln96 => 41,
            Scheme::Usdod96 => 36,
            Scheme::Raw => 128,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = EpcError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == lower || sc.name().replace('-', "") == lower)
            .ok_or_else(|| EpcError::UnknownScheme(s.to_string()))
    }
}

/// Scheme-specific fields retained from a parsed tag URI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TagFields {
    Sgtin96(Sgtin96Fields),
    Giai96(Giai96Fields),
    Sgln96(Sgln96Fields),
}

/// A parsed Electronic Product Code.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Epc {
    scheme: Scheme,
    declared_bits: u32,
    value: Option<BigUint>,
    serial_number: Option<u128>,
    fields: Option<TagFields>,
}

impl Epc {
    /// Opaque numeric EPC whose declared width is its minimal binary width.
    pub fn raw(value: impl Into<BigUint>) -> Result<Self, EpcError> {
        let value = value.into();
        let bits = bit_length_big(&value);
        Self::raw_with_width(value, bits)
    }

    pub fn raw_with_width(value: impl Into<BigUint>, declared_bits: u32) -> Result<Self, EpcError> {
        if !(1..=MAX_EPC_BITS).contains(&declared_bits) {
            return Err(EpcError::InvalidWidth(declared_bits));
        }
        let value = value.into();
        if value.bits() > declared_bits as u64 {
            return Err(EpcError::ValueTooWide { bits: value.bits() as u32, declared: declared_bits });
        }
        Ok(Self {
            scheme: Scheme::Raw,
            declared_bits,
            value: Some(value),
            serial_number: None,
            fields: None,
        })
    }

    /// Raw EPC known only by its width and serial number.
    pub fn raw_serial_only(declared_bits: u32, serial: u128) -> Result<Self, EpcError> {
        if !(1..=MAX_EPC_BITS).contains(&declared_bits) {
            return Err(EpcError::InvalidWidth(declared_bits));
        }
        Ok(Self {
            scheme: Scheme::Raw,
            declared_bits,
            value: None,
            serial_number: Some(serial),
            fields: None,
        })
    }

    /// Attaches a serial number, checking it against the scheme's serial field.
    pub fn with_serial(mut self, serial: u128) -> Result<Self, EpcError> {
        let max = self.scheme.serial_field_bits();
        let bits = crate::bits::bit_length(serial);
        if serial != 0 && bits > max {
            return Err(EpcError::SerialTooWide { bits, max });
        }
        self.serial_number = Some(serial);
        Ok(self)
    }

    pub fn from_sgtin96(fields: Sgtin96Fields) -> Result<Self, EpcError> {
        fields.validate_digits()?;
        let value = encode_sgtin96(&fields)?;
        Ok(Self {
            scheme: Scheme::Sgtin96,
            declared_bits: 96,
            value: Some(BigUint::from(value)),
            serial_number: Some(fields.serial as u128),
            fields: Some(TagFields::Sgtin96(fields)),
        })
    }

    pub fn from_giai96(fields: Giai96Fields) -> Result<Self, EpcError> {
        fields.validate()?;
        Ok(Self {
            scheme: Scheme::Giai96,
            declared_bits: 96,
            value: None,
            serial_number: Some(fields.asset_reference as u128),
            fields: Some(TagFields::Giai96(fields)),
        })
    }

    pub fn from_sgln96(fields: Sgln96Fields) -> Result<Self, EpcError> {
        fields.validate()?;
        Ok(Self {
            scheme: Scheme::Sgln96,
            declared_bits: 96,
            value: None,
            serial_number: Some(fields.extension as u128),
            fields: Some(TagFields::Sgln96(fields)),
        })
    }

    /// Named-scheme EPC known only by its serial (no URI, no value).
    pub fn serial_only(scheme: Scheme, serial: u128) -> Result<Self, EpcError> {
        let Some(bits) = scheme.fixed_bits() else {
            return Self::raw_serial_only(128, serial);
        };
        Self {
            scheme,
            declared_bits: bits,
            value: None,
            serial_number: None,
            fields: None,
        }
        .with_serial(serial)
    }

    /// Parses `0x`-prefixed hex or decimal text as a raw EPC.
    pub fn parse_numeric(text: &str) -> Result<Self, EpcError> {
        let bad = || EpcError::InvalidNumber(text.to_string());
        let value = match text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
            Some(hex) => BigUint::parse_bytes(hex.as_bytes(), 16),
            None => BigUint::parse_bytes(text.as_bytes(), 10),
        }
        .ok_or_else(bad)?;
        if text.contains(['+', '-', '_']) {
            return Err(bad());
        }
        if value.bits() > MAX_EPC_BITS as u64 {
            return Err(EpcError::ValueTooWide { bits: value.bits() as u32, declared: MAX_EPC_BITS });
        }
        Self::raw(value)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn declared_bits(&self) -> u32 {
        self.declared_bits
    }

    /// The full EPC as one number, when known.
    pub fn value(&self) -> Option<&BigUint> {
        self.value.as_ref()
    }

    pub fn serial_number(&self) -> Option<u128> {
        self.serial_number
    }

    pub fn fields(&self) -> Option<&TagFields> {
        self.fields.as_ref()
    }

    /// Company prefix with its significant leading zeros, for URI-derived EPCs.
    pub fn company_prefix_text(&self) -> Option<String> {
        let (prefix, digits) = match self.fields? {
            TagFields::Sgtin96(f) => (f.company_prefix, f.row().ok()?.company_digits),
            TagFields::Giai96(f) => (f.company_prefix, f.company_digits()),
            TagFields::Sgln96(f) => (f.company_prefix, f.company_digits()),
        };
        Some(format!("{prefix:0width$}", width = digits as usize))
    }

    /// Canonical tag URI, for EPCs that came from (or map to) one.
    pub fn uri(&self) -> Option<String> {
        self.fields.as_ref().map(uri::render_tag_uri)
    }
}

impl fmt::Display for Epc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(uri) = self.uri() {
            return f.write_str(&uri);
        }
        match (&self.value, self.serial_number) {
            (Some(v), None) => write!(f, "0x{v:x}"),
            (Some(v), Some(s)) => write!(f, "0x{v:x}/serial={s}"),
            (None, Some(s)) => write!(f, "{}/{}:serial={s}", self.scheme, self.declared_bits),
            (None, None) => write!(f, "{}/{}", self.scheme, self.declared_bits),
        }
    }
}

impl FromStr for Epc {
    type Err = EpcError;

    /// Accepts a tag URI, `0x` hex, or decimal.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.starts_with("urn:") {
            parse_tag_uri(s)
        } else {
            Epc::parse_numeric(s)
        }
    }
}
