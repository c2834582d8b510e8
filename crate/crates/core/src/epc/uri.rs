//! Tag URI grammar: `urn:epc:tag:<scheme>:<f1>.<f2>...<fn>`.
//!
//! For every supported scheme the company prefix is the second field and its
//! character count (leading zeros included) selects the partition row.

use num_bigint::BigUint;

use super::sgtin::{partition_row, Sgtin96Fields, SGTIN96_SERIAL_BITS};
use super::{Epc, EpcError, TagFields};

pub const TAG_URI_PREFIX: &str = "urn:epc:tag:";

const GIAI96_ASSET_BITS: [u32; 7] = [42, 45, 48, 52, 55, 58, 62];
const SGLN96_EXTENSION_BITS: u32 = 41;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Giai96Fields {
    pub filter: u8,
    pub partition: u8,
    pub company_prefix: u64,
    pub asset_reference: u64,
}

impl Giai96Fields {
    pub fn company_digits(&self) -> u32 {
        12 - self.partition as u32
    }

    pub fn asset_bits(&self) -> u32 {
        GIAI96_ASSET_BITS[self.partition.min(6) as usize]
    }

    pub fn validate(&self) -> Result<(), EpcError> {
        check_filter(self.filter)?;
        check_partition(self.partition)?;
        check_digits("company_prefix", self.company_prefix, self.company_digits())?;
        check_serial(self.asset_reference as u128, self.asset_bits())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sgln96Fields {
    pub filter: u8,
    pub partition: u8,
    pub company_prefix: u64,
    pub location_reference: u64,
    pub extension: u64,
}

impl Sgln96Fields {
    pub fn company_digits(&self) -> u32 {
        12 - self.partition as u32
    }

    pub fn location_digits(&self) -> u32 {
        self.partition as u32
    }

    pub fn validate(&self) -> Result<(), EpcError> {
        check_filter(self.filter)?;
        check_partition(self.partition)?;
        check_digits("company_prefix", self.company_prefix, self.company_digits())?;
        check_digits("location_reference", self.location_reference, self.location_digits())?;
        check_serial(self.extension as u128, SGLN96_EXTENSION_BITS)
    }
}

fn check_filter(filter: u8) -> Result<(), EpcError> {
    if filter > 7 {
        return Err(EpcError::FieldRange { field: "filter", reason: format!("{filter} > 7") });
    }
    Ok(())
}

fn check_partition(partition: u8) -> Result<(), EpcError> {
    partition_row(partition).map(|_| ())
}

fn check_digits(field: &'static str, value: u64, digits: u32) -> Result<(), EpcError> {
    if value >= 10u64.pow(digits) {
        return Err(EpcError::FieldRange { field, reason: format!("{value} exceeds {digits} digits") });
    }
    Ok(())
}

fn check_serial(serial: u128, max: u32) -> Result<(), EpcError> {
    let bits = 128 - serial.leading_zeros();
    if bits > max {
        return Err(EpcError::SerialTooWide { bits, max });
    }
    Ok(())
}

fn malformed(text: &str, why: &str) -> EpcError {
    EpcError::Malformed(format!("{why} in {text:?}"))
}

/// A field of exactly `digits` decimal characters (leading zeros allowed).
fn fixed_digits(field: &'static str, text: &str, digits: u32) -> Result<u64, EpcError> {
    if text.len() != digits as usize {
        return Err(EpcError::FieldRange {
            field,
            reason: format!("{text:?} must have {digits} digits"),
        });
    }
    if digits == 0 {
        return Ok(0);
    }
    text.parse().map_err(|_| EpcError::FieldRange { field, reason: format!("{text:?} is not decimal") })
}

/// Decimal serial without leading zeros, bounded by `max_bits`.
fn serial_field(text: &str, max_bits: u32) -> Result<u64, EpcError> {
    if text.is_empty() || (text.len() > 1 && text.starts_with('0')) {
        return Err(EpcError::FieldRange {
            field: "serial",
            reason: format!("{text:?} is not a canonical decimal"),
        });
    }
    let value = BigUint::parse_bytes(text.as_bytes(), 10).ok_or_else(|| EpcError::FieldRange {
        field: "serial",
        reason: format!("{text:?} is not decimal"),
    })?;
    let bits = value.bits() as u32;
    if bits > max_bits {
        return Err(EpcError::SerialTooWide { bits, max: max_bits });
    }
    Ok(u64::try_from(value).expect("bounded by max_bits <= 64"))
}

fn filter_field(text: &str) -> Result<u8, EpcError> {
    match text.as_bytes() {
        [d @ b'0'..=b'7'] => Ok(d - b'0'),
        _ => Err(EpcError::FieldRange { field: "filter", reason: format!("{text:?} not in 0..7") }),
    }
}

fn company_partition(text: &str) -> Result<u8, EpcError> {
    let len = text.len();
    if !(6..=12).contains(&len) || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(EpcError::FieldRange {
            field: "company_prefix",
            reason: format!("{text:?} must be 6 to 12 digits"),
        });
    }
    Ok((12 - len) as u8)
}

/// Parses a tag URI into an [`Epc`].
pub fn parse_tag_uri(text: &str) -> Result<Epc, EpcError> {
    let body = text
        .strip_prefix(TAG_URI_PREFIX)
        .ok_or_else(|| malformed(text, "missing urn:epc:tag: prefix"))?;
    let (scheme, rest) = body.split_once(':').ok_or_else(|| malformed(text, "missing scheme"))?;
    if scheme.is_empty() {
        return Err(malformed(text, "empty scheme"));
    }
    let parts: Vec<&str> = rest.split('.').collect();
    if let Some(bad) = parts.iter().flat_map(|p| p.chars()).find(|c| !c.is_ascii_digit()) {
        if !matches!(scheme, "sgtin-96" | "giai-96" | "sgln-96") {
            return Err(EpcError::UnknownScheme(scheme.to_string()));
        }
        return Err(malformed(text, &format!("non-decimal character {bad:?}")));
    }
    let expect = |n: usize| {
        if parts.len() == n {
            Ok(())
        } else {
            Err(malformed(text, &format!("expected {n} fields, found {}", parts.len())))
        }
    };
    match scheme {
        "sgtin-96" => {
            expect(4)?;
            let filter = filter_field(parts[0])?;
            let partition = company_partition(parts[1])?;
            let row = partition_row(partition)?;
            let fields = Sgtin96Fields {
                filter,
                partition,
                company_prefix: fixed_digits("company_prefix", parts[1], row.company_digits)?,
                item_reference: fixed_digits("item_reference", parts[2], row.reference_digits)?,
                serial: serial_field(parts[3], SGTIN96_SERIAL_BITS)?,
            };
            Epc::from_sgtin96(fields)
        }
        "giai-96" => {
            expect(3)?;
            let filter = filter_field(parts[0])?;
            let partition = company_partition(parts[1])?;
            let fields = Giai96Fields {
                filter,
                partition,
                company_prefix: fixed_digits("company_prefix", parts[1], 12 - partition as u32)?,
                asset_reference: serial_field(parts[2], GIAI96_ASSET_BITS[partition as usize])?,
            };
            Epc::from_giai96(fields)
        }
        "sgln-96" => {
            expect(4)?;
            let filter = filter_field(parts[0])?;
            let partition = company_partition(parts[1])?;
            let fields = Sgln96Fields {
                filter,
                partition,
                company_prefix: fixed_digits("company_prefix", parts[1], 12 - partition as u32)?,
                location_reference: fixed_digits("location_reference", parts[2], partition as u32)?,
                extension: serial_field(parts[3], SGLN96_EXTENSION_BITS)?,
            };
            Epc::from_sgln96(fields)
        }
        other => Err(EpcError::UnknownScheme(other.to_string())),
    }
}

pub(super) fn render_tag_uri(fields: &TagFields) -> String {
    match fields {
        TagFields::Sgtin96(f) => {
            let row = partition_row(f.partition).expect("validated on construction");
            format!(
                "{TAG_URI_PREFIX}sgtin-96:{}.{:0cw$}.{:0iw$}.{}",
                f.filter,
                f.company_prefix,
                f.item_reference,
                f.serial,
                cw = row.company_digits as usize,
                iw = row.reference_digits as usize,
            )
        }
        TagFields::Giai96(f) => format!(
            "{TAG_URI_PREFIX}giai-96:{}.{:0cw$}.{}",
            f.filter,
            f.company_prefix,
            f.asset_reference,
            cw = f.company_digits() as usize,
        ),
        TagFields::Sgln96(f) => {
            let location = match f.location_digits() {
                0 => String::new(),
                w => format!("{:0w$}", f.location_reference, w = w as usize),
            };
            format!(
                "{TAG_URI_PREFIX}sgln-96:{}.{:0cw$}.{location}.{}",
                f.filter,
                f.company_prefix,
                f.extension,
                cw = f.company_digits() as usize,
            )
        }
    }
}
