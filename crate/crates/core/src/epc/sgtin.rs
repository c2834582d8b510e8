//! SGTIN-96 binary codec.
//!
//! Layout, most significant first:
//! `header(8)=0x30 | filter(3) | partition(3) | company | item | serial(38)`
//! where the company/item split comes from the partition table.

use serde::{Deserialize, Serialize};

use super::EpcError;

pub const SGTIN96_HEADER: u8 = 0x30;
pub const SGTIN96_SERIAL_BITS: u32 = 38;

/// One row of a GS1 partition table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionRow {
    pub company_bits: u32,
    pub company_digits: u32,
    pub reference_bits: u32,
    pub reference_digits: u32,
}

const fn row(cb: u32, cd: u32, rb: u32, rd: u32) -> PartitionRow {
    PartitionRow {
        company_bits: cb,
        company_digits: cd,
        reference_bits: rb,
        reference_digits: rd,
    }
}

/// SGTIN partition table; item reference digits include the indicator digit.
pub const SGTIN_PARTITIONS: [PartitionRow; 7] = [
    row(40, 12, 4, 1),
    row(37, 11, 7, 2),
    row(34, 10, 10, 3),
    row(30, 9, 14, 4),
    row(27, 8, 17, 5),
    row(24, 7, 20, 6),
    row(20, 6, 24, 7),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sgtin96Fields {
    pub filter: u8,
    pub partition: u8,
    pub company_prefix: u64,
    pub item_reference: u64,
    pub serial: u64,
}

fn check_width(field: &'static str, value: u64, bits: u32) -> Result<(), EpcError> {
    if bits < 64 && value >> bits != 0 {
        return Err(EpcError::FieldOverflow { field, value, bits });
    }
    Ok(())
}

pub(crate) fn partition_row(partition: u8) -> Result<PartitionRow, EpcError> {
    SGTIN_PARTITIONS
        .get(partition as usize)
        .copied()
        .ok_or(EpcError::InvalidPartition(partition))
}

impl Sgtin96Fields {
    pub fn row(&self) -> Result<PartitionRow, EpcError> {
        partition_row(self.partition)
    }

    /// Checks that company prefix and item reference fit their decimal
    /// digit counts, which is stricter than fitting their bit widths.
    pub fn validate_digits(&self) -> Result<(), EpcError> {
        let row = self.row()?;
        if self.company_prefix >= 10u64.pow(row.company_digits) {
            return Err(EpcError::FieldRange {
                field: "company_prefix",
                reason: format!("{} exceeds {} digits", self.company_prefix, row.company_digits),
            });
        }
        if self.item_reference >= 10u64.pow(row.reference_digits) {
            return Err(EpcError::FieldRange {
                field: "item_reference",
                reason: format!("{} exceeds {} digits", self.item_reference, row.reference_digits),
            });
        }
        Ok(())
    }
}

/// Packs `fields` into the 96-bit binary form.
pub fn encode_sgtin96(fields: &Sgtin96Fields) -> Result<u128, EpcError> {
    let row = fields.row()?;
    check_width("filter", fields.filter as u64, 3)?;
    check_width("company_prefix", fields.company_prefix, row.company_bits)?;
    check_width("item_reference", fields.item_reference, row.reference_bits)?;
    check_width("serial", fields.serial, SGTIN96_SERIAL_BITS)?;

    let mut v = SGTIN96_HEADER as u128;
    v = (v << 3) | fields.filter as u128;
    v = (v << 3) | fields.partition as u128;
    v = (v << row.company_bits) | fields.company_prefix as u128;
    v = (v << row.reference_bits) | fields.item_reference as u128;
    v = (v << SGTIN96_SERIAL_BITS) | fields.serial as u128;
    Ok(v)
}

/// Unpacks a 96-bit SGTIN value. Bits above 96 must be zero.
pub fn decode_sgtin96(value: u128) -> Result<Sgtin96Fields, EpcError> {
    if value >> 96 != 0 {
        return Err(EpcError::ValueTooWide { bits: 128 - value.leading_zeros(), declared: 96 });
    }
    let header = (value >> 88) as u8;
    if header != SGTIN96_HEADER {
        return Err(EpcError::WrongHeader(header));
    }
    let filter = ((value >> 85) & 0b111) as u8;
    let partition = ((value >> 82) & 0b111) as u8;
    let row = partition_row(partition)?;
    let mask = |bits: u32| (1u128 << bits) - 1;
    let item_shift = SGTIN96_SERIAL_BITS;
    let company_shift = item_shift + row.reference_bits;
    Ok(Sgtin96Fields {
        filter,
        partition,
        company_prefix: ((value >> company_shift) & mask(row.company_bits)) as u64,
        item_reference: ((value >> item_shift) & mask(row.reference_bits)) as u64,
        serial: (value & mask(SGTIN96_SERIAL_BITS)) as u64,
    })
}
