//! Address derivation: the hybrid ONS-prefix method and the fixed /64
//! baselines it is compared against.
//!
//! Every derivation is a pure function of its inputs.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{bit_length, bit_length_big, low64, xor_fold64};
use crate::epc::{Epc, Scheme};
use crate::ipv6::{high_mask, Ipv6Address, ADDRESS_BITS};

/// EPCs at or below this width contribute their full value.
pub const FULL_EPC_MAX_BITS: u32 = 64;

/// Width of the network prefix / interface identifier split used by baselines.
pub const IID_BITS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error("EPC wider than 64 bits has no serial number")]
    MissingSerial,
    #[error("EPC numeric value is not known")]
    MissingValue,
    #[error("EPC is {bits} bits wide, method accepts at most 64")]
    EpcTooWide { bits: u32 },
    #[error("serial number is {bits} bits wide, method accepts at most 64")]
    SerialTooWide { bits: u32 },
    #[error("payload is {bits} bits wide, an address holds at most 128")]
    PayloadTooWide { bits: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayloadSource {
    FullEpc,
    SerialNumber,
}

/// How the 128 address bits are split between the ONS prefix and the EPC side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DerivationPlan {
    pub source: PayloadSource,
    pub input_bits: u32,
    pub prefix_bits: u32,
}

impl DerivationPlan {
    fn new(source: PayloadSource, input_bits: u32) -> Result<Self, DeriveError> {
        if input_bits > ADDRESS_BITS {
            return Err(DeriveError::PayloadTooWide { bits: input_bits });
        }
        Ok(Self { source, input_bits, prefix_bits: ADDRESS_BITS - input_bits })
    }
}

/// Whether `epc` counts as a ≤64-bit EPC. Named schemes branch on their
/// declared width; raw EPCs on the minimal width of their value.
fn takes_full_epc(epc: &Epc) -> bool {
    let width = match (epc.scheme(), epc.value()) {
        (Scheme::Raw, Some(v)) => bit_length_big(v),
        _ => epc.declared_bits(),
    };
    width <= FULL_EPC_MAX_BITS
}

/// Chooses the payload and the bit budget for `epc`.
pub fn plan(epc: &Epc) -> Result<DerivationPlan, DeriveError> {
    if takes_full_epc(epc) {
        let value = epc.value().ok_or(DeriveError::MissingValue)?;
        DerivationPlan::new(PayloadSource::FullEpc, bit_length_big(value))
    } else {
        let serial = epc.serial_number().ok_or(DeriveError::MissingSerial)?;
        DerivationPlan::new(PayloadSource::SerialNumber, bit_length(serial))
    }
}

fn payload(epc: &Epc, plan: &DerivationPlan) -> Result<u128, DeriveError> {
    match plan.source {
        PayloadSource::FullEpc => {
            let v = epc.value().ok_or(DeriveError::MissingValue)?;
            u128::try_from(v).map_err(|_| DeriveError::PayloadTooWide { bits: bit_length_big(v) })
        }
        PayloadSource::SerialNumber => epc.serial_number().ok_or(DeriveError::MissingSerial),
    }
}

/// Keeps the top `128 - n` bits of `ons` in place and fills the low `n`
/// bits with the `n`-bit payload.
pub fn combine(ons: Ipv6Address, payload: u128, input_bits: u32) -> Ipv6Address {
    let prefix = ons.value() & high_mask(ADDRESS_BITS - input_bits.min(ADDRESS_BITS));
    Ipv6Address::new(prefix | payload)
}

/// Hybrid derivation: high-order ONS bits followed by the minimal-width
/// EPC (≤64-bit EPCs) or serial number (wider EPCs).
pub fn derive_hybrid(epc: &Epc, ons_ip: Ipv6Address) -> Result<Ipv6Address, DeriveError> {
    let plan = plan(epc)?;
    let v = payload(epc, &plan)?;
    Ok(combine(ons_ip, v, plan.input_bits))
}

fn with_iid(net_prefix: Ipv6Address, iid: u64) -> Ipv6Address {
    Ipv6Address::new((net_prefix.value() & high_mask(IID_BITS)) | iid as u128)
}

fn value_of(epc: &Epc) -> Result<&BigUint, DeriveError> {
    epc.value().ok_or(DeriveError::MissingValue)
}

/// Network prefix /64 followed by the EPC as interface identifier.
pub fn derive_direct64(epc: &Epc, net_prefix: Ipv6Address) -> Result<Ipv6Address, DeriveError> {
    if epc.declared_bits() > IID_BITS {
        return Err(DeriveError::EpcTooWide { bits: epc.declared_bits() });
    }
    let v = value_of(epc)?;
    Ok(with_iid(net_prefix, low64(v)))
}

/// Interface identifier from the XOR-fold of the EPC's 64-bit chunks,
/// XORed with `salt`.
pub fn derive_xor_pad(epc: &Epc, net_prefix: Ipv6Address, salt: u64) -> Result<Ipv6Address, DeriveError> {
    let v = value_of(epc)?;
    Ok(with_iid(net_prefix, xor_fold64(v) ^ salt))
}

/// As [`derive_xor_pad`] but combining the folded EPC with `salt` by OR.
pub fn derive_or_pad(epc: &Epc, net_prefix: Ipv6Address, salt: u64) -> Result<Ipv6Address, DeriveError> {
    let v = value_of(epc)?;
    Ok(with_iid(net_prefix, xor_fold64(v) | salt))
}

/// Serial number left-padded with one-bits to 64 bits.
pub fn one_pad_iid(serial: u128) -> Result<u64, DeriveError> {
    let m = bit_length(serial);
    if m > IID_BITS {
        return Err(DeriveError::SerialTooWide { bits: m });
    }
    let ones = if m == IID_BITS { 0 } else { u64::MAX << m };
    Ok(ones | serial as u64)
}

pub fn derive_one_pad(epc: &Epc, net_prefix: Ipv6Address) -> Result<Ipv6Address, DeriveError> {
    let serial = epc.serial_number().ok_or(DeriveError::MissingSerial)?;
    Ok(with_iid(net_prefix, one_pad_iid(serial)?))
}

/// Identifier presented to the ISO/EPC method.
#[derive(Debug, Clone, Copy)]
pub enum IsoInput<'a> {
    /// Full EPC value: zero-extended below 64 bits, low 64 bits above.
    Epc(&'a Epc),
    /// ISO serial number, zero-extended.
    IsoSerial(u64),
}

pub fn derive_iso_epc(id: IsoInput<'_>, net_prefix: Ipv6Address) -> Result<Ipv6Address, DeriveError> {
    let iid = match id {
        IsoInput::Epc(epc) => low64(value_of(epc)?),
        IsoInput::IsoSerial(serial) => serial,
    };
    Ok(with_iid(net_prefix, iid))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AddressingMethodId {
    HybridOns,
    Direct64,
    XorPad,
    OrPad,
    OnePadSerial,
    IsoEpc,
}

impl AddressingMethodId {
    pub const ALL: [AddressingMethodId; 6] = [
        AddressingMethodId::HybridOns,
        AddressingMethodId::Direct64,
        AddressingMethodId::XorPad,
        AddressingMethodId::OrPad,
        AddressingMethodId::OnePadSerial,
        AddressingMethodId::IsoEpc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AddressingMethodId::HybridOns => "hybrid_ons",
            AddressingMethodId::Direct64 => "direct64",
            AddressingMethodId::XorPad => "xor_pad",
            AddressingMethodId::OrPad => "or_pad",
            AddressingMethodId::OnePadSerial => "one_pad_serial",
            AddressingMethodId::IsoEpc => "iso_epc",
        }
    }

    /// Strategy object for this method with default parameters.
    pub fn method(self) -> Method {
        Method::new(self)
    }
}

impl fmt::Display for AddressingMethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown addressing method {0:?}")]
pub struct UnknownMethod(pub String);

impl FromStr for AddressingMethodId {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| UnknownMethod(s.to_string()))
    }
}

/// Common interface over every addressing scheme. `anchor` is the ONS
/// address for the hybrid method and the network prefix for the baselines.
pub trait AddressingMethod {
    fn id(&self) -> AddressingMethodId;
    fn derive(&self, epc: &Epc, anchor: Ipv6Address) -> Result<Ipv6Address, DeriveError>;
}

/// A method id together with the parameters the baselines take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Method {
    pub id: AddressingMethodId,
    /// Salt operand for `xor_pad` / `or_pad`.
    pub salt: u64,
    /// Treat the EPC's serial number as an ISO serial in `iso_epc`.
    pub iso_serial: bool,
}

impl Method {
    pub fn new(id: AddressingMethodId) -> Self {
        Self { id, salt: 0, iso_serial: false }
    }

    pub fn with_salt(mut self, salt: u64) -> Self {
        self.salt = salt;
        self
    }
}

impl AddressingMethod for Method {
    fn id(&self) -> AddressingMethodId {
        self.id
    }

    fn derive(&self, epc: &Epc, anchor: Ipv6Address) -> Result<Ipv6Address, DeriveError> {
        match self.id {
            AddressingMethodId::HybridOns => derive_hybrid(epc, anchor),
            AddressingMethodId::Direct64 => derive_direct64(epc, anchor),
            AddressingMethodId::XorPad => derive_xor_pad(epc, anchor, self.salt),
            AddressingMethodId::OrPad => derive_or_pad(epc, anchor, self.salt),
            AddressingMethodId::OnePadSerial => derive_one_pad(epc, anchor),
            AddressingMethodId::IsoEpc if self.iso_serial => {
                let serial = epc.serial_number().ok_or(DeriveError::MissingSerial)?;
                let serial = u64::try_from(serial)
                    .map_err(|_| DeriveError::SerialTooWide { bits: bit_length(serial) })?;
                derive_iso_epc(IsoInput::IsoSerial(serial), anchor)
            }
            AddressingMethodId::IsoEpc => derive_iso_epc(IsoInput::Epc(epc), anchor),
        }
    }
}

impl AddressingMethod for AddressingMethodId {
    fn id(&self) -> AddressingMethodId {
        *self
    }

    fn derive(&self, epc: &Epc, anchor: Ipv6Address) -> Result<Ipv6Address, DeriveError> {
        Method::new(*self).derive(epc, anchor)
    }
}
