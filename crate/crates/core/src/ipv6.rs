//! 128-bit IPv6 address value with canonical text rendering.
//!
//! The canonical form is lowercase hex with leading zeros suppressed in each
//! group and the longest run of two or more zero groups replaced by `::`
//! (leftmost run wins on ties). Embedded dotted-quad IPv4 notation is never
//! produced, though the parser accepts it in the last 32 bits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Width of an IPv6 address in bits.
pub const ADDRESS_BITS: u32 = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Ipv6ParseError {
    #[error("empty address text")]
    Empty,
    #[error("invalid character {0:?} in address")]
    InvalidChar(char),
    #[error("more than one \"::\" in address")]
    MultipleCompression,
    #[error("group {0:?} exceeds 16 bits")]
    GroupOverflow(String),
    #[error("empty group in address")]
    EmptyGroup,
    #[error("expected 8 groups, found {0}")]
    WrongGroupCount(usize),
    #[error("invalid embedded IPv4 part {0:?}")]
    InvalidIpv4(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Ipv6Address(u128);

impl Ipv6Address {
    pub const UNSPECIFIED: Self = Self(0);

    pub const fn new(value: u128) -> Self {
        Self(value)
    }

    pub const fn value(self) -> u128 {
        self.0
    }

    pub fn segments(self) -> [u16; 8] {
        let mut out = [0u16; 8];
        for (i, seg) in out.iter_mut().enumerate() {
            *seg = (self.0 >> (112 - 16 * i)) as u16;
        }
        out
    }

    pub fn from_segments(segments: [u16; 8]) -> Self {
        Self(segments.iter().fold(0u128, |acc, &s| (acc << 16) | s as u128))
    }

    /// Address with every bit below the first `bits` cleared.
    pub fn truncate(self, bits: u32) -> Self {
        Self(self.0 & high_mask(bits))
    }

    /// Number of leading bits shared with `other` (128 when equal).
    pub fn common_prefix_len(self, other: Self) -> u32 {
        (self.0 ^ other.0).leading_zeros()
    }

    /// Renders the canonical text form.
    pub fn to_canonical(self) -> String {
        self.to_string()
    }

    /// Renders all eight groups as four hex digits, without compression.
    pub fn to_full_text(self) -> String {
        let segs = self.segments();
        let parts: Vec<String> = segs.iter().map(|s| format!("{s:04x}")).collect();
        parts.join(":")
    }
}

/// Mask with the top `bits` bits set.
pub(crate) fn high_mask(bits: u32) -> u128 {
    match bits {
        0 => 0,
        b if b >= 128 => u128::MAX,
        b => !(u128::MAX >> b),
    }
}

impl From<u128> for Ipv6Address {
    fn from(value: u128) -> Self {
        Self(value)
    }
}

impl From<Ipv6Address> for u128 {
    fn from(addr: Ipv6Address) -> Self {
        addr.0
    }
}

impl From<std::net::Ipv6Addr> for Ipv6Address {
    fn from(addr: std::net::Ipv6Addr) -> Self {
        Self(addr.into())
    }
}

impl From<Ipv6Address> for std::net::Ipv6Addr {
    fn from(addr: Ipv6Address) -> Self {
        addr.0.into()
    }
}

/// Locates the longest run (length ≥ 2) of zero groups, leftmost on ties.
fn longest_zero_run(segs: &[u16; 8]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < 8 {
        if segs[i] != 0 {
            i += 1;
            continue;
        }
        let start = i;
        while i < 8 && segs[i] == 0 {
            i += 1;
        }
        let len = i - start;
        if len >= 2 && best.is_none_or(|(_, l)| len > l) {
            best = Some((start, len));
        }
    }
    best
}

impl fmt::Display for Ipv6Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let segs = self.segments();
        let write_groups = |f: &mut fmt::Formatter<'_>, groups: &[u16]| -> fmt::Result {
            for (i, g) in groups.iter().enumerate() {
                if i > 0 {
                    f.write_str(":")?;
                }
                write!(f, "{g:x}")?;
            }
            Ok(())
        };
        match longest_zero_run(&segs) {
            Some((start, len)) => {
                write_groups(f, &segs[..start])?;
                f.write_str("::")?;
                write_groups(f, &segs[start + len..])
            }
            None => write_groups(f, &segs),
        }
    }
}

fn parse_group(text: &str) -> Result<u16, Ipv6ParseError> {
    if text.is_empty() {
        return Err(Ipv6ParseError::EmptyGroup);
    }
    if let Some(c) = text.chars().find(|c| !c.is_ascii_hexdigit()) {
        return Err(Ipv6ParseError::InvalidChar(c));
    }
    if text.len() > 4 {
        return Err(Ipv6ParseError::GroupOverflow(text.to_string()));
    }
    Ok(u16::from_str_radix(text, 16).expect("validated hex group"))
}

fn parse_ipv4_tail(text: &str) -> Result<[u16; 2], Ipv6ParseError> {
    let bad = || Ipv6ParseError::InvalidIpv4(text.to_string());
    let octets: Vec<&str> = text.split('.').collect();
    if octets.len() != 4 {
        return Err(bad());
    }
    let mut bytes = [0u8; 4];
    for (b, o) in bytes.iter_mut().zip(&octets) {
        let well_formed = !o.is_empty()
            && o.len() <= 3
            && o.bytes().all(|c| c.is_ascii_digit())
            && !(o.len() > 1 && o.starts_with('0'));
        if !well_formed {
            return Err(bad());
        }
        *b = o.parse().map_err(|_| bad())?;
    }
    Ok([
        u16::from_be_bytes([bytes[0], bytes[1]]),
        u16::from_be_bytes([bytes[2], bytes[3]]),
    ])
}

/// Parses a colon-separated run of groups; the last one may be dotted IPv4.
fn parse_groups(text: &str, allow_ipv4: bool) -> Result<Vec<u16>, Ipv6ParseError> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let parts: Vec<&str> = text.split(':').collect();
    let mut out = Vec::with_capacity(parts.len() + 1);
    for (i, part) in parts.iter().enumerate() {
        if allow_ipv4 && i + 1 == parts.len() && part.contains('.') {
            out.extend(parse_ipv4_tail(part)?);
        } else {
            out.push(parse_group(part)?);
        }
    }
    Ok(out)
}

/// Parses full, zero-suppressed, and `::`-compressed IPv6 text.
pub fn parse_ipv6(text: &str) -> Result<Ipv6Address, Ipv6ParseError> {
    if text.is_empty() {
        return Err(Ipv6ParseError::Empty);
    }
    if let Some(c) = text
        .chars()
        .find(|c| !(c.is_ascii_hexdigit() || *c == ':' || *c == '.'))
    {
        return Err(Ipv6ParseError::InvalidChar(c));
    }
    let segs: Vec<u16> = match text.find("::") {
        Some(pos) => {
            let (head, tail) = (&text[..pos], &text[pos + 2..]);
            if tail.contains("::") {
                return Err(Ipv6ParseError::MultipleCompression);
            }
            let head = parse_groups(head, false)?;
            let tail = parse_groups(tail, true)?;
            // "::" stands for at least one zero group
            if head.len() + tail.len() > 7 {
                return Err(Ipv6ParseError::WrongGroupCount(head.len() + tail.len()));
            }
            let mut all = head;
            all.resize(8 - tail.len(), 0);
            all.extend(tail);
            all
        }
        None => {
            let groups = parse_groups(text, true)?;
            if groups.len() != 8 {
                return Err(Ipv6ParseError::WrongGroupCount(groups.len()));
            }
            groups
        }
    };
    let mut arr = [0u16; 8];
    arr.copy_from_slice(&segs);
    Ok(Ipv6Address::from_segments(arr))
}

/// Canonical text form of `addr`.
pub fn format_canonical(addr: Ipv6Address) -> String {
    addr.to_string()
}

impl FromStr for Ipv6Address {
    type Err = Ipv6ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_ipv6(s)
    }
}

impl Serialize for Ipv6Address {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ipv6Address {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_ipv6(&text).map_err(serde::de::Error::custom)
    }
}
