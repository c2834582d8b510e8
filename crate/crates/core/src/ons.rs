//! Static ONS registry mapping EPC classes to ONS server addresses.
//!
//! Patterns form a two-level hierarchy: `<scheme>:<company prefix>`, then
//! `<scheme>`, then the wildcard `*`. Lookups return the most specific match.

use std::cmp::Reverse;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::epc::{Epc, Scheme};
use crate::ipv6::Ipv6Address;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("cannot read registry {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed registry: {0}")]
    Malformed(String),
    #[error("invalid pattern {0:?}")]
    InvalidPattern(String),
    #[error("duplicate pattern {0:?}")]
    DuplicatePattern(String),
    #[error("invalid IPv6 address {text:?} for pattern {pattern:?}: {reason}")]
    InvalidAddress { pattern: String, text: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("NoMatch: no registry record matches {0}")]
    NoMatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pattern {
    Wildcard,
    Scheme(Scheme),
    Company(Scheme, String),
}

impl Pattern {
    /// 0 for the wildcard, 1 for a scheme, 2 for scheme and company.
    pub fn specificity(&self) -> u8 {
        match self {
            Pattern::Wildcard => 0,
            Pattern::Scheme(_) => 1,
            Pattern::Company(..) => 2,
        }
    }

    pub fn matches(&self, epc: &Epc) -> bool {
        match self {
            Pattern::Wildcard => true,
            Pattern::Scheme(s) => epc.scheme() == *s,
            Pattern::Company(s, company) => {
                epc.scheme() == *s && epc.company_prefix_text().as_deref() == Some(company.as_str())
            }
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Wildcard => f.write_str("*"),
            Pattern::Scheme(s) => f.write_str(s.name()),
            Pattern::Company(s, c) => write!(f, "{}:{c}", s.name()),
        }
    }
}

impl FromStr for Pattern {
    type Err = RegistryError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let invalid = || RegistryError::InvalidPattern(text.to_string());
        if text == "*" {
            return Ok(Pattern::Wildcard);
        }
        let (scheme_text, company) = match text.split_once(':') {
            Some((s, c)) => (s, Some(c)),
            None => (text, None),
        };
        let scheme = Scheme::ALL
            .into_iter()
            .find(|s| s.name() == scheme_text)
            .ok_or_else(invalid)?;
        match company {
            None => Ok(Pattern::Scheme(scheme)),
            Some(c) if !c.is_empty() && c.bytes().all(|b| b.is_ascii_digit()) => {
                Ok(Pattern::Company(scheme, c.to_string()))
            }
            Some(_) => Err(invalid()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnsRecord {
    pub pattern: Pattern,
    pub ons_ip: Ipv6Address,
}

/// On-disk form of a record.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordEntry {
    pattern: String,
    ons_ip: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OnsRegistry {
    records: Vec<OnsRecord>,
}

impl OnsRegistry {
    /// Validates `records` and orders them most-specific-first.
    pub fn new(records: Vec<OnsRecord>) -> Result<Self, RegistryError> {
        let mut records = records;
        records.sort_by(|a, b| {
            (Reverse(a.pattern.specificity()), &a.pattern)
                .cmp(&(Reverse(b.pattern.specificity()), &b.pattern))
        });
        if let Some(w) = records.windows(2).find(|w| w[0].pattern == w[1].pattern) {
            return Err(RegistryError::DuplicatePattern(w[0].pattern.to_string()));
        }
        Ok(Self { records })
    }

    /// Registry whose only record is a wildcard pointing at `ons_ip`.
    pub fn single(ons_ip: Ipv6Address) -> Self {
        Self { records: vec![OnsRecord { pattern: Pattern::Wildcard, ons_ip }] }
    }

    pub fn from_json_str(text: &str) -> Result<Self, RegistryError> {
        let entries: Vec<RecordEntry> =
            serde_json::from_str(text).map_err(|e| RegistryError::Malformed(e.to_string()))?;
        let records = entries
            .into_iter()
            .map(|e| {
                let pattern = e.pattern.parse::<Pattern>()?;
                let ons_ip = e.ons_ip.parse::<Ipv6Address>().map_err(|err| {
                    RegistryError::InvalidAddress {
                        pattern: e.pattern.clone(),
                        text: e.ons_ip.clone(),
                        reason: err.to_string(),
                    }
                })?;
                Ok(OnsRecord { pattern, ons_ip })
            })
            .collect::<Result<Vec<_>, RegistryError>>()?;
        Self::new(records)
    }

    /// Serializes to the registry file format with canonical addresses.
    pub fn to_json_string(&self) -> String {
        let entries: Vec<RecordEntry> = self
            .records
            .iter()
            .map(|r| RecordEntry { pattern: r.pattern.to_string(), ons_ip: r.ons_ip.to_string() })
            .collect();
        serde_json::to_string_pretty(&entries).expect("plain strings serialize")
    }

    pub fn records(&self) -> &[OnsRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// ONS address of the most specific record matching `epc`.
    pub fn resolve(&self, epc: &Epc) -> Result<Ipv6Address, ResolveError> {
        self.records
            .iter()
            .find(|r| r.pattern.matches(epc))
            .map(|r| r.ons_ip)
            .ok_or_else(|| ResolveError::NoMatch(epc.to_string()))
    }
}

/// Reads and validates a registry file.
pub fn load_registry(path: impl AsRef<Path>) -> Result<OnsRegistry, RegistryError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| RegistryError::Io { path: path.display().to_string(), source })?;
    OnsRegistry::from_json_str(&text)
}

pub fn resolve(registry: &OnsRegistry, epc: &Epc) -> Result<Ipv6Address, ResolveError> {
    registry.resolve(epc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epc::parse_tag_uri;

    const A: &str = "2001:db8:a::1";
    const B: &str = "2001:db8:b::1";

    fn sgtin() -> Epc {
        parse_tag_uri("urn:epc:tag:sgtin-96:3.0614141.812345.6789").unwrap()
    }

    fn reg(json: &str) -> OnsRegistry {
        OnsRegistry::from_json_str(json).unwrap()
    }

    #[test]
    fn single_wildcard_entry_is_canonicalized() {
        let r = reg(r#"[{"pattern":"*","ons_ip":"3ffe:ffff:4004:1952:0000:7251:bc9b:a73f"}]"#);
        assert_eq!(r.len(), 1);
        assert!(r.to_json_string().contains("\"3ffe:ffff:4004:1952:0:7251:bc9b:a73f\""));
    }

    #[test]
    fn empty_registry_never_matches() {
        let r = reg("[]");
        assert!(r.is_empty());
        assert!(matches!(r.resolve(&sgtin()), Err(ResolveError::NoMatch(_))));
    }

    #[test]
    fn duplicates_rejected() {
        let json = format!(r#"[{{"pattern":"*","ons_ip":"{A}"}},{{"pattern":"*","ons_ip":"{B}"}}]"#);
        assert!(matches!(OnsRegistry::from_json_str(&json), Err(RegistryError::DuplicatePattern(p)) if p == "*"));
    }

    #[test]
    fn malformed_entries() {
        assert!(matches!(OnsRegistry::from_json_str("{}"), Err(RegistryError::Malformed(_))));
        assert!(matches!(
            OnsRegistry::from_json_str(r#"[{"pattern":"*"}]"#),
            Err(RegistryError::Malformed(_))
        ));
        assert!(matches!(
            OnsRegistry::from_json_str(r#"[{"pattern":"*","ons_ip":"::","ttl":5}]"#),
            Err(RegistryError::Malformed(_))
        ));
        assert!(matches!(
            OnsRegistry::from_json_str(r#"[{"pattern":"*","ons_ip":"1::2::3"}]"#),
            Err(RegistryError::InvalidAddress { .. })
        ));
        for bad in ["sgtin", "sgtin-96:", "sgtin-96:06a", "**"] {
            let json = format!(r#"[{{"pattern":"{bad}","ons_ip":"::"}}]"#);
            assert!(matches!(OnsRegistry::from_json_str(&json), Err(RegistryError::InvalidPattern(_))), "{bad}");
        }
    }

    #[test]
    fn most_specific_wins() {
        let json = format!(
            r#"[{{"pattern":"*","ons_ip":"{B}"}},{{"pattern":"sgtin-96","ons_ip":"::5"}},{{"pattern":"sgtin-96:0614141","ons_ip":"{A}"}}]"#
        );
        let r = reg(&json);
        assert_eq!(r.records()[0].pattern.specificity(), 2);
        assert_eq!(r.resolve(&sgtin()).unwrap().to_string(), A);
        let other = parse_tag_uri("urn:epc:tag:sgtin-96:3.0614142.812345.6789").unwrap();
        assert_eq!(r.resolve(&other).unwrap().to_string(), "::5");
        assert_eq!(r.resolve(&Epc::raw(7u8).unwrap()).unwrap().to_string(), B);
    }

    #[test]
    fn company_literal_respects_leading_zeros() {
        let r = reg(r#"[{"pattern":"sgtin-96:614141","ons_ip":"::1"}]"#);
        assert!(r.resolve(&sgtin()).is_err());
    }

    #[test]
    fn raw_against_scheme_only_registry() {
        let r = reg(r#"[{"pattern":"sgtin-96:0614141","ons_ip":"::1"}]"#);
        assert!(matches!(r.resolve(&Epc::raw(1u8).unwrap()), Err(ResolveError::NoMatch(_))));
    }

    #[test]
    fn load_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ons.json");
        std::fs::write(&path, format!(r#"[{{"pattern":"raw","ons_ip":"{A}"}}]"#)).unwrap();
        let r = load_registry(&path).unwrap();
        assert_eq!(r.resolve(&Epc::raw(1u8).unwrap()).unwrap().to_string(), A);
        assert!(matches!(load_registry(dir.path().join("missing.json")), Err(RegistryError::Io { .. })));
    }
}
