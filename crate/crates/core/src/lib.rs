//! # epc6
//!
//! Derives hierarchical IPv6 addresses for EPC-tagged objects.
//!
//! The hybrid method keeps the high-order bits of the object's ONS server
//! address and replaces the low `n` bits with the EPC itself (EPCs up to 64
//! bits) or with its serial number (wider EPCs), where `n` is the minimal
//! binary width of that payload. Five fixed /64 baselines are provided for
//! comparison, together with a seeded population harness that measures
//! collisions, prefix sharing and derivation time.
//!
//! ```
//! use epc6::{derive_hybrid, parse_ipv6, Epc};
//!
//! let ons = parse_ipv6("3ffe:ffff:4004:1952:0:7251:bc9b:a73f").unwrap();
//! let epc = Epc::raw(9_611_683_854_154_598u64).unwrap();
//! let addr = derive_hybrid(&epc, ons).unwrap();
//! assert_eq!(addr.to_string(), "3ffe:ffff:4004:1952:22:25c6:89d1:fb66");
//! ```

pub mod addressing;
pub mod bits;
pub mod epc;
pub mod harness;
pub mod ipv6;
pub mod ons;

pub use addressing::{
    derive_direct64, derive_hybrid, derive_iso_epc, derive_one_pad, derive_or_pad, derive_xor_pad,
    plan, AddressingMethod, AddressingMethodId, DerivationPlan, DeriveError, IsoInput, Method,
    PayloadSource,
};
pub use bits::{bit_length, bit_length_big};
pub use epc::{
    decode_sgtin96, encode_sgtin96, parse_tag_uri, Epc, EpcError, Scheme, Sgtin96Fields,
};
pub use harness::{
    evaluate, evaluate_parallel, generate_population, BenchReport, EvalError, HarnessError,
    PopulationSpec,
};
pub use ipv6::{format_canonical, parse_ipv6, Ipv6Address, Ipv6ParseError};
pub use ons::{load_registry, resolve, OnsRecord, OnsRegistry, Pattern, RegistryError, ResolveError};

pub use num_bigint::BigUint;
