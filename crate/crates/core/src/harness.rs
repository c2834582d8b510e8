//! Seeded EPC populations and per-method evaluation reports.
//!
//! A report records the derived addresses, every colliding pair, how deep
//! each address shares a prefix with its ONS anchor, and derivation timing.
//! Everything except the timing block is a deterministic function of the
//! inputs.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Write;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::addressing::{AddressingMethod, AddressingMethodId, DeriveError, Method};
use crate::epc::{Epc, EpcError, Giai96Fields, Scheme, Sgln96Fields, Sgtin96Fields};
use crate::ipv6::Ipv6Address;
use crate::ons::{OnsRegistry, ResolveError};

/// Company prefixes (7 digits, partition 5) drawn from for named schemes.
const COMPANY_POOL: [u64; 4] = [614141, 614142, 952011, 4012345];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("population count must be at least 1")]
    EmptyPopulation,
    #[error("serial width {bits} not supported for {scheme} (1..={max})")]
    InvalidWidth { scheme: Scheme, bits: u32, max: u32 },
    #[error("unsatisfiable: {count} distinct EPCs requested but only {space} exist")]
    Unsatisfiable { count: usize, space: u128 },
    #[error("generated EPC rejected: {0}")]
    Epc(#[from] EpcError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("resolve failed for EPC #{index} ({epc}): {source}")]
    Resolve { index: usize, epc: String, source: ResolveError },
    #[error("derive failed for EPC #{index} ({epc}): {source}")]
    Derive { index: usize, epc: String, source: DeriveError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopulationSpec {
    pub scheme: Scheme,
    pub count: usize,
    pub seed: u64,
    pub serial_width_bits: Option<u32>,
}

impl PopulationSpec {
    pub fn new(scheme: Scheme, count: usize, seed: u64) -> Self {
        Self { scheme, count, seed, serial_width_bits: None }
    }

    pub fn with_serial_width(mut self, bits: u32) -> Self {
        self.serial_width_bits = Some(bits);
        self
    }

    fn width_bounds(&self) -> (u32, u32) {
        match self.scheme {
            Scheme::Raw => (64, 128),
            Scheme::Sgtin96 => (38, 38),
            // partition 5 asset reference
            Scheme::Giai96 => (58, 58),
            Scheme::Sgln96 => (41, 41),
            Scheme::Usdod96 => (36, 36),
        }
    }
}

/// `count` distinct values below `2^bits`.
fn distinct_values(rng: &mut ChaCha8Rng, count: usize, bits: u32) -> Vec<u128> {
    let space = 1u128 << bits;
    if bits <= 24 && (count as u128) * 2 > space {
        let mut all: Vec<u128> = (0..space).collect();
        all.shuffle(rng);
        all.truncate(count);
        return all;
    }
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v = rng.random::<u128>() & (space - 1);
        if seen.insert(v) {
            out.push(v);
        }
    }
    out
}

/// Deterministic synthetic population. Serials are distinct within a
/// population, so the serial space bounds `count`.
pub fn generate_population(spec: &PopulationSpec) -> Result<Vec<Epc>, HarnessError> {
    if spec.count == 0 {
        return Err(HarnessError::EmptyPopulation);
    }
    let (default_bits, max_bits) = spec.width_bounds();
    let bits = spec.serial_width_bits.unwrap_or(default_bits);
    if !(1..=max_bits).contains(&bits) {
        return Err(HarnessError::InvalidWidth { scheme: spec.scheme, bits, max: max_bits });
    }
    let space = 1u128.checked_shl(bits).unwrap_or(u128::MAX);
    if bits < 128 && spec.count as u128 > space {
        return Err(HarnessError::Unsatisfiable { count: spec.count, space });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let serials = if bits == 128 {
        let mut seen = HashSet::with_capacity(spec.count);
        std::iter::repeat_with(|| rng.random::<u128>())
            .filter(|v| seen.insert(*v))
            .take(spec.count)
            .collect()
    } else {
        distinct_values(&mut rng, spec.count, bits)
    };

    serials
        .into_iter()
        .map(|serial| {
            let epc = match spec.scheme {
                Scheme::Raw => Epc::raw_with_width(serial, bits)?.with_serial(serial)?,
                Scheme::Sgtin96 => Epc::from_sgtin96(Sgtin96Fields {
                    filter: rng.random_range(0..8),
                    partition: 5,
                    company_prefix: COMPANY_POOL[rng.random_range(0..COMPANY_POOL.len())],
                    item_reference: rng.random_range(0..1_000_000),
                    serial: serial as u64,
                })?,
                Scheme::Giai96 => Epc::from_giai96(Giai96Fields {
                    filter: rng.random_range(0..8),
                    partition: 5,
                    company_prefix: COMPANY_POOL[rng.random_range(0..COMPANY_POOL.len())],
                    asset_reference: serial as u64,
                })?,
                Scheme::Sgln96 => Epc::from_sgln96(Sgln96Fields {
                    filter: rng.random_range(0..8),
                    partition: 5,
                    company_prefix: COMPANY_POOL[rng.random_range(0..COMPANY_POOL.len())],
                    location_reference: rng.random_range(0..100_000),
                    extension: serial as u64,
                })?,
                Scheme::Usdod96 => Epc::serial_only(Scheme::Usdod96, serial)?,
            };
            Ok(epc)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionPair {
    pub first_index: usize,
    pub second_index: usize,
    pub first: String,
    pub second: String,
    pub address: Ipv6Address,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Timing {
    pub total_ns: u64,
    pub mean_ns: f64,
    pub p99_ns: u64,
}

impl Timing {
    fn from_samples(samples: &[Duration]) -> Self {
        if samples.is_empty() {
            return Self::default();
        }
        let mut ns: Vec<u64> = samples.iter().map(|d| d.as_nanos() as u64).collect();
        ns.sort_unstable();
        let total: u64 = ns.iter().sum();
        // nearest-rank percentile
        let rank = ((ns.len() as f64) * 0.99).ceil() as usize;
        Self {
            total_ns: total,
            mean_ns: total as f64 / ns.len() as f64,
            p99_ns: ns[rank.clamp(1, ns.len()) - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub method: AddressingMethodId,
    pub seed: Option<u64>,
    pub population_size: usize,
    pub distinct_addresses: usize,
    pub colliding_duplicates: usize,
    pub collision_pairs: Vec<CollisionPair>,
    /// Longest common prefix with the anchor address -> number of addresses.
    pub shared_prefix_depth: BTreeMap<u32, usize>,
    pub addresses: Vec<Ipv6Address>,
    pub timing: Timing,
}

impl BenchReport {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Report with the timing block zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> Self {
        Self { timing: Timing::default(), ..self.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Every unordered pair of indices whose addresses are equal, sorted.
pub fn find_collisions(addresses: &[Ipv6Address]) -> Vec<(usize, usize)> {
    let mut groups: HashMap<Ipv6Address, Vec<usize>> = HashMap::with_capacity(addresses.len());
    for (i, a) in addresses.iter().enumerate() {
        groups.entry(*a).or_default().push(i);
    }
    let mut pairs: Vec<(usize, usize)> = groups
        .values()
        .filter(|g| g.len() > 1)
        .flat_map(|g| {
            g.iter()
                .enumerate()
                .flat_map(move |(k, &i)| g[k + 1..].iter().map(move |&j| (i, j)))
        })
        .collect();
    pairs.sort_unstable();
    pairs
}

fn resolve_all(population: &[Epc], registry: &OnsRegistry) -> Result<Vec<Ipv6Address>, EvalError> {
    population
        .iter()
        .enumerate()
        .map(|(index, epc)| {
            registry
                .resolve(epc)
                .map_err(|source| EvalError::Resolve { index, epc: epc.to_string(), source })
        })
        .collect()
}

fn timed_derive(
    method: &Method,
    index: usize,
    epc: &Epc,
    anchor: Ipv6Address,
) -> Result<(Ipv6Address, Duration), EvalError> {
    let start = Instant::now();
    let result = method.derive(epc, anchor);
    let elapsed = start.elapsed();
    result
        .map(|a| (a, elapsed))
        .map_err(|source| EvalError::Derive { index, epc: epc.to_string(), source })
}

fn build_report(
    method: &Method,
    population: &[Epc],
    anchors: &[Ipv6Address],
    derived: Vec<(Ipv6Address, Duration)>,
) -> BenchReport {
    let (addresses, samples): (Vec<_>, Vec<_>) = derived.into_iter().unzip();
    let collision_pairs: Vec<CollisionPair> = find_collisions(&addresses)
        .into_iter()
        .map(|(i, j)| CollisionPair {
            first_index: i,
            second_index: j,
            first: population[i].to_string(),
            second: population[j].to_string(),
            address: addresses[i],
        })
        .collect();
    let distinct = addresses.iter().collect::<HashSet<_>>().len();
    let mut depth = BTreeMap::new();
    for (a, anchor) in addresses.iter().zip(anchors) {
        *depth.entry(a.common_prefix_len(*anchor)).or_insert(0) += 1;
    }
    BenchReport {
        method: method.id,
        seed: None,
        population_size: population.len(),
        distinct_addresses: distinct,
        colliding_duplicates: population.len() - distinct,
        collision_pairs,
        shared_prefix_depth: depth,
        addresses,
        timing: Timing::from_samples(&samples),
    }
}

/// Derives one address per EPC with `method`. Resolution happens before and
/// outside the timed region.
pub fn evaluate(
    method: impl Into<Method>,
    population: &[Epc],
    registry: &OnsRegistry,
) -> Result<BenchReport, EvalError> {
    let method = method.into();
    let anchors = resolve_all(population, registry)?;
    let derived = population
        .iter()
        .zip(&anchors)
        .enumerate()
        .map(|(i, (epc, anchor))| timed_derive(&method, i, epc, *anchor))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(build_report(&method, population, &anchors, derived))
}

/// Parallel [`evaluate`]; identical to it apart from the timing block.
pub fn evaluate_parallel(
    method: impl Into<Method>,
    population: &[Epc],
    registry: &OnsRegistry,
) -> Result<BenchReport, EvalError> {
    let method = method.into();
    let anchors = resolve_all(population, registry)?;
    let derived = population
        .par_iter()
        .zip(anchors.par_iter())
        .enumerate()
        .map(|(i, (epc, anchor))| timed_derive(&method, i, epc, *anchor))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(build_report(&method, population, &anchors, derived))
}

impl From<AddressingMethodId> for Method {
    fn from(id: AddressingMethodId) -> Self {
        Method::new(id)
    }
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    method: &'a str,
    population: usize,
    distinct: usize,
    collisions: usize,
    mean_time_ns: String,
    p99_time_ns: u64,
}

/// One comma-separated row per report, with a header line.
pub fn write_csv<W: Write>(reports: &[BenchReport], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(CsvRow {
            method: r.method.name(),
            population: r.population_size,
            distinct: r.distinct_addresses,
            collisions: r.collision_pairs.len(),
            mean_time_ns: format!("{:.1}", r.timing.mean_ns),
            p99_time_ns: r.timing.p99_ns,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::addressing::derive_hybrid;
    use crate::ipv6::parse_ipv6;

    fn ons() -> Ipv6Address {
        parse_ipv6("3ffe:ffff:4004:1952:0:7251:bc9b:a73f").unwrap()
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = PopulationSpec::new(Scheme::Sgtin96, 1000, 42);
        let a = generate_population(&spec).unwrap();
        assert_eq!(a, generate_population(&spec).unwrap());
        assert_eq!(a.len(), 1000);
        assert_ne!(a, generate_population(&PopulationSpec { seed: 43, ..spec }).unwrap());
    }

    #[test]
    fn pigeonhole() {
        let spec = PopulationSpec::new(Scheme::Raw, 3, 0).with_serial_width(1);
        assert_eq!(generate_population(&spec), Err(HarnessError::Unsatisfiable { count: 3, space: 2 }));
        let two = PopulationSpec::new(Scheme::Raw, 2, 0).with_serial_width(1);
        let mut values: Vec<u128> =
            generate_population(&two).unwrap().iter().map(|e| e.serial_number().unwrap()).collect();
        values.sort();
        assert_eq!(values, [0, 1]);
    }

    #[test]
    fn single_raw() {
        let pop = generate_population(&PopulationSpec::new(Scheme::Raw, 1, 0)).unwrap();
        assert_eq!(pop.len(), 1);
        assert_eq!(pop[0].scheme(), Scheme::Raw);
        assert!(pop[0].value().unwrap().bits() <= 64);
    }

    #[test]
    fn spec_errors() {
        assert_eq!(
            generate_population(&PopulationSpec::new(Scheme::Raw, 0, 0)),
            Err(HarnessError::EmptyPopulation)
        );
        assert!(matches!(
            generate_population(&PopulationSpec::new(Scheme::Sgtin96, 1, 0).with_serial_width(39)),
            Err(HarnessError::InvalidWidth { .. })
        ));
    }

    #[test]
    fn every_scheme_generates_valid_epcs() {
        for scheme in Scheme::ALL {
            let pop = generate_population(&PopulationSpec::new(scheme, 50, 9)).unwrap();
            assert_eq!(pop.len(), 50);
            for e in &pop {
                assert_eq!(e.scheme(), scheme);
                if let Some(uri) = e.uri() {
                    assert_eq!(&crate::epc::parse_tag_uri(&uri).unwrap(), e);
                }
            }
        }
    }

    #[test]
    fn duplicate_input_collides() {
        let e = Epc::raw(12345u32).unwrap().with_serial(12345).unwrap();
        let pop = vec![e.clone(), Epc::raw(7u8).unwrap().with_serial(7).unwrap(), e];
        let reg = OnsRegistry::single(ons());
        for id in AddressingMethodId::ALL {
            let r = evaluate(id, &pop, &reg).unwrap();
            assert!(r.collision_pairs.iter().any(|p| (p.first_index, p.second_index) == (0, 2)), "{id}");
            assert_eq!(r.distinct_addresses + r.colliding_duplicates, r.population_size);
        }
    }

    #[test]
    fn results_listing_population() {
        let pop = vec![
            Epc::raw(9_611_683_854_154_598u64).unwrap(),
            Epc::raw_serial_only(96, 37_375_918_425_780).unwrap(),
        ];
        let r = evaluate(AddressingMethodId::HybridOns, &pop, &OnsRegistry::single(ons())).unwrap();
        let text: Vec<String> = r.addresses.iter().map(|a| a.to_string()).collect();
        assert_eq!(text, ["3ffe:ffff:4004:1952:22:25c6:89d1:fb66", "3ffe:ffff:4004:1952:0:61fe:4257:46b4"]);
        assert!(r.collision_pairs.is_empty());
    }

    #[test]
    fn errors_carry_offending_epc() {
        let pop = vec![Epc::raw(1u8).unwrap(), Epc::raw(2u8).unwrap()];
        let err = evaluate(AddressingMethodId::OnePadSerial, &pop, &OnsRegistry::single(ons())).unwrap_err();
        assert!(matches!(err, EvalError::Derive { index: 0, source: DeriveError::MissingSerial, .. }));
        let err = evaluate(AddressingMethodId::HybridOns, &pop, &OnsRegistry::default()).unwrap_err();
        assert!(matches!(err, EvalError::Resolve { index: 0, .. }));
    }

    #[test]
    fn parallel_matches_sequential() {
        let pop = generate_population(&PopulationSpec::new(Scheme::Raw, 5000, 3).with_serial_width(14)).unwrap();
        let reg = OnsRegistry::single(ons());
        for id in AddressingMethodId::ALL {
            let seq = evaluate(id, &pop, &reg).unwrap();
            let par = evaluate_parallel(id, &pop, &reg).unwrap();
            assert_eq!(seq.without_timing().to_json(), par.without_timing().to_json());
        }
    }

    #[test]
    fn hybrid_addresses_keep_plan_prefix() {
        let pop = generate_population(&PopulationSpec::new(Scheme::Sgtin96, 500, 5)).unwrap();
        let r = evaluate(AddressingMethodId::HybridOns, &pop, &OnsRegistry::single(ons())).unwrap();
        for (e, a) in pop.iter().zip(&r.addresses) {
            let p = crate::addressing::plan(e).unwrap();
            assert!(a.common_prefix_len(ons()) >= p.prefix_bits);
            assert_eq!(*a, derive_hybrid(e, ons()).unwrap());
        }
    }

    #[test]
    fn csv_columns() {
        let pop = vec![Epc::raw(1u8).unwrap()];
        let r = evaluate(AddressingMethodId::Direct64, &pop, &OnsRegistry::single(ons())).unwrap();
        let mut buf = Vec::new();
        write_csv(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "method,population,distinct,collisions,mean_time_ns,p99_time_ns");
        assert!(lines.next().unwrap().starts_with("direct64,1,1,0,"));
    }

    #[test]
    fn percentile() {
        let samples: Vec<Duration> = (1..=100).map(Duration::from_nanos).collect();
        let t = Timing::from_samples(&samples);
        assert_eq!(t.p99_ns, 99);
        assert_eq!(t.total_ns, 5050);
        assert_eq!(Timing::from_samples(&[Duration::from_nanos(7)]).p99_ns, 7);
    }
}
