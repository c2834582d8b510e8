use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use epc6::{AddressingMethodId, Scheme};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "epc6", version, about = "Derive IPv6 addresses for EPC-tagged objects")]
pub struct Cli {
    /// Output format; overrides `output_format` from the config file.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Structured,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive the IPv6 address of one EPC.
    Derive(DeriveArgs),
    /// Parse a tag URI and print its fields.
    Parse(ParseArgs),
    /// Look up the ONS address responsible for an EPC.
    Resolve(ResolveArgs),
    /// Evaluate addressing methods over a synthetic population.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
#[group(multiple = false)]
pub struct OnsSource {
    /// ONS server address to derive from.
    #[arg(long, value_name = "IPV6")]
    pub ons: Option<String>,
    /// Registry file mapping EPC patterns to ONS addresses.
    #[arg(long, value_name = "PATH")]
    pub registry: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DeriveArgs {
    /// Tag URI, 0x-prefixed hex, or decimal EPC.
    pub epc: String,
    #[command(flatten)]
    pub source: OnsSource,
    #[arg(long, value_parser = parse_method)]
    pub method: Option<AddressingMethodId>,
    /// Serial number to attach to a numeric EPC.
    #[arg(long)]
    pub serial: Option<u128>,
    /// Salt operand for xor_pad / or_pad.
    #[arg(long, default_value_t = 0)]
    pub salt: u64,
    /// Use the serial number as an ISO serial for iso_epc.
    #[arg(long)]
    pub iso_serial: bool,
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    pub uri: String,
}

#[derive(Debug, Args)]
pub struct ResolveArgs {
    /// Tag URI, 0x-prefixed hex, or decimal EPC.
    pub epc: String,
    #[arg(long, value_name = "PATH")]
    pub registry: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub source: OnsSource,
    #[arg(long, value_parser = parse_scheme, default_value = "raw")]
    pub scheme: Scheme,
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Upper bound on generated serial widths.
    #[arg(long)]
    pub serial_width: Option<u32>,
    /// Comma-separated method ids; all methods when omitted.
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    pub methods: Vec<AddressingMethodId>,
    /// Derive in parallel.
    #[arg(long)]
    pub parallel: bool,
    /// Also write the output to this file.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<AddressingMethodId, String> {
    s.parse::<AddressingMethodId>().map_err(|e| {
        let names: Vec<&str> = AddressingMethodId::ALL.iter().map(|m| m.name()).collect();
        format!("{e}; expected one of {}", names.join(", "))
    })
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse::<Scheme>().map_err(|e| e.to_string())
}
