use std::io::Write;
use std::path::Path;

use epc6::epc::TagFields;
use epc6::harness::write_csv;
use epc6::{
    evaluate, evaluate_parallel, generate_population, load_registry, AddressingMethod,
    AddressingMethodId, Epc, EvalError, Ipv6Address, Method, OnsRegistry, PopulationSpec,
};
use serde_json::json;

use crate::cli::{BenchArgs, DeriveArgs, OnsSource, OutputFormat, ParseArgs, ResolveArgs};
use crate::config::CliConfig;
use crate::error::CliError;

pub struct Context {
    pub config: CliConfig,
    pub format: OutputFormat,
}

fn parse_epc(text: &str) -> Result<Epc, CliError> {
    text.parse::<Epc>().map_err(|e| CliError::Parse(e.to_string()))
}

fn load(path: &Path) -> Result<OnsRegistry, CliError> {
    load_registry(path).map_err(|e| CliError::Resolve(e.to_string()))
}

fn registry_path<'a>(ctx: &'a Context, flag: Option<&'a Path>) -> Result<&'a Path, CliError> {
    flag.or(ctx.config.registry_path.as_deref())
        .ok_or_else(|| CliError::Usage("no registry given (--registry or config registry_path)".into()))
}

fn registry_from(ctx: &Context, source: &OnsSource) -> Result<OnsRegistry, CliError> {
    match &source.ons {
        Some(text) => {
            let ons = text
                .parse::<Ipv6Address>()
                .map_err(|e| CliError::Parse(format!("ONS address {text:?}: {e}")))?;
            Ok(OnsRegistry::single(ons))
        }
        None => load(registry_path(ctx, source.registry.as_deref())?),
    }
}

pub fn derive(ctx: &Context, args: &DeriveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut epc = parse_epc(&args.epc)?;
    if let Some(serial) = args.serial {
        epc = epc.with_serial(serial).map_err(|e| CliError::Parse(e.to_string()))?;
    }
    let registry = registry_from(ctx, &args.source)?;
    let anchor = registry.resolve(&epc).map_err(|e| CliError::Resolve(e.to_string()))?;
    let id = args.method.or(ctx.config.default_method).unwrap_or(AddressingMethodId::HybridOns);
    let method = Method { iso_serial: args.iso_serial, ..Method::new(id).with_salt(args.salt) };
    let addr = method.derive(&epc, anchor).map_err(|e| CliError::Derive(e.to_string()))?;
    writeln!(out, "{addr}").map_err(|e| CliError::Output(e.to_string()))
}

fn epc_json(epc: &Epc) -> serde_json::Value {
    let mut obj = json!({
        "scheme": epc.scheme().name(),
        "declared_bits": epc.declared_bits(),
        "value": epc.value().map(|v| format!("0x{v:x}")),
        "serial_number": epc.serial_number().map(|s| s.to_string()),
        "uri": epc.uri(),
    });
    let fields = match epc.fields() {
        Some(TagFields::Sgtin96(f)) => json!({
            "filter": f.filter,
            "partition": f.partition,
            "company_prefix": epc.company_prefix_text(),
            "item_reference": f.item_reference,
            "serial": f.serial,
        }),
        Some(TagFields::Giai96(f)) => json!({
            "filter": f.filter,
            "partition": f.partition,
            "company_prefix": epc.company_prefix_text(),
            "asset_reference": f.asset_reference,
        }),
        Some(TagFields::Sgln96(f)) => json!({
            "filter": f.filter,
            "partition": f.partition,
            "company_prefix": epc.company_prefix_text(),
            "location_reference": f.location_reference,
            "extension": f.extension,
        }),
        None => serde_json::Value::Null,
    };
    obj["fields"] = fields;
    obj
}

pub fn parse(ctx: &Context, args: &ParseArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let epc = parse_epc(&args.uri)?;
    let doc = epc_json(&epc);
    let text = match ctx.format {
        OutputFormat::Structured => serde_json::to_string_pretty(&doc).expect("json value"),
        OutputFormat::Text => {
            let mut lines = Vec::new();
            for key in ["scheme", "declared_bits", "value", "serial_number", "uri"] {
                push_line(&mut lines, key, &doc[key]);
            }
            if let Some(fields) = doc["fields"].as_object() {
                for (k, v) in fields {
                    push_line(&mut lines, k, v);
                }
            }
            lines.join("\n")
        }
    };
    writeln!(out, "{text}").map_err(|e| CliError::Output(e.to_string()))
}

fn push_line(lines: &mut Vec<String>, key: &str, value: &serde_json::Value) {
    match value {
        serde_json::Value::Null => {}
        serde_json::Value::String(s) => lines.push(format!("{key}={s}")),
        other => lines.push(format!("{key}={other}")),
    }
}

pub fn resolve(ctx: &Context, args: &ResolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let epc = parse_epc(&args.epc)?;
    let registry = load(registry_path(ctx, args.registry.as_deref())?)?;
    let addr = registry.resolve(&epc).map_err(|e| CliError::Resolve(e.to_string()))?;
    writeln!(out, "{addr}").map_err(|e| CliError::Output(e.to_string()))
}

pub fn bench(ctx: &Context, args: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let registry = registry_from(ctx, &args.source)?;
    let spec = PopulationSpec {
        scheme: args.scheme,
        count: args.count,
        seed: args.seed,
        serial_width_bits: args.serial_width,
    };
    let population = generate_population(&spec).map_err(|e| CliError::Usage(format!("bench: {e}")))?;
    // without an explicit list, methods that cannot handle the scheme are skipped
    let explicit = !args.methods.is_empty();
    let methods: Vec<AddressingMethodId> =
        if explicit { args.methods.clone() } else { AddressingMethodId::ALL.to_vec() };

    let mut reports = Vec::with_capacity(methods.len());
    for id in methods {
        let result = if args.parallel {
            evaluate_parallel(id, &population, &registry)
        } else {
            evaluate(id, &population, &registry)
        };
        match result {
            Ok(report) => reports.push(report.with_seed(args.seed)),
            Err(e @ EvalError::Derive { .. }) if !explicit => {
                eprintln!("bench: skipping {id}: {e}");
            }
            Err(e @ EvalError::Derive { .. }) => return Err(CliError::Derive(e.to_string())),
            Err(e @ EvalError::Resolve { .. }) => return Err(CliError::Resolve(e.to_string())),
        }
    }

    let mut buf = Vec::new();
    match ctx.format {
        OutputFormat::Text => write_csv(&reports, &mut buf).map_err(|e| CliError::Output(e.to_string()))?,
        OutputFormat::Structured => {
            let doc = json!({ "population": spec, "reports": reports });
            serde_json::to_writer_pretty(&mut buf, &doc).map_err(|e| CliError::Output(e.to_string()))?;
            buf.push(b'\n');
        }
    }
    if let Some(path) = &args.out {
        std::fs::write(path, &buf).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    }
    out.write_all(&buf).map_err(|e| CliError::Output(e.to_string()))
}
