use std::path::Path;
use std::process::{Command, Output};

const ONS: &str = "3ffe:ffff:4004:1952:0:7251:bc9b:a73f";
const SGTIN: &str = "urn:epc:tag:sgtin-96:3.0614141.812345.6789";

fn epc6(args: &[&str]) -> Output {
    epc6_with_config(args, None)
}

fn epc6_with_config(args: &[&str], config: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_epc6"));
    cmd.args(args).env_remove("EPC6_CONFIG");
    if let Some(path) = config {
        cmd.env("EPC6_CONFIG", path);
    }
    cmd.output().expect("spawn epc6")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn derive_results_listing_vector() {
    let o = epc6(&["derive", "0x2225C689D1FB66", "--ons", ONS, "--method", "hybrid_ons"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "3ffe:ffff:4004:1952:22:25c6:89d1:fb66\n");

    let dec = epc6(&["derive", "9611683854154598", "--ons", ONS]);
    assert_eq!(stdout(&dec), "3ffe:ffff:4004:1952:22:25c6:89d1:fb66\n");
}

#[test]
fn derive_wide_epc_through_serial() {
    let wide = format!("0x1{}", "0".repeat(24));
    let o = epc6(&["derive", &wide, "--serial", "37375918425780", "--ons", ONS]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "3ffe:ffff:4004:1952:0:61fe:4257:46b4\n");
}

#[test]
fn derive_one_bit_payload() {
    let o = epc6(&["derive", "0x1", "--ons", "::", "--method", "hybrid_ons"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "::1\n");
}

#[test]
fn derive_usage_errors() {
    let o = epc6(&["derive", "0x1", "--ons", "::", "--method", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("expected one of hybrid_ons"), "{}", stderr(&o));

    let both = epc6(&["derive", "0x1", "--ons", "::", "--registry", "r.json"]);
    assert_eq!(both.status.code(), Some(2));

    let neither = epc6(&["derive", "0x1"]);
    assert_eq!(neither.status.code(), Some(2));
    assert!(stderr(&neither).starts_with("usage:"));
}

#[test]
fn derive_stage_tagged_failures() {
    let bad_epc = epc6(&["derive", "0xzz", "--ons", "::"]);
    assert_eq!(bad_epc.status.code(), Some(3));
    assert!(stderr(&bad_epc).starts_with("parse:"));

    let bad_ons = epc6(&["derive", "0x1", "--ons", "1::2::3"]);
    assert_eq!(bad_ons.status.code(), Some(3));

    let too_wide = epc6(&["derive", SGTIN, "--ons", ONS, "--method", "direct64"]);
    assert_eq!(too_wide.status.code(), Some(5));
    assert!(stderr(&too_wide).starts_with("derive:"));
}

#[test]
fn derive_via_registry_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let reg = write(
        dir.path(),
        "ons.json",
        r#"[{"pattern":"sgtin-96:0614141","ons_ip":"2001:db8::"},{"pattern":"*","ons_ip":"3ffe:ffff:4004:1952:0000:7251:bc9b:a73f"}]"#,
    );
    let o = epc6(&["derive", SGTIN, "--registry", &reg]);
    assert_eq!(stdout(&o), "2001:db8::1a85\n");

    let config = write(
        dir.path(),
        "epc6.toml",
        &format!("registry_path = {reg:?}\ndefault_method = \"one_pad_serial\"\n"),
    );
    let o = epc6_with_config(&["derive", SGTIN], Some(Path::new(&config)));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "2001:db8::ffff:ffff:ffff:fa85\n");

    // flags override config
    let o = epc6_with_config(&["derive", SGTIN, "--method", "hybrid_ons"], Some(Path::new(&config)));
    assert_eq!(stdout(&o), "2001:db8::1a85\n");

    let bad = write(dir.path(), "bad.toml", "default_method = \"nope\"\n");
    let o = epc6_with_config(&["derive", SGTIN], Some(Path::new(&bad)));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_prints_fields() {
    let o = epc6(&["parse", SGTIN]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "serial_number=6789"), "{out}");
    assert!(out.lines().any(|l| l == "scheme=sgtin-96"));
    assert!(out.lines().any(|l| l == "value=0x3074257bf7194e4000001a85"));

    let o = epc6(&["--format", "structured", "parse", SGTIN]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["serial_number"], "6789");
    assert_eq!(doc["fields"]["company_prefix"], "0614141");

    let o = epc6(&["parse", "urn:epc:tag:xyz-96:1.2.3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("parse:"));
}

#[test]
fn resolve_command() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.json", "[]");
    let o = epc6(&["resolve", SGTIN, "--registry", &empty]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).starts_with("resolve: NoMatch"), "{}", stderr(&o));

    let reg = write(dir.path(), "r.json", &format!(r#"[{{"pattern":"sgtin-96","ons_ip":"{ONS}"}}]"#));
    let o = epc6(&["resolve", SGTIN, "--registry", &reg]);
    assert_eq!(stdout(&o), format!("{ONS}\n"));

    let dup = write(dir.path(), "dup.json", r#"[{"pattern":"*","ons_ip":"::"},{"pattern":"*","ons_ip":"::1"}]"#);
    let o = epc6(&["resolve", SGTIN, "--registry", &dup]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("duplicate pattern"));
}

fn non_timing_columns(csv: &str) -> Vec<String> {
    csv.lines().map(|l| l.split(',').take(4).collect::<Vec<_>>().join(",")).collect()
}

#[test]
fn bench_is_deterministic_apart_from_timing() {
    let args = ["bench", "--ons", ONS, "--count", "2", "--seed", "7"];
    let a = epc6(&args);
    let b = epc6(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let (a, b) = (stdout(&a), stdout(&b));
    assert_eq!(a.lines().next().unwrap(), "method,population,distinct,collisions,mean_time_ns,p99_time_ns");
    assert_eq!(a.lines().count(), 7);
    assert_eq!(non_timing_columns(&a), non_timing_columns(&b));
}

#[test]
fn bench_structured_output_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = epc6(&[
        "--format", "structured", "bench", "--ons", ONS, "--scheme", "sgtin-96", "--count", "50",
        "--seed", "1", "--methods", "hybrid_ons,one_pad_serial", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let reports = doc["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["method"], "hybrid_ons");
    assert_eq!(reports[0]["seed"], 1);
    assert_eq!(reports[0]["population_size"], 50);
    assert_eq!(doc["population"]["scheme"], "sgtin-96");
    assert_eq!(stdout(&o).as_bytes(), std::fs::read(&out).unwrap());
}

#[test]
fn bench_failures() {
    let o = epc6(&["bench", "--ons", ONS, "--count", "3", "--serial-width", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unsatisfiable"));

    let o = epc6(&["bench", "--ons", ONS, "--scheme", "sgtin-96", "--count", "5", "--methods", "direct64"]);
    assert_eq!(o.status.code(), Some(5));

    let dir = tempfile::tempdir().unwrap();
    let reg = write(dir.path(), "r.json", r#"[{"pattern":"sgtin-96","ons_ip":"::"}]"#);
    let o = epc6(&["bench", "--registry", &reg, "--count", "5"]);
    assert_eq!(o.status.code(), Some(4));
}
