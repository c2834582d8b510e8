//! Optional config file, located through `EPC6_CONFIG`.

use std::path::PathBuf;

use epc6::AddressingMethodId;
use serde::Deserialize;

use crate::cli::OutputFormat;
use crate::error::CliError;

pub const CONFIG_ENV: &str = "EPC6_CONFIG";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub registry_path: Option<PathBuf>,
    pub default_method: Option<AddressingMethodId>,
    pub output_format: Option<OutputFormat>,
}

impl CliConfig {
    pub fn from_env() -> Result<Self, CliError> {
        match std::env::var_os(CONFIG_ENV) {
            Some(path) if !path.is_empty() => Self::load(PathBuf::from(path)),
            _ => Ok(Self::default()),
        }
    }

    pub fn load(path: PathBuf) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}
