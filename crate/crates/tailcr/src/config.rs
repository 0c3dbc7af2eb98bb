//! Scenario configs as JSON documents mirroring [`ScenarioConfig`].

use std::path::Path;

use sha2::{Digest, Sha256};
use tailcr_core::ScenarioConfig;

use crate::error::{CliError, CliResult};

/// Environment variable that overrides `master_seed`.
pub const SEED_ENV: &str = "TAILCR_SEED";

pub fn parse_config(text: &str) -> CliResult<ScenarioConfig> {
    let config: ScenarioConfig =
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> CliResult<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

/// Pretty JSON with a trailing newline. Floats use the shortest
/// representation that parses back to the same value.
pub fn render_config(config: &ScenarioConfig) -> String {
    let mut s = serde_json::to_string_pretty(config).expect("config serializes");
    s.push('\n');
    s
}

/// SHA-256 over the compact JSON form, hex encoded.
pub fn scenario_hash(config: &ScenarioConfig) -> String {
    let compact = serde_json::to_vec(config).expect("config serializes");
    hex::encode(Sha256::digest(&compact))
}

/// Applies `TAILCR_SEED` when set.
pub fn apply_seed_override(config: &mut ScenarioConfig) -> CliResult<()> {
    if let Ok(raw) = std::env::var(SEED_ENV) {
        config.master_seed = raw.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "{SEED_ENV} must be an unsigned integer, got {raw:?}"
            ))
        })?;
    }
    Ok(())
}
