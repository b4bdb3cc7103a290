//! Provenance record attached to every output.

use serde::Serialize;
use sha2::{Digest, Sha256};

use polylab::rng::RNG_ALGORITHM;

pub const LOG_BASE_NOTE: &str =
    "natural logarithms throughout: entropies are in nats (EoF of a Bell state is ln 2)";

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command_line: Vec<String>,
    /// SHA-256 of the resolved configuration serialized as compact JSON.
    pub config_digest: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub rng_algorithm: &'static str,
    pub log_base: &'static str,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new<C: Serialize>(config: &C, seed: u64) -> Self {
        let config = serde_json::to_value(config).expect("configs serialize");
        let compact = serde_json::to_string(&config).expect("values serialize");
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command_line: std::env::args().collect(),
            config_digest: hex::encode(Sha256::digest(compact.as_bytes())),
            config,
            seed,
            rng_algorithm: RNG_ALGORITHM,
            log_base: LOG_BASE_NOTE,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}
