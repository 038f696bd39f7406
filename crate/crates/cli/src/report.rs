//! Versioned JSON report envelope and serialization helpers.

use repeatstat::metrics::{CetsEstimate, MetricEstimate};
use repeatstat::rng;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: &str = "1";

/// Assemble the report envelope. Every command emits exactly one of these
/// on stdout. `master_seed` is None for commands that draw no randomness.
pub fn report(command: &str, inputs: Value, results: Value, master_seed: Option<u64>) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
        "provenance": {
            "master_seed": master_seed,
            "rng": rng::GENERATOR_NAME,
            "version": env!("CARGO_PKG_VERSION"),
            "timestamp": chrono::Utc::now().to_rfc3339(),
        },
    })
}

/// JSON for a possibly infinite metric value. serde_json cannot represent
/// IEEE infinities as numbers, so they become the string "infinity".
pub fn metric_value(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v > 0.0 {
        json!("infinity")
    } else {
        json!("-infinity")
    }
}

pub fn metric_json(m: &MetricEstimate) -> Value {
    json!({
        "c": m.c,
        "point": metric_value(m.point),
        "lower": metric_value(m.lower),
        "upper": metric_value(m.upper),
        "rel_error": metric_value(m.rel_error),
    })
}

pub fn cets_json(m: &CetsEstimate) -> Value {
    json!({
        "i": m.i,
        "e_itr": m.e_itr,
        "point": metric_value(m.point),
        "lower": metric_value(m.lower),
        "upper": metric_value(m.upper),
        "rel_error": metric_value(m.rel_error),
    })
}
