pub mod adaptive;
pub mod analyze;
pub mod cets;
pub mod plan;
pub mod simulate;
pub mod walksat;

use crate::errors::{CliError, CliResult};
use repeatstat::ci::{self, SuccessEstimate, TrialTally};
use serde_json::{json, Value};

/// Estimate plus its width figures, for report embedding.
pub fn estimate_json(est: &SuccessEstimate) -> Value {
    let mut value = serde_json::to_value(est).expect("estimate serialization");
    let obj = value.as_object_mut().expect("estimate is an object");
    obj.insert("width".into(), json!(ci::interval_width(est)));
    obj.insert(
        "relative_width".into(),
        crate::report::metric_value(ci::relative_width(est)),
    );
    value
}

pub fn tally(trials: u64, successes: u64) -> CliResult<TrialTally> {
    TrialTally::new(trials, successes).map_err(crate::errors::usage)
}

/// Parse a generator spec of the form `k=4,vars=50,clauses=499`.
pub fn parse_generate_spec(spec: &str) -> CliResult<(usize, usize, usize)> {
    let mut k = None;
    let mut vars = None;
    let mut clauses = None;
    for part in spec.split(',') {
        let Some((key, value)) = part.split_once('=') else {
            return Err(CliError::Usage(format!(
                "bad generator spec component '{part}', expected key=value"
            )));
        };
        let parsed: usize = value
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad generator spec value '{value}'")))?;
        match key.trim() {
            "k" => k = Some(parsed),
            "vars" => vars = Some(parsed),
            "clauses" => clauses = Some(parsed),
            other => {
                return Err(CliError::Usage(format!(
                    "unknown generator spec key '{other}' (expected k, vars, clauses)"
                )))
            }
        }
    }
    match (k, vars, clauses) {
        (Some(k), Some(vars), Some(clauses)) => Ok((k, vars, clauses)),
        _ => Err(CliError::Usage(
            "generator spec must provide k, vars, and clauses (e.g. k=4,vars=50,clauses=499)"
                .into(),
        )),
    }
}
