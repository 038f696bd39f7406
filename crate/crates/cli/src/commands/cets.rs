use crate::errors::{data, CliError, CliResult};
use crate::report::{cets_json, report};
use crate::{csvio, CetsArgs};

use repeatstat::metrics::{self, SuccessCurve};
use serde_json::{json, Value};

pub fn run(args: CetsArgs) -> CliResult<Value> {
    let (curve, source) = match (&args.curve, &args.records) {
        (Some(_), Some(_)) | (None, None) => {
            return Err(CliError::Usage(
                "provide exactly one of --curve or --records".into(),
            ))
        }
        (Some(path), None) => (csvio::read_curve(path)?, path.display().to_string()),
        (None, Some(path)) => {
            let max_iter = args.max_iter.ok_or_else(|| {
                CliError::Usage(
                    "--max-iter is required with --records (the censoring budget)".into(),
                )
            })?;
            let records = csvio::read_records(path)?;
            let curve = SuccessCurve::from_records(&records, max_iter).map_err(data)?;
            (curve, path.display().to_string())
        }
    };

    let (i_star, estimate) =
        metrics::optimize_cets(&curve, args.c, args.e_itr, args.method, args.alpha)
            .map_err(data)?;
    let mode = metrics::classify_mode(i_star, curve.max_iter());

    let inputs = json!({
        "source": source,
        "c": args.c,
        "e_itr": args.e_itr,
        "alpha": args.alpha,
        "method": args.method.to_string(),
        "max_iter": curve.max_iter(),
        "repeats": curve.repeats(),
    });
    let results = json!({
        "i_star": i_star,
        "cets_opt": cets_json(&estimate),
        "mode": mode.to_string(),
        "p_hat_at_i_star": curve.p_hat(i_star),
        "successes_at_i_star": curve.successes_at(i_star),
    });
    Ok(report("cets", inputs, results, None))
}
