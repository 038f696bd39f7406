use crate::commands::{estimate_json, tally};
use crate::errors::{usage, CliResult};
use crate::report::{cets_json, metric_json, report};
use crate::AnalyzeArgs;

use repeatstat::{ci, metrics, special};
use serde_json::{json, Value};

pub fn run(args: AnalyzeArgs) -> CliResult<Value> {
    let tally = tally(args.trials, args.successes)?;
    let method_est = ci::confidence_interval(tally, args.method, args.alpha).map_err(usage)?;
    let margin_est = ci::ratio_margin_interval(tally, args.alpha).map_err(usage)?;
    let r_c = metrics::r_c_interval(&margin_est, args.c).map_err(usage)?;
    let cets = metrics::cets(args.i, args.e_itr, &margin_est, args.c).map_err(usage)?;
    let z = special::z_critical(args.alpha).map_err(usage)?;

    // Convenience values matching the z ~ 2 arithmetic used in worked text.
    let p_hat = tally.ratio();
    let margin_z2 = 2.0 * (p_hat * (1.0 - p_hat) / (tally.trials() as f64 + 4.0)).sqrt();

    let inputs = json!({
        "successes": args.successes,
        "trials": args.trials,
        "alpha": args.alpha,
        "method": args.method.to_string(),
        "c": args.c,
        "e_itr": args.e_itr,
        "i": args.i,
    });
    let results = json!({
        "interval": estimate_json(&method_est),
        "ratio_margin": estimate_json(&margin_est),
        "r_c": metric_json(&r_c),
        "cets": cets_json(&cets),
        "degenerate": margin_est.degenerate,
        "z": z,
        "z_approx_2": {
            "epsilon": margin_z2,
            "lower": (p_hat - margin_z2).clamp(0.0, 1.0),
            "upper": (p_hat + margin_z2).clamp(0.0, 1.0),
        },
    });
    Ok(report("analyze", inputs, results, None))
}
