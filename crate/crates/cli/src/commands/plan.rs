use crate::errors::{usage, CliResult};
use crate::report::report;
use crate::PlanCmd;

use repeatstat::{planner, special};
use serde_json::{json, Value};

pub fn run(variant: PlanCmd) -> CliResult<Value> {
    match variant {
        PlanCmd::WorstCase {
            epsilon,
            alpha,
            simplified,
        } => {
            let exact = planner::worst_case_n(epsilon, alpha).map_err(usage)?;
            let simple = planner::worst_case_n_simplified(epsilon).map_err(usage)?;
            let z = special::z_critical(alpha).map_err(usage)?;
            let (variant_name, n) = if simplified {
                ("worst-case-simplified", simple)
            } else {
                ("worst-case", exact)
            };
            let inputs = json!({ "epsilon": epsilon, "alpha": alpha, "simplified": simplified });
            let results = json!({
                "variant": variant_name,
                "n": n,
                "exact_z": { "n": exact, "z": z },
                "z_approx_2": { "n": simple },
            });
            Ok(report("plan", inputs, results, None))
        }
        PlanCmd::Target {
            p_hat,
            epsilon,
            alpha,
        } => {
            let target = planner::n_for_target(p_hat, epsilon, alpha).map_err(usage)?;
            let inputs = json!({ "p_hat": p_hat, "epsilon": epsilon, "alpha": alpha });
            let results = json!({
                "variant": "target",
                "n": target.n,
                "degenerate": target.degenerate,
            });
            Ok(report("plan", inputs, results, None))
        }
        PlanCmd::Relative {
            p_hat,
            target,
            alpha,
            scaled,
        } => {
            let cfg = planner::PlanConfig {
                alpha,
                e_target: target,
                use_scaling: scaled,
                ..planner::PlanConfig::default()
            };
            let bound = planner::relative_error_bound(p_hat, &cfg).map_err(usage)?;
            let inputs =
                json!({ "p_hat": p_hat, "e_target": target, "alpha": alpha, "scaled": scaled });
            let results = json!({
                "variant": if scaled { "relative-scaled" } else { "relative-unscaled" },
                "n": bound,
                "scale_factor": if scaled { planner::scaling_function(p_hat) } else { 1.0 },
            });
            Ok(report("plan", inputs, results, None))
        }
        PlanCmd::Exact {
            p_hat,
            target,
            alpha,
            c,
        } => {
            let found = planner::exact_n_root_find(p_hat, target, alpha, c).map_err(usage)?;
            let achieved = planner::rel_error_at(p_hat, found.n as f64, alpha, c).map_err(usage)?;
            let inputs = json!({ "p_hat": p_hat, "e_target": target, "alpha": alpha, "c": c });
            let results = json!({
                "variant": "exact-root-find",
                "n": found.n,
                "capped": found.capped,
                "achieved_rel_error": achieved,
            });
            Ok(report("plan", inputs, results, None))
        }
    }
}
