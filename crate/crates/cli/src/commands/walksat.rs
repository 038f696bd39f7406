use crate::commands::{estimate_json, parse_generate_spec};
use crate::errors::{data, usage, CliError, CliResult};
use crate::report::{metric_json, report};
use crate::{csvio, WalksatArgs};

use repeatstat::ci::{self, CiMethod};
use repeatstat::metrics::{self, SuccessCurve};
use repeatstat::rng::RngSpec;
use repeatstat::walksat::{self, CnfFormula, WalksatConfig};
use serde_json::{json, Value};

pub fn run(args: WalksatArgs) -> CliResult<Value> {
    if args.repeats == 0 {
        return Err(CliError::Usage("--repeats must be >= 1".into()));
    }
    match (&args.cnf, &args.generate) {
        (Some(_), Some(_)) | (None, None) => {
            return Err(CliError::Usage(
                "provide exactly one of --cnf or --generate".into(),
            ))
        }
        _ => {}
    }

    let (formula, source, generator) = load_formula(&args)?;

    let cfg = WalksatConfig {
        w: args.w,
        max_flips: args.max_flips,
        seed: RngSpec::new(args.seed, 1),
    };
    let records = walksat::run_experiment(&formula, &cfg, args.repeats).map_err(usage)?;
    let curve = SuccessCurve::from_records(&records, args.max_flips).map_err(data)?;

    let tally = curve.tally_at(args.max_flips);
    let interval =
        ci::confidence_interval(tally, CiMethod::AgrestiCoull, args.alpha).map_err(usage)?;
    let margin = ci::ratio_margin_interval(tally, args.alpha).map_err(usage)?;
    let r_c = metrics::r_c_interval(&margin, args.c).map_err(usage)?;

    if let Some(path) = &args.records_csv {
        csvio::write_records(path, &records)?;
        if let Some(generator) = &generator {
            let sidecar = path.with_extension("meta.json");
            let meta = json!({
                "generator": generator,
                "master_seed": args.seed,
                "generator_stream": 0,
                "experiment_stream": 1,
                "rng": repeatstat::rng::GENERATOR_NAME,
                "version": env!("CARGO_PKG_VERSION"),
            });
            std::fs::write(
                &sidecar,
                serde_json::to_string_pretty(&meta).expect("meta json"),
            )
            .map_err(|e| CliError::Data(format!("{}: {e}", sidecar.display())))?;
        }
    }
    if let Some(path) = &args.curve_csv {
        csvio::write_curve(path, &curve)?;
    }

    let successes = tally.successes();
    let inputs = json!({
        "source": source,
        "generate": generator,
        "w": args.w,
        "max_flips": args.max_flips,
        "repeats": args.repeats,
        "alpha": args.alpha,
        "c": args.c,
        "seed": args.seed,
    });
    let results = json!({
        "formula": {
            "num_vars": formula.num_vars(),
            "num_clauses": formula.num_clauses(),
            "tautological_clauses": (0..formula.num_clauses())
                .filter(|&i| formula.is_tautological(i))
                .count(),
        },
        "successes": successes,
        "repeats": args.repeats,
        "interval": estimate_json(&interval),
        "ratio_margin": estimate_json(&margin),
        "r_c": metric_json(&r_c),
        "records_csv": args.records_csv.map(|p| p.display().to_string()),
        "curve_csv": args.curve_csv.map(|p| p.display().to_string()),
    });
    Ok(report("walksat", inputs, results, Some(args.seed)))
}

fn load_formula(args: &WalksatArgs) -> CliResult<(CnfFormula, String, Option<Value>)> {
    if let Some(path) = &args.cnf {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let parsed = walksat::parse_dimacs(&text).map_err(data)?;
        for warning in &parsed.warnings {
            eprintln!("warning: {}: {warning}", path.display());
        }
        Ok((parsed.formula, path.display().to_string(), None))
    } else {
        let spec = args.generate.as_ref().expect("source checked");
        let (k, vars, clauses) = parse_generate_spec(spec)?;
        let formula = walksat::generate_random_ksat(k, vars, clauses, RngSpec::new(args.seed, 0))
            .map_err(usage)?;
        let generator = json!({ "k": k, "vars": vars, "clauses": clauses });
        Ok((formula, "generated".into(), Some(generator)))
    }
}
