use crate::commands::parse_generate_spec;
use crate::errors::{data, usage, CliError, CliResult};
use crate::report::report;
use crate::AdaptiveArgs;

use rayon::prelude::*;
use repeatstat::planner::{self, PlanConfig, SuccessOracle};
use repeatstat::rng::RngSpec;
use repeatstat::sim::BernoulliOracle;
use repeatstat::walksat::{self, CnfFormula, WalksatConfig};
use serde_json::{json, Value};

use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

pub fn run(args: AdaptiveArgs) -> CliResult<Value> {
    let sources = [
        args.synthetic_p.is_some(),
        args.cmd.is_some(),
        args.cnf.is_some() || args.generate.is_some(),
    ];
    if sources.iter().filter(|&&s| s).count() != 1 {
        return Err(CliError::Usage(
            "exactly one oracle source required: --synthetic-p, --cmd, or --cnf/--generate".into(),
        ));
    }

    let cfg = PlanConfig {
        alpha: args.alpha,
        e_target: args.target,
        n_init: args.n_init,
        use_scaling: args.scaled,
        n_cap: args.n_cap,
    };

    // Trace goes to stderr as JSON lines so stdout stays a single report.
    let execute = |oracle: &mut dyn SuccessOracle| {
        planner::adaptive_repeats_with(oracle, &cfg, |round| {
            eprintln!(
                "{}",
                serde_json::to_string(round).expect("trace serialization")
            );
        })
        .map_err(data)
    };

    let (result, oracle_desc, timeouts) = if let Some(p) = args.synthetic_p {
        let mut oracle = BernoulliOracle::new(p, RngSpec::new(args.seed, 0)).map_err(usage)?;
        (
            execute(&mut oracle)?,
            json!({ "kind": "synthetic", "p": p }),
            Value::Null,
        )
    } else if let Some(template) = &args.cmd {
        if template.trim().is_empty() {
            return Err(CliError::Usage("--cmd template must be non-empty".into()));
        }
        if args.timeout_sec.is_nan() || args.timeout_sec <= 0.0 {
            return Err(CliError::Usage("--timeout-sec must be > 0".into()));
        }
        let mut oracle = SubprocessOracle {
            template: template.clone(),
            success_exit: args.success_exit,
            timeout: Duration::from_secs_f64(args.timeout_sec),
            parallel: args.parallel,
            master_seed: args.seed,
            next_invocation: 0,
            timeouts: 0,
        };
        let result = execute(&mut oracle)?;
        let desc = json!({
            "kind": "subprocess",
            "template": template,
            "success_exit": args.success_exit,
            "timeout_sec": args.timeout_sec,
            "parallel": args.parallel,
        });
        (result, desc, json!(oracle.timeouts))
    } else {
        let formula = load_formula(&args)?;
        let desc = json!({
            "kind": "walksat",
            "num_vars": formula.num_vars(),
            "num_clauses": formula.num_clauses(),
            "w": args.w,
            "max_flips": args.max_flips,
        });
        let mut oracle = WalksatOracle {
            formula,
            w: args.w,
            max_flips: args.max_flips,
            master_seed: args.seed,
            next_repeat: 0,
        };
        (execute(&mut oracle)?, desc, Value::Null)
    };

    let inputs = json!({
        "oracle": oracle_desc,
        "e_target": cfg.e_target,
        "n_init": cfg.n_init,
        "alpha": cfg.alpha,
        "scaled": cfg.use_scaling,
        "n_cap": cfg.n_cap,
        "seed": args.seed,
    });
    let results = json!({
        "plan": serde_json::to_value(&result).expect("plan serialization"),
        "bound_satisfied": !result.capped,
        "subprocess_timeouts": timeouts,
    });
    Ok(report("adaptive", inputs, results, Some(args.seed)))
}

fn load_formula(args: &AdaptiveArgs) -> CliResult<CnfFormula> {
    if let Some(path) = &args.cnf {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let parsed = walksat::parse_dimacs(&text).map_err(data)?;
        for warning in &parsed.warnings {
            eprintln!("warning: {}: {warning}", path.display());
        }
        Ok(parsed.formula)
    } else {
        let spec = args.generate.as_ref().expect("source checked");
        let (k, vars, clauses) = parse_generate_spec(spec)?;
        walksat::generate_random_ksat(k, vars, clauses, RngSpec::new(args.seed, 0)).map_err(usage)
    }
}

/// One external-solver invocation per repeat; success is an exit code.
struct SubprocessOracle {
    template: String,
    success_exit: i32,
    timeout: Duration,
    parallel: bool,
    master_seed: u64,
    next_invocation: u64,
    timeouts: u64,
}

impl SubprocessOracle {
    fn invoke(&self, invocation: u64) -> (bool, bool) {
        let seed_value = self.master_seed.wrapping_add(invocation);
        let mut tokens = self
            .template
            .split_whitespace()
            .map(|tok| tok.replace("{seed}", &seed_value.to_string()));
        let program = tokens.next().expect("non-empty template");
        let mut command = Command::new(program);
        command
            .args(tokens)
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(Stdio::null());

        let mut child = match command.spawn() {
            Ok(child) => child,
            Err(err) => {
                eprintln!("warning: invocation {invocation} failed to spawn: {err}");
                return (false, false);
            }
        };
        let deadline = Instant::now() + self.timeout;
        loop {
            match child.try_wait() {
                Ok(Some(status)) => {
                    let success = status.code() == Some(self.success_exit);
                    return (success, false);
                }
                Ok(None) => {
                    if Instant::now() >= deadline {
                        let _ = child.kill();
                        let _ = child.wait();
                        eprintln!("warning: invocation {invocation} timed out; counted as failure");
                        return (false, true);
                    }
                    std::thread::sleep(Duration::from_millis(5));
                }
                Err(err) => {
                    eprintln!("warning: invocation {invocation} wait failed: {err}");
                    return (false, false);
                }
            }
        }
    }
}

impl SuccessOracle for SubprocessOracle {
    fn draw(&mut self, batch: u64) -> u64 {
        let start = self.next_invocation;
        self.next_invocation += batch;
        let outcomes: Vec<(bool, bool)> = if self.parallel {
            (start..start + batch)
                .into_par_iter()
                .map(|i| self.invoke(i))
                .collect()
        } else {
            (start..start + batch).map(|i| self.invoke(i)).collect()
        };
        self.timeouts += outcomes.iter().filter(|(_, t)| *t).count() as u64;
        outcomes.iter().filter(|(s, _)| *s).count() as u64
    }
}

/// WalkSAT repeats as the oracle: success = solved within the flip budget.
struct WalksatOracle {
    formula: CnfFormula,
    w: f64,
    max_flips: u64,
    master_seed: u64,
    next_repeat: u64,
}

impl SuccessOracle for WalksatOracle {
    fn draw(&mut self, batch: u64) -> u64 {
        let start = self.next_repeat;
        self.next_repeat += batch;
        (start..start + batch)
            .filter(|&repeat| {
                let cfg = WalksatConfig {
                    w: self.w,
                    max_flips: self.max_flips,
                    // stream 0 is the generator's; repeats start at 1
                    seed: RngSpec::new(self.master_seed, repeat + 1),
                };
                walksat::walksat_skc_run(&self.formula, &cfg)
                    .map(|run| run.first_success_iter.is_some())
                    .unwrap_or(false)
            })
            .count() as u64
    }
}
