use crate::csvio;
use crate::errors::{usage, CliError, CliResult};
use crate::report::report;
use crate::SimulateCmd;

use repeatstat::planner::PlanConfig;
use repeatstat::rng::RngSpec;
use repeatstat::sim::{self, RelErrStats};
use serde_json::{json, Value};

pub fn run(study: SimulateCmd) -> CliResult<Value> {
    match study {
        SimulateCmd::Compare {
            pairs,
            n_grid,
            trials,
            alpha,
            c,
            seed,
            csv,
        } => {
            let pairs = match pairs {
                Some(text) => parse_pairs(&text)?,
                None => sim::DEFAULT_PAIRS.to_vec(),
            };
            let n_grid = match n_grid {
                Some(text) => parse_n_grid(&text)?,
                None => sim::DEFAULT_N_GRID.to_vec(),
            };
            let mut rows = Vec::new();
            let mut cell = 0u64;
            for &(p1, p2) in &pairs {
                for &n in &n_grid {
                    let row = sim::compare_optimizers(
                        p1,
                        p2,
                        n,
                        trials,
                        c,
                        alpha,
                        RngSpec::new(seed, cell),
                    )
                    .map_err(usage)?;
                    rows.push(row);
                    cell += 1;
                }
            }
            if let Some(path) = &csv {
                csvio::write_compare(path, &rows)?;
            }
            let inputs = json!({
                "pairs": pairs,
                "n_grid": n_grid,
                "trials": trials,
                "alpha": alpha,
                "c": c,
                "seed": seed,
            });
            let results = json!({
                "rows": rows,
                "csv": csv.map(|p| p.display().to_string()),
            });
            Ok(report("simulate-compare", inputs, results, Some(seed)))
        }
        SimulateCmd::Relerr {
            p,
            p_step,
            target,
            scaled,
            trials,
            n_init,
            alpha,
            c,
            seed,
            csv,
        } => {
            let p_values = parse_p_range(&p, p_step)?;
            let cfg = PlanConfig {
                alpha,
                e_target: target,
                n_init,
                use_scaling: scaled,
                ..PlanConfig::default()
            };
            let mut all_stats: Vec<RelErrStats> = Vec::new();
            for (idx, &p_true) in p_values.iter().enumerate() {
                let stats = sim::adaptive_relerr_experiment(
                    p_true,
                    &cfg,
                    c,
                    trials,
                    RngSpec::new(seed, idx as u64),
                )
                .map_err(usage)?;
                all_stats.push(stats);
            }
            if let Some(path) = &csv {
                csvio::write_relerr(path, &all_stats)?;
            }
            let summary: Vec<Value> = all_stats
                .iter()
                .map(|s| {
                    json!({
                        "p_true": s.p_true,
                        "trials": s.trials,
                        "median": s.median,
                        "q25": s.q25,
                        "q75": s.q75,
                        "frac_within_target": s.rel_errors.iter().filter(|&&e| e <= target).count() as f64
                            / s.trials as f64,
                    })
                })
                .collect();
            let inputs = json!({
                "p_values": p_values,
                "e_target": target,
                "scaled": scaled,
                "trials": trials,
                "n_init": n_init,
                "alpha": alpha,
                "c": c,
                "seed": seed,
            });
            let results = json!({
                "stats": summary,
                "csv": csv.map(|p| p.display().to_string()),
            });
            Ok(report("simulate-relerr", inputs, results, Some(seed)))
        }
        SimulateCmd::Chunked {
            p,
            draws,
            chunk_size,
            alpha,
            seed,
        } => {
            let sample = sim::bernoulli_sample(p, draws, RngSpec::new(seed, 0)).map_err(usage)?;
            let check = sim::chunked_beta_check(&sample, chunk_size, alpha).map_err(usage)?;
            if check.few_chunks_warning {
                eprintln!("warning: fewer than 20 chunks; empirical quantiles are unstable");
            }
            let inputs = json!({
                "p": p,
                "draws": draws,
                "chunk_size": chunk_size,
                "alpha": alpha,
                "seed": seed,
            });
            let results = serde_json::to_value(&check).expect("report serialization");
            Ok(report("simulate-chunked", inputs, results, Some(seed)))
        }
    }
}

fn parse_pairs(text: &str) -> CliResult<Vec<(f64, f64)>> {
    text.split(',')
        .map(|part| {
            let (a, b) = part
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("bad pair '{part}', expected p1:p2")))?;
            let p1: f64 = a
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad probability '{a}'")))?;
            let p2: f64 = b
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad probability '{b}'")))?;
            Ok((p1, p2))
        })
        .collect()
}

fn parse_n_grid(text: &str) -> CliResult<Vec<u64>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad repeat count '{part}'")))
        })
        .collect()
}

fn parse_p_range(text: &str, step: f64) -> CliResult<Vec<f64>> {
    if step.is_nan() || step <= 0.0 {
        return Err(CliError::Usage(format!("p-step must be > 0, got {step}")));
    }
    let parse = |s: &str| -> CliResult<f64> {
        s.trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad probability '{s}'")))
    };
    if let Some((lo, hi)) = text.split_once("..") {
        let lo = parse(lo)?;
        let hi = parse(hi)?;
        if !(lo > 0.0 && hi < 1.0 && lo <= hi) {
            return Err(CliError::Usage(format!(
                "bad range {lo}..{hi}: need 0 < lo <= hi < 1"
            )));
        }
        let count = ((hi - lo) / step).round() as usize + 1;
        Ok((0..count).map(|i| (lo + i as f64 * step).min(hi)).collect())
    } else {
        Ok(vec![parse(text)?])
    }
}
