//! WalkSAT-SKC stochastic local search.
//!
//! Step rule: pick an unsatisfied clause uniformly; any variable whose flip
//! breaks nothing is flipped immediately (uniform among such "freebies");
//! otherwise a uniform variable of the clause is flipped with the walk
//! probability w, and a minimum-break variable (uniform tie-break) with
//! probability 1 − w. One iteration = one flip.

mod cnf;

pub use cnf::{count_unsat, generate_random_ksat, parse_dimacs, Assignment, CnfFormula, ParsedCnf};

use crate::error::Error;
use crate::metrics::RunRecord;
use crate::rng::RngSpec;
use crate::Result;

use cnf::{lit_true, var_of};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Search parameters for a single run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalksatConfig {
    /// Walk (noise) probability.
    pub w: f64,
    /// Flip budget; the run is censored here.
    pub max_flips: u64,
    pub seed: RngSpec,
}

impl WalksatConfig {
    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.w) {
            return Err(Error::Domain(format!(
                "walk probability must be in [0,1], got {}",
                self.w
            )));
        }
        if self.max_flips == 0 {
            return Err(Error::Domain("max_flips must be >= 1".into()));
        }
        Ok(())
    }
}

/// Outcome of one run, retaining the satisfying witness for auditing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalksatRun {
    /// Flip count at first success (at least 1), or None if censored.
    pub first_success_iter: Option<u64>,
    pub witness: Option<Assignment>,
}

// Occurrence lists per literal polarity, shared read-only across repeats.
struct VarIndex {
    pos: Vec<Vec<u32>>,
    neg: Vec<Vec<u32>>,
}

impl VarIndex {
    fn build(formula: &CnfFormula) -> Self {
        let mut pos = vec![Vec::new(); formula.num_vars()];
        let mut neg = vec![Vec::new(); formula.num_vars()];
        for (cidx, clause) in formula.clauses().iter().enumerate() {
            for &lit in clause {
                if lit > 0 {
                    pos[var_of(lit)].push(cidx as u32);
                } else {
                    neg[var_of(lit)].push(cidx as u32);
                }
            }
        }
        VarIndex { pos, neg }
    }

    /// Clauses currently satisfied by variable `v`'s side `value`.
    fn occurrences(&self, v: usize, value: bool) -> &[u32] {
        if value {
            &self.pos[v]
        } else {
            &self.neg[v]
        }
    }
}

const NOT_IN_UNSAT: u32 = u32::MAX;

struct Searcher<'a> {
    formula: &'a CnfFormula,
    index: &'a VarIndex,
    assignment: Vec<bool>,
    true_count: Vec<u32>,
    unsat: Vec<u32>,
    unsat_pos: Vec<u32>,
    scratch_breaks: Vec<(usize, u32)>,
    scratch_choices: Vec<usize>,
}

impl<'a> Searcher<'a> {
    fn new(formula: &'a CnfFormula, index: &'a VarIndex, rng: &mut ChaCha8Rng) -> Self {
        let assignment: Vec<bool> = (0..formula.num_vars()).map(|_| rng.gen()).collect();
        let mut searcher = Searcher {
            formula,
            index,
            assignment,
            true_count: vec![0; formula.num_clauses()],
            unsat: Vec::new(),
            unsat_pos: vec![NOT_IN_UNSAT; formula.num_clauses()],
            scratch_breaks: Vec::new(),
            scratch_choices: Vec::new(),
        };
        searcher.rebuild_state();
        searcher
    }

    fn rebuild_state(&mut self) {
        self.unsat.clear();
        self.unsat_pos.fill(NOT_IN_UNSAT);
        for (cidx, clause) in self.formula.clauses().iter().enumerate() {
            let count = clause
                .iter()
                .filter(|&&lit| lit_true(lit, &self.assignment))
                .count() as u32;
            self.true_count[cidx] = count;
            if count == 0 {
                self.unsat_add(cidx as u32);
            }
        }
    }

    fn satisfied(&self) -> bool {
        self.unsat.is_empty()
    }

    fn unsat_add(&mut self, clause: u32) {
        self.unsat_pos[clause as usize] = self.unsat.len() as u32;
        self.unsat.push(clause);
    }

    fn unsat_remove(&mut self, clause: u32) {
        let pos = self.unsat_pos[clause as usize];
        let last = self.unsat.pop().expect("removing from empty unsat list");
        if last != clause {
            self.unsat[pos as usize] = last;
            self.unsat_pos[last as usize] = pos;
        }
        self.unsat_pos[clause as usize] = NOT_IN_UNSAT;
    }

    /// Number of currently satisfied clauses that flipping `v` would break:
    /// those where `v` supplies the only true literal.
    fn break_count(&self, v: usize) -> u32 {
        self.index
            .occurrences(v, self.assignment[v])
            .iter()
            .filter(|&&c| self.true_count[c as usize] == 1)
            .count() as u32
    }

    fn flip(&mut self, v: usize) {
        let old = self.assignment[v];
        self.assignment[v] = !old;
        for i in 0..self.index.occurrences(v, old).len() {
            let c = self.index.occurrences(v, old)[i];
            self.true_count[c as usize] -= 1;
            if self.true_count[c as usize] == 0 {
                self.unsat_add(c);
            }
        }
        for i in 0..self.index.occurrences(v, !old).len() {
            let c = self.index.occurrences(v, !old)[i];
            self.true_count[c as usize] += 1;
            if self.true_count[c as usize] == 1 {
                self.unsat_remove(c);
            }
        }
    }

    /// One SKC step. Returns (picked clause, flipped variable).
    fn step(&mut self, rng: &mut ChaCha8Rng, w: f64) -> (u32, usize) {
        let clause_idx = self.unsat[rng.gen_range(0..self.unsat.len())];
        let clause = &self.formula.clauses()[clause_idx as usize];

        self.scratch_breaks.clear();
        let mut min_break = u32::MAX;
        for &lit in clause {
            let v = var_of(lit);
            let b = self.break_count(v);
            min_break = min_break.min(b);
            self.scratch_breaks.push((v, b));
        }

        let chosen = if min_break == 0 {
            self.pick_with_break(rng, 0)
        } else if rng.gen::<f64>() < w {
            self.scratch_breaks[rng.gen_range(0..self.scratch_breaks.len())].0
        } else {
            self.pick_with_break(rng, min_break)
        };
        self.flip(chosen);
        (clause_idx, chosen)
    }

    fn pick_with_break(&mut self, rng: &mut ChaCha8Rng, target: u32) -> usize {
        self.scratch_choices.clear();
        for &(v, b) in &self.scratch_breaks {
            if b == target {
                self.scratch_choices.push(v);
            }
        }
        if self.scratch_choices.len() == 1 {
            self.scratch_choices[0]
        } else {
            self.scratch_choices[rng.gen_range(0..self.scratch_choices.len())]
        }
    }

    #[cfg(test)]
    fn check_incremental_state(&self) {
        for (cidx, clause) in self.formula.clauses().iter().enumerate() {
            let count = clause
                .iter()
                .filter(|&&lit| lit_true(lit, &self.assignment))
                .count() as u32;
            assert_eq!(
                self.true_count[cidx], count,
                "true_count drift at clause {cidx}"
            );
            let listed = self.unsat_pos[cidx] != NOT_IN_UNSAT;
            assert_eq!(
                listed,
                count == 0,
                "unsat membership drift at clause {cidx}"
            );
            if listed {
                assert_eq!(self.unsat[self.unsat_pos[cidx] as usize], cidx as u32);
            }
        }
    }
}

fn run_with_index(formula: &CnfFormula, index: &VarIndex, cfg: &WalksatConfig) -> WalksatRun {
    let mut rng = cfg.seed.rng();
    let mut searcher = Searcher::new(formula, index, &mut rng);
    let mut flips = 0u64;
    loop {
        if searcher.satisfied() {
            debug_assert_eq!(count_unsat(formula, &searcher.assignment), 0);
            return WalksatRun {
                first_success_iter: Some(flips.max(1)),
                witness: Some(searcher.assignment),
            };
        }
        if flips >= cfg.max_flips {
            return WalksatRun {
                first_success_iter: None,
                witness: None,
            };
        }
        flips += 1;
        searcher.step(&mut rng, cfg.w);
    }
}

/// One WalkSAT-SKC run from a uniformly random assignment.
pub fn walksat_skc_run(formula: &CnfFormula, cfg: &WalksatConfig) -> Result<WalksatRun> {
    cfg.validate()?;
    let index = VarIndex::build(formula);
    let run = run_with_index(formula, &index, cfg);
    if let (Some(_), Some(witness)) = (run.first_success_iter, run.witness.as_ref()) {
        assert_eq!(
            count_unsat(formula, witness),
            0,
            "success without a satisfying witness"
        );
    }
    Ok(run)
}

/// Independent repeats with per-repeat derived streams.
///
/// Repeat r draws from stream (base_stream << 32) | r, so the record set is
/// identical for any worker count; records come back ordered by repeat id.
pub fn run_experiment(
    formula: &CnfFormula,
    cfg: &WalksatConfig,
    repeats: u64,
) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    if repeats == 0 {
        return Err(Error::Domain("repeats must be >= 1".into()));
    }
    let index = VarIndex::build(formula);
    let records: Vec<RunRecord> = (0..repeats)
        .into_par_iter()
        .map(|repeat| {
            let seed = cfg.seed.with_stream((cfg.seed.stream_id << 32) | repeat);
            let run = run_with_index(formula, &index, &WalksatConfig { seed, ..*cfg });
            if let (Some(_), Some(witness)) = (run.first_success_iter, run.witness.as_ref()) {
                assert_eq!(
                    count_unsat(formula, witness),
                    0,
                    "repeat {repeat}: unverified success"
                );
            }
            RunRecord {
                repeat_id: repeat,
                first_success_iter: run.first_success_iter,
            }
        })
        .collect();
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::SuccessCurve;

    fn config(w: f64, max_flips: u64, stream: u64) -> WalksatConfig {
        WalksatConfig {
            w,
            max_flips,
            seed: RngSpec::new(4242, stream),
        }
    }

    #[test]
    fn unit_clause_succeeds_by_first_flip() {
        let formula = CnfFormula::new(1, vec![vec![1]]).unwrap();
        for stream in 0..20 {
            let run = walksat_skc_run(&formula, &config(0.5, 5, stream)).unwrap();
            assert_eq!(run.first_success_iter, Some(1));
            assert_eq!(run.witness, Some(vec![true]));
        }
    }

    #[test]
    fn zero_clause_formula_is_immediate_success() {
        let formula = CnfFormula::new(3, vec![]).unwrap();
        let run = walksat_skc_run(&formula, &config(0.5, 10, 0)).unwrap();
        assert_eq!(run.first_success_iter, Some(1));
    }

    #[test]
    fn unsatisfiable_formula_always_censors() {
        let formula = CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap();
        for max_flips in [1, 10, 1000] {
            let run = walksat_skc_run(&formula, &config(0.5, max_flips, max_flips)).unwrap();
            assert_eq!(run.first_success_iter, None);
            assert_eq!(run.witness, None);
        }
    }

    #[test]
    fn tautological_clause_never_blocks() {
        let formula = CnfFormula::new(2, vec![vec![1, -1], vec![2]]).unwrap();
        let run = walksat_skc_run(&formula, &config(0.5, 100, 3)).unwrap();
        let witness = run.witness.unwrap();
        assert_eq!(count_unsat(&formula, &witness), 0);
    }

    #[test]
    fn flips_stay_inside_picked_clause() {
        let formula = generate_random_ksat(3, 12, 40, RngSpec::new(8, 0)).unwrap();
        let index = VarIndex::build(&formula);
        let mut rng = RngSpec::new(8, 1).rng();
        let mut searcher = Searcher::new(&formula, &index, &mut rng);
        for _ in 0..500 {
            if searcher.satisfied() {
                break;
            }
            let (clause_idx, flipped) = searcher.step(&mut rng, 0.5);
            let vars: Vec<usize> = formula.clauses()[clause_idx as usize]
                .iter()
                .map(|&l| var_of(l))
                .collect();
            assert!(
                vars.contains(&flipped),
                "flipped variable outside the picked clause"
            );
        }
    }

    #[test]
    fn incremental_bookkeeping_matches_recomputation() {
        let formula = generate_random_ksat(3, 15, 55, RngSpec::new(9, 0)).unwrap();
        let index = VarIndex::build(&formula);
        let mut rng = RngSpec::new(9, 1).rng();
        let mut searcher = Searcher::new(&formula, &index, &mut rng);
        searcher.check_incremental_state();
        for step in 0..400 {
            if searcher.satisfied() {
                break;
            }
            searcher.step(&mut rng, 0.5);
            if step % 7 == 0 {
                searcher.check_incremental_state();
            }
        }
        searcher.check_incremental_state();
    }

    #[test]
    fn random_3sat_below_threshold_is_easy() {
        // ratio 3.0 instance; every success is audited inside run_experiment
        let formula = generate_random_ksat(3, 20, 60, RngSpec::new(1, 0)).unwrap();
        let cfg = config(0.5, 10_000, 0);
        let records = run_experiment(&formula, &cfg, 1000).unwrap();
        let curve = SuccessCurve::from_records(&records, cfg.max_flips).unwrap();
        assert!(
            curve.p_hat(cfg.max_flips) > 0.9,
            "calibration run solved only {:.3}",
            curve.p_hat(cfg.max_flips)
        );
    }

    #[test]
    fn experiment_is_scheduling_independent() {
        let formula = generate_random_ksat(3, 15, 50, RngSpec::new(2, 0)).unwrap();
        let cfg = config(0.5, 2_000, 6);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| run_experiment(&formula, &cfg, 64).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn success_probability_nondecreasing_in_budget() {
        let formula = generate_random_ksat(3, 15, 50, RngSpec::new(2, 1)).unwrap();
        let records = run_experiment(&formula, &config(0.5, 1_000, 7), 200).unwrap();
        let curve = SuccessCurve::from_records(&records, 1_000).unwrap();
        let mut prev = 0.0;
        for i in [1u64, 10, 100, 500, 1000] {
            let p = curve.p_hat(i);
            assert!(p >= prev);
            prev = p;
        }
    }

    #[test]
    fn config_validation() {
        let formula = CnfFormula::new(1, vec![vec![1]]).unwrap();
        assert!(walksat_skc_run(&formula, &config(1.5, 5, 0)).is_err());
        assert!(walksat_skc_run(&formula, &config(0.5, 0, 0)).is_err());
        assert!(run_experiment(&formula, &config(0.5, 5, 0), 0).is_err());
        let single = run_experiment(&formula, &config(0.5, 5, 0), 1).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].repeat_id, 0);
    }
}
