//! CNF formulas: DIMACS parsing, random k-SAT generation, evaluation.

use crate::error::Error;
use crate::rng::RngSpec;
use crate::Result;

use rand::Rng;
use serde::{Deserialize, Serialize};

/// A CNF formula over variables 1..=num_vars with signed-integer literals.
///
/// Duplicate literals within a clause are dropped at construction;
/// tautological clauses (v and ¬v together) are kept but flagged, and the
/// evaluator treats them as always satisfied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
    tautological: Vec<bool>,
}

/// Truth assignment, one value per variable.
pub type Assignment = Vec<bool>;

/// Parser output: the formula plus non-fatal warnings.
#[derive(Debug, Clone)]
pub struct ParsedCnf {
    pub formula: CnfFormula,
    pub warnings: Vec<String>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, raw_clauses: Vec<Vec<i32>>) -> Result<Self> {
        let mut clauses = Vec::with_capacity(raw_clauses.len());
        let mut tautological = Vec::with_capacity(raw_clauses.len());
        for (idx, raw) in raw_clauses.into_iter().enumerate() {
            if raw.is_empty() {
                return Err(Error::Domain(format!("clause {} is empty", idx + 1)));
            }
            let mut lits: Vec<i32> = Vec::with_capacity(raw.len());
            for lit in raw {
                if lit == 0 {
                    return Err(Error::Domain(format!(
                        "clause {} contains literal 0",
                        idx + 1
                    )));
                }
                if lit.unsigned_abs() as usize > num_vars {
                    return Err(Error::Domain(format!(
                        "clause {} references variable {} beyond num_vars = {num_vars}",
                        idx + 1,
                        lit.unsigned_abs()
                    )));
                }
                if !lits.contains(&lit) {
                    lits.push(lit);
                }
            }
            let taut = lits.iter().any(|&l| lits.contains(&-l));
            clauses.push(lits);
            tautological.push(taut);
        }
        Ok(CnfFormula {
            num_vars,
            clauses,
            tautological,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn is_tautological(&self, clause: usize) -> bool {
        self.tautological[clause]
    }
}

/// Variable index of a literal (0-based).
pub(crate) fn var_of(lit: i32) -> usize {
    lit.unsigned_abs() as usize - 1
}

/// Literal truth value under an assignment.
pub(crate) fn lit_true(lit: i32, assignment: &[bool]) -> bool {
    if lit > 0 {
        assignment[var_of(lit)]
    } else {
        !assignment[var_of(lit)]
    }
}

/// Number of clauses with no true literal.
pub fn count_unsat(formula: &CnfFormula, assignment: &[bool]) -> u64 {
    assert_eq!(
        assignment.len(),
        formula.num_vars(),
        "assignment length does not match variable count"
    );
    formula
        .clauses()
        .iter()
        .filter(|clause| !clause.iter().any(|&lit| lit_true(lit, assignment)))
        .count() as u64
}

/// Parse DIMACS CNF text.
///
/// Comments start with `c`, the header is `p cnf <vars> <clauses>`,
/// clauses are 0-terminated integer lists and may span lines. A `%` line
/// ends the input (benchmark-archive convention) and a final clause may be
/// terminated by end of input instead of an explicit 0. A clause-count
/// mismatch against the header is a warning; the parsed count wins.
pub fn parse_dimacs(text: &str) -> Result<ParsedCnf> {
    let mut warnings = Vec::new();
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut last_line = 0usize;

    'lines: for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(Error::Parse {
                    line,
                    message: "duplicate 'p cnf' header".into(),
                });
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "garbled header '{trimmed}', expected 'p cnf <vars> <clauses>'"
                    ),
                });
            }
            let vars = parts[2].parse::<usize>().map_err(|_| Error::Parse {
                line,
                message: format!("invalid variable count '{}'", parts[2]),
            })?;
            let declared = parts[3].parse::<usize>().map_err(|_| Error::Parse {
                line,
                message: format!("invalid clause count '{}'", parts[3]),
            })?;
            header = Some((vars, declared));
            continue;
        }

        let Some((num_vars, _)) = header else {
            return Err(Error::Parse {
                line,
                message: "clause data before 'p cnf' header".into(),
            });
        };
        for token in trimmed.split_whitespace() {
            if token.starts_with('%') {
                break 'lines;
            }
            let lit = token.parse::<i64>().map_err(|_| Error::Parse {
                line,
                message: format!("invalid literal token '{token}'"),
            })?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(Error::Parse {
                        line,
                        message: "empty clause: terminator 0 with no preceding literals".into(),
                    });
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() > num_vars as u64 {
                    return Err(Error::Parse {
                        line,
                        message: format!("literal {lit} out of range for {num_vars} variables"),
                    });
                }
                current.push(lit as i32);
            }
        }
    }

    let Some((num_vars, declared)) = header else {
        return Err(Error::Parse {
            line: last_line,
            message: "missing 'p cnf' header".into(),
        });
    };
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != declared {
        warnings.push(format!(
            "header declares {declared} clauses but {} were parsed; using the parsed count",
            clauses.len()
        ));
    }
    let formula = CnfFormula::new(num_vars, clauses)?;
    Ok(ParsedCnf { formula, warnings })
}

/// Uniform random k-SAT: each clause draws k distinct variables without
/// replacement and independent uniform polarities. Deterministic given the
/// stream spec.
pub fn generate_random_ksat(
    k: usize,
    num_vars: usize,
    num_clauses: usize,
    rng: RngSpec,
) -> Result<CnfFormula> {
    if k == 0 || num_vars == 0 {
        return Err(Error::Domain("k and num_vars must be >= 1".into()));
    }
    if k > num_vars {
        return Err(Error::Domain(format!(
            "clause width {k} exceeds variable count {num_vars}"
        )));
    }
    let mut generator = rng.rng();
    let mut clauses = Vec::with_capacity(num_clauses);
    for _ in 0..num_clauses {
        let vars = rand::seq::index::sample(&mut generator, num_vars, k);
        let clause: Vec<i32> = vars
            .iter()
            .map(|v| {
                let lit = (v + 1) as i32;
                if generator.gen::<bool>() {
                    lit
                } else {
                    -lit
                }
            })
            .collect();
        clauses.push(clause);
    }
    CnfFormula::new(num_vars, clauses)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_formula() {
        let parsed = parse_dimacs("p cnf 2 1\n1 -2 0\n").unwrap();
        assert_eq!(parsed.formula.num_vars(), 2);
        assert_eq!(parsed.formula.clauses(), &[vec![1, -2]]);
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn parses_comment_and_no_trailing_newline() {
        let parsed = parse_dimacs("c comment\np cnf 1 1\n1 0").unwrap();
        assert_eq!(parsed.formula.num_vars(), 1);
        assert_eq!(parsed.formula.clauses(), &[vec![1]]);
    }

    #[test]
    fn clause_count_mismatch_is_warning() {
        let parsed = parse_dimacs("p cnf 3 3\n1 2 0\n-1 3 0\n").unwrap();
        assert_eq!(parsed.formula.num_clauses(), 2);
        assert_eq!(parsed.warnings.len(), 1);
        assert!(parsed.warnings[0].contains("declares 3"));
    }

    #[test]
    fn clauses_may_span_lines_and_end_at_eof() {
        let parsed = parse_dimacs("p cnf 4 2\n1 2\n3 0\n-2 -4").unwrap();
        assert_eq!(parsed.formula.clauses(), &[vec![1, 2, 3], vec![-2, -4]]);
    }

    #[test]
    fn percent_line_ends_input() {
        let parsed = parse_dimacs("p cnf 2 1\n1 2 0\n%\n0\n").unwrap();
        assert_eq!(parsed.formula.num_clauses(), 1);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_dimacs("p cnf x 1\n1 0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_dimacs("p cnf 2 1\n1 5 0\n") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("out of range"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_dimacs("p cnf 2 1\n0\n") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("empty clause"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_dimacs("1 2 0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(
            parse_dimacs("c nothing\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn duplicates_dropped_and_tautologies_flagged() {
        let parsed = parse_dimacs("p cnf 3 2\n1 1 2 0\n1 -1 3 0\n").unwrap();
        assert_eq!(parsed.formula.clauses()[0], vec![1, 2]);
        assert!(!parsed.formula.is_tautological(0));
        assert!(parsed.formula.is_tautological(1));
    }

    #[test]
    fn count_unsat_basics() {
        let formula = CnfFormula::new(3, vec![vec![1, 2], vec![2, 3], vec![3]]).unwrap();
        assert_eq!(count_unsat(&formula, &[true, true, true]), 0);
        let unit = CnfFormula::new(1, vec![vec![1]]).unwrap();
        assert_eq!(count_unsat(&unit, &[false]), 1);
        assert_eq!(count_unsat(&unit, &[true]), 0);
    }

    #[test]
    fn count_unsat_matches_truth_table_oracle() {
        // Independent evaluator over every assignment of small random formulas.
        fn clause_satisfied(clause: &[i32], bits: usize) -> bool {
            clause.iter().any(|&lit| {
                let v = lit.unsigned_abs() as usize - 1;
                let val = (bits >> v) & 1 == 1;
                if lit > 0 {
                    val
                } else {
                    !val
                }
            })
        }
        for stream in 0..10 {
            let formula = generate_random_ksat(2, 4, 6, RngSpec::new(55, stream)).unwrap();
            for bits in 0..(1usize << 4) {
                let assignment: Vec<bool> = (0..4).map(|v| (bits >> v) & 1 == 1).collect();
                let naive = formula
                    .clauses()
                    .iter()
                    .filter(|cl| !clause_satisfied(cl, bits))
                    .count() as u64;
                assert_eq!(count_unsat(&formula, &assignment), naive);
            }
        }
    }

    #[test]
    fn generator_shapes_and_determinism() {
        let f = generate_random_ksat(4, 50, 499, RngSpec::new(3, 0)).unwrap();
        assert_eq!(f.num_vars(), 50);
        assert_eq!(f.num_clauses(), 499);
        for (idx, clause) in f.clauses().iter().enumerate() {
            assert_eq!(clause.len(), 4, "clause {idx} lost a duplicate variable");
            assert!(!f.is_tautological(idx));
        }
        let again = generate_random_ksat(4, 50, 499, RngSpec::new(3, 0)).unwrap();
        assert_eq!(f, again);

        let unit = generate_random_ksat(1, 1, 1, RngSpec::new(3, 1)).unwrap();
        assert_eq!(unit.clauses().len(), 1);
        assert_eq!(unit.clauses()[0].len(), 1);

        assert!(generate_random_ksat(5, 4, 1, RngSpec::new(3, 2)).is_err());
    }
}
