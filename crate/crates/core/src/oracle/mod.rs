//! Brute-force ground truth for small instances, and a registry of
//! randomized checks of the structural lemmas the classifier relies on.

mod checks;

use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};
use serde::Serialize;

use crate::field::Elem;
use crate::group::{transvection_census, GroupSpec};
use crate::linalg::{monic, Matrix, Subspace, Vector};
use crate::symplectic::{SymplecticSpace, Transvection};

pub use checks::default_checks;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("unknown check {0:?}")]
    UnknownCheck(String),
}

/// Σ over 0 < r < n of the Gaussian binomial [n, r]_q, saturating.
pub fn proper_subspace_count(n: usize, q: u64) -> u128 {
    let mut total: u128 = 0;
    for r in 1..n {
        let (mut num, mut den): (u128, u128) = (1, 1);
        for i in 0..r {
            num = num.saturating_mul((q as u128).pow((n - i) as u32) - 1);
            den = den.saturating_mul((q as u128).pow((i + 1) as u32) - 1);
        }
        total = total.saturating_add(num / den);
    }
    total
}

/// Every proper nonzero subspace of Kⁿ, by reduced row-echelon basis.
fn all_proper_subspaces(k: &crate::field::Field, n: usize) -> Vec<Subspace> {
    let elems: Vec<Elem> = k.elements().collect();
    let q = elems.len();
    let mut out = Vec::new();
    for r in 1..n {
        let mut pivots: Vec<usize> = (0..r).collect();
        loop {
            // free positions: (row i, col j) with j > pivots[i], j not a pivot
            let free: Vec<(usize, usize)> = (0..r)
                .flat_map(|i| {
                    let p = &pivots;
                    (p[i] + 1..n).filter(move |j| !p.contains(j)).map(move |j| (i, j))
                })
                .collect();
            let mut digits = vec![0usize; free.len()];
            loop {
                let mut rows = vec![vec![Elem::ZERO; n]; r];
                for (i, &p) in pivots.iter().enumerate() {
                    rows[i][p] = Elem::ONE;
                }
                for (&(i, j), &d) in free.iter().zip(&digits) {
                    rows[i][j] = elems[d];
                }
                out.push(Subspace::span(k, n, &rows).unwrap());
                let Some(pos) = digits.iter().position(|&d| d + 1 < q) else {
                    break;
                };
                for d in digits.iter_mut().take(pos) {
                    *d = 0;
                }
                digits[pos] += 1;
            }
            // next r-subset of 0..n in lexicographic order
            let Some(i) = (0..r).rev().find(|&i| pivots[i] < n - r + i) else {
                break;
            };
            pivots[i] += 1;
            for j in i + 1..r {
                pivots[j] = pivots[j - 1] + 1;
            }
        }
    }
    out
}

/// All G-stable proper nonzero subspaces, by exhaustive enumeration
/// (at most 10⁵ candidates).
pub fn oracle_reducible(g: &GroupSpec) -> Result<Vec<Subspace>, OracleError> {
    let k = g.field();
    let n = g.dim();
    let count = proper_subspace_count(n, k.order() as u64);
    if count > 100_000 {
        return Err(OracleError::TooLarge(format!("{count} proper subspaces")));
    }
    Ok(all_proper_subspaces(k, n)
        .into_iter()
        .filter(|s| g.generators().iter().all(|a| s.image(k, a) == *s))
        .collect())
}

/// {B T_x[λ] B⁻¹ : x ∈ Lⁿ∖0, λ ∈ L^×}, canonical and sorted. `b` maps the
/// standard space into the space of `space`.
pub fn conjugated_sp_transvections(
    space: &SymplecticSpace,
    l_degree: u32,
    b: &Matrix,
) -> Result<Vec<Transvection>, OracleError> {
    let k = space.field();
    let n = space.dim();
    let l = k
        .subfield(l_degree)
        .map_err(|e| OracleError::InvalidWitness(e.to_string()))?;
    let binv = b
        .inverse(k)
        .map_err(|_| OracleError::InvalidWitness("conjugator is singular".into()))?;
    let std = SymplecticSpace::standard(k, n).map_err(|e| OracleError::InvalidWitness(e.to_string()))?;
    let lel = l.elements();
    let lnz = l.nonzero_elements();
    let total = (lel.len() as u128).pow(n as u32);
    if total > 10_000_000 {
        return Err(OracleError::TooLarge(format!("|L|^n = {total}")));
    }
    let mut out = Vec::new();
    let mut digits = vec![0usize; n];
    loop {
        let x: Vector = digits.iter().map(|&d| lel[d]).collect();
        if let Some((xm, c)) = monic(k, &x) {
            if c == Elem::ONE {
                for &lam in &lnz {
                    let m = b.mul(k, &std.transvection_matrix(&xm, lam)).mul(k, &binv);
                    let t = space
                        .detect_transvection(&m)
                        .map_err(|_| OracleError::InvalidWitness("conjugator is not a similitude".into()))?;
                    out.push(t);
                }
            }
        }
        let Some(pos) = digits.iter().position(|&d| d + 1 < lel.len()) else {
            break;
        };
        for d in digits.iter_mut().take(pos) {
            *d = 0;
        }
        digits[pos] += 1;
    }
    out.sort();
    Ok(out)
}

/// Exact equality of the closure census with the conjugated Sp_n(L)
/// transvection set.
pub fn oracle_case3(g: &GroupSpec, l_degree: u32, b: &Matrix, cap: usize) -> Result<bool, OracleError> {
    let closure = g.closure(cap);
    if closure.capped() {
        return Err(OracleError::TooLarge(format!("closure exceeds {cap} elements")));
    }
    let census = transvection_census(g.space(), &closure).expect("uncapped");
    let expected = conjugated_sp_transvections(g.space(), l_degree, b)?;
    Ok(census == expected)
}

/// A failing instance, replayable with the recorded seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub seed: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub statement: String,
    pub cases: usize,
    pub passed: usize,
    pub failures: Vec<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl CheckOutcome {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.skipped.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub suite: String,
    pub seed: u64,
    /// SHA-256 of (suite, seed, count), identifying the run.
    pub digest: String,
    pub checks: Vec<CheckOutcome>,
}

impl OracleReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok())
    }
}

/// One lemma instantiated on random data: hypotheses are arranged by
/// construction and the conclusion asserted.
pub trait LemmaCheck: Send + Sync {
    fn name(&self) -> &'static str;
    fn statement(&self) -> &'static str;
    /// Number of cases in a default run (1 for exhaustive checks).
    fn default_count(&self) -> usize;
    /// Runs one case; `Err` describes the counterexample.
    fn run_case(&self, seed: u64) -> Result<(), String>;
}

/// Seed of case `i` of a run with base seed `seed`.
pub fn case_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(i as u64)
        .rotate_left(17)
}

pub struct CheckRegistry {
    checks: Vec<Box<dyn LemmaCheck>>,
}

impl Default for CheckRegistry {
    fn default() -> Self {
        CheckRegistry {
            checks: default_checks(),
        }
    }
}

impl CheckRegistry {
    pub fn register(&mut self, c: Box<dyn LemmaCheck>) {
        self.checks.retain(|x| x.name() != c.name());
        self.checks.push(c);
    }

    pub fn get(&self, name: &str) -> Option<&dyn LemmaCheck> {
        self.checks.iter().find(|c| c.name() == name).map(|c| c.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.checks.iter().map(|c| c.name()).collect()
    }

    /// Runs one check. Cases stop (and the outcome is marked skipped) once
    /// `time_budget` is exhausted.
    pub fn run_check(&self, c: &dyn LemmaCheck, seed: u64, count: Option<usize>, time_budget: Duration) -> CheckOutcome {
        let count = count.unwrap_or_else(|| c.default_count());
        let start = Instant::now();
        let mut out = CheckOutcome {
            name: c.name().to_string(),
            statement: c.statement().to_string(),
            cases: 0,
            passed: 0,
            failures: Vec::new(),
            skipped: None,
        };
        for i in 0..count {
            if start.elapsed() > time_budget {
                out.skipped = Some(format!("time budget exhausted after {i} of {count} cases"));
                break;
            }
            let s = case_seed(seed, i);
            out.cases += 1;
            match c.run_case(s) {
                Ok(()) => out.passed += 1,
                Err(detail) => out.failures.push(Counterexample { seed: s, detail }),
            }
        }
        out
    }

    /// Runs the named check, or every check for `"lemmas"`.
    pub fn run_suite(
        &self,
        suite: &str,
        seed: u64,
        count: Option<usize>,
        time_budget: Duration,
    ) -> Result<OracleReport, OracleError> {
        let selected: Vec<&dyn LemmaCheck> = if suite == "lemmas" {
            self.checks.iter().map(|c| c.as_ref()).collect()
        } else {
            vec![self.get(suite).ok_or_else(|| OracleError::UnknownCheck(suite.to_string()))?]
        };
        let id = format!("{suite}/{seed}/{count:?}");
        let checks = selected
            .into_iter()
            .map(|c| self.run_check(c, seed, count, time_budget))
            .collect();
        Ok(OracleReport {
            suite: suite.to_string(),
            seed,
            digest: Sha256::digest(id.as_bytes()).iter().map(|b| format!("{b:02x}")).collect(),
            checks,
        })
    }

    /// Re-runs a single recorded case.
    pub fn replay(&self, name: &str, case_seed: u64) -> Result<Result<(), String>, OracleError> {
        let c = self.get(name).ok_or_else(|| OracleError::UnknownCheck(name.to_string()))?;
        Ok(c.run_case(case_seed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn sp2(k: &crate::field::Field) -> GroupSpec {
        let s = SymplecticSpace::standard(k, 2).unwrap();
        let gens = vec![
            s.transvection_matrix(&[Elem::ONE, Elem::ZERO], Elem::ONE),
            s.transvection_matrix(&[Elem::ZERO, Elem::ONE], Elem::ONE),
        ];
        GroupSpec::new(s, gens).unwrap()
    }

    #[test]
    fn subspace_counts() {
        assert_eq!(proper_subspace_count(2, 5), 6);
        // 156 + 806 + 156
        assert_eq!(proper_subspace_count(4, 5), 1118);
        let k = make_field(5, 1).unwrap();
        assert_eq!(all_proper_subspaces(&k, 4).len(), 1118);
        let k = make_field(7, 1).unwrap();
        assert_eq!(all_proper_subspaces(&k, 3).len(), 2 * 57);
    }

    #[test]
    fn reducible_oracle() {
        let k = make_field(5, 1).unwrap();
        assert!(oracle_reducible(&sp2(&k)).unwrap().is_empty());
        let s = SymplecticSpace::standard(&k, 2).unwrap();
        let g = GroupSpec::new(s.clone(), vec![s.transvection_matrix(&[Elem::ONE, Elem::ZERO], Elem::ONE)]).unwrap();
        assert_eq!(oracle_reducible(&g).unwrap(), vec![Subspace::line(&k, &[Elem::ONE, Elem::ZERO])]);
        let k = make_field(5, 2).unwrap();
        let s = SymplecticSpace::standard(&k, 4).unwrap();
        let g = GroupSpec::new(s, vec![]).unwrap();
        assert!(matches!(oracle_reducible(&g), Err(OracleError::TooLarge(_))));
    }

    #[test]
    fn case3_oracle() {
        let k = make_field(5, 1).unwrap();
        assert_eq!(oracle_case3(&sp2(&k), 1, &Matrix::identity(2), 1000), Ok(true));
        let s = SymplecticSpace::standard(&k, 2).unwrap();
        let g = GroupSpec::new(s.clone(), vec![s.transvection_matrix(&[Elem::ONE, Elem::ZERO], Elem::ONE)]).unwrap();
        assert_eq!(oracle_case3(&g, 1, &Matrix::identity(2), 1000), Ok(false));
    }

    #[test]
    fn registry_runs_and_replays() {
        let reg = CheckRegistry::default();
        let r = reg
            .run_suite("conjugation-law", 1, Some(5), Duration::from_secs(60))
            .unwrap();
        assert!(r.ok(), "{r:?}");
        assert_eq!(r.checks[0].cases, 5);
        assert_eq!(reg.replay("conjugation-law", case_seed(1, 0)).unwrap(), Ok(()));
        assert!(reg.run_suite("nope", 1, None, Duration::from_secs(1)).is_err());
    }
}
