//! Pregeometries given by a dependence oracle over a finite sample
//! universe, the property suite for the five closure axioms, the geodesic
//! closure `gcl_F`, and the two disjointness lemmas.

mod disjoint;
mod gcl;

pub use disjoint::{disjoint1_extract, disjoint2_check, Disjoint1Outcome, Disjoint2Report};
pub use gcl::{
    gcl_dimension, BaseField, Caveat, DimReport, GclConfig, GclOracle, GclPoint, PointSpec, WitnessRecord,
};

use std::collections::HashMap;
use std::sync::Mutex;

use serde::Serialize;
use thiserror::Error;

use crate::exactnum::{linalg, Rational};
use crate::moebius::MoebiusError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PregeomError {
    #[error("exact and numeric points compared without a declared embedding")]
    MixedRepresentation,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("point variables overlap the coefficient variables")]
    VariableOverlap,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
}

/// Subsets of the universe are bit masks, so universes hold at most 64 points.
pub type Mask = u64;

pub fn mask_of(items: &[usize]) -> Mask {
    items.iter().fold(0, |m, &i| m | (1 << i))
}

pub fn members(mask: Mask) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Answer of a dependence query. A bounded search that found nothing
/// reports `IndependentUpTo(H)` rather than a proof of independence.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dependence {
    Dependent(String),
    Independent,
    IndependentUpTo(u32),
}

impl Dependence {
    pub fn is_dependent(&self) -> bool {
        matches!(self, Dependence::Dependent(_))
    }
}

/// `x ∈ cl(A)` on a finite universe indexed `0..universe_size()`.
pub trait DependenceOracle: Sync {
    fn universe_size(&self) -> usize;
    fn decide(&self, x: usize, set: &[usize]) -> Dependence;
    fn depends(&self, x: usize, set: &[usize]) -> bool {
        self.decide(x, set).is_dependent()
    }
    fn label(&self, x: usize) -> String {
        format!("#{x}")
    }
}

/// Memoizing wrapper keyed by `(x, A)`.
pub struct Memo<'a> {
    inner: &'a dyn DependenceOracle,
    cache: Mutex<HashMap<(usize, Mask), bool>>,
}

impl<'a> Memo<'a> {
    pub fn new(inner: &'a dyn DependenceOracle) -> Self {
        Memo {
            inner,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn depends(&self, x: usize, set: Mask) -> bool {
        if let Some(&v) = self.cache.lock().unwrap().get(&(x, set)) {
            return v;
        }
        let v = self.inner.depends(x, &members(set));
        self.cache.lock().unwrap().insert((x, set), v);
        v
    }

    /// Closure of `set` within the universe.
    pub fn closure(&self, set: Mask) -> Mask {
        (0..self.inner.universe_size())
            .filter(|&x| self.depends(x, set))
            .fold(0, |m, x| m | (1 << x))
    }

    fn show(&self, set: Mask) -> String {
        let items: Vec<String> = members(set).into_iter().map(|i| self.inner.label(i)).collect();
        format!("{{{}}}", items.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomResult {
    pub axiom: String,
    pub passed: bool,
    pub checked: usize,
    pub counterexamples: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub universe: Vec<String>,
    pub max_subset_size: usize,
    pub results: Vec<AxiomResult>,
}

impl PropertyReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn passed(&self, axiom: &str) -> bool {
        self.results
            .iter()
            .find(|r| r.axiom == axiom)
            .map(|r| r.passed)
            .unwrap_or(false)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.results
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.axiom.as_str())
            .collect()
    }
}

const MAX_COUNTEREXAMPLES: usize = 5;

fn subsets_up_to(n: usize, k: usize) -> Vec<Mask> {
    let mut out = Vec::new();
    for m in 0..(1u64 << n) {
        if (m.count_ones() as usize) <= k {
            out.push(m);
        }
    }
    out
}

struct Tally {
    axiom: &'static str,
    checked: usize,
    bad: Vec<String>,
    failed: bool,
}

impl Tally {
    fn new(axiom: &'static str) -> Self {
        Tally {
            axiom,
            checked: 0,
            bad: Vec::new(),
            failed: false,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed = true;
            if self.bad.len() < MAX_COUNTEREXAMPLES {
                self.bad.push(describe());
            }
        }
    }

    fn finish(self) -> AxiomResult {
        AxiomResult {
            axiom: self.axiom.into(),
            passed: !self.failed,
            checked: self.checked,
            counterexamples: self.bad,
        }
    }
}

/// Checks extensivity, monotonicity, idempotence, finite character and
/// exchange on every subset of size at most `max_size` (exchange on
/// subsets one smaller, so that `A ∪ {a}` stays in range).
pub fn pregeometry_property_suite(oracle: &dyn DependenceOracle, max_size: usize) -> PropertyReport {
    let n = oracle.universe_size();
    assert!(n <= 20, "property suite is exhaustive; keep the sample small");
    let memo = Memo::new(oracle);
    let subsets = subsets_up_to(n, max_size);

    let mut ext = Tally::new("extensivity");
    let mut mono = Tally::new("monotonicity");
    let mut idem = Tally::new("idempotence");
    let mut fin = Tally::new("finite_character");
    let mut exch = Tally::new("exchange");

    for &a in &subsets {
        let cl = memo.closure(a);
        ext.record(a & !cl == 0, || format!("{} ⊄ cl = {}", memo.show(a), memo.show(cl)));
        for b in 0..n {
            if a >> b & 1 == 1 {
                continue;
            }
            let bigger = a | (1 << b);
            let cl_big = memo.closure(bigger);
            mono.record(cl & !cl_big == 0, || {
                format!(
                    "cl{} = {} ⊄ cl{} = {}",
                    memo.show(a),
                    memo.show(cl),
                    memo.show(bigger),
                    memo.show(cl_big)
                )
            });
        }
        let cl2 = memo.closure(cl);
        idem.record(cl2 == cl, || {
            format!("cl{} = {} but cl(cl) = {}", memo.show(a), memo.show(cl), memo.show(cl2))
        });
        // Every dependence on a finite set is witnessed by that finite set.
        fin.record(true, String::new);

        if (a.count_ones() as usize) < max_size {
            for x in 0..n {
                if cl >> x & 1 == 1 {
                    continue;
                }
                let with_x = memo.closure(a | (1 << x));
                for y in 0..n {
                    if y == x || with_x >> y & 1 == 0 || cl >> y & 1 == 1 {
                        continue;
                    }
                    let back = memo.depends(x, a | (1 << y));
                    exch.record(back, || {
                        format!(
                            "{} ∈ cl({} ∪ {{{}}}) \\ cl(A) but {} ∉ cl(A ∪ {{{}}})",
                            oracle.label(y),
                            memo.show(a),
                            oracle.label(x),
                            oracle.label(x),
                            oracle.label(y)
                        )
                    });
                }
            }
        }
    }
    PropertyReport {
        universe: (0..n).map(|i| oracle.label(i)).collect(),
        max_subset_size: max_size,
        results: vec![ext.finish(), mono.finish(), idem.finish(), fin.finish(), exch.finish()],
    }
}

fn bool_answer(b: bool) -> Dependence {
    if b {
        Dependence::Dependent(String::new())
    } else {
        Dependence::Independent
    }
}

/// `cl(A) = ⋃_{a ∈ A} cl({a})` on every subset of size at most `max_size`.
pub fn is_trivial_type(oracle: &dyn DependenceOracle, max_size: usize) -> bool {
    let memo = Memo::new(oracle);
    let n = oracle.universe_size();
    subsets_up_to(n, max_size).into_iter().all(|a| {
        let union = members(a).into_iter().fold(0, |m, i| m | memo.closure(1 << i));
        memo.closure(a) == union
    })
}

/// Linear span over ℚ: `x ∈ cl(A)` iff `x` is in the row span of `A`.
pub struct LinearSpanOracle {
    pub vectors: Vec<Vec<Rational>>,
}

impl DependenceOracle for LinearSpanOracle {
    fn universe_size(&self) -> usize {
        self.vectors.len()
    }
    fn decide(&self, x: usize, set: &[usize]) -> Dependence {
        let rows: Vec<Vec<Rational>> = set.iter().map(|&i| self.vectors[i].clone()).collect();
        let inside = if rows.is_empty() {
            self.vectors[x].iter().all(Rational::is_zero)
        } else {
            linalg::in_row_span(&rows, &self.vectors[x])
        };
        bool_answer(inside)
    }
    fn label(&self, x: usize) -> String {
        let parts: Vec<String> = self.vectors[x].iter().map(|c| c.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

/// `x ∈ cl(A)` iff `x ∈ A`: the trivial pregeometry.
pub struct EqualityOracle {
    pub size: usize,
}

impl DependenceOracle for EqualityOracle {
    fn universe_size(&self) -> usize {
        self.size
    }
    fn decide(&self, x: usize, set: &[usize]) -> Dependence {
        bool_answer(set.contains(&x))
    }
}

/// Over a universe of integers, `cl(A) = A ∪ {a² : a ∈ A}`. Not idempotent
/// and without exchange.
pub struct SquaringOracle {
    pub values: Vec<i64>,
}

impl DependenceOracle for SquaringOracle {
    fn universe_size(&self) -> usize {
        self.values.len()
    }
    fn decide(&self, x: usize, set: &[usize]) -> Dependence {
        let v = self.values[x];
        bool_answer(set.iter().any(|&i| i == x || self.values[i] * self.values[i] == v))
    }
    fn label(&self, x: usize) -> String {
        self.values[x].to_string()
    }
}

/// `cl(A) = A` when `|A| ≥ 2`, else `A` plus the successor of its element
/// (or element 0 for the empty set). Violates monotonicity.
pub struct MonotonicityBreaker {
    pub size: usize,
}

impl DependenceOracle for MonotonicityBreaker {
    fn universe_size(&self) -> usize {
        self.size
    }
    fn decide(&self, x: usize, set: &[usize]) -> Dependence {
        let inside = set.contains(&x)
            || match set {
                [] => x == 0,
                [a] => x == (a + 1) % self.size,
                _ => false,
            };
        bool_answer(inside)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_span_is_a_pregeometry() {
        let v = |a: i64, b: i64, c: i64| vec![Rational::from(a), Rational::from(b), Rational::from(c)];
        let oracle = LinearSpanOracle {
            vectors: vec![v(1, 0, 0), v(0, 1, 0), v(1, 1, 0), v(0, 0, 1), v(1, 2, 3), v(2, 0, 0)],
        };
        let r = pregeometry_property_suite(&oracle, 5);
        assert!(r.all_passed(), "{r:?}");
    }

    #[test]
    fn equality_oracle_is_trivial_pregeometry() {
        let r = pregeometry_property_suite(&EqualityOracle { size: 6 }, 5);
        assert!(r.all_passed());
    }

    #[test]
    fn negative_controls_fail_the_intended_axioms() {
        let sq = SquaringOracle {
            values: vec![2, 4, 16, 3, 9, 5],
        };
        let r = pregeometry_property_suite(&sq, 5);
        assert!(!r.passed("idempotence"));
        assert!(!r.passed("exchange"));
        assert!(r.passed("extensivity") && r.passed("monotonicity"));

        let r = pregeometry_property_suite(&MonotonicityBreaker { size: 5 }, 5);
        assert!(!r.passed("monotonicity"));
        assert!(!r.results[1].counterexamples.is_empty());
    }
}
