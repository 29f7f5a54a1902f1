//! Marginal probabilities of `n` binary variables and their canonical layout.
//!
//! An instance is given by the `n` univariate complement probabilities
//! `P(Ā_i)` and the `n(n-1)/2` bivariate conjunction probabilities
//! `P(A_i A_j)`, each possibly measured in its own experimental context.
//! Variable indices are 1-based throughout the public API.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Smallest supported number of variables.
pub const MIN_VARIABLES: usize = 2;
/// Largest supported number of variables (`N = 2^14` outcomes).
pub const MAX_VARIABLES: usize = 14;

/// Slack used when comparing probabilities for within-context consistency.
const CONSISTENCY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarginalError {
    #[error("variable count {0} outside supported range {MIN_VARIABLES}..={MAX_VARIABLES}")]
    VariableCount(usize),
    #[error("probability {key} = {value} is outside [0, 1]")]
    OutOfRange { key: String, value: f64 },
    #[error("missing marginal entries: {}", .0.join(", "))]
    Missing(Vec<String>),
    #[error("unexpected marginal entry {0}")]
    Unexpected(String),
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("cannot parse probability {0:?}")]
    Parse(String),
}

/// A measured event: the complement `Ā_i` of a variable or the conjunction
/// `A_i A_j` of two variables (`i < j`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MarginalKey {
    Complement(usize),
    Pair(usize, usize),
}

impl fmt::Display for MarginalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarginalKey::Complement(i) => write!(f, "pbar[{i}]"),
            MarginalKey::Pair(i, j) => write!(f, "pjoint[{i},{j}]"),
        }
    }
}

/// Number of marginals `m = n(n+1)/2`.
pub fn marginal_count(n: usize) -> usize {
    n * (n + 1) / 2
}

/// 1-based slot of `P(A_i A_j)` in the canonical layout,
/// `k = ((n(n-1) - (n-i)(n-i-1)) / 2) + j`.
pub fn pair_slot(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(1 <= i && i < j && j <= n);
    (n * (n - 1) - (n - i) * (n - i - 1)) / 2 + j
}

/// All pairs `(i, j)`, `1 <= i < j <= n`, in lexicographic order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
}

fn check_prob(key: MarginalKey, value: f64) -> Result<f64, MarginalError> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(MarginalError::OutOfRange {
            key: key.to_string(),
            value,
        })
    }
}

/// Parses a probability given either as a decimal (`"0.45"`) or as an exact
/// fraction (`"9/20"`). Fractions are converted with a single rounding.
pub fn parse_probability(text: &str) -> Result<f64, MarginalError> {
    let text = text.trim();
    let bad = || MarginalError::Parse(text.to_string());
    match text.split_once('/') {
        Some((num, den)) => {
            let num: u64 = num.trim().parse().map_err(|_| bad())?;
            let den: u64 = den.trim().parse().map_err(|_| bad())?;
            const EXACT: u64 = 1 << 53;
            if den == 0 || num > EXACT || den > EXACT {
                return Err(bad());
            }
            // both operands are exact doubles, so the quotient is correctly rounded
            Ok(num as f64 / den as f64)
        }
        None => text.parse::<f64>().map_err(|_| bad()),
    }
}

/// A complete set of univariate and bivariate marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalSet {
    n: usize,
    pbar: Vec<f64>,
    /// pair probabilities in lexicographic `(i, j)` order
    pjoint: Vec<f64>,
}

impl MarginalSet {
    /// Builds a set from the complement probabilities and the pair
    /// probabilities in lexicographic order.
    pub fn new(pbar: Vec<f64>, pjoint: Vec<f64>) -> Result<Self, MarginalError> {
        let n = pbar.len();
        if !(MIN_VARIABLES..=MAX_VARIABLES).contains(&n) {
            return Err(MarginalError::VariableCount(n));
        }
        let expected = n * (n - 1) / 2;
        if pjoint.len() != expected {
            return Err(MarginalError::Length {
                expected,
                got: pjoint.len(),
            });
        }
        for (i, &p) in pbar.iter().enumerate() {
            check_prob(MarginalKey::Complement(i + 1), p)?;
        }
        for ((i, j), &p) in pairs(n).zip(&pjoint) {
            check_prob(MarginalKey::Pair(i, j), p)?;
        }
        Ok(Self { n, pbar, pjoint })
    }

    /// Builds a set from keyed entries, reporting every missing key at once.
    pub fn from_entries(
        n: usize,
        entries: &BTreeMap<MarginalKey, f64>,
    ) -> Result<Self, MarginalError> {
        if !(MIN_VARIABLES..=MAX_VARIABLES).contains(&n) {
            return Err(MarginalError::VariableCount(n));
        }
        for key in entries.keys() {
            let ok = match *key {
                MarginalKey::Complement(i) => (1..=n).contains(&i),
                MarginalKey::Pair(i, j) => 1 <= i && i < j && j <= n,
            };
            if !ok {
                return Err(MarginalError::Unexpected(key.to_string()));
            }
        }
        let wanted = (1..=n)
            .map(MarginalKey::Complement)
            .chain(pairs(n).map(|(i, j)| MarginalKey::Pair(i, j)));
        let missing: Vec<String> = wanted
            .filter(|k| !entries.contains_key(k))
            .map(|k| k.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(MarginalError::Missing(missing));
        }
        let pbar = (1..=n)
            .map(|i| entries[&MarginalKey::Complement(i)])
            .collect();
        let pjoint = pairs(n)
            .map(|(i, j)| entries[&MarginalKey::Pair(i, j)])
            .collect();
        Self::new(pbar, pjoint)
    }

    /// Product instance: independent variables with `P(A_i) = p[i]`.
    pub fn independent(p: &[f64]) -> Result<Self, MarginalError> {
        let n = p.len();
        let pbar = p.iter().map(|x| 1.0 - x).collect();
        let pjoint = pairs(n).map(|(i, j)| p[i - 1] * p[j - 1]).collect();
        Self::new(pbar, pjoint)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        marginal_count(self.n)
    }

    /// `P(Ā_i)`, 1-based.
    pub fn pbar(&self, i: usize) -> f64 {
        self.pbar[i - 1]
    }

    /// `P(A_i) = 1 - P(Ā_i)`, 1-based.
    pub fn p(&self, i: usize) -> f64 {
        1.0 - self.pbar[i - 1]
    }

    /// `P(A_i A_j)` for any two distinct 1-based indices, in either order.
    pub fn pjoint(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.pjoint[pair_slot(self.n, i, j) - self.n - 1]
    }

    pub fn complements(&self) -> &[f64] {
        &self.pbar
    }

    /// Pair probabilities in lexicographic order.
    pub fn joints(&self) -> &[f64] {
        &self.pjoint
    }

    pub fn get(&self, key: MarginalKey) -> f64 {
        match key {
            MarginalKey::Complement(i) => self.pbar(i),
            MarginalKey::Pair(i, j) => self.pjoint(i, j),
        }
    }

    /// Keys in canonical slot order.
    pub fn keys(&self) -> Vec<MarginalKey> {
        (1..=self.n)
            .map(MarginalKey::Complement)
            .chain(pairs(self.n).map(|(i, j)| MarginalKey::Pair(i, j)))
            .collect()
    }

    /// Relabels variables: variable `i` of the result is variable
    /// `perm[i-1]` of `self` (`perm` is a 1-based permutation).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let pbar = perm.iter().map(|&src| self.pbar(src)).collect();
        let pjoint = pairs(self.n)
            .map(|(i, j)| self.pjoint(perm[i - 1], perm[j - 1]))
            .collect();
        Self {
            n: self.n,
            pbar,
            pjoint,
        }
    }
}

/// The diagonal of Λ: the marginals arranged in canonical slot order.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaVector {
    n: usize,
    entries: Vec<f64>,
}

impl LambdaVector {
    /// Wraps raw entries. Entries must lie in `[0, 1]`.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self, MarginalError> {
        if !(MIN_VARIABLES..=MAX_VARIABLES).contains(&n) {
            return Err(MarginalError::VariableCount(n));
        }
        if entries.len() != marginal_count(n) {
            return Err(MarginalError::Length {
                expected: marginal_count(n),
                got: entries.len(),
            });
        }
        let set = Self { n, entries };
        set.to_marginals()?;
        Ok(set)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Inverse of [`to_lambda`].
    pub fn to_marginals(&self) -> Result<MarginalSet, MarginalError> {
        let n = self.n;
        let pbar = self.entries[..n].to_vec();
        let pjoint = pairs(n)
            .map(|(i, j)| self.entries[pair_slot(n, i, j) - 1])
            .collect();
        MarginalSet::new(pbar, pjoint)
    }
}

/// Arranges the marginals in canonical slot order.
pub fn to_lambda(set: &MarginalSet) -> LambdaVector {
    let n = set.n;
    let mut entries = vec![0.0; set.m()];
    for i in 1..=n {
        entries[i - 1] = set.pbar(i);
    }
    for (i, j) in pairs(n) {
        entries[pair_slot(n, i, j) - 1] = set.pjoint(i, j);
    }
    LambdaVector { n, entries }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// `P(A_i A_j) > min(P(A_i), P(A_j))`.
    ExceedsUnary {
        pair: (usize, usize),
        joint: f64,
        bound: f64,
    },
    /// `P(A_i A_j) < P(A_i) + P(A_j) - 1`, i.e. `P(Ā_i Ā_j)` would be negative.
    BelowFrechet {
        pair: (usize, usize),
        joint: f64,
        bound: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ExceedsUnary { pair, joint, bound } => write!(
                f,
                "P(A{}A{}) = {joint} exceeds min(P(A{}), P(A{})) = {bound}",
                pair.0, pair.1, pair.0, pair.1
            ),
            Violation::BelowFrechet { pair, joint, bound } => write!(
                f,
                "P(A{}A{}) = {joint} is below P(A{}) + P(A{}) - 1 = {bound}",
                pair.0, pair.1, pair.0, pair.1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub passed: bool,
    pub strict: bool,
    /// Violations that fail the check (strict mode only).
    pub violations: Vec<Violation>,
    /// Violations downgraded to warnings (non-strict mode).
    pub warnings: Vec<Violation>,
}

/// Checks within-context consistency of each pair against its unary
/// marginals. Range and completeness are enforced when the set is built.
pub fn validate(set: &MarginalSet, strict: bool) -> ValidationReport {
    let mut found = Vec::new();
    for (i, j) in pairs(set.n) {
        let joint = set.pjoint(i, j);
        let upper = set.p(i).min(set.p(j));
        if joint > upper + CONSISTENCY_TOL {
            found.push(Violation::ExceedsUnary {
                pair: (i, j),
                joint,
                bound: upper,
            });
        }
        let lower = set.p(i) + set.p(j) - 1.0;
        if joint < lower - CONSISTENCY_TOL {
            found.push(Violation::BelowFrechet {
                pair: (i, j),
                joint,
                bound: lower,
            });
        }
    }
    if strict {
        ValidationReport {
            passed: found.is_empty(),
            strict,
            violations: found,
            warnings: Vec::new(),
        }
    } else {
        ValidationReport {
            passed: true,
            strict,
            violations: Vec::new(),
            warnings: found,
        }
    }
}

/// What a context observed: a single variable or a pair of variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ContextScope {
    Unary(usize),
    Pair(usize, usize),
}

impl ContextScope {
    pub fn arity(&self) -> usize {
        match self {
            ContextScope::Unary(_) => 1,
            ContextScope::Pair(..) => 2,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("observation {index} has {got} values, context expects {expected}")]
    Arity {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("observation {index} holds a non-binary value")]
    NonBinary { index: usize },
    #[error("invalid context scope {0:?}")]
    Scope(ContextScope),
    #[error("incomplete coverage; no observations for: {}", .0.join(", "))]
    IncompleteCoverage(Vec<String>),
    #[error(transparent)]
    Marginal(#[from] MarginalError),
}

/// Binary observations collected in one experimental context.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextSample {
    scope: ContextScope,
    observations: Vec<Vec<u8>>,
}

impl ContextSample {
    pub fn new(scope: ContextScope, observations: Vec<Vec<u8>>) -> Result<Self, EstimateError> {
        match scope {
            ContextScope::Unary(i) if i >= 1 => {}
            ContextScope::Pair(i, j) if i >= 1 && i < j => {}
            _ => return Err(EstimateError::Scope(scope)),
        }
        for (index, obs) in observations.iter().enumerate() {
            if obs.len() != scope.arity() {
                return Err(EstimateError::Arity {
                    index,
                    expected: scope.arity(),
                    got: obs.len(),
                });
            }
            if obs.iter().any(|&v| v > 1) {
                return Err(EstimateError::NonBinary { index });
            }
        }
        Ok(Self {
            scope,
            observations,
        })
    }

    pub fn scope(&self) -> ContextScope {
        self.scope
    }

    pub fn observations(&self) -> &[Vec<u8>] {
        &self.observations
    }

    pub fn count(&self) -> usize {
        self.observations.len()
    }
}

/// Relative-frequency estimates of the marginals, pooling contexts that
/// cover the same event by total count. `n` is the largest variable index.
pub fn estimate_from_contexts(samples: &[ContextSample]) -> Result<MarginalSet, EstimateError> {
    let n = samples
        .iter()
        .map(|s| match s.scope {
            ContextScope::Unary(i) => i,
            ContextScope::Pair(_, j) => j,
        })
        .max()
        .unwrap_or(0);
    if !(MIN_VARIABLES..=MAX_VARIABLES).contains(&n) {
        return Err(MarginalError::VariableCount(n).into());
    }
    // (hits, total) per event
    let mut tallies: BTreeMap<MarginalKey, (usize, usize)> = BTreeMap::new();
    for sample in samples {
        let (key, hits) = match sample.scope {
            ContextScope::Unary(i) => (
                MarginalKey::Complement(i),
                sample.observations.iter().filter(|o| o[0] == 0).count(),
            ),
            ContextScope::Pair(i, j) => (
                MarginalKey::Pair(i, j),
                sample
                    .observations
                    .iter()
                    .filter(|o| o[0] == 1 && o[1] == 1)
                    .count(),
            ),
        };
        let entry = tallies.entry(key).or_default();
        entry.0 += hits;
        entry.1 += sample.count();
    }
    let entries: BTreeMap<MarginalKey, f64> = tallies
        .into_iter()
        .filter(|(_, (_, total))| *total > 0)
        .map(|(k, (hits, total))| (k, hits as f64 / total as f64))
        .collect();
    MarginalSet::from_entries(n, &entries).map_err(|e| match e {
        MarginalError::Missing(keys) => EstimateError::IncompleteCoverage(keys),
        other => other.into(),
    })
}
