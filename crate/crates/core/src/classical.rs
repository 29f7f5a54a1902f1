//! Classical (set-based) representability of pairwise marginals.
//!
//! For three variables, a single Kolmogorov space exists only if the
//! triple probability `t = P(A_1 A_2 A_3)` can be chosen with
//! `ℓ ≤ t ≤ υ`. For general `n` the bounds are applied to every triple,
//! which is a necessary condition only.

use serde::Serialize;

use crate::marginals::MarginalSet;

/// Slack on `ℓ ≤ υ` when deciding feasibility.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Unary `P(A_i)` and pairwise `P(A_i A_j)` probabilities of one triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleMarginals {
    pub variables: (usize, usize, usize),
    /// `P(A_1), P(A_2), P(A_3)`
    pub p: [f64; 3],
    /// `P(A_1A_2), P(A_1A_3), P(A_2A_3)`
    pub pair: [f64; 3],
}

impl TripleMarginals {
    pub fn new(p: [f64; 3], pair: [f64; 3]) -> Self {
        Self {
            variables: (1, 2, 3),
            p,
            pair,
        }
    }

    /// View of variables `(i, j, k)` of a set, converting `P(Ā)` to `P(A)`.
    pub fn from_set(set: &MarginalSet, i: usize, j: usize, k: usize) -> Self {
        Self {
            variables: (i, j, k),
            p: [set.p(i), set.p(j), set.p(k)],
            pair: [set.pjoint(i, j), set.pjoint(i, k), set.pjoint(j, k)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripleBounds {
    pub triple: (usize, usize, usize),
    pub ell: f64,
    pub upsilon: f64,
    pub feasible: bool,
}

/// Lower and upper bounds on `P(A_1 A_2 A_3)`.
pub fn bounds3(p1: f64, p2: f64, p3: f64, p12: f64, p13: f64, p23: f64) -> TripleBounds {
    bounds_for(&TripleMarginals::new([p1, p2, p3], [p12, p13, p23]))
}

pub fn bounds_for(t: &TripleMarginals) -> TripleBounds {
    let [p1, p2, p3] = t.p;
    let [p12, p13, p23] = t.pair;
    let ell = 0.0_f64
        .max(p12 + p13 - p1)
        .max(p12 + p23 - p2)
        .max(p13 + p23 - p3);
    let upsilon = p12
        .min(p13)
        .min(p23)
        .min(1.0 - (p1 + p2 + p3 - p12 - p13 - p23));
    TripleBounds {
        triple: t.variables,
        ell,
        upsilon,
        feasible: ell <= upsilon + FEASIBILITY_TOL,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Fewer than three variables.
    NoTriples,
    /// Every triple passes; necessary but not sufficient for a global space.
    AllTriplesFeasible,
    /// Some triple fails, so no single classical space exists.
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub triples: Vec<TripleBounds>,
    pub verdict: Verdict,
    /// Exact interval for `t` when `n = 3` (`None` inside means empty).
    pub oracle_interval: Option<Option<(f64, f64)>>,
}

impl FeasibilityReport {
    pub fn infeasible_triples(&self) -> impl Iterator<Item = &TripleBounds> {
        self.triples.iter().filter(|b| !b.feasible)
    }
}

/// Applies the triple bounds to every `(i, j, k)`, `i < j < k`.
pub fn test_all_triples(set: &MarginalSet) -> FeasibilityReport {
    let n = set.n();
    let mut triples = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                triples.push(bounds_for(&TripleMarginals::from_set(set, i, j, k)));
            }
        }
    }
    let verdict = if triples.is_empty() {
        Verdict::NoTriples
    } else if triples.iter().all(|b| b.feasible) {
        Verdict::AllTriplesFeasible
    } else {
        Verdict::Infeasible
    };
    let oracle_interval =
        (n == 3).then(|| oracle_interval(&TripleMarginals::from_set(set, 1, 2, 3)));
    FeasibilityReport {
        triples,
        verdict,
        oracle_interval,
    }
}

/// The eight outcome probabilities of a triple as affine forms `a + s·t`,
/// indexed by `b_1 b_2 b_3` (bit set = variable holds).
fn affine_forms(t: &TripleMarginals) -> [(f64, f64); 8] {
    let [p1, p2, p3] = t.p;
    let [p12, p13, p23] = t.pair;
    [
        (1.0 - p1 - p2 - p3 + p12 + p13 + p23, -1.0), // ¬1 ¬2 ¬3
        (p3 - p13 - p23, 1.0),                        // ¬1 ¬2 3
        (p2 - p12 - p23, 1.0),                        // ¬1 2 ¬3
        (p23, -1.0),                                  // ¬1 2 3
        (p1 - p12 - p13, 1.0),                        // 1 ¬2 ¬3
        (p13, -1.0),                                  // 1 ¬2 3
        (p12, -1.0),                                  // 1 2 ¬3
        (0.0, 1.0),                                   // 1 2 3
    ]
}

/// A joint over `{0,1}^3` reconstructed from a triple and a choice of `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalJoint {
    pub n: usize,
    pub probabilities: Vec<f64>,
    /// `P(A_1 A_2 A_3)`
    pub t: f64,
    /// All entries nonnegative (within tolerance).
    pub valid: bool,
}

/// Inclusion–exclusion reconstruction; entries are returned unclamped.
pub fn joint_from_t(triple: &TripleMarginals, t: f64) -> ClassicalJoint {
    let probabilities: Vec<f64> = affine_forms(triple)
        .iter()
        .map(|(a, s)| a + s * t)
        .collect();
    let valid = probabilities.iter().all(|&p| p >= -FEASIBILITY_TOL);
    ClassicalJoint {
        n: 3,
        probabilities,
        t,
        valid,
    }
}

/// Intersects the eight half-lines `a + s·t ≥ 0`. `None` when empty.
pub fn oracle_interval(triple: &TripleMarginals) -> Option<(f64, f64)> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (a, s) in affine_forms(triple) {
        if s > 0.0 {
            lo = lo.max(-a);
        } else {
            hi = hi.min(a);
        }
    }
    (lo <= hi + FEASIBILITY_TOL).then_some((lo, hi))
}
