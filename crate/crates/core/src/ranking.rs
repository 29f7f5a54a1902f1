//! Outcome rankings and their comparison.
//!
//! Joint distributions over the `2^n` outcomes come from the quantum
//! probability space, from the conditional-independence approximation, or
//! from a classical reconstruction. Outcomes are ranked by probability or
//! by the likelihood ratio of two hypotheses; the optimal acceptance region
//! at level `α` is the longest prefix of the ratio ranking whose null mass
//! stays within `α`.

use serde::Serialize;
use thiserror::Error;

use crate::marginals::{pairs, MarginalSet};

/// Relative tolerance below which two scores are considered tied.
pub const TIE_TOL: f64 = 1e-12;
/// Tolerance on nonnegativity and unit sum of a distribution.
pub const DISTRIBUTION_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RankingError {
    #[error("distribution has {got} entries, expected a power of two >= 4")]
    Size { got: usize },
    #[error("distribution entry {index} = {value} is negative or non-finite")]
    Negative { index: usize, value: f64 },
    #[error("distribution sums to {0}, not 1")]
    NotNormalized(f64),
    #[error("conditioning variable {0} is deterministic; conditionals undefined")]
    DegenerateConditioning(usize),
    #[error("conditioning variable {0} out of range")]
    BadConditioning(usize),
    #[error("alpha = {0} outside [0, 1]")]
    Alpha(f64),
    #[error("rankings cover different outcome spaces ({0} vs {1})")]
    Mismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Qps,
    Ci,
    Classical,
    External,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    n: usize,
    p: Vec<f64>,
    provenance: Provenance,
}

impl JointDistribution {
    pub fn new(p: Vec<f64>, provenance: Provenance) -> Result<Self, RankingError> {
        let len = p.len();
        if len < 4 || !len.is_power_of_two() {
            return Err(RankingError::Size { got: len });
        }
        for (index, &value) in p.iter().enumerate() {
            if !value.is_finite() || value < -DISTRIBUTION_TOL {
                return Err(RankingError::Negative { index, value });
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(RankingError::NotNormalized(sum));
        }
        Ok(Self {
            n: len.trailing_zeros() as usize,
            p,
            provenance,
        })
    }

    pub fn uniform(n: usize) -> Self {
        let len = 1usize << n;
        Self {
            n,
            p: vec![1.0 / len as f64; len],
            provenance: Provenance::External,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `P(A_i)` under this joint.
    pub fn unary(&self, i: usize) -> f64 {
        let shift = self.n - i;
        self.p
            .iter()
            .enumerate()
            .filter(|(b, _)| b >> shift & 1 == 1)
            .map(|(_, p)| p)
            .sum()
    }

    /// `P(A_i A_j)` under this joint.
    pub fn pairwise(&self, i: usize, j: usize) -> f64 {
        let (si, sj) = (self.n - i, self.n - j);
        self.p
            .iter()
            .enumerate()
            .filter(|(b, _)| b >> si & 1 == 1 && b >> sj & 1 == 1)
            .map(|(_, p)| p)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairDeviation {
    pub pair: (usize, usize),
    pub input: f64,
    pub model: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CiJoint {
    pub distribution: JointDistribution,
    pub conditioning: usize,
    /// Conditionals that fell outside `[0, 1]` and were clamped.
    pub clamp_count: usize,
    /// Pairwise marginals of the joint against the input, every pair.
    pub deviations: Vec<PairDeviation>,
}

/// Joint under conditional independence given variable `c`:
/// `P(b) = P(A_c = b_c) Π_{j≠c} P(A_j = b_j | A_c = b_c)`.
pub fn ci_joint(set: &MarginalSet, conditioning: usize) -> Result<CiJoint, RankingError> {
    let n = set.n();
    let c = conditioning;
    if !(1..=n).contains(&c) {
        return Err(RankingError::BadConditioning(c));
    }
    let pc = set.p(c);
    if pc <= 0.0 || pc >= 1.0 {
        return Err(RankingError::DegenerateConditioning(c));
    }
    let mut clamp_count = 0;
    let mut clamp = |x: f64| {
        if (0.0..=1.0).contains(&x) {
            x
        } else {
            clamp_count += 1;
            x.clamp(0.0, 1.0)
        }
    };
    // given[j] = (P(A_j | Ā_c), P(A_j | A_c))
    let given: Vec<(f64, f64)> = (1..=n)
        .map(|j| {
            if j == c {
                (0.0, 1.0)
            } else {
                let joint = set.pjoint(j, c);
                (clamp((set.p(j) - joint) / (1.0 - pc)), clamp(joint / pc))
            }
        })
        .collect();

    let len = 1usize << n;
    let mut p: Vec<f64> = (0..len)
        .map(|b| {
            let holds = |v: usize| b >> (n - v) & 1 == 1;
            let c_holds = holds(c);
            let mut prob = if c_holds { pc } else { 1.0 - pc };
            for j in (1..=n).filter(|&j| j != c) {
                let q = if c_holds {
                    given[j - 1].1
                } else {
                    given[j - 1].0
                };
                prob *= if holds(j) { q } else { 1.0 - q };
            }
            prob
        })
        .collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    let distribution = JointDistribution::new(p, Provenance::Ci)?;
    let deviations = pairs(n)
        .map(|(i, j)| PairDeviation {
            pair: (i, j),
            input: set.pjoint(i, j),
            model: distribution.pairwise(i, j),
        })
        .collect();
    Ok(CiJoint {
        distribution,
        conditioning: c,
        clamp_count,
        deviations,
    })
}

/// Outcomes ordered by descending score, tied groups in ascending index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ranking {
    pub order: Vec<usize>,
    pub scores: Vec<f64>,
    pub tie_groups: Vec<Vec<usize>>,
}

impl Ranking {
    /// Ranks arbitrary scores; NaN sorts last.
    pub fn from_scores(scores: Vec<f64>) -> Self {
        let key = |s: f64| if s.is_nan() { f64::NEG_INFINITY } else { s };
        let mut idx: Vec<usize> = (0..scores.len()).collect();
        idx.sort_by(|&a, &b| key(scores[b]).total_cmp(&key(scores[a])).then(a.cmp(&b)));
        let tied = |a: f64, b: f64| {
            let (a, b) = (key(a), key(b));
            a == b
                || (a.is_finite()
                    && b.is_finite()
                    && (a - b).abs() <= TIE_TOL * a.abs().max(b.abs()))
        };
        let mut tie_groups: Vec<Vec<usize>> = Vec::new();
        for &o in &idx {
            match tie_groups.last_mut() {
                Some(g) if tied(scores[*g.last().unwrap()], scores[o]) => g.push(o),
                _ => tie_groups.push(vec![o]),
            }
        }
        for g in &mut tie_groups {
            g.sort_unstable();
        }
        let order = tie_groups.iter().flatten().copied().collect();
        Self {
            order,
            scores,
            tie_groups,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// 1-based position of an outcome in `order`.
    pub fn position(&self, outcome: usize) -> usize {
        self.order.iter().position(|&o| o == outcome).unwrap() + 1
    }

    /// Index of the tie group holding each outcome.
    pub fn group_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.order.len()];
        for (g, members) in self.tie_groups.iter().enumerate() {
            for &o in members {
                out[o] = g;
            }
        }
        out
    }
}

/// Outcomes by descending probability.
pub fn rank_single(dist: &JointDistribution) -> Ranking {
    Ranking::from_scores(dist.probabilities().to_vec())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NplDecision {
    pub ranking: Ranking,
    /// Accepted outcomes in ranking order.
    pub region: Vec<usize>,
    /// `P_0` mass of the region.
    pub size: f64,
    /// `P_1` mass of the region.
    pub power: f64,
}

/// Likelihood-ratio ranking of `p1` against `p0` and the largest ranking
/// prefix with `P_0` mass at most `alpha`.
pub fn rank_npl(
    p1: &JointDistribution,
    p0: &JointDistribution,
    alpha: f64,
) -> Result<NplDecision, RankingError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(RankingError::Alpha(alpha));
    }
    let (a, b) = (p1.probabilities(), p0.probabilities());
    if a.len() != b.len() {
        return Err(RankingError::Mismatch(a.len(), b.len()));
    }
    let scores = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| match (x > 0.0, y > 0.0) {
            (_, true) => x / y,
            (true, false) => f64::INFINITY,
            (false, false) => f64::NEG_INFINITY,
        })
        .collect();
    let ranking = Ranking::from_scores(scores);
    let mut region = Vec::new();
    let (mut size, mut power) = (0.0, 0.0);
    for &o in &ranking.order {
        if size + b[o] > alpha + DISTRIBUTION_TOL {
            break;
        }
        size += b[o];
        power += a[o];
        region.push(o);
    }
    Ok(NplDecision {
        ranking,
        region,
        size,
        power,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    /// Kendall distance with ties: discordant pairs count 1, pairs tied in
    /// exactly one ranking count 1/2.
    pub kendall_tau: f64,
    pub top1_agree: bool,
    /// `|top_k(a) ∩ top_k(b)|` for `k = 1..=N`.
    pub top_k_overlap: Vec<usize>,
    /// 1-based positions of the all-ones outcome in `a` and `b`.
    pub focal_event_positions: (usize, usize),
    pub tie_groups: (Vec<Vec<usize>>, Vec<Vec<usize>>),
}

pub fn compare_rankings(a: &Ranking, b: &Ranking) -> Result<ComparisonReport, RankingError> {
    if a.len() != b.len() {
        return Err(RankingError::Mismatch(a.len(), b.len()));
    }
    let len = a.len();
    let (ga, gb) = (a.group_of(), b.group_of());
    let mut kendall_tau = 0.0;
    for x in 0..len {
        for y in x + 1..len {
            let ra = ga[x].cmp(&ga[y]);
            let rb = gb[x].cmp(&gb[y]);
            use std::cmp::Ordering::Equal;
            kendall_tau += match (ra, rb) {
                (Equal, Equal) => 0.0,
                (Equal, _) | (_, Equal) => 0.5,
                (p, q) if p != q => 1.0,
                _ => 0.0,
            };
        }
    }
    let mut seen_a = vec![false; len];
    let mut seen_b = vec![false; len];
    let mut overlap = 0;
    let mut top_k_overlap = Vec::with_capacity(len);
    for k in 0..len {
        let (x, y) = (a.order[k], b.order[k]);
        seen_a[x] = true;
        if seen_b[x] {
            overlap += 1;
        }
        seen_b[y] = true;
        if seen_a[y] {
            overlap += 1;
        }
        top_k_overlap.push(overlap);
    }
    let focal = len.saturating_sub(1);
    Ok(ComparisonReport {
        kendall_tau,
        top1_agree: len > 0 && a.order[0] == b.order[0],
        top_k_overlap,
        focal_event_positions: (a.position(focal), b.position(focal)),
        tie_groups: (a.tie_groups.clone(), b.tie_groups.clone()),
    })
}
