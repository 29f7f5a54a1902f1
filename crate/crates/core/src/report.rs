//! The JSON run report (`qps-report/1`).
//!
//! Field order is fixed by the struct definitions and every real number is
//! printed with the configured number of decimals, so identical inputs give
//! byte-identical reports.

use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

pub const SCHEMA: &str = "qps-report/1";

/// A real printed with a fixed number of decimals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decimal {
    pub value: f64,
    pub places: usize,
}

impl Decimal {
    pub fn new(value: f64, places: usize) -> Self {
        Self { value, places }
    }
}

pub fn format_decimal(value: f64, places: usize) -> String {
    if value.is_nan() {
        return "nan".into();
    }
    if value.is_infinite() {
        return if value > 0.0 { "inf" } else { "-inf" }.into();
    }
    let text = format!("{value:.places$}");
    match text.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => text,
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let text = format_decimal(self.value, self.places);
        if !self.value.is_finite() {
            return serializer.serialize_str(&text);
        }
        RawValue::from_string(text)
            .map_err(S::Error::custom)?
            .serialize(serializer)
    }
}

pub fn decimals(values: &[f64], places: usize) -> Vec<Decimal> {
    values.iter().map(|&v| Decimal::new(v, places)).collect()
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub input: InputEcho,
    pub validation: ValidationSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feasibility: Option<FeasibilitySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<DensitySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ranking: Option<RankingSection>,
}

#[derive(Debug, Serialize)]
pub struct InputEcho {
    pub n: usize,
    pub format: &'static str,
    pub marginals: Vec<MarginalEcho>,
}

#[derive(Debug, Serialize)]
pub struct MarginalEcho {
    pub event: String,
    pub value: Decimal,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct ValidationSection {
    pub strict: bool,
    pub passed: bool,
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct FeasibilitySection {
    pub check: &'static str,
    pub verdict: crate::classical::Verdict,
    pub triples: Vec<TripleEcho>,
    /// `[lo, hi]`, the string `"empty"`, or absent when `n != 3`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_interval: Option<IntervalEcho>,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum IntervalEcho {
    Interval([Decimal; 2]),
    Empty(&'static str),
}

#[derive(Debug, Serialize)]
pub struct TripleEcho {
    pub triple: [usize; 3],
    pub ell: Decimal,
    pub upsilon: Decimal,
    pub feasible: bool,
}

#[derive(Debug, Serialize)]
pub struct DensitySection {
    pub path: &'static str,
    pub effective_rank: usize,
    pub trace_r: Decimal,
    pub joint: Vec<OutcomeEcho>,
    pub restored: Vec<RestoredEcho>,
    pub residual: Decimal,
    pub rho_residual: Decimal,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<Vec<Decimal>>>,
}

#[derive(Debug, Serialize)]
pub struct OutcomeEcho {
    pub outcome: String,
    pub p: Decimal,
    pub diag_r: Decimal,
}

#[derive(Debug, Serialize)]
pub struct RestoredEcho {
    pub event: String,
    pub lambda: Decimal,
    pub restored_r: Decimal,
    pub restored_rho: Decimal,
}

#[derive(Debug, Serialize)]
pub struct RankingEcho {
    pub order: Vec<String>,
    pub scores: Vec<Decimal>,
    pub tie_groups: Vec<Vec<String>>,
}

#[derive(Debug, Serialize)]
pub struct ComparisonEcho {
    pub left: &'static str,
    pub right: &'static str,
    pub kendall_tau: Decimal,
    pub top1_agree: bool,
    pub top_k_overlap: Vec<usize>,
    pub focal_event: String,
    pub focal_event_positions: [usize; 2],
    pub tie_groups: [Vec<Vec<String>>; 2],
}

#[derive(Debug, Serialize)]
pub struct CiEcho {
    pub conditioning: usize,
    pub clamp_count: usize,
    pub joint: Vec<Decimal>,
    pub pair_deviations: Vec<PairDeviationEcho>,
    pub ranking: RankingEcho,
}

#[derive(Debug, Serialize)]
pub struct PairDeviationEcho {
    pub pair: [usize; 2],
    pub input: Decimal,
    pub model: Decimal,
}

#[derive(Debug, Serialize)]
pub struct NplEcho {
    pub alternative: &'static str,
    pub null: &'static str,
    pub alpha: Decimal,
    pub region: Vec<String>,
    pub size: Decimal,
    pub power: Decimal,
    pub ranking: RankingEcho,
}

#[derive(Debug, Serialize)]
pub struct ClassicalEcho {
    pub t: Decimal,
    pub joint: Vec<Decimal>,
    pub ranking: RankingEcho,
    pub comparison_with_qps: ComparisonEcho,
}

#[derive(Debug, Serialize)]
pub struct RankingSection {
    pub qps: RankingEcho,
    pub ci: CiEcho,
    pub comparison: ComparisonEcho,
    pub npl: NplEcho,
    /// Classical joints at the ends and middle of the feasible interval (`n = 3`).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub classical: Vec<ClassicalEcho>,
}
