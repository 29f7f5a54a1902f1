//! Command-line driver: ingest marginals, run the requested analyses and
//! produce a single JSON report.
//!
//! Exit codes: 0 success, 1 file or parse error, 2 validation or schema
//! error, 3 degenerate instance.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::classical::{joint_from_t, test_all_triples, TripleMarginals, Verdict};
use crate::density::{
    build_density_with, diag_fast_with, DensityError, DensityOptions, DensityResult,
};
use crate::event_matrix::{build, OutcomeIndex, MAX_DENSE_VARIABLES};
use crate::io::{load, InputFormat, Instance};
use crate::marginals::{marginal_count, to_lambda, validate, MarginalKey};
use crate::ranking::{
    ci_joint, compare_rankings, rank_npl, rank_single, ComparisonReport, JointDistribution,
    Provenance, Ranking, RankingError,
};
use crate::report::*;
use crate::selftest::{self, SelftestConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Feasibility,
    Density,
    Ranking,
    All,
}

/// Quantum probability spaces from pairwise marginals of binary variables.
#[derive(Debug, Clone, Parser)]
#[command(name = "qps", version)]
pub struct RunConfig {
    /// Input file (json/csv) or context CSV files / directories (contexts).
    #[arg(long, required_unless_present = "selftest")]
    pub input: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: InputFormat,
    #[arg(long, value_enum, default_value = "all")]
    pub mode: Mode,
    /// Include the dense density matrix in the report (n <= 10).
    #[arg(long)]
    pub emit_rho: bool,
    /// Conditioning variable for the conditional-independence joint.
    #[arg(long, default_value_t = 1)]
    pub conditioning: usize,
    /// Size bound of the likelihood-ratio acceptance region.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Decimal places for real numbers in the report.
    #[arg(long, default_value_t = 10)]
    pub precision: usize,
    /// Relative cut for treating singular values as zero.
    #[arg(long)]
    pub tol_rank: Option<f64>,
    /// Tolerance on the restoration residual used by the self-test.
    #[arg(long, default_value_t = selftest::RESIDUAL_TOL)]
    pub tol_residual: f64,
    /// Treat within-context inconsistencies as errors.
    #[arg(long)]
    pub strict: bool,
    /// Run the embedded golden suite instead of processing input.
    #[arg(long)]
    pub selftest: bool,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Result of a run: the exit code plus either the report or a diagnostic.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            stdout: String::new(),
            stderr: message.into(),
        }
    }
}

impl RunConfig {
    fn check(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(format!("alpha = {} outside [0, 1]", self.alpha));
        }
        if !(1..=17).contains(&self.precision) {
            return Err(format!("precision = {} outside [1, 17]", self.precision));
        }
        if let Some(t) = self.tol_rank {
            if !(t.is_finite() && t >= 0.0) {
                return Err(format!("tol-rank = {t} must be a nonnegative number"));
            }
        }
        Ok(())
    }

    fn density_options(&self) -> DensityOptions {
        DensityOptions {
            rank_tol: self.tol_rank,
            ..DensityOptions::default()
        }
    }
}

pub fn run(config: &RunConfig) -> Outcome {
    if let Err(e) = config.check() {
        return Outcome::fail(EXIT_VALIDATION, e);
    }
    if config.selftest {
        let report = selftest::run(&SelftestConfig {
            residual_tol: config.tol_residual,
            density: config.density_options(),
            ..SelftestConfig::default()
        });
        let code = if report.passed() {
            EXIT_OK
        } else {
            EXIT_VALIDATION
        };
        return Outcome {
            code,
            stdout: report.render(),
            stderr: String::new(),
        };
    }
    let instance = match load(&config.input, config.format) {
        Ok(i) => i,
        Err(e) if e.is_parse_error() => return Outcome::fail(EXIT_PARSE, e.to_string()),
        Err(e) => return Outcome::fail(EXIT_VALIDATION, e.to_string()),
    };
    match analyze(&instance, config) {
        Ok(report) => match serde_json::to_string_pretty(&report) {
            Ok(text) => Outcome::ok(text + "\n"),
            Err(e) => Outcome::fail(EXIT_PARSE, e.to_string()),
        },
        Err(failure) => failure,
    }
}

fn format_name(f: InputFormat) -> &'static str {
    match f {
        InputFormat::Json => "json",
        InputFormat::Csv => "csv",
        InputFormat::Contexts => "contexts",
    }
}

fn event_label(key: MarginalKey) -> String {
    match key {
        MarginalKey::Complement(i) => format!("not A{i}"),
        MarginalKey::Pair(i, j) => format!("A{i} A{j}"),
    }
}

fn density_failure(e: DensityError) -> Outcome {
    match e {
        DensityError::Degenerate(_) => Outcome::fail(EXIT_DEGENERATE, e.to_string()),
        _ => Outcome::fail(EXIT_VALIDATION, e.to_string()),
    }
}

fn ranking_failure(e: RankingError) -> Outcome {
    match e {
        RankingError::DegenerateConditioning(_) => Outcome::fail(EXIT_DEGENERATE, e.to_string()),
        _ => Outcome::fail(EXIT_VALIDATION, e.to_string()),
    }
}

/// Runs the pipeline on a parsed instance.
pub fn analyze(instance: &Instance, config: &RunConfig) -> Result<Report, Outcome> {
    let set = &instance.set;
    let n = set.n();
    let places = config.precision;
    let dec = |v: f64| Decimal::new(v, places);
    if config.emit_rho && n > MAX_DENSE_VARIABLES {
        return Err(Outcome::fail(
            EXIT_VALIDATION,
            format!("--emit-rho requires n <= {MAX_DENSE_VARIABLES}, got n = {n}"),
        ));
    }
    if !(1..=n).contains(&config.conditioning) {
        return Err(Outcome::fail(
            EXIT_VALIDATION,
            format!(
                "conditioning variable {} outside 1..={n}",
                config.conditioning
            ),
        ));
    }

    let validation = validate(set, config.strict);
    let input = InputEcho {
        n,
        format: format_name(config.format),
        marginals: set
            .keys()
            .into_iter()
            .map(|k| MarginalEcho {
                event: event_label(k),
                value: dec(set.get(k)),
                exact: instance.exact.get(&k).cloned(),
            })
            .collect(),
    };
    let validation_section = ValidationSection {
        strict: validation.strict,
        passed: validation.passed,
        violations: validation
            .violations
            .iter()
            .map(|v| v.to_string())
            .collect(),
        warnings: validation.warnings.iter().map(|v| v.to_string()).collect(),
    };
    if !validation.passed {
        return Err(Outcome::fail(
            EXIT_VALIDATION,
            format!(
                "strict validation failed: {}",
                validation_section.violations.join("; ")
            ),
        ));
    }

    let want = |m: Mode| config.mode == Mode::All || config.mode == m;

    let feasibility = want(Mode::Feasibility).then(|| {
        let rep = test_all_triples(set);
        FeasibilitySection {
            check: "necessary-condition check (triple-wise bounds)",
            verdict: rep.verdict,
            triples: rep
                .triples
                .iter()
                .map(|b| TripleEcho {
                    triple: [b.triple.0, b.triple.1, b.triple.2],
                    ell: dec(b.ell),
                    upsilon: dec(b.upsilon),
                    feasible: b.feasible,
                })
                .collect(),
            oracle_interval: rep.oracle_interval.map(|iv| match iv {
                Some((lo, hi)) => IntervalEcho::Interval([dec(lo), dec(hi)]),
                None => IntervalEcho::Empty("empty"),
            }),
        }
    });

    let needs_density = want(Mode::Density) || want(Mode::Ranking);
    let density = if needs_density {
        let k = build(n).map_err(|e| Outcome::fail(EXIT_VALIDATION, e.to_string()))?;
        let lambda = to_lambda(set);
        let options = config.density_options();
        let result = if config.emit_rho {
            build_density_with(&k, &lambda, &options)
        } else {
            diag_fast_with(&k, &lambda, &options)
        }
        .map_err(density_failure)?;
        Some(result)
    } else {
        None
    };

    let density_section = match (&density, want(Mode::Density)) {
        (Some(res), true) => Some(density_echo(res, set.keys(), config)),
        _ => None,
    };

    let ranking = match (&density, want(Mode::Ranking)) {
        (Some(res), true) => Some(ranking_echo(set, res, config)?),
        _ => None,
    };

    Ok(Report {
        schema: SCHEMA,
        input,
        validation: validation_section,
        feasibility,
        density: density_section,
        ranking,
    })
}

fn outcome_label(n: usize, b: usize) -> String {
    OutcomeIndex::new(n, b).bits()
}

fn density_echo(res: &DensityResult, keys: Vec<MarginalKey>, config: &RunConfig) -> DensitySection {
    let places = config.precision;
    let dec = |v: f64| Decimal::new(v, places);
    debug_assert_eq!(keys.len(), marginal_count(res.n));
    DensitySection {
        path: match res.path {
            crate::density::DensityPath::Spectral => "spectral",
            crate::density::DensityPath::Fast => "fast",
        },
        effective_rank: res.effective_rank,
        trace_r: dec(res.trace_r),
        joint: res
            .joint
            .iter()
            .zip(&res.diag_r)
            .enumerate()
            .map(|(b, (&p, &d))| OutcomeEcho {
                outcome: outcome_label(res.n, b),
                p: dec(p),
                diag_r: dec(d),
            })
            .collect(),
        restored: keys
            .into_iter()
            .enumerate()
            .map(|(i, k)| RestoredEcho {
                event: event_label(k),
                lambda: dec(res.lambda[i]),
                restored_r: dec(res.restored[i]),
                restored_rho: dec(res.restored_rho[i]),
            })
            .collect(),
        residual: dec(res.residual),
        rho_residual: dec(res.rho_residual()),
        rho: if config.emit_rho {
            res.rho().map(|rho| {
                rho.row_iter()
                    .map(|row| row.iter().map(|&v| dec(v)).collect())
                    .collect()
            })
        } else {
            None
        },
    }
}

fn ranking_view(n: usize, r: &Ranking, places: usize) -> RankingEcho {
    RankingEcho {
        order: r.order.iter().map(|&b| outcome_label(n, b)).collect(),
        scores: r
            .order
            .iter()
            .map(|&b| Decimal::new(r.scores[b], places))
            .collect(),
        tie_groups: groups_view(n, &r.tie_groups),
    }
}

fn groups_view(n: usize, groups: &[Vec<usize>]) -> Vec<Vec<String>> {
    groups
        .iter()
        .map(|g| g.iter().map(|&b| outcome_label(n, b)).collect())
        .collect()
}

fn comparison_view(
    n: usize,
    left: &'static str,
    right: &'static str,
    c: &ComparisonReport,
    places: usize,
) -> ComparisonEcho {
    ComparisonEcho {
        left,
        right,
        kendall_tau: Decimal::new(c.kendall_tau, places),
        top1_agree: c.top1_agree,
        top_k_overlap: c.top_k_overlap.clone(),
        focal_event: outcome_label(n, (1 << n) - 1),
        focal_event_positions: [c.focal_event_positions.0, c.focal_event_positions.1],
        tie_groups: [
            groups_view(n, &c.tie_groups.0),
            groups_view(n, &c.tie_groups.1),
        ],
    }
}

fn ranking_echo(
    set: &crate::marginals::MarginalSet,
    res: &DensityResult,
    config: &RunConfig,
) -> Result<RankingSection, Outcome> {
    let n = set.n();
    let places = config.precision;
    let dec = |v: f64| Decimal::new(v, places);
    let qps = JointDistribution::new(res.joint.clone(), Provenance::Qps)
        .map_err(|e| Outcome::fail(EXIT_DEGENERATE, e.to_string()))?;
    let qps_rank = rank_single(&qps);
    let ci = ci_joint(set, config.conditioning).map_err(ranking_failure)?;
    let ci_rank = rank_single(&ci.distribution);
    let comparison = compare_rankings(&qps_rank, &ci_rank).map_err(ranking_failure)?;
    let npl = rank_npl(&qps, &ci.distribution, config.alpha).map_err(ranking_failure)?;

    let mut classical = Vec::new();
    if n == 3 {
        let triple = TripleMarginals::from_set(set, 1, 2, 3);
        let report = test_all_triples(set);
        if report.verdict == Verdict::AllTriplesFeasible {
            let b = report.triples[0];
            let mut ts = vec![b.ell, 0.5 * (b.ell + b.upsilon), b.upsilon];
            ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);
            for t in ts {
                let joint = joint_from_t(&triple, t);
                let clamped: Vec<f64> = joint.probabilities.iter().map(|p| p.max(0.0)).collect();
                let total: f64 = clamped.iter().sum();
                let normalized = clamped.iter().map(|p| p / total).collect();
                let dist = JointDistribution::new(normalized, Provenance::Classical)
                    .map_err(|e| Outcome::fail(EXIT_DEGENERATE, e.to_string()))?;
                let r = rank_single(&dist);
                let cmp = compare_rankings(&qps_rank, &r).map_err(ranking_failure)?;
                classical.push(ClassicalEcho {
                    t: dec(t),
                    joint: decimals(&joint.probabilities, places),
                    ranking: ranking_view(n, &r, places),
                    comparison_with_qps: comparison_view(n, "qps", "classical", &cmp, places),
                });
            }
        }
    }

    Ok(RankingSection {
        qps: ranking_view(n, &qps_rank, places),
        ci: CiEcho {
            conditioning: ci.conditioning,
            clamp_count: ci.clamp_count,
            joint: decimals(ci.distribution.probabilities(), places),
            pair_deviations: ci
                .deviations
                .iter()
                .map(|d| PairDeviationEcho {
                    pair: [d.pair.0, d.pair.1],
                    input: dec(d.input),
                    model: dec(d.model),
                })
                .collect(),
            ranking: ranking_view(n, &ci_rank, places),
        },
        comparison: comparison_view(n, "qps", "ci", &comparison, places),
        npl: NplEcho {
            alternative: "qps",
            null: "ci",
            alpha: dec(config.alpha),
            region: npl.region.iter().map(|&b| outcome_label(n, b)).collect(),
            size: dec(npl.size),
            power: dec(npl.power),
            ranking: ranking_view(n, &npl.ranking, places),
        },
        classical,
    })
}
