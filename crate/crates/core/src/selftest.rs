//! Embedded golden suite: published matrices, both worked instances, and the
//! symmetric conditional-independence instance.

use serde::Serialize;

use crate::classical::bounds3;
use crate::density::DensityOptions;
use crate::event_matrix::{self, EventMatrix, EventMatrixError};
use crate::goldens;
use crate::marginals::{to_lambda, LambdaVector, MarginalSet};
use crate::ranking::{ci_joint, rank_single};

/// Default tolerance on the marginal-restoration residual.
pub const RESIDUAL_TOL: f64 = 1e-9;

pub type Builder = fn(usize) -> Result<EventMatrix, EventMatrixError>;

#[derive(Debug, Clone, Copy)]
pub struct SelftestConfig {
    pub builder: Builder,
    pub residual_tol: f64,
    pub density: DensityOptions,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self {
            builder: event_matrix::build,
            residual_tol: RESIDUAL_TOL,
            density: DensityOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestItem {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub items: Vec<SelftestItem>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn item(&self, name: &str) -> Option<&SelftestItem> {
        self.items.iter().find(|i| i.name == name)
    }

    /// One `PASS`/`FAIL` line per item.
    pub fn render(&self) -> String {
        self.items
            .iter()
            .map(|i| {
                let tag = if i.passed { "PASS" } else { "FAIL" };
                format!("{tag} {:<28} {}\n", i.name, i.detail)
            })
            .collect()
    }
}

fn k_golden(builder: Builder, n: usize, expected: &[&str]) -> (bool, String) {
    match builder(n) {
        Ok(k) => {
            let got: Vec<String> = k.rows().iter().map(|r| r.to_string()).collect();
            let bad: Vec<usize> = got
                .iter()
                .zip(expected)
                .enumerate()
                .filter(|(_, (g, e))| g != *e)
                .map(|(i, _)| i + 1)
                .collect();
            if bad.is_empty() && got.len() == expected.len() {
                (true, format!("{}x{} matches", got.len(), 1 << n))
            } else {
                (false, format!("rows differ: {bad:?}"))
            }
        }
        Err(e) => (false, e.to_string()),
    }
}

fn lambda3(values: [f64; 6]) -> LambdaVector {
    LambdaVector::new(3, values.to_vec()).expect("golden lambda in range")
}

struct Diagonal {
    within: bool,
    worst: f64,
    residual: f64,
    restored: Vec<f64>,
}

fn diagonal(
    config: &SelftestConfig,
    lambda: &LambdaVector,
    printed: &[f64],
) -> Result<Diagonal, String> {
    let k = (config.builder)(3).map_err(|e| e.to_string())?;
    let res = crate::density::build_density_with(&k, lambda, &config.density)
        .map_err(|e| e.to_string())?;
    let worst = res
        .joint
        .iter()
        .zip(printed)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(Diagonal {
        within: worst <= goldens::PRINTED_DIAG_TOL,
        worst,
        residual: res.residual,
        restored: res.restored,
    })
}

pub fn run(config: &SelftestConfig) -> SelftestReport {
    let mut items = Vec::new();
    let mut push = |name, (passed, detail): (bool, String)| {
        items.push(SelftestItem {
            name,
            passed,
            detail,
        })
    };

    push("k_matrix_n3", k_golden(config.builder, 3, &goldens::K3));
    push("k_matrix_n4", k_golden(config.builder, 4, &goldens::K4));

    let ex1 = MarginalSet::new(vec![0.5; 3], vec![0.45, 0.45, 0.1]).expect("valid");
    let lam = to_lambda(&ex1);
    push(
        "lambda_order_n3",
        (
            lam.entries() == goldens::EXAMPLE_ONE_LAMBDA,
            format!("{:?}", lam.entries()),
        ),
    );
    let n4 = MarginalSet::new(
        vec![0.11, 0.12, 0.13, 0.14],
        vec![0.012, 0.013, 0.014, 0.023, 0.024, 0.034],
    )
    .expect("valid");
    let lam4 = to_lambda(&n4);
    let expected4 = [
        0.11, 0.12, 0.13, 0.14, 0.012, 0.013, 0.014, 0.023, 0.024, 0.034,
    ];
    push(
        "lambda_order_n4",
        (lam4.entries() == expected4, format!("{:?}", lam4.entries())),
    );

    let b = bounds3(0.5, 0.5, 0.5, 0.45, 0.45, 0.1);
    push(
        "bounds_violated",
        (
            !b.feasible && (b.ell - 0.4).abs() < 1e-12 && (b.upsilon - 0.1).abs() < 1e-12,
            format!("ell={} upsilon={}", b.ell, b.upsilon),
        ),
    );
    let b = bounds3(0.5, 0.5, 0.5, 0.05, 0.45, 0.1);
    push(
        "bounds_tight",
        (
            b.feasible && (b.ell - 0.05).abs() < 1e-12 && (b.upsilon - 0.05).abs() < 1e-12,
            format!("ell={} upsilon={}", b.ell, b.upsilon),
        ),
    );
    let b = bounds3(0.5, 0.5, 0.5, 0.25, 0.25, 0.25);
    push(
        "bounds_quarter",
        (
            b.feasible && b.ell == 0.0 && b.upsilon == 0.25,
            format!("ell={} upsilon={}", b.ell, b.upsilon),
        ),
    );

    for (diag_name, res_name, lambda, printed) in [
        (
            "example1_diagonal",
            "example1_restoration",
            goldens::EXAMPLE_ONE_LAMBDA,
            goldens::EXAMPLE_ONE_DIAG,
        ),
        (
            "example2_diagonal",
            "example2_restoration",
            goldens::EXAMPLE_TWO_LAMBDA,
            goldens::EXAMPLE_TWO_DIAG,
        ),
    ] {
        match diagonal(config, &lambda3(lambda), &printed) {
            Ok(d) => {
                push(
                    diag_name,
                    (d.within, format!("max deviation {:.2e}", d.worst)),
                );
                let restored_ok = d.residual <= config.residual_tol;
                push(
                    res_name,
                    (
                        restored_ok,
                        format!(
                            "residual {:.2e} (tol {:.0e}), restored {:?}",
                            d.residual,
                            config.residual_tol,
                            d.restored
                                .iter()
                                .map(|x| (x * 1e4).round() / 1e4)
                                .collect::<Vec<_>>()
                        ),
                    ),
                );
            }
            Err(e) => {
                push(diag_name, (false, e.clone()));
                push(res_name, (false, e));
            }
        }
    }

    let quarter = MarginalSet::new(vec![0.5; 3], vec![0.25; 3]).expect("valid");
    let ci = ci_joint(&quarter, 1).map(|ci| rank_single(&ci.distribution));
    push(
        "ci_tie_quarter",
        match ci {
            Ok(r) => (
                r.tie_groups.len() == 1 && r.tie_groups[0].len() == 8,
                format!("{} tie group(s)", r.tie_groups.len()),
            ),
            Err(e) => (false, e.to_string()),
        },
    );

    SelftestReport { items }
}

/// Runs the suite with default settings.
pub fn selftest() -> SelftestReport {
    run(&SelftestConfig::default())
}
