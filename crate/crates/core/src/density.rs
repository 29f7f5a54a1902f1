//! Construction of the quantum probability space.
//!
//! Given `K` and the marginals `Λ`, the matrix
//! `R = U Σ⁺ U' K' Λ K U Σ⁺ U'` (with `J = K'K = U Σ U'`) solves
//! `K R K' = Λ` in the minimum-norm sense, and `ρ = R / tr(R)` is the
//! density matrix whose diagonal is the joint distribution over outcomes.
//!
//! Writing `W = U Σ⁺ U' K'` gives `R = W Λ W'`, so `diag(R)_b = Σ_i W[b,i]² λ_i`.
//! Since `W = (K'K)⁺ K' = K⁺`, it can also be obtained from the small
//! `m × m` Gram matrix `K K'` without ever forming `J`; that is the fast
//! path used for large `n`.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::event_matrix::{EventMatrix, SparseRow, MAX_DENSE_VARIABLES};
use crate::marginals::LambdaVector;
use crate::spectral::{self, SpectralError, SweepOrder};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("dimension mismatch: K has {k_rows} rows for n = {k_n}, Λ has {lambda_len} entries for n = {lambda_n}")]
    DimensionMismatch {
        k_n: usize,
        k_rows: usize,
        lambda_n: usize,
        lambda_len: usize,
    },
    #[error("degenerate instance: tr(R) = {0:e}, density matrix undefined")]
    Degenerate(f64),
    #[error("dense R requested for n = {0} (limit {MAX_DENSE_VARIABLES})")]
    TooLargeForDense(usize),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Knobs for the numeric engine.
#[derive(Debug, Clone, Copy, Default)]
pub struct DensityOptions {
    /// Relative cut for `Σ⁺`; defaults to `dim · ε` (the numerical-rank rule).
    pub rank_tol: Option<f64>,
    pub sweep_order: SweepOrder,
}

/// Which route produced a [`DensityResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityPath {
    /// Eigendecomposition of the full `N × N` matrix `J`; dense `R` available.
    Spectral,
    /// Gram-matrix route; only `diag(R)` and quadratic forms.
    Fast,
}

/// `W = U Σ⁺ U' K'`, an `N × m` matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    outcomes: usize,
    m: usize,
    data: Vec<f64>,
}

impl WeightMatrix {
    fn from_dense(w: &DMatrix<f64>) -> Self {
        let (outcomes, m) = w.shape();
        let mut data = Vec::with_capacity(outcomes * m);
        for b in 0..outcomes {
            data.extend(w.row(b).iter());
        }
        Self { outcomes, m, data }
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn row(&self, b: usize) -> &[f64] {
        &self.data[b * self.m..(b + 1) * self.m]
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.outcomes, self.m, &self.data)
    }

    /// `Σ_{b ∈ x} W[b, ·]`, i.e. `x' W` for an indicator row `x`.
    fn project(&self, x: &SparseRow) -> Vec<f64> {
        let mut acc = vec![0.0; self.m];
        for &b in x.cols() {
            for (a, w) in acc.iter_mut().zip(self.row(b)) {
                *a += w;
            }
        }
        acc
    }

    /// `x' R x = Σ_i λ_i (x' W)_i²`.
    pub fn quadratic_form(&self, x: &SparseRow, lambda: &[f64]) -> f64 {
        self.project(x)
            .iter()
            .zip(lambda)
            .map(|(p, l)| p * p * l)
            .sum()
    }

    /// `diag(R)_b = Σ_i W[b,i]² λ_i`.
    pub fn diag(&self, lambda: &[f64]) -> Vec<f64> {
        (0..self.outcomes)
            .map(|b| self.row(b).iter().zip(lambda).map(|(w, l)| w * w * l).sum())
            .collect()
    }
}

/// The constructed space and its diagnostics.
#[derive(Debug, Clone)]
pub struct DensityResult {
    pub n: usize,
    pub lambda: Vec<f64>,
    pub weights: WeightMatrix,
    /// Dense `R`, present on the spectral path.
    pub r: Option<DMatrix<f64>>,
    /// Unnormalized `diag(R)`.
    pub diag_r: Vec<f64>,
    pub trace_r: f64,
    /// `diag(ρ)`: the joint distribution over the `2^n` outcomes.
    pub joint: Vec<f64>,
    /// `K[i] R K[i]'` for each row of `K`.
    pub restored: Vec<f64>,
    /// `K[i] ρ K[i]' = restored / tr(R)`.
    pub restored_rho: Vec<f64>,
    /// `max_i |K[i] R K[i]' - λ_i|`.
    pub residual: f64,
    /// Numerical rank of `K` seen by the engine.
    pub effective_rank: usize,
    pub path: DensityPath,
}

impl DensityResult {
    /// `ρ = R / tr(R)` when the dense matrix is available.
    pub fn rho(&self) -> Option<DMatrix<f64>> {
        self.r.as_ref().map(|r| r / self.trace_r)
    }

    /// `x' R x` for an indicator row.
    pub fn quadratic_form(&self, x: &SparseRow) -> f64 {
        self.weights.quadratic_form(x, &self.lambda)
    }

    /// `x' ρ x` for an indicator row.
    pub fn rho_quadratic_form(&self, x: &SparseRow) -> f64 {
        self.quadratic_form(x) / self.trace_r
    }

    /// Largest deviation of `K[i] ρ K[i]'` from `λ_i`.
    pub fn rho_residual(&self) -> f64 {
        max_abs_diff(&self.restored_rho, &self.lambda)
    }

    /// Smallest eigenvalue of the dense `R`.
    pub fn min_eigenvalue(&self) -> Result<f64, DensityError> {
        let r = self
            .r
            .as_ref()
            .ok_or(DensityError::TooLargeForDense(self.n))?;
        let e = spectral::eig_sym(r)?;
        Ok(e.values.last().copied().unwrap_or(0.0))
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

fn check_dims(k: &EventMatrix, lambda: &LambdaVector) -> Result<(), DensityError> {
    if k.n() != lambda.n() || k.m() != lambda.len() {
        return Err(DensityError::DimensionMismatch {
            k_n: k.n(),
            k_rows: k.m(),
            lambda_n: lambda.n(),
            lambda_len: lambda.len(),
        });
    }
    Ok(())
}

fn dense_k(k: &EventMatrix) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(k.m(), k.width());
    for (i, row) in k.rows().iter().enumerate() {
        for &c in row.cols() {
            out[(i, c)] = 1.0;
        }
    }
    out
}

/// Builds the density matrix. For `n ≤ 10` this follows the spectral route
/// through `J = K'K` and materializes `R`; above that it defers to
/// [`diag_fast`].
pub fn build_density(
    k: &EventMatrix,
    lambda: &LambdaVector,
) -> Result<DensityResult, DensityError> {
    build_density_with(k, lambda, &DensityOptions::default())
}

pub fn build_density_with(
    k: &EventMatrix,
    lambda: &LambdaVector,
    options: &DensityOptions,
) -> Result<DensityResult, DensityError> {
    check_dims(k, lambda)?;
    if k.n() > MAX_DENSE_VARIABLES {
        return diag_fast_with(k, lambda, options);
    }
    let lam = lambda.entries();
    let kd = dense_k(k);
    let j = kd.transpose() * &kd;
    let eig = spectral::eig_sym_with(&j, options.sweep_order)?;
    let tol = options.rank_tol.unwrap_or(k.width() as f64 * f64::EPSILON);
    let sigma_plus = spectral::pinv_diag(&eig.values, tol);
    let effective_rank = sigma_plus.iter().filter(|&&s| s != 0.0).count();
    let j_plus = eig.apply(&sigma_plus);
    let w = j_plus * kd.transpose();

    let outcomes = k.width();
    let mut r = DMatrix::zeros(outcomes, outcomes);
    for a in 0..outcomes {
        for b in a..outcomes {
            let v: f64 = (0..lam.len()).map(|i| w[(a, i)] * lam[i] * w[(b, i)]).sum();
            r[(a, b)] = v;
            r[(b, a)] = v;
        }
    }
    let diag_r: Vec<f64> = (0..outcomes).map(|b| r[(b, b)]).collect();
    let restored: Vec<f64> = k
        .rows()
        .iter()
        .map(|row| {
            row.cols()
                .iter()
                .map(|&a| row.cols().iter().map(|&b| r[(a, b)]).sum::<f64>())
                .sum()
        })
        .collect();
    finish(
        lambda,
        WeightMatrix::from_dense(&w),
        Some(r),
        diag_r,
        restored,
        effective_rank,
        DensityPath::Spectral,
    )
}

fn finish(
    lambda: &LambdaVector,
    weights: WeightMatrix,
    r: Option<DMatrix<f64>>,
    diag_r: Vec<f64>,
    restored: Vec<f64>,
    effective_rank: usize,
    path: DensityPath,
) -> Result<DensityResult, DensityError> {
    let trace_r: f64 = diag_r.iter().sum();
    if trace_r.is_nan()
        || trace_r <= f64::MIN_POSITIVE
        || lambda.entries().iter().all(|&l| l == 0.0)
    {
        return Err(DensityError::Degenerate(trace_r));
    }
    let joint = diag_r.iter().map(|d| d / trace_r).collect();
    let restored_rho = restored.iter().map(|x| x / trace_r).collect();
    let residual = max_abs_diff(&restored, lambda.entries());
    Ok(DensityResult {
        n: lambda.n(),
        lambda: lambda.entries().to_vec(),
        weights,
        r,
        diag_r,
        trace_r,
        joint,
        restored,
        restored_rho,
        residual,
        effective_rank,
        path,
    })
}

/// Diagonal of `R` and the restored marginals without forming `J`.
///
/// `W = K' (K K')⁺` is assembled from the `m × m` Gram matrix; restored
/// marginals come from `(K W) Λ (K W)'`.
pub fn diag_fast(k: &EventMatrix, lambda: &LambdaVector) -> Result<DensityResult, DensityError> {
    diag_fast_with(k, lambda, &DensityOptions::default())
}

pub fn diag_fast_with(
    k: &EventMatrix,
    lambda: &LambdaVector,
    options: &DensityOptions,
) -> Result<DensityResult, DensityError> {
    check_dims(k, lambda)?;
    let m = k.m();
    let outcomes = k.width();
    let lam = lambda.entries();

    let gram = DMatrix::from_row_slice(m, m, &k.gram());
    let eig = spectral::eig_sym_with(&gram, options.sweep_order)?;
    // same cut as on the spectral path: the nonzero spectra of K'K and KK' coincide
    let tol = options.rank_tol.unwrap_or(outcomes as f64 * f64::EPSILON);
    let sigma_plus = spectral::pinv_diag(&eig.values, tol);
    let effective_rank = sigma_plus.iter().filter(|&&s| s != 0.0).count();
    let gram_plus = eig.apply(&sigma_plus);

    let mut data = vec![0.0; outcomes * m];
    for (i, row) in k.rows().iter().enumerate() {
        let g = gram_plus.row(i);
        for &b in row.cols() {
            for (w, x) in data[b * m..(b + 1) * m].iter_mut().zip(g.iter()) {
                *w += x;
            }
        }
    }
    let weights = WeightMatrix { outcomes, m, data };
    let diag_r = weights.diag(lam);

    let restored = k
        .rows()
        .iter()
        .map(|row| weights.quadratic_form(row, lam))
        .collect();
    finish(
        lambda,
        weights,
        None,
        diag_r,
        restored,
        effective_rank,
        DensityPath::Fast,
    )
}

/// Gleason measure `tr(ρ P)` of the subspace spanned by the basis vectors
/// in `subspace`; `P` is the diagonal projector onto that join.
pub fn gleason_probability(result: &DensityResult, subspace: &SparseRow) -> f64 {
    assert_eq!(subspace.width(), result.joint.len());
    subspace.cols().iter().map(|&b| result.joint[b]).sum()
}
