//! Dense real-symmetric eigendecomposition and Moore–Penrose pseudo-inverse.
//!
//! Both kernels are Jacobi methods with a fixed rotation schedule, so the
//! output depends only on the input bits and the chosen [`SweepOrder`].

use nalgebra::DMatrix;
use thiserror::Error;

/// Relative tolerance for the symmetry check on eigensolver input.
pub const SYMMETRY_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("Jacobi iteration did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("matrix contains non-finite entries")]
    NonFinite,
}

/// Order in which off-diagonal pairs `(p, q)` are visited within a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepOrder {
    /// `p` ascending, then `q` ascending.
    #[default]
    RowCyclic,
    /// `p` descending, then `q` descending.
    Reverse,
}

impl SweepOrder {
    fn pairs(self, n: usize) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .collect();
        if self == SweepOrder::Reverse {
            out.reverse();
        }
        out
    }
}

/// Numerical-rank threshold `dim · ε · σ_max`.
pub fn rank_threshold(sigma: &[f64], dim: usize) -> f64 {
    let max = sigma.iter().fold(0.0_f64, |a, &s| a.max(s.abs()));
    dim as f64 * f64::EPSILON * max
}

/// `A = U diag(σ) U'` with `σ` sorted descending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub vectors: DMatrix<f64>,
    pub values: Vec<f64>,
    /// Eigenvalues above [`rank_threshold`].
    pub rank: usize,
}

impl EigenDecomposition {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.values));
        &self.vectors * d * self.vectors.transpose()
    }

    /// `U f(Σ) U'` for a diagonal map `f` applied to the eigenvalues.
    pub fn apply(&self, diag: &[f64]) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (j, &d) in diag.iter().enumerate() {
            scaled.column_mut(j).scale_mut(d);
        }
        scaled * self.vectors.transpose()
    }
}

/// Eigendecomposition of a real symmetric matrix with the default schedule.
pub fn eig_sym(matrix: &DMatrix<f64>) -> Result<EigenDecomposition, SpectralError> {
    eig_sym_with(matrix, SweepOrder::default())
}

/// Cyclic Jacobi eigendecomposition.
pub fn eig_sym_with(
    matrix: &DMatrix<f64>,
    order: SweepOrder,
) -> Result<EigenDecomposition, SpectralError> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(SpectralError::NotSquare(n, matrix.ncols()));
    }
    if matrix.iter().any(|x| !x.is_finite()) {
        return Err(SpectralError::NonFinite);
    }
    let scale = matrix.amax().max(f64::MIN_POSITIVE);
    let mut asym = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            asym = asym.max((matrix[(i, j)] - matrix[(j, i)]).abs());
        }
    }
    if asym > SYMMETRY_TOL * scale.max(1.0) {
        return Err(SpectralError::NotSymmetric(asym));
    }

    // row-major working copies
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (matrix[(i, j)] + matrix[(j, i)]);
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];
    let schedule = order.pairs(n);

    let mut converged = n < 2;
    for sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = schedule.iter().map(|&(p, q)| a[p * n + q].abs()).sum();
        if off == 0.0 {
            converged = true;
            break;
        }
        let thresh = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for &(p, q) in &schedule {
            let apq = a[p * n + q];
            let g = 100.0 * apq.abs();
            if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                a[p * n + q] = 0.0;
                continue;
            }
            if apq.abs() <= thresh {
                continue;
            }
            let h = d[q] - d[p];
            let t = if h.abs() + g == h.abs() {
                apq / h
            } else {
                let theta = 0.5 * h / apq;
                let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                if theta < 0.0 {
                    -t
                } else {
                    t
                }
            };
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = t * c;
            let tau = s / (1.0 + c);
            let h = t * apq;
            z[p] -= h;
            z[q] += h;
            d[p] -= h;
            d[q] += h;
            a[p * n + q] = 0.0;
            let rotate = |a: &mut [f64], i: usize, j: usize, k: usize, l: usize| {
                let g = a[i * n + j];
                let h = a[k * n + l];
                a[i * n + j] = g - s * (h + g * tau);
                a[k * n + l] = h + s * (g - h * tau);
            };
            for j in 0..p {
                rotate(&mut a, j, p, j, q);
            }
            for j in p + 1..q {
                rotate(&mut a, p, j, j, q);
            }
            for j in q + 1..n {
                rotate(&mut a, p, j, q, j);
            }
            for j in 0..n {
                rotate(&mut v, j, p, j, q);
            }
        }
        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
    }
    if !converged {
        let off: f64 = schedule.iter().map(|&(p, q)| a[p * n + q].abs()).sum();
        if off != 0.0 {
            return Err(SpectralError::NoConvergence(MAX_SWEEPS));
        }
    }

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&x, &y| d[y].total_cmp(&d[x]).then(x.cmp(&y)));
    let values: Vec<f64> = idx.iter().map(|&i| d[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[r * n + idx[c]]);
    let thr = rank_threshold(&values, n);
    let rank = values.iter().filter(|&&s| s > thr).count();
    Ok(EigenDecomposition {
        vectors,
        values,
        rank,
    })
}

/// Entry-wise reciprocal of the values above `tol · max(σ)`, zero elsewhere.
pub fn pinv_diag(sigma: &[f64], tol: f64) -> Vec<f64> {
    let max = sigma.iter().fold(0.0_f64, |a, &s| a.max(s));
    let cut = tol * max;
    sigma
        .iter()
        .map(|&s| if s > cut && s > 0.0 { 1.0 / s } else { 0.0 })
        .collect()
}

/// Thin singular value decomposition `A = U diag(σ) V'`, `σ` descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<f64>,
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(matrix: &DMatrix<f64>) -> Result<Svd, SpectralError> {
    if matrix.iter().any(|x| !x.is_finite()) {
        return Err(SpectralError::NonFinite);
    }
    if matrix.nrows() < matrix.ncols() {
        let t = svd_tall(&matrix.transpose())?;
        return Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    svd_tall(matrix)
}

fn svd_tall(matrix: &DMatrix<f64>) -> Result<Svd, SpectralError> {
    let (rows, cols) = matrix.shape();
    let mut u: Vec<Vec<f64>> = (0..cols)
        .map(|j| matrix.column(j).iter().copied().collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..cols).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let rotate = |cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64| {
        let (left, right) = cols.split_at_mut(q);
        let (xp, xq) = (&mut left[p], &mut right[0]);
        for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = c * x - s * y;
            *b = s * x + c * y;
        }
    };

    // columns below this squared norm are numerically zero
    let floor = {
        let frob2: f64 = u.iter().map(|c| dot(c, c)).sum();
        (f64::EPSILON * f64::EPSILON) * frob2
    };
    let mut converged = cols < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = dot(&u[p], &u[p]);
                let beta = dot(&u[q], &u[q]);
                let gamma = dot(&u[p], &u[q]);
                if alpha <= floor
                    || beta <= floor
                    || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt()
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut u, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(SpectralError::NoConvergence(MAX_SWEEPS));
    }

    let norms: Vec<f64> = u.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut idx: Vec<usize> = (0..cols).collect();
    idx.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));
    let singular_values: Vec<f64> = idx.iter().map(|&i| norms[i]).collect();
    let u_mat = DMatrix::from_fn(rows, cols, |r, c| {
        let s = norms[idx[c]];
        if s > 0.0 {
            u[idx[c]][r] / s
        } else {
            0.0
        }
    });
    let v_mat = DMatrix::from_fn(cols, cols, |r, c| v[idx[c]][r]);
    Ok(Svd {
        u: u_mat,
        singular_values,
        v: v_mat,
    })
}

#[derive(Debug, Clone)]
pub struct PseudoInverse {
    pub matrix: DMatrix<f64>,
    /// Relative cut applied to the singular values.
    pub tolerance_used: f64,
    pub rank: usize,
}

/// Moore–Penrose pseudo-inverse. Singular values at or below
/// `tol · σ_max` are treated as zero; the default `tol` is `max(r, c) · ε`.
pub fn pinv(matrix: &DMatrix<f64>, tol: Option<f64>) -> Result<PseudoInverse, SpectralError> {
    let (rows, cols) = matrix.shape();
    let tol = tol.unwrap_or(rows.max(cols) as f64 * f64::EPSILON);
    let dec = svd(matrix)?;
    let inv = pinv_diag(&dec.singular_values, tol);
    let rank = inv.iter().filter(|&&x| x != 0.0).count();
    let mut v_scaled = dec.v.clone();
    for (j, &s) in inv.iter().enumerate() {
        v_scaled.column_mut(j).scale_mut(s);
    }
    Ok(PseudoInverse {
        matrix: v_scaled * dec.u.transpose(),
        tolerance_used: tol,
        rank,
    })
}

/// Max-abs residuals of the four Penrose conditions, each scaled by the
/// largest entry of the matrix it should reproduce:
/// `[AXA - A, XAX - X, (AX)' - AX, (XA)' - XA]`.
pub fn penrose_residuals(a: &DMatrix<f64>, x: &DMatrix<f64>) -> [f64; 4] {
    let rel = |d: DMatrix<f64>, reference: &DMatrix<f64>| {
        d.amax() / reference.amax().max(f64::MIN_POSITIVE)
    };
    let ax = a * x;
    let xa = x * a;
    [
        rel(&ax * a - a, a),
        rel(&xa * x - x, x),
        rel(ax.transpose() - &ax, &ax),
        rel(xa.transpose() - &xa, &xa),
    ]
}
