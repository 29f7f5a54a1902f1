mod common;

use nalgebra::DMatrix;
use rand::Rng;

use qps::spectral::{eig_sym, eig_sym_with, penrose_residuals, pinv, svd, SweepOrder};

fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

/// `B B'` with `B` of the given inner rank, so the result is PSD and
/// rank-deficient whenever `rank < n`.
fn random_psd(rng: &mut impl Rng, n: usize, rank: usize) -> DMatrix<f64> {
    let b = random_matrix(rng, n, rank);
    &b * b.transpose()
}

fn orthogonality_error(u: &DMatrix<f64>) -> f64 {
    (u.transpose() * u - DMatrix::identity(u.ncols(), u.ncols())).amax()
}

#[test]
fn eigendecomposition_reconstructs_random_psd() {
    let mut rng = common::rng(11);
    for trial in 0..500 {
        let n = rng.gen_range(4..=64);
        let rank = rng.gen_range(1..=n);
        let a = random_psd(&mut rng, n, rank);
        let e = eig_sym(&a).unwrap();
        let scale = a.amax();
        assert!(
            (e.reconstruct() - &a).amax() <= 1e-9 * scale.max(1.0),
            "trial {trial}: n={n}"
        );
        assert!(
            orthogonality_error(&e.vectors) <= 1e-10,
            "trial {trial}: n={n}"
        );
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        assert!(e.rank <= rank, "trial {trial}: rank {} > {rank}", e.rank);
        assert!(*e.values.last().unwrap() >= -1e-10 * scale.max(1.0));
    }
}

#[test]
fn eigenvalues_agree_with_nalgebra() {
    let mut rng = common::rng(12);
    for _ in 0..50 {
        let n = rng.gen_range(2..=30);
        let b = random_matrix(&mut rng, n, n);
        let a = &b + b.transpose();
        let ours = eig_sym(&a).unwrap();
        let mut theirs: Vec<f64> = a
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        theirs.sort_by(|x, y| y.total_cmp(x));
        assert!(common::max_abs_diff(&ours.values, &theirs) <= 1e-10 * a.amax().max(1.0));
    }
}

#[test]
fn sweep_order_does_not_change_the_spectrum() {
    let mut rng = common::rng(13);
    for _ in 0..100 {
        let n = rng.gen_range(2..=40);
        let a = random_psd(&mut rng, n, n);
        let fwd = eig_sym_with(&a, SweepOrder::RowCyclic).unwrap();
        let rev = eig_sym_with(&a, SweepOrder::Reverse).unwrap();
        assert!(common::max_abs_diff(&fwd.values, &rev.values) <= 1e-10 * a.amax().max(1.0));
        assert!((rev.reconstruct() - &a).amax() <= 1e-9 * a.amax().max(1.0));
    }
}

#[test]
fn pinv_satisfies_penrose_conditions() {
    let mut rng = common::rng(14);
    for trial in 0..500 {
        let cols = rng.gen_range(2..=64);
        let rows = rng.gen_range(1..=cols);
        // half of the trials are rank deficient
        let a = if rng.gen_bool(0.5) {
            let r = rng.gen_range(1..=rows);
            random_matrix(&mut rng, rows, r) * random_matrix(&mut rng, r, cols)
        } else {
            random_matrix(&mut rng, rows, cols)
        };
        let p = pinv(&a, None).unwrap();
        let res = penrose_residuals(&a, &p.matrix);
        assert!(
            res.iter().all(|&r| r <= 1e-8),
            "trial {trial}: {rows}x{cols} {res:?}"
        );
        if trial % 10 == 0 {
            let reference = a.clone().pseudo_inverse(1e-10).unwrap();
            let scale = reference.amax().max(1.0);
            assert!(
                (&p.matrix - reference).amax() <= 1e-6 * scale,
                "trial {trial}"
            );
        }
    }
}

#[test]
fn svd_reconstructs_and_is_orthonormal() {
    let mut rng = common::rng(15);
    for _ in 0..100 {
        let rows = rng.gen_range(1..=30);
        let cols = rng.gen_range(1..=30);
        let a = random_matrix(&mut rng, rows, cols);
        let d = svd(&a).unwrap();
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&d.singular_values));
        assert!((&d.u * s * d.v.transpose() - &a).amax() <= 1e-10);
        assert!(orthogonality_error(&d.v) <= 1e-10);
        assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }
}
