//! Shared generators and oracles for the integration suites.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qps::event_matrix::EventMatrix;
use qps::marginals::{pairs, MarginalSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unary marginals in `(0.02, 0.98)` and each pair drawn uniformly between
/// its Fréchet bounds, so every pair is consistent with its two unaries.
/// Triple-wise classical feasibility is not enforced.
pub fn random_set(rng: &mut impl Rng, n: usize) -> MarginalSet {
    let p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.02..0.98)).collect();
    let pjoint = pairs(n)
        .map(|(i, j)| {
            let (a, b) = (p[i - 1], p[j - 1]);
            let lo = (a + b - 1.0).max(0.0);
            let hi = a.min(b);
            lo + rng.gen::<f64>() * (hi - lo)
        })
        .collect();
    MarginalSet::new(p.iter().map(|x| 1.0 - x).collect(), pjoint).expect("generated in range")
}

pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    perm
}

/// Outcome index of the relabeled space: variable `i` of the result takes
/// the value variable `perm[i-1]` has in `b`.
pub fn permute_outcome(n: usize, perm: &[usize], b: usize) -> usize {
    (1..=n).fold(0, |acc, i| {
        let bit = b >> (n - perm[i - 1]) & 1;
        acc | bit << (n - i)
    })
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact rational from a decimal literal such as `0.45` or a fraction `9/20`.
pub fn exact(text: &str) -> BigRational {
    if let Some((n, d)) = text.split_once('/') {
        return ratio(n.trim().parse().unwrap(), d.trim().parse().unwrap());
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    let den = 10_i64.pow(frac.len() as u32);
    let num: i64 = format!("{int}{frac}").parse().unwrap();
    ratio(num, den)
}

/// Gauss–Jordan inverse over the rationals. Panics when singular.
fn invert(mut a: Vec<Vec<BigRational>>) -> Vec<Vec<BigRational>> {
    let m = a.len();
    let mut inv: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..m {
        let pivot = (col..m)
            .find(|&r| !a[r][col].is_zero())
            .expect("Gram matrix is singular");
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for x in a[col].iter_mut().chain(inv[col].iter_mut()) {
            *x = &*x / &p;
        }
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..m {
                    let (ac, ic) = (&a[col][c] * &f, &inv[col][c] * &f);
                    a[r][c] = &a[r][c] - ac;
                    inv[r][c] = &inv[r][c] - ic;
                }
            }
        }
    }
    inv
}

/// Exact diagonal of `R` and the normalized joint, via `K⁺ = K'(KK')⁻¹`.
/// Requires `K` to have full row rank.
pub struct RationalDensity {
    pub diag_r: Vec<BigRational>,
    pub joint: Vec<BigRational>,
    pub restored: Vec<BigRational>,
}

pub fn rational_density(k: &EventMatrix, lambda: &[BigRational]) -> RationalDensity {
    let m = k.m();
    let width = k.width();
    let dense: Vec<Vec<i64>> = k
        .rows()
        .iter()
        .map(|r| r.to_dense().iter().map(|&x| x as i64).collect())
        .collect();
    let gram: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let s: i64 = (0..width).map(|c| dense[i][c] * dense[j][c]).sum();
                    ratio(s, 1)
                })
                .collect()
        })
        .collect();
    let gram_inv = invert(gram);
    // W[b][i] = Σ_r K[r][b] G⁻¹[r][i]
    let w: Vec<Vec<BigRational>> = (0..width)
        .map(|b| {
            (0..m)
                .map(|i| {
                    (0..m)
                        .filter(|&r| dense[r][b] == 1)
                        .fold(BigRational::zero(), |acc, r| acc + &gram_inv[r][i])
                })
                .collect()
        })
        .collect();
    let diag_r: Vec<BigRational> = w
        .iter()
        .map(|row| {
            row.iter()
                .zip(lambda)
                .fold(BigRational::zero(), |acc, (x, l)| acc + x * x * l)
        })
        .collect();
    let trace = diag_r.iter().fold(BigRational::zero(), |acc, x| acc + x);
    let joint = diag_r.iter().map(|x| x / &trace).collect();
    // K W is m×m; restored_r = Σ_j λ_j (K W)[r][j]²
    let restored = (0..m)
        .map(|r| {
            (0..m).fold(BigRational::zero(), |acc, j| {
                let kw = (0..width)
                    .filter(|&b| dense[r][b] == 1)
                    .fold(BigRational::zero(), |s, b| s + &w[b][j]);
                acc + &kw * &kw * &lambda[j]
            })
        })
        .collect();
    RationalDensity {
        diag_r,
        joint,
        restored,
    }
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn is_nonnegative(x: &BigRational) -> bool {
    !x.is_negative()
}
