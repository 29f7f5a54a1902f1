mod common;

use rand::Rng;

use qps::classical::{
    bounds_for, joint_from_t, oracle_interval, test_all_triples, TripleMarginals, Verdict,
};
use qps::marginals::MarginalSet;

/// Marginals of a random joint over `{0,1}^3`; always classically realizable.
fn realizable(rng: &mut impl Rng) -> (TripleMarginals, Vec<f64>) {
    let mut joint: Vec<f64> = (0..8).map(|_| rng.gen::<f64>().powi(2)).collect();
    let total: f64 = joint.iter().sum();
    joint.iter_mut().for_each(|x| *x /= total);
    let mass = |pred: &dyn Fn(usize) -> bool| -> f64 {
        (0..8).filter(|&b| pred(b)).map(|b| joint[b]).sum()
    };
    let bit = |b: usize, v: usize| b >> (3 - v) & 1 == 1;
    let p = [1, 2, 3].map(|v| mass(&|b| bit(b, v)));
    let pair = [(1, 2), (1, 3), (2, 3)].map(|(x, y)| mass(&|b| bit(b, x) && bit(b, y)));
    (TripleMarginals::new(p, pair), joint)
}

/// Unaries anywhere, pairs within their Fréchet bounds; often not realizable.
fn arbitrary(rng: &mut impl Rng) -> TripleMarginals {
    let p = [0; 3].map(|_| rng.gen::<f64>());
    let pair = [(0, 1), (0, 2), (1, 2)].map(|(a, b)| {
        let lo = (p[a] + p[b] - 1.0).max(0.0);
        let hi = p[a].min(p[b]);
        lo + rng.gen::<f64>() * (hi - lo)
    });
    TripleMarginals::new(p, pair)
}

/// Independent interval oracle: each outcome probability is obtained by
/// Möbius inversion over the subsets of variables that hold, written as
/// `a + s·t`, and the nonnegativity constraints are intersected.
fn mobius_interval(t: &TripleMarginals) -> Option<(f64, f64)> {
    let moment = |set: u8| -> f64 {
        match set {
            0 => 1.0,
            0b100 => t.p[0],
            0b010 => t.p[1],
            0b001 => t.p[2],
            0b110 => t.pair[0],
            0b101 => t.pair[1],
            0b011 => t.pair[2],
            _ => unreachable!(),
        }
    };
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for outcome in 0u8..8 {
        // P(outcome) = Σ_{S ⊇ outcome} (-1)^{|S|-|outcome|} moment(S)
        let (mut a, mut s) = (0.0, 0.0);
        for superset in 0u8..8 {
            if superset & outcome != outcome {
                continue;
            }
            let sign = if (superset ^ outcome).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            if superset == 0b111 {
                s += sign;
            } else {
                a += sign * moment(superset);
            }
        }
        if s > 0.0 {
            lo = lo.max(-a);
        } else {
            hi = hi.min(a);
        }
    }
    (lo <= hi + 1e-12).then_some((lo, hi))
}

#[test]
fn bounds_agree_with_mobius_oracle() {
    let mut rng = common::rng(31);
    for trial in 0..2000 {
        let triple = if trial % 2 == 0 {
            realizable(&mut rng).0
        } else {
            arbitrary(&mut rng)
        };
        let b = bounds_for(&triple);
        let oracle = mobius_interval(&triple);
        assert_eq!(b.feasible, oracle.is_some(), "trial {trial}: {triple:?}");
        if let Some((lo, hi)) = oracle {
            assert!((b.ell - lo).abs() <= 1e-12, "trial {trial}");
            assert!((b.upsilon - hi).abs() <= 1e-12, "trial {trial}");
        }
        assert_eq!(oracle_interval(&triple).is_some(), oracle.is_some());
    }
}

#[test]
fn realizable_marginals_always_pass() {
    let mut rng = common::rng(32);
    for _ in 0..1000 {
        let (triple, joint) = realizable(&mut rng);
        let b = bounds_for(&triple);
        assert!(b.feasible);
        let t = joint[7];
        assert!(b.ell - 1e-12 <= t && t <= b.upsilon + 1e-12);
    }
}

#[test]
fn every_t_in_bounds_gives_a_valid_joint() {
    let mut rng = common::rng(33);
    for _ in 0..1000 {
        let triple = arbitrary(&mut rng);
        let b = bounds_for(&triple);
        if !b.feasible {
            let mid = 0.5 * (b.ell + b.upsilon);
            assert!(!joint_from_t(&triple, mid).valid);
            continue;
        }
        for frac in [0.0, 0.25, 0.5, 1.0] {
            let t = b.ell + frac * (b.upsilon - b.ell);
            let joint = joint_from_t(&triple, t);
            assert!(joint.valid);
            assert!((joint.probabilities.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            // the joint reproduces every input marginal
            let p = &joint.probabilities;
            let bit = |b: usize, v: usize| b >> (3 - v) & 1 == 1;
            for (k, v) in [1, 2, 3].into_iter().enumerate() {
                let m: f64 = (0..8).filter(|&o| bit(o, v)).map(|o| p[o]).sum();
                assert!((m - triple.p[k]).abs() <= 1e-12);
            }
            for (k, (x, y)) in [(1, 2), (1, 3), (2, 3)].into_iter().enumerate() {
                let m: f64 = (0..8)
                    .filter(|&o| bit(o, x) && bit(o, y))
                    .map(|o| p[o])
                    .sum();
                assert!((m - triple.pair[k]).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn larger_sets_check_every_triple() {
    let mut rng = common::rng(34);
    for n in 2..=7 {
        let set = common::random_set(&mut rng, n);
        let rep = test_all_triples(&set);
        assert_eq!(rep.triples.len(), n * (n - 1) * (n - 2) / 6);
        if n < 3 {
            assert_eq!(rep.verdict, Verdict::NoTriples);
        }
        assert_eq!(rep.oracle_interval.is_some(), n == 3);
    }
    // a product set is always realizable
    let set = MarginalSet::independent(&[0.2, 0.5, 0.7, 0.9]).unwrap();
    assert_eq!(test_all_triples(&set).verdict, Verdict::AllTriplesFeasible);
}
