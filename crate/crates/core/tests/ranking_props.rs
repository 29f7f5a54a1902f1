mod common;

use proptest::prelude::*;
use rand::Rng;

use qps::classical::bounds3;
use qps::density::diag_fast;
use qps::event_matrix::build;
use qps::marginals::{pairs, to_lambda, MarginalSet};
use qps::ranking::{
    ci_joint, compare_rankings, rank_npl, rank_single, JointDistribution, Provenance, Ranking,
};

/// Probability vectors over `2^n` outcomes with deliberate exact ties.
fn distribution() -> impl Strategy<Value = Vec<f64>> {
    (2usize..=5)
        .prop_flat_map(|n| {
            prop::collection::vec(prop_oneof![Just(0.0), Just(0.5), 0.0..1.0_f64], 1 << n)
        })
        .prop_filter("nonzero mass", |v| v.iter().sum::<f64>() > 0.0)
        .prop_map(|v| {
            let total: f64 = v.iter().sum();
            v.into_iter().map(|x| x / total).collect()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn argsort_invariance(p in distribution(), scale in 1e-3..1e3_f64) {
        let dist = JointDistribution::new(p.clone(), Provenance::External).unwrap();
        let base = rank_single(&dist);
        let scaled = Ranking::from_scores(p.iter().map(|x| x * scale).collect());
        prop_assert_eq!(&base.order, &scaled.order);
        prop_assert_eq!(&base.tie_groups, &scaled.tie_groups);
    }

    #[test]
    fn npl_regions_are_nested(p1 in distribution(), seed in any::<u64>(), a in 0.0..1.0_f64, b in 0.0..1.0_f64) {
        let len = p1.len();
        let mut rng = common::rng(seed);
        let mut p0: Vec<f64> = (0..len).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen() }).collect();
        p0[0] += 1e-3;
        let total: f64 = p0.iter().sum();
        p0.iter_mut().for_each(|x| *x /= total);
        let p1 = JointDistribution::new(p1, Provenance::External).unwrap();
        let p0 = JointDistribution::new(p0, Provenance::External).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        let small = rank_npl(&p1, &p0, lo).unwrap();
        let large = rank_npl(&p1, &p0, hi).unwrap();
        prop_assert!(small.region.len() <= large.region.len());
        prop_assert_eq!(&small.region[..], &large.region[..small.region.len()]);
        prop_assert!(small.size <= lo + 1e-10);
        prop_assert!(small.power <= large.power + 1e-15);
    }

    #[test]
    fn kendall_distance_is_a_symmetric_bounded_count(p in distribution(), q_seed in any::<u64>()) {
        let len = p.len();
        let mut rng = common::rng(q_seed);
        let q: Vec<f64> = (0..len).map(|_| rng.gen()).collect();
        let a = Ranking::from_scores(p);
        let b = Ranking::from_scores(q);
        let ab = compare_rankings(&a, &b).unwrap();
        let ba = compare_rankings(&b, &a).unwrap();
        prop_assert_eq!(ab.kendall_tau, ba.kendall_tau);
        prop_assert!(ab.kendall_tau <= (len * (len - 1) / 2) as f64);
        prop_assert_eq!(compare_rankings(&a, &a).unwrap().kendall_tau, 0.0);
        prop_assert_eq!(*ab.top_k_overlap.last().unwrap(), len);
    }
}

#[test]
fn ci_joint_fidelity() {
    let mut rng = common::rng(41);
    for n in 2..=6 {
        for _ in 0..100 {
            let set = common::random_set(&mut rng, n);
            let c = rng.gen_range(1..=n);
            let ci = ci_joint(&set, c).unwrap();
            // Fréchet-consistent pairs keep every conditional in [0, 1]
            assert_eq!(ci.clamp_count, 0);
            let d = &ci.distribution;
            for i in 1..=n {
                assert!((d.unary(i) - set.p(i)).abs() <= 1e-12);
            }
            for (i, j) in pairs(n) {
                if i == c || j == c {
                    assert!((d.pairwise(i, j) - set.pjoint(i, j)).abs() <= 1e-12);
                }
            }
            assert_eq!(ci.deviations.len(), n * (n - 1) / 2);
            for dev in &ci.deviations {
                assert!((dev.model - d.pairwise(dev.pair.0, dev.pair.1)).abs() == 0.0);
            }
        }
    }
}

#[test]
fn quarter_instance_ci_triple_inside_classical_bounds() {
    let set = MarginalSet::new(vec![0.5; 3], vec![0.25; 3]).unwrap();
    let ci = ci_joint(&set, 1).unwrap();
    let t = ci.distribution.probabilities()[7];
    assert_eq!(t, 0.125);
    let b = bounds3(0.5, 0.5, 0.5, 0.25, 0.25, 0.25);
    assert!(b.ell < t && t < b.upsilon);
    let dev23 = ci.deviations.iter().find(|d| d.pair == (2, 3)).unwrap();
    assert_eq!(dev23.model, 0.25);
    assert_eq!(dev23.input, 0.25);
}

#[test]
fn npl_against_uniform_takes_top_half_of_qps_ranking() {
    let set = MarginalSet::new(vec![0.5; 3], vec![0.45, 0.45, 0.1]).unwrap();
    let res = diag_fast(&build(3).unwrap(), &to_lambda(&set)).unwrap();
    let qps = JointDistribution::new(res.joint, Provenance::Qps).unwrap();
    let npl = rank_npl(&qps, &JointDistribution::uniform(3), 0.5).unwrap();
    let top = rank_single(&qps);
    assert_eq!(npl.region, top.order[..4].to_vec());
    assert!((npl.size - 0.5).abs() <= 1e-12);
}

#[test]
fn ci_ties_dissolve_under_qps() {
    let set = MarginalSet::new(vec![0.5; 3], vec![0.25; 3]).unwrap();
    let ci = rank_single(&ci_joint(&set, 1).unwrap().distribution);
    let res = diag_fast(&build(3).unwrap(), &to_lambda(&set)).unwrap();
    let qps = rank_single(&JointDistribution::new(res.joint, Provenance::Qps).unwrap());
    let cmp = compare_rankings(&qps, &ci).unwrap();
    assert_eq!(cmp.tie_groups.1.len(), 1);
    assert!(cmp.tie_groups.0.len() > 1);
}
