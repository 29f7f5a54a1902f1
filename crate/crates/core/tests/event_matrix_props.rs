use qps::event_matrix::{build, join_rows, Event, OutcomeIndex, SparseRow};
use qps::marginals::{marginal_count, pair_slot, pairs};

/// Direct dense construction from the outcome bits, independent of `build`.
fn dense_reference(n: usize) -> Vec<Vec<u8>> {
    let width = 1usize << n;
    let holds = |c: usize, i: usize| c >> (n - i) & 1 == 1;
    let mut rows: Vec<Vec<u8>> = (1..=n)
        .map(|i| (0..width).map(|c| u8::from(!holds(c, i))).collect())
        .collect();
    for i in 1..=n {
        for j in i + 1..=n {
            rows.push(
                (0..width)
                    .map(|c| u8::from(holds(c, i) && holds(c, j)))
                    .collect(),
            );
        }
    }
    rows
}

#[test]
fn matches_dense_reference() {
    for n in 2..=10 {
        let k = build(n).unwrap();
        assert_eq!(k.m(), marginal_count(n));
        assert_eq!(k.width(), 1 << n);
        assert_eq!(k.to_dense().unwrap(), dense_reference(n), "n = {n}");
    }
}

#[test]
fn unary_rows_are_alternating_runs() {
    for n in 2..=10 {
        let k = build(n).unwrap();
        for i in 1..=n {
            let run = 1usize << (n - i);
            let row = k.row(i - 1);
            for c in 0..k.width() {
                assert_eq!(row.contains(c), (c / run) & 1 == 0, "n={n} i={i} c={c}");
            }
        }
    }
}

#[test]
fn complement_identity() {
    for n in 2..=10 {
        let k = build(n).unwrap();
        let full = SparseRow::full(k.width());
        for i in 1..=n {
            let not_i = k.row_for_event(Event::Not(i)).unwrap();
            let holds = k.row_for_event(Event::Holds(i)).unwrap();
            assert_eq!(join_rows(&not_i, &holds), full);
            assert_eq!(not_i.overlap(&holds), 0);
            for &c in holds.cols() {
                assert!(OutcomeIndex::new(n, c).holds(i));
            }
        }
    }
}

#[test]
fn pair_rows_are_intersections() {
    for n in 2..=10 {
        let k = build(n).unwrap();
        for (i, j) in pairs(n) {
            let both = k.row(pair_slot(n, i, j) - 1);
            assert_eq!(Some(both), k.row_for_event(Event::Both(j, i)).ok().as_ref());
            let a = k.row_for_event(Event::Holds(i)).unwrap();
            let b = k.row_for_event(Event::Holds(j)).unwrap();
            let expected: Vec<usize> = a
                .cols()
                .iter()
                .copied()
                .filter(|&c| b.contains(c))
                .collect();
            assert_eq!(both.cols(), expected.as_slice());
            // A_i decomposes into A_i A_j and A_i Ā_j
            let rest: Vec<usize> = a
                .cols()
                .iter()
                .copied()
                .filter(|&c| !b.contains(c))
                .collect();
            assert_eq!(join_rows(both, &SparseRow::new(k.width(), rest)), a);
        }
    }
}

#[test]
fn pair_block_column_sums() {
    for n in 2..=8 {
        let k = build(n).unwrap();
        let mut sums = vec![0usize; k.width()];
        for row in &k.rows()[n..] {
            for &c in row.cols() {
                sums[c] += 1;
            }
        }
        for (c, s) in sums.into_iter().enumerate() {
            let ones = c.count_ones() as usize;
            assert_eq!(s, ones * ones.saturating_sub(1) / 2, "n={n} c={c}");
        }
    }
}

#[test]
fn bit_decoding_round_trips() {
    for n in 2..=10 {
        for c in 0..1usize << n {
            let o = OutcomeIndex::new(n, c);
            assert_eq!(OutcomeIndex::from_bits(&o.bits()).unwrap(), o);
            for i in 1..=n {
                assert_eq!(o.holds(i), o.bits().as_bytes()[i - 1] == b'1');
            }
        }
    }
}

#[test]
fn gram_matches_dense_product() {
    for n in 2..=7 {
        let k = build(n).unwrap();
        let d = k.to_dense().unwrap();
        let m = k.m();
        let g = k.gram();
        for a in 0..m {
            for b in 0..m {
                let dot: u32 = d[a].iter().zip(&d[b]).map(|(x, y)| u32::from(x * y)).sum();
                assert_eq!(g[a * m + b], f64::from(dot));
            }
        }
    }
}

#[test]
fn large_n_is_sparse() {
    let k = build(14).unwrap();
    assert_eq!(k.m(), 105);
    assert_eq!(k.row(0).ones(), 1 << 13);
    assert_eq!(k.rows()[14].ones(), 1 << 12);
    assert_eq!(k.triplets().len(), 14 * (1 << 13) + 91 * (1 << 12));
}
