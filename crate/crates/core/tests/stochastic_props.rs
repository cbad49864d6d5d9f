use proptest::prelude::*;

use stochprod::stochastic::{
    matrix_seminorm, validate_stochastic, vector_seminorm, StochasticMatrix, DEFAULT_TOL_NEG,
    DEFAULT_TOL_ROW,
};

const SLACK: f64 = 1e-12;

/// Random stochastic matrix; each entry is zero with probability ~1/3.
fn arb_stochastic(n: usize) -> impl Strategy<Value = StochasticMatrix> {
    proptest::collection::vec(prop_oneof![Just(0.0), 0.01f64..1.0, 0.01f64..1.0], n * n).prop_map(
        move |mut w| {
            for i in 0..n {
                let row = &mut w[i * n..(i + 1) * n];
                if row.iter().all(|&v| v == 0.0) {
                    row[i] = 1.0;
                }
                let s: f64 = row.iter().sum();
                row.iter_mut().for_each(|v| *v /= s);
            }
            StochasticMatrix::from_row_major(n, w, DEFAULT_TOL_ROW, DEFAULT_TOL_NEG).unwrap()
        },
    )
}

fn arb_pair() -> impl Strategy<Value = (StochasticMatrix, StochasticMatrix)> {
    (1usize..=6).prop_flat_map(|n| (arb_stochastic(n), arb_stochastic(n)))
}

fn arb_with_vector() -> impl Strategy<Value = (StochasticMatrix, Vec<f64>)> {
    (1usize..=6).prop_flat_map(|n| (arb_stochastic(n), proptest::collection::vec(-10.0f64..10.0, n)))
}

/// `min_c max_i |x_i - c|` by ternary search; the objective is convex.
fn distance_to_constants(x: &[f64]) -> f64 {
    let f = |c: f64| x.iter().map(|v| (v - c).abs()).fold(0.0, f64::max);
    let (mut lo, mut hi) = (-20.0, 20.0);
    for _ in 0..200 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if f(a) <= f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    f(0.5 * (lo + hi))
}

fn rows_equal(a: &StochasticMatrix) -> bool {
    (1..a.n()).all(|i| a.row(i).iter().zip(a.row(0)).all(|(x, y)| (x - y).abs() < 1e-15))
}

proptest! {
    #[test]
    fn vector_seminorm_is_distance_to_constants(x in proptest::collection::vec(-10.0f64..10.0, 1..8)) {
        let s = vector_seminorm(&x).unwrap();
        prop_assert!((s - distance_to_constants(&x)).abs() < 1e-9);
    }

    #[test]
    fn vector_seminorm_ignores_shifts_and_scales(
        x in proptest::collection::vec(-10.0f64..10.0, 1..8),
        c in -5.0f64..5.0,
        t in -3.0f64..3.0,
    ) {
        let s = vector_seminorm(&x).unwrap();
        let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
        let scaled: Vec<f64> = x.iter().map(|v| v * t).collect();
        prop_assert!((vector_seminorm(&shifted).unwrap() - s).abs() < 1e-9);
        prop_assert!((vector_seminorm(&scaled).unwrap() - t.abs() * s).abs() < 1e-9);
    }

    #[test]
    fn matrix_seminorm_is_in_unit_interval(a in (1usize..=7).prop_flat_map(arb_stochastic)) {
        let s = matrix_seminorm(&a);
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(s <= 1e-15, rows_equal(&a));
    }

    #[test]
    fn seminorm_is_submultiplicative((a, b) in arb_pair()) {
        let ab = a.multiply(&b).unwrap();
        prop_assert!(matrix_seminorm(&ab) <= matrix_seminorm(&a) * matrix_seminorm(&b) + SLACK);
    }

    #[test]
    fn seminorm_bounds_vector_disagreement((a, x) in arb_with_vector()) {
        let ax = a.apply(&x).unwrap();
        let lhs = vector_seminorm(&ax).unwrap();
        let rhs = matrix_seminorm(&a) * vector_seminorm(&x).unwrap();
        prop_assert!(lhs <= rhs + 1e-9, "{lhs} > {rhs}");
    }

    #[test]
    fn products_stay_stochastic((a, b) in arb_pair()) {
        let ab = a.multiply(&b).unwrap();
        for row in ab.rows() {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(row.iter().all(|&v| v >= 0.0));
        }
        // the pattern of a product is the composition of patterns
        prop_assert_eq!(ab.digraph(0.0), a.digraph(0.0).compose(&b.digraph(0.0)).unwrap());
    }

    #[test]
    fn power_matches_repeated_product(a in (1usize..=5).prop_flat_map(arb_stochastic), e in 0u128..12) {
        let mut expect = StochasticMatrix::identity(a.n()).unwrap();
        for _ in 0..e {
            expect = a.multiply(&expect).unwrap();
        }
        let got = a.pow(e);
        for (x, y) in got.as_slice().iter().zip(expect.as_slice()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn seminorm_is_invariant_under_relabelling(
        (a, perm) in (1usize..=6).prop_flat_map(|n| (arb_stochastic(n), Just((0..n).collect::<Vec<_>>()).prop_shuffle()))
    ) {
        let b = a.relabel(&perm).unwrap();
        prop_assert!((matrix_seminorm(&a) - matrix_seminorm(&b)).abs() < 1e-15);
        prop_assert_eq!(b.digraph(0.0), a.digraph(0.0).relabel(&perm).unwrap());
    }

    #[test]
    fn validation_rejects_rows_off_by_more_than_tolerance(
        a in (2usize..=5).prop_flat_map(arb_stochastic),
        row in 0usize..5,
        delta in 1e-6f64..0.5,
    ) {
        let n = a.n();
        let mut rows = a.to_rows();
        rows[row % n][0] += delta;
        prop_assert!(validate_stochastic(&rows, 1e-9, 1e-12).is_err());
        rows[row % n][0] -= delta;
        prop_assert!(validate_stochastic(&rows, 1e-9, 1e-12).is_ok());
    }
}
