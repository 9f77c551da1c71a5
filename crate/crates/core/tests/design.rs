mod common;

use nalgebra::DMatrix;
use wavereg::design::{build_design, predict_row, CoefficientLayout};
use wavereg::wavelet::evaluator;
use wavereg::Error;

#[test]
fn block_rows_sum_to_scale() {
    let ev = evaluator("db4tap").unwrap();
    let x = common::uniform_matrix(&mut common::rng(1), 50, 2);
    let b = build_design(&x, 3, &ev).unwrap();
    let layout = b.layout();
    for i in 0..50 {
        for j in 0..2 {
            let s: f64 = layout.block(j).map(|c| b.matrix()[(i, c)]).sum();
            assert!((s - 2f64.powf(1.5)).abs() < 1e-8, "row {i} block {j}: {s}");
        }
    }
}

#[test]
fn haar_level_one_two_predictors_rank_three() {
    let ev = evaluator("haar").unwrap();
    let x = common::uniform_matrix(&mut common::rng(2), 20, 2);
    let b = build_design(&x, 1, &ev).unwrap();
    assert_eq!(b.columns(), 4);
    assert_eq!(common::numerical_rank(b.matrix()), 3);
}

#[test]
fn rank_deficiency_is_p_minus_one() {
    for (name, level, p) in [("db4tap", 2u32, 3usize), ("coif24tap", 3, 2), ("haar", 2, 3)] {
        let ev = evaluator(name).unwrap();
        let x = common::uniform_matrix(&mut common::rng(3), 200, p);
        let b = build_design(&x, level, &ev).unwrap();
        assert_eq!(common::numerical_rank(b.matrix()), p * (1 << level) - (p - 1), "{name}");
    }
}

#[test]
fn row_permutation_permutes_design() {
    let ev = evaluator("coif24tap").unwrap();
    let x = common::uniform_matrix(&mut common::rng(4), 40, 3);
    let perm: Vec<usize> = (0..40).rev().collect();
    let xp = DMatrix::from_fn(40, 3, |i, j| x[(perm[i], j)]);
    let b = build_design(&x, 2, &ev).unwrap();
    let bp = build_design(&xp, 2, &ev).unwrap();
    for (i, &src) in perm.iter().enumerate() {
        assert_eq!(bp.matrix().row(i), b.matrix().row(src));
    }
}

#[test]
fn rows_match_single_point_rows() {
    let ev = evaluator("db4tap").unwrap();
    let x = common::uniform_matrix(&mut common::rng(6), 30, 2);
    let b = build_design(&x, 3, &ev).unwrap();
    for i in 0..30 {
        let row = predict_row(&[x[(i, 0)], x[(i, 1)]], 3, &ev).unwrap();
        for (c, v) in row.iter().enumerate() {
            assert_eq!(*v, b.matrix()[(i, c)]);
        }
    }
}

#[test]
fn thread_count_does_not_change_design() {
    let ev = evaluator("coif24tap").unwrap();
    let x = common::uniform_matrix(&mut common::rng(7), 300, 4);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| build_design(&x, 4, &ev).unwrap());
    let b = four.install(|| build_design(&x, 4, &ev).unwrap());
    assert_eq!(a.matrix(), b.matrix());
}

#[test]
fn endpoints_and_errors() {
    let ev = evaluator("db4tap").unwrap();
    let x = DMatrix::from_column_slice(4, 1, &[0.0, 1.0, 0.5, 0.25]);
    let b = build_design(&x, 2, &ev).unwrap();
    // x = 1 wraps to x = 0
    assert!((b.matrix().row(0) - b.matrix().row(1)).amax() < 1e-12);
    let too_many = DMatrix::from_element(7, 1, 0.5);
    assert!(matches!(
        build_design(&too_many, 3, &ev),
        Err(Error::Dimensionality { .. })
    ));
    let nan = DMatrix::from_element(8, 1, f64::NAN);
    assert!(matches!(build_design(&nan, 1, &ev), Err(Error::Domain(_))));
    assert!(matches!(
        build_design(&DMatrix::zeros(0, 1), 0, &ev),
        Err(Error::Shape(_))
    ));
    let layout = CoefficientLayout::new(2, 3);
    assert_eq!(layout.columns(), 12);
    assert_eq!(layout.column(2, 1), 9);
}
