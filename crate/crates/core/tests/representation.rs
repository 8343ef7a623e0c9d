use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rblse_core::generate::random_rb_matrix;
use rblse_core::repr::*;
use rblse_core::{RBMatrix, RBScalar};

fn rb(m: usize, n: usize, seed: u64) -> RBMatrix {
    random_rb_matrix(m, n, seed, 0, -1.0..1.0)
}

fn rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

fn relc(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

fn dims() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (1usize..6, 1usize..6, 1usize..6, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_matches_real_rep_product((m, n, t, seed) in dims()) {
        let a = rb(m, n, seed);
        let b = rb(n, t, seed ^ 1);
        let ab = a.mat_mul(&b).unwrap();
        let rr = real_rep(&a).into_matrix() * real_rep(&b).into_matrix();
        prop_assert!(rel(real_rep(&ab).as_matrix(), &rr) <= 1e-12);
        let from = from_real_rep(&rr, external_struct_tol(&rr)).unwrap();
        prop_assert!(from.sub(&ab).unwrap().frobenius_norm() <= 1e-12 * ab.frobenius_norm());
        let cc = complex_rep(&a).into_matrix() * complex_rep(&b).into_matrix();
        prop_assert!(relc(complex_rep(&ab).as_matrix(), &cc) <= 1e-12);
    }

    #[test]
    fn sums_and_scalings_transfer((m, n, _t, seed) in dims(), alpha in -3.0..3.0f64, br in -2.0..2.0f64, bi in -2.0..2.0f64) {
        let p = rb(m, n, seed);
        let q = rb(m, n, seed ^ 7);
        let sum = p.add(&q).unwrap();
        prop_assert!(rel(real_rep(&sum).as_matrix(), &(real_rep(&p).into_matrix() + real_rep(&q).into_matrix())) <= 1e-12);
        prop_assert!(relc(complex_rep(&sum).as_matrix(), &(complex_rep(&p).into_matrix() + complex_rep(&q).into_matrix())) <= 1e-12);
        let scaled = p.scale(RBScalar::real(alpha));
        prop_assert!(rel(real_rep(&scaled).as_matrix(), &(real_rep(&p).into_matrix() * alpha)) <= 1e-12);
        let beta = Complex64::new(br, bi);
        let scaled = p.scale(RBScalar::from_complex(beta));
        prop_assert!(relc(complex_rep(&scaled).as_matrix(), &(complex_rep(&p).into_matrix() * beta)) <= 1e-12);
        prop_assert_eq!(p.add(&RBMatrix::zeros(m, n)).unwrap(), p.clone());
        prop_assert_eq!(p.scale(RBScalar::ONE), p);
    }

    #[test]
    fn norm_identities((m, n, _t, seed) in dims()) {
        let x = rb(m, n, seed);
        let f = x.frobenius_norm();
        prop_assert!((f - 0.5 * real_rep(&x).norm()).abs() <= 1e-12 * f);
        prop_assert!((f - real_rep_col(&x).norm()).abs() <= 1e-12 * f);
        prop_assert!((f - complex_rep(&x).norm() / 2f64.sqrt()).abs() <= 1e-12 * f);
        prop_assert!((f - complex_rep_col(&x).norm()).abs() <= 1e-12 * f);
        // Each block column of the expansion has the norm of the first one.
        let col = real_rep_col(&x).into_matrix();
        for kind in [OperatorKind::Q, OperatorKind::R, OperatorKind::S] {
            let blk = BlockOperator::new(kind, m).apply(&col).unwrap();
            prop_assert!((blk.norm() - col.norm()).abs() <= 1e-12 * f);
        }
        prop_assert!((expand_real_col(&col).unwrap().norm() - 2.0 * col.norm()).abs() <= 1e-12 * f);
        let ccol = complex_rep_col(&x).into_matrix();
        prop_assert!((expand_complex_col(&ccol).unwrap().norm() - 2f64.sqrt() * ccol.norm()).abs() <= 1e-12 * f);
    }

    #[test]
    fn expansion_and_round_trips((m, n, _t, seed) in dims()) {
        let x = rb(m, n, seed);
        prop_assert_eq!(expand_real_col(real_rep_col(&x).as_matrix()).unwrap(), real_rep(&x));
        prop_assert_eq!(expand_complex_col(complex_rep_col(&x).as_matrix()).unwrap(), complex_rep(&x));
        prop_assert_eq!(from_real_rep(real_rep(&x).as_matrix(), STRUCT_TOL_EXACT).unwrap(), x.clone());
        prop_assert_eq!(from_complex_rep(complex_rep(&x).as_matrix(), STRUCT_TOL_EXACT).unwrap(), x.clone());
        prop_assert_eq!(from_real_rep_col(real_rep_col(&x).as_matrix()).unwrap(), x.clone());
        prop_assert_eq!(from_complex_rep_col(complex_rep_col(&x).as_matrix()).unwrap(), x);
    }

    #[test]
    fn block_operators((m, cols, _t, seed) in dims()) {
        let x4 = random_rb_matrix(4 * m, cols, seed, 1, -1.0..1.0).plane(0).clone();
        for kind in [OperatorKind::Q, OperatorKind::R, OperatorKind::S] {
            let op = BlockOperator::new(kind, m);
            let dense = op.dense();
            prop_assert_eq!(&dense.transpose() * &dense, DMatrix::identity(4 * m, 4 * m));
            prop_assert_eq!(op.apply(&x4).unwrap(), &dense * &x4);
            prop_assert_eq!(op.apply_transpose(&op.apply(&x4).unwrap()).unwrap(), x4.clone());
        }
        let x2 = random_rb_matrix(m, cols, seed, 2, -1.0..1.0);
        let c2 = complex_rep_col(&x2).into_matrix();
        let pm = BlockOperator::new(OperatorKind::P, m);
        prop_assert_eq!(pm.apply(&pm.apply(&c2).unwrap()).unwrap(), c2.clone());
        let dense = pm.dense();
        prop_assert_eq!(&dense * &dense, DMatrix::identity(2 * m, 2 * m));
        prop_assert_eq!(pm.apply(&c2).unwrap(), dense.map(Complex64::from) * &c2);
    }

    #[test]
    fn equality_transfer((m, n, _t, seed) in dims(), i in 0usize..36, comp in 0usize..4) {
        let p = rb(m, n, seed);
        let q = p.clone();
        prop_assert_eq!(real_rep(&p), real_rep(&q));
        prop_assert_eq!(complex_rep(&p), complex_rep(&q));
        let mut r = p.clone();
        let (ri, rj) = (i % m, (i / m) % n);
        let mut e = r.get(ri, rj).components();
        e[comp] += 1e-9;
        r.set(ri, rj, RBScalar::new(e[0], e[1], e[2], e[3]));
        prop_assert_ne!(real_rep(&p), real_rep(&r));
        prop_assert_ne!(complex_rep(&p), complex_rep(&r));
    }
}

#[test]
fn product_with_identity() {
    let a = rb(4, 3, 99);
    assert_eq!(a.mat_mul(&RBMatrix::identity(3)).unwrap(), a);
}

#[test]
fn fixed_product_via_real_rep() {
    let a = rb(3, 2, 1);
    let b = rb(2, 4, 2);
    let rr = real_rep(&a).into_matrix() * real_rep(&b).into_matrix();
    let via = from_real_rep(&rr, external_struct_tol(&rr)).unwrap();
    let direct = a.mat_mul(&b).unwrap();
    assert!(via.sub(&direct).unwrap().frobenius_norm() <= 1e-14);
    let f = rb(4, 3, 5);
    assert!((f.frobenius_norm() - real_rep_col(&f).norm()).abs() <= 1e-15 * f.frobenius_norm());
}
