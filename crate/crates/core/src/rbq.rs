//! Reduced biquaternion scalars and matrices.
//!
//! A reduced biquaternion is `p0 + p1 i + p2 j + p3 k` with the commutative
//! multiplication table `i^2 = k^2 = -1`, `j^2 = 1`, `ij = ji = k`,
//! `jk = kj = i`, `ki = ik = -j`. Writing `r1 = p0 + p1 i` and
//! `r2 = p2 + p3 i`, every element is also `r1 + r2 j` with complex `r1, r2`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RBScalar {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl RBScalar {
    pub const ZERO: RBScalar = RBScalar::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: RBScalar = RBScalar::new(1.0, 0.0, 0.0, 0.0);
    pub const I: RBScalar = RBScalar::new(0.0, 1.0, 0.0, 0.0);
    pub const J: RBScalar = RBScalar::new(0.0, 0.0, 1.0, 0.0);
    pub const K: RBScalar = RBScalar::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(p0: f64, p1: f64, p2: f64, p3: f64) -> Self {
        RBScalar { p0, p1, p2, p3 }
    }

    pub const fn real(x: f64) -> Self {
        RBScalar::new(x, 0.0, 0.0, 0.0)
    }

    pub fn from_complex(z: Complex64) -> Self {
        RBScalar::new(z.re, z.im, 0.0, 0.0)
    }

    /// Builds `r1 + r2 j`.
    pub fn from_complex_pair(r1: Complex64, r2: Complex64) -> Self {
        RBScalar::new(r1.re, r1.im, r2.re, r2.im)
    }

    /// Idempotent `(1 + j) / 2`.
    pub const fn e1() -> Self {
        RBScalar::new(0.5, 0.0, 0.5, 0.0)
    }

    /// Idempotent `(1 - j) / 2`; `e1 * e2 = 0`.
    pub const fn e2() -> Self {
        RBScalar::new(0.5, 0.0, -0.5, 0.0)
    }

    pub fn r1(&self) -> Complex64 {
        Complex64::new(self.p0, self.p1)
    }

    pub fn r2(&self) -> Complex64 {
        Complex64::new(self.p2, self.p3)
    }

    pub fn components(&self) -> [f64; 4] {
        [self.p0, self.p1, self.p2, self.p3]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.p0 * self.p0 + self.p1 * self.p1 + self.p2 * self.p2 + self.p3 * self.p3
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Same value as [`norm`](Self::norm), evaluated as `sqrt(|r1|^2 + |r2|^2)`.
    pub fn norm_complex_pair(&self) -> f64 {
        (self.r1().norm_sqr() + self.r2().norm_sqr()).sqrt()
    }
}

impl Add for RBScalar {
    type Output = RBScalar;
    fn add(self, o: RBScalar) -> RBScalar {
        RBScalar::new(self.p0 + o.p0, self.p1 + o.p1, self.p2 + o.p2, self.p3 + o.p3)
    }
}

impl Sub for RBScalar {
    type Output = RBScalar;
    fn sub(self, o: RBScalar) -> RBScalar {
        RBScalar::new(self.p0 - o.p0, self.p1 - o.p1, self.p2 - o.p2, self.p3 - o.p3)
    }
}

impl Neg for RBScalar {
    type Output = RBScalar;
    fn neg(self) -> RBScalar {
        RBScalar::new(-self.p0, -self.p1, -self.p2, -self.p3)
    }
}

impl Mul for RBScalar {
    type Output = RBScalar;

    // Terms are grouped in symmetric pairs so that swapping the operands
    // evaluates bitwise-identical floating point expressions.
    fn mul(self, o: RBScalar) -> RBScalar {
        let (a, b) = (self, o);
        RBScalar::new(
            (a.p0 * b.p0 + a.p2 * b.p2) - (a.p1 * b.p1 + a.p3 * b.p3),
            (a.p0 * b.p1 + a.p1 * b.p0) + (a.p2 * b.p3 + a.p3 * b.p2),
            (a.p0 * b.p2 + a.p2 * b.p0) - (a.p1 * b.p3 + a.p3 * b.p1),
            (a.p0 * b.p3 + a.p3 * b.p0) + (a.p1 * b.p2 + a.p2 * b.p1),
        )
    }
}

impl Mul<f64> for RBScalar {
    type Output = RBScalar;
    fn mul(self, s: f64) -> RBScalar {
        RBScalar::new(self.p0 * s, self.p1 * s, self.p2 * s, self.p3 * s)
    }
}

impl fmt::Display for RBScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.p0, self.p1, self.p2, self.p3)
    }
}

/// An `m x n` reduced biquaternion matrix `M0 + M1 i + M2 j + M3 k`, stored
/// as four real component planes of equal shape.
#[derive(Debug, Clone, PartialEq)]
pub struct RBMatrix {
    planes: [DMatrix<f64>; 4],
}

impl RBMatrix {
    pub fn new(
        m0: DMatrix<f64>,
        m1: DMatrix<f64>,
        m2: DMatrix<f64>,
        m3: DMatrix<f64>,
    ) -> Result<Self> {
        let shape = m0.shape();
        for (idx, plane) in [&m1, &m2, &m3].into_iter().enumerate() {
            if plane.shape() != shape {
                return Err(Error::dims(
                    "RBMatrix::new",
                    format!("plane {} is {:?}, plane 0 is {:?}", idx + 1, plane.shape(), shape),
                ));
            }
        }
        Ok(RBMatrix {
            planes: [m0, m1, m2, m3],
        })
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        RBMatrix {
            planes: std::array::from_fn(|_| DMatrix::zeros(m, n)),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut out = RBMatrix::zeros(n, n);
        out.planes[0].fill_with_identity();
        out
    }

    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize) -> RBScalar) -> Self {
        let mut out = RBMatrix::zeros(m, n);
        for j in 0..n {
            for i in 0..m {
                out.set(i, j, f(i, j));
            }
        }
        out
    }

    /// Embeds a real matrix (`M1 = M2 = M3 = 0`).
    pub fn from_real(x: &DMatrix<f64>) -> Self {
        let (m, n) = x.shape();
        let mut out = RBMatrix::zeros(m, n);
        out.planes[0].copy_from(x);
        out
    }

    /// Embeds a complex matrix as `N1 = x`, `N2 = 0`.
    pub fn from_complex(x: &DMatrix<Complex64>) -> Self {
        RBMatrix {
            planes: [
                x.map(|z| z.re),
                x.map(|z| z.im),
                DMatrix::zeros(x.nrows(), x.ncols()),
                DMatrix::zeros(x.nrows(), x.ncols()),
            ],
        }
    }

    /// Builds `N1 + N2 j`.
    pub fn from_complex_planes(n1: &DMatrix<Complex64>, n2: &DMatrix<Complex64>) -> Result<Self> {
        if n1.shape() != n2.shape() {
            return Err(Error::dims(
                "RBMatrix::from_complex_planes",
                format!("{:?} vs {:?}", n1.shape(), n2.shape()),
            ));
        }
        RBMatrix::new(
            n1.map(|z| z.re),
            n1.map(|z| z.im),
            n2.map(|z| z.re),
            n2.map(|z| z.im),
        )
    }

    pub fn nrows(&self) -> usize {
        self.planes[0].nrows()
    }

    pub fn ncols(&self) -> usize {
        self.planes[0].ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.planes[0].shape()
    }

    /// Component plane `idx` (0 for the real part, then `i`, `j`, `k`).
    pub fn plane(&self, idx: usize) -> &DMatrix<f64> {
        &self.planes[idx]
    }

    pub fn planes(&self) -> &[DMatrix<f64>; 4] {
        &self.planes
    }

    pub fn into_planes(self) -> [DMatrix<f64>; 4] {
        self.planes
    }

    /// `N1 = M0 + M1 i`.
    pub fn n1(&self) -> DMatrix<Complex64> {
        self.planes[0].zip_map(&self.planes[1], Complex64::new)
    }

    /// `N2 = M2 + M3 i`.
    pub fn n2(&self) -> DMatrix<Complex64> {
        self.planes[2].zip_map(&self.planes[3], Complex64::new)
    }

    pub fn get(&self, i: usize, j: usize) -> RBScalar {
        let p = &self.planes;
        RBScalar::new(p[0][(i, j)], p[1][(i, j)], p[2][(i, j)], p[3][(i, j)])
    }

    pub fn set(&mut self, i: usize, j: usize, v: RBScalar) {
        for (plane, c) in self.planes.iter_mut().zip(v.components()) {
            plane[(i, j)] = c;
        }
    }

    /// True when every imaginary plane is exactly zero.
    pub fn is_real(&self) -> bool {
        self.planes[1..].iter().all(|p| p.iter().all(|&x| x == 0.0))
    }

    pub fn mat_mul(&self, rhs: &RBMatrix) -> Result<RBMatrix> {
        if self.ncols() != rhs.nrows() {
            return Err(Error::dims(
                "mat_mul",
                format!("{:?} times {:?}", self.shape(), rhs.shape()),
            ));
        }
        let [a0, a1, a2, a3] = &self.planes;
        let [b0, b1, b2, b3] = &rhs.planes;
        Ok(RBMatrix {
            planes: [
                a0 * b0 - a1 * b1 + a2 * b2 - a3 * b3,
                a0 * b1 + a1 * b0 + a2 * b3 + a3 * b2,
                a0 * b2 + a2 * b0 - a1 * b3 - a3 * b1,
                a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1,
            ],
        })
    }

    /// `self * x` for a real matrix `x`.
    pub fn mul_real(&self, x: &DMatrix<f64>) -> Result<RBMatrix> {
        if self.ncols() != x.nrows() {
            return Err(Error::dims(
                "mul_real",
                format!("{:?} times {:?}", self.shape(), x.shape()),
            ));
        }
        Ok(RBMatrix {
            planes: std::array::from_fn(|k| &self.planes[k] * x),
        })
    }

    /// `self * x` for a complex matrix `x`: `(N1 + N2 j) x = N1 x + (N2 x) j`.
    pub fn mul_complex(&self, x: &DMatrix<Complex64>) -> Result<RBMatrix> {
        if self.ncols() != x.nrows() {
            return Err(Error::dims(
                "mul_complex",
                format!("{:?} times {:?}", self.shape(), x.shape()),
            ));
        }
        RBMatrix::from_complex_planes(&(self.n1() * x), &(self.n2() * x))
    }

    pub fn add(&self, rhs: &RBMatrix) -> Result<RBMatrix> {
        self.zip_planes(rhs, "add", |a, b| a + b)
    }

    pub fn sub(&self, rhs: &RBMatrix) -> Result<RBMatrix> {
        self.zip_planes(rhs, "sub", |a, b| a - b)
    }

    fn zip_planes(
        &self,
        rhs: &RBMatrix,
        op: &'static str,
        f: impl Fn(&DMatrix<f64>, &DMatrix<f64>) -> DMatrix<f64>,
    ) -> Result<RBMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::dims(op, format!("{:?} vs {:?}", self.shape(), rhs.shape())));
        }
        Ok(RBMatrix {
            planes: std::array::from_fn(|k| f(&self.planes[k], &rhs.planes[k])),
        })
    }

    /// Entry-wise `alpha * a_ij`.
    pub fn scale(&self, alpha: RBScalar) -> RBMatrix {
        let [m0, m1, m2, m3] = &self.planes;
        let RBScalar { p0, p1, p2, p3 } = alpha;
        RBMatrix {
            planes: [
                m0 * p0 - m1 * p1 + m2 * p2 - m3 * p3,
                m1 * p0 + m0 * p1 + m3 * p2 + m2 * p3,
                m2 * p0 - m3 * p1 + m0 * p2 - m1 * p3,
                m3 * p0 + m2 * p1 + m1 * p2 + m0 * p3,
            ],
        }
    }

    pub fn scale_real(&self, s: f64) -> RBMatrix {
        RBMatrix {
            planes: std::array::from_fn(|k| &self.planes[k] * s),
        }
    }

    /// `sqrt(sum_ij |m_ij|^2)`.
    pub fn frobenius_norm(&self) -> f64 {
        self.planes
            .iter()
            .map(|p| p.norm_squared())
            .sum::<f64>()
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scalar() -> impl Strategy<Value = RBScalar> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_map(|(a, b, c, d)| RBScalar::new(a, b, c, d))
    }

    fn rel_close(a: RBScalar, b: RBScalar, tol: f64) -> bool {
        (a - b).norm() <= tol * a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn multiplication_table() {
        use RBScalar as S;
        assert_eq!(S::J * S::J, S::ONE);
        assert_eq!(S::I * S::I, -S::ONE);
        assert_eq!(S::K * S::K, -S::ONE);
        assert_eq!(S::I * S::J, S::K);
        assert_eq!(S::J * S::I, S::K);
        assert_eq!(S::J * S::K, S::I);
        assert_eq!(S::K * S::J, S::I);
        assert_eq!(S::K * S::I, -S::J);
        assert_eq!(S::I * S::K, -S::J);
    }

    #[test]
    fn identity_and_zero_divisors() {
        let z = RBScalar::new(2.0, 3.0, -1.0, 0.5);
        assert_eq!(z * RBScalar::ONE, z);
        let prod = RBScalar::e1() * RBScalar::e2();
        assert_eq!(prod, RBScalar::ZERO);
        assert_eq!(prod.norm(), 0.0);
        assert_eq!(RBScalar::e1() * RBScalar::e1(), RBScalar::e1());
        assert_eq!(RBScalar::e2() * RBScalar::e2(), RBScalar::e2());
    }

    #[test]
    fn norms() {
        assert_eq!(RBScalar::new(1.0, 1.0, 1.0, 1.0).norm(), 2.0);
        assert_eq!(RBScalar::ZERO.norm(), 0.0);
        assert!((RBScalar::e1().norm() - 0.5f64.sqrt()).abs() < 1e-16);
        let m = RBMatrix::from_fn(1, 1, |_, _| RBScalar::new(1.0, 1.0, 1.0, 1.0));
        assert_eq!(m.frobenius_norm(), 2.0);
        assert_eq!(RBMatrix::zeros(3, 2).frobenius_norm(), 0.0);
    }

    #[test]
    fn one_by_one_product_matches_scalar() {
        let a = RBScalar::new(0.3, -1.2, 2.0, 0.7);
        let b = RBScalar::new(-0.4, 0.9, 0.1, -1.5);
        let ma = RBMatrix::from_fn(1, 1, |_, _| a);
        let mb = RBMatrix::from_fn(1, 1, |_, _| b);
        let prod = ma.mat_mul(&mb).unwrap().get(0, 0);
        assert!(rel_close(prod, a * b, 1e-15));
    }

    #[test]
    fn shape_errors() {
        let a = RBMatrix::zeros(2, 3);
        assert!(a.mat_mul(&RBMatrix::zeros(2, 3)).is_err());
        assert!(a.add(&RBMatrix::zeros(3, 2)).is_err());
        assert!(RBMatrix::new(
            DMatrix::zeros(2, 2),
            DMatrix::zeros(2, 2),
            DMatrix::zeros(2, 3),
            DMatrix::zeros(2, 2)
        )
        .is_err());
    }

    #[test]
    fn complex_views_are_lossless() {
        let m = RBMatrix::from_fn(3, 2, |i, j| {
            RBScalar::new(i as f64, j as f64, (i * j) as f64 + 0.5, -(i as f64))
        });
        let back = RBMatrix::from_complex_planes(&m.n1(), &m.n2()).unwrap();
        assert_eq!(back, m);
    }

    proptest! {
        #[test]
        fn mul_commutes_bitwise(a in scalar(), b in scalar()) {
            prop_assert_eq!(a * b, b * a);
        }

        #[test]
        fn mul_associates(a in scalar(), b in scalar(), c in scalar()) {
            prop_assert!(rel_close((a * b) * c, a * (b * c), 1e-14));
        }

        #[test]
        fn norm_formulas_agree(a in scalar()) {
            let (x, y) = (a.norm(), a.norm_complex_pair());
            prop_assert!((x - y).abs() <= 1e-15 * x.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn scale_matches_entrywise_product(alpha in scalar(), e in scalar()) {
            let m = RBMatrix::from_fn(1, 1, |_, _| e);
            prop_assert!(rel_close(m.scale(alpha).get(0, 0), alpha * e, 1e-15));
        }
    }
}
