//! Minimum-norm equality-constrained least squares over a scalar field.
//!
//! Solves `min ||A X - B||_F  s.t.  C X = D` for full-row-rank `C` through the
//! QR factorization `C^H = Q [R; 0]`: with `A Q = [P1, P2]`,
//!
//! ```text
//! X = Q [ (R^H)^{-1} D ; P2^+ (B - P1 (R^H)^{-1} D) ]
//! ```

use nalgebra::linalg::SVD;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{default_tol, pinv, qr_full, rank_check_detail, Field, Qr};

#[derive(Debug, Clone, PartialEq)]
pub struct LseInstance<T: Field> {
    pub a: DMatrix<T>,
    pub b: DMatrix<T>,
    pub c: DMatrix<T>,
    pub d: DMatrix<T>,
}

impl<T: Field> LseInstance<T> {
    pub fn new(a: DMatrix<T>, b: DMatrix<T>, c: DMatrix<T>, d: DMatrix<T>) -> Result<Self> {
        let op = "LseInstance::new";
        if a.ncols() != c.ncols() {
            return Err(Error::dims(op, format!("A has {} columns, C has {}", a.ncols(), c.ncols())));
        }
        if a.nrows() != b.nrows() {
            return Err(Error::dims(op, format!("A has {} rows, B has {}", a.nrows(), b.nrows())));
        }
        if c.nrows() != d.nrows() {
            return Err(Error::dims(op, format!("C has {} rows, D has {}", c.nrows(), d.nrows())));
        }
        if b.ncols() != d.ncols() {
            return Err(Error::dims(op, format!("B has {} columns, D has {}", b.ncols(), d.ncols())));
        }
        if c.nrows() > c.ncols() {
            return Err(Error::dims(
                op,
                format!("C is {}x{}; more constraints than unknowns", c.nrows(), c.ncols()),
            ));
        }
        Ok(LseInstance { a, b, c, d })
    }

    /// Number of unknown rows `n`.
    pub fn unknowns(&self) -> usize {
        self.a.ncols()
    }

    pub fn constraints(&self) -> usize {
        self.c.nrows()
    }

    pub fn residual_norm(&self, x: &DMatrix<T>) -> f64 {
        (&self.a * x - &self.b).norm()
    }

    pub fn constraint_violation(&self, x: &DMatrix<T>) -> f64 {
        (&self.c * x - &self.d).norm()
    }
}

#[derive(Debug, Clone)]
pub struct LseSolution<T: Field> {
    pub x: DMatrix<T>,
    /// `n x n` unitary factor of `C^H`.
    pub q: DMatrix<T>,
    /// `p x p` upper triangular factor of `C^H`.
    pub r: DMatrix<T>,
    pub p1: DMatrix<T>,
    pub p2: DMatrix<T>,
    pub residual_norm: f64,
    pub constraint_violation: f64,
}

pub fn solve_lse<T: Field>(inst: &LseInstance<T>) -> Result<LseSolution<T>> {
    solve_lse_with_tol(inst, None)
}

/// [`solve_lse`] with an explicit rank tolerance for the constraint check.
pub fn solve_lse_with_tol<T: Field>(inst: &LseInstance<T>, rank_tol: Option<f64>) -> Result<LseSolution<T>> {
    let n = inst.unknowns();
    let p = inst.constraints();
    let check = rank_check_detail(&inst.c, rank_tol);
    if !check.full_row_rank {
        return Err(Error::RankDeficientConstraint {
            sigma_min: check.sigma_min,
            tol: check.tol,
        });
    }

    let Qr { q, r } = qr_full(&inst.c.adjoint());
    let r = r.rows(0, p).into_owned();
    let aq = &inst.a * &q;
    let p1 = aq.columns(0, p).into_owned();
    let p2 = aq.columns(p, n - p).into_owned();

    let y = r
        .adjoint()
        .solve_lower_triangular(&inst.d)
        .ok_or(Error::RankDeficientConstraint {
            sigma_min: 0.0,
            tol: check.tol,
        })?;
    let z = pinv(&p2, None) * (&inst.b - &p1 * &y);

    let mut yz = DMatrix::<T>::zeros(n, inst.d.ncols());
    yz.rows_mut(0, p).copy_from(&y);
    yz.rows_mut(p, n - p).copy_from(&z);
    let x = &q * yz;

    Ok(LseSolution {
        residual_norm: inst.residual_norm(&x),
        constraint_violation: inst.constraint_violation(&x),
        x,
        q,
        r,
        p1,
        p2,
    })
}

/// Orthonormal basis of `null(C)` from a full SVD, as `n x (n - p)` columns.
pub fn nullspace_basis<T: Field>(c: &DMatrix<T>) -> DMatrix<T> {
    let (p, n) = c.shape();
    // Padding to a square matrix makes the reference SVD return all n right
    // singular vectors.
    let mut padded = DMatrix::<T>::zeros(n, n);
    padded.rows_mut(0, p).copy_from(c);
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut basis = DMatrix::<T>::zeros(n, n - p);
    for (col, &idx) in order[p..].iter().enumerate() {
        basis.column_mut(col).copy_from(&v_t.row(idx).adjoint());
    }
    basis
}

fn reference_pinv<T: Field>(m: &DMatrix<T>) -> DMatrix<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return DMatrix::zeros(m.ncols(), m.nrows());
    }
    let svd = SVD::new(m.clone(), true, true);
    let smax = svd.singular_values.max();
    svd.pseudo_inverse(default_tol(m.shape(), smax))
        .expect("U and V^T were computed")
}

/// Independent solution of the same problem by the nullspace method:
/// `X = C^+ D + N (A N)^+ (B - A C^+ D)` with `N` an orthonormal basis of
/// `null(C)`. Uses the reference SVD only, none of the QR path.
pub fn lse_oracle<T: Field>(inst: &LseInstance<T>) -> Result<DMatrix<T>> {
    let c = &inst.c;
    let sv = c.clone().singular_values();
    let (smin, smax) = if sv.is_empty() { (f64::INFINITY, 0.0) } else { (sv.min(), sv.max()) };
    let tol = default_tol(c.shape(), smax);
    if sv.len() != c.nrows() || smin <= tol {
        return Err(Error::RankDeficientConstraint { sigma_min: smin, tol });
    }
    let c_pinv = reference_pinv(c);
    let x0 = &c_pinv * &inst.d;
    let null = nullspace_basis(c);
    if null.ncols() == 0 {
        return Ok(x0);
    }
    let an = &inst.a * &null;
    Ok(&x0 + &null * reference_pinv(&an) * (&inst.b - &inst.a * &x0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_real(rng: &mut ChaCha8Rng, k: usize, l: usize) -> DMatrix<f64> {
        DMatrix::from_fn(k, l, |_, _| rng.random_range(-1.0..1.0))
    }

    fn rand_complex(rng: &mut ChaCha8Rng, k: usize, l: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(k, l, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn identity_constraint_pins_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = rand_real(&mut rng, 4, 2);
        let inst = LseInstance::new(
            rand_real(&mut rng, 9, 4),
            rand_real(&mut rng, 9, 2),
            DMatrix::identity(4, 4),
            d.clone(),
        )
        .unwrap();
        let sol = solve_lse(&inst).unwrap();
        assert_eq!(sol.p2.ncols(), 0);
        assert!((&sol.x - &d).norm() < 1e-15);
        assert!((lse_oracle(&inst).unwrap() - &d).norm() < 1e-15);
    }

    #[test]
    fn symmetric_two_variable_example() {
        let inst = LseInstance::new(
            DMatrix::identity(2, 2),
            DMatrix::from_column_slice(2, 1, &[1.0, 1.0]),
            DMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
            DMatrix::from_element(1, 1, 1.0),
        )
        .unwrap();
        let expected = DMatrix::from_column_slice(2, 1, &[0.5, 0.5]);
        assert!((solve_lse(&inst).unwrap().x - &expected).norm() < 1e-15);
        assert!((lse_oracle(&inst).unwrap() - &expected).norm() < 1e-15);
    }

    #[test]
    fn random_real_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let inst = LseInstance::new(
            rand_real(&mut rng, 10, 6),
            rand_real(&mut rng, 10, 2),
            rand_real(&mut rng, 2, 6),
            rand_real(&mut rng, 2, 2),
        )
        .unwrap();
        let x = solve_lse(&inst).unwrap().x;
        let oracle = lse_oracle(&inst).unwrap();
        assert!((&x - &oracle).norm() <= 1e-9 * oracle.norm());
    }

    #[test]
    fn rank_deficient_constraint_is_rejected() {
        let c = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let inst = LseInstance::new(
            DMatrix::identity(3, 3),
            DMatrix::zeros(3, 1),
            c,
            DMatrix::zeros(2, 1),
        )
        .unwrap();
        assert!(matches!(solve_lse(&inst), Err(Error::RankDeficientConstraint { .. })));
        assert!(matches!(lse_oracle(&inst), Err(Error::RankDeficientConstraint { .. })));
    }

    #[test]
    fn dimension_mismatches() {
        let z = |r, c| DMatrix::<f64>::zeros(r, c);
        assert!(LseInstance::new(z(5, 3), z(5, 1), z(1, 4), z(1, 1)).is_err());
        assert!(LseInstance::new(z(5, 3), z(4, 1), z(1, 3), z(1, 1)).is_err());
        assert!(LseInstance::new(z(5, 3), z(5, 2), z(1, 3), z(1, 1)).is_err());
        assert!(LseInstance::new(z(5, 3), z(5, 1), z(4, 3), z(4, 1)).is_err());
    }

    #[test]
    fn complex_optimality_conditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let inst = LseInstance::new(
            rand_complex(&mut rng, 12, 7),
            rand_complex(&mut rng, 12, 3),
            rand_complex(&mut rng, 3, 7),
            rand_complex(&mut rng, 3, 3),
        )
        .unwrap();
        let sol = solve_lse(&inst).unwrap();
        assert!(sol.constraint_violation < 1e-12);
        let grad = sol.p2.adjoint() * (&inst.a * &sol.x - &inst.b);
        assert!(grad.norm() <= 1e-10 * inst.a.norm() * inst.b.norm());
        let null = nullspace_basis(&inst.c);
        let grad_oracle = (&inst.a * &null).adjoint() * (&inst.a * &sol.x - &inst.b);
        assert!(grad_oracle.norm() <= 1e-10 * inst.a.norm() * inst.b.norm());
        for i in 0..sol.r.nrows() {
            for j in 0..i {
                assert_eq!(sol.r[(i, j)], Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn minimum_norm_over_rank_deficient_family() {
        // A annihilates part of null(C), so the minimizers form an affine
        // family; the solver must pick the member of least norm.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 6;
        let c = rand_real(&mut rng, 2, n);
        let null = nullspace_basis(&c);
        // A = M * (projector onto the first two null directions)^perp
        let kill = null.columns(0, 2).into_owned();
        let proj = DMatrix::<f64>::identity(n, n) - &kill * kill.transpose();
        let a = rand_real(&mut rng, 10, n) * proj;
        let inst = LseInstance::new(a, rand_real(&mut rng, 10, 2), c, rand_real(&mut rng, 2, 2)).unwrap();
        let x = solve_lse(&inst).unwrap().x;
        let oracle = lse_oracle(&inst).unwrap();
        assert!((&x - &oracle).norm() <= 1e-9 * oracle.norm());
        let base = inst.residual_norm(&x);
        for k in 0..10 {
            let v = rand_real(&mut rng, 2, 2) * (0.1 * (k + 1) as f64);
            let alt = &x + &kill * v;
            assert!((inst.residual_norm(&alt) - base).abs() < 1e-10);
            assert!(inst.constraint_violation(&alt) < 1e-10);
            assert!(x.norm() <= alt.norm() + 1e-9);
        }
    }
}
