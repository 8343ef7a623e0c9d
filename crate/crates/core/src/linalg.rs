//! Dense factorizations over real or complex scalars: full Householder QR,
//! one-sided Jacobi SVD, Moore-Penrose pseudoinverse and rank checks.

use nalgebra::{ComplexField, DMatrix, DVector};

/// Scalar field for the dense kernels: `f64` or `Complex64`.
pub trait Field: ComplexField<RealField = f64> + Copy {}

impl<T: ComplexField<RealField = f64> + Copy> Field for T {}

/// Full QR factorization `M = Q R` with unitary `Q` (`k x k`) and upper
/// trapezoidal `R` (`k x l`) whose diagonal is real and nonnegative.
#[derive(Debug, Clone)]
pub struct Qr<T: Field> {
    pub q: DMatrix<T>,
    pub r: DMatrix<T>,
}

pub fn qr_full<T: Field>(m: &DMatrix<T>) -> Qr<T> {
    let k = m.nrows();
    qr_with_q_cols(m, k)
}

/// Economy QR: `Q` is `k x min(k, l)` with orthonormal columns and `R` is
/// `min(k, l) x l`.
pub fn qr_thin<T: Field>(m: &DMatrix<T>) -> Qr<T> {
    let (k, l) = m.shape();
    let mut qr = qr_with_q_cols(m, k.min(l));
    qr.r = qr.r.rows(0, k.min(l)).into_owned();
    qr
}

fn qr_with_q_cols<T: Field>(m: &DMatrix<T>, q_cols: usize) -> Qr<T> {
    let (k, l) = m.shape();
    let mut r = m.clone();
    let mut reflectors: Vec<(usize, DVector<T>, T)> = Vec::new();

    for j in 0..k.saturating_sub(1).min(l) {
        let mut v: DVector<T> = r.view((j, j), (k - j, 1)).column(0).into_owned();
        let norm = v.norm();
        if norm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.modulus() == 0.0 {
            T::one()
        } else {
            x0.unscale(x0.modulus())
        };
        let alpha = phase.scale(-norm);
        v[0] -= alpha;
        let vv = v.norm_squared();
        if vv == 0.0 {
            continue;
        }
        let tau = T::from_real(2.0 / vv);

        // R[j.., j..] <- (I - tau v v^H) R[j.., j..]
        {
            let mut sub = r.view_mut((j, j), (k - j, l - j));
            let y = sub.ad_mul(&v);
            sub.gerc(-tau, &v, &y, T::one());
        }
        r[(j, j)] = alpha;
        for i in j + 1..k {
            r[(i, j)] = T::zero();
        }
        reflectors.push((j, v, tau));
    }

    // Q = H_0 H_1 ... applied to the leading columns of the identity.
    let mut q = DMatrix::<T>::identity(k, q_cols);
    for (j, v, tau) in reflectors.iter().rev() {
        let mut sub = q.view_mut((*j, 0), (k - j, q_cols));
        let y = sub.ad_mul(v);
        sub.gerc(-*tau, v, &y, T::one());
    }

    // Make diag(R) real nonnegative by moving phases into the columns of Q.
    for i in 0..k.min(l).min(q_cols) {
        let d = r[(i, i)];
        let modulus = d.modulus();
        if modulus > 0.0 {
            let ph = d.unscale(modulus);
            r.row_mut(i).scale_mut_by(ph.conjugate());
            r[(i, i)] = T::from_real(modulus);
            q.column_mut(i).scale_mut_by(ph);
        }
    }
    Qr { q, r }
}

trait ScaleBy<T> {
    fn scale_mut_by(&mut self, s: T);
}

impl<T, R, C, S> ScaleBy<T> for nalgebra::Matrix<T, R, C, S>
where
    T: Field,
    R: nalgebra::Dim,
    C: nalgebra::Dim,
    S: nalgebra::StorageMut<T, R, C>,
{
    fn scale_mut_by(&mut self, s: T) {
        for x in self.iter_mut() {
            *x *= s;
        }
    }
}

/// Thin singular value decomposition `M = U diag(s) V^H` with `r = min(k, l)`
/// singular values sorted in decreasing order.
#[derive(Debug, Clone)]
pub struct Svd<T: Field> {
    pub u: DMatrix<T>,
    pub singular_values: DVector<f64>,
    pub v: DMatrix<T>,
}

impl<T: Field> Svd<T> {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.iter().copied().next().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values.iter().copied().last().unwrap_or(0.0)
    }
}

const JACOBI_MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD, applied to the triangular factor of a
/// QR factorization for tall inputs and to the adjoint for wide ones.
pub fn svd<T: Field>(m: &DMatrix<T>) -> Svd<T> {
    let (k, l) = m.shape();
    if k == 0 || l == 0 {
        return Svd {
            u: DMatrix::zeros(k, 0),
            singular_values: DVector::zeros(0),
            v: DMatrix::zeros(l, 0),
        };
    }
    if k < l {
        let t = svd(&m.adjoint());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    let Qr { q, r } = qr_thin(m);
    let (ur, s, v) = jacobi(r);
    Svd {
        u: q * ur,
        singular_values: s,
        v,
    }
}

fn jacobi<T: Field>(mut g: DMatrix<T>) -> (DMatrix<T>, DVector<f64>, DMatrix<T>) {
    let n = g.ncols();
    let rows = g.nrows();
    let mut v = DMatrix::<T>::identity(n, n);
    let eps = f64::EPSILON;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let alpha = g.column(p).norm_squared();
                let beta = g.column(q).norm_squared();
                let gamma = g.column(p).dotc(&g.column(q));
                let gmod = gamma.modulus();
                if gmod == 0.0 || gmod <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotating column q by conj(phase) makes the inner product real.
                let phase_c = gamma.unscale(gmod).conjugate();
                let zeta = (beta - alpha) / (2.0 * gmod);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut g, rows, p, q, phase_c, c, s);
                rotate(&mut v, n, p, q, phase_c, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| g.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let mut u = DMatrix::<T>::zeros(rows, n);
    let mut vs = DMatrix::<T>::zeros(n, n);
    let mut s = DVector::<f64>::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        s[dst] = norms[src];
        if norms[src] > 0.0 {
            u.column_mut(dst)
                .copy_from(&g.column(src).unscale(norms[src]));
        }
        vs.column_mut(dst).copy_from(&v.column(src));
    }
    (u, s, vs)
}

fn rotate<T: Field>(m: &mut DMatrix<T>, rows: usize, p: usize, q: usize, phase_c: T, c: f64, s: f64) {
    let (left, right) = m.as_mut_slice().split_at_mut(q * rows);
    let cp = &mut left[p * rows..(p + 1) * rows];
    let cq = &mut right[..rows];
    for (xp, xq) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *xp;
        let b = *xq * phase_c;
        *xp = a.scale(c) - b.scale(s);
        *xq = a.scale(s) + b.scale(c);
    }
}

/// Default numerical-rank tolerance `max(k, l) * eps * sigma_max`.
pub fn default_tol(shape: (usize, usize), sigma_max: f64) -> f64 {
    shape.0.max(shape.1) as f64 * f64::EPSILON * sigma_max
}

/// Moore-Penrose pseudoinverse; singular values at or below `tol` (default
/// [`default_tol`]) are treated as zero.
pub fn pinv<T: Field>(m: &DMatrix<T>, tol: Option<f64>) -> DMatrix<T> {
    let svd = svd(m);
    pinv_from_svd(&svd, m.shape(), tol)
}

pub fn pinv_from_svd<T: Field>(svd: &Svd<T>, shape: (usize, usize), tol: Option<f64>) -> DMatrix<T> {
    let tol = tol.unwrap_or_else(|| default_tol(shape, svd.sigma_max()));
    let mut out = DMatrix::<T>::zeros(shape.1, shape.0);
    for (i, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma > tol {
            let vi = svd.v.column(i).unscale(sigma);
            out.gerc(T::one(), &vi, &svd.u.column(i), T::one());
        }
    }
    out
}

/// Pseudoinverse built from the leading `rank` singular triplets only.
pub fn pinv_truncated<T: Field>(svd: &Svd<T>, shape: (usize, usize), rank: usize) -> DMatrix<T> {
    let mut out = DMatrix::<T>::zeros(shape.1, shape.0);
    for (i, &sigma) in svd.singular_values.iter().enumerate().take(rank) {
        if sigma > 0.0 {
            let vi = svd.v.column(i).unscale(sigma);
            out.gerc(T::one(), &vi, &svd.u.column(i), T::one());
        }
    }
    out
}

/// Largest singular value (`0` for empty matrices).
pub fn spectral_norm<T: Field>(m: &DMatrix<T>) -> f64 {
    svd(m).sigma_max()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankCheck {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub tol: f64,
    pub full_row_rank: bool,
}

/// Full-row-rank test `sigma_min(C) > tol` for a `p x n` matrix, `p <= n`.
pub fn rank_check_detail<T: Field>(c: &DMatrix<T>, tol: Option<f64>) -> RankCheck {
    let (p, n) = c.shape();
    let svd = svd(c);
    let sigma_max = svd.sigma_max();
    let tol = tol.unwrap_or_else(|| default_tol((p, n), sigma_max));
    let sigma_min = if p == 0 { f64::INFINITY } else { svd.sigma_min() };
    RankCheck {
        sigma_min,
        sigma_max,
        tol,
        full_row_rank: p <= n && (p == 0 || (svd.singular_values.len() == p && sigma_min > tol)),
    }
}

pub fn rank_check<T: Field>(c: &DMatrix<T>, tol: Option<f64>) -> bool {
    rank_check_detail(c, tol).full_row_rank
}
