//! Normwise data perturbations and first-order forward-error bounds for the
//! real and complex solutions.
//!
//! For the stacked instance `(A, B, C, D)` of either mode with solution `X`:
//!
//! ```text
//! P   = I - C^+ C
//! L   = (I - (A P)^+ A) C^+
//! K_B = ||A||_F ||(A P)^+||_2
//! K_A = ||C||_F ||L||_2
//! R   = B - A X
//!
//! U = eps * ( K_A (||D||_F / (||C||_F ||X||_F) + 1)
//!           + K_B (||B||_F / (||A||_F ||X||_F) + 1)
//!           + K_B^2 (||C||_F / ||A||_F * ||A L||_2 + 1) ||R||_F / (||A||_F ||X||_F) )
//! ```
//!
//! The `O(eps^2)` remainder is not included.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::FieldMatrix;
use crate::generate::random_rb_matrix;
use crate::linalg::{default_tol, pinv, rank_check_detail, svd, Field};
use crate::lse::LseInstance;
use crate::rbq::RBMatrix;
use crate::repr::{complex_rep_col, real_rep_col};
use crate::solver::{Mode, RblseProblem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    pub eps: f64,
    pub seed: u64,
}

/// Perturbs each of `A, B, C, D` by `eps * ||M||_F * E / ||E||_F` with `E`
/// uniform on `[-1, 1)` per component (streams 0..3 of `spec.seed`), so that
/// every relative perturbation equals `eps`.
pub fn perturb(prob: &RblseProblem, spec: PerturbationSpec) -> Result<RblseProblem> {
    if spec.eps.is_nan() || spec.eps < 0.0 {
        return Err(Error::PreconditionViolated(format!("eps must be >= 0, got {}", spec.eps)));
    }
    let delta = |m: &RBMatrix, stream: u64| -> Result<RBMatrix> {
        let norm = m.frobenius_norm();
        if spec.eps == 0.0 || norm == 0.0 {
            return Ok(m.clone());
        }
        let e = random_rb_matrix(m.nrows(), m.ncols(), spec.seed, stream, -1.0..1.0);
        let en = e.frobenius_norm();
        if en == 0.0 {
            return Ok(m.clone());
        }
        m.add(&e.scale_real(spec.eps * norm / en))
    };
    let out = RblseProblem::new(
        delta(&prob.a, 0)?,
        delta(&prob.b, 1)?,
        delta(&prob.c, 2)?,
        delta(&prob.d, 3)?,
    )?;
    for mode in Mode::BOTH {
        if constraint_full_rank(&prob.c, mode) && !constraint_full_rank(&out.c, mode) {
            return Err(Error::RankLostUnderPerturbation);
        }
    }
    Ok(out)
}

fn constraint_full_rank(c: &RBMatrix, mode: Mode) -> bool {
    let (p, n) = c.shape();
    if mode.stack_factor() * p > n {
        return false;
    }
    match mode {
        Mode::Real => rank_check_detail(real_rep_col(c).as_matrix(), None).full_row_rank,
        Mode::Complex => rank_check_detail(complex_rep_col(c).as_matrix(), None).full_row_rank,
    }
}

/// Smallest `eps` with `||dM||_F <= eps ||M||_F` for all four data matrices.
/// A nonzero change to a zero matrix gives `+inf`.
pub fn measure_eps(orig: &RblseProblem, pert: &RblseProblem) -> Result<f64> {
    let pairs = [
        (&orig.a, &pert.a),
        (&orig.b, &pert.b),
        (&orig.c, &pert.c),
        (&orig.d, &pert.d),
    ];
    let mut eps: f64 = 0.0;
    for (m, mh) in pairs {
        let change = mh.sub(m)?.frobenius_norm();
        let base = m.frobenius_norm();
        let ratio = if change == 0.0 {
            0.0
        } else if base == 0.0 {
            f64::INFINITY
        } else {
            change / base
        };
        eps = eps.max(ratio);
    }
    Ok(eps)
}

/// Norm ratios that multiply the condition numbers in the bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRatios {
    /// `||D||_F / (||C||_F ||X||_F)`
    pub d_over_cx: f64,
    /// `||B||_F / (||A||_F ||X||_F)`
    pub b_over_ax: f64,
    /// `||C||_F / ||A||_F`
    pub c_over_a: f64,
    /// `||R||_F / (||A||_F ||X||_F)`
    pub r_over_ax: f64,
}

#[derive(Debug, Clone)]
pub struct PerturbationReport {
    pub mode: Mode,
    pub eps: f64,
    /// First-order bound on `||dX||_F / ||X||_F`.
    pub bound: f64,
    pub k_a: f64,
    pub k_b: f64,
    /// `||L||_2`.
    pub l_norm: f64,
    /// `||A L||_2`.
    pub a_l_norm: f64,
    pub ratios: BoundRatios,
    pub x_norm: f64,
    pub residual_norm: f64,
    /// `P = I - C^+ C` (`n x n`).
    pub projector: FieldMatrix,
    /// `R = B - A X` on the stacked instance.
    pub residual: FieldMatrix,
    /// Filled by [`PerturbationReport::record_forward_error`].
    pub forward_error: Option<ForwardError>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardError {
    pub value: f64,
    /// `false` when `||X||_F = 0` and `value` is the absolute error.
    pub relative: bool,
}

impl ForwardError {
    pub fn between(x: &FieldMatrix, x_hat: &FieldMatrix) -> Result<Self> {
        let diff = x_hat.distance(x)?;
        let norm = x.norm();
        Ok(if norm == 0.0 {
            ForwardError {
                value: diff,
                relative: false,
            }
        } else {
            ForwardError {
                value: diff / norm,
                relative: true,
            }
        })
    }
}

impl PerturbationReport {
    pub fn record_forward_error(&mut self, x: &FieldMatrix, x_hat: &FieldMatrix) -> Result<ForwardError> {
        let fe = ForwardError::between(x, x_hat)?;
        self.forward_error = Some(fe);
        Ok(fe)
    }

    /// `Some(forward error <= bound)` once a forward error is recorded.
    pub fn within_bound(&self) -> Option<bool> {
        self.forward_error.map(|fe| fe.value <= self.bound)
    }
}

struct BoundParts<T: Field> {
    bound: f64,
    k_a: f64,
    k_b: f64,
    l_norm: f64,
    a_l_norm: f64,
    ratios: BoundRatios,
    x_norm: f64,
    residual_norm: f64,
    projector: DMatrix<T>,
    residual: DMatrix<T>,
}

fn first_order_bound<T: Field>(inst: &LseInstance<T>, x: &DMatrix<T>, eps: f64) -> Result<BoundParts<T>> {
    let (a, b, c, d) = (&inst.a, &inst.b, &inst.c, &inst.d);
    let n = inst.unknowns();
    let p = inst.constraints();
    if x.nrows() != n || x.ncols() != b.ncols() {
        return Err(Error::dims("first_order_bound", format!("X is {:?}", x.shape())));
    }
    let check = rank_check_detail(c, None);
    if !check.full_row_rank {
        return Err(Error::RankDeficientConstraint {
            sigma_min: check.sigma_min,
            tol: check.tol,
        });
    }

    let c_pinv = pinv(c, None);
    let projector = DMatrix::<T>::identity(n, n) - &c_pinv * c;
    let ap = a * &projector;
    let ap_svd = svd(&ap);
    let tol = default_tol(ap.shape(), ap_svd.sigma_max());
    let ap_rank = ap_svd.singular_values.iter().filter(|&&s| s > tol).count();
    if ap_rank < n - p {
        return Err(Error::PreconditionViolated(format!(
            "A P has numerical rank {ap_rank} < n - p = {}",
            n - p
        )));
    }
    // A P has rank exactly n - p; anything past that is rounding noise.
    let ap_pinv = crate::linalg::pinv_truncated(&ap_svd, ap.shape(), n - p);
    let ap_pinv_norm = if n == p {
        0.0
    } else {
        1.0 / ap_svd.singular_values[n - p - 1]
    };
    let l = (DMatrix::<T>::identity(n, n) - &ap_pinv * a) * &c_pinv;
    let l_norm = svd(&l).sigma_max();
    let a_l_norm = svd(&(a * &l)).sigma_max();

    let (na, nb, nc, nd, nx) = (a.norm(), b.norm(), c.norm(), d.norm(), x.norm());
    let residual = b - a * x;
    let nr = residual.norm();
    let k_b = na * ap_pinv_norm;
    let k_a = nc * l_norm;
    let ratios = BoundRatios {
        d_over_cx: nd / (nc * nx),
        b_over_ax: nb / (na * nx),
        c_over_a: nc / na,
        r_over_ax: nr / (na * nx),
    };
    let bound = eps
        * (k_a * (ratios.d_over_cx + 1.0)
            + k_b * (ratios.b_over_ax + 1.0)
            + k_b * k_b * (ratios.c_over_a * a_l_norm + 1.0) * ratios.r_over_ax);
    Ok(BoundParts {
        bound,
        k_a,
        k_b,
        l_norm,
        a_l_norm,
        ratios,
        x_norm: nx,
        residual_norm: nr,
        projector,
        residual,
    })
}

/// First-order bound for the real solution `x` of `prob` at level `eps`.
pub fn bound_real(prob: &RblseProblem, x: &DMatrix<f64>, eps: f64) -> Result<PerturbationReport> {
    let parts = first_order_bound(&prob.real_instance()?, x, eps)?;
    Ok(report(Mode::Real, eps, parts, FieldMatrix::Real))
}

/// First-order bound for the complex solution `x` of `prob` at level `eps`.
pub fn bound_complex(prob: &RblseProblem, x: &DMatrix<Complex64>, eps: f64) -> Result<PerturbationReport> {
    let parts = first_order_bound(&prob.complex_instance()?, x, eps)?;
    Ok(report(Mode::Complex, eps, parts, FieldMatrix::Complex))
}

/// Dispatches to [`bound_real`] or [`bound_complex`] by the kind of `x`.
pub fn bound(prob: &RblseProblem, x: &FieldMatrix, eps: f64) -> Result<PerturbationReport> {
    match x {
        FieldMatrix::Real(x) => bound_real(prob, x, eps),
        FieldMatrix::Complex(x) => bound_complex(prob, x, eps),
    }
}

fn report<T: Field>(
    mode: Mode,
    eps: f64,
    parts: BoundParts<T>,
    wrap: impl Fn(DMatrix<T>) -> FieldMatrix,
) -> PerturbationReport {
    PerturbationReport {
        mode,
        eps,
        bound: parts.bound,
        k_a: parts.k_a,
        k_b: parts.k_b,
        l_norm: parts.l_norm,
        a_l_norm: parts.a_l_norm,
        ratios: parts.ratios,
        x_norm: parts.x_norm,
        residual_norm: parts.residual_norm,
        projector: wrap(parts.projector),
        residual: wrap(parts.residual),
        forward_error: None,
    }
}
