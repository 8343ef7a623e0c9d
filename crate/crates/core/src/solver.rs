//! Real and complex solutions of the reduced biquaternion LSE problem
//! `min ||AX - B||_F s.t. CX = D`.
//!
//! For real `X` the problem is equivalent to the real LSE problem on the
//! stacked first block columns `(A^R_c, B^R_c, C^R_c, D^R_c)`; for complex `X`
//! to the complex LSE problem on `(A^C_c, B^C_c, C^C_c, D^C_c)`. Both
//! residuals equal `||AX - B||_F` for every `X` of the matching kind.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldMatrix;
use crate::lse::{solve_lse, LseInstance};
use crate::rbq::RBMatrix;
use crate::repr::{complex_rep_col, real_rep_col};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Real,
    Complex,
}

impl Mode {
    pub const BOTH: [Mode; 2] = [Mode::Real, Mode::Complex];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Real => "real",
            Mode::Complex => "complex",
        }
    }

    /// Rows contributed per RB row by the stacked representation (4 or 2).
    pub fn stack_factor(&self) -> usize {
        match self {
            Mode::Real => 4,
            Mode::Complex => 2,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "real" => Ok(Mode::Real),
            "complex" => Ok(Mode::Complex),
            other => Err(format!("unknown mode {other:?} (expected real or complex)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub d: usize,
}

/// Data `A (m x n)`, `B (m x d)`, `C (p x n)`, `D (p x d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RblseProblem {
    pub a: RBMatrix,
    pub b: RBMatrix,
    pub c: RBMatrix,
    pub d: RBMatrix,
}

impl RblseProblem {
    pub fn new(a: RBMatrix, b: RBMatrix, c: RBMatrix, d: RBMatrix) -> Result<Self> {
        let op = "RblseProblem::new";
        if a.ncols() != c.ncols() {
            return Err(Error::dims(op, format!("A is {:?}, C is {:?}", a.shape(), c.shape())));
        }
        if a.nrows() != b.nrows() {
            return Err(Error::dims(op, format!("A is {:?}, B is {:?}", a.shape(), b.shape())));
        }
        if c.nrows() != d.nrows() || b.ncols() != d.ncols() {
            return Err(Error::dims(op, format!("B is {:?}, C is {:?}, D is {:?}", b.shape(), c.shape(), d.shape())));
        }
        Ok(RblseProblem { a, b, c, d })
    }

    pub fn dims(&self) -> Dims {
        Dims {
            m: self.a.nrows(),
            n: self.a.ncols(),
            p: self.c.nrows(),
            d: self.b.ncols(),
        }
    }

    /// Size preconditions for `mode`: `d >= 1`, `m >= n + d` and
    /// `4p <= n` (real) or `2p <= n` (complex).
    pub fn check_dims(&self, mode: Mode) -> Result<()> {
        let Dims { m, n, p, d } = self.dims();
        if d == 0 {
            return Err(Error::PreconditionViolated("d must be at least 1".into()));
        }
        if m < n + d {
            return Err(Error::PreconditionViolated(format!("m = {m} < n + d = {}", n + d)));
        }
        let k = mode.stack_factor();
        if k * p > n {
            return Err(Error::PreconditionViolated(format!(
                "{mode} mode needs {k}p <= n, got p = {p}, n = {n}"
            )));
        }
        Ok(())
    }

    /// `(A^R_c, B^R_c, C^R_c, D^R_c)`.
    pub fn real_instance(&self) -> Result<LseInstance<f64>> {
        LseInstance::new(
            real_rep_col(&self.a).into_matrix(),
            real_rep_col(&self.b).into_matrix(),
            real_rep_col(&self.c).into_matrix(),
            real_rep_col(&self.d).into_matrix(),
        )
    }

    /// `(A^C_c, B^C_c, C^C_c, D^C_c)`.
    pub fn complex_instance(&self) -> Result<LseInstance<Complex64>> {
        LseInstance::new(
            complex_rep_col(&self.a).into_matrix(),
            complex_rep_col(&self.b).into_matrix(),
            complex_rep_col(&self.c).into_matrix(),
            complex_rep_col(&self.d).into_matrix(),
        )
    }

    /// `A X - B` in reduced biquaternion arithmetic.
    pub fn residual(&self, x: &FieldMatrix) -> Result<RBMatrix> {
        self.a_times(x)?.sub(&self.b)
    }

    pub fn constraint_residual(&self, x: &FieldMatrix) -> Result<RBMatrix> {
        self.c_times(x)?.sub(&self.d)
    }

    fn a_times(&self, x: &FieldMatrix) -> Result<RBMatrix> {
        match x {
            FieldMatrix::Real(x) => self.a.mul_real(x),
            FieldMatrix::Complex(x) => self.a.mul_complex(x),
        }
    }

    fn c_times(&self, x: &FieldMatrix) -> Result<RBMatrix> {
        match x {
            FieldMatrix::Real(x) => self.c.mul_real(x),
            FieldMatrix::Complex(x) => self.c.mul_complex(x),
        }
    }
}

/// `log10` accuracy measures of a computed solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// `log10 ||A X - (B + R)||_F` with `R = A X - B` (eps1 / eps3).
    pub residual_consistency: f64,
    /// `log10 ||C X - D||_F` (eps2 / eps4).
    pub constraint: f64,
}

#[derive(Debug, Clone)]
pub struct RblseSolution {
    pub mode: Mode,
    pub x: FieldMatrix,
    pub metrics: Metrics,
    /// `||AX - B||_F`.
    pub residual_norm: f64,
    /// Wall-clock seconds for building the stacked instance and solving it.
    pub seconds: f64,
}

pub fn solve_real(prob: &RblseProblem) -> Result<RblseSolution> {
    prob.check_dims(Mode::Real)?;
    let start = Instant::now();
    let inst = prob.real_instance()?;
    let x = solve_lse(&inst)?.x;
    let seconds = start.elapsed().as_secs_f64();
    finish(prob, Mode::Real, FieldMatrix::Real(x), seconds)
}

pub fn solve_complex(prob: &RblseProblem) -> Result<RblseSolution> {
    prob.check_dims(Mode::Complex)?;
    let start = Instant::now();
    let inst = prob.complex_instance()?;
    let x = solve_lse(&inst)?.x;
    let seconds = start.elapsed().as_secs_f64();
    finish(prob, Mode::Complex, FieldMatrix::Complex(x), seconds)
}

pub fn solve(prob: &RblseProblem, mode: Mode) -> Result<RblseSolution> {
    match mode {
        Mode::Real => solve_real(prob),
        Mode::Complex => solve_complex(prob),
    }
}

fn finish(prob: &RblseProblem, mode: Mode, x: FieldMatrix, seconds: f64) -> Result<RblseSolution> {
    let metrics = residual_metrics(prob, &x)?;
    let residual_norm = prob.residual(&x)?.frobenius_norm();
    Ok(RblseSolution {
        mode,
        x,
        metrics,
        residual_norm,
        seconds,
    })
}

/// Accuracy measures of a real or complex `x`. The optimal residual
/// `R = A X - B` is formed once and the first measure evaluates
/// `||A X - (B + R)||_F` literally, so it reports the floating point
/// self-consistency of the computed residual.
pub fn residual_metrics(prob: &RblseProblem, x: &FieldMatrix) -> Result<Metrics> {
    let ax = match x {
        FieldMatrix::Real(x) => prob.a.mul_real(x)?,
        FieldMatrix::Complex(x) => prob.a.mul_complex(x)?,
    };
    let r = ax.sub(&prob.b)?;
    let consistency = ax.sub(&prob.b.add(&r)?)?.frobenius_norm();
    let constraint = prob.constraint_residual(x)?.frobenius_norm();
    Ok(Metrics {
        residual_consistency: consistency.log10(),
        constraint: constraint.log10(),
    })
}

/// Whether `x` satisfies `C x = D` in RB arithmetic to within `tol`
/// (Frobenius norm).
pub fn is_feasible(prob: &RblseProblem, x: &FieldMatrix, tol: f64) -> Result<bool> {
    Ok(prob.constraint_residual(x)?.frobenius_norm() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_problem, random_rb_matrix};
    use crate::lse::lse_oracle;
    use nalgebra::DMatrix;

    fn small(seed: u64) -> RblseProblem {
        random_problem(Dims { m: 12, n: 4, p: 1, d: 1 }, seed)
    }

    #[test]
    fn real_solution_matches_oracle() {
        let prob = small(3);
        let sol = solve_real(&prob).unwrap();
        let oracle = lse_oracle(&prob.real_instance().unwrap()).unwrap();
        let x = sol.x.as_real().unwrap();
        assert!((x - &oracle).norm() <= 1e-9 * oracle.norm());
    }

    #[test]
    fn complex_solution_matches_oracle() {
        let prob = random_problem(Dims { m: 12, n: 4, p: 2, d: 1 }, 4);
        let sol = solve_complex(&prob).unwrap();
        let oracle = lse_oracle(&prob.complex_instance().unwrap()).unwrap();
        let x = sol.x.as_complex().unwrap();
        assert!((x - &oracle).norm() <= 1e-9 * oracle.norm());
    }

    #[test]
    fn preconditions() {
        // m < n + d
        let p = random_problem(Dims { m: 5, n: 4, p: 1, d: 2 }, 1);
        assert!(matches!(solve_real(&p), Err(Error::PreconditionViolated(_))));
        // 4p > n but 2p <= n
        let p = random_problem(Dims { m: 12, n: 4, p: 2, d: 1 }, 1);
        assert!(matches!(solve_real(&p), Err(Error::PreconditionViolated(_))));
        assert!(solve_complex(&p).is_ok());
        let p = random_problem(Dims { m: 12, n: 4, p: 3, d: 1 }, 1);
        assert!(matches!(solve_complex(&p), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn rank_deficient_constraint() {
        let row = random_rb_matrix(1, 8, 5, 0, 0.0..1.0);
        let c = RBMatrix::new(
            DMatrix::from_fn(2, 8, |_, j| row.plane(0)[(0, j)]),
            DMatrix::from_fn(2, 8, |_, j| row.plane(1)[(0, j)]),
            DMatrix::from_fn(2, 8, |_, j| row.plane(2)[(0, j)]),
            DMatrix::from_fn(2, 8, |_, j| row.plane(3)[(0, j)]),
        )
        .unwrap();
        let prob = RblseProblem::new(
            random_rb_matrix(20, 8, 1, 0, 0.0..1.0),
            random_rb_matrix(20, 1, 1, 1, 0.0..1.0),
            c,
            random_rb_matrix(2, 1, 1, 3, 0.0..1.0),
        )
        .unwrap();
        assert!(matches!(solve_real(&prob), Err(Error::RankDeficientConstraint { .. })));
        assert!(matches!(solve_complex(&prob), Err(Error::RankDeficientConstraint { .. })));
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("real".parse::<Mode>().unwrap(), Mode::Real);
        assert_eq!("complex".parse::<Mode>().unwrap(), Mode::Complex);
        assert!("both".parse::<Mode>().is_err());
    }
}
