//! Real (`4m x 4n`) and complex (`2m x 2n`) representations of reduced
//! biquaternion matrices.
//!
//! ```text
//!       | M0 -M1  M2 -M3 |
//! M^R = | M1  M0  M3  M2 |        M^C = | N1 N2 |
//!       | M2 -M3  M0 -M1 |              | N2 N1 |
//!       | M3  M2  M1  M0 |
//! ```
//!
//! Both maps are algebra homomorphisms. The first block columns
//! `M^R_c = [M0; M1; M2; M3]` and `M^C_c = [N1; N2]` carry all of `M`, and
//! the remaining block columns are signed block permutations of them:
//! `M^R = [M^R_c, Q_m M^R_c, R_m M^R_c, S_m M^R_c]`, `M^C = [M^C_c, P_m M^C_c]`.

use nalgebra::{DMatrix, Scalar};
use num_complex::Complex64;
use num_traits::Zero;
use std::ops::Neg;

use crate::error::{Error, Result};
use crate::rbq::RBMatrix;

/// Full `4m x 4n` real representation.
#[derive(Debug, Clone, PartialEq)]
pub struct RealRep(DMatrix<f64>);

/// First block column `[M0; M1; M2; M3]`, `4m x n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealRepColumn(DMatrix<f64>);

/// Full `2m x 2n` complex representation.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexRep(DMatrix<Complex64>);

/// First block column `[N1; N2]`, `2m x n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexRepColumn(DMatrix<Complex64>);

macro_rules! matrix_newtype {
    ($name:ident, $t:ty, $blocks:expr) => {
        impl $name {
            /// Wraps a matrix, checking that its rows split into equal blocks.
            pub fn from_matrix(m: DMatrix<$t>) -> Result<Self> {
                if m.nrows() % $blocks != 0 {
                    return Err(Error::IndivisibleRows {
                        rows: m.nrows(),
                        blocks: $blocks,
                    });
                }
                Ok($name(m))
            }

            pub fn as_matrix(&self) -> &DMatrix<$t> {
                &self.0
            }

            pub fn into_matrix(self) -> DMatrix<$t> {
                self.0
            }

            pub fn norm(&self) -> f64 {
                self.0.norm()
            }
        }
    };
}

matrix_newtype!(RealRep, f64, 4);
matrix_newtype!(RealRepColumn, f64, 4);
matrix_newtype!(ComplexRep, Complex64, 2);
matrix_newtype!(ComplexRepColumn, Complex64, 2);

/// Structure tolerance used for exact constructions.
pub const STRUCT_TOL_EXACT: f64 = 0.0;

/// Structure tolerance for representations loaded from outside.
pub fn external_struct_tol<T: nalgebra::ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    1e-12 * m.norm()
}

pub fn real_rep(m: &RBMatrix) -> RealRep {
    expand_real_blocks(&real_rep_col(m).0)
}

pub fn real_rep_col(m: &RBMatrix) -> RealRepColumn {
    let (rows, cols) = m.shape();
    let mut out = DMatrix::zeros(4 * rows, cols);
    for (k, plane) in m.planes().iter().enumerate() {
        out.view_mut((k * rows, 0), (rows, cols)).copy_from(plane);
    }
    RealRepColumn(out)
}

pub fn complex_rep(m: &RBMatrix) -> ComplexRep {
    expand_complex_blocks(&complex_rep_col(m).0)
}

pub fn complex_rep_col(m: &RBMatrix) -> ComplexRepColumn {
    let (rows, cols) = m.shape();
    let mut out = DMatrix::zeros(2 * rows, cols);
    out.view_mut((0, 0), (rows, cols)).copy_from(&m.n1());
    out.view_mut((rows, 0), (rows, cols)).copy_from(&m.n2());
    ComplexRepColumn(out)
}

/// `[Mc, Q Mc, R Mc, S Mc]` for any `4m x n` real matrix.
pub fn expand_real_col(mc: &DMatrix<f64>) -> Result<RealRep> {
    if !mc.nrows().is_multiple_of(4) {
        return Err(Error::IndivisibleRows {
            rows: mc.nrows(),
            blocks: 4,
        });
    }
    Ok(expand_real_blocks(mc))
}

/// `[Mc, P Mc]` for any `2m x n` complex matrix.
pub fn expand_complex_col(mc: &DMatrix<Complex64>) -> Result<ComplexRep> {
    if !mc.nrows().is_multiple_of(2) {
        return Err(Error::IndivisibleRows {
            rows: mc.nrows(),
            blocks: 2,
        });
    }
    Ok(expand_complex_blocks(mc))
}

fn expand_real_blocks(mc: &DMatrix<f64>) -> RealRep {
    let m = mc.nrows() / 4;
    let n = mc.ncols();
    let mut out = DMatrix::zeros(4 * m, 4 * n);
    out.view_mut((0, 0), (4 * m, n)).copy_from(mc);
    for (slot, kind) in [(1, OperatorKind::Q), (2, OperatorKind::R), (3, OperatorKind::S)] {
        let block = BlockOperator { kind, block: m }.apply_unchecked(mc);
        out.view_mut((0, slot * n), (4 * m, n)).copy_from(&block);
    }
    RealRep(out)
}

fn expand_complex_blocks(mc: &DMatrix<Complex64>) -> ComplexRep {
    let m = mc.nrows() / 2;
    let n = mc.ncols();
    let mut out = DMatrix::zeros(2 * m, 2 * n);
    out.view_mut((0, 0), (2 * m, n)).copy_from(mc);
    let swapped = BlockOperator {
        kind: OperatorKind::P,
        block: m,
    }
    .apply_unchecked(mc);
    out.view_mut((0, n), (2 * m, n)).copy_from(&swapped);
    ComplexRep(out)
}

/// Inverse of [`real_rep`]. Reads the first block column and checks that the
/// remaining blocks match the expected pattern to within `tol` (Frobenius
/// norm of the deviation).
pub fn from_real_rep(r: &DMatrix<f64>, tol: f64) -> Result<RBMatrix> {
    if !r.nrows().is_multiple_of(4) || !r.ncols().is_multiple_of(4) {
        return Err(Error::IndivisibleRows {
            rows: if !r.nrows().is_multiple_of(4) { r.nrows() } else { r.ncols() },
            blocks: 4,
        });
    }
    let (m, n) = (r.nrows() / 4, r.ncols() / 4);
    let col = r.columns(0, n).into_owned();
    let expected = expand_real_blocks(&col);
    let deviation = (r - &expected.0).norm();
    if deviation > tol {
        return Err(Error::StructureViolation { deviation, tol });
    }
    let planes: [DMatrix<f64>; 4] = std::array::from_fn(|k| col.rows(k * m, m).into_owned());
    let [m0, m1, m2, m3] = planes;
    RBMatrix::new(m0, m1, m2, m3)
}

/// Inverse of [`complex_rep`], with the same validation rule as
/// [`from_real_rep`].
pub fn from_complex_rep(c: &DMatrix<Complex64>, tol: f64) -> Result<RBMatrix> {
    if !c.nrows().is_multiple_of(2) || !c.ncols().is_multiple_of(2) {
        return Err(Error::IndivisibleRows {
            rows: if !c.nrows().is_multiple_of(2) { c.nrows() } else { c.ncols() },
            blocks: 2,
        });
    }
    let (m, n) = (c.nrows() / 2, c.ncols() / 2);
    let col = c.columns(0, n).into_owned();
    let expected = expand_complex_blocks(&col);
    let deviation = (c - &expected.0).norm();
    if deviation > tol {
        return Err(Error::StructureViolation { deviation, tol });
    }
    RBMatrix::from_complex_planes(&col.rows(0, m).into_owned(), &col.rows(m, m).into_owned())
}

/// Recovers `M` from a real first block column.
pub fn from_real_rep_col(mc: &DMatrix<f64>) -> Result<RBMatrix> {
    let m = RealRepColumn::from_matrix(mc.clone())?.0.nrows() / 4;
    let planes: [DMatrix<f64>; 4] = std::array::from_fn(|k| mc.rows(k * m, m).into_owned());
    let [m0, m1, m2, m3] = planes;
    RBMatrix::new(m0, m1, m2, m3)
}

/// Recovers `M` from a complex first block column.
pub fn from_complex_rep_col(mc: &DMatrix<Complex64>) -> Result<RBMatrix> {
    if !mc.nrows().is_multiple_of(2) {
        return Err(Error::IndivisibleRows {
            rows: mc.nrows(),
            blocks: 2,
        });
    }
    let m = mc.nrows() / 2;
    RBMatrix::from_complex_planes(&mc.rows(0, m).into_owned(), &mc.rows(m, m).into_owned())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Q,
    R,
    S,
    P,
}

/// One of the signed block permutations `Q_m`, `R_m`, `S_m` (`4m x 4m`) or
/// `P_m` (`2m x 2m`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockOperator {
    pub kind: OperatorKind,
    pub block: usize,
}

impl BlockOperator {
    pub fn new(kind: OperatorKind, block: usize) -> Self {
        BlockOperator { kind, block }
    }

    /// Number of block rows (4 or 2).
    pub fn blocks(&self) -> usize {
        match self.kind {
            OperatorKind::P => 2,
            _ => 4,
        }
    }

    pub fn dim(&self) -> usize {
        self.blocks() * self.block
    }

    /// For each output block row: the source block and its sign.
    fn table(&self) -> &'static [(usize, bool)] {
        // (source block, negate)
        match self.kind {
            OperatorKind::Q => &[(1, true), (0, false), (3, true), (2, false)],
            OperatorKind::R => &[(2, false), (3, false), (0, false), (1, false)],
            OperatorKind::S => &[(3, true), (2, false), (1, true), (0, false)],
            OperatorKind::P => &[(1, false), (0, false)],
        }
    }

    pub fn apply<T>(&self, x: &DMatrix<T>) -> Result<DMatrix<T>>
    where
        T: Scalar + Copy + Neg<Output = T> + Zero,
    {
        self.check(x.nrows())?;
        Ok(self.apply_unchecked(x))
    }

    /// Applies the transpose (equivalently the inverse).
    pub fn apply_transpose<T>(&self, x: &DMatrix<T>) -> Result<DMatrix<T>>
    where
        T: Scalar + Copy + Neg<Output = T> + Zero,
    {
        self.check(x.nrows())?;
        let m = self.block;
        let mut out = DMatrix::<T>::zeros(x.nrows(), x.ncols());
        for (dst, &(src, neg)) in self.table().iter().enumerate() {
            // Row block `dst` of the operator reads block `src`; the
            // transpose writes it back.
            copy_block(x, dst * m, &mut out, src * m, m, neg);
        }
        Ok(out)
    }

    fn check(&self, rows: usize) -> Result<()> {
        if rows != self.dim() {
            return Err(Error::dims(
                "apply_block_operator",
                format!("operator is {0}x{0}, operand has {1} rows", self.dim(), rows),
            ));
        }
        Ok(())
    }

    fn apply_unchecked<T>(&self, x: &DMatrix<T>) -> DMatrix<T>
    where
        T: Scalar + Copy + Neg<Output = T> + Zero,
    {
        let m = self.block;
        let mut out = DMatrix::<T>::zeros(x.nrows(), x.ncols());
        for (dst, &(src, neg)) in self.table().iter().enumerate() {
            copy_block(x, src * m, &mut out, dst * m, m, neg);
        }
        out
    }

    /// Dense matrix form; only meant for cross-checks.
    pub fn dense(&self) -> DMatrix<f64> {
        let m = self.block;
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for (dst, &(src, neg)) in self.table().iter().enumerate() {
            let s = if neg { -1.0 } else { 1.0 };
            for i in 0..m {
                out[(dst * m + i, src * m + i)] = s;
            }
        }
        out
    }
}

fn copy_block<T>(
    from: &DMatrix<T>,
    from_row: usize,
    to: &mut DMatrix<T>,
    to_row: usize,
    rows: usize,
    negate: bool,
) where
    T: Scalar + Copy + Neg<Output = T>,
{
    for j in 0..from.ncols() {
        for i in 0..rows {
            let v = from[(from_row + i, j)];
            to[(to_row + i, j)] = if negate { -v } else { v };
        }
    }
}
