use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rbq::RBMatrix;
use crate::solver::Mode;

/// A real or complex matrix, i.e. a solution of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldMatrix {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl FieldMatrix {
    pub fn mode(&self) -> Mode {
        match self {
            FieldMatrix::Real(_) => Mode::Real,
            FieldMatrix::Complex(_) => Mode::Complex,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            FieldMatrix::Real(x) => x.shape(),
            FieldMatrix::Complex(x) => x.shape(),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            FieldMatrix::Real(x) => x.norm(),
            FieldMatrix::Complex(x) => x.norm(),
        }
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        match self {
            FieldMatrix::Real(x) => x.map(Complex64::from),
            FieldMatrix::Complex(x) => x.clone(),
        }
    }

    /// The same matrix viewed as a reduced biquaternion matrix.
    pub fn to_rb(&self) -> RBMatrix {
        match self {
            FieldMatrix::Real(x) => RBMatrix::from_real(x),
            FieldMatrix::Complex(x) => RBMatrix::from_complex(x),
        }
    }

    /// `||self - other||_F`; a real and a complex matrix are compared in C.
    pub fn distance(&self, other: &FieldMatrix) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(Error::dims(
                "FieldMatrix::distance",
                format!("{:?} vs {:?}", self.shape(), other.shape()),
            ));
        }
        Ok(match (self, other) {
            (FieldMatrix::Real(a), FieldMatrix::Real(b)) => (a - b).norm(),
            _ => (self.to_complex() - other.to_complex()).norm(),
        })
    }

    pub fn as_real(&self) -> Option<&DMatrix<f64>> {
        match self {
            FieldMatrix::Real(x) => Some(x),
            FieldMatrix::Complex(_) => None,
        }
    }

    pub fn as_complex(&self) -> Option<&DMatrix<Complex64>> {
        match self {
            FieldMatrix::Complex(x) => Some(x),
            FieldMatrix::Real(_) => None,
        }
    }
}
