//! Seeded problem generators.
//!
//! Every matrix is drawn from its own ChaCha8 stream: the generator is
//! seeded with the 64-bit problem seed and `set_stream(k)` selects stream
//! `k` (A = 0, B = 1, C = 2, D = 3, X0 = 4, X1 = 5). Within a stream the
//! four component planes are filled one after another, each in row-major
//! order, with `f64` samples from `rand`'s uniform distribution.

use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::FieldMatrix;
use crate::linalg::rank_check;
use crate::rbq::RBMatrix;
use crate::solver::{Dims, Mode, RblseProblem};

/// Version tag stored in problem files written from generated data.
pub const GENERATOR_VERSION: &str = "chacha8-streams/1";

/// Maximum number of reseeds before giving up on a rank-deficient draw.
pub const MAX_RETRIES: u32 = 8;

pub const STREAM_A: u64 = 0;
pub const STREAM_B: u64 = 1;
pub const STREAM_C: u64 = 2;
pub const STREAM_D: u64 = 3;
pub const STREAM_X0: u64 = 4;
pub const STREAM_X1: u64 = 5;

/// `m = 30t, n = 10t, p = 2t, d = 2`.
pub fn schedule(t: usize) -> Dims {
    Dims {
        m: 30 * t,
        n: 10 * t,
        p: 2 * t,
        d: 2,
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn fill_plane(rng: &mut ChaCha8Rng, m: usize, n: usize, range: &Range<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            out[(i, j)] = rng.random_range(range.clone());
        }
    }
    out
}

/// An `m x n` RB matrix with all four planes uniform on `range`.
pub fn random_rb_matrix(m: usize, n: usize, seed: u64, stream: u64, range: Range<f64>) -> RBMatrix {
    let mut rng = stream_rng(seed, stream);
    let planes: [DMatrix<f64>; 4] = std::array::from_fn(|_| fill_plane(&mut rng, m, n, &range));
    let [m0, m1, m2, m3] = planes;
    RBMatrix::new(m0, m1, m2, m3).expect("planes share a shape")
}

pub fn random_real_matrix(m: usize, n: usize, seed: u64, stream: u64) -> DMatrix<f64> {
    fill_plane(&mut stream_rng(seed, stream), m, n, &(0.0..1.0))
}

/// Random problem of arbitrary size, entries uniform on `[0, 1)`, without
/// any rank verification.
pub fn random_problem(dims: Dims, seed: u64) -> RblseProblem {
    let Dims { m, n, p, d } = dims;
    RblseProblem::new(
        random_rb_matrix(m, n, seed, STREAM_A, 0.0..1.0),
        random_rb_matrix(m, d, seed, STREAM_B, 0.0..1.0),
        random_rb_matrix(p, n, seed, STREAM_C, 0.0..1.0),
        random_rb_matrix(p, d, seed, STREAM_D, 0.0..1.0),
    )
    .expect("generated shapes are consistent")
}

/// A generated problem together with the seed that produced it.
#[derive(Debug, Clone)]
pub struct Generated {
    pub problem: RblseProblem,
    pub t: usize,
    /// Seed actually used (requested seed plus `retries`).
    pub seed: u64,
    pub retries: u32,
}

/// Full-row-rank test of `C` under whichever representations the size
/// allows.
pub fn constraint_ranks_ok(c: &RBMatrix) -> bool {
    let (p, n) = c.shape();
    let real_ok = 4 * p > n || rank_check(crate::repr::real_rep_col(c).as_matrix(), None);
    let complex_ok = 2 * p > n || rank_check(crate::repr::complex_rep_col(c).as_matrix(), None);
    real_ok && complex_ok
}

fn with_retries<F>(t: usize, seed: u64, mut make: F) -> Result<(Generated, Option<FieldMatrix>)>
where
    F: FnMut(u64) -> (RblseProblem, Option<FieldMatrix>),
{
    if t == 0 {
        return Err(Error::PreconditionViolated("t must be at least 1".into()));
    }
    for retries in 0..=MAX_RETRIES {
        let s = seed.wrapping_add(retries as u64);
        let (problem, x) = make(s);
        if constraint_ranks_ok(&problem.c) {
            return Ok((
                Generated {
                    problem,
                    t,
                    seed: s,
                    retries,
                },
                x,
            ));
        }
    }
    Err(Error::PreconditionViolated(format!(
        "no full-rank constraint after {MAX_RETRIES} reseeds from seed {seed}"
    )))
}

/// Random problem on the `t` schedule with all entries uniform on `[0, 1)`.
pub fn generate_random_problem(t: usize, seed: u64) -> Result<Generated> {
    with_retries(t, seed, |s| (random_problem(schedule(t), s), None)).map(|(g, _)| g)
}

/// Problem with a known exact solution: `B = A X`, `D = C X` where `X` is a
/// random real matrix (real mode) or `X0 + X1 i` (complex mode).
pub fn generate_consistent_problem(t: usize, seed: u64, mode: Mode) -> Result<(Generated, FieldMatrix)> {
    let Dims { m, n, p, d } = schedule(t);
    let (g, x) = with_retries(t, seed, |s| {
        let a = random_rb_matrix(m, n, s, STREAM_A, 0.0..1.0);
        let c = random_rb_matrix(p, n, s, STREAM_C, 0.0..1.0);
        let x0 = random_real_matrix(n, d, s, STREAM_X0);
        let x = match mode {
            Mode::Real => FieldMatrix::Real(x0),
            Mode::Complex => {
                let x1 = random_real_matrix(n, d, s, STREAM_X1);
                FieldMatrix::Complex(x0.zip_map(&x1, Complex64::new))
            }
        };
        let xr = x.to_rb();
        let b = a.mat_mul(&xr).expect("shapes agree");
        let dd = c.mat_mul(&xr).expect("shapes agree");
        (RblseProblem::new(a, b, c, dd).expect("shapes agree"), Some(x))
    })?;
    Ok((g, x.expect("consistent generator returns X")))
}
