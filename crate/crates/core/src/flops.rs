//! Closed-form flop-count models of the two solvers.

use crate::error::{Error, Result};
use crate::solver::Mode;

/// Total flop count for one solve of an `m x n` problem with `p`
/// constraint rows and `d` right-hand sides.
///
/// Real mode:
/// `32np^2 + 8mn^2 - 4mn + 24m(n-4p)^2 + 10(n-4p)^3 + 16p^2d + 32mpd - 4md
///  + 4md + 8m(n-4p)d + 2n^2d`.
///
/// Complex mode:
/// `32np^2 + 16mn^2 - 4mn + 48m(n-2p)^2 + 40(n-2p)^3 + 16p^2d + 10pd
///  + 32mpd - 4md + 4md + 16m(n-2p)d + 8n^2d`.
pub fn flop_estimate(mode: Mode, m: usize, n: usize, p: usize, d: usize) -> Result<u128> {
    if m == 0 || n == 0 || p == 0 || d == 0 {
        return Err(Error::PreconditionViolated("dimensions must be positive".into()));
    }
    let k = mode.stack_factor();
    if k * p > n {
        return Err(Error::PreconditionViolated(format!("{mode} mode needs {k}p <= n")));
    }
    let (m, n, p, d) = (m as i128, n as i128, p as i128, d as i128);
    let total = match mode {
        Mode::Real => {
            let f = n - 4 * p;
            32 * n * p * p + 8 * m * n * n - 4 * m * n + 24 * m * f * f + 10 * f * f * f
                + 16 * p * p * d
                + 32 * m * p * d
                - 4 * m * d
                + 4 * m * d
                + 8 * m * f * d
                + 2 * n * n * d
        }
        Mode::Complex => {
            let f = n - 2 * p;
            32 * n * p * p + 16 * m * n * n - 4 * m * n + 48 * m * f * f + 40 * f * f * f
                + 16 * p * p * d
                + 10 * p * d
                + 32 * m * p * d
                - 4 * m * d
                + 4 * m * d
                + 16 * m * f * d
                + 8 * n * n * d
        }
    };
    Ok(total as u128)
}
