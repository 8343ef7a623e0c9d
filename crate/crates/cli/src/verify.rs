//! Seeded invariant checks: kernel against the nullspace oracle,
//! representation identities, residual transfer and the cost model.
//!
//! Each check runs a fixed number of random cases and reports the worst
//! observed deviation next to the threshold it was held to.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rblse_core::flops::flop_estimate;
use rblse_core::generate::{random_problem, random_rb_matrix, schedule};
use rblse_core::repr::*;
use rblse_core::solver::Dims;
use rblse_core::{lse_oracle, solve_complex, solve_lse, solve_real, FieldMatrix, LseInstance, Mode, RBMatrix, RBScalar};
use serde::Serialize;

pub const ORACLE_TOL: f64 = 1e-9;
pub const IDENTITY_TOL: f64 = 1e-12;
pub const TRANSFER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub worst: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, threshold: f64) -> Self {
        CheckOutcome {
            name: name.to_string(),
            cases: 0,
            failures: 0,
            worst: 0.0,
            threshold,
            detail: String::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }

    /// Records one measured deviation; NaN counts as a failure.
    fn record(&mut self, value: f64) {
        self.worst = self.worst.max(value);
        if value.is_nan() || value > self.threshold {
            self.failures += 1;
        }
    }

    fn fail(&mut self, msg: impl Into<String>) {
        self.failures += 1;
        if self.detail.is_empty() {
            self.detail = msg.into();
        }
    }

    fn case(&mut self) {
        self.cases += 1;
    }
}

fn rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(case as u64);
    r
}

fn rel<T: nalgebra::ComplexField<RealField = f64>>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn real_matrix(rng: &mut ChaCha8Rng, k: usize, l: usize) -> DMatrix<f64> {
    DMatrix::from_fn(k, l, |_, _| rng.random_range(-1.0..1.0))
}

fn complex_matrix(rng: &mut ChaCha8Rng, k: usize, l: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(k, l, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Random kernel shape with `m <= 40`, `n <= 16`, `p <= 6`, `d <= 3`.
/// Underdetermined shapes (`m < n - p`) are included.
fn lse_shape(rng: &mut ChaCha8Rng) -> (usize, usize, usize, usize) {
    let n = rng.random_range(1..=16);
    let p = rng.random_range(1..=n.min(6));
    let m = rng.random_range(1..=40);
    let d = rng.random_range(1..=3);
    (m, n, p, d)
}

fn tally(out: &mut CheckOutcome, label: &str, res: rblse_core::Result<f64>) {
    match res {
        Ok(v) => {
            out.case();
            out.record(v);
        }
        Err(e) => out.fail(format!("{label}: {e}")),
    }
}

/// Kernel against the nullspace oracle on `cases` real and `cases` complex
/// instances, then both solvers against the oracle on their stacked
/// instances.
pub fn check_oracle_equivalence(cases: usize, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("oracle equivalence", ORACLE_TOL);
    for k in 0..cases {
        let mut r = rng(seed, k);
        let (m, n, p, d) = lse_shape(&mut r);
        let inst = LseInstance::new(
            real_matrix(&mut r, m, n),
            real_matrix(&mut r, m, d),
            real_matrix(&mut r, p, n),
            real_matrix(&mut r, p, d),
        );
        let res = inst.and_then(|i| {
            let x = solve_lse(&i)?.x;
            let o = lse_oracle(&i)?;
            Ok(rel(&x, &o))
        });
        tally(&mut out, "real kernel", res);

        let mut r = rng(seed ^ 0xc0, k);
        let (m, n, p, d) = lse_shape(&mut r);
        let inst = LseInstance::new(
            complex_matrix(&mut r, m, n),
            complex_matrix(&mut r, m, d),
            complex_matrix(&mut r, p, n),
            complex_matrix(&mut r, p, d),
        );
        let res = inst.and_then(|i| {
            let x = solve_lse(&i)?.x;
            let o = lse_oracle(&i)?;
            Ok(rel(&x, &o))
        });
        tally(&mut out, "complex kernel", res);
    }

    let stacked = cases.div_ceil(4).max(1);
    for k in 0..stacked {
        let mut r = rng(seed ^ 0x57ac, k);
        let p = r.random_range(1..=2);
        let n = r.random_range(4 * p..=4 * p + 4);
        let d = r.random_range(1..=3);
        let m = r.random_range(n + d..=n + d + 6);
        let prob = random_problem(Dims { m, n, p, d }, seed.wrapping_add(k as u64));
        let real = (|| {
            let x = solve_real(&prob)?.x;
            let o = lse_oracle(&prob.real_instance()?)?;
            let x = x.as_real().expect("real solver returns a real matrix").clone();
            Ok::<_, rblse_core::Error>(rel(&x, &o))
        })();
        tally(&mut out, "stacked real", real);
        let complex = (|| {
            let x = solve_complex(&prob)?.x;
            let o = lse_oracle(&prob.complex_instance()?)?;
            let x = x.as_complex().expect("complex solver returns a complex matrix").clone();
            Ok::<_, rblse_core::Error>(rel(&x, &o))
        })();
        tally(&mut out, "stacked complex", complex);
    }
    out.detail = format!(
        "{} kernel pairs, {} stacked pairs; {}",
        cases,
        stacked,
        if out.detail.is_empty() { "no errors".to_string() } else { out.detail.clone() }
    );
    out
}

fn rb(r: &mut ChaCha8Rng, m: usize, n: usize) -> RBMatrix {
    random_rb_matrix(m, n, r.random(), 0, -1.0..1.0)
}

fn rb_rel(a: &RBMatrix, b: &RBMatrix) -> f64 {
    a.sub(b).map_or(f64::NAN, |d| d.frobenius_norm()) / b.frobenius_norm().max(f64::MIN_POSITIVE)
}

/// One representation case: product, sum and scaling homomorphisms, norm
/// identities, block operators and reconstruction. Returns the largest
/// relative deviation seen.
fn representation_case(r: &mut ChaCha8Rng) -> rblse_core::Result<f64> {
    let (m, n, l) = (r.random_range(1..=6), r.random_range(1..=6), r.random_range(1..=6));
    let a = rb(r, m, n);
    let b = rb(r, n, l);
    let b2 = rb(r, n, l);
    let mut worst = 0f64;
    let mut see = |v: f64| worst = if v.is_nan() { f64::NAN } else { worst.max(v) };

    let ab = a.mat_mul(&b)?;
    see(rel(&(real_rep(&a).into_matrix() * real_rep(&b).into_matrix()), real_rep(&ab).as_matrix()));
    see(rel(&(complex_rep(&a).into_matrix() * complex_rep(&b).into_matrix()), complex_rep(&ab).as_matrix()));
    see(rel(&(real_rep(&a).into_matrix() * real_rep_col(&b).into_matrix()), real_rep_col(&ab).as_matrix()));
    see(rel(&(complex_rep(&a).into_matrix() * complex_rep_col(&b).into_matrix()), complex_rep_col(&ab).as_matrix()));

    let sum = b.add(&b2)?;
    see(rel(&(real_rep(&b).into_matrix() + real_rep(&b2).into_matrix()), real_rep(&sum).as_matrix()));
    see(rel(&(complex_rep(&b).into_matrix() + complex_rep(&b2).into_matrix()), complex_rep(&sum).as_matrix()));
    let alpha: f64 = r.random_range(-3.0..3.0);
    see(rel(&(real_rep(&b).into_matrix() * alpha), real_rep(&b.scale_real(alpha)).as_matrix()));
    let beta = Complex64::new(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
    see(rel(
        &(complex_rep(&b).into_matrix() * beta),
        complex_rep(&b.scale(RBScalar::from_complex(beta))).as_matrix(),
    ));

    let f = a.frobenius_norm();
    for v in [
        0.5 * real_rep(&a).norm(),
        real_rep_col(&a).norm(),
        complex_rep(&a).norm() / 2f64.sqrt(),
        complex_rep_col(&a).norm(),
    ] {
        see((v - f).abs() / f);
    }

    let col = real_rep_col(&a).into_matrix();
    for kind in [OperatorKind::Q, OperatorKind::R, OperatorKind::S] {
        let op = BlockOperator::new(kind, m);
        let dense = op.dense();
        see((dense.transpose() * &dense - DMatrix::identity(4 * m, 4 * m)).norm());
        see(rel(&op.apply_transpose(&op.apply(&col)?)?, &col));
        let twice = op.apply(&op.apply(&col)?)?;
        let sign = if kind == OperatorKind::R { 1.0 } else { -1.0 };
        see(rel(&twice, &(&col * sign)));
    }
    let ccol = complex_rep_col(&a).into_matrix();
    let pop = BlockOperator::new(OperatorKind::P, m);
    see(rel(&pop.apply(&pop.apply(&ccol)?)?, &ccol));
    let pd = pop.dense();
    see((pd.transpose() * &pd - DMatrix::identity(2 * m, 2 * m)).norm());

    see(rb_rel(&from_real_rep(real_rep(&a).as_matrix(), STRUCT_TOL_EXACT)?, &a));
    see(rb_rel(&from_complex_rep(complex_rep(&a).as_matrix(), STRUCT_TOL_EXACT)?, &a));
    see(rb_rel(&from_real_rep_col(&col)?, &a));
    see(rb_rel(&from_complex_rep_col(&ccol)?, &a));
    see(rel(expand_real_col(&col)?.as_matrix(), real_rep(&a).as_matrix()));
    see(rel(expand_complex_col(&ccol)?.as_matrix(), complex_rep(&a).as_matrix()));
    Ok(worst)
}

pub fn check_representation(cases: usize, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("representation identities", IDENTITY_TOL);
    for k in 0..cases {
        tally(&mut out, &format!("case {k}"), representation_case(&mut rng(seed, k)));
    }
    out
}

/// `| ||AX - B|| - ||A_c X - B_c|| |` and the same for the constraint, in
/// both representations, for random `X` that solve nothing.
fn transfer_case(r: &mut ChaCha8Rng, seed: u64) -> rblse_core::Result<f64> {
    let n = r.random_range(1..=8);
    let dims = Dims {
        m: r.random_range(1..=12),
        n,
        p: r.random_range(1..=n.min(4)),
        d: r.random_range(1..=3),
    };
    let prob = random_problem(dims, seed);
    let scale = |b: &RBMatrix| b.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut worst = 0f64;

    let (ar, br, cr, dr) = (real_rep_col(&prob.a), real_rep_col(&prob.b), real_rep_col(&prob.c), real_rep_col(&prob.d));
    let xr = real_matrix(r, dims.n, dims.d);
    let x = FieldMatrix::Real(xr.clone());
    let stacked = (ar.as_matrix() * &xr - br.as_matrix()).norm();
    worst = worst.max((prob.residual(&x)?.frobenius_norm() - stacked).abs() / scale(&prob.b));
    let stacked = (cr.as_matrix() * &xr - dr.as_matrix()).norm();
    worst = worst.max((prob.constraint_residual(&x)?.frobenius_norm() - stacked).abs() / scale(&prob.d));

    let (ac, bc, cc, dc) =
        (complex_rep_col(&prob.a), complex_rep_col(&prob.b), complex_rep_col(&prob.c), complex_rep_col(&prob.d));
    let xc = complex_matrix(r, dims.n, dims.d);
    let x = FieldMatrix::Complex(xc.clone());
    let stacked = (ac.as_matrix() * &xc - bc.as_matrix()).norm();
    worst = worst.max((prob.residual(&x)?.frobenius_norm() - stacked).abs() / scale(&prob.b));
    let stacked = (cc.as_matrix() * &xc - dc.as_matrix()).norm();
    worst = worst.max((prob.constraint_residual(&x)?.frobenius_norm() - stacked).abs() / scale(&prob.d));
    Ok(worst)
}

pub fn check_transfer(cases: usize, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("residual transfer", TRANSFER_TOL);
    for k in 0..cases {
        tally(&mut out, &format!("case {k}"), transfer_case(&mut rng(seed ^ 0x7a, k), seed.wrapping_add(k as u64)));
    }
    if out.detail.is_empty() {
        out.detail = "deviation relative to ||B||_F (residual) and ||D||_F (constraint)".into();
    }
    out
}

/// Exact comparison of the two flop polynomials on the problem schedule.
pub fn check_flop_ordering(ts: impl IntoIterator<Item = usize>) -> CheckOutcome {
    let mut out = CheckOutcome::new("flop ordering", 0.0);
    for t in ts {
        let Dims { m, n, p, d } = schedule(t);
        match (flop_estimate(Mode::Real, m, n, p, d), flop_estimate(Mode::Complex, m, n, p, d)) {
            (Ok(fr), Ok(fc)) => {
                out.case();
                if fr >= fc {
                    out.fail(format!("t={t}: real {fr} >= complex {fc}"));
                }
            }
            (Err(e), _) | (_, Err(e)) => out.fail(format!("t={t}: {e}")),
        }
    }
    out
}

pub fn run_suite(cases: usize, seed: u64) -> Vec<CheckOutcome> {
    vec![
        check_oracle_equivalence(cases, seed),
        check_representation(cases, seed),
        check_transfer(cases, seed),
        check_flop_ordering(1..=9),
    ]
}
