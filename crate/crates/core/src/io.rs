//! JSON files for matrices, problems and solutions.
//!
//! An RB matrix is `{"m": .., "n": .., "planes": {"r": [[..]], "i": .., "j": .., "k": ..}}`
//! with each plane a row-major list of `m` rows of `n` numbers. Numbers are
//! written in shortest round-trip form, so reading back is bit-exact.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldMatrix;
use crate::rbq::RBMatrix;
use crate::solver::{Dims, Metrics, Mode, RblseProblem, RblseSolution};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct PlanesJson {
    r: Vec<Vec<f64>>,
    i: Vec<Vec<f64>>,
    j: Vec<Vec<f64>>,
    k: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
pub struct RBMatrixJson {
    m: usize,
    n: usize,
    planes: PlanesJson,
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix_from_rows(rows: &[Vec<f64>], m: usize, n: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != m || rows.iter().any(|r| r.len() != n) {
        return Err(Error::MalformedFile(format!("{what}: expected {m} rows of {n} numbers")));
    }
    Ok(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
}

impl From<&RBMatrix> for RBMatrixJson {
    fn from(x: &RBMatrix) -> Self {
        let [r, i, j, k] = x.planes();
        RBMatrixJson {
            m: x.nrows(),
            n: x.ncols(),
            planes: PlanesJson {
                r: rows_of(r),
                i: rows_of(i),
                j: rows_of(j),
                k: rows_of(k),
            },
        }
    }
}

impl TryFrom<RBMatrixJson> for RBMatrix {
    type Error = Error;
    fn try_from(v: RBMatrixJson) -> Result<Self> {
        let (m, n) = (v.m, v.n);
        RBMatrix::new(
            matrix_from_rows(&v.planes.r, m, n, "plane r")?,
            matrix_from_rows(&v.planes.i, m, n, "plane i")?,
            matrix_from_rows(&v.planes.j, m, n, "plane j")?,
            matrix_from_rows(&v.planes.k, m, n, "plane k")?,
        )
    }
}

impl Serialize for RBMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RBMatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for RBMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RBMatrixJson::deserialize(d)?;
        RBMatrix::try_from(raw).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemMetadata {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub generator: String,
}

#[derive(Serialize, Deserialize)]
struct ProblemFile {
    format_version: u32,
    metadata: ProblemMetadata,
    a: RBMatrix,
    b: RBMatrix,
    c: RBMatrix,
    d: RBMatrix,
}

/// Real and imaginary parts as row-major lists; `im` is absent for real
/// matrices.
#[derive(Serialize, Deserialize)]
struct FieldMatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
struct SolutionFile {
    format_version: u32,
    mode: Mode,
    x: FieldMatrixJson,
    metrics: Metrics,
    residual_norm: f64,
    seconds: f64,
}

fn check_version(found: u32) -> Result<()> {
    if found != FORMAT_VERSION {
        return Err(Error::UnknownFormatVersion {
            found,
            expected: FORMAT_VERSION,
        });
    }
    Ok(())
}

fn json_err(e: serde_json::Error) -> Error {
    Error::MalformedFile(e.to_string())
}

pub fn problem_to_json(prob: &RblseProblem, meta: &ProblemMetadata) -> Result<String> {
    let file = ProblemFile {
        format_version: FORMAT_VERSION,
        metadata: meta.clone(),
        a: prob.a.clone(),
        b: prob.b.clone(),
        c: prob.c.clone(),
        d: prob.d.clone(),
    };
    serde_json::to_string_pretty(&file).map_err(json_err)
}

pub fn problem_from_json(text: &str) -> Result<(RblseProblem, ProblemMetadata)> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(json_err)?;
    let version = value
        .get("format_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::MalformedFile("missing format_version".into()))?;
    check_version(version as u32)?;
    let file: ProblemFile = serde_json::from_value(value).map_err(json_err)?;
    let prob = RblseProblem::new(file.a, file.b, file.c, file.d)?;
    let Dims { m, n, p, d } = prob.dims();
    let meta = &file.metadata;
    if (meta.m, meta.n, meta.p, meta.d) != (m, n, p, d) {
        return Err(Error::MalformedFile(format!(
            "metadata dims ({}, {}, {}, {}) disagree with matrices ({m}, {n}, {p}, {d})",
            meta.m, meta.n, meta.p, meta.d
        )));
    }
    Ok((prob, file.metadata))
}

pub fn io_write_problem(path: impl AsRef<Path>, prob: &RblseProblem, meta: &ProblemMetadata) -> Result<()> {
    fs::write(path, problem_to_json(prob, meta)?)?;
    Ok(())
}

pub fn io_read_problem(path: impl AsRef<Path>) -> Result<(RblseProblem, ProblemMetadata)> {
    problem_from_json(&fs::read_to_string(path)?)
}

fn field_to_json(x: &FieldMatrix) -> FieldMatrixJson {
    let (rows, cols) = x.shape();
    match x {
        FieldMatrix::Real(x) => FieldMatrixJson {
            rows,
            cols,
            re: rows_of(x),
            im: None,
        },
        FieldMatrix::Complex(x) => FieldMatrixJson {
            rows,
            cols,
            re: rows_of(&x.map(|z| z.re)),
            im: Some(rows_of(&x.map(|z| z.im))),
        },
    }
}

fn field_from_json(v: &FieldMatrixJson, mode: Mode) -> Result<FieldMatrix> {
    let re = matrix_from_rows(&v.re, v.rows, v.cols, "x.re")?;
    match (mode, &v.im) {
        (Mode::Real, None) => Ok(FieldMatrix::Real(re)),
        (Mode::Complex, Some(im)) => {
            let im = matrix_from_rows(im, v.rows, v.cols, "x.im")?;
            Ok(FieldMatrix::Complex(re.zip_map(&im, Complex64::new)))
        }
        (Mode::Real, Some(_)) => Err(Error::MalformedFile("real solution carries an imaginary part".into())),
        (Mode::Complex, None) => Err(Error::MalformedFile("complex solution lacks an imaginary part".into())),
    }
}

pub fn solution_to_json(sol: &RblseSolution) -> Result<String> {
    let file = SolutionFile {
        format_version: FORMAT_VERSION,
        mode: sol.mode,
        x: field_to_json(&sol.x),
        metrics: sol.metrics,
        residual_norm: sol.residual_norm,
        seconds: sol.seconds,
    };
    serde_json::to_string_pretty(&file).map_err(json_err)
}

pub fn solution_from_json(text: &str) -> Result<RblseSolution> {
    let file: SolutionFile = serde_json::from_str(text).map_err(json_err)?;
    check_version(file.format_version)?;
    Ok(RblseSolution {
        mode: file.mode,
        x: field_from_json(&file.x, file.mode)?,
        metrics: file.metrics,
        residual_norm: file.residual_norm,
        seconds: file.seconds,
    })
}

pub fn io_write_solution(path: impl AsRef<Path>, sol: &RblseSolution) -> Result<()> {
    fs::write(path, solution_to_json(sol)?)?;
    Ok(())
}

pub fn io_read_solution(path: impl AsRef<Path>) -> Result<RblseSolution> {
    solution_from_json(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_random_problem;
    use crate::rbq::RBScalar;
    use crate::solver::solve_complex;

    fn meta(prob: &RblseProblem) -> ProblemMetadata {
        let Dims { m, n, p, d } = prob.dims();
        ProblemMetadata {
            m,
            n,
            p,
            d,
            t: Some(1),
            seed: Some(5),
            generator: "test".into(),
        }
    }

    #[test]
    fn matrix_json_layout() {
        let m = RBMatrix::from_fn(1, 2, |_, j| RBScalar::new(j as f64, 0.5, -1.0, 0.1));
        let v: serde_json::Value = serde_json::to_value(&m).unwrap();
        assert_eq!(v["m"], 1);
        assert_eq!(v["n"], 2);
        assert_eq!(v["planes"]["r"], serde_json::json!([[0.0, 1.0]]));
        assert_eq!(v["planes"]["k"], serde_json::json!([[0.1, 0.1]]));
    }

    #[test]
    fn matrix_round_trip_is_bit_exact() {
        let m = RBMatrix::from_fn(3, 2, |i, j| {
            RBScalar::new(0.1 * i as f64 + 1e-300, 1.0 / 3.0, -(j as f64).exp(), f64::MIN_POSITIVE)
        });
        let text = serde_json::to_string(&m).unwrap();
        let back: RBMatrix = serde_json::from_str(&text).unwrap();
        for (a, b) in m.planes().iter().zip(back.planes()) {
            assert!(a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn ragged_matrix_rejected() {
        let text = r#"{"m":1,"n":2,"planes":{"r":[[1,2]],"i":[[1]],"j":[[1,2]],"k":[[1,2]]}}"#;
        assert!(serde_json::from_str::<RBMatrix>(text).is_err());
    }

    #[test]
    fn problem_round_trip() {
        let g = generate_random_problem(1, 5).unwrap();
        let text = problem_to_json(&g.problem, &meta(&g.problem)).unwrap();
        let (back, m) = problem_from_json(&text).unwrap();
        assert_eq!(back, g.problem);
        assert_eq!(m, meta(&g.problem));
    }

    #[test]
    fn truncated_and_versioned_files() {
        let g = generate_random_problem(1, 5).unwrap();
        let text = problem_to_json(&g.problem, &meta(&g.problem)).unwrap();
        let cut = &text[..text.len() / 2];
        assert!(matches!(problem_from_json(cut), Err(Error::MalformedFile(_))));
        let bumped = text.replacen("\"format_version\": 1", "\"format_version\": 9", 1);
        assert!(matches!(
            problem_from_json(&bumped),
            Err(Error::UnknownFormatVersion { found: 9, .. })
        ));
    }

    #[test]
    fn inconsistent_metadata_rejected() {
        let g = generate_random_problem(1, 5).unwrap();
        let mut m = meta(&g.problem);
        m.p = 3;
        let text = problem_to_json(&g.problem, &m).unwrap();
        assert!(matches!(problem_from_json(&text), Err(Error::MalformedFile(_))));
    }

    #[test]
    fn solution_round_trip() {
        let g = generate_random_problem(1, 5).unwrap();
        let sol = solve_complex(&g.problem).unwrap();
        let back = solution_from_json(&solution_to_json(&sol).unwrap()).unwrap();
        assert_eq!(back.x, sol.x);
        assert_eq!(back.mode, Mode::Complex);
        assert_eq!(back.metrics, sol.metrics);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        let g = generate_random_problem(1, 11).unwrap();
        io_write_problem(&path, &g.problem, &meta(&g.problem)).unwrap();
        let (back, _) = io_read_problem(&path).unwrap();
        assert_eq!(back, g.problem);
    }
}
