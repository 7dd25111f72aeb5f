//! Input loading, the result envelope and the rounded payload view.
//!
//! Every run prints exactly one JSON document: `{status, payload, rounded,
//! diagnostics}`. `payload` carries floats at full precision, `rounded` is
//! the same tree with every float cut to 12 significant digits so that
//! golden files stay human-diffable, and the process exit code is a pure
//! function of `status` (0 ok, 1 violated invariant or failed check, 2 bad
//! input).

use std::fs;
use std::io::Read;

use euclid_orbits::spectral::SkewSpectrum;
use euclid_orbits::Error;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Outcome category; exit code 0 is reserved for `Ok`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    InvariantViolation,
    InputError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::InvariantViolation => 1,
            Status::InputError => 2,
        }
    }
}

/// A failed command: the status it maps to plus one diagnostic line.
#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            status: Status::InputError,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        // Internal cross-checks and numerical breakdowns are the tool's
        // problem (exit 1); everything else points back at the request or
        // the data in the input file (exit 2).
        let status = match err {
            Error::InvariantViolation(_) | Error::Decomposition(_) => Status::InvariantViolation,
            _ => Status::InputError,
        };
        Failure {
            status,
            message: err.to_string(),
        }
    }
}

/// The single JSON document printed on stdout.
#[derive(Debug, Serialize)]
pub struct CommandResult {
    pub status: Status,
    pub payload: Value,
    pub rounded: Value,
    pub diagnostics: Vec<String>,
}

impl CommandResult {
    pub fn new(status: Status, payload: Value, diagnostics: Vec<String>) -> Self {
        let rounded = rounded_view(&payload);
        CommandResult {
            status,
            payload,
            rounded,
            diagnostics,
        }
    }
}

/// Reads the whole input file, with `-` standing for stdin.
pub fn read_source(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::input(format!("failed to read stdin: {e}")))?;
        Ok(text)
    } else {
        fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("failed to read `{path}`: {e}")))
    }
}

/// Parses an input file into any of the point types (the element types of
/// the library deserialize from row-major nested arrays).
pub fn load<T: for<'de> Deserialize<'de>>(path: &str) -> Result<T, Failure> {
    let text = read_source(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("failed to parse `{path}`: {e}")))
}

/// Input document of the `spectrum` command.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumInput {
    pub omega: Vec<Vec<f64>>,
}

/// Input document of the `kks` command.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KksInput {
    pub m: euclid_orbits::DualElement,
    pub xi: euclid_orbits::AlgebraElement,
    pub eta: euclid_orbits::AlgebraElement,
}

/// Converts row-major rows into a square matrix.
pub fn square_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>, Failure> {
    let n = rows.len();
    for row in rows {
        if row.len() != n {
            return Err(Failure::input(format!(
                "{what} must be square, got a row of length {} in a {n}-row matrix",
                row.len()
            )));
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Serializable face of a [`SkewSpectrum`].
#[derive(Debug, Serialize)]
pub struct SpectrumView {
    pub n: usize,
    pub d0: usize,
    pub rank: usize,
    pub lambdas: Vec<f64>,
    /// Orthonormal kernel basis, `n x d0`, row-major.
    pub kernel_basis: Vec<Vec<f64>>,
    pub blocks: Vec<BlockView>,
    pub source_norm: f64,
}

#[derive(Debug, Serialize)]
pub struct BlockView {
    pub lambda: f64,
    pub dim: usize,
    /// Orthonormal block basis, `n x dim`, row-major.
    pub basis: Vec<Vec<f64>>,
    /// Complex structure in block coordinates, `dim x dim`.
    pub j: Vec<Vec<f64>>,
}

impl SpectrumView {
    pub fn from_spectrum(spectrum: &SkewSpectrum) -> Self {
        SpectrumView {
            n: spectrum.n(),
            d0: spectrum.d0(),
            rank: spectrum.rank(),
            lambdas: spectrum.lambdas(),
            kernel_basis: rows_of(&spectrum.kernel_basis),
            blocks: spectrum
                .blocks
                .iter()
                .map(|b| BlockView {
                    lambda: b.lambda,
                    dim: b.dim(),
                    basis: rows_of(&b.basis),
                    j: rows_of(&b.j),
                })
                .collect(),
            source_norm: spectrum.source_norm,
        }
    }
}

/// Deep copy of a JSON tree with every float cut to 12 significant digits.
/// Integers (dimensions, counts, seeds) pass through untouched.
pub fn rounded_view(value: &Value) -> Value {
    match value {
        Value::Number(num) if num.is_f64() => {
            Value::from(round_sig(num.as_f64().expect("checked f64")))
        }
        Value::Array(items) => Value::Array(items.iter().map(rounded_view).collect()),
        Value::Object(map) => Value::Object(
            map.iter()
                .map(|(k, v)| (k.clone(), rounded_view(v)))
                .collect(),
        ),
        other => other.clone(),
    }
}

fn round_sig(x: f64) -> f64 {
    if x == 0.0 {
        // Also folds -0.0, which would otherwise survive the round trip and
        // make goldens depend on the sign of a zero.
        return 0.0;
    }
    format!("{x:.11e}").parse().expect("rounded float reparses")
}
