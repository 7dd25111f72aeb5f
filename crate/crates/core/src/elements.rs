//! Element types for a semidirect product `G = H ⋉ V`: group elements
//! `(r, d)`, Lie algebra elements `(ω, v)` and dual elements `(L, p)`.
//!
//! The types are plain data carriers; the mathematical invariants (skewness,
//! orthogonality, membership in a custom subalgebra, vanishing translation
//! parts for the compact families) are enforced by the validation methods on
//! [`crate::GroupSpec`].
//!
//! JSON encodings use row-major nested arrays for matrices:
//!
//! ```json
//! {"omega": [[0.0, -1.0], [1.0, 0.0]], "v": [1.0, 0.0]}
//! ```
//!
//! The vector parts (`v`, `p`, `d`) may be omitted and default to zero.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A group element `(r, d)` acting on `R^n` by `x ↦ r x + d`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    /// Orthogonal part, an element of `H ⊂ O(n)`.
    pub r: DMatrix<f64>,
    /// Displacement part; identically zero for the compact families.
    pub d: DVector<f64>,
}

/// A Lie algebra element `(ω, v)` with `ω` skew-symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    /// Skew-symmetric part in the subalgebra `𝔥 ⊂ 𝔰𝔬(n)`.
    pub omega: DMatrix<f64>,
    /// Translation part; identically zero for the compact families.
    pub v: DVector<f64>,
}

/// A dual element `(L, p)`, realized inside the algebra via the invariant
/// pairing `B((L, p), (ω, v)) = tr(LᵀΩ)/2 + pᵀv`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualElement {
    /// Angular momentum part, a skew matrix in the realization of `𝔥*`.
    pub l: DMatrix<f64>,
    /// Linear momentum part; identically zero for the compact families.
    pub p: DVector<f64>,
}

impl GroupElement {
    pub fn new(r: DMatrix<f64>, d: DVector<f64>) -> Self {
        debug_assert_eq!(r.nrows(), r.ncols());
        debug_assert_eq!(r.nrows(), d.len());
        Self { r, d }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n), DVector::zeros(n))
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    /// Applies the affine action `x ↦ r x + d` to a point of `R^n`.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.r * x + &self.d
    }
}

impl AlgebraElement {
    pub fn new(omega: DMatrix<f64>, v: DVector<f64>) -> Self {
        debug_assert_eq!(omega.nrows(), omega.ncols());
        debug_assert_eq!(omega.nrows(), v.len());
        Self { omega, v }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(DMatrix::zeros(n, n), DVector::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.omega.nrows()
    }
}

impl DualElement {
    pub fn new(l: DMatrix<f64>, p: DVector<f64>) -> Self {
        debug_assert_eq!(l.nrows(), l.ncols());
        debug_assert_eq!(l.nrows(), p.len());
        Self { l, p }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(DMatrix::zeros(n, n), DVector::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn matrix_from_rows<E: serde::de::Error>(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>, E> {
    let n = rows.len();
    for row in rows {
        if row.len() != n {
            return Err(E::custom(format!(
                "{what} must be a square row-major matrix, got a row of length {} in a {n}-row matrix",
                row.len()
            )));
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn vector_from<E: serde::de::Error>(
    entries: Option<Vec<f64>>,
    n: usize,
    what: &str,
) -> Result<DVector<f64>, E> {
    match entries {
        None => Ok(DVector::zeros(n)),
        Some(e) if e.len() == n => Ok(DVector::from_vec(e)),
        Some(e) => Err(E::custom(format!(
            "{what} has length {}, expected {n}",
            e.len()
        ))),
    }
}

#[derive(Serialize, Deserialize)]
struct GroupElementRepr {
    r: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraElementRepr {
    omega: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct DualElementRepr {
    #[serde(rename = "L")]
    l: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<Vec<f64>>,
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GroupElementRepr {
            r: rows_of(&self.r),
            d: Some(self.d.iter().copied().collect()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = GroupElementRepr::deserialize(d)?;
        let r = matrix_from_rows(&repr.r, "r")?;
        let n = r.nrows();
        let disp = vector_from(repr.d, n, "d")?;
        Ok(GroupElement::new(r, disp))
    }
}

impl Serialize for AlgebraElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        AlgebraElementRepr {
            omega: rows_of(&self.omega),
            v: Some(self.v.iter().copied().collect()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgebraElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = AlgebraElementRepr::deserialize(d)?;
        let omega = matrix_from_rows(&repr.omega, "omega")?;
        let n = omega.nrows();
        let v = vector_from(repr.v, n, "v")?;
        Ok(AlgebraElement::new(omega, v))
    }
}

impl Serialize for DualElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DualElementRepr {
            l: rows_of(&self.l),
            p: Some(self.p.iter().copied().collect()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DualElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = DualElementRepr::deserialize(d)?;
        let l = matrix_from_rows(&repr.l, "L")?;
        let n = l.nrows();
        let p = vector_from(repr.p, n, "p")?;
        Ok(DualElement::new(l, p))
    }
}
