//! Seeded random sampling of group, algebra and dual elements.
//!
//! Everything is driven by a [`ChaCha8Rng`], so a `(seed, trial)` pair fully
//! determines the sample stream independently of scheduling. Skew matrices
//! are skew-projections of i.i.d. normal matrices; rotations come from the QR
//! orthogonalization of a normal matrix with the usual sign fix, plus a
//! determinant fix for the special families.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::elements::{AlgebraElement, DualElement, GroupElement};
use crate::group::{Family, GroupSpec};
use crate::numerics;

/// Root generator for a seed.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for one trial of a Monte-Carlo loop, so trials can
/// run in any order (or in parallel) without changing their samples.
pub fn rng_for_trial(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ trial.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// One standard normal draw (Box-Muller on two uniforms).
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn normal_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| standard_normal(rng))
}

pub fn normal_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| standard_normal(rng))
}

/// Random skew matrix, the skew projection `(A - Aᵀ)/2` of a normal matrix.
pub fn random_skew<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let a = normal_matrix(rng, n, n);
    0.5 * (&a - a.transpose())
}

/// Random element of the subalgebra span with standard normal coordinates in
/// the orthonormal frame. For the standard families this is the same
/// distribution as [`random_skew`].
pub fn random_in_h<R: Rng>(spec: &GroupSpec, rng: &mut R) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(spec.n(), spec.n());
    for f in spec.h_frame() {
        m += standard_normal(rng) * f;
    }
    m
}

/// Haar-ish random rotation: QR of a normal matrix with the R-diagonal sign
/// fix. `special` forces determinant `+1`; otherwise both components of
/// `O(n)` are sampled with equal probability.
pub fn random_rotation<R: Rng>(rng: &mut R, n: usize, special: bool) -> DMatrix<f64> {
    let qr = normal_matrix(rng, n, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    for i in 0..n {
        if r[(i, i)] < 0.0 {
            for k in 0..n {
                q[(k, i)] = -q[(k, i)];
            }
        }
    }
    let want_reflection = !special && rng.random::<bool>();
    let has_reflection = q.determinant() < 0.0;
    if want_reflection != has_reflection {
        for k in 0..n {
            q[(k, n - 1)] = -q[(k, n - 1)];
        }
    }
    q
}

/// Random group element of the family: a rotation (for custom groups, the
/// exponential of a random subalgebra element) plus a normal displacement
/// where the family has one.
pub fn random_group_element<R: Rng>(spec: &GroupSpec, rng: &mut R) -> GroupElement {
    let r = match spec.family() {
        Family::CustomCompact => numerics::expm(&random_in_h(spec, rng)),
        f => random_rotation(rng, spec.n(), f.is_special()),
    };
    let d = if spec.family().has_translations() {
        normal_vector(rng, spec.n())
    } else {
        DVector::zeros(spec.n())
    };
    GroupElement::new(r, d)
}

pub fn random_algebra_element<R: Rng>(spec: &GroupSpec, rng: &mut R) -> AlgebraElement {
    let omega = match spec.family() {
        Family::CustomCompact => random_in_h(spec, rng),
        _ => random_skew(rng, spec.n()),
    };
    let v = if spec.family().has_translations() {
        normal_vector(rng, spec.n())
    } else {
        DVector::zeros(spec.n())
    };
    AlgebraElement::new(omega, v)
}

pub fn random_dual_element<R: Rng>(spec: &GroupSpec, rng: &mut R) -> DualElement {
    let l = match spec.family() {
        Family::CustomCompact => random_in_h(spec, rng),
        _ => random_skew(rng, spec.n()),
    };
    let p = if spec.family().has_translations() {
        normal_vector(rng, spec.n())
    } else {
        DVector::zeros(spec.n())
    };
    DualElement::new(l, p)
}
