//! The Kostant-Kirillov-Souriau form on coadjoint orbits, degeneracy checks
//! along the two fibre directions of the orbit fibration, and the symplectic
//! geometry of the space of oriented lines.
//!
//! A coadjoint orbit carries the KKS symplectic form
//! `ω_m(coad_ζ m, coad_η m) = ⟨m, [ζ, η]⟩`. Over the base of the orbit
//! fibration the form interacts with the two fibre types in opposite ways:
//!
//! * the translation fibre directions are *isotropic*: two pure translations
//!   bracket to zero, so [`fibre_isotropy_check`] sees exact zeros, not just
//!   small numbers;
//! * the reduced fibre, the coadjoint orbit of the stabilizer `H_p` through
//!   the reduced angular part, is *symplectic*: [`symplectic_fibre_check`]
//!   builds the Gram matrix of the KKS form on an orthonormalized tangent
//!   basis of that fibre and reports its smallest singular value.
//!
//! The oriented-line interface realizes the orbits with zero reduced angular
//! part concretely as the manifold of oriented affine lines in `R^n`,
//! with its tautological symplectic structure [`line_form`]. The scalar
//! relating that form to the KKS form (it scales linearly with `|p|`) is
//! measured, not assumed, by [`line_form_vs_kks`].

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::elements::{AlgebraElement, DualElement, GroupElement};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::numerics;
use crate::orbit;
use crate::sampling;
use crate::tolerance::ToleranceConfig;

/// An oriented affine line in `R^n`, stored as its unit direction and the
/// point of the line closest to the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedLine {
    /// Unit direction vector.
    pub direction: DVector<f64>,
    /// Base point, orthogonal to `direction`.
    pub base: DVector<f64>,
}

impl OrientedLine {
    /// Builds a line from a direction ray and any point on the line.
    ///
    /// The direction is normalized and the point is replaced by the foot of
    /// the perpendicular from the origin. A zero direction is rejected.
    pub fn new(direction: DVector<f64>, point: DVector<f64>) -> Result<Self> {
        let norm = direction.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::LineMismatch { residual: 1.0 });
        }
        let direction = direction / norm;
        let base = &point - &direction * direction.dot(&point);
        Ok(Self { direction, base })
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    /// The point `base + t * direction`.
    pub fn point_at(&self, t: f64) -> DVector<f64> {
        &self.base + &self.direction * t
    }
}

/// A tangent vector to the space of oriented lines at some line: the
/// velocity `a` of the base point and the velocity `b` of the direction,
/// both orthogonal to the line's direction.
#[derive(Debug, Clone, PartialEq)]
pub struct LineTangent {
    pub a: DVector<f64>,
    pub b: DVector<f64>,
}

impl LineTangent {
    pub fn new(a: DVector<f64>, b: DVector<f64>) -> Self {
        Self { a, b }
    }
}

// Serialized form: plain coordinate lists.
#[derive(Serialize, Deserialize)]
struct LineRepr {
    direction: Vec<f64>,
    base: Vec<f64>,
}

impl Serialize for OrientedLine {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        LineRepr {
            direction: self.direction.iter().copied().collect(),
            base: self.base.iter().copied().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OrientedLine {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = LineRepr::deserialize(deserializer)?;
        if repr.base.len() != repr.direction.len() {
            return Err(serde::de::Error::custom(format!(
                "line direction has {} entries but base has {}",
                repr.direction.len(),
                repr.base.len()
            )));
        }
        OrientedLine::new(
            DVector::from_vec(repr.direction),
            DVector::from_vec(repr.base),
        )
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct TangentRepr {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Serialize for LineTangent {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        TangentRepr {
            a: self.a.iter().copied().collect(),
            b: self.b.iter().copied().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LineTangent {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = TangentRepr::deserialize(deserializer)?;
        if repr.a.len() != repr.b.len() {
            return Err(serde::de::Error::custom(format!(
                "tangent components have lengths {} and {}",
                repr.a.len(),
                repr.b.len()
            )));
        }
        Ok(LineTangent::new(
            DVector::from_vec(repr.a),
            DVector::from_vec(repr.b),
        ))
    }
}

// ----- the KKS form -----------------------------------------------------

/// Evaluates the KKS form at `m` on the tangent vectors generated by `xi`
/// and `eta`: `⟨m, [xi, eta]⟩`.
pub fn kks_eval(
    spec: &GroupSpec,
    m: &DualElement,
    xi: &AlgebraElement,
    eta: &AlgebraElement,
) -> Result<f64> {
    spec.check_dual_element(m)?;
    spec.check_algebra_element(xi)?;
    spec.check_algebra_element(eta)?;
    Ok(spec.pairing(m, &spec.bracket(xi, eta)?))
}

/// Result of [`fibre_isotropy_check`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FibreIsotropyReport {
    /// Largest `|⟨m, [(0,u), (0,u')]⟩|` seen; zero bracket makes this an
    /// exact 0.0, not merely a small number.
    pub max_abs: f64,
    /// Rank of `τ_p`: the dimension actually spanned by the translation
    /// tangent directions at `m`.
    pub tangent_rank: usize,
    /// `dim 𝔥 − dim 𝔥_p`, the expected span, computed from the stabilizer
    /// side.
    pub expected_rank: usize,
    pub trials: usize,
}

/// Verifies that the translation fibre directions are isotropic for the KKS
/// form at `m`, and that they span a space of the predicted dimension.
pub fn fibre_isotropy_check(
    spec: &GroupSpec,
    m: &DualElement,
    trials: usize,
    seed: u64,
) -> Result<FibreIsotropyReport> {
    spec.check_dual_element(m)?;
    if !spec.family().has_translations() {
        return Err(Error::UnsupportedFamily {
            family: spec.family().name(),
            reason: "the translation fibre only exists for semidirect families",
        });
    }
    let n = spec.n();
    let mut max_abs: f64 = 0.0;
    for trial in 0..trials {
        let mut rng = sampling::rng_for_trial(seed, trial as u64);
        let u = sampling::normal_vector(&mut rng, n);
        let w = sampling::normal_vector(&mut rng, n);
        let xi = AlgebraElement::new(DMatrix::zeros(n, n), u);
        let eta = AlgebraElement::new(DMatrix::zeros(n, n), w);
        max_abs = max_abs.max(kks_eval(spec, m, &xi, &eta)?.abs());
    }
    let tangent_rank = numerics::svd_rank(&spec.tau_matrix(&m.p)?, spec.tol().rank_rel);
    // Stabilizer side: rank of xi |-> xi p over the h-frame.
    let mut a = DMatrix::zeros(n, spec.dim_h());
    for (col, f) in spec.h_frame().iter().enumerate() {
        a.set_column(col, &(f * &m.p));
    }
    let expected_rank = numerics::svd_rank(&a, spec.tol().rank_rel);
    Ok(FibreIsotropyReport {
        max_abs,
        tangent_rank,
        expected_rank,
        trials,
    })
}

/// Result of [`symplectic_fibre_check`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SymplecticFibreReport {
    /// Dimension of the stabilizer subalgebra `𝔥_p`.
    pub stabilizer_dim: usize,
    /// Dimension of the reduced fibre, the `H_p`-orbit of the angular part.
    pub fibre_dim: usize,
    /// Smallest singular value of the KKS Gram matrix on an orthonormalized
    /// tangent basis of the fibre; `+inf` for a zero-dimensional fibre.
    pub min_singular_value: f64,
}

/// Checks non-degeneracy of the KKS form on the reduced fibre through `m`.
///
/// The tangent space of the fibre is spanned by `coad_(ξ,0) m` for `ξ` in
/// the stabilizer `𝔥_p`. The tangents are orthonormalized (tracking which
/// generator combination produces each direction) and the KKS Gram matrix is
/// evaluated on those combinations; a regular reduced angular part keeps its
/// smallest singular value well away from zero.
pub fn symplectic_fibre_check(spec: &GroupSpec, m: &DualElement) -> Result<SymplecticFibreReport> {
    spec.check_dual_element(m)?;
    let n = spec.n();
    if m.p.norm() <= spec.tol().abs {
        return Err(Error::ZeroMomentum);
    }
    // Basis of h_p = { xi in h : xi p = 0 }.
    let mut a = DMatrix::zeros(n, spec.dim_h());
    for (col, f) in spec.h_frame().iter().enumerate() {
        a.set_column(col, &(f * &m.p));
    }
    let null = numerics::nullspace(&a, spec.tol().rank_rel)?;
    let stabilizer_dim = null.ncols();
    let generators: Vec<AlgebraElement> = (0..stabilizer_dim)
        .map(|k| {
            AlgebraElement::new(
                spec.h_from_coords(&null.column(k).into_owned()),
                DVector::zeros(n),
            )
        })
        .collect();
    let tangents: Vec<DVector<f64>> = generators
        .iter()
        .map(|xi| Ok(spec.dual_coords(&spec.coadjoint_infinitesimal(xi, m)?)))
        .collect::<Result<_>>()?;

    // Orthonormalize the tangents, remembering the generator combination
    // behind each kept direction.
    let scale = tangents.iter().map(|t| t.norm()).fold(0.0_f64, f64::max);
    let cut = spec.tol().rank_rel * scale.max(1.0);
    let mut frame: Vec<DVector<f64>> = Vec::new();
    let mut combos: Vec<DVector<f64>> = Vec::new();
    for (k, t) in tangents.iter().enumerate() {
        let mut v = t.clone();
        let mut c = DVector::zeros(stabilizer_dim);
        c[k] = 1.0;
        // Two passes of modified Gram-Schmidt keep the frame orthonormal
        // even for nearly dependent tangents.
        for _ in 0..2 {
            for (q, qc) in frame.iter().zip(&combos) {
                let h = q.dot(&v);
                v -= q * h;
                c -= qc * h;
            }
        }
        let norm = v.norm();
        if norm > cut {
            frame.push(v / norm);
            combos.push(c / norm);
        }
    }
    let fibre_dim = frame.len();
    if fibre_dim == 0 {
        return Ok(SymplecticFibreReport {
            stabilizer_dim,
            fibre_dim,
            min_singular_value: f64::INFINITY,
        });
    }

    let combo_element = |c: &DVector<f64>| {
        let mut omega = DMatrix::zeros(n, n);
        for (k, gen) in generators.iter().enumerate() {
            omega += &gen.omega * c[k];
        }
        AlgebraElement::new(omega, DVector::zeros(n))
    };
    let elements: Vec<AlgebraElement> = combos.iter().map(combo_element).collect();
    let mut gram = DMatrix::zeros(fibre_dim, fibre_dim);
    for i in 0..fibre_dim {
        for j in (i + 1)..fibre_dim {
            let value = kks_eval(spec, m, &elements[i], &elements[j])?;
            gram[(i, j)] = value;
            gram[(j, i)] = -value;
        }
    }
    let min_singular_value = gram.svd(false, false).singular_values.min();
    Ok(SymplecticFibreReport {
        stabilizer_dim,
        fibre_dim,
        min_singular_value,
    })
}

// ----- oriented lines ---------------------------------------------------

fn check_tangent(line: &OrientedLine, t: &LineTangent, tol: &ToleranceConfig) -> Result<()> {
    if t.a.len() != line.dim() {
        return Err(Error::Dimension {
            context: "line tangent",
            expected: line.dim(),
            got: t.a.len(),
        });
    }
    let scale = t.a.norm().max(t.b.norm()).max(1.0);
    let residual =
        t.a.dot(&line.direction)
            .abs()
            .max(t.b.dot(&line.direction).abs());
    if residual > tol.abs_scaled(scale) {
        return Err(Error::LineMismatch {
            residual: residual / scale,
        });
    }
    Ok(())
}

/// The tautological symplectic form of the space of oriented lines,
/// evaluated on two tangents at `line`:
/// `σ(t1, t2) = t1.a · t2.b − t2.a · t1.b`.
pub fn line_form(
    line: &OrientedLine,
    t1: &LineTangent,
    t2: &LineTangent,
    tol: &ToleranceConfig,
) -> Result<f64> {
    check_tangent(line, t1, tol)?;
    check_tangent(line, t2, tol)?;
    Ok(t1.a.dot(&t2.b) - t2.a.dot(&t1.b))
}

/// Reads a coadjoint point on a line orbit as an oriented line.
///
/// The momentum `p` gives the direction; the base point solves
/// `μ(p, base) = L`. Fails with [`Error::ZeroMomentum`] when `p = 0` and
/// with [`Error::NotOnLineOrbit`] when the angular part has a component not
/// of the form `μ(p, ·)` (a nonzero reduced angular part).
pub fn line_from_coadjoint(spec: &GroupSpec, m: &DualElement) -> Result<OrientedLine> {
    if !spec.family().has_translations() {
        return Err(Error::UnsupportedFamily {
            family: spec.family().name(),
            reason: "line orbits only exist for semidirect families",
        });
    }
    spec.check_dual_element(m)?;
    let p_norm = m.p.norm();
    if p_norm <= spec.tol().abs {
        return Err(Error::ZeroMomentum);
    }
    let nf = orbit::normal_form_coadjoint(spec, m)?;
    let reduced = nf.point.l.norm();
    if reduced > spec.tol().abs_scaled(m.l.norm().max(p_norm)) {
        return Err(Error::NotOnLineOrbit { residual: reduced });
    }
    let t = spec.tau_matrix(&m.p)?;
    let base = numerics::lstsq_min_norm(&t, &spec.h_coords(&m.l), spec.tol().rank_rel)?;
    OrientedLine::new(m.p.clone(), base)
}

/// Moves an oriented line by a Euclidean motion: rotate the direction, move
/// the base point, refoot the perpendicular.
pub fn line_action(
    spec: &GroupSpec,
    g: &GroupElement,
    line: &OrientedLine,
) -> Result<OrientedLine> {
    spec.check_group_element(g)?;
    if line.dim() != spec.n() {
        return Err(Error::Dimension {
            context: "line action",
            expected: spec.n(),
            got: line.dim(),
        });
    }
    let direction = &g.r * &line.direction;
    let point = &g.r * &line.base + &g.d;
    OrientedLine::new(direction, point)
}

/// Pushes a tangent of the line space forward along the action of `g`.
///
/// With `s = (r u) · d` the formulas are `b' = r b` and `a' = r a − s r b`:
/// the base-velocity picks up a slope term because the perpendicular foot
/// slides along the moved line.
pub fn line_tangent_pushforward(
    spec: &GroupSpec,
    g: &GroupElement,
    line: &OrientedLine,
    t: &LineTangent,
) -> Result<LineTangent> {
    spec.check_group_element(g)?;
    check_tangent(line, t, spec.tol())?;
    let ru = &g.r * &line.direction;
    let s = ru.dot(&g.d);
    let rb = &g.r * &t.b;
    let a = &g.r * &t.a - &rb * s;
    Ok(LineTangent::new(a, rb))
}

/// Result of [`line_form_vs_kks`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LineKksReport {
    /// Fitted scalar `c` with `KKS ≈ c · line_form` at this momentum.
    pub scalar: f64,
    /// Largest relative deviation `|KKS − c · line_form|` over the pairs with
    /// a non-negligible value on either side.
    pub max_relative_deviation: f64,
    /// Number of tangent pairs entering the fit.
    pub pairs: usize,
}

/// Measures the scalar relating the KKS form at `m = (0, p)` to the
/// tautological form of the line space.
///
/// Tangents are produced by pushing `m` along `exp(±ε ζ)` for random `ζ` and
/// differencing the resulting lines centrally; the scalar is the least
/// squares fit over all sampled pairs. The scalar depends on `|p|` (it
/// scales linearly with it), which is why it is fitted rather than fixed.
pub fn line_form_vs_kks(
    spec: &GroupSpec,
    p: &DVector<f64>,
    trials: usize,
    seed: u64,
) -> Result<LineKksReport> {
    if !spec.family().has_translations() {
        return Err(Error::UnsupportedFamily {
            family: spec.family().name(),
            reason: "line orbits only exist for semidirect families",
        });
    }
    let n = spec.n();
    if p.len() != n {
        return Err(Error::Dimension {
            context: "line momentum",
            expected: n,
            got: p.len(),
        });
    }
    if p.norm() <= spec.tol().abs {
        return Err(Error::ZeroMomentum);
    }
    let m = DualElement::new(DMatrix::zeros(n, n), p.clone());
    let center = line_from_coadjoint(spec, &m)?;
    let u = center.direction.clone();
    let eps = 1e-6;

    let tangent_of = |zeta: &AlgebraElement| -> Result<LineTangent> {
        let mut ends = Vec::with_capacity(2);
        for sign in [1.0, -1.0] {
            let scaled = AlgebraElement::new(&zeta.omega * (sign * eps), &zeta.v * (sign * eps));
            let g = spec.exp(&scaled)?;
            let moved = spec.coadjoint_action(&g, &m)?;
            ends.push(line_from_coadjoint(spec, &moved)?);
        }
        let db = (&ends[0].base - &ends[1].base) / (2.0 * eps);
        let du = (&ends[0].direction - &ends[1].direction) / (2.0 * eps);
        let a = &db - &u * u.dot(&db);
        let b = &du - &u * u.dot(&du);
        Ok(LineTangent::new(a, b))
    };

    let mut pairs = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng = sampling::rng_for_trial(seed, trial as u64);
        let zeta1 = sampling::random_algebra_element(spec, &mut rng);
        let zeta2 = sampling::random_algebra_element(spec, &mut rng);
        let lhs = kks_eval(spec, &m, &zeta1, &zeta2)?;
        let t1 = tangent_of(&zeta1)?;
        let t2 = tangent_of(&zeta2)?;
        let rhs = line_form(&center, &t1, &t2, spec.tol())?;
        pairs.push((lhs, rhs));
    }

    let den: f64 = pairs.iter().map(|(_, r)| r * r).sum();
    let num: f64 = pairs.iter().map(|(l, r)| l * r).sum();
    let scalar = if den > 0.0 { num / den } else { 0.0 };
    let reference = pairs
        .iter()
        .map(|(l, r)| l.abs().max((scalar * r).abs()))
        .fold(0.0_f64, f64::max);
    let floor = 1e-9 * reference.max(1.0);
    let mut max_relative_deviation: f64 = 0.0;
    for (l, r) in &pairs {
        let magnitude = l.abs().max((scalar * r).abs());
        if magnitude > floor {
            max_relative_deviation = max_relative_deviation.max((l - scalar * r).abs() / magnitude);
        }
    }
    Ok(LineKksReport {
        scalar,
        max_relative_deviation,
        pairs: pairs.len(),
    })
}
