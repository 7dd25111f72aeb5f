//! Group data and the core operations of a Euclidean-type semidirect product
//! `G = H ⋉ V` with `H ⊂ O(n)` and `V = R^n`.
//!
//! The group law is `(r1, d1)(r2, d2) = (r1 r2, d1 + r1 d2)`. On the algebra
//! `𝔤 = 𝔥 ⋉ V` the adjoint action of `g = (r, d)` is
//!
//! ```text
//! Ad_g (ω, v) = (r ω rᵀ, r v − (r ω rᵀ) d)
//! ```
//!
//! and, realizing `𝔤*` inside `𝔤` through the invariant inner products
//! `B_𝔥(X, Y) = tr(XᵀY)/2` on `𝔥` and the dot product on `V`, the coadjoint
//! action is
//!
//! ```text
//! Ad*_g (L, p) = (r L rᵀ + μ(r p, d), r p)
//! ```
//!
//! where `μ : V × V → 𝔥*` is the momentum map of the `H`-action on `V`,
//! defined by `⟨μ(p, v), ω⟩ = ⟨p, ω v⟩`. For the full `𝔰𝔬(n)` this gives the
//! familiar `μ(p, v) = p vᵀ − v pᵀ`; for a proper subalgebra it is the
//! `B_𝔥`-orthogonal projection of that matrix onto the subalgebra.
//!
//! The compact families `O`/`SO` are handled as the degenerate case `V = {0}`:
//! translation parts are stored but must vanish, and `dim 𝔤 = dim 𝔥`.

use nalgebra::{DMatrix, DVector};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::elements::{AlgebraElement, DualElement, GroupElement};
use crate::error::{Error, Result};
use crate::numerics;
use crate::tolerance::ToleranceConfig;

/// The supported group families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `O(n)` with trivial translation part.
    O,
    /// `SO(n)` with trivial translation part.
    SO,
    /// The Euclidean group `E(n) = O(n) ⋉ R^n`.
    E,
    /// The special Euclidean group `SE(n) = SO(n) ⋉ R^n`.
    SE,
    /// `H ⋉ R^n` for a custom compact `H ⊂ O(n)` given by a closed basis of
    /// its Lie algebra.
    CustomCompact,
}

impl Family {
    /// Whether the translation part of the group is all of `R^n` (as opposed
    /// to the trivial one of the compact families).
    pub fn has_translations(self) -> bool {
        !matches!(self, Family::O | Family::SO)
    }

    /// Whether elements of `H` are required to have determinant `+1`.
    pub fn is_special(self) -> bool {
        matches!(self, Family::SO | Family::SE)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::O => "O",
            Family::SO => "SO",
            Family::E => "E",
            Family::SE => "SE",
            Family::CustomCompact => "custom",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        match raw.as_str() {
            "O" => Ok(Family::O),
            "SO" => Ok(Family::SO),
            "E" => Ok(Family::E),
            "SE" => Ok(Family::SE),
            "custom" => Ok(Family::CustomCompact),
            other => Err(D::Error::custom(format!(
                "unknown family {other:?}, expected one of O, SO, E, SE, custom"
            ))),
        }
    }
}

/// A validated group context: the family, the ambient dimension, a
/// `B_𝔥`-orthonormal frame of the subalgebra `𝔥`, and the tolerances used by
/// every numerical decision made on its behalf.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    n: usize,
    family: Family,
    tol: ToleranceConfig,
    /// `B_𝔥`-orthonormal basis of `𝔥`. For the standard families this is the
    /// basis `E_ij = e_j e_iᵀ − e_i e_jᵀ` (i < j); for custom subgroups an
    /// orthonormalization of the user-supplied basis.
    h_frame: Vec<DMatrix<f64>>,
    /// The basis as supplied by the user (custom family only).
    raw_basis: Option<Vec<DMatrix<f64>>>,
}

/// Standard basis `E_ij = e_j e_iᵀ − e_i e_jᵀ` of `𝔰𝔬(n)`, ordered
/// lexicographically by `(i, j)` with `i < j`. Orthonormal for
/// `B(X, Y) = tr(XᵀY)/2`.
fn so_basis(n: usize) -> Vec<DMatrix<f64>> {
    let mut basis = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut m = DMatrix::zeros(n, n);
            m[(j, i)] = 1.0;
            m[(i, j)] = -1.0;
            basis.push(m);
        }
    }
    basis
}

impl GroupSpec {
    /// The Euclidean group `E(n)`.
    pub fn euclidean(n: usize) -> Self {
        Self::standard(n, Family::E, ToleranceConfig::default())
    }

    /// The special Euclidean group `SE(n)`.
    pub fn special_euclidean(n: usize) -> Self {
        Self::standard(n, Family::SE, ToleranceConfig::default())
    }

    /// The orthogonal group `O(n)` (trivial translation part).
    pub fn orthogonal(n: usize) -> Self {
        Self::standard(n, Family::O, ToleranceConfig::default())
    }

    /// The special orthogonal group `SO(n)` (trivial translation part).
    pub fn special_orthogonal(n: usize) -> Self {
        Self::standard(n, Family::SO, ToleranceConfig::default())
    }

    /// A standard family with explicit tolerances.
    pub fn standard(n: usize, family: Family, tol: ToleranceConfig) -> Self {
        assert!(n >= 1, "ambient dimension must be at least 1");
        assert!(
            family != Family::CustomCompact,
            "use GroupSpec::custom for custom subgroups"
        );
        tol.validate().expect("tolerances must be positive");
        Self {
            n,
            family,
            tol,
            h_frame: so_basis(n),
            raw_basis: None,
        }
    }

    /// `H ⋉ R^n` for the compact subgroup whose Lie algebra is spanned by
    /// `basis`. The basis matrices must be skew, linearly independent, and
    /// closed under the commutator.
    pub fn custom(n: usize, basis: Vec<DMatrix<f64>>, tol: ToleranceConfig) -> Result<Self> {
        tol.validate()?;
        if n < 1 {
            return Err(Error::Dimension {
                context: "ambient dimension",
                expected: 1,
                got: n,
            });
        }
        let full = so_basis(n);
        let dim_so = full.len();
        for b in &basis {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::Dimension {
                    context: "subalgebra basis matrix",
                    expected: n,
                    got: b.nrows().max(b.ncols()),
                });
            }
            let sym = (b + b.transpose()).amax();
            let tol_skew = tol.abs_scaled(b.amax());
            if sym > tol_skew {
                return Err(Error::NotSkew {
                    residual: sym,
                    tol: tol_skew,
                });
            }
        }
        // Coordinates of the basis in the standard so(n) frame; B_h restricted
        // to so(n) is the dot product in these coordinates.
        let coords = DMatrix::from_fn(dim_so, basis.len(), |a, k| b_form(&full[a], &basis[k]));
        let rank = numerics::svd_rank(&coords, tol.rank_rel);
        if rank < basis.len() {
            return Err(Error::BasisDegenerate {
                rank,
                len: basis.len(),
            });
        }
        // Orthonormal frame of the span via QR in coordinates.
        let qr = coords.clone().qr();
        let q = qr.q();
        let h_frame: Vec<DMatrix<f64>> = (0..basis.len())
            .map(|k| {
                let mut m = DMatrix::zeros(n, n);
                for a in 0..dim_so {
                    m += q[(a, k)] * &full[a];
                }
                m
            })
            .collect();
        // Closure under the commutator, checked against the span.
        for i in 0..basis.len() {
            for j in (i + 1)..basis.len() {
                let c = &basis[i] * &basis[j] - &basis[j] * &basis[i];
                let mut proj = DMatrix::zeros(n, n);
                for f in &h_frame {
                    proj += b_form(f, &c) * f;
                }
                let residual = (&c - proj).norm();
                if residual > tol.abs_scaled(c.norm()) {
                    return Err(Error::BasisNotClosed { i, j, residual });
                }
            }
        }
        Ok(Self {
            n,
            family: Family::CustomCompact,
            tol,
            h_frame,
            raw_basis: Some(basis),
        })
    }

    /// Replaces the tolerances, revalidating them.
    pub fn with_tolerances(mut self, tol: ToleranceConfig) -> Result<Self> {
        tol.validate()?;
        self.tol = tol;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn tol(&self) -> &ToleranceConfig {
        &self.tol
    }

    /// `B_𝔥`-orthonormal frame of the subalgebra.
    pub fn h_frame(&self) -> &[DMatrix<f64>] {
        &self.h_frame
    }

    /// Dimension of `𝔥`.
    pub fn dim_h(&self) -> usize {
        self.h_frame.len()
    }

    /// Dimension of the translation part (`n`, or 0 for `O`/`SO`).
    pub fn dim_v(&self) -> usize {
        if self.family.has_translations() {
            self.n
        } else {
            0
        }
    }

    /// Dimension of the full Lie algebra `𝔤 = 𝔥 ⋉ V`.
    pub fn dim_g(&self) -> usize {
        self.dim_h() + self.dim_v()
    }

    // ----- validation ---------------------------------------------------

    fn check_n(&self, got: usize, context: &'static str) -> Result<()> {
        if got != self.n {
            return Err(Error::Dimension {
                context,
                expected: self.n,
                got,
            });
        }
        Ok(())
    }

    fn check_translation(&self, vec: &DVector<f64>, context: &'static str) -> Result<()> {
        if !self.family.has_translations() {
            let norm = vec.norm();
            if norm > self.tol.abs {
                return Err(Error::TranslationNotSupported { context, norm });
            }
        }
        Ok(())
    }

    fn check_in_h(&self, m: &DMatrix<f64>) -> Result<()> {
        if self.family != Family::CustomCompact {
            return Ok(());
        }
        let residual = (m - self.project_h(m)).norm();
        let tol = self.tol.abs_scaled(m.norm());
        if residual > tol {
            return Err(Error::NotInSubalgebra { residual, tol });
        }
        Ok(())
    }

    fn check_skew(&self, m: &DMatrix<f64>) -> Result<()> {
        let residual = (m + m.transpose()).amax();
        let tol = self.tol.abs_scaled(m.amax());
        if residual > tol {
            return Err(Error::NotSkew { residual, tol });
        }
        Ok(())
    }

    /// Validates a group element: shapes, orthogonality of `r`, determinant
    /// `+1` for the special families, and a vanishing displacement for the
    /// compact ones. Membership of `r` in a custom `H` is not decided here;
    /// elements of custom groups should be produced through [`GroupSpec::exp`]
    /// or by composing validated elements.
    pub fn check_group_element(&self, g: &GroupElement) -> Result<()> {
        self.check_n(g.r.nrows(), "group element r")?;
        self.check_n(g.d.len(), "group element d")?;
        let residual = (g.r.transpose() * &g.r - DMatrix::identity(self.n, self.n)).amax();
        if residual > self.tol.abs {
            return Err(Error::NotOrthogonal {
                residual,
                tol: self.tol.abs,
            });
        }
        if self.family.is_special() {
            let det = g.r.determinant();
            if det < 0.0 {
                return Err(Error::NotSpecial { det });
            }
        }
        self.check_translation(&g.d, "displacement d")
    }

    /// Validates an algebra element: shapes, skewness, membership in a custom
    /// subalgebra, and a vanishing translation part for the compact families.
    pub fn check_algebra_element(&self, x: &AlgebraElement) -> Result<()> {
        self.check_n(x.omega.nrows(), "algebra element omega")?;
        self.check_n(x.v.len(), "algebra element v")?;
        self.check_skew(&x.omega)?;
        self.check_in_h(&x.omega)?;
        self.check_translation(&x.v, "translation part v")
    }

    /// Validates a dual element: shapes, skewness, membership of `L` in the
    /// realization `span(h_basis)`, and `p = 0` for the compact families.
    pub fn check_dual_element(&self, m: &DualElement) -> Result<()> {
        self.check_n(m.l.nrows(), "dual element L")?;
        self.check_n(m.p.len(), "dual element p")?;
        self.check_skew(&m.l)?;
        self.check_in_h(&m.l)?;
        self.check_translation(&m.p, "momentum p")
    }

    // ----- the invariant form and coordinates ---------------------------

    /// Coordinates of a skew matrix in the `h_frame`, i.e. `B_𝔥(M, F_a)`.
    pub fn h_coords(&self, m: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_fn(self.dim_h(), |a, _| b_form(&self.h_frame[a], m))
    }

    /// Skew matrix with the given `h_frame` coordinates.
    pub fn h_from_coords(&self, c: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (a, f) in self.h_frame.iter().enumerate() {
            m += c[a] * f;
        }
        m
    }

    /// `B_𝔥`-orthogonal projection onto the subalgebra span.
    pub fn project_h(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        self.h_from_coords(&self.h_coords(m))
    }

    /// Full coordinates of an algebra element: `h_frame` coordinates of `ω`
    /// followed by the translation part (absent for `O`/`SO`).
    pub fn algebra_coords(&self, x: &AlgebraElement) -> DVector<f64> {
        let h = self.h_coords(&x.omega);
        if self.family.has_translations() {
            let mut c = DVector::zeros(self.dim_g());
            c.rows_mut(0, self.dim_h()).copy_from(&h);
            c.rows_mut(self.dim_h(), self.n).copy_from(&x.v);
            c
        } else {
            h
        }
    }

    /// Full coordinates of a dual element, in the basis dual to the one used
    /// by [`GroupSpec::algebra_coords`] (the two coincide under `B`).
    pub fn dual_coords(&self, m: &DualElement) -> DVector<f64> {
        let h = self.h_coords(&m.l);
        if self.family.has_translations() {
            let mut c = DVector::zeros(self.dim_g());
            c.rows_mut(0, self.dim_h()).copy_from(&h);
            c.rows_mut(self.dim_h(), self.n).copy_from(&m.p);
            c
        } else {
            h
        }
    }

    /// The `a`-th basis element of `𝔤` in the ordering used by
    /// [`GroupSpec::algebra_coords`].
    pub fn algebra_basis_element(&self, a: usize) -> AlgebraElement {
        assert!(a < self.dim_g());
        if a < self.dim_h() {
            AlgebraElement::new(self.h_frame[a].clone(), DVector::zeros(self.n))
        } else {
            let mut v = DVector::zeros(self.n);
            v[a - self.dim_h()] = 1.0;
            AlgebraElement::new(DMatrix::zeros(self.n, self.n), v)
        }
    }

    /// Natural pairing `⟨(L, p), (ω, v)⟩ = B_𝔥(L, ω) + pᵀv`.
    pub fn pairing(&self, m: &DualElement, x: &AlgebraElement) -> f64 {
        b_form(&m.l, &x.omega) + m.p.dot(&x.v)
    }

    // ----- group operations ---------------------------------------------

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity(self.n)
    }

    /// Group law `(r1, d1)(r2, d2) = (r1 r2, d1 + r1 d2)`.
    pub fn compose(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check_n(a.dim(), "compose left operand")?;
        self.check_n(b.dim(), "compose right operand")?;
        Ok(GroupElement::new(&a.r * &b.r, &a.d + &a.r * &b.d))
    }

    /// Group inverse `(r, d)⁻¹ = (rᵀ, −rᵀ d)`.
    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check_n(g.dim(), "inverse operand")?;
        let rt = g.r.transpose();
        let d = -(&rt * &g.d);
        Ok(GroupElement::new(rt, d))
    }

    /// Group exponential, computed through the homogeneous embedding
    /// `(ω, v) ↦ [[ω, v], [0, 0]]` of `𝔤` into `(n+1)×(n+1)` matrices.
    pub fn exp(&self, x: &AlgebraElement) -> Result<GroupElement> {
        self.check_n(x.dim(), "exponential argument")?;
        let n = self.n;
        let mut h = DMatrix::zeros(n + 1, n + 1);
        h.view_mut((0, 0), (n, n)).copy_from(&x.omega);
        h.view_mut((0, n), (n, 1)).copy_from(&x.v);
        let e = numerics::expm(&h);
        let r = e.view((0, 0), (n, n)).into_owned();
        let d = e.view((0, n), (n, 1)).column(0).into_owned();
        Ok(GroupElement::new(r, d))
    }

    // ----- algebra operations -------------------------------------------

    /// Adjoint action `Ad_g (ω, v) = (r ω rᵀ, r v − (r ω rᵀ) d)`.
    pub fn adjoint_action(&self, g: &GroupElement, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_n(g.dim(), "adjoint action group element")?;
        self.check_n(x.dim(), "adjoint action algebra element")?;
        let conj = &g.r * &x.omega * g.r.transpose();
        let v = &g.r * &x.v - &conj * &g.d;
        Ok(AlgebraElement::new(conj, v))
    }

    /// Coadjoint action `Ad*_g (L, p) = (r L rᵀ + μ(r p, d), r p)`.
    ///
    /// For custom subgroups the angular part is `B_𝔥`-projected back onto the
    /// subalgebra span, which keeps the realization of `𝔥*` consistent.
    pub fn coadjoint_action(&self, g: &GroupElement, m: &DualElement) -> Result<DualElement> {
        self.check_n(g.dim(), "coadjoint action group element")?;
        self.check_n(m.dim(), "coadjoint action dual element")?;
        let p = &g.r * &m.p;
        let mut l = &g.r * &m.l * g.r.transpose() + self.momentum_map(&p, &g.d)?;
        if self.family == Family::CustomCompact {
            l = self.project_h(&l);
        }
        Ok(DualElement::new(l, p))
    }

    /// Momentum map `μ : V × V → 𝔥*` of the `H`-action on `V`, the unique
    /// element of the realization with `B_𝔥(μ(p, v), ω) = pᵀ ω v` for all
    /// `ω ∈ 𝔥`. For the full `𝔰𝔬(n)` this is `p vᵀ − v pᵀ`; in general it is
    /// the `B_𝔥`-projection of that matrix.
    pub fn momentum_map(&self, p: &DVector<f64>, v: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_n(p.len(), "momentum map p")?;
        self.check_n(v.len(), "momentum map v")?;
        let full = p * v.transpose() - v * p.transpose();
        if self.family == Family::CustomCompact {
            Ok(self.project_h(&full))
        } else {
            Ok(full)
        }
    }

    /// `τ_p = μ(p, ·) : V → 𝔥*`, the momentum map with its first argument
    /// frozen.
    pub fn tau(&self, p: &DVector<f64>, v: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.momentum_map(p, v)
    }

    /// Matrix of `τ_p` with respect to the standard basis of `V` and the
    /// `h_frame`: `T[a, i] = B_𝔥(μ(p, e_i), F_a) = pᵀ F_a e_i`.
    pub fn tau_matrix(&self, p: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_n(p.len(), "tau matrix p")?;
        let rows: Vec<_> = self.h_frame.iter().map(|f| p.transpose() * f).collect();
        Ok(DMatrix::from_fn(self.dim_h(), self.n, |a, i| rows[a][i]))
    }

    /// Lie bracket `[(ω1, v1), (ω2, v2)] = ([ω1, ω2], ω1 v2 − ω2 v1)`.
    pub fn bracket(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_n(x.dim(), "bracket left operand")?;
        self.check_n(y.dim(), "bracket right operand")?;
        let omega = &x.omega * &y.omega - &y.omega * &x.omega;
        let v = &x.omega * &y.v - &y.omega * &x.v;
        Ok(AlgebraElement::new(omega, v))
    }

    /// The realization `𝔤 → 𝔤*` induced by `B`: under the chosen inner
    /// products this is the identity on the underlying data, `(ω, v) ↦
    /// (L, p) = (ω, v)`. It is `H`-equivariant but not `G`-equivariant.
    pub fn musical_phi(&self, x: &AlgebraElement) -> DualElement {
        DualElement::new(x.omega.clone(), x.v.clone())
    }

    /// Inverse of [`GroupSpec::musical_phi`].
    pub fn musical_phi_inv(&self, m: &DualElement) -> AlgebraElement {
        AlgebraElement::new(m.l.clone(), m.p.clone())
    }

    /// Derivative of the coadjoint action along `ζ = (ξ, u)`:
    ///
    /// ```text
    /// d/dt Ad*_{exp(tζ)} (L, p) |_{t=0} = ([ξ, L] + μ(p, u), ξ p)
    /// ```
    pub fn coadjoint_infinitesimal(
        &self,
        zeta: &AlgebraElement,
        m: &DualElement,
    ) -> Result<DualElement> {
        self.check_n(zeta.dim(), "coadjoint generator")?;
        self.check_n(m.dim(), "coadjoint generator target")?;
        let mut l = &zeta.omega * &m.l - &m.l * &zeta.omega + self.momentum_map(&m.p, &zeta.v)?;
        if self.family == Family::CustomCompact {
            l = self.project_h(&l);
        }
        let p = &zeta.omega * &m.p;
        Ok(DualElement::new(l, p))
    }

    /// Derivative of the adjoint action along `ζ`, which is just the bracket
    /// `[ζ, x]`.
    pub fn adjoint_infinitesimal(
        &self,
        zeta: &AlgebraElement,
        x: &AlgebraElement,
    ) -> Result<AlgebraElement> {
        self.bracket(zeta, x)
    }
}

/// The invariant inner product `B(X, Y) = tr(XᵀY)/2` on matrices.
pub fn b_form(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    debug_assert_eq!(x.shape(), y.shape());
    0.5 * x.dot(y)
}

#[derive(Serialize, Deserialize)]
struct GroupSpecRepr {
    n: usize,
    family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h_basis: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol: Option<ToleranceConfig>,
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let h_basis = self.raw_basis.as_ref().map(|basis| {
            basis
                .iter()
                .map(|m| {
                    (0..m.nrows())
                        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                        .collect()
                })
                .collect()
        });
        GroupSpecRepr {
            n: self.n,
            family: self.family,
            h_basis,
            tol: Some(self.tol),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GroupSpecRepr::deserialize(d)?;
        let tol = repr.tol.unwrap_or_default();
        tol.validate().map_err(D::Error::custom)?;
        if repr.n < 1 {
            return Err(D::Error::custom("ambient dimension must be at least 1"));
        }
        match repr.family {
            Family::CustomCompact => {
                let rows = repr
                    .h_basis
                    .ok_or_else(|| D::Error::custom("family \"custom\" requires an h_basis"))?;
                let basis: Vec<DMatrix<f64>> = rows
                    .iter()
                    .map(|m| {
                        if m.len() != repr.n || m.iter().any(|row| row.len() != repr.n) {
                            Err(D::Error::custom("h_basis matrices must be n x n"))
                        } else {
                            Ok(DMatrix::from_fn(repr.n, repr.n, |i, j| m[i][j]))
                        }
                    })
                    .collect::<std::result::Result<_, _>>()?;
                GroupSpec::custom(repr.n, basis, tol).map_err(D::Error::custom)
            }
            family => {
                if repr.h_basis.is_some() {
                    return Err(D::Error::custom(
                        "h_basis is only meaningful for family \"custom\"",
                    ));
                }
                Ok(GroupSpec::standard(repr.n, family, tol))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn so_basis_is_b_orthonormal() {
        let basis = so_basis(4);
        assert_eq!(basis.len(), 6);
        for (a, x) in basis.iter().enumerate() {
            for (b, y) in basis.iter().enumerate() {
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((b_form(x, y) - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn dims_per_family() {
        assert_eq!(GroupSpec::euclidean(3).dim_g(), 6);
        assert_eq!(GroupSpec::special_euclidean(2).dim_g(), 3);
        assert_eq!(GroupSpec::orthogonal(3).dim_g(), 3);
        assert_eq!(GroupSpec::special_orthogonal(4).dim_g(), 6);
    }

    #[test]
    fn compact_families_reject_translations() {
        let spec = GroupSpec::orthogonal(2);
        let x = AlgebraElement::new(DMatrix::zeros(2, 2), DVector::from_row_slice(&[1.0, 0.0]));
        assert!(matches!(
            spec.check_algebra_element(&x),
            Err(Error::TranslationNotSupported { .. })
        ));
    }

    #[test]
    fn degenerate_custom_basis_is_rejected() {
        let b = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let result = GroupSpec::custom(2, vec![b.clone(), 2.0 * &b], ToleranceConfig::default());
        assert!(matches!(result, Err(Error::BasisDegenerate { .. })));
    }

    #[test]
    fn non_closed_custom_basis_is_rejected() {
        // Rotations in the (1,2) and (1,3) planes generate rotations in the
        // (2,3) plane, which the span does not contain.
        let mut b12 = DMatrix::zeros(3, 3);
        b12[(1, 0)] = 1.0;
        b12[(0, 1)] = -1.0;
        let mut b13 = DMatrix::zeros(3, 3);
        b13[(2, 0)] = 1.0;
        b13[(0, 2)] = -1.0;
        let result = GroupSpec::custom(3, vec![b12, b13], ToleranceConfig::default());
        assert!(matches!(result, Err(Error::BasisNotClosed { .. })));
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = GroupSpec::special_euclidean(3);
        let json = serde_json::to_string(&spec).unwrap();
        let back: GroupSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back.family(), Family::SE);
        assert_eq!(back.n(), 3);
    }
}
