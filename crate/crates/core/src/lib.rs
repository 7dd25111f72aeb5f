//! Numerical toolkit for the adjoint and coadjoint orbits of Euclidean-type
//! semidirect products `G = H ⋉ V`, where `H` is a closed subgroup of `O(n)`
//! acting on `V = R^n`.
//!
//! The supported groups are the full Euclidean group `E(n) = O(n) ⋉ R^n`, the
//! special Euclidean group `SE(n) = SO(n) ⋉ R^n`, the compact groups `O(n)` and
//! `SO(n)` themselves, and custom compact subgroups `H ⊂ O(n)` given by a basis
//! of their Lie algebra.
//!
//! What the crate computes:
//!
//! * the group operations, adjoint and coadjoint actions, the momentum map of
//!   the `H`-action on `V`, and the Lie bracket ([`group`]);
//! * spectral (Youla) decompositions of skew-symmetric matrices into rotation
//!   blocks and kernel ([`spectral`]);
//! * normal forms of adjoint and coadjoint orbits on the Cartan-like subsets
//!   `Δ = {ωv = 0}` and `Δ* = {Lp = 0}`, isotropy algebras, orbit dimensions,
//!   and the bijection between adjoint and coadjoint orbits ([`orbit`]);
//! * the classification of orbits by (affine) flag-manifold signatures with
//!   dimension and connected-component bookkeeping ([`flags`]);
//! * evaluations of the Kostant-Kirillov-Souriau symplectic form, isotropy and
//!   non-degeneracy checks on orbit fibres, and the symplectic geometry of the
//!   space of oriented lines ([`symplectic`]);
//! * seeded random sampling and the property suites behind the command line
//!   `check` command ([`sampling`], [`checks`]).
//!
//! All numerical rank/kernel decisions run through a single [`ToleranceConfig`]
//! so that the various cross-checks (closed-form dimension formulas versus
//! numerical rank oracles) stay comparable.

pub mod checks;
mod elements;
mod error;
pub mod flags;
pub mod group;
pub mod numerics;
pub mod orbit;
pub mod sampling;
pub mod spectral;
pub mod symplectic;
mod tolerance;

pub use elements::{AlgebraElement, DualElement, GroupElement};
pub use error::{Error, Result};
pub use flags::{
    BundleEdge, FibreKind, FlagKind, FlagSignature, Marker, OrbitClass, OrbitSide, SignatureEntry,
};
pub use group::{Family, GroupSpec};
pub use orbit::{
    AdjointNormalForm, BijectionReport, BundleDirection, BundleStructure, CoadjointNormalForm,
    IsotropyReport, OrbitMatch,
};
pub use spectral::{Block, SkewSpectrum};
pub use symplectic::{LineTangent, OrientedLine};
pub use tolerance::ToleranceConfig;
