//! Flag-type orbit classification.
//!
//! Orbits of the Euclidean families are catalogued by *flag signatures*,
//! symbol strings recording how a reduced point decomposes the ambient
//! space. A signature is a list of `(dimension, marker)` entries:
//!
//! * `F(d1, d2, ...)` is a linear flag manifold: nested subspaces with
//!   steps of the given dimensions. A `C` marker (`F(1, 2C)`) makes the
//!   step a complex (symplectic) part carrying a rotation rate; a `~`
//!   marker (`F(~1, 2)`) orients the step.
//! * `Aff(s; d2, ...)` is an affine flag manifold: the leading entry is an
//!   affine subspace of dimension `s`, the tail refines its normal
//!   directions. The leading entry is structural and survives even at
//!   dimension zero; `Aff(0; 2C)` and `F(2C)` are different manifolds.
//! * `Aff([g, t]; ...)` carries a *grain*: the leading affine part is
//!   remembered together with a distinguished `g`-dimensional direction
//!   inside it. When the tail is empty the signature is rendered with the
//!   grain bracket closed over the whole head, `Aff([~1;2])`.
//!
//! Orbits through the origin degenerate to single points; such signatures
//! render as `point`.
//!
//! [`classify_en_adjoint`], [`classify_en_coadjoint`] and
//! [`classify_on_adjoint`] produce an [`OrbitClass`] whose flag dimension is
//! cross-checked against the rank of the linearized action; a disagreement
//! is reported as [`Error::InvariantViolation`] rather than silently trusted
//! either way.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::elements::{AlgebraElement, DualElement};
use crate::error::{Error, Result};
use crate::group::{Family, GroupSpec};
use crate::orbit;
use crate::spectral::{self, SkewSpectrum};

/// Decoration on one signature entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Marker {
    Plain,
    Oriented,
    Complex,
}

/// Which kind of manifold the signature names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagKind {
    Linear,
    Affine,
    AffineWithGrain,
}

/// One step of a signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureEntry {
    pub dim: usize,
    pub marker: Marker,
}

impl SignatureEntry {
    pub fn new(dim: usize, marker: Marker) -> Self {
        Self { dim, marker }
    }
}

/// A flag signature: the combinatorial type of an orbit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagSignature {
    pub kind: FlagKind,
    pub entries: Vec<SignatureEntry>,
}

fn entries_from(pairs: &[(usize, Marker)]) -> Vec<SignatureEntry> {
    pairs
        .iter()
        .map(|&(dim, marker)| SignatureEntry::new(dim, marker))
        .collect()
}

impl FlagSignature {
    pub fn linear(pairs: &[(usize, Marker)]) -> Self {
        Self {
            kind: FlagKind::Linear,
            entries: entries_from(pairs),
        }
    }

    pub fn affine(pairs: &[(usize, Marker)]) -> Self {
        Self {
            kind: FlagKind::Affine,
            entries: entries_from(pairs),
        }
    }

    pub fn grain(pairs: &[(usize, Marker)]) -> Self {
        Self {
            kind: FlagKind::AffineWithGrain,
            entries: entries_from(pairs),
        }
    }

    /// Sum of the entry dimensions; equals the ambient dimension for a
    /// well-formed signature.
    pub fn total_dim(&self) -> usize {
        self.entries.iter().map(|e| e.dim).sum()
    }

    /// Drops null entries and collapses degenerate grains.
    ///
    /// Zero-dimension entries are removed except for the leading entry of an
    /// affine signature, which is structural. A grain whose second part is
    /// empty collapses to a plain affine signature.
    pub fn canonicalized(&self) -> FlagSignature {
        match self.kind {
            FlagKind::Linear => FlagSignature {
                kind: FlagKind::Linear,
                entries: self.entries.iter().copied().filter(|e| e.dim > 0).collect(),
            },
            FlagKind::Affine => {
                let mut entries = Vec::with_capacity(self.entries.len());
                for (i, e) in self.entries.iter().enumerate() {
                    if i == 0 || e.dim > 0 {
                        entries.push(*e);
                    }
                }
                FlagSignature {
                    kind: FlagKind::Affine,
                    entries,
                }
            }
            FlagKind::AffineWithGrain => {
                if self.entries.len() >= 2 && self.entries[1].dim == 0 {
                    let mut entries = vec![self.entries[0]];
                    entries.extend(self.entries[2..].iter().copied().filter(|e| e.dim > 0));
                    return FlagSignature {
                        kind: FlagKind::Affine,
                        entries,
                    };
                }
                let mut entries: Vec<SignatureEntry> =
                    self.entries.iter().take(2).copied().collect();
                entries.extend(self.entries[2..].iter().copied().filter(|e| e.dim > 0));
                FlagSignature {
                    kind: FlagKind::AffineWithGrain,
                    entries,
                }
            }
        }
    }

    /// True when the signature names a single point: one plain entry filling
    /// the whole space.
    pub fn is_point(&self) -> bool {
        let c = self.canonicalized();
        matches!(c.kind, FlagKind::Linear | FlagKind::Affine)
            && c.entries.len() == 1
            && c.entries[0].marker == Marker::Plain
    }
}

fn write_entry(f: &mut fmt::Formatter<'_>, e: &SignatureEntry) -> fmt::Result {
    match e.marker {
        Marker::Plain => write!(f, "{}", e.dim),
        Marker::Oriented => write!(f, "~{}", e.dim),
        Marker::Complex => write!(f, "{}C", e.dim),
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, entries: &[SignatureEntry]) -> fmt::Result {
    for (i, e) in entries.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write_entry(f, e)?;
    }
    Ok(())
}

impl fmt::Display for FlagSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.canonicalized();
        if c.is_point() {
            return write!(f, "point");
        }
        match c.kind {
            FlagKind::Linear => {
                write!(f, "F(")?;
                write_list(f, &c.entries)?;
                write!(f, ")")
            }
            FlagKind::Affine => {
                write!(f, "Aff(")?;
                write_entry(f, &c.entries[0])?;
                write!(f, ";")?;
                write_list(f, &c.entries[1..])?;
                write!(f, ")")
            }
            FlagKind::AffineWithGrain => {
                // With an empty tail the bracket closes over the separator:
                // the grain pair is the entire symbol.
                if c.entries.len() == 2 {
                    write!(f, "Aff([")?;
                    write_entry(f, &c.entries[0])?;
                    write!(f, ";")?;
                    write_entry(f, &c.entries[1])?;
                    write!(f, "])")
                } else {
                    write!(f, "Aff([")?;
                    write_entry(f, &c.entries[0])?;
                    write!(f, ",")?;
                    write_entry(f, &c.entries[1])?;
                    write!(f, "];")?;
                    write_list(f, &c.entries[2..])?;
                    write!(f, ")")
                }
            }
        }
    }
}

// ----- dimension and component formulas ---------------------------------

fn step_isotropy_dim(e: &SignatureEntry) -> Result<usize> {
    match e.marker {
        Marker::Plain | Marker::Oriented => Ok(e.dim * e.dim.saturating_sub(1) / 2),
        Marker::Complex => {
            if !e.dim.is_multiple_of(2) {
                return Err(Error::MalformedSignature(format!(
                    "complex entry of odd dimension {}",
                    e.dim
                )));
            }
            Ok((e.dim / 2) * (e.dim / 2))
        }
    }
}

/// Dimension of the manifold named by `sig` in ambient dimension `n`.
///
/// The signature is canonicalized first and must tile the whole space:
/// entry dimensions summing to `n`, complex entries even.
pub fn flag_dimension(sig: &FlagSignature, n: usize) -> Result<usize> {
    let c = sig.canonicalized();
    if c.total_dim() != n {
        return Err(Error::MalformedSignature(format!(
            "entries of {c} sum to {} in ambient dimension {n}",
            c.total_dim()
        )));
    }
    let so_dim = n * n.saturating_sub(1) / 2;
    let (group_dim, head, tail): (usize, usize, &[SignatureEntry]) = match c.kind {
        FlagKind::Linear => (so_dim, 0, &c.entries[..]),
        FlagKind::Affine => {
            let lead = &c.entries[0];
            if lead.marker == Marker::Complex {
                return Err(Error::MalformedSignature(format!(
                    "leading affine entry of {c} cannot be complex"
                )));
            }
            let s = lead.dim;
            (so_dim + n, s * s.saturating_sub(1) / 2 + s, &c.entries[1..])
        }
        FlagKind::AffineWithGrain => {
            if c.entries.len() < 2 {
                return Err(Error::MalformedSignature(format!(
                    "grain signature {c} needs two head entries"
                )));
            }
            let (g, t) = (&c.entries[0], &c.entries[1]);
            if g.marker == Marker::Complex || t.marker != Marker::Plain {
                return Err(Error::MalformedSignature(format!(
                    "grain head of {c} must be a plain or oriented part followed by a plain part"
                )));
            }
            let head = g.dim * g.dim.saturating_sub(1) / 2
                + t.dim * t.dim.saturating_sub(1) / 2
                + (g.dim + t.dim);
            (so_dim + n, head, &c.entries[2..])
        }
    };
    let mut isotropy = head;
    for e in tail {
        isotropy += step_isotropy_dim(e)?;
    }
    Ok(group_dim - isotropy)
}

/// Components of the orbit under the *full* (disconnected) group of its
/// family: 1 when some plain entry of positive dimension gives the
/// stabilizer an orientation-reversing element, otherwise 2.
pub fn full_group_components(sig: &FlagSignature) -> usize {
    let c = sig.canonicalized();
    if c.entries
        .iter()
        .any(|e| e.marker == Marker::Plain && e.dim >= 1)
    {
        1
    } else {
        2
    }
}

/// Number of connected components of the orbit with signature `sig` under a
/// group of the given family.
///
/// For `SO`/`SE` the orbit is connected by construction. For `O`/`E` the
/// count follows the stabilizer-orientation rule of [`full_group_components`];
/// beyond ambient dimension 3 that rule is an extrapolation from the
/// low-dimensional classification, flagged as such in [`OrbitClass`].
pub fn component_count(sig: &FlagSignature, family: Family) -> Result<usize> {
    match family {
        Family::SO | Family::SE => Ok(1),
        Family::O | Family::E => Ok(full_group_components(sig)),
        Family::CustomCompact => Err(Error::UnsupportedFamily {
            family: family.name(),
            reason: "component counting is only defined for the standard families",
        }),
    }
}

// ----- classification ---------------------------------------------------

/// A rotation rate with the number of planes it acts on.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LambdaMultiplicity {
    pub lambda: f64,
    pub pairs: usize,
}

/// Full classification record of one orbit.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitClass {
    pub signature: FlagSignature,
    /// `signature` rendered as a symbol, `"point"` for origin orbits.
    pub rendered: String,
    pub orbit_dim: usize,
    pub isotropy_dim: usize,
    /// Connected components of the orbit for the spec's own family.
    pub components: usize,
    /// Components the orbit would have under the full group `O`/`E`.
    pub full_group_components: usize,
    /// True when the family is connected (`SO`/`SE`) and the orbit is one of
    /// two components of the full-group orbit.
    pub is_component_of_full_orbit: bool,
    /// True when the component rule runs beyond the tabulated ambient
    /// dimensions (`n > 3`).
    pub component_rule_extrapolated: bool,
    /// Properness of the reduced representative.
    pub proper: bool,
    /// Kernel dimension of the reduced angular part.
    pub d0: usize,
    /// Rotation rates of the angular part, ascending.
    pub lambda_multiset: Vec<LambdaMultiplicity>,
    /// `|v_ker|` for adjoint orbits, `|p|` for coadjoint orbits; zero for
    /// the compact families.
    pub translation_norm: f64,
}

fn lambda_multiset(spectrum: &SkewSpectrum) -> Vec<LambdaMultiplicity> {
    spectrum
        .blocks
        .iter()
        .map(|b| LambdaMultiplicity {
            lambda: b.lambda,
            pairs: b.dim() / 2,
        })
        .collect()
}

fn block_entries(spectrum: &SkewSpectrum) -> Vec<(usize, Marker)> {
    spectrum
        .blocks
        .iter()
        .map(|b| (b.dim(), Marker::Complex))
        .collect()
}

pub(crate) fn linear_signature_from_spectrum(spectrum: &SkewSpectrum) -> FlagSignature {
    let mut pairs = vec![(spectrum.d0(), Marker::Plain)];
    pairs.extend(block_entries(spectrum));
    FlagSignature::linear(&pairs).canonicalized()
}

fn affine_signature_from_spectrum(spectrum: &SkewSpectrum) -> FlagSignature {
    let mut pairs = vec![(spectrum.d0(), Marker::Plain)];
    pairs.extend(block_entries(spectrum));
    FlagSignature::affine(&pairs).canonicalized()
}

fn grain_signature_from_spectrum(spectrum: &SkewSpectrum) -> FlagSignature {
    let mut pairs = vec![(1, Marker::Oriented), (spectrum.d0() - 1, Marker::Plain)];
    pairs.extend(block_entries(spectrum));
    FlagSignature::grain(&pairs).canonicalized()
}

fn coadjoint_signature_from_spectrum(spectrum: &SkewSpectrum) -> FlagSignature {
    let mut pairs = vec![(1, Marker::Oriented), (spectrum.d0() - 1, Marker::Plain)];
    pairs.extend(block_entries(spectrum));
    FlagSignature::affine(&pairs).canonicalized()
}

/// Signature of the common `H`-orbit base of a bijection pair.
pub(crate) fn base_signature_from_spectrum(
    spectrum: &SkewSpectrum,
    generic: bool,
) -> FlagSignature {
    if generic {
        let mut pairs = vec![(1, Marker::Oriented), (spectrum.d0() - 1, Marker::Plain)];
        pairs.extend(block_entries(spectrum));
        FlagSignature::linear(&pairs).canonicalized()
    } else {
        linear_signature_from_spectrum(spectrum)
    }
}

fn build_class(
    spec: &GroupSpec,
    signature: FlagSignature,
    spectrum: &SkewSpectrum,
    translation_norm: f64,
    orbit_dim: usize,
    proper: bool,
) -> Result<OrbitClass> {
    let flag_dim = flag_dimension(&signature, spec.n())?;
    if flag_dim != orbit_dim {
        return Err(Error::InvariantViolation(format!(
            "flag dimension {flag_dim} of {signature} disagrees with the rank oracle {orbit_dim}"
        )));
    }
    let components = component_count(&signature, spec.family())?;
    let full = full_group_components(&signature);
    Ok(OrbitClass {
        rendered: signature.to_string(),
        signature,
        orbit_dim,
        isotropy_dim: spec.dim_g() - orbit_dim,
        components,
        full_group_components: full,
        is_component_of_full_orbit: spec.family().is_special() && full == 2,
        component_rule_extrapolated: spec.n() > 3,
        proper,
        d0: spectrum.d0(),
        lambda_multiset: lambda_multiset(spectrum),
        translation_norm,
    })
}

/// Classifies the conjugation orbit of a skew matrix under `O(n)` or `SO(n)`.
pub fn classify_on_adjoint(spec: &GroupSpec, omega: &DMatrix<f64>) -> Result<OrbitClass> {
    if spec.family().has_translations() || spec.family() == Family::CustomCompact {
        return Err(Error::UnsupportedFamily {
            family: spec.family().name(),
            reason: "classify_on_adjoint handles the compact families O and SO",
        });
    }
    let x = AlgebraElement::new(omega.clone(), DVector::zeros(spec.n()));
    spec.check_algebra_element(&x)?;
    let spectrum = spectral::youla_decompose(omega, spec.tol())?;
    let signature = linear_signature_from_spectrum(&spectrum);
    let orbit_dim = orbit::orbit_dimension_adjoint(spec, &x)?;
    let proper = orbit::isotropy_algebra_adjoint(spec, &x)?.proper;
    build_class(spec, signature, &spectrum, 0.0, orbit_dim, proper)
}

/// Classifies the adjoint orbit of a Euclidean group through `x`.
pub fn classify_en_adjoint(spec: &GroupSpec, x: &AlgebraElement) -> Result<OrbitClass> {
    if !spec.family().has_translations() || spec.family() == Family::CustomCompact {
        return Err(Error::UnsupportedFamily {
            family: spec.family().name(),
            reason: "classify_en_adjoint handles the Euclidean families E and SE",
        });
    }
    let nf = orbit::normal_form_adjoint(spec, x)?;
    let spectrum = spectral::youla_decompose(&nf.point.omega, spec.tol())?;
    let v_norm = nf.point.v.norm();
    let generic = v_norm > spec.tol().abs_scaled(x.v.norm());
    let signature = if generic {
        grain_signature_from_spectrum(&spectrum)
    } else {
        affine_signature_from_spectrum(&spectrum)
    };
    let orbit_dim = orbit::orbit_dimension_adjoint(spec, &nf.point)?;
    let proper = orbit::isotropy_algebra_adjoint(spec, &nf.point)?.proper;
    build_class(spec, signature, &spectrum, v_norm, orbit_dim, proper)
}

/// Classifies the coadjoint orbit of a Euclidean group through `m`.
pub fn classify_en_coadjoint(spec: &GroupSpec, m: &DualElement) -> Result<OrbitClass> {
    if !spec.family().has_translations() || spec.family() == Family::CustomCompact {
        return Err(Error::UnsupportedFamily {
            family: spec.family().name(),
            reason: "classify_en_coadjoint handles the Euclidean families E and SE",
        });
    }
    let nf = orbit::normal_form_coadjoint(spec, m)?;
    let spectrum = spectral::youla_decompose(&nf.point.l, spec.tol())?;
    let p_norm = nf.point.p.norm();
    // Same stratum test as the normal form itself: the momentum counts as
    // nonzero only above the element's scaled tolerance.
    let signature = if p_norm > spec.tol().abs_scaled(m.l.norm().max(p_norm)) {
        coadjoint_signature_from_spectrum(&spectrum)
    } else {
        linear_signature_from_spectrum(&spectrum)
    };
    let orbit_dim = orbit::orbit_dimension_coadjoint(spec, &nf.point)?;
    let proper = orbit::isotropy_algebra_coadjoint(spec, &nf.point)?.proper;
    build_class(spec, signature, &spectrum, p_norm, orbit_dim, proper)
}

/// Classifies an adjoint point for any standard family.
pub fn classify_adjoint(spec: &GroupSpec, x: &AlgebraElement) -> Result<OrbitClass> {
    match spec.family() {
        Family::O | Family::SO => classify_on_adjoint(spec, &x.omega),
        Family::E | Family::SE => classify_en_adjoint(spec, x),
        Family::CustomCompact => Err(Error::UnsupportedFamily {
            family: "custom",
            reason: "flag classification is only defined for the standard families",
        }),
    }
}

/// Classifies a coadjoint point for any standard family.
pub fn classify_coadjoint(spec: &GroupSpec, m: &DualElement) -> Result<OrbitClass> {
    match spec.family() {
        // For the compact families the coadjoint orbit is the conjugation
        // orbit of the angular part.
        Family::O | Family::SO => classify_on_adjoint(spec, &m.l),
        Family::E | Family::SE => classify_en_coadjoint(spec, m),
        Family::CustomCompact => Err(Error::UnsupportedFamily {
            family: "custom",
            reason: "flag classification is only defined for the standard families",
        }),
    }
}

// ----- bundle bookkeeping -----------------------------------------------

/// Which side of the orbit bijection a class came from; fixes the applicable
/// fibration diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitSide {
    Adjoint,
    Coadjoint,
}

/// The fibre of a recognized bundle.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FibreKind {
    /// A linear fibre of the given dimension.
    Vector { dim: usize },
    /// An affine fibre of the given dimension.
    AffineSpace { dim: usize },
    /// A flag-manifold fibre inside a subspace of dimension `ambient`.
    Flag {
        signature: FlagSignature,
        ambient: usize,
    },
}

/// One recognized fibration between two orbit types.
#[derive(Debug, Clone, Serialize)]
pub struct BundleEdge {
    pub total: FlagSignature,
    pub base: FlagSignature,
    pub fibre: FibreKind,
    pub total_dim: usize,
    pub base_dim: usize,
    pub fibre_dim: usize,
}

/// Grain-like reading of a signature: leading part, second part, complex
/// tail. Covers genuine grain signatures and affine signatures with an
/// oriented head (collapsed grains, or coadjoint signatures whose plain
/// entry is read into the second slot by the caller).
fn grain_head(
    sig: &FlagSignature,
) -> Option<(SignatureEntry, SignatureEntry, Vec<SignatureEntry>)> {
    match sig.kind {
        FlagKind::AffineWithGrain => {
            Some((sig.entries[0], sig.entries[1], sig.entries[2..].to_vec()))
        }
        FlagKind::Affine if sig.entries[0].marker == Marker::Oriented => {
            let tail = sig.entries[1..].to_vec();
            if tail.iter().all(|e| e.marker == Marker::Complex) {
                Some((sig.entries[0], SignatureEntry::new(0, Marker::Plain), tail))
            } else {
                None
            }
        }
        _ => None,
    }
}

fn entries_eq(a: &[SignatureEntry], b: &[SignatureEntry]) -> bool {
    a == b
}

fn nonzero(entries: &[SignatureEntry]) -> Vec<SignatureEntry> {
    entries.iter().copied().filter(|e| e.dim > 0).collect()
}

/// The projection of an affine flag onto its associated linear flag,
/// forgetting the affine positions. The fibre is the translation part,
/// a vector space.
fn try_vector_bundle(total: &FlagSignature, base: &FlagSignature, n: usize) -> Option<FibreKind> {
    if base.kind != FlagKind::Linear {
        return None;
    }
    let (s_eff, total_as_linear) = match total.kind {
        FlagKind::Affine => (total.entries[0].dim, nonzero(&total.entries)),
        FlagKind::AffineWithGrain => (
            total.entries[0].dim + total.entries[1].dim,
            nonzero(&total.entries),
        ),
        FlagKind::Linear => return None,
    };
    if entries_eq(&total_as_linear, &base.entries) {
        Some(FibreKind::Vector { dim: n - s_eff })
    } else {
        None
    }
}

/// Forgetting the grain of an affine flag: the base remembers only the
/// combined affine part, the fibre is the flag of grain positions inside it.
fn try_grain_forget(total: &FlagSignature, base: &FlagSignature) -> Option<FibreKind> {
    if base.kind != FlagKind::Affine {
        return None;
    }
    let (g, t, tail) = grain_head(total)?;
    let combined = g.dim + t.dim;
    if base.entries[0].dim != combined || base.entries[0].marker != Marker::Plain {
        return None;
    }
    if !entries_eq(&base.entries[1..], &tail) {
        return None;
    }
    let mut fibre_entries = vec![(g.dim, g.marker)];
    if t.dim > 0 {
        fibre_entries.push((t.dim, t.marker));
    }
    Some(FibreKind::Flag {
        signature: FlagSignature::linear(&fibre_entries),
        ambient: combined,
    })
}

/// Refinement of the first step of a linear flag: the total distinguishes an
/// oriented part inside the leading plain step of the base.
fn try_refine_first(total: &FlagSignature, base: &FlagSignature) -> Option<FibreKind> {
    if total.kind != FlagKind::Linear || base.kind != FlagKind::Linear {
        return None;
    }
    let g = total.entries.first()?;
    if g.marker != Marker::Oriented {
        return None;
    }
    let b0 = base.entries.first()?;
    if b0.marker != Marker::Plain {
        return None;
    }
    // Orientation forgetting alone: same splitting, plain head.
    if b0.dim == g.dim && entries_eq(&base.entries[1..], &total.entries[1..]) {
        return Some(FibreKind::Flag {
            signature: FlagSignature::linear(&[(g.dim, Marker::Oriented)]),
            ambient: g.dim,
        });
    }
    // Merging the oriented part with the following plain step.
    let t = total.entries.get(1)?;
    if t.marker != Marker::Plain {
        return None;
    }
    if b0.dim == g.dim + t.dim && entries_eq(&base.entries[1..], &total.entries[2..]) {
        return Some(FibreKind::Flag {
            signature: FlagSignature::linear(&[(g.dim, Marker::Oriented), (t.dim, Marker::Plain)]),
            ambient: g.dim + t.dim,
        });
    }
    None
}

/// Flag-pole projection: the base keeps a prefix of the steps and merges the
/// rest into one plain step; the fibre is the forgotten flag inside it.
fn try_forget_tail(total: &FlagSignature, base: &FlagSignature) -> Option<FibreKind> {
    if total.kind != base.kind || total.kind == FlagKind::AffineWithGrain {
        return None;
    }
    let len = total.entries.len();
    for l in 1..len {
        let rest = &total.entries[l..];
        let rest_sum: usize = rest.iter().map(|e| e.dim).sum();
        if rest_sum == 0 {
            continue;
        }
        if base.entries.len() != l + 1 {
            continue;
        }
        if !entries_eq(&base.entries[..l], &total.entries[..l]) {
            continue;
        }
        let last = base.entries[l];
        if last.dim != rest_sum || last.marker != Marker::Plain {
            continue;
        }
        // A single plain step forgets nothing; the projection must be proper.
        if rest.len() == 1 && rest[0].marker == Marker::Plain {
            continue;
        }
        let pairs: Vec<(usize, Marker)> = rest.iter().map(|e| (e.dim, e.marker)).collect();
        return Some(FibreKind::Flag {
            signature: FlagSignature::linear(&pairs),
            ambient: rest_sum,
        });
    }
    None
}

/// The bijection's affine bundle: a coadjoint signature `Aff(~1; t, σ)`
/// over the grained adjoint signature `Aff([~1, t]; σ)`, with affine fibres.
fn try_bijection_affine(total: &FlagSignature, base: &FlagSignature) -> Option<FibreKind> {
    if total.kind != FlagKind::Affine {
        return None;
    }
    let g = total.entries[0];
    if g.marker != Marker::Oriented {
        return None;
    }
    let rest = &total.entries[1..];
    let (bg, bt, btail) = grain_head(base)?;
    if bg != g {
        return None;
    }
    // Reading with an explicit plain second entry.
    if let Some(t) = rest.first() {
        if t.marker == Marker::Plain
            && bt.dim == t.dim
            && bt.marker == Marker::Plain
            && entries_eq(&rest[1..], &btail)
        {
            return Some(FibreKind::AffineSpace { dim: t.dim });
        }
    }
    // Reading with an empty second entry: pure complex tail on both sides.
    if bt.dim == 0 && rest.iter().all(|e| e.marker == Marker::Complex) && entries_eq(rest, &btail) {
        return Some(FibreKind::AffineSpace { dim: 0 });
    }
    None
}

fn fibre_dimension(fibre: &FibreKind) -> Result<usize> {
    match fibre {
        FibreKind::Vector { dim } | FibreKind::AffineSpace { dim } => Ok(*dim),
        FibreKind::Flag { signature, ambient } => flag_dimension(signature, *ambient),
    }
}

/// Attempts to recognize `total` as a bundle over `base`.
///
/// Returns `Ok(None)` when no pattern matches in this orientation; a matched
/// pattern whose dimensions fail to satisfy `total = base + fibre` is an
/// invariant violation, not a miss.
pub fn signature_edge(total: &FlagSignature, base: &FlagSignature) -> Result<Option<BundleEdge>> {
    let total = total.canonicalized();
    let base = base.canonicalized();
    let n = total.total_dim();
    if n != base.total_dim() {
        return Err(Error::MalformedSignature(format!(
            "signatures {total} and {base} live in different ambient dimensions"
        )));
    }
    let fibre = try_vector_bundle(&total, &base, n)
        .or_else(|| try_grain_forget(&total, &base))
        .or_else(|| try_refine_first(&total, &base))
        .or_else(|| try_forget_tail(&total, &base))
        .or_else(|| try_bijection_affine(&total, &base));
    let Some(fibre) = fibre else {
        return Ok(None);
    };
    let total_dim = flag_dimension(&total, n)?;
    let base_dim = flag_dimension(&base, n)?;
    let fibre_dim = fibre_dimension(&fibre)?;
    if total_dim != base_dim + fibre_dim {
        return Err(Error::InvariantViolation(format!(
            "bundle {total} over {base}: dimensions {total_dim} != {base_dim} + {fibre_dim}"
        )));
    }
    Ok(Some(BundleEdge {
        total,
        base,
        fibre,
        total_dim,
        base_dim,
        fibre_dim,
    }))
}

/// Recognizes the bundle relation between two orbit classes, trying both
/// orientations. Errors with [`Error::NotRelated`] when neither signature
/// fibres over the other.
pub fn bundle_bookkeeping(a: &OrbitClass, b: &OrbitClass) -> Result<Vec<BundleEdge>> {
    let mut edges = Vec::new();
    if let Some(e) = signature_edge(&a.signature, &b.signature)? {
        edges.push(e);
    }
    if a.signature.canonicalized() != b.signature.canonicalized() {
        if let Some(e) = signature_edge(&b.signature, &a.signature)? {
            edges.push(e);
        }
    }
    if edges.is_empty() {
        return Err(Error::NotRelated);
    }
    Ok(edges)
}

fn edge_between(total: &FlagSignature, base: &FlagSignature) -> Result<BundleEdge> {
    signature_edge(total, base)?.ok_or_else(|| {
        Error::InvariantViolation(format!("expected a bundle pattern from {total} to {base}"))
    })
}

/// The fibration diagram hanging off one orbit class: every bundle edge the
/// classification attaches to it, including the associated linear flags.
///
/// Compact (linear) classes have no affine structure and produce no edges.
pub fn orbit_fibration_diagram(class: &OrbitClass, side: OrbitSide) -> Result<Vec<BundleEdge>> {
    let sig = class.signature.canonicalized();
    let n = sig.total_dim();
    match sig.kind {
        FlagKind::Linear => Ok(Vec::new()),
        FlagKind::Affine if sig.entries[0].marker == Marker::Plain => {
            // The plain affine flag fibres over its associated linear flag.
            if sig.is_point() {
                return Ok(Vec::new());
            }
            let linear = FlagSignature {
                kind: FlagKind::Linear,
                entries: nonzero(&sig.entries),
            };
            Ok(vec![edge_between(&sig, &linear)?])
        }
        FlagKind::Affine => match side {
            // A collapsed grain: the second part is empty, the square
            // diagram degenerates to its two outer edges.
            OrbitSide::Adjoint => {
                let (g, _, tail) = grain_head(&sig).ok_or_else(|| {
                    Error::MalformedSignature(format!("unrecognized adjoint signature {sig}"))
                })?;
                let d0 = g.dim;
                let associated = FlagSignature {
                    kind: FlagKind::Linear,
                    entries: nonzero(&sig.entries),
                };
                let mut plain_pairs = vec![(d0, Marker::Plain)];
                plain_pairs.extend(tail.iter().map(|e| (e.dim, e.marker)));
                let plain_affine = FlagSignature::affine(&plain_pairs);
                let plain_linear = FlagSignature::linear(&plain_pairs);
                Ok(vec![
                    edge_between(&sig, &associated)?,
                    edge_between(&sig, &plain_affine)?,
                    edge_between(&plain_affine, &plain_linear)?,
                    edge_between(&associated, &plain_linear)?,
                ])
            }
            OrbitSide::Coadjoint => {
                let associated = FlagSignature {
                    kind: FlagKind::Linear,
                    entries: nonzero(&sig.entries),
                };
                let lines = FlagSignature::affine(&[(1, Marker::Oriented), (n - 1, Marker::Plain)]);
                let directions =
                    FlagSignature::linear(&[(1, Marker::Oriented), (n - 1, Marker::Plain)]);
                if sig == lines.canonicalized() {
                    // The space of oriented lines itself: the square
                    // degenerates to its projection onto directions.
                    return Ok(vec![edge_between(&sig, &associated)?]);
                }
                Ok(vec![
                    edge_between(&sig, &associated)?,
                    edge_between(&sig, &lines)?,
                    edge_between(&lines, &directions)?,
                    edge_between(&associated, &directions)?,
                ])
            }
        },
        FlagKind::AffineWithGrain => {
            let (g, t, tail) = grain_head(&sig).expect("grain signature has a head");
            let d0 = g.dim + t.dim;
            let associated = FlagSignature {
                kind: FlagKind::Linear,
                entries: nonzero(&sig.entries),
            };
            let mut plain_pairs = vec![(d0, Marker::Plain)];
            plain_pairs.extend(tail.iter().map(|e| (e.dim, e.marker)));
            let plain_affine = FlagSignature::affine(&plain_pairs);
            let plain_linear = FlagSignature::linear(&plain_pairs);
            Ok(vec![
                edge_between(&sig, &associated)?,
                edge_between(&sig, &plain_affine)?,
                edge_between(&plain_affine, &plain_linear)?,
                edge_between(&associated, &plain_linear)?,
            ])
        }
    }
}
