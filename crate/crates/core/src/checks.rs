//! Randomized property suites behind the command line `check` command.
//!
//! Each suite runs a list of named properties over seeded random data and
//! reports the worst residual seen next to the tolerance it was judged
//! against. Trials are independent (one RNG per trial index, derived from
//! the seed) and run in parallel; the reported maxima do not depend on
//! scheduling.
//!
//! The properties are deliberately cross-cutting: closed-form identities
//! against finite differences, dimension formulas against rank oracles,
//! decompositions against independent eigensolvers. A failure therefore
//! points at a real inconsistency rather than a loose bound, and any
//! internal error raised mid-property is surfaced verbatim in the report
//! instead of being swallowed.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elements::{AlgebraElement, DualElement, GroupElement};
use crate::error::{Error, Result};
use crate::flags::{self, FlagSignature, Marker, OrbitSide};
use crate::group::{Family, GroupSpec};
use crate::orbit::{self, OrbitMatch};
use crate::sampling;
use crate::spectral;
use crate::symplectic::{self, LineTangent, OrientedLine};
use crate::tolerance::ToleranceConfig;

/// Which property suite to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Core,
    Spectral,
    Orbits,
    Flags,
    Symplectic,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(Suite::All),
            "core" => Ok(Suite::Core),
            "spectral" => Ok(Suite::Spectral),
            "orbits" => Ok(Suite::Orbits),
            "flags" => Ok(Suite::Flags),
            "symplectic" => Ok(Suite::Symplectic),
            other => Err(Error::Decomposition(format!(
                "unknown suite `{other}` (expected all, core, spectral, orbits, flags or symplectic)"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Suite::All => "all",
            Suite::Core => "core",
            Suite::Spectral => "spectral",
            Suite::Orbits => "orbits",
            Suite::Flags => "flags",
            Suite::Symplectic => "symplectic",
        };
        f.write_str(name)
    }
}

/// Outcome of one property.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub trials: usize,
    /// Worst residual over all trials. Structural checks use 0/1 residuals.
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// First error raised inside a trial, if any; an erroring property fails.
    pub error: Option<String>,
}

/// Outcome of a suite run.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub properties: Vec<PropertyReport>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }
}

/// Stable per-property seed salt, so that reordering properties does not
/// reshuffle every sample stream.
fn salted(seed: u64, name: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325_u64;
    for b in name.bytes() {
        h = (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3);
    }
    seed ^ h
}

fn property<F>(name: &str, trials: usize, tolerance: f64, seed: u64, f: F) -> PropertyReport
where
    F: Fn(u64, &mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let salt = salted(seed, name);
    let outcomes: Vec<Result<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = sampling::rng_for_trial(salt, trial);
            f(trial, &mut rng)
        })
        .collect();
    let mut max_residual = 0.0_f64;
    let mut error = None;
    for outcome in outcomes {
        match outcome {
            Ok(r) => max_residual = max_residual.max(r),
            Err(e) => {
                if error.is_none() {
                    error = Some(e.to_string());
                }
            }
        }
    }
    PropertyReport {
        name: name.to_string(),
        trials,
        max_residual,
        tolerance,
        passed: error.is_none() && max_residual <= tolerance,
        error,
    }
}

fn boolean(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

/// The standard families at dimension `n`, plus an embedded `so(n-1)` custom
/// subalgebra when there is room for one.
fn spec_zoo(n: usize) -> Result<Vec<GroupSpec>> {
    let mut specs = vec![
        GroupSpec::euclidean(n),
        GroupSpec::special_euclidean(n),
        GroupSpec::orthogonal(n),
        GroupSpec::special_orthogonal(n),
    ];
    if n >= 3 {
        specs.push(embedded_rotation_subgroup(n)?);
    }
    Ok(specs)
}

/// `H = SO(n-1) ⊂ O(n)` fixing the last axis, as a custom subalgebra spec.
pub fn embedded_rotation_subgroup(n: usize) -> Result<GroupSpec> {
    let mut basis = Vec::new();
    for i in 0..n - 1 {
        for j in (i + 1)..n - 1 {
            let mut b = DMatrix::zeros(n, n);
            b[(j, i)] = 1.0;
            b[(i, j)] = -1.0;
            basis.push(b);
        }
    }
    GroupSpec::custom(n, basis, ToleranceConfig::default())
}

fn unit_algebra<R: Rng>(spec: &GroupSpec, rng: &mut R) -> AlgebraElement {
    let x = sampling::random_algebra_element(spec, rng);
    let scale = (x.omega.norm().powi(2) + x.v.norm().powi(2)).sqrt();
    if scale > 0.0 {
        AlgebraElement::new(&x.omega / scale, &x.v / scale)
    } else {
        x
    }
}

fn unit_dual<R: Rng>(spec: &GroupSpec, rng: &mut R) -> DualElement {
    let m = sampling::random_dual_element(spec, rng);
    let scale = (m.l.norm().powi(2) + m.p.norm().powi(2)).sqrt();
    if scale > 0.0 {
        DualElement::new(&m.l / scale, &m.p / scale)
    } else {
        m
    }
}

fn diff_algebra(a: &AlgebraElement, b: &AlgebraElement) -> f64 {
    ((&a.omega - &b.omega).norm().powi(2) + (&a.v - &b.v).norm().powi(2)).sqrt()
}

fn diff_dual(a: &DualElement, b: &DualElement) -> f64 {
    ((&a.l - &b.l).norm().powi(2) + (&a.p - &b.p).norm().powi(2)).sqrt()
}

fn diff_group(a: &GroupElement, b: &GroupElement) -> f64 {
    ((&a.r - &b.r).norm().powi(2) + (&a.d - &b.d).norm().powi(2)).sqrt()
}

// ----- core suite -------------------------------------------------------

fn core_suite(n: usize, trials: usize, seed: u64) -> Result<Vec<PropertyReport>> {
    let specs = spec_zoo(n)?;
    let specs = &specs;
    let mut reports = Vec::new();

    reports.push(property(
        "compose_associative",
        trials,
        1e-11,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in specs {
                let g1 = sampling::random_group_element(spec, rng);
                let g2 = sampling::random_group_element(spec, rng);
                let g3 = sampling::random_group_element(spec, rng);
                let left = spec.compose(&spec.compose(&g1, &g2)?, &g3)?;
                let right = spec.compose(&g1, &spec.compose(&g2, &g3)?)?;
                worst = worst.max(diff_group(&left, &right));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "inverse_identity",
        trials,
        1e-11,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in specs {
                let g = sampling::random_group_element(spec, rng);
                let e = spec.compose(&g, &spec.inverse(&g)?)?;
                worst = worst.max(diff_group(&e, &spec.identity()));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "adjoint_action_composes",
        trials,
        1e-10,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in specs {
                let g1 = sampling::random_group_element(spec, rng);
                let g2 = sampling::random_group_element(spec, rng);
                let x = unit_algebra(spec, rng);
                let left = spec.adjoint_action(&spec.compose(&g1, &g2)?, &x)?;
                let right = spec.adjoint_action(&g1, &spec.adjoint_action(&g2, &x)?)?;
                worst = worst.max(diff_algebra(&left, &right));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "coadjoint_action_composes",
        trials,
        1e-10,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in specs {
                let g1 = sampling::random_group_element(spec, rng);
                let g2 = sampling::random_group_element(spec, rng);
                let m = unit_dual(spec, rng);
                let left = spec.coadjoint_action(&spec.compose(&g1, &g2)?, &m)?;
                let right = spec.coadjoint_action(&g1, &spec.coadjoint_action(&g2, &m)?)?;
                worst = worst.max(diff_dual(&left, &right));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "pairing_invariance",
        trials,
        1e-10,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in specs {
                let g = sampling::random_group_element(spec, rng);
                let x = unit_algebra(spec, rng);
                let m = unit_dual(spec, rng);
                let before = spec.pairing(&m, &x);
                let after = spec.pairing(
                    &spec.coadjoint_action(&g, &m)?,
                    &spec.adjoint_action(&g, &x)?,
                );
                worst = worst.max((after - before).abs());
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "momentum_defining_identity",
        trials,
        1e-10,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in specs {
                let p = sampling::normal_vector(rng, n);
                let v = sampling::normal_vector(rng, n);
                let omega = sampling::random_in_h(spec, rng);
                let mu = spec.momentum_map(&p, &v)?;
                let lhs = crate::group::b_form(&mu, &omega);
                let rhs = p.dot(&(&omega * &v));
                worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "jacobi_identity",
        trials,
        1e-10,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in specs {
                let x = unit_algebra(spec, rng);
                let y = unit_algebra(spec, rng);
                let z = unit_algebra(spec, rng);
                let a = spec.bracket(&spec.bracket(&x, &y)?, &z)?;
                let b = spec.bracket(&spec.bracket(&y, &z)?, &x)?;
                let c = spec.bracket(&spec.bracket(&z, &x)?, &y)?;
                let omega = &a.omega + &b.omega + &c.omega;
                let v = &a.v + &b.v + &c.v;
                worst = worst.max((omega.norm().powi(2) + v.norm().powi(2)).sqrt());
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "bracket_matches_flow",
        trials,
        1e-8,
        seed,
        |_, rng| {
            let step = 1e-5;
            let mut worst = 0.0_f64;
            for spec in specs {
                let zeta = unit_algebra(spec, rng);
                let x = unit_algebra(spec, rng);
                let plus = spec.adjoint_action(
                    &spec.exp(&AlgebraElement::new(&zeta.omega * step, &zeta.v * step))?,
                    &x,
                )?;
                let minus = spec.adjoint_action(
                    &spec.exp(&AlgebraElement::new(&zeta.omega * -step, &zeta.v * -step))?,
                    &x,
                )?;
                let fd = AlgebraElement::new(
                    (&plus.omega - &minus.omega) / (2.0 * step),
                    (&plus.v - &minus.v) / (2.0 * step),
                );
                worst = worst.max(diff_algebra(&fd, &spec.bracket(&zeta, &x)?));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "coadjoint_generator_matches_flow",
        trials,
        1e-8,
        seed,
        |_, rng| {
            let step = 1e-5;
            let mut worst = 0.0_f64;
            for spec in specs {
                let zeta = unit_algebra(spec, rng);
                let m = unit_dual(spec, rng);
                let plus = spec.coadjoint_action(
                    &spec.exp(&AlgebraElement::new(&zeta.omega * step, &zeta.v * step))?,
                    &m,
                )?;
                let minus = spec.coadjoint_action(
                    &spec.exp(&AlgebraElement::new(&zeta.omega * -step, &zeta.v * -step))?,
                    &m,
                )?;
                let fd = DualElement::new(
                    (&plus.l - &minus.l) / (2.0 * step),
                    (&plus.p - &minus.p) / (2.0 * step),
                );
                worst = worst.max(diff_dual(&fd, &spec.coadjoint_infinitesimal(&zeta, &m)?));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "momentum_duality",
        trials,
        1e-10,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in specs {
                let zeta = unit_algebra(spec, rng);
                let x = unit_algebra(spec, rng);
                let m = unit_dual(spec, rng);
                let lhs = spec.pairing(&spec.coadjoint_infinitesimal(&zeta, &m)?, &x);
                let rhs = -spec.pairing(&m, &spec.bracket(&zeta, &x)?);
                worst = worst.max((lhs - rhs).abs());
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "musical_map_h_equivariance",
        trials,
        1e-10,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in specs {
                let r = if spec.family() == Family::CustomCompact {
                    crate::numerics::expm(&sampling::random_in_h(spec, rng))
                } else {
                    sampling::random_rotation(rng, n, spec.family().is_special())
                };
                let g = GroupElement::new(r, DVector::zeros(n));
                let x = unit_algebra(spec, rng);
                let left = spec.musical_phi(&spec.adjoint_action(&g, &x)?);
                let right = spec.coadjoint_action(&g, &spec.musical_phi(&x))?;
                worst = worst.max(diff_dual(&left, &right));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "exp_lands_in_group",
        trials,
        1e-10,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in specs {
                let x = sampling::random_algebra_element(spec, rng);
                let g = spec.exp(&x)?;
                spec.check_group_element(&g)?;
                let gram = &g.r.transpose() * &g.r - DMatrix::identity(n, n);
                worst = worst.max(gram.norm());
            }
            Ok(worst)
        },
    ));

    Ok(reports)
}

// ----- spectral suite ---------------------------------------------------

fn spectral_suite(n: usize, trials: usize, seed: u64) -> Result<Vec<PropertyReport>> {
    let tol = ToleranceConfig::default();
    let sizes = [n, n + 1];
    let mut reports = Vec::new();

    reports.push(property(
        "youla_roundtrip",
        trials,
        1e-10,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for &size in &sizes {
                let omega = sampling::random_skew(rng, size);
                let spectrum = spectral::youla_decompose(&omega, &tol)?;
                let back = spectral::reconstruct(&spectrum);
                worst = worst.max((&back - &omega).norm() / omega.norm().max(1.0));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "youla_block_structure",
        trials,
        1e-6,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for &size in &sizes {
                let omega = sampling::random_skew(rng, size);
                let spectrum = spectral::youla_decompose(&omega, &tol)?;
                let mut total = spectrum.d0();
                let mut last = 0.0_f64;
                for block in &spectrum.blocks {
                    total += block.dim();
                    worst = worst.max(boolean(block.lambda > last));
                    last = block.lambda;
                    let dim = block.dim();
                    let gram = block.basis.transpose() * &block.basis - DMatrix::identity(dim, dim);
                    worst = worst.max(gram.norm());
                    let j2 = &block.j * &block.j + DMatrix::identity(dim, dim);
                    worst = worst.max(j2.norm());
                    let jtj = block.j.transpose() * &block.j - DMatrix::identity(dim, dim);
                    worst = worst.max(jtj.norm());
                }
                worst = worst.max(boolean(total == size));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "youla_rates_match_eigensolver",
        trials,
        1e-8,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for &size in &sizes {
                let omega = sampling::random_skew(rng, size);
                let spectrum = spectral::youla_decompose(&omega, &tol)?;
                let scale = omega.norm().max(1.0);
                let eigen = omega.clone().complex_eigenvalues();
                let mut positive: Vec<f64> = eigen
                    .iter()
                    .map(|c| c.im)
                    .filter(|&im| im > 1e-9 * scale)
                    .collect();
                positive.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let mut expanded = Vec::new();
                for block in &spectrum.blocks {
                    expanded.extend(std::iter::repeat_n(block.lambda, block.dim() / 2));
                }
                if positive.len() != expanded.len() {
                    worst = worst.max(1.0);
                    continue;
                }
                for (a, b) in positive.iter().zip(&expanded) {
                    worst = worst.max((a - b).abs() / scale);
                }
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "youla_conjugation_equivariance",
        trials,
        1e-8,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for &size in &sizes {
                let omega = sampling::random_skew(rng, size);
                let r = sampling::random_rotation(rng, size, false);
                let conjugated = &r * &omega * r.transpose();
                let a = spectral::youla_decompose(&omega, &tol)?;
                let b = spectral::youla_decompose(&conjugated, &tol)?;
                worst = worst.max(boolean(
                    a.block_dims() == b.block_dims() && a.d0() == b.d0(),
                ));
                let scale = omega.norm().max(1.0);
                for (x, y) in a.lambdas().iter().zip(b.lambdas()) {
                    worst = worst.max((x - y).abs() / scale);
                }
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "youla_handles_repeated_rates",
        trials,
        1e-9,
        seed,
        |_, rng| {
            // Constructed matrices with exactly repeated rates: a random rotation
            // of lambda * J applied to 4 of the dimensions.
            let size = n.max(4);
            let lambda = 0.5 + rng.random::<f64>();
            let mut omega = DMatrix::zeros(size, size);
            for k in 0..2 {
                omega[(2 * k + 1, 2 * k)] = lambda;
                omega[(2 * k, 2 * k + 1)] = -lambda;
            }
            let r = sampling::random_rotation(rng, size, false);
            let conjugated = &r * &omega * r.transpose();
            let spectrum = spectral::youla_decompose(&conjugated, &tol)?;
            let mut worst = (spectral::reconstruct(&spectrum) - &conjugated).norm();
            worst = worst.max(boolean(spectrum.block_dims() == vec![4]));
            worst = worst.max(boolean(spectrum.d0() == size - 4));
            Ok(worst)
        },
    ));

    Ok(reports)
}

// ----- orbits suite -----------------------------------------------------

fn orbits_suite(n: usize, trials: usize, seed: u64) -> Result<Vec<PropertyReport>> {
    let specs = spec_zoo(n)?;
    let specs = &specs;
    let mut reports = Vec::new();

    reports.push(property(
        "adjoint_normal_form_on_delta",
        trials,
        1e-9,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in specs {
                let x = sampling::random_algebra_element(spec, rng);
                let nf = orbit::normal_form_adjoint(spec, &x)?;
                worst = worst.max(nf.residual / x.v.norm().max(1.0));
                let moved = spec.adjoint_action(&nf.mover, &x)?;
                worst = worst.max(diff_algebra(&moved, &nf.point) / x.v.norm().max(1.0));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "coadjoint_normal_form_on_delta",
        trials,
        1e-9,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in specs {
                let m = sampling::random_dual_element(spec, rng);
                let nf = orbit::normal_form_coadjoint(spec, &m)?;
                let scale = m.l.norm().max(m.p.norm()).max(1.0);
                worst = worst.max(nf.residual / scale);
                let moved = spec.coadjoint_action(&nf.mover, &m)?;
                worst = worst.max(diff_dual(&moved, &nf.point) / scale);
                // The reduced angular part annihilates the momentum direction.
                worst = worst.max((&nf.point.l * &nf.point.p).norm() / scale);
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "properness_on_delta",
        trials,
        0.5,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in specs {
                let x = sampling::random_algebra_element(spec, rng);
                let nf = orbit::normal_form_adjoint(spec, &x)?;
                worst = worst.max(boolean(
                    orbit::isotropy_algebra_adjoint(spec, &nf.point)?.proper,
                ));
                let m = sampling::random_dual_element(spec, rng);
                let nfm = orbit::normal_form_coadjoint(spec, &m)?;
                worst = worst.max(boolean(
                    orbit::isotropy_algebra_coadjoint(spec, &nfm.point)?.proper,
                ));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "orbit_dimension_is_invariant",
        trials,
        0.5,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in specs {
                let x = sampling::random_algebra_element(spec, rng);
                let g = sampling::random_group_element(spec, rng);
                let moved = spec.adjoint_action(&g, &x)?;
                worst = worst.max(boolean(
                    orbit::orbit_dimension_adjoint(spec, &x)?
                        == orbit::orbit_dimension_adjoint(spec, &moved)?,
                ));
                let m = sampling::random_dual_element(spec, rng);
                let movedm = spec.coadjoint_action(&g, &m)?;
                worst = worst.max(boolean(
                    orbit::orbit_dimension_coadjoint(spec, &m)?
                        == orbit::orbit_dimension_coadjoint(spec, &movedm)?,
                ));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "class_is_invariant_under_moves",
        trials,
        0.5,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in specs.iter().filter(|s| s.family() != Family::CustomCompact) {
                let x = sampling::random_algebra_element(spec, rng);
                let before = flags::classify_adjoint(spec, &x)?;
                let mut moved = x.clone();
                for _ in 0..3 {
                    let g = sampling::random_group_element(spec, rng);
                    moved = spec.adjoint_action(&g, &moved)?;
                }
                let after = flags::classify_adjoint(spec, &moved)?;
                worst = worst.max(boolean(
                    before.rendered == after.rendered
                        && before.orbit_dim == after.orbit_dim
                        && before.components == after.components,
                ));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "same_orbit_accepts_moved_points",
        trials,
        0.5,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in specs {
                let x = sampling::random_algebra_element(spec, rng);
                let g = sampling::random_group_element(spec, rng);
                let moved = spec.adjoint_action(&g, &x)?;
                let verdict = orbit::same_orbit_adjoint(spec, &x, &moved)?;
                let ok = if spec.family() == Family::CustomCompact {
                    verdict != OrbitMatch::Different
                } else {
                    verdict == OrbitMatch::Same
                };
                worst = worst.max(boolean(ok));
                let m = sampling::random_dual_element(spec, rng);
                let movedm = spec.coadjoint_action(&g, &m)?;
                let verdict = orbit::same_orbit_coadjoint(spec, &m, &movedm)?;
                let ok = if spec.family() == Family::CustomCompact {
                    verdict != OrbitMatch::Different
                } else {
                    verdict == OrbitMatch::Same
                };
                worst = worst.max(boolean(ok));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "same_orbit_rejects_rescaled_points",
        trials,
        0.5,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in specs {
                let x = sampling::random_algebra_element(spec, rng);
                if x.omega.norm() < 0.1 {
                    continue;
                }
                let doubled = AlgebraElement::new(&x.omega * 2.0, x.v.clone());
                let verdict = orbit::same_orbit_adjoint(spec, &x, &doubled)?;
                worst = worst.max(boolean(verdict == OrbitMatch::Different));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "bijection_pair_is_consistent",
        trials,
        0.5,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in specs.iter().filter(|s| s.family().has_translations()) {
                let x = sampling::random_algebra_element(spec, rng);
                let report = orbit::bijection_pair(spec, &x)?;
                worst = worst.max((&report.adjoint_point.omega * &report.adjoint_point.v).norm());
                if spec.family() == Family::CustomCompact {
                    continue;
                }
                let (Some(a), Some(c)) = (&report.adjoint_class, &report.coadjoint_class) else {
                    worst = worst.max(1.0);
                    continue;
                };
                worst = worst.max(boolean(a.d0 == c.d0));
                worst = worst.max(boolean(a.lambda_multiset.len() == c.lambda_multiset.len()));
                for (la, lc) in a.lambda_multiset.iter().zip(&c.lambda_multiset) {
                    worst = worst.max(boolean(la.pairs == lc.pairs));
                    worst = worst.max((la.lambda - lc.lambda).abs());
                }
            }
            Ok(worst)
        },
    ));

    Ok(reports)
}

// ----- flags suite ------------------------------------------------------

struct TableRow {
    point_kind: OrbitSide,
    l_or_omega: DMatrix<f64>,
    vector: DVector<f64>,
    rendered: &'static str,
    dim: usize,
    components: usize,
}

fn e3_rows() -> Vec<TableRow> {
    let n = 3;
    let mut b12 = DMatrix::zeros(n, n);
    b12[(1, 0)] = 1.0;
    b12[(0, 1)] = -1.0;
    let zero_m = DMatrix::zeros(n, n);
    let e1 = DVector::from_column_slice(&[1.0, 0.0, 0.0]);
    let e3 = DVector::from_column_slice(&[0.0, 0.0, 1.0]);
    let zero_v = DVector::zeros(n);
    vec![
        // Coadjoint rows.
        TableRow {
            point_kind: OrbitSide::Coadjoint,
            l_or_omega: zero_m.clone(),
            vector: zero_v.clone(),
            rendered: "point",
            dim: 0,
            components: 1,
        },
        TableRow {
            point_kind: OrbitSide::Coadjoint,
            l_or_omega: b12.clone(),
            vector: zero_v.clone(),
            rendered: "F(1,2C)",
            dim: 2,
            components: 1,
        },
        TableRow {
            point_kind: OrbitSide::Coadjoint,
            l_or_omega: zero_m.clone(),
            vector: e3.clone(),
            rendered: "Aff(~1;2)",
            dim: 4,
            components: 1,
        },
        TableRow {
            point_kind: OrbitSide::Coadjoint,
            l_or_omega: b12.clone(),
            vector: e3.clone(),
            rendered: "Aff(~1;2C)",
            dim: 4,
            components: 2,
        },
        // Adjoint rows.
        TableRow {
            point_kind: OrbitSide::Adjoint,
            l_or_omega: zero_m.clone(),
            vector: zero_v.clone(),
            rendered: "point",
            dim: 0,
            components: 1,
        },
        TableRow {
            point_kind: OrbitSide::Adjoint,
            l_or_omega: b12.clone(),
            vector: zero_v,
            rendered: "Aff(1;2C)",
            dim: 4,
            components: 1,
        },
        TableRow {
            point_kind: OrbitSide::Adjoint,
            l_or_omega: zero_m,
            vector: e1,
            rendered: "Aff([~1;2])",
            dim: 2,
            components: 1,
        },
        TableRow {
            point_kind: OrbitSide::Adjoint,
            l_or_omega: b12,
            vector: e3,
            rendered: "Aff(~1;2C)",
            dim: 4,
            components: 2,
        },
    ]
}

fn flags_suite(n: usize, trials: usize, seed: u64) -> Result<Vec<PropertyReport>> {
    let mut reports = Vec::new();

    reports.push(property("e3_orbit_tables", 1, 0.5, seed, |_, _| {
        let spec = GroupSpec::euclidean(3);
        let mut worst = 0.0_f64;
        for row in e3_rows() {
            let class = match row.point_kind {
                OrbitSide::Adjoint => flags::classify_en_adjoint(
                    &spec,
                    &AlgebraElement::new(row.l_or_omega.clone(), row.vector.clone()),
                )?,
                OrbitSide::Coadjoint => flags::classify_en_coadjoint(
                    &spec,
                    &DualElement::new(row.l_or_omega.clone(), row.vector.clone()),
                )?,
            };
            worst = worst.max(boolean(class.rendered == row.rendered));
            worst = worst.max(boolean(class.orbit_dim == row.dim));
            worst = worst.max(boolean(class.full_group_components == row.components));
        }
        Ok(worst)
    }));

    reports.push(property(
        "component_rule_frozen_cases",
        1,
        0.5,
        seed,
        |_, _| {
            let cases: Vec<(FlagSignature, usize)> = vec![
                (FlagSignature::linear(&[(2, Marker::Complex)]), 2),
                (
                    FlagSignature::linear(&[(1, Marker::Plain), (2, Marker::Complex)]),
                    1,
                ),
                (
                    FlagSignature::affine(&[(1, Marker::Oriented), (2, Marker::Plain)]),
                    1,
                ),
                (
                    FlagSignature::affine(&[(1, Marker::Oriented), (2, Marker::Complex)]),
                    2,
                ),
                (
                    FlagSignature::grain(&[(1, Marker::Oriented), (2, Marker::Plain)]),
                    1,
                ),
                (FlagSignature::linear(&[(3, Marker::Plain)]), 1),
                (
                    FlagSignature::affine(&[(0, Marker::Plain), (2, Marker::Complex)]),
                    2,
                ),
            ];
            let mut worst = 0.0_f64;
            for (sig, expected) in cases {
                worst = worst.max(boolean(flags::full_group_components(&sig) == expected));
                worst = worst.max(boolean(flags::component_count(&sig, Family::SE)? == 1));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "flag_dimension_matches_rank",
        trials,
        0.5,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in [GroupSpec::euclidean(n), GroupSpec::special_euclidean(n)] {
                let x = sampling::random_algebra_element(&spec, rng);
                let class = flags::classify_en_adjoint(&spec, &x)?;
                worst = worst.max(boolean(
                    flags::flag_dimension(&class.signature, n)?
                        == orbit::orbit_dimension_adjoint(&spec, &x)?,
                ));
                let m = sampling::random_dual_element(&spec, rng);
                let class = flags::classify_en_coadjoint(&spec, &m)?;
                worst = worst.max(boolean(
                    flags::flag_dimension(&class.signature, n)?
                        == orbit::orbit_dimension_coadjoint(&spec, &m)?,
                ));
            }
            for spec in [GroupSpec::orthogonal(n), GroupSpec::special_orthogonal(n)] {
                let x = sampling::random_algebra_element(&spec, rng);
                let class = flags::classify_on_adjoint(&spec, &x.omega)?;
                worst = worst.max(boolean(
                    flags::flag_dimension(&class.signature, n)?
                        == orbit::orbit_dimension_adjoint(&spec, &x)?,
                ));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "bijection_classes_share_base",
        trials,
        0.5,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in [GroupSpec::euclidean(n), GroupSpec::special_euclidean(n)] {
                let x = sampling::random_algebra_element(&spec, rng);
                let report = orbit::bijection_pair(&spec, &x)?;
                let Some(base) = &report.base_signature else {
                    worst = worst.max(1.0);
                    continue;
                };
                worst = worst.max(boolean(flags::flag_dimension(base, n)? == report.base_dim));
                let total = report.adjoint_dim.max(report.coadjoint_dim);
                let smaller = report.adjoint_dim.min(report.coadjoint_dim);
                worst = worst.max(boolean(total == smaller + report.bundle.fibre_dim));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "fibration_diagrams_close",
        trials,
        0.5,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in [GroupSpec::euclidean(n), GroupSpec::special_euclidean(n)] {
                let x = sampling::random_algebra_element(&spec, rng);
                let class = flags::classify_en_adjoint(&spec, &x)?;
                let diagram = flags::orbit_fibration_diagram(&class, OrbitSide::Adjoint)?;
                if !class.signature.is_point() {
                    worst = worst.max(boolean(!diagram.is_empty()));
                }
                for edge in &diagram {
                    worst = worst.max(boolean(edge.total_dim == edge.base_dim + edge.fibre_dim));
                }
                let m = sampling::random_dual_element(&spec, rng);
                let class = flags::classify_en_coadjoint(&spec, &m)?;
                let diagram = flags::orbit_fibration_diagram(&class, OrbitSide::Coadjoint)?;
                for edge in &diagram {
                    worst = worst.max(boolean(edge.total_dim == edge.base_dim + edge.fibre_dim));
                }
            }
            Ok(worst)
        },
    ));

    Ok(reports)
}

// ----- symplectic suite -------------------------------------------------

fn random_line<R: Rng>(rng: &mut R, n: usize) -> Result<OrientedLine> {
    let mut direction = sampling::normal_vector(rng, n);
    if direction.norm() < 1e-6 {
        direction[0] += 1.0;
    }
    OrientedLine::new(direction, sampling::normal_vector(rng, n))
}

fn random_line_tangent<R: Rng>(rng: &mut R, line: &OrientedLine) -> LineTangent {
    let n = line.dim();
    let raw_a = sampling::normal_vector(rng, n);
    let raw_b = sampling::normal_vector(rng, n);
    let u = &line.direction;
    LineTangent::new(&raw_a - u * u.dot(&raw_a), &raw_b - u * u.dot(&raw_b))
}

fn symplectic_suite(n: usize, trials: usize, seed: u64) -> Result<Vec<PropertyReport>> {
    let mut reports = Vec::new();
    let tol = ToleranceConfig::default();

    reports.push(property(
        "translation_fibre_is_isotropic",
        trials,
        0.0,
        seed,
        |trial, rng| {
            let mut worst = 0.0_f64;
            for spec in [GroupSpec::euclidean(n), GroupSpec::special_euclidean(n)] {
                let m = sampling::random_dual_element(&spec, rng);
                let report = symplectic::fibre_isotropy_check(&spec, &m, 8, seed ^ trial)?;
                // Exact zeros: the bracket of two translations vanishes
                // identically, so any nonzero value fails outright.
                worst = worst.max(report.max_abs);
                worst = worst.max(boolean(report.tangent_rank == report.expected_rank));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "reduced_fibre_is_symplectic",
        trials,
        0.5,
        seed,
        |_, rng| {
            let spec = GroupSpec::euclidean(n);
            // A regular reduced point: distinct rates on the planes orthogonal
            // to p, momentum along the last axis.
            let mut l = DMatrix::zeros(n, n);
            let planes = (n - 1) / 2;
            for k in 0..planes {
                let rate = 1.0 + k as f64 + 0.5 * rng.random::<f64>();
                l[(2 * k + 1, 2 * k)] = rate;
                l[(2 * k, 2 * k + 1)] = -rate;
            }
            let mut p = DVector::zeros(n);
            p[n - 1] = 1.0 + rng.random::<f64>();
            let report = symplectic::symplectic_fibre_check(&spec, &DualElement::new(l, p))?;
            // dim SO(n-1) minus the stabilizer of a generic rate pattern: one
            // rotation per plane, plus whatever so-algebra is left on the
            // remaining axes (at most one axis here, contributing nothing).
            let stab = (n - 1) * (n - 2) / 2;
            let rest = (n - 1) - 2 * planes;
            let expected_fibre = stab - planes - rest * rest.saturating_sub(1) / 2;
            let mut worst = boolean(report.fibre_dim == expected_fibre);
            if report.fibre_dim > 0 {
                worst = worst.max(boolean(report.min_singular_value > 1e-8));
            } else {
                worst = worst.max(boolean(report.min_singular_value.is_infinite()));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "line_form_is_invariant",
        trials,
        1e-10,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in [GroupSpec::euclidean(n), GroupSpec::special_euclidean(n)] {
                let line = random_line(rng, n)?;
                let t1 = random_line_tangent(rng, &line);
                let t2 = random_line_tangent(rng, &line);
                let g = sampling::random_group_element(&spec, rng);
                let moved = symplectic::line_action(&spec, &g, &line)?;
                let s1 = symplectic::line_tangent_pushforward(&spec, &g, &line, &t1)?;
                let s2 = symplectic::line_tangent_pushforward(&spec, &g, &line, &t2)?;
                let before = symplectic::line_form(&line, &t1, &t2, &tol)?;
                let after = symplectic::line_form(&moved, &s1, &s2, &tol)?;
                worst = worst.max((after - before).abs() / (1.0 + before.abs()));
            }
            Ok(worst)
        },
    ));

    reports.push(property(
        "line_action_matches_coadjoint",
        trials,
        1e-9,
        seed,
        |_, rng| {
            let mut worst = 0.0_f64;
            for spec in [GroupSpec::euclidean(n), GroupSpec::special_euclidean(n)] {
                let mut p = sampling::normal_vector(rng, n);
                if p.norm() < 0.3 {
                    p[0] += 1.0;
                }
                let c = sampling::normal_vector(rng, n);
                let m = DualElement::new(spec.momentum_map(&p, &c)?, p);
                let g = sampling::random_group_element(&spec, rng);
                let via_orbit =
                    symplectic::line_from_coadjoint(&spec, &spec.coadjoint_action(&g, &m)?)?;
                let via_lines = symplectic::line_action(
                    &spec,
                    &g,
                    &symplectic::line_from_coadjoint(&spec, &m)?,
                )?;
                worst = worst.max((&via_orbit.direction - &via_lines.direction).norm());
                worst = worst.max(
                    (&via_orbit.base - &via_lines.base).norm() / (1.0 + via_lines.base.norm()),
                );
            }
            Ok(worst)
        },
    ));

    let kks_trials = trials.min(6);
    reports.push(property(
        "line_kks_scalar_fit",
        kks_trials,
        1e-6,
        seed,
        |_, rng| {
            let spec = GroupSpec::euclidean(n);
            let mut p = sampling::normal_vector(rng, n);
            if p.norm() < 0.3 {
                p[0] += 1.0;
            }
            let report = symplectic::line_form_vs_kks(&spec, &p, 12, rng.random::<u64>())?;
            Ok(report.max_relative_deviation)
        },
    ));

    reports.push(property(
        "line_kks_scalar_scales_with_momentum",
        kks_trials,
        1e-4,
        seed,
        |_, rng| {
            let spec = GroupSpec::euclidean(n);
            let mut p = sampling::normal_vector(rng, n);
            if p.norm() < 0.3 {
                p[0] += 1.0;
            }
            let inner_seed = rng.random::<u64>();
            let once = symplectic::line_form_vs_kks(&spec, &p, 12, inner_seed)?;
            let twice = symplectic::line_form_vs_kks(&spec, &(&p * 2.0), 12, inner_seed)?;
            Ok((twice.scalar - 2.0 * once.scalar).abs() / (2.0 * once.scalar).abs().max(1e-12))
        },
    ));

    Ok(reports)
}

// ----- entry point ------------------------------------------------------

/// Runs a property suite at ambient dimension `n` with `trials` samples per
/// property.
pub fn run_suite(suite: Suite, n: usize, trials: usize, seed: u64) -> Result<SuiteReport> {
    if n < 2 {
        return Err(Error::Dimension {
            context: "suite ambient dimension",
            expected: 2,
            got: n,
        });
    }
    let trials = trials.max(1);
    let properties = match suite {
        Suite::Core => core_suite(n, trials, seed)?,
        Suite::Spectral => spectral_suite(n, trials, seed)?,
        Suite::Orbits => orbits_suite(n, trials, seed)?,
        Suite::Flags => flags_suite(n, trials, seed)?,
        Suite::Symplectic => symplectic_suite(n, trials, seed)?,
        Suite::All => {
            let mut all = core_suite(n, trials, seed)?;
            all.extend(spectral_suite(n, trials, seed)?);
            all.extend(orbits_suite(n, trials, seed)?);
            all.extend(flags_suite(n, trials, seed)?);
            all.extend(symplectic_suite(n, trials, seed)?);
            all
        }
    };
    Ok(SuiteReport {
        suite: suite.to_string(),
        n,
        trials,
        seed,
        properties,
    })
}
