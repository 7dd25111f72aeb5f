//! Spectral (Youla) decomposition of real skew-symmetric matrices.
//!
//! A skew matrix `ω` decomposes `R^n` orthogonally into its kernel and a sum
//! of 2-dimensional rotation planes: there is an orthonormal basis in which
//!
//! ```text
//! ω = diag(λ_1 J, …, λ_k J, 0, …, 0),      J = [[0, -1], [1, 0]],
//! ```
//!
//! with `0 < λ_1 < … < λ_k`. Equal (or numerically indistinguishable) rates
//! are merged into a single invariant block of dimension `2m` carrying an
//! orthogonal complex structure `J` with `J² = -I`.
//!
//! The decomposition is computed from the real Schur form of `ω`. A skew
//! matrix is normal, so its Schur factor is block diagonal: 2x2
//! antisymmetric blocks carrying the rates and near-zero 1x1 entries for
//! the kernel, with the Schur vectors spanning the invariant planes
//! directly. The rates are read off at linear scale, so the noise on a
//! zero rate stays at machine precision and kernel detection is reliable;
//! inside each merged block, vectors are paired into planes `(u, ω u / λ)`.
//! Basis vectors are chosen by a deterministic greedy rule (largest
//! coordinate-axis shadow first, positive pivot), so the output depends
//! only on the input matrix and the tolerances, which keeps golden outputs
//! stable.

use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, DVector};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;

/// One invariant block: an even-dimensional subspace on which `ω` acts as
/// `λ J` for an orthogonal complex structure `J`.
#[derive(Debug, Clone)]
pub struct Block {
    /// Rotation rate `λ > 0` (the representative of the merged cluster).
    pub lambda: f64,
    /// Orthonormal basis of the block, `n x dim` with even `dim`.
    pub basis: DMatrix<f64>,
    /// Complex structure in block coordinates, `basisᵀ ω basis / λ`.
    pub j: DMatrix<f64>,
}

impl Block {
    /// Real dimension of the block (always even).
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// The full decomposition of a skew matrix: kernel plus rotation blocks with
/// strictly increasing rates.
#[derive(Debug, Clone)]
pub struct SkewSpectrum {
    n: usize,
    /// Orthonormal basis of `ker ω`, `n x d0`.
    pub kernel_basis: DMatrix<f64>,
    /// Rotation blocks, ordered by strictly increasing `lambda`.
    pub blocks: Vec<Block>,
    /// Frobenius norm of the input, kept for scale-aware residual checks.
    pub source_norm: f64,
}

impl SkewSpectrum {
    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Kernel dimension `d0`.
    pub fn d0(&self) -> usize {
        self.kernel_basis.ncols()
    }

    /// Rank of the matrix, `n - d0`.
    pub fn rank(&self) -> usize {
        self.n - self.d0()
    }

    /// The distinct rates in increasing order.
    pub fn lambdas(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.lambda).collect()
    }

    /// Block dimensions in the same order as [`SkewSpectrum::lambdas`].
    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.dim()).collect()
    }

    /// `(λ, block dimension)` pairs; the dimension is the real multiplicity
    /// (twice the complex one).
    pub fn lambda_multiset(&self) -> Vec<(f64, usize)> {
        self.blocks.iter().map(|b| (b.lambda, b.dim())).collect()
    }

    /// Orthonormal frame `[block_1 | … | block_k | kernel]` assembled from
    /// the decomposition. When `marked` is given it must lie in the kernel;
    /// the kernel part of the frame then starts with `marked / |marked|`.
    ///
    /// Frames of two matrices with matching block data are exactly the input
    /// one needs to build an orthogonal matrix conjugating one to the other.
    pub fn frame(&self, marked: Option<&DVector<f64>>) -> Result<DMatrix<f64>> {
        let mut cols: Vec<DVector<f64>> = Vec::with_capacity(self.n);
        for b in &self.blocks {
            for c in 0..b.dim() {
                cols.push(b.basis.column(c).into_owned());
            }
        }
        let kernel = match marked {
            None => self.kernel_basis.clone(),
            Some(v) => {
                let coords = self.kernel_basis.transpose() * v;
                let inside = &self.kernel_basis * &coords;
                let residual = (v - &inside).norm();
                if residual > 1e-8 * v.norm().max(1.0) || coords.norm() == 0.0 {
                    return Err(Error::InvariantViolation(format!(
                        "marked vector is not in the kernel (residual {residual:.3e})"
                    )));
                }
                let first = &inside / inside.norm();
                // Re-span the kernel starting from the marked direction.
                let mut columns = vec![first.clone()];
                for c in 0..self.d0() {
                    let mut w = self.kernel_basis.column(c).into_owned();
                    for done in &columns {
                        w -= done * done.dot(&w);
                    }
                    let norm = w.norm();
                    if norm > 1e-8 {
                        columns.push(w / norm);
                    }
                }
                if columns.len() != self.d0() {
                    return Err(Error::InvariantViolation(
                        "kernel re-spanning lost a dimension".into(),
                    ));
                }
                DMatrix::from_columns(&columns)
            }
        };
        for c in 0..kernel.ncols() {
            cols.push(kernel.column(c).into_owned());
        }
        Ok(DMatrix::from_columns(&cols))
    }
}

impl Serialize for SkewSpectrum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                .collect()
        }
        #[derive(Serialize)]
        struct BlockRepr {
            lambda: f64,
            dim: usize,
            basis: Vec<Vec<f64>>,
            j: Vec<Vec<f64>>,
        }
        let mut st = s.serialize_struct("SkewSpectrum", 4)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("d0", &self.d0())?;
        st.serialize_field("kernel_basis", &rows(&self.kernel_basis))?;
        st.serialize_field(
            "blocks",
            &self
                .blocks
                .iter()
                .map(|b| BlockRepr {
                    lambda: b.lambda,
                    dim: b.dim(),
                    basis: rows(&b.basis),
                    j: rows(&b.j),
                })
                .collect::<Vec<_>>(),
        )?;
        st.end()
    }
}

/// Deterministically picks a unit vector in the span of the orthonormal
/// columns `w`: the normalized shadow of the coordinate axis with the largest
/// projection onto the span. The pivot coordinate is positive by
/// construction.
fn canonical_unit(w: &DMatrix<f64>) -> DVector<f64> {
    let n = w.nrows();
    let mut best_i = 0;
    let mut best = -1.0;
    for i in 0..n {
        let row_norm = w.row(i).norm();
        if row_norm > best + 1e-14 {
            best = row_norm;
            best_i = i;
        }
    }
    let shadow = w * w.row(best_i).transpose();
    let mut u = &shadow / shadow.norm();
    if u[best_i] < 0.0 {
        u = -u;
    }
    u
}

/// Orthonormal basis of the part of `span(w)` orthogonal to the given unit
/// vectors, which must themselves lie in the span.
fn peel(w: &DMatrix<f64>, remove: &[DVector<f64>]) -> DMatrix<f64> {
    let mut kept: Vec<DVector<f64>> = Vec::new();
    for c in 0..w.ncols() {
        let mut v = w.column(c).into_owned();
        for r in remove {
            v -= r * r.dot(&v);
        }
        for k in &kept {
            v -= k * k.dot(&v);
        }
        let norm = v.norm();
        if norm > 1e-8 {
            kept.push(v / norm);
        }
    }
    if kept.is_empty() {
        DMatrix::zeros(w.nrows(), 0)
    } else {
        DMatrix::from_columns(&kept)
    }
}

/// Computes the Youla decomposition of a skew-symmetric matrix.
///
/// Eigenvalue magnitudes closer than `tol.eig_cluster_rel * max λ` are merged
/// into one block; magnitudes below `max(tol.abs, eig_cluster_rel * max λ)`
/// belong to the kernel.
pub fn youla_decompose(omega: &DMatrix<f64>, tol: &ToleranceConfig) -> Result<SkewSpectrum> {
    tol.validate()?;
    let n = omega.nrows();
    if omega.ncols() != n {
        return Err(Error::Dimension {
            context: "youla input",
            expected: n,
            got: omega.ncols(),
        });
    }
    let sym_residual = (omega + omega.transpose()).amax();
    let skew_tol = tol.abs_scaled(omega.amax());
    if sym_residual > skew_tol {
        return Err(Error::NotSkew {
            residual: sym_residual,
            tol: skew_tol,
        });
    }
    let source_norm = omega.norm();
    // Work on the exactly-skew part; its real Schur form is block diagonal
    // with the Schur vectors spanning the invariant planes.
    let a = 0.5 * (omega - omega.transpose());
    let (rates, vectors) = if a.amax() == 0.0 {
        (vec![0.0; n], DMatrix::identity(n, n))
    } else {
        let schur = Schur::try_new(a.clone(), f64::EPSILON, 0)
            .ok_or_else(|| Error::Decomposition("eigenvalue iteration did not converge".into()))?;
        let (q, t) = schur.unpack();
        // Walk the quasi-diagonal: a subdiagonal coupling above round-off
        // scale marks a 2x2 rotation block, anything else is a deflated
        // 1x1 kernel entry.
        let deflated = 8.0 * f64::EPSILON * source_norm;
        let mut rates = vec![0.0; n];
        let mut i = 0;
        while i < n {
            let coupling = if i + 1 < n { t[(i + 1, i)].abs() } else { 0.0 };
            if coupling > deflated {
                let rate = 0.5 * (coupling + t[(i, i + 1)].abs());
                rates[i] = rate;
                rates[i + 1] = rate;
                i += 2;
            } else {
                rates[i] = t[(i, i)].abs();
                i += 1;
            }
        }
        (rates, q)
    };
    let scale = rates.iter().cloned().fold(0.0_f64, f64::max);
    let kernel_cut = tol.abs.max(tol.eig_cluster_rel * scale);

    let mut kernel_idx = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    for (i, &r) in rates.iter().enumerate() {
        if r <= kernel_cut {
            kernel_idx.push(i);
        } else {
            active.push(i);
        }
    }
    active.sort_by(|&i, &j| rates[i].partial_cmp(&rates[j]).unwrap());

    // Group indices whose rates are within the cluster gap of each other.
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for idx in active {
        match clusters.last_mut() {
            Some(cluster)
                if rates[idx] - rates[*cluster.last().unwrap()] <= tol.eig_cluster_rel * scale =>
            {
                cluster.push(idx);
            }
            _ => clusters.push(vec![idx]),
        }
    }

    let columns_of = |idx: &[usize]| -> DMatrix<f64> {
        if idx.is_empty() {
            return DMatrix::zeros(n, 0);
        }
        let cols: Vec<DVector<f64>> = idx
            .iter()
            .map(|&i| vectors.column(i).into_owned())
            .collect();
        DMatrix::from_columns(&cols)
    };

    let mut blocks = Vec::with_capacity(clusters.len());
    for cluster in &clusters {
        let dim = cluster.len();
        if dim % 2 != 0 {
            return Err(Error::Decomposition(format!(
                "eigenvalue cluster of odd multiplicity {dim}; the cluster tolerance split a rotation pair"
            )));
        }
        let lambda = cluster.iter().map(|&i| rates[i]).sum::<f64>() / dim as f64;
        let mut remaining = columns_of(cluster);
        let mut pairs: Vec<DVector<f64>> = Vec::with_capacity(dim);
        while remaining.ncols() > 0 {
            let u = canonical_unit(&remaining);
            let au = &a * &u;
            let norm = au.norm();
            if norm <= kernel_cut {
                return Err(Error::Decomposition(
                    "vector in a nonzero-rate eigenspace is annihilated by the matrix".into(),
                ));
            }
            let w = au / norm;
            remaining = peel(&remaining, &[u.clone(), w.clone()]);
            pairs.push(u);
            pairs.push(w);
        }
        if pairs.len() != dim {
            return Err(Error::Decomposition(
                "plane pairing did not exhaust the eigenspace".into(),
            ));
        }
        let basis = DMatrix::from_columns(&pairs);
        let j = (basis.transpose() * &a * &basis) / lambda;
        blocks.push(Block { lambda, basis, j });
    }

    // Canonical kernel basis through the same greedy axis rule.
    let mut kernel_cols: Vec<DVector<f64>> = Vec::with_capacity(kernel_idx.len());
    let mut remaining = columns_of(&kernel_idx);
    while remaining.ncols() > 0 {
        let u = canonical_unit(&remaining);
        remaining = peel(&remaining, std::slice::from_ref(&u));
        kernel_cols.push(u);
    }
    let kernel_basis = if kernel_cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&kernel_cols)
    };

    Ok(SkewSpectrum {
        n,
        kernel_basis,
        blocks,
        source_norm,
    })
}

/// Rebuilds the skew matrix from its decomposition,
/// `Σ_j λ_j · basis_j · J_j · basis_jᵀ`.
pub fn reconstruct(spectrum: &SkewSpectrum) -> DMatrix<f64> {
    let n = spectrum.n();
    let mut out = DMatrix::zeros(n, n);
    for b in &spectrum.blocks {
        out += b.lambda * &b.basis * &b.j * b.basis.transpose();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation_generator_3d() -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    }

    #[test]
    fn detects_non_skew_input() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(
            youla_decompose(&m, &ToleranceConfig::default()),
            Err(Error::NotSkew { .. })
        ));
    }

    #[test]
    fn zero_matrix_is_all_kernel() {
        let spectrum = youla_decompose(&DMatrix::zeros(4, 4), &ToleranceConfig::default()).unwrap();
        assert_eq!(spectrum.d0(), 4);
        assert!(spectrum.blocks.is_empty());
    }

    #[test]
    fn rotation_generator_has_one_block_and_e3_kernel() {
        let spectrum =
            youla_decompose(&rotation_generator_3d(), &ToleranceConfig::default()).unwrap();
        assert_eq!(spectrum.d0(), 1);
        assert_eq!(spectrum.block_dims(), vec![2]);
        assert!((spectrum.lambdas()[0] - 1.0).abs() < 1e-12);
        assert!((spectrum.kernel_basis[(2, 0)].abs() - 1.0).abs() < 1e-12);
        // Canonical kernel vector has a positive pivot.
        assert!(spectrum.kernel_basis[(2, 0)] > 0.0);
    }

    #[test]
    fn block_j_is_canonical_for_single_plane() {
        let spectrum =
            youla_decompose(&rotation_generator_3d(), &ToleranceConfig::default()).unwrap();
        let j = &spectrum.blocks[0].j;
        let expected = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!((j - expected).norm() < 1e-12);
    }

    #[test]
    fn reconstruct_round_trips_a_two_rate_example() {
        // Rates 1 and 2 in orthogonal planes of R^5.
        let mut omega = DMatrix::zeros(5, 5);
        omega[(1, 0)] = 1.0;
        omega[(0, 1)] = -1.0;
        omega[(3, 2)] = 2.0;
        omega[(2, 3)] = -2.0;
        let spectrum = youla_decompose(&omega, &ToleranceConfig::default()).unwrap();
        assert_eq!(spectrum.d0(), 1);
        assert_eq!(spectrum.block_dims(), vec![2, 2]);
        assert!((reconstruct(&spectrum) - omega).norm() < 1e-12);
    }

    #[test]
    fn equal_rates_merge_into_one_block() {
        let mut omega = DMatrix::zeros(4, 4);
        omega[(1, 0)] = 1.5;
        omega[(0, 1)] = -1.5;
        omega[(3, 2)] = 1.5;
        omega[(2, 3)] = -1.5;
        let spectrum = youla_decompose(&omega, &ToleranceConfig::default()).unwrap();
        assert_eq!(spectrum.block_dims(), vec![4]);
        let j = &spectrum.blocks[0].j;
        assert!((j * j + DMatrix::identity(4, 4)).norm() < 1e-10);
        assert!((reconstruct(&spectrum) - omega).norm() < 1e-10);
    }

    #[test]
    fn marked_frame_puts_the_kernel_direction_first() {
        let spectrum =
            youla_decompose(&rotation_generator_3d(), &ToleranceConfig::default()).unwrap();
        let marked = DVector::from_row_slice(&[0.0, 0.0, -2.0]);
        let frame = spectrum.frame(Some(&marked)).unwrap();
        // Kernel column sits after the single 2-dimensional block.
        assert!((frame.column(2) + DVector::from_row_slice(&[0.0, 0.0, 1.0])).norm() < 1e-12);
        let gram = frame.transpose() * &frame;
        assert!((gram - DMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn marked_vector_outside_kernel_is_rejected() {
        let spectrum =
            youla_decompose(&rotation_generator_3d(), &ToleranceConfig::default()).unwrap();
        let marked = DVector::from_row_slice(&[1.0, 0.0, 0.0]);
        assert!(spectrum.frame(Some(&marked)).is_err());
    }

    #[test]
    fn round_off_padding_stays_in_the_kernel() {
        // An exact rotation plane plus entries at round-off scale, the shape
        // a normal form leaves behind. The tiny entries must land in the
        // kernel, not split off as a phantom rate.
        let eps = 2.220446049250313e-16;
        let mut omega = DMatrix::zeros(4, 4);
        omega[(1, 0)] = 1.0;
        omega[(0, 1)] = -1.0;
        omega[(0, 2)] = eps;
        omega[(2, 0)] = -eps;
        omega[(1, 2)] = eps;
        omega[(2, 1)] = -eps;
        omega[(2, 3)] = eps;
        omega[(3, 2)] = -eps;
        let spectrum = youla_decompose(&omega, &ToleranceConfig::default()).unwrap();
        assert_eq!(spectrum.d0(), 2);
        assert_eq!(spectrum.block_dims(), vec![2]);
        assert!((spectrum.blocks[0].lambda - 1.0).abs() < 1e-12);
    }
}
