//! Youla decomposition against independent oracles: reconstruction,
//! the unsymmetrized eigensolver, conjugation equivariance, and the
//! deterministic basis canonicalization.

use euclid_orbits::spectral::{reconstruct, youla_decompose};
use euclid_orbits::{sampling, Error, ToleranceConfig};
use nalgebra::{DMatrix, DVector};

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn plane(n: usize, i: usize, j: usize, rate: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(j, i)] = rate;
    m[(i, j)] = -rate;
    m
}

#[test]
fn round_trip_over_random_matrices() {
    let mut rng = sampling::rng_for(7);
    for n in 2..=8 {
        for _ in 0..25 {
            let omega = sampling::random_skew(&mut rng, n);
            let spectrum = youla_decompose(&omega, &tol()).unwrap();
            let back = reconstruct(&spectrum);
            assert!(
                (&back - &omega).norm() <= 1e-10 * omega.norm().max(1.0),
                "round trip failed at n = {n}"
            );
            assert_eq!(spectrum.d0() + spectrum.rank(), n);
            assert_eq!(spectrum.rank() % 2, 0);
        }
    }
}

/// The rates must agree with the imaginary parts reported by the general
/// (non-symmetric) eigenvalue solver, an entirely independent code path.
#[test]
fn rates_match_the_general_eigensolver() {
    let mut rng = sampling::rng_for(8);
    for n in 2..=8 {
        for _ in 0..10 {
            let omega = sampling::random_skew(&mut rng, n);
            let scale = omega.norm().max(1.0);
            let spectrum = youla_decompose(&omega, &tol()).unwrap();
            let mut expected: Vec<f64> = omega
                .clone()
                .complex_eigenvalues()
                .iter()
                .map(|c| c.im)
                .filter(|&im| im > 1e-9 * scale)
                .collect();
            expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut got = Vec::new();
            for block in &spectrum.blocks {
                got.extend(std::iter::repeat_n(block.lambda, block.dim() / 2));
            }
            assert_eq!(got.len(), expected.len());
            for (g, e) in got.iter().zip(&expected) {
                assert!((g - e).abs() < 1e-10 * scale);
            }
        }
    }
}

#[test]
fn blocks_carry_orthonormal_bases_and_complex_structures() {
    let mut rng = sampling::rng_for(9);
    for _ in 0..20 {
        let omega = sampling::random_skew(&mut rng, 6);
        let spectrum = youla_decompose(&omega, &tol()).unwrap();
        let mut last = 0.0;
        for block in &spectrum.blocks {
            assert!(block.lambda > last, "rates must strictly increase");
            last = block.lambda;
            let d = block.dim();
            assert_eq!(d % 2, 0);
            let gram = block.basis.transpose() * &block.basis;
            assert!((gram - DMatrix::identity(d, d)).norm() < 1e-10);
            let j2 = &block.j * &block.j + DMatrix::identity(d, d);
            assert!(j2.norm() < 1e-10, "J² = -I inside each block");
        }
        // Kernel and block bases together form an orthonormal frame.
        let frame = spectrum.frame(None).unwrap();
        let gram = frame.transpose() * &frame;
        assert!((gram - DMatrix::identity(6, 6)).norm() < 1e-10);
    }
}

#[test]
fn conjugation_preserves_rates_and_block_dimensions() {
    let mut rng = sampling::rng_for(10);
    for _ in 0..15 {
        let omega = sampling::random_skew(&mut rng, 5);
        let r = sampling::random_rotation(&mut rng, 5, false);
        let a = youla_decompose(&omega, &tol()).unwrap();
        let b = youla_decompose(&(&r * &omega * r.transpose()), &tol()).unwrap();
        assert_eq!(a.d0(), b.d0());
        assert_eq!(a.block_dims(), b.block_dims());
        let scale = omega.norm().max(1.0);
        for (x, y) in a.lambdas().iter().zip(b.lambdas()) {
            assert!((x - y).abs() < 1e-9 * scale);
        }
    }
}

#[test]
fn repeated_rates_merge_into_a_single_block() {
    // Two planes at the same rate, hidden by a random rotation.
    let mut rng = sampling::rng_for(11);
    let omega = plane(6, 0, 1, 2.25) + plane(6, 2, 3, 2.25);
    let r = sampling::random_rotation(&mut rng, 6, true);
    let spectrum = youla_decompose(&(&r * &omega * r.transpose()), &tol()).unwrap();
    assert_eq!(spectrum.block_dims(), vec![4]);
    assert_eq!(spectrum.d0(), 2);
    assert!((spectrum.lambdas()[0] - 2.25).abs() < 1e-12);
}

#[test]
fn nearby_rates_stay_separate_blocks() {
    // Far apart relative to the default cluster width of 1e-8.
    let omega = plane(4, 0, 1, 1.0) + plane(4, 2, 3, 1.0 + 1e-4);
    let spectrum = youla_decompose(&omega, &tol()).unwrap();
    assert_eq!(spectrum.block_dims(), vec![2, 2]);

    // Within the width of a deliberately coarse tolerance they merge.
    let coarse = ToleranceConfig {
        eig_cluster_rel: 1e-3,
        ..ToleranceConfig::default()
    };
    let spectrum = youla_decompose(&omega, &coarse).unwrap();
    assert_eq!(spectrum.block_dims(), vec![4]);
}

#[test]
fn canonical_output_is_reproducible_and_axis_aligned() {
    // The greedy axis rule keeps golden outputs stable: decomposing twice
    // gives bitwise-identical bases, and for an axis-aligned plane the
    // basis is the plane's own axes with positive pivots.
    let omega = plane(3, 0, 1, 1.25);
    let a = youla_decompose(&omega, &tol()).unwrap();
    let b = youla_decompose(&omega, &tol()).unwrap();
    assert_eq!(a.blocks[0].basis, b.blocks[0].basis);
    assert_eq!(a.kernel_basis, b.kernel_basis);

    let basis = &a.blocks[0].basis;
    let expected = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    assert!((basis - expected).norm() < 1e-12);
    assert!((a.kernel_basis[(2, 0)] - 1.0).abs() < 1e-12);
}

#[test]
fn marked_kernel_vector_leads_the_kernel_frame() {
    let omega = plane(4, 0, 1, 1.0);
    let spectrum = youla_decompose(&omega, &tol()).unwrap();
    assert_eq!(spectrum.d0(), 2);
    let marked = DVector::from_column_slice(&[0.0, 0.0, 3.0, -4.0]);
    let frame = spectrum.frame(Some(&marked)).unwrap();
    let lead = frame.column(2);
    assert!((lead[2] - 0.6).abs() < 1e-12);
    assert!((lead[3] + 0.8).abs() < 1e-12);
    let gram = frame.transpose() * &frame;
    assert!((gram - DMatrix::identity(4, 4)).norm() < 1e-10);

    let outside = DVector::from_column_slice(&[1.0, 0.0, 0.0, 0.0]);
    assert!(spectrum.frame(Some(&outside)).is_err());
}

#[test]
fn non_skew_and_non_square_inputs_are_rejected() {
    let sym = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    assert!(matches!(
        youla_decompose(&sym, &tol()),
        Err(Error::NotSkew { .. })
    ));
    let rect = DMatrix::zeros(2, 3);
    assert!(matches!(
        youla_decompose(&rect, &tol()),
        Err(Error::Dimension { .. })
    ));
}

#[test]
fn spectrum_serializes_with_rates_and_kernel() {
    let omega = plane(3, 0, 1, 2.0);
    let spectrum = youla_decompose(&omega, &tol()).unwrap();
    let value = serde_json::to_value(&spectrum).unwrap();
    assert_eq!(value["n"], 3);
    assert_eq!(value["d0"], 1);
    assert_eq!(value["blocks"][0]["lambda"], 2.0);
    assert_eq!(value["blocks"][0]["dim"], 2);
    assert_eq!(value["kernel_basis"].as_array().unwrap().len(), 3);
}
