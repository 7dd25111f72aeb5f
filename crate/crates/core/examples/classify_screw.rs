use euclid_orbits::{flags, orbit, AlgebraElement, GroupSpec};
use nalgebra::{DMatrix, DVector};

fn main() -> euclid_orbits::Result<()> {
    let spec = GroupSpec::euclidean(3);

    // A screw generator: rotation in the 1-2 plane plus a translation.
    let omega = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let v = DVector::from_row_slice(&[0.3, 0.0, 2.0]);
    let x = AlgebraElement::new(omega, v);

    let class = flags::classify_adjoint(&spec, &x)?;
    println!("orbit {} of dimension {}", class.rendered, class.orbit_dim);

    let report = orbit::bijection_pair(&spec, &x)?;
    println!(
        "adjoint dim {}, coadjoint dim {}, fibre dim {}",
        report.adjoint_dim, report.coadjoint_dim, report.bundle.fibre_dim
    );
    Ok(())
}
