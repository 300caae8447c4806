//! Regenerates the files in `fixtures/`:
//! `cargo run -p qdiscord-cli --example write_fixtures`.

use std::path::Path;

use num_complex::Complex64;
use qdiscord::dv::generate_maximally_entangled;
use qdiscord::gaussian::GaussianState;
use qdiscord::phase_space::{wigner_from_fock, FockOperator, GridGeometry};
use qdiscord::random::{random_density_matrix, seeded};
use qdiscord::DensityOperator;
use qdiscord_cli::format::{emit, Basis, DvFile, GridFile, StateFile};

const CUTOFF: usize = 4;

fn fock_pure(amplitudes: &[f64]) -> DensityOperator {
    let mut psi = vec![Complex64::new(0.0, 0.0); CUTOFF + 1];
    for (c, &a) in psi.iter_mut().zip(amplitudes) {
        *c = Complex64::new(a, 0.0);
    }
    DensityOperator::pure(&psi).unwrap()
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, f: StateFile| std::fs::write(dir.join(name), emit(&f)).unwrap();

    write("bell2.state", StateFile::Dv(DvFile { state: generate_maximally_entangled(2).unwrap(), basis: Basis::Computational }));

    let mut rng = seeded(21);
    let a = DensityOperator::new(random_density_matrix(2, &mut rng)).unwrap();
    let b = DensityOperator::new(random_density_matrix(2, &mut rng)).unwrap();
    write("product.state", StateFile::Dv(DvFile { state: DensityOperator::product(&a, &b), basis: Basis::Computational }));

    write("tmsv_r05.state", StateFile::Gaussian(GaussianState::tmsv(0.5)));
    write("thermal_product.state", StateFile::Gaussian(GaussianState::thermal_product(0.5, 1.0)));

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let fock0 = fock_pure(&[1.0]);
    let plus = fock_pure(&[h, h]);
    write("fock0_fock.state", StateFile::Dv(DvFile { state: fock0.clone(), basis: Basis::Fock }));
    write("plus_fock.state", StateFile::Dv(DvFile { state: plus.clone(), basis: Basis::Fock }));
    let geom = GridGeometry::default();
    for (name, s) in [("fock0.state", &fock0), ("plus.state", &plus)] {
        let grid = wigner_from_fock(&FockOperator::from_density(s), &geom).unwrap();
        write(name, StateFile::Grid(GridFile::plain(grid)));
    }
}
