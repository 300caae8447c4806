use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use qdiscord::linalg::ComplexMatrix;
use qdiscord::phase_space::{
    char_commutator, gaussian_char, gaussian_wigner, grid_max_abs, moyal_commutator, wigner_from_char,
    wigner_from_fock, CommutatorGrid, FockOperator, GridGeometry, WignerGrid,
};
use qdiscord::random::{random_density_matrix, seeded};

fn embedded_random_state(levels: usize, cutoff: usize, seed: u64) -> FockOperator {
    let small = random_density_matrix(levels, &mut seeded(seed));
    let m = ComplexMatrix::from_fn(cutoff + 1, cutoff + 1, |i, j| {
        if i < levels && j < levels { small[(i, j)] } else { Complex64::new(0.0, 0.0) }
    });
    FockOperator::new(m).unwrap()
}

fn plus_state(cutoff: usize) -> FockOperator {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    v[0] = Complex64::new(s, 0.0);
    v[1] = Complex64::new(s, 0.0);
    FockOperator::from_pure(&v).unwrap()
}

fn fock_route(a: &FockOperator, b: &FockOperator, g: &GridGeometry) -> WignerGrid {
    wigner_from_fock(&a.commutator_times_minus_i(b).unwrap(), g).unwrap()
}

/// (8/π) ∫ d²u d²v W_a(α+u) W_b(α+v) sin(4(u_r v_i − u_i v_r)) by direct
/// summation over the grid, i.e. the sine-kernel integral with β = 2u, β' = 2v.
fn literal_quadrature(a: &WignerGrid, b: &WignerGrid) -> Vec<f64> {
    let g = *a.geometry();
    let area = g.cell_area();
    let pts: Vec<(f64, f64)> = (0..g.len()).map(|k| (g.x(k / g.np), g.p(k % g.np))).collect();
    pts.iter()
        .map(|&(x, p)| {
            let mut acc = 0.0;
            for (k1, &(x1, p1)) in pts.iter().enumerate() {
                let wa = a.values()[k1];
                let (ur, ui) = (x1 - x, p1 - p);
                for (k2, &(x2, p2)) in pts.iter().enumerate() {
                    let (vr, vi) = (x2 - x, p2 - p);
                    acc += wa * b.values()[k2] * (4.0 * (ur * vi - ui * vr)).sin();
                }
            }
            acc * 8.0 / PI * area * area
        })
        .collect()
}

#[test]
fn moyal_matches_fock_commutator_on_random_pairs() {
    let start = Instant::now();
    let g = GridGeometry::default();
    let mut worst: f64 = 0.0;
    for pair in 0..10u64 {
        let a = embedded_random_state(7, 8, 2 * pair);
        let b = embedded_random_state(7, 8, 2 * pair + 1);
        let wa = wigner_from_fock(&a, &g).unwrap();
        let wb = wigner_from_fock(&b, &g).unwrap();
        let moyal = moyal_commutator(&wa, &wb).unwrap();
        let err = moyal.sup_distance_to(&fock_route(&a, &b, &g)).unwrap();
        assert!(moyal.imaginary_residue() <= 1e-10, "residue {}", moyal.imaginary_residue());
        assert!(grid_max_abs(&moyal).0 > 1e-3);
        worst = worst.max(err);
    }
    eprintln!("worst Moyal/Fock difference {worst:.3e} in {:?}", start.elapsed());
    assert!(worst <= 1e-3);
}

#[test]
fn vacuum_against_superposition() {
    let g = GridGeometry::default();
    let vac = FockOperator::number_state(0, 8).unwrap();
    let plus = plus_state(8);
    let moyal = moyal_commutator(&wigner_from_fock(&vac, &g).unwrap(), &wigner_from_fock(&plus, &g).unwrap()).unwrap();
    let oracle = fock_route(&vac, &plus, &g);
    assert!(moyal.sup_distance_to(&oracle).unwrap() <= 1e-3);
    assert!((grid_max_abs(&moyal).0 - oracle.max_abs().0).abs() <= 1e-3);
}

#[test]
fn antisymmetry_and_tracelessness() {
    let g = GridGeometry::default();
    let a = wigner_from_fock(&embedded_random_state(5, 8, 40), &g).unwrap();
    let b = wigner_from_fock(&embedded_random_state(5, 8, 41), &g).unwrap();
    let ab = moyal_commutator(&a, &b).unwrap();
    let ba = moyal_commutator(&b, &a).unwrap();
    let worst = ab.values().iter().zip(ba.values()).map(|(x, y)| (x + y).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-10);
    assert!(ab.integral().abs() <= 1e-3);
    assert!(ba.integral().abs() <= 1e-3);
}

fn literal_fixtures(g: &GridGeometry) -> Vec<(WignerGrid, WignerGrid)> {
    let vac = [[0.25, 0.0], [0.0, 0.25]];
    vec![
        (
            wigner_from_fock(&FockOperator::number_state(0, 6).unwrap(), g).unwrap(),
            wigner_from_fock(&plus_state(6), g).unwrap(),
        ),
        (gaussian_wigner([0.0, 0.0], vac, g).unwrap(), gaussian_wigner([0.5, 0.0], vac, g).unwrap()),
        (
            gaussian_wigner([0.0, 0.2], [[0.35, 0.0], [0.0, 0.35]], g).unwrap(),
            gaussian_wigner([-0.3, 0.0], [[0.2, 0.0], [0.0, 0.3125]], g).unwrap(),
        ),
    ]
}

#[test]
fn literal_quadrature_oracle_agrees_at_coarse_resolution() {
    let g = GridGeometry::square(2.4, 16);
    for (k, (a, b)) in literal_fixtures(&g).iter().enumerate() {
        let spectral = moyal_commutator(a, b).unwrap();
        let literal = literal_quadrature(a, b);
        let err = spectral.values().iter().zip(&literal).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        eprintln!("fixture {k}: literal vs spectral {err:.3e}, scale {:.3e}", grid_max_abs(&spectral).0);
        assert!(err <= 5e-3, "fixture {k}: {err}");
    }
}

fn char_route(mean_a: [f64; 2], cov_a: [[f64; 2]; 2], mean_b: [f64; 2], cov_b: [[f64; 2]; 2], wg: &GridGeometry) -> WignerGrid {
    let cg = GridGeometry::square(8.0, 64);
    let ca = gaussian_char(mean_a, cov_a, &cg).unwrap();
    let cb = gaussian_char(mean_b, cov_b, &cg).unwrap();
    let c = char_commutator(&ca, &cb).unwrap();
    assert!(c.at_origin().unwrap().norm() <= 1e-6);
    wigner_from_char(&c, wg).unwrap().0
}

#[test]
fn characteristic_route_matches_moyal_route() {
    let g = GridGeometry::default();
    let vac = [[0.25, 0.0], [0.0, 0.25]];
    let fixtures = [
        ([0.0, 0.0], vac, [1.0, 0.0], vac),
        ([0.0, 0.0], vac, [0.5, -0.5], vac),
        ([0.2, 0.1], [[0.4, 0.0], [0.0, 0.4]], [-0.3, 0.4], [[0.15, 0.05], [0.05, 0.45]]),
    ];
    for (k, (ma, ca, mb, cb)) in fixtures.into_iter().enumerate() {
        let moyal = moyal_commutator(&gaussian_wigner(ma, ca, &g).unwrap(), &gaussian_wigner(mb, cb, &g).unwrap()).unwrap();
        let via_char = char_route(ma, ca, mb, cb, &g);
        let err = moyal.sup_distance_to(&via_char).unwrap();
        eprintln!("fixture {k}: char vs Moyal {err:.3e}, scale {:.3e}", grid_max_abs(&moyal).0);
        assert!(grid_max_abs(&moyal).0 > 1e-2);
        assert!(err <= 2e-3, "fixture {k}: {err}");
    }
}

#[test]
fn refining_the_grid_reduces_error() {
    let vac = [[0.25, 0.0], [0.0, 0.25]];
    let fock_a = FockOperator::number_state(0, 12).unwrap();
    let fock_b = FockOperator::coherent(Complex64::new(0.5, 0.25), 12);
    let error_at = |n: usize| {
        let g = GridGeometry::square(6.0, n);
        let wa = gaussian_wigner([0.0, 0.0], vac, &g).unwrap();
        let wb = gaussian_wigner([0.5, 0.25], vac, &g).unwrap();
        let moyal: CommutatorGrid = moyal_commutator(&wa, &wb).unwrap();
        moyal.sup_distance_to(&fock_route(&fock_a, &fock_b, &g)).unwrap()
    };
    let coarse = error_at(16);
    let fine = error_at(32);
    eprintln!("coarse {coarse:.3e}, fine {fine:.3e}");
    assert!(fine * 2.0 <= coarse);
}
