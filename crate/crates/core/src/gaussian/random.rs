//! Seeded random symplectic maps and physical two-mode states.

use nalgebra::{Matrix4, Vector4};
use rand::Rng;

use super::standard::{local, rotation, squeezer};
use super::GaussianState;

/// Random local symplectic R(θ₂) S(r) R(θ₁) on each mode, |r| ≤ 0.8.
pub fn random_local_symplectic<R: Rng + ?Sized>(rng: &mut R) -> Matrix4<f64> {
    let mut mode = || {
        let t1 = rng.random_range(0.0..std::f64::consts::TAU);
        let t2 = rng.random_range(0.0..std::f64::consts::TAU);
        let r = rng.random_range(-0.8..0.8);
        rotation(t2) * squeezer(r) * rotation(t1)
    };
    let (m1, m2) = (mode(), mode());
    local(&m1, &m2)
}

/// Beam splitter with transmissivity cos²θ.
fn beam_splitter(theta: f64) -> Matrix4<f64> {
    let (s, c) = theta.sin_cos();
    Matrix4::new(c, 0.0, s, 0.0, 0.0, c, 0.0, s, -s, 0.0, c, 0.0, 0.0, -s, 0.0, c)
}

fn two_mode_squeezer(r: f64) -> Matrix4<f64> {
    let (ch, sh) = (r.cosh(), r.sinh());
    Matrix4::new(ch, 0.0, sh, 0.0, 0.0, ch, 0.0, -sh, sh, 0.0, ch, 0.0, 0.0, -sh, 0.0, ch)
}

/// Random two-mode symplectic mixing the modes.
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R) -> Matrix4<f64> {
    let l1 = random_local_symplectic(rng);
    let bs = beam_splitter(rng.random_range(0.0..std::f64::consts::PI));
    let l2 = random_local_symplectic(rng);
    let tms = two_mode_squeezer(rng.random_range(-0.8..0.8));
    let l3 = random_local_symplectic(rng);
    l3 * tms * l2 * bs * l1
}

/// Thermal-diagonal state ν₁ I/4 ⊕ ν₂ I/4 (ν ≥ 1) under a random symplectic.
/// With `correlated = false` the symplectic is local, so C = 0 exactly.
pub fn random_physical_state<R: Rng + ?Sized>(rng: &mut R, correlated: bool) -> GaussianState {
    let nu1 = 1.0 + rng.random_range(0.0..2.0);
    let nu2 = 1.0 + rng.random_range(0.0..2.0);
    let base = GaussianState::centred(Matrix4::from_diagonal(&Vector4::new(nu1, nu1, nu2, nu2)) / 4.0)
        .expect("diagonal covariance");
    let s = if correlated { random_symplectic(rng) } else { random_local_symplectic(rng) };
    base.transformed(&s)
}
