//! Two-mode Gaussian states in the quadrature ordering (x₁, p₁, x₂, p₂)
//! with vacuum variance 1/4.
//!
//! Zero discord from B to A holds exactly when the cross block C vanishes;
//! operationally, the peak of B's conditional Wigner function after a
//! heterodyne measurement on A moves with the outcome unless C = 0.

mod heterodyne;
mod random;
mod standard;

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

pub use heterodyne::{
    f_coefficient, g_coefficient, heterodyne_condition, peak, peak_coincidence_test, ConditionalGaussian,
    PeakTestResult,
};
pub use random::{random_local_symplectic, random_physical_state, random_symplectic};
pub use standard::{standard_form, LocalOps, StandardForm};

use crate::dv::Verdict;
use crate::eigen::hermitian_eig;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

pub const CONVENTION: &str = "vacuum-variance=1/4";
pub const PHYSICALITY_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_DECISION_TOLERANCE: f64 = 1e-9;

/// Ω = J ⊕ J with J = [[0, 1], [−1, 0]].
pub fn symplectic_form() -> Matrix4<f64> {
    let mut o = Matrix4::zeros();
    o[(0, 1)] = 1.0;
    o[(1, 0)] = -1.0;
    o[(2, 3)] = 1.0;
    o[(3, 2)] = -1.0;
    o
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianState {
    mean: Vector4<f64>,
    cov: Matrix4<f64>,
}

impl GaussianState {
    /// Rejects covariances that are not symmetric within 1e-12 or not finite;
    /// physicality is checked separately by [`validate_physical`].
    pub fn new(mean: Vector4<f64>, cov: Matrix4<f64>) -> Result<Self> {
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("non-finite Gaussian moments".into()));
        }
        let asym = (cov - cov.transpose()).abs().max();
        if asym > 1e-12 {
            return Err(Error::InvalidState(format!("covariance asymmetry {asym:e}")));
        }
        Ok(Self { mean, cov: (cov + cov.transpose()) * 0.5 })
    }

    pub fn centred(cov: Matrix4<f64>) -> Result<Self> {
        Self::new(Vector4::zeros(), cov)
    }

    pub fn vacuum() -> Self {
        Self { mean: Vector4::zeros(), cov: Matrix4::identity() * 0.25 }
    }

    /// Product of thermal states with mean photon numbers n₁, n₂.
    pub fn thermal_product(n1: f64, n2: f64) -> Self {
        let cov = Matrix4::from_diagonal(&Vector4::new(
            (2.0 * n1 + 1.0) / 4.0,
            (2.0 * n1 + 1.0) / 4.0,
            (2.0 * n2 + 1.0) / 4.0,
            (2.0 * n2 + 1.0) / 4.0,
        ));
        Self { mean: Vector4::zeros(), cov }
    }

    /// Two-mode squeezed vacuum: a = b = cosh 2r / 4, c = −d = sinh 2r / 4.
    pub fn tmsv(r: f64) -> Self {
        let (ch, sh) = ((2.0 * r).cosh() / 4.0, (2.0 * r).sinh() / 4.0);
        Self::from_standard(ch, ch, sh, -sh)
    }

    pub fn from_standard(a: f64, b: f64, c: f64, d: f64) -> Self {
        let mut cov = Matrix4::from_diagonal(&Vector4::new(a, a, b, b));
        cov[(0, 2)] = c;
        cov[(2, 0)] = c;
        cov[(1, 3)] = d;
        cov[(3, 1)] = d;
        Self { mean: Vector4::zeros(), cov }
    }

    pub fn mean(&self) -> &Vector4<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix4<f64> {
        &self.cov
    }

    pub fn block_a(&self) -> Matrix2<f64> {
        self.cov.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn block_b(&self) -> Matrix2<f64> {
        self.cov.fixed_view::<2, 2>(2, 2).into_owned()
    }

    pub fn block_c(&self) -> Matrix2<f64> {
        self.cov.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// S σ Sᵀ and S μ.
    pub fn transformed(&self, s: &Matrix4<f64>) -> Self {
        let cov = s * self.cov * s.transpose();
        Self { mean: s * self.mean, cov: (cov + cov.transpose()) * 0.5 }
    }

    /// Smallest eigenvalue of the Hermitian matrix σ + (i/4)Ω.
    pub fn min_uncertainty_eigenvalue(&self) -> f64 {
        let omega = symplectic_form();
        let m = ComplexMatrix::from_fn(4, 4, |i, j| Complex64::new(self.cov[(i, j)], omega[(i, j)] / 4.0));
        let eig = hermitian_eig(&m).expect("σ + iΩ/4 is Hermitian for symmetric σ");
        eig.values[3]
    }
}

/// σ + (i/4)Ω ⪰ −1e-10.
pub fn validate_physical(g: &GaussianState) -> bool {
    g.min_uncertainty_eigenvalue() >= -PHYSICALITY_TOLERANCE
}

fn require_physical(g: &GaussianState) -> Result<()> {
    let min = g.min_uncertainty_eigenvalue();
    if min < -PHYSICALITY_TOLERANCE {
        return Err(Error::Unphysical(min));
    }
    Ok(())
}

/// True iff every entry of the cross block C is at most `tol` in magnitude.
pub fn zero_discord_decision(g: &GaussianState, tol: f64) -> Result<bool> {
    require_physical(g)?;
    Ok(g.block_c().abs().max() <= tol)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecisionRoutes {
    /// max |C_ij| in the input frame.
    pub cross_block_max: f64,
    /// max(|c|, |d|) after reduction to standard form.
    pub standard_form_max: f64,
    pub original_frame: bool,
    pub standard_frame: bool,
}

impl DecisionRoutes {
    pub fn agree(&self) -> bool {
        self.original_frame == self.standard_frame
    }

    pub fn verdict(&self) -> Verdict {
        if self.original_frame { Verdict::ConsistentWithZero } else { Verdict::NonzeroDiscord }
    }
}

/// The C = 0 decision evaluated in the input frame and in the standard form.
pub fn zero_discord_routes(g: &GaussianState, tol: f64) -> Result<DecisionRoutes> {
    require_physical(g)?;
    let sf = standard_form(g)?;
    let cross_block_max = g.block_c().abs().max();
    let standard_form_max = sf.c.abs().max(sf.d.abs());
    Ok(DecisionRoutes {
        cross_block_max,
        standard_form_max,
        original_frame: cross_block_max <= tol,
        standard_frame: standard_form_max <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn physicality_examples() {
        assert!(validate_physical(&GaussianState::vacuum()));
        let sub = GaussianState::centred(Matrix4::identity() / 8.0).unwrap();
        assert!(!validate_physical(&sub));
        let t = GaussianState::tmsv(0.5);
        assert!(validate_physical(&t));
        // pure state: σ + iΩ/4 has a null vector
        assert!(t.min_uncertainty_eigenvalue().abs() < 1e-12);
        assert!((t.block_a()[(0, 0)] - 1f64.cosh() / 4.0).abs() < 1e-15);
        assert!((t.block_c()[(0, 0)] - 1f64.sinh() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn uncertainty_eigenvalues_of_single_mode_blocks() {
        // thermal product: eigenvalues (2n+1)/4 ± 1/4
        let g = GaussianState::thermal_product(1.0, 0.0);
        assert!((g.min_uncertainty_eigenvalue() - 0.0).abs() < 1e-15);
        let hot = GaussianState::thermal_product(1.0, 2.0);
        assert!((hot.min_uncertainty_eigenvalue() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rejects_asymmetric_covariance() {
        let mut cov = Matrix4::identity() * 0.25;
        cov[(0, 1)] = 1e-6;
        assert!(matches!(GaussianState::centred(cov), Err(Error::InvalidState(_))));
    }

    #[test]
    fn decisions() {
        assert!(zero_discord_decision(&GaussianState::thermal_product(0.3, 1.2), 1e-9).unwrap());
        for r in [1e-5, 0.1, 0.5, 1.0] {
            assert!(!zero_discord_decision(&GaussianState::tmsv(r), 1e-9).unwrap());
        }
        let sub = GaussianState::centred(Matrix4::identity() / 8.0).unwrap();
        assert!(matches!(zero_discord_decision(&sub, 1e-9), Err(Error::Unphysical(_))));
        let routes = zero_discord_routes(&GaussianState::tmsv(0.3), 1e-9).unwrap();
        assert!(routes.agree());
        assert_eq!(routes.verdict(), Verdict::NonzeroDiscord);
    }
}
