//! Heterodyne conditioning in the standard-form frame and the peak test.

use num_complex::Complex64;

use super::StandardForm;
use crate::dv::Verdict;
use crate::error::{Error, Result};

const SINGULAR: f64 = 1e-12;

/// f(a, b, z) = (a − z²/(b + 4(ab − z²))) / (ab − z²): the inverse variance
/// of B's conditional Wigner function along the quadrature coupled by z.
pub fn f_coefficient(a: f64, b: f64, z: f64) -> f64 {
    let det = a * b - z * z;
    (a - z * z / (b + 4.0 * det)) / det
}

/// g(a, b, z) = 4z / (b + 4(ab − z²)).
pub fn g_coefficient(a: f64, b: f64, z: f64) -> f64 {
    4.0 * z / (b + 4.0 * (a * b - z * z))
}

fn require_regular(sf: &StandardForm) -> Result<()> {
    for z in [sf.c, sf.d] {
        let det = sf.a * sf.b - z * z;
        if det <= SINGULAR {
            return Err(Error::SingularConditioning(det));
        }
    }
    Ok(())
}

/// Single-mode Gaussian of B given a heterodyne outcome on A.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalGaussian {
    pub mean: [f64; 2],
    /// Diagonal in the standard-form frame: (1/f(a,b,c), 1/f(a,b,d)).
    pub cov: [[f64; 2]; 2],
}

impl ConditionalGaussian {
    pub fn peak(&self) -> Complex64 {
        Complex64::new(self.mean[0], self.mean[1])
    }

    /// Smallest eigenvalue of cov + (i/4)J:
    /// (v_x + v_p)/2 − sqrt(((v_x − v_p)/2)² + c_xp² + 1/16).
    pub fn min_uncertainty_eigenvalue(&self) -> f64 {
        let (vx, vp, cxp) = (self.cov[0][0], self.cov[1][1], self.cov[0][1]);
        let half_diff = 0.5 * (vx - vp);
        0.5 * (vx + vp) - (half_diff * half_diff + cxp * cxp + 1.0 / 16.0).sqrt()
    }
}

/// Condition on outcome x'₁ + i p'₁ of a heterodyne measurement on A.
pub fn heterodyne_condition(sf: &StandardForm, outcome: Complex64) -> Result<ConditionalGaussian> {
    require_regular(sf)?;
    let (fc, fd) = (f_coefficient(sf.a, sf.b, sf.c), f_coefficient(sf.a, sf.b, sf.d));
    let (gc, gd) = (g_coefficient(sf.a, sf.b, sf.c), g_coefficient(sf.a, sf.b, sf.d));
    Ok(ConditionalGaussian { mean: [gc / fc * outcome.re, gd / fd * outcome.im], cov: [[1.0 / fc, 0.0], [0.0, 1.0 / fd]] })
}

/// γ = (g(a,b,c)/f(a,b,c)) x'₁ + i (g(a,b,d)/f(a,b,d)) p'₁.
pub fn peak(sf: &StandardForm, outcome: Complex64) -> Result<Complex64> {
    Ok(heterodyne_condition(sf, outcome)?.peak())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakTestResult {
    pub outcome_1: Complex64,
    pub outcome_2: Complex64,
    pub peak_1: Complex64,
    pub peak_2: Complex64,
    pub separation: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// Compare the conditional peaks for two outcomes that differ in both
/// quadratures; outcomes sharing a quadrature would be blind to c or d.
pub fn peak_coincidence_test(sf: &StandardForm, out1: Complex64, out2: Complex64, tol: f64) -> Result<PeakTestResult> {
    if out1.re == out2.re || out1.im == out2.im {
        return Err(Error::DegenerateOutcomes);
    }
    let (p1, p2) = (peak(sf, out1)?, peak(sf, out2)?);
    let separation = (p1 - p2).norm();
    Ok(PeakTestResult {
        outcome_1: out1,
        outcome_2: out2,
        peak_1: p1,
        peak_2: p2,
        separation,
        tolerance: tol,
        verdict: if separation > tol { Verdict::NonzeroDiscord } else { Verdict::ConsistentWithZero },
    })
}
