//! Brute-force discord from B to A for two qubits, minimising over
//! projective measurements on B.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::bloch_operator;
use crate::state::{apply_effect_trace_b, entropy_bits, DensityOperator, Subsystem};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorOptions {
    pub theta_points: usize,
    pub phi_points: usize,
    /// Compass-search halvings after the grid minimum.
    pub descent_steps: usize,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self { theta_points: 64, phi_points: 128, descent_steps: 40 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscordEstimate {
    /// Bits.
    pub discord: f64,
    pub theta: f64,
    pub phi: f64,
    /// Minimised Σ_j p_j S(ρ_{A|j}).
    pub conditional_entropy: f64,
}

pub fn discord_estimate_2q(rho: &DensityOperator) -> Result<f64> {
    Ok(discord_estimate_2q_with(rho, EstimatorOptions::default())?.discord)
}

/// Entropies of 2×2 Hermitian matrices have a closed form in trace and
/// determinant; the joint entropy goes through the eigensolver.
fn qubit_entropy_unnormalised(m: &crate::linalg::ComplexMatrix) -> (f64, f64) {
    let p = (m[(0, 0)].re + m[(1, 1)].re).max(0.0);
    if p <= 1e-15 {
        return (0.0, 0.0);
    }
    let det = (m[(0, 0)].re * m[(1, 1)].re - m[(0, 1)].norm_sqr()) / (p * p);
    let disc = (0.25 - det).max(0.0).sqrt();
    (p, entropy_bits(&[0.5 + disc, 0.5 - disc]))
}

fn conditional_entropy(rho: &DensityOperator, theta: f64, phi: f64) -> f64 {
    let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
    [1.0, -1.0]
        .iter()
        .map(|&s| {
            let proj = bloch_operator(0.5, [0.5 * s * n[0], 0.5 * s * n[1], 0.5 * s * n[2]]);
            let (p, h) = qubit_entropy_unnormalised(&apply_effect_trace_b(rho.matrix(), &proj, 2, 2));
            p * h
        })
        .sum()
}

pub fn discord_estimate_2q_with(rho: &DensityOperator, opts: EstimatorOptions) -> Result<DiscordEstimate> {
    if rho.bipartition() != Some((2, 2)) {
        return Err(Error::BadDimension(format!("two-qubit estimator needs a 2x2 bipartition, got {:?}", rho.bipartition())));
    }
    if opts.theta_points < 2 || opts.phi_points < 1 {
        return Err(Error::BadDimension("estimator grid too small".into()));
    }
    let s_b = rho.partial_trace(Subsystem::A)?.entropy_bits();
    let s_ab = rho.entropy_bits();

    let dtheta = PI / (opts.theta_points - 1) as f64;
    let dphi = 2.0 * PI / opts.phi_points as f64;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..opts.theta_points {
        for j in 0..opts.phi_points {
            let (t, f) = (i as f64 * dtheta, j as f64 * dphi);
            let h = conditional_entropy(rho, t, f);
            if h < best.0 {
                best = (h, t, f);
            }
        }
    }

    let (mut st, mut sf) = (dtheta, dphi);
    for _ in 0..opts.descent_steps {
        let mut moved = false;
        for (dt, df) in [(st, 0.0), (-st, 0.0), (0.0, sf), (0.0, -sf)] {
            let (t, f) = (best.1 + dt, best.2 + df);
            let h = conditional_entropy(rho, t, f);
            if h < best.0 {
                best = (h, t, f);
                moved = true;
            }
        }
        if !moved {
            st *= 0.5;
            sf *= 0.5;
        }
    }

    Ok(DiscordEstimate { discord: (s_b - s_ab + best.0).max(0.0), theta: best.1, phi: best.2, conditional_entropy: best.0 })
}
