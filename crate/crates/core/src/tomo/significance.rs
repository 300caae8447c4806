use rayon::prelude::*;

use super::estimate::EstimatedEnsemble;
use super::{DEFAULT_BOOTSTRAP_RESAMPLES, DEFAULT_Z_THRESHOLD};
use crate::dv::{Verdict, DEFAULT_COMMUTATOR_THRESHOLD};
use crate::error::{Error, Result};
use crate::linalg::{commutator, hermitian_basis, ComplexMatrix};
use crate::random::stream;
use crate::state::DensityOperator;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignificanceOptions {
    pub z_threshold: f64,
    /// 0 disables the bootstrap.
    pub bootstrap_resamples: usize,
    pub bootstrap_seed: u64,
    /// With zero standard error, norms at or below this count as zero.
    pub commutator_threshold: f64,
}

impl Default for SignificanceOptions {
    fn default() -> Self {
        Self {
            z_threshold: DEFAULT_Z_THRESHOLD,
            bootstrap_resamples: DEFAULT_BOOTSTRAP_RESAMPLES,
            bootstrap_seed: 0,
            commutator_threshold: DEFAULT_COMMUTATOR_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignificantVerdict {
    pub verdict: Verdict,
    /// Largest commutator norm over all pairs.
    pub max_norm: f64,
    /// Delta-method standard error of the norm at `witness_pair`.
    pub norm_stderr: f64,
    /// Bootstrap standard error at `witness_pair`; `None` if disabled.
    pub bootstrap_stderr: Option<f64>,
    /// max over pairs of norm / stderr; +∞ for a nonzero norm with zero stderr.
    pub z_score: f64,
    pub z_threshold: f64,
    /// Pair attaining `z_score`.
    pub witness_pair: (usize, usize),
    pub witness_norm: f64,
    pub pairs: usize,
}

struct PairStat {
    pair: (usize, usize),
    norm: f64,
    stderr: f64,
    z: f64,
}

/// Gradient of ‖[X, Y]‖_F with respect to the Hermitian coordinates of X,
/// with the other argument held fixed: Re Tr(C† [E_α, Y]) / ‖C‖.
fn norm_gradient(c: &ComplexMatrix, norm: f64, y: &ComplexMatrix, basis: &[ComplexMatrix], left: bool) -> Vec<f64> {
    basis
        .iter()
        .map(|e| {
            let dc = if left { commutator(e, y) } else { commutator(y, e) }.expect("matching dimensions");
            c.inner(&dc).re / norm
        })
        .collect()
}

fn quadratic(g: &[f64], cov: &nalgebra::DMatrix<f64>) -> f64 {
    let mut s = 0.0;
    for a in 0..g.len() {
        for b in 0..g.len() {
            s += g[a] * cov[(a, b)] * g[b];
        }
    }
    s.max(0.0)
}

pub fn significant_commutativity(e: &EstimatedEnsemble, z_threshold: f64) -> Result<SignificantVerdict> {
    significant_commutativity_with(e, &SignificanceOptions { z_threshold, ..Default::default() })
}

/// Commutator norms of all pairs of estimated conditional states, each with
/// a first-order propagated standard error. The verdict is nonzero discord
/// exactly when the largest z-score exceeds the threshold.
pub fn significant_commutativity_with(e: &EstimatedEnsemble, opts: &SignificanceOptions) -> Result<SignificantVerdict> {
    let present = e.present();
    if present.len() < 2 {
        return Err(Error::InsufficientOutcomes(present.len()));
    }
    let d = e.povm_b.dim();
    let basis = hermitian_basis(d);
    let pairs: Vec<(usize, usize)> =
        present.iter().enumerate().flat_map(|(a, &i)| present[a + 1..].iter().map(move |&j| (i, j))).collect();

    let stats: Vec<PairStat> = pairs
        .iter()
        .map(|&(i, j)| {
            let ci = e.conditionals[i].as_ref().expect("present");
            let cj = e.conditionals[j].as_ref().expect("present");
            let (x, y) = (ci.state.matrix(), cj.state.matrix());
            let c = commutator(x, y)?;
            let norm = c.frobenius_norm();
            let var = if norm > 0.0 {
                quadratic(&norm_gradient(&c, norm, y, &basis, true), &ci.coord_cov)
                    + quadratic(&norm_gradient(&c, norm, x, &basis, false), &cj.coord_cov)
            } else {
                0.0
            };
            let stderr = var.sqrt();
            let z = if stderr > 0.0 {
                norm / stderr
            } else if norm > opts.commutator_threshold {
                f64::INFINITY
            } else {
                0.0
            };
            Ok(PairStat { pair: (i, j), norm, stderr, z })
        })
        .collect::<Result<_>>()?;

    // first maximum in pair order wins
    let mut best = &stats[0];
    for s in &stats[1..] {
        if s.z > best.z {
            best = s;
        }
    }
    let max_norm = stats.iter().map(|s| s.norm).fold(0.0, f64::max);

    let bootstrap_stderr = if opts.bootstrap_resamples >= 2 && e.total.is_finite() {
        Some(bootstrap_norm_stderr(e, best.pair, opts)?)
    } else {
        None
    };

    let verdict = if best.z > opts.z_threshold { Verdict::NonzeroDiscord } else { Verdict::ConsistentWithZero };
    Ok(SignificantVerdict {
        verdict,
        max_norm,
        norm_stderr: best.stderr,
        bootstrap_stderr,
        z_score: best.z,
        z_threshold: opts.z_threshold,
        witness_pair: best.pair,
        witness_norm: best.norm,
        pairs: stats.len(),
    })
}

/// Sample standard deviation of the pair's commutator norm over parametric
/// resamples; resample b uses stream b of the bootstrap seed.
fn bootstrap_norm_stderr(e: &EstimatedEnsemble, pair: (usize, usize), opts: &SignificanceOptions) -> Result<f64> {
    let norms: Vec<f64> = (0..opts.bootstrap_resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(opts.bootstrap_seed, b as u64);
            let states: Vec<Option<DensityOperator>> = e.resample(&mut rng)?;
            let (x, y) = (states[pair.0].as_ref().expect("present"), states[pair.1].as_ref().expect("present"));
            Ok(commutator(x.matrix(), y.matrix())?.frobenius_norm())
        })
        .collect::<Result<_>>()?;
    let n = norms.len() as f64;
    let mean = norms.iter().sum::<f64>() / n;
    Ok((norms.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt())
}
