use nalgebra::DMatrix;
use rand_distr::{Binomial, Distribution};

use super::ShotRecord;
use crate::dv::ConditionalEnsemble;
use crate::eigen::hermitian_eig;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_basis, hermitian_coords, ComplexMatrix};
use crate::povm::{DualFrame, Povm};
use crate::random::QRng;
use crate::state::DensityOperator;

/// Frobenius-nearest density matrix: eigenvalues projected onto the
/// probability simplex, eigenvectors kept.
pub fn project_to_density(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(&m.hermitian_part())?;
    // sorted descending already; standard simplex projection threshold
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &v) in eig.values.iter().enumerate() {
        cum += v;
        let t = (cum - 1.0) / (j + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    Ok(eig.reconstruct_with(|l| (l - theta).max(0.0)).hermitian_part())
}

/// Estimate of one conditional state ρ_{B|k}.
#[derive(Clone, Debug)]
pub struct EstimatedConditional {
    /// Row total n(k, ·); infinite for exact input.
    pub count: f64,
    /// n(k, m) / n(k, ·).
    pub frequencies: Vec<f64>,
    /// Σ_m q_m N_m before projection.
    pub linear: ComplexMatrix,
    pub state: DensityOperator,
    /// Covariance of the linear estimate's coordinates in the orthonormal
    /// Hermitian basis, from the multinomial covariance of the frequencies.
    pub coord_cov: DMatrix<f64>,
}

impl EstimatedConditional {
    fn build(count: f64, frequencies: Vec<f64>, duals: &DualFrame, dual_coords: &[Vec<f64>]) -> Result<Self> {
        let linear = duals.combine(&frequencies).hermitian_part();
        let state = DensityOperator::new(project_to_density(&linear)?)?;
        let n2 = dual_coords[0].len();
        let mut coord_cov = DMatrix::<f64>::zeros(n2, n2);
        if count.is_finite() {
            let mean: Vec<f64> =
                (0..n2).map(|a| frequencies.iter().zip(dual_coords).map(|(q, c)| q * c[a]).sum()).collect();
            for a in 0..n2 {
                for b in 0..n2 {
                    let second: f64 = frequencies.iter().zip(dual_coords).map(|(q, c)| q * c[a] * c[b]).sum();
                    coord_cov[(a, b)] = (second - mean[a] * mean[b]) / count;
                }
            }
        }
        Ok(Self { count, frequencies, linear, state, coord_cov })
    }

    /// Standard errors of Re and Im of each entry of the linear estimate.
    pub fn entry_stderr(&self) -> Vec<Vec<(f64, f64)>> {
        let d = self.state.dim();
        let basis = hermitian_basis(d);
        let quad = |v: &[f64]| -> f64 {
            let mut s = 0.0;
            for a in 0..v.len() {
                for b in 0..v.len() {
                    s += v[a] * self.coord_cov[(a, b)] * v[b];
                }
            }
            s.max(0.0).sqrt()
        };
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let re: Vec<f64> = basis.iter().map(|e| e[(i, j)].re).collect();
                        let im: Vec<f64> = basis.iter().map(|e| e[(i, j)].im).collect();
                        (quad(&re), quad(&im))
                    })
                    .collect()
            })
            .collect()
    }
}

/// Conditional-state estimates for every outcome on A, with the data needed
/// to propagate and resample their uncertainty.
#[derive(Clone, Debug)]
pub struct EstimatedEnsemble {
    pub povm_a: Povm,
    pub povm_b: Povm,
    pub duals_b: DualFrame,
    /// p̂_k = n(k, ·)/N.
    pub probabilities: Vec<f64>,
    pub conditionals: Vec<Option<EstimatedConditional>>,
    /// Total shots; infinite for exact input.
    pub total: f64,
}

impl EstimatedEnsemble {
    pub fn present(&self) -> Vec<usize> {
        (0..self.conditionals.len()).filter(|&k| self.conditionals[k].is_some()).collect()
    }

    pub fn to_conditional_ensemble(&self) -> Result<ConditionalEnsemble> {
        ConditionalEnsemble::from_parts(
            self.probabilities.clone(),
            self.conditionals.iter().map(|c| c.as_ref().map(|c| c.state.clone())).collect(),
            self.povm_a.clone(),
        )
    }

    /// Parametric resample: each present row redrawn from its estimated
    /// frequencies with the same row total.
    pub(crate) fn resample(&self, rng: &mut QRng) -> Result<Vec<Option<DensityOperator>>> {
        let dual_coords = dual_coordinates(&self.duals_b);
        self.conditionals
            .iter()
            .map(|c| {
                let Some(c) = c else { return Ok(None) };
                let n = c.count as u64;
                let mut counts = vec![0u64; c.frequencies.len()];
                let (mut remaining, mut mass) = (n, 1.0);
                for (i, &q) in c.frequencies.iter().enumerate() {
                    if i + 1 == counts.len() {
                        counts[i] = remaining;
                        break;
                    }
                    let rel = if mass > 0.0 { (q / mass).clamp(0.0, 1.0) } else { 0.0 };
                    let x = Binomial::new(remaining, rel).expect("probability in [0, 1]").sample(rng);
                    counts[i] = x;
                    remaining -= x;
                    mass -= q;
                }
                let freqs: Vec<f64> = counts.iter().map(|&x| x as f64 / n as f64).collect();
                Ok(Some(EstimatedConditional::build(n as f64, freqs, &self.duals_b, &dual_coords)?.state))
            })
            .collect()
    }
}

fn dual_coordinates(duals: &DualFrame) -> Vec<Vec<f64>> {
    let d = duals.operator(0).rows();
    let basis = hermitian_basis(d);
    duals.operators().iter().map(|n| hermitian_coords(&n.hermitian_part(), &basis)).collect()
}

fn check_duals(povm_b: &Povm, duals_b: &DualFrame) -> Result<()> {
    if duals_b.len() != povm_b.len() || duals_b.operator(0).rows() != povm_b.dim() {
        return Err(Error::DimMismatch("dual frame does not match the POVM on B".into()));
    }
    Ok(())
}

/// Linear inversion of each row of the count table through the dual frame
/// of the B measurement, followed by projection onto density matrices.
/// Rows with no counts are marked absent.
pub fn estimate_conditionals(rec: &ShotRecord, duals_b: &DualFrame) -> Result<EstimatedEnsemble> {
    check_duals(&rec.povm_b, duals_b)?;
    let dual_coords = dual_coordinates(duals_b);
    let total = rec.total as f64;
    let mut probabilities = Vec::with_capacity(rec.counts.len());
    let mut conditionals = Vec::with_capacity(rec.counts.len());
    for row in &rec.counts {
        let n: u64 = row.iter().sum();
        probabilities.push(if rec.total > 0 { n as f64 / total } else { 0.0 });
        if n == 0 {
            conditionals.push(None);
            continue;
        }
        let freqs: Vec<f64> = row.iter().map(|&x| x as f64 / n as f64).collect();
        conditionals.push(Some(EstimatedConditional::build(n as f64, freqs, duals_b, &dual_coords)?));
    }
    Ok(EstimatedEnsemble {
        povm_a: rec.povm_a.clone(),
        povm_b: rec.povm_b.clone(),
        duals_b: duals_b.clone(),
        probabilities,
        conditionals,
        total,
    })
}

/// The infinite-shot limit: exact joint probabilities in place of counts,
/// with zero covariance.
pub fn estimate_from_probabilities(
    joint: &[Vec<f64>],
    povm_a: &Povm,
    povm_b: &Povm,
    duals_b: &DualFrame,
) -> Result<EstimatedEnsemble> {
    check_duals(povm_b, duals_b)?;
    if joint.len() != povm_a.len() || joint.iter().any(|r| r.len() != povm_b.len()) {
        return Err(Error::DimMismatch("probability table does not match the POVMs".into()));
    }
    let dual_coords = dual_coordinates(duals_b);
    let mut probabilities = Vec::with_capacity(joint.len());
    let mut conditionals = Vec::with_capacity(joint.len());
    for row in joint {
        let p: f64 = row.iter().sum();
        probabilities.push(p);
        if p <= crate::dv::ZERO_PROBABILITY_FLOOR {
            conditionals.push(None);
            continue;
        }
        let freqs: Vec<f64> = row.iter().map(|x| x / p).collect();
        conditionals.push(Some(EstimatedConditional::build(f64::INFINITY, freqs, duals_b, &dual_coords)?));
    }
    Ok(EstimatedEnsemble {
        povm_a: povm_a.clone(),
        povm_b: povm_b.clone(),
        duals_b: duals_b.clone(),
        probabilities,
        conditionals,
        total: f64::INFINITY,
    })
}
