//! Finite-shot simulation of joint IC-POVM measurements, linear-inversion
//! estimates of the conditional states, and significance of their
//! commutators.

mod estimate;
mod significance;

use rand_distr::{Binomial, Distribution};

pub use estimate::{
    estimate_conditionals, estimate_from_probabilities, project_to_density, EstimatedConditional, EstimatedEnsemble,
};
pub use significance::{significant_commutativity, significant_commutativity_with, SignificanceOptions, SignificantVerdict};

use crate::error::{Error, Result};
use crate::linalg::tensor;
use crate::povm::Povm;
use crate::random::seeded;
use crate::state::DensityOperator;

pub const DEFAULT_Z_THRESHOLD: f64 = 5.0;
pub const DEFAULT_BOOTSTRAP_RESAMPLES: usize = 100;

/// Joint outcome counts n(k, m) for effects M_k on A and M_m on B.
#[derive(Clone, Debug, PartialEq)]
pub struct ShotRecord {
    pub povm_a: Povm,
    pub povm_b: Povm,
    pub counts: Vec<Vec<u64>>,
    pub total: u64,
    pub seed: u64,
}

impl ShotRecord {
    /// Checks shape against the POVMs and that the counts sum to `total`.
    pub fn new(povm_a: Povm, povm_b: Povm, counts: Vec<Vec<u64>>, total: u64, seed: u64) -> Result<Self> {
        if counts.len() != povm_a.len() || counts.iter().any(|r| r.len() != povm_b.len()) {
            return Err(Error::DimMismatch(format!(
                "count table must be {}x{}",
                povm_a.len(),
                povm_b.len()
            )));
        }
        let sum: u64 = counts.iter().flatten().sum();
        if sum != total {
            return Err(Error::InvalidState(format!("counts sum to {sum}, record says {total}")));
        }
        Ok(Self { povm_a, povm_b, counts, total, seed })
    }

    pub fn row_total(&self, k: usize) -> u64 {
        self.counts[k].iter().sum()
    }
}

/// Born probabilities p(k, m) = Tr[(M_k ⊗ M_m) ρ], clipped at zero and renormalised.
pub fn joint_probabilities(rho: &DensityOperator, povm_a: &Povm, povm_b: &Povm) -> Result<Vec<Vec<f64>>> {
    let (da, db) = rho.require_bipartition()?;
    if povm_a.dim() != da || povm_b.dim() != db {
        return Err(Error::DimMismatch(format!(
            "POVMs act on {}x{}, state is {da}x{db}",
            povm_a.dim(),
            povm_b.dim()
        )));
    }
    let mut p: Vec<Vec<f64>> = povm_a
        .effects()
        .iter()
        .map(|ma| {
            povm_b
                .effects()
                .iter()
                .map(|mb| tensor(ma, mb).trace_product(rho.matrix()).re.max(0.0))
                .collect()
        })
        .collect();
    let total: f64 = p.iter().flatten().sum();
    for v in p.iter_mut().flatten() {
        *v /= total;
    }
    Ok(p)
}

/// Multinomial draw over the joint outcomes, by sequential binomials in
/// row-major cell order.
pub fn sample_joint(rho: &DensityOperator, povm_a: &Povm, povm_b: &Povm, shots: u64, seed: u64) -> Result<ShotRecord> {
    let p = joint_probabilities(rho, povm_a, povm_b)?;
    let mut rng = seeded(seed);
    let flat: Vec<f64> = p.iter().flatten().copied().collect();
    let mut counts = vec![0u64; flat.len()];
    let mut remaining = shots;
    let mut mass = 1.0;
    for (i, &pi) in flat.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == flat.len() {
            counts[i] = remaining;
            break;
        }
        let q = if mass > 0.0 { (pi / mass).clamp(0.0, 1.0) } else { 0.0 };
        let x = Binomial::new(remaining, q).expect("probability in [0, 1]").sample(&mut rng);
        counts[i] = x;
        remaining -= x;
        mass -= pi;
    }
    let nb = povm_b.len();
    let table = counts.chunks(nb).map(<[u64]>::to_vec).collect();
    ShotRecord::new(povm_a.clone(), povm_b.clone(), table, shots, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::sic_qubit;
    use crate::random::random_density_matrix;

    fn product(seed: u64) -> DensityOperator {
        let mut rng = seeded(seed);
        let a = DensityOperator::new(random_density_matrix(2, &mut rng)).unwrap();
        let b = DensityOperator::new(random_density_matrix(2, &mut rng)).unwrap();
        DensityOperator::product(&a, &b)
    }

    #[test]
    fn zero_shots_give_an_empty_record() {
        let rec = sample_joint(&product(1), &sic_qubit(), &sic_qubit(), 0, 3).unwrap();
        assert_eq!(rec.total, 0);
        assert!(rec.counts.iter().flatten().all(|&c| c == 0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let rho = product(2);
        let a = sample_joint(&rho, &sic_qubit(), &sic_qubit(), 10_000, 9).unwrap();
        let b = sample_joint(&rho, &sic_qubit(), &sic_qubit(), 10_000, 9).unwrap();
        let c = sample_joint(&rho, &sic_qubit(), &sic_qubit(), 10_000, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.counts, c.counts);
        assert_eq!(a.counts.iter().flatten().sum::<u64>(), 10_000);
    }

    #[test]
    fn frequencies_match_born_rule() {
        let rho = product(4);
        let n = 1_000_000u64;
        let p = joint_probabilities(&rho, &sic_qubit(), &sic_qubit()).unwrap();
        let rec = sample_joint(&rho, &sic_qubit(), &sic_qubit(), n, 5).unwrap();
        let mut within = 0;
        for k in 0..4 {
            for m in 0..4 {
                let pk = p[k][m];
                let stderr = (pk * (1.0 - pk) / n as f64).sqrt();
                if ((rec.counts[k][m] as f64 / n as f64) - pk).abs() <= 5.0 * stderr {
                    within += 1;
                }
            }
        }
        assert!(within >= 15);
    }

    #[test]
    fn record_validation() {
        let povm = sic_qubit();
        assert!(matches!(ShotRecord::new(povm.clone(), povm.clone(), vec![vec![1; 4]; 3], 12, 0), Err(Error::DimMismatch(_))));
        assert!(matches!(ShotRecord::new(povm.clone(), povm, vec![vec![1; 4]; 4], 15, 0), Err(Error::InvalidState(_))));
        let rho = crate::dv::generate_maximally_entangled(3).unwrap();
        assert!(matches!(sample_joint(&rho, &sic_qubit(), &sic_qubit(), 10, 0), Err(Error::DimMismatch(_))));
    }
}
