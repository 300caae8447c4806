use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{tensor, ComplexMatrix};
use crate::random::{dirichlet_flat, random_density_matrix, random_unitary, seeded};
use crate::state::DensityOperator;

/// Σ_j p_j ρ_j ⊗ |j⟩⟨j| with random weights, random ρ_j on A and a random
/// orthonormal pointer basis {|j⟩} on B.
pub fn generate_zero_discord(dim_a: usize, dim_b: usize, seed: u64) -> Result<DensityOperator> {
    if dim_a < 2 || dim_b < 2 {
        return Err(Error::BadDimension(format!("zero-discord generator needs dimensions ≥ 2, got {dim_a}x{dim_b}")));
    }
    let mut rng = seeded(seed);
    let weights = dirichlet_flat(dim_b, &mut rng);
    let u = random_unitary(dim_b, &mut rng);
    let n = dim_a * dim_b;
    let mut joint = ComplexMatrix::zeros(n, n);
    for (j, &p) in weights.iter().enumerate() {
        let rho_j = random_density_matrix(dim_a, &mut rng);
        let pointer = ComplexMatrix::projector(&u.column(j));
        joint += &tensor(&rho_j, &pointer).scale_real(p);
    }
    DensityOperator::bipartite(joint.hermitian_part(), dim_a, dim_b)
}

/// Σ_j |j⟩|j⟩ / √d as a density operator on C^d ⊗ C^d.
pub fn generate_maximally_entangled(d: usize) -> Result<DensityOperator> {
    if d < 2 {
        return Err(Error::BadDimension(format!("maximally entangled state needs d ≥ 2, got {d}")));
    }
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut psi = vec![Complex64::new(0.0, 0.0); d * d];
    for j in 0..d {
        psi[j * d + j] = amp;
    }
    DensityOperator::pure_bipartite(&psi, d, d)
}
