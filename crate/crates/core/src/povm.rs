//! Informationally complete POVMs and their canonical dual frames.
//!
//! The dual frame {N_k} satisfies ρ = Σ_k N_k Tr[M_k ρ] for every operator ρ.
//! It is computed from the frame superoperator F = Σ_k |M_k⟩⟩⟨⟨M_k|,
//! expressed as a real symmetric matrix in an orthonormal Hermitian basis,
//! as N_k = F⁺ M_k.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::eigen::hermitian_eig;
use crate::error::{Error, Result};
use crate::linalg::{bloch_operator, hermitian_basis, hermitian_coords, ComplexMatrix};
use crate::random::{random_hermitian, seeded};
use crate::state::DensityOperator;

/// Relative singular-value cutoff for ranks and pseudoinverses.
pub const RANK_CUTOFF: f64 = 1e-10;

const RESAMPLE_ATTEMPTS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    dim: usize,
    effects: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = effects.first().map(ComplexMatrix::rows).ok_or_else(|| Error::InvalidPovm("no effects".into()))?;
        let mut total = ComplexMatrix::zeros(dim, dim);
        for (k, e) in effects.iter().enumerate() {
            if e.rows() != dim || e.cols() != dim {
                return Err(Error::DimMismatch(format!("effect {k} is {}x{}, expected {dim}x{dim}", e.rows(), e.cols())));
            }
            let herm = e.hermitian_defect();
            if herm > 1e-12 {
                return Err(Error::InvalidPovm(format!("effect {k} not Hermitian ({herm:.2e})")));
            }
            let min = *hermitian_eig(e)?.values.last().unwrap();
            if min < -1e-10 {
                return Err(Error::InvalidPovm(format!("effect {k} has eigenvalue {min:.2e}")));
            }
            total += e;
        }
        let defect = total.distance(&ComplexMatrix::identity(dim));
        if defect > 1e-10 {
            return Err(Error::InvalidPovm(format!("effects sum to identity only within {defect:.2e}")));
        }
        Ok(Self { dim, effects })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn effect(&self, k: usize) -> &ComplexMatrix {
        &self.effects[k]
    }

    pub fn probabilities(&self, rho: &DensityOperator) -> Result<Vec<f64>> {
        if rho.dim() != self.dim {
            return Err(Error::DimMismatch(format!("POVM on dimension {} vs state dimension {}", self.dim, rho.dim())));
        }
        Ok(self.effects.iter().map(|m| m.trace_product(rho.matrix()).re).collect())
    }
}

/// Bloch vectors of the qubit SIC (regular tetrahedron).
pub fn tetrahedron() -> [[f64; 3]; 4] {
    let s = 1.0 / 3f64.sqrt();
    [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]]
}

/// Qubit SIC-POVM: M_k = ½|ψ_k⟩⟨ψ_k| = (I + n_k·σ)/4.
pub fn sic_qubit() -> Povm {
    let effects = tetrahedron().iter().map(|&n| bloch_operator(0.25, n.map(|x| 0.25 * x))).collect();
    Povm { dim: 2, effects }
}

/// Default IC-POVM for a subsystem: SIC on a qubit, otherwise a seeded random one.
pub fn default_ic_povm(dim: usize, seed: u64) -> Result<Povm> {
    if dim == 2 {
        Ok(sic_qubit())
    } else {
        random_ic_povm(dim, seed)
    }
}

/// A d²-outcome IC-POVM: perturbed copies of I/d², clipped to PSD and
/// symmetrically renormalised so that Σ_k M_k = I.
pub fn random_ic_povm(dim: usize, seed: u64) -> Result<Povm> {
    if dim < 2 {
        return Err(Error::BadDimension(format!("IC-POVM needs dim >= 2, got {dim}")));
    }
    let mut rng = seeded(seed);
    for _ in 0..RESAMPLE_ATTEMPTS {
        if let Some(p) = draw_povm(dim, &mut rng)? {
            if is_informationally_complete(&p) {
                return Ok(p);
            }
        }
    }
    Err(Error::CompletenessFailure(RESAMPLE_ATTEMPTS))
}

fn draw_povm<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Option<Povm>> {
    let n = dim * dim;
    let eye = ComplexMatrix::identity(dim);
    let mut raw = Vec::with_capacity(n);
    for _ in 0..n {
        let mut h = random_hermitian(dim, rng);
        let shift = h.trace().re / dim as f64;
        h.axpy(Complex64::new(-shift, 0.0), &eye);
        let e = hermitian_eig(&h)?;
        let spread = e.values[0].abs().max(e.values[dim - 1].abs());
        // smallest eigenvalue lands just below -1, so clipping leaves a rank-deficient effect
        let scaled = h.scale_real(1.2 / spread);
        let effect = hermitian_eig(&(&eye + &scaled))?.reconstruct_with(|l| l.max(0.0)).scale_real(1.0 / n as f64);
        raw.push(effect);
    }
    let mut total = ComplexMatrix::zeros(dim, dim);
    for e in &raw {
        total += e;
    }
    let te = hermitian_eig(&total)?;
    if *te.values.last().unwrap() <= RANK_CUTOFF * te.values[0] {
        return Ok(None);
    }
    let inv_sqrt = te.reconstruct_with(|l| 1.0 / l.sqrt());
    let effects = raw.iter().map(|e| (&(&inv_sqrt * e) * &inv_sqrt).hermitian_part()).collect();
    Ok(Some(Povm { dim, effects }))
}

/// Gram matrix G_jk = Tr[M_j† M_k] (real symmetric for Hermitian effects).
fn gram(p: &Povm) -> DMatrix<f64> {
    let n = p.len();
    DMatrix::from_fn(n, n, |j, k| p.effects[j].inner(&p.effects[k]).re)
}

/// Numerical rank of the effects as vectors in operator space.
pub fn operator_rank(p: &Povm) -> usize {
    let sv = gram(p).symmetric_eigenvalues();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > RANK_CUTOFF * max).count()
}

pub fn is_informationally_complete(p: &Povm) -> bool {
    operator_rank(p) >= p.dim * p.dim
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualFrame {
    operators: Vec<ComplexMatrix>,
}

impl DualFrame {
    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn operator(&self, k: usize) -> &ComplexMatrix {
        &self.operators[k]
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Σ_k N_k w_k
    pub fn combine(&self, weights: &[f64]) -> ComplexMatrix {
        let d = self.operators[0].rows();
        let mut out = ComplexMatrix::zeros(d, d);
        for (n, &w) in self.operators.iter().zip(weights) {
            out.axpy(Complex64::new(w, 0.0), n);
        }
        out
    }

    /// Σ_k N_k Tr[M_k X]
    pub fn reconstruct(&self, povm: &Povm, x: &ComplexMatrix) -> ComplexMatrix {
        let d = povm.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for (n, m) in self.operators.iter().zip(povm.effects()) {
            out.axpy(m.trace_product(x), n);
        }
        out
    }
}

pub fn dual_frame(p: &Povm) -> Result<DualFrame> {
    let d = p.dim();
    let rank = operator_rank(p);
    if rank < d * d {
        return Err(Error::NotInformationallyComplete { rank, required: d * d });
    }
    let basis = hermitian_basis(d);
    let coords: Vec<Vec<f64>> = p.effects.iter().map(|m| hermitian_coords(m, &basis)).collect();
    let dd = d * d;
    let mut frame = DMatrix::<f64>::zeros(dd, dd);
    for c in &coords {
        for a in 0..dd {
            for b in 0..dd {
                frame[(a, b)] += c[a] * c[b];
            }
        }
    }
    let eig = frame.symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let inv = DMatrix::<f64>::from_fn(dd, dd, |a, b| {
        (0..dd)
            .filter(|&k| eig.eigenvalues[k] > RANK_CUTOFF * max)
            .map(|k| eig.eigenvectors[(a, k)] * eig.eigenvectors[(b, k)] / eig.eigenvalues[k])
            .sum::<f64>()
    });
    let operators = coords
        .iter()
        .map(|c| {
            let mut n = ComplexMatrix::zeros(d, d);
            for a in 0..dd {
                let w: f64 = (0..dd).map(|b| inv[(a, b)] * c[b]).sum();
                n.axpy(Complex64::new(w, 0.0), &basis[a]);
            }
            n
        })
        .collect();
    Ok(DualFrame { operators })
}
