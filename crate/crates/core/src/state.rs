//! Density operators on finite-dimensional, optionally bipartite, Hilbert spaces.
//!
//! Subsystem A is the first (slow) tensor factor, B the second.

use num_complex::Complex64;

use crate::eigen::{hermitian_eig, EigenDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ZERO};

/// Validation tolerances. Structural checks (Hermiticity, trace) use
/// `structural`; spectral checks (PSD, eigen residuals) use `spectral`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub structural: f64,
    pub spectral: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { structural: 1e-12, spectral: 1e-10 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    bipartition: Option<(usize, usize)>,
}

impl DensityOperator {
    /// Validates with default tolerances.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, None, Tolerances::default())
    }

    pub fn bipartite(matrix: ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        Self::with_tolerances(matrix, Some((dim_a, dim_b)), Tolerances::default())
    }

    pub fn with_tolerances(
        matrix: ComplexMatrix,
        bipartition: Option<(usize, usize)>,
        tol: Tolerances,
    ) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState(format!("{}x{} matrix is not square", matrix.rows(), matrix.cols())));
        }
        if let Some((da, db)) = bipartition {
            if da * db != matrix.rows() {
                return Err(Error::DimMismatch(format!(
                    "bipartition {da}x{db} does not match dimension {}",
                    matrix.rows()
                )));
            }
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let herm = matrix.hermitian_defect();
        if herm > tol.structural {
            return Err(Error::InvalidState(format!("Hermitian defect {herm:.3e}")));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > tol.structural {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min_eig = *hermitian_eig(&matrix)?.values.last().unwrap_or(&0.0);
        if min_eig < -tol.spectral {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { matrix, bipartition })
    }

    /// For matrices that are valid by construction (Hermitised and trace
    /// normalised by the caller).
    pub(crate) fn from_parts_unchecked(matrix: ComplexMatrix, bipartition: Option<(usize, usize)>) -> Self {
        Self { matrix, bipartition }
    }

    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        Ok(Self::from_parts_unchecked(ComplexMatrix::projector(psi).scale_real(1.0 / norm).hermitian_part(), None))
    }

    pub fn pure_bipartite(psi: &[Complex64], dim_a: usize, dim_b: usize) -> Result<Self> {
        Self::pure(psi)?.with_bipartition(dim_a, dim_b)
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::from_parts_unchecked(ComplexMatrix::identity(d).scale_real(1.0 / d as f64), None)
    }

    pub fn with_bipartition(mut self, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a * dim_b != self.dim() {
            return Err(Error::DimMismatch(format!("bipartition {dim_a}x{dim_b} vs dimension {}", self.dim())));
        }
        self.bipartition = Some((dim_a, dim_b));
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn bipartition(&self) -> Option<(usize, usize)> {
        self.bipartition
    }

    pub fn require_bipartition(&self) -> Result<(usize, usize)> {
        self.bipartition.ok_or(Error::MissingBipartition)
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    pub fn eig(&self) -> EigenDecomposition {
        // matrix is Hermitian by invariant
        hermitian_eig(&self.matrix).expect("density operator is Hermitian")
    }

    /// Product state ρ_A ⊗ ρ_B with the bipartition set.
    pub fn product(a: &DensityOperator, b: &DensityOperator) -> Self {
        Self::from_parts_unchecked(crate::linalg::tensor(&a.matrix, &b.matrix), Some((a.dim(), b.dim())))
    }

    pub fn partial_trace(&self, traced: Subsystem) -> Result<DensityOperator> {
        let (da, db) = self.require_bipartition()?;
        let m = partial_trace_matrix(&self.matrix, da, db, traced);
        Ok(Self::from_parts_unchecked(m.hermitian_part(), None))
    }

    /// Exchange the tensor factors: ρ_AB → ρ_BA.
    pub fn swap_subsystems(&self) -> Result<DensityOperator> {
        let (da, db) = self.require_bipartition()?;
        let m = &self.matrix;
        let swapped = ComplexMatrix::from_fn(da * db, da * db, |i, j| {
            let (bi, ai) = (i / da, i % da);
            let (bj, aj) = (j / da, j % da);
            m[(ai * db + bi, aj * db + bj)]
        });
        Ok(Self::from_parts_unchecked(swapped, Some((db, da))))
    }

    /// von Neumann entropy in bits, with 0·log 0 = 0.
    pub fn entropy_bits(&self) -> f64 {
        entropy_bits(&self.eig().values)
    }
}

/// Shannon entropy (bits) of a spectrum; values ≤ 0 contribute nothing.
pub fn entropy_bits(values: &[f64]) -> f64 {
    values.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.log2()).sum()
}

/// Partial trace of a (dim_a·dim_b)-square matrix over the named factor.
pub fn partial_trace_matrix(m: &ComplexMatrix, dim_a: usize, dim_b: usize, traced: Subsystem) -> ComplexMatrix {
    match traced {
        Subsystem::A => {
            let mut out = ComplexMatrix::zeros(dim_b, dim_b);
            for a in 0..dim_a {
                for i in 0..dim_b {
                    for j in 0..dim_b {
                        out[(i, j)] += m[(a * dim_b + i, a * dim_b + j)];
                    }
                }
            }
            out
        }
        Subsystem::B => {
            let mut out = ComplexMatrix::zeros(dim_a, dim_a);
            for i in 0..dim_a {
                for j in 0..dim_a {
                    let mut acc = ZERO;
                    for b in 0..dim_b {
                        acc += m[(i * dim_b + b, j * dim_b + b)];
                    }
                    out[(i, j)] = acc;
                }
            }
            out
        }
    }
}

/// Tr_A[(E ⊗ I) M] for an operator E on A: the unnormalised state of B
/// after outcome E on A.
pub fn apply_effect_trace_a(m: &ComplexMatrix, effect: &ComplexMatrix, dim_a: usize, dim_b: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim_b, dim_b);
    for a in 0..dim_a {
        for a2 in 0..dim_a {
            // (E⊗I)M traced over A: Σ_{a,a'} E_{a' a} M_{(a,i),(a',j)}
            let e = effect[(a2, a)];
            if e == ZERO {
                continue;
            }
            for i in 0..dim_b {
                for j in 0..dim_b {
                    out[(i, j)] += e * m[(a * dim_b + i, a2 * dim_b + j)];
                }
            }
        }
    }
    out
}

/// Tr_B[(I ⊗ E) M] for an operator E on B: the unnormalised state of A
/// after outcome E on B.
pub fn apply_effect_trace_b(m: &ComplexMatrix, effect: &ComplexMatrix, dim_a: usize, dim_b: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim_a, dim_a);
    for i in 0..dim_a {
        for j in 0..dim_a {
            let mut acc = ZERO;
            for b in 0..dim_b {
                for b2 in 0..dim_b {
                    acc += effect[(b2, b)] * m[(i * dim_b + b, j * dim_b + b2)];
                }
            }
            out[(i, j)] = acc;
        }
    }
    out
}
