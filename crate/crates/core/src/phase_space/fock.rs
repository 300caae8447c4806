//! Single-mode operators in a truncated Fock basis and their phase-space
//! transforms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{CharGrid, GridGeometry, WignerGrid};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::state::DensityOperator;

pub const DEFAULT_CUTOFF: usize = 12;
pub const TAIL_LIMIT: f64 = 1e-6;

/// An operator on span{|0⟩, …, |n_max⟩}.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    cutoff: usize,
    matrix: ComplexMatrix,
}

impl FockOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::DimMismatch(format!("Fock operator must be square, got {}x{}", matrix.rows(), matrix.cols())));
        }
        Ok(Self { cutoff: matrix.rows() - 1, matrix })
    }

    pub fn from_density(rho: &DensityOperator) -> Self {
        Self::new(rho.matrix().clone()).expect("density operators are square")
    }

    pub fn from_pure(psi: &[Complex64]) -> Result<Self> {
        Self::new(ComplexMatrix::projector(psi))
    }

    pub fn number_state(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::BadDimension(format!("|{n}⟩ exceeds cutoff {cutoff}")));
        }
        let mut diag = vec![0.0; cutoff + 1];
        diag[n] = 1.0;
        Self::new(ComplexMatrix::diag_real(&diag))
    }

    /// |β⟩⟨β| truncated and renormalised; the discarded weight is the tail.
    pub fn coherent(beta: Complex64, cutoff: usize) -> Self {
        let v = coherent_state_vector(beta, cutoff);
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let v: Vec<Complex64> = v.into_iter().map(|z| z / norm.sqrt()).collect();
        Self::from_pure(&v).expect("nonempty vector")
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Weight on levels above n_max − 2, measured by Σ |A_nn|.
    pub fn tail_population(&self) -> f64 {
        let start = self.cutoff.saturating_sub(1);
        (start..=self.cutoff).map(|n| self.matrix[(n, n)].norm()).sum()
    }

    pub fn check_tail(&self, limit: f64) -> Result<()> {
        let tail = self.tail_population();
        if tail >= limit {
            return Err(Error::TruncationTail { tail, limit });
        }
        Ok(())
    }

    /// −i[A, B]
    pub fn commutator_times_minus_i(&self, other: &FockOperator) -> Result<FockOperator> {
        if self.cutoff != other.cutoff {
            return Err(Error::DimMismatch(format!("cutoffs {} and {}", self.cutoff, other.cutoff)));
        }
        let c = crate::linalg::commutator(&self.matrix, &other.matrix)?;
        Self::new(c.scale(Complex64::new(0.0, -1.0)))
    }
}

/// Amplitudes e^{−|β|²/2} βⁿ/√n! for n = 0..=cutoff (not renormalised).
pub fn coherent_state_vector(beta: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(cutoff + 1);
    let mut amp = Complex64::new((-beta.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..=cutoff {
        out.push(amp);
        amp = amp * beta / ((n + 1) as f64).sqrt();
    }
    out
}

/// ⟨m|D(β)|n⟩ for m, n ≤ cutoff, from the associated-Laguerre closed form
/// of the untruncated displacement operator.
pub fn displacement_elements(beta: Complex64, cutoff: usize) -> ComplexMatrix {
    let dim = cutoff + 1;
    let x = beta.norm_sqr();
    let gauss = (-x / 2.0).exp();
    let mut d = ComplexMatrix::zeros(dim, dim);
    let mut lag = vec![0.0; dim];
    let mut pow = Complex64::new(1.0, 0.0);
    let mut pow_minus_conj = Complex64::new(1.0, 0.0);
    for delta in 0..dim {
        let a = delta as f64;
        let len = dim - delta;
        lag[0] = 1.0;
        if len > 1 {
            lag[1] = 1.0 + a - x;
        }
        for k in 1..len.saturating_sub(1) {
            let kf = k as f64;
            lag[k + 1] = ((2.0 * kf + 1.0 + a - x) * lag[k] - (kf + a) * lag[k - 1]) / (kf + 1.0);
        }
        // sqrt(k!/(k+δ)!), updated incrementally in k
        let mut ratio = (1..=delta).map(|j| (j as f64).sqrt()).product::<f64>().recip();
        for k in 0..len {
            if k > 0 {
                ratio *= ((k as f64) / ((k + delta) as f64)).sqrt();
            }
            let base = ratio * gauss * lag[k];
            d[(k + delta, k)] = pow * base;
            if delta > 0 {
                d[(k, k + delta)] = pow_minus_conj * base;
            }
        }
        pow *= beta;
        pow_minus_conj *= -beta.conj();
    }
    d
}

/// (2/π) Tr[A D(2α) Π] with A in the Fock basis.
pub(crate) fn wigner_at(a: &ComplexMatrix, alpha: Complex64) -> Complex64 {
    let dim = a.rows();
    let d = displacement_elements(alpha * 2.0, dim - 1);
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..dim {
        let parity = if m % 2 == 0 { 1.0 } else { -1.0 };
        for n in 0..dim {
            acc += a[(m, n)] * d[(n, m)] * parity;
        }
    }
    acc * (2.0 / PI)
}

/// Tr[A D(ξ)].
pub(crate) fn char_at(a: &ComplexMatrix, xi: Complex64) -> Complex64 {
    let dim = a.rows();
    let d = displacement_elements(xi, dim - 1);
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..dim {
        for n in 0..dim {
            acc += a[(m, n)] * d[(n, m)];
        }
    }
    acc
}

/// Wigner function of a Hermitian Fock operator, α = x + ip with vacuum
/// quadrature variance 1/4. Fails if the operator has weight near the cutoff.
pub fn wigner_from_fock(op: &FockOperator, geom: &GridGeometry) -> Result<WignerGrid> {
    op.check_tail(TAIL_LIMIT)?;
    let defect = op.matrix.hermitian_defect();
    if defect > 1e-10 * op.matrix.max_abs().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let values: Vec<f64> = (0..geom.nx)
        .into_par_iter()
        .flat_map_iter(|ix| {
            let x = geom.x(ix);
            (0..geom.np).map(move |ip| wigner_at(&op.matrix, Complex64::new(x, geom.p(ip))).re)
        })
        .collect();
    WignerGrid::new(*geom, values)
}

/// Characteristic function χ(ξ) = Tr[A D(ξ)] sampled with ξ = x + ip over `geom`.
pub fn char_from_fock(op: &FockOperator, geom: &GridGeometry) -> Result<CharGrid> {
    op.check_tail(TAIL_LIMIT)?;
    let values: Vec<Complex64> = (0..geom.nx)
        .into_par_iter()
        .flat_map_iter(|ir| {
            let xr = geom.x(ir);
            (0..geom.np).map(move |ii| char_at(&op.matrix, Complex64::new(xr, geom.p(ii))))
        })
        .collect();
    CharGrid::new(*geom, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fact(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn displacement_is_unitary_on_low_levels() {
        // columns of the untruncated operator restricted to low n have unit norm
        // once the cutoff is far above them
        let beta = Complex64::new(0.7, -0.4);
        let d = displacement_elements(beta, 40);
        for n in 0..4 {
            let norm: f64 = (0..=40).map(|m| d[(m, n)].norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12, "column {n}: {norm}");
        }
    }

    #[test]
    fn displacement_of_vacuum_is_coherent() {
        let beta = Complex64::new(-0.3, 1.1);
        let d = displacement_elements(beta, 10);
        let c = coherent_state_vector(beta, 10);
        for m in 0..=10 {
            assert!((d[(m, 0)] - c[m]).norm() < 1e-14);
        }
    }

    #[test]
    fn displacement_matches_direct_series() {
        // ⟨m|D(β)|n⟩ = e^{−|β|²/2} Σ_k ⟨m|β^{a†}… via normal ordering:
        // D = e^{−|β|²/2} e^{β a†} e^{−β* a}
        let beta = Complex64::new(0.5, 0.25);
        let n_max = 6;
        let d = displacement_elements(beta, n_max);
        for m in 0..=n_max {
            for n in 0..=n_max {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..=m.min(n) {
                    // e^{−β* a}|n⟩ picks |j⟩ with (−β*)^{n−j} √(n!/j!)/(n−j)!,
                    // then e^{β a†}|j⟩ reaches |m⟩ with β^{m−j} √(m!/j!)/(m−j)!
                    let t1 = (-beta.conj()).powu((n - j) as u32) * ((fact(n) / fact(j)).sqrt() / fact(n - j));
                    let t2 = beta.powu((m - j) as u32) * ((fact(m) / fact(j)).sqrt() / fact(m - j));
                    acc += t1 * t2;
                }
                acc *= (-beta.norm_sqr() / 2.0).exp();
                assert!((acc - d[(m, n)]).norm() < 1e-13, "({m},{n})");
            }
        }
    }

    #[test]
    fn wigner_values_at_origin() {
        let vac = FockOperator::number_state(0, 6).unwrap();
        let one = FockOperator::number_state(1, 6).unwrap();
        assert!((wigner_at(vac.matrix(), Complex64::new(0.0, 0.0)).re - 2.0 / PI).abs() < 1e-12);
        assert!((wigner_at(one.matrix(), Complex64::new(0.0, 0.0)).re + 2.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn char_of_vacuum_is_gaussian() {
        let vac = FockOperator::number_state(0, 4).unwrap();
        let xi = Complex64::new(0.8, -0.6);
        assert!((char_at(vac.matrix(), xi).re - (-0.5f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn tail_check() {
        let ok = FockOperator::number_state(2, 8).unwrap();
        assert!(ok.check_tail(TAIL_LIMIT).is_ok());
        let bad = FockOperator::number_state(7, 8).unwrap();
        assert!(matches!(bad.check_tail(TAIL_LIMIT), Err(Error::TruncationTail { .. })));
        let far = FockOperator::coherent(Complex64::new(3.0, 0.0), 8);
        assert!(far.check_tail(TAIL_LIMIT).is_err());
    }
}
