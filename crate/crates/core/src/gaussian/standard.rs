//! Reduction to A = diag(a, a), B = diag(b, b), C = diag(c, d) by local
//! symplectic maps: rotations diagonalising A and B, squeezers balancing
//! them, then rotations diagonalising C.

use nalgebra::{Matrix2, Matrix4};

use super::{require_physical, GaussianState};
use crate::error::Result;

const BALANCED: f64 = 1e-12;

pub fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// diag(e^{−r}, e^{r}).
pub fn squeezer(r: f64) -> Matrix2<f64> {
    Matrix2::new((-r).exp(), 0.0, 0.0, r.exp())
}

pub fn local(m1: &Matrix2<f64>, m2: &Matrix2<f64>) -> Matrix4<f64> {
    let mut s = Matrix4::zeros();
    s.fixed_view_mut::<2, 2>(0, 0).copy_from(m1);
    s.fixed_view_mut::<2, 2>(2, 2).copy_from(m2);
    s
}

/// Parameters of the reduction, one entry per mode, in the order applied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalOps {
    pub rotation1: [f64; 2],
    pub squeeze: [f64; 2],
    pub rotation2: [f64; 2],
}

impl LocalOps {
    pub fn identity() -> Self {
        Self { rotation1: [0.0; 2], squeeze: [0.0; 2], rotation2: [0.0; 2] }
    }

    /// The local symplectic S with S σ Sᵀ in standard form.
    pub fn symplectic(&self) -> Matrix4<f64> {
        let r1 = local(&rotation(self.rotation1[0]), &rotation(self.rotation1[1]));
        let sq = local(&squeezer(self.squeeze[0]), &squeezer(self.squeeze[1]));
        let r2 = local(&rotation(self.rotation2[0]), &rotation(self.rotation2[1]));
        r2 * sq * r1
    }

    /// S⁻¹, assembled from the inverse factors.
    pub fn inverse_symplectic(&self) -> Matrix4<f64> {
        let r1 = local(&rotation(-self.rotation1[0]), &rotation(-self.rotation1[1]));
        let sq = local(&squeezer(-self.squeeze[0]), &squeezer(-self.squeeze[1]));
        let r2 = local(&rotation(-self.rotation2[0]), &rotation(-self.rotation2[1]));
        r1 * sq * r2
    }
}

/// Standard-form parameters; c ≥ 0 and the sign of d is free.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StandardForm {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub local_ops: LocalOps,
}

impl StandardForm {
    pub fn state(&self) -> GaussianState {
        GaussianState::from_standard(self.a, self.b, self.c, self.d)
    }

    /// Undo the local maps on the standard-form covariance.
    pub fn reconstruct_input(&self) -> Matrix4<f64> {
        let inv = self.local_ops.inverse_symplectic();
        inv * self.state().cov() * inv.transpose()
    }
}

/// Angle θ such that R(θ) M R(θ)ᵀ is diagonal, for symmetric 2×2 M.
fn diagonalising_angle(m: &Matrix2<f64>) -> f64 {
    -0.5 * (2.0 * m[(0, 1)]).atan2(m[(0, 0)] - m[(1, 1)])
}

fn balance(block: &Matrix2<f64>) -> (f64, f64) {
    let scale = block.abs().max().max(f64::MIN_POSITIVE);
    let iso = (block[(0, 1)].abs() <= BALANCED * scale) && ((block[(0, 0)] - block[(1, 1)]).abs() <= BALANCED * scale);
    if iso {
        return (0.0, 0.0);
    }
    let theta = diagonalising_angle(block);
    let r = rotation(theta);
    let diag = r * block * r.transpose();
    let (a1, a2) = (diag[(0, 0)], diag[(1, 1)]);
    let s = if (a1 - a2).abs() <= BALANCED * scale { 0.0 } else { 0.25 * (a1 / a2).ln() };
    (theta, s)
}

pub fn standard_form(g: &GaussianState) -> Result<StandardForm> {
    require_physical(g)?;
    let (ta, sa) = balance(&g.block_a());
    let (tb, sb) = balance(&g.block_b());
    let mut ops = LocalOps { rotation1: [ta, tb], squeeze: [sa, sb], rotation2: [0.0, 0.0] };
    let balanced = g.transformed(&ops.symplectic());

    let c = balanced.block_c();
    let scale = balanced.cov().abs().max();
    if c[(0, 1)].abs() > BALANCED * scale || c[(1, 0)].abs() > BALANCED * scale {
        let svd = c.svd(true, true);
        let mut u = svd.u.expect("requested");
        let mut v = svd.v_t.expect("requested").transpose();
        // keep both factors proper rotations; reflections go into the sign of d
        if u.determinant() < 0.0 {
            u.column_mut(1).neg_mut();
        }
        if v.determinant() < 0.0 {
            v.column_mut(1).neg_mut();
        }
        // mode 1 gets Uᵀ and mode 2 gets Vᵀ, so C → Uᵀ C V
        ops.rotation2 = [u[(0, 1)].atan2(u[(0, 0)]), v[(0, 1)].atan2(v[(0, 0)])];
    }
    let mut reduced = g.transformed(&ops.symplectic());
    if reduced.block_c()[(0, 0)] < 0.0 {
        // rotating mode 1 by π flips the signs of c and d together
        ops.rotation2[0] += std::f64::consts::PI;
        reduced = g.transformed(&ops.symplectic());
    }
    let (a_blk, b_blk, c_blk) = (reduced.block_a(), reduced.block_b(), reduced.block_c());
    Ok(StandardForm {
        a: 0.5 * (a_blk[(0, 0)] + a_blk[(1, 1)]),
        b: 0.5 * (b_blk[(0, 0)] + b_blk[(1, 1)]),
        c: c_blk[(0, 0)],
        d: c_blk[(1, 1)],
        local_ops: ops,
    })
}
