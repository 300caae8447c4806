//! Single-mode phase space on uniform grids.
//!
//! Points are α = x + ip with vacuum quadrature variance 1/4, so the vacuum
//! Wigner function is (2/π) e^{−2|α|²} and d²α = dx dp. Characteristic
//! functions χ(ξ) = Tr[ρ D(ξ)] live on their own grids in the ξ plane.

mod characteristic;
mod fock;
mod moyal;

use num_complex::Complex64;
use rayon::prelude::*;

pub use characteristic::{char_commutator, char_from_wigner, wigner_from_char};
pub use fock::{
    char_from_fock, coherent_state_vector, displacement_elements, wigner_from_fock, FockOperator, DEFAULT_CUTOFF,
    TAIL_LIMIT,
};
pub use moyal::{moyal_commutator, MOYAL_HBAR};

use crate::error::{Error, Result};

/// Uniform sampling x_i = x_min + i (x_max − x_min)/nx; the upper edge is
/// excluded so the grid is periodic-friendly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridGeometry {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl Default for GridGeometry {
    /// [−6, 6]² at 128×128.
    fn default() -> Self {
        Self::square(6.0, 128)
    }
}

impl GridGeometry {
    pub fn new(x_min: f64, x_max: f64, p_min: f64, p_max: f64, nx: usize, np: usize) -> Result<Self> {
        let g = Self { x_min, x_max, p_min, p_max, nx, np };
        g.validate()?;
        Ok(g)
    }

    /// [−half_width, half_width]² with n points per axis.
    pub fn square(half_width: f64, n: usize) -> Self {
        Self { x_min: -half_width, x_max: half_width, p_min: -half_width, p_max: half_width, nx: n, np: n }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.p_min, self.p_max].iter().all(|v| v.is_finite());
        if !finite || self.x_max <= self.x_min || self.p_max <= self.p_min || self.nx < 2 || self.np < 2 {
            return Err(Error::BadDimension(format!("invalid grid geometry {self:?}")));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.np as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp()
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dp()
    }

    /// Index of the grid point nearest to (x, p), clamped to the grid.
    pub fn nearest(&self, x: f64, p: f64) -> (usize, usize) {
        let clamp = |v: f64, n: usize| v.round().clamp(0.0, (n - 1) as f64) as usize;
        (clamp((x - self.x_min) / self.dx(), self.nx), clamp((p - self.p_min) / self.dp(), self.np))
    }

    fn require_same(&self, other: &GridGeometry) -> Result<()> {
        if self != other {
            return Err(Error::GeometryMismatch);
        }
        Ok(())
    }
}

/// Real samples of a Wigner function, row-major in (x, p).
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    geometry: GridGeometry,
    values: Vec<f64>,
}

impl WignerGrid {
    pub fn new(geometry: GridGeometry, values: Vec<f64>) -> Result<Self> {
        geometry.validate()?;
        if values.len() != geometry.len() {
            return Err(Error::DimMismatch(format!("{} values for a {}x{} grid", values.len(), geometry.nx, geometry.np)));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("non-finite grid value".into()));
        }
        Ok(Self { geometry, values })
    }

    pub fn from_fn(geometry: GridGeometry, f: impl Fn(f64, f64) -> f64 + Sync) -> Result<Self> {
        let values = (0..geometry.len())
            .into_par_iter()
            .map(|k| f(geometry.x(k / geometry.np), geometry.p(k % geometry.np)))
            .collect();
        Self::new(geometry, values)
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, ix: usize, ip: usize) -> f64 {
        self.values[ix * self.geometry.np + ip]
    }

    /// Σ W dx dp.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.geometry.cell_area()
    }

    pub fn max_abs(&self) -> (f64, (usize, usize)) {
        max_abs_of(&self.values, self.geometry.np)
    }

    /// Location of the largest value (lowest index on ties).
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (k, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = k;
            }
        }
        (best / self.geometry.np, best % self.geometry.np)
    }

    pub fn sup_distance(&self, other: &WignerGrid) -> Result<f64> {
        self.geometry.require_same(&other.geometry)?;
        Ok(sup_distance(&self.values, &other.values))
    }
}

/// Wigner-like function of −i[ρ, ρ'] on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorGrid {
    geometry: GridGeometry,
    values: Vec<f64>,
    /// Largest imaginary part discarded when forming the real output.
    imaginary_residue: f64,
}

impl CommutatorGrid {
    pub fn new(geometry: GridGeometry, values: Vec<f64>, imaginary_residue: f64) -> Result<Self> {
        let g = WignerGrid::new(geometry, values)?;
        Ok(Self { geometry, values: g.values, imaginary_residue })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, ix: usize, ip: usize) -> f64 {
        self.values[ix * self.geometry.np + ip]
    }

    pub fn imaginary_residue(&self) -> f64 {
        self.imaginary_residue
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.geometry.cell_area()
    }

    pub fn sup_distance_to(&self, w: &WignerGrid) -> Result<f64> {
        self.geometry.require_same(w.geometry())?;
        Ok(sup_distance(&self.values, w.values()))
    }

    pub fn sup_distance(&self, other: &CommutatorGrid) -> Result<f64> {
        self.geometry.require_same(&other.geometry)?;
        Ok(sup_distance(&self.values, &other.values))
    }

    pub fn as_wigner(&self) -> WignerGrid {
        WignerGrid { geometry: self.geometry, values: self.values.clone() }
    }
}

/// Complex samples of a characteristic function; the geometry's x axis is
/// Re ξ and its p axis is Im ξ.
#[derive(Clone, Debug, PartialEq)]
pub struct CharGrid {
    geometry: GridGeometry,
    values: Vec<Complex64>,
}

impl CharGrid {
    pub fn new(geometry: GridGeometry, values: Vec<Complex64>) -> Result<Self> {
        geometry.validate()?;
        if values.len() != geometry.len() {
            return Err(Error::DimMismatch(format!("{} values for a {}x{} grid", values.len(), geometry.nx, geometry.np)));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidState("non-finite grid value".into()));
        }
        Ok(Self { geometry, values })
    }

    pub fn from_fn(geometry: GridGeometry, f: impl Fn(Complex64) -> Complex64 + Sync) -> Result<Self> {
        let values = (0..geometry.len())
            .into_par_iter()
            .map(|k| f(Complex64::new(geometry.x(k / geometry.np), geometry.p(k % geometry.np))))
            .collect();
        Self::new(geometry, values)
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, ir: usize, ii: usize) -> Complex64 {
        self.values[ir * self.geometry.np + ii]
    }

    /// χ at ξ = 0, or `None` if the origin is not a grid point.
    pub fn at_origin(&self) -> Option<Complex64> {
        let g = &self.geometry;
        let (ir, ii) = g.nearest(0.0, 0.0);
        (g.x(ir).abs() < 1e-12 * g.dx() && g.p(ii).abs() < 1e-12 * g.dp()).then(|| self.get(ir, ii))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn max_abs_of(values: &[f64], np: usize) -> (f64, (usize, usize)) {
    let mut best = (0.0, 0);
    for (k, v) in values.iter().enumerate() {
        if v.abs() > best.0 {
            best = (v.abs(), k);
        }
    }
    (best.0, (best.1 / np, best.1 % np))
}

/// Largest |value| and its (ix, ip) location; the first cell for an all-zero grid.
pub fn grid_max_abs(g: &CommutatorGrid) -> (f64, (usize, usize)) {
    max_abs_of(&g.values, g.geometry.np)
}

/// Pointwise sample standard deviation of the commutator grid across
/// paired realisations of the two input grids, maximised over the grid.
/// With fewer than two realisations the band is infinite.
pub fn commutator_band(samples: &[(WignerGrid, WignerGrid)]) -> Result<f64> {
    if samples.len() < 2 {
        return Ok(f64::INFINITY);
    }
    let grids: Vec<CommutatorGrid> = samples.iter().map(|(a, b)| moyal_commutator(a, b)).collect::<Result<_>>()?;
    let n = grids.len() as f64;
    let len = grids[0].values.len();
    let band = (0..len)
        .map(|k| {
            let mean = grids.iter().map(|g| g.values[k]).sum::<f64>() / n;
            let var = grids.iter().map(|g| (g.values[k] - mean).powi(2)).sum::<f64>() / (n - 1.0);
            var.sqrt()
        })
        .fold(0.0, f64::max);
    Ok(band)
}

/// Wigner function of a Gaussian state with mean (x0, p0) and covariance σ
/// (vacuum σ = I/4).
pub fn gaussian_wigner(mean: [f64; 2], cov: [[f64; 2]; 2], geom: &GridGeometry) -> Result<WignerGrid> {
    let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
    if !(det > 0.0) {
        return Err(Error::Unphysical(det));
    }
    let inv = [[cov[1][1] / det, -cov[0][1] / det], [-cov[1][0] / det, cov[0][0] / det]];
    let norm = 1.0 / (2.0 * std::f64::consts::PI * det.sqrt());
    WignerGrid::from_fn(*geom, |x, p| {
        let (u, v) = (x - mean[0], p - mean[1]);
        let q = u * (inv[0][0] * u + inv[0][1] * v) + v * (inv[1][0] * u + inv[1][1] * v);
        norm * (-0.5 * q).exp()
    })
}

/// χ(ξ) of the same Gaussian: with k = (−2 Im ξ, 2 Re ξ),
/// χ = exp(−i k·r₀ − kᵀσk/2).
pub fn gaussian_char(mean: [f64; 2], cov: [[f64; 2]; 2], geom: &GridGeometry) -> Result<CharGrid> {
    CharGrid::from_fn(*geom, |xi| {
        let k = [-2.0 * xi.im, 2.0 * xi.re];
        let phase = -(k[0] * mean[0] + k[1] * mean[1]);
        let quad = k[0] * (cov[0][0] * k[0] + cov[0][1] * k[1]) + k[1] * (cov[1][0] * k[0] + cov[1][1] * k[1]);
        Complex64::from_polar((-0.5 * quad).exp(), phase)
    })
}
