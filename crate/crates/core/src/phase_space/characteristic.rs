//! Characteristic-function route: χ(ξ) = Tr[ρ D(ξ)], related to the Wigner
//! function by χ(ξ) = ∫ d²α W(α) e^{ξα* − ξ*α}.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{CharGrid, GridGeometry, WignerGrid};
use crate::error::{Error, Result};

/// χ of −i[ρ_a, ρ_b]:
/// (2/π) ∫ d²ζ χ_a(ξ/2 + ζ) χ_b(ξ/2 − ζ) sin(Im(ζ ξ*)),
/// evaluated as a sum over η = ξ/2 + ζ on the grid, so ξ − η must be a
/// grid point too. This requires ξ = 0 to be a grid point.
pub fn char_commutator(a: &CharGrid, b: &CharGrid) -> Result<CharGrid> {
    if a.geometry() != b.geometry() {
        return Err(Error::GeometryMismatch);
    }
    let g = *a.geometry();
    let (or, oi) = origin_offsets(&g)?;
    let (nr, ni) = (g.nx, g.np);
    let area = g.cell_area();
    let values: Vec<Complex64> = (0..g.len())
        .into_par_iter()
        .map(|k| {
            let (ir, ii) = (k / ni, k % ni);
            let xi = Complex64::new(g.x(ir), g.p(ii));
            let mut acc = Complex64::new(0.0, 0.0);
            for jr in 0..nr {
                // index of Re(ξ − η): (ir − or) − (jr − or) + or
                let lr = ir as i64 - jr as i64 + or as i64;
                if lr < 0 || lr >= nr as i64 {
                    continue;
                }
                for ji in 0..ni {
                    let li = ii as i64 - ji as i64 + oi as i64;
                    if li < 0 || li >= ni as i64 {
                        continue;
                    }
                    let eta = Complex64::new(g.x(jr), g.p(ji));
                    // ξη* − ξ*η = 2i Im(ξη*); the kernel is sin(Im(ηξ*))
                    let s = (eta.im * xi.re - eta.re * xi.im).sin();
                    acc += a.get(jr, ji) * b.get(lr as usize, li as usize) * s;
                }
            }
            acc * (2.0 / PI * area)
        })
        .collect();
    CharGrid::new(g, values)
}

fn origin_offsets(g: &GridGeometry) -> Result<(usize, usize)> {
    let r = -g.x_min / g.dx();
    let i = -g.p_min / g.dp();
    let ok = |v: f64, n: usize| (v - v.round()).abs() < 1e-9 && v.round() >= 0.0 && (v.round() as usize) < n;
    if !ok(r, g.nx) || !ok(i, g.np) {
        return Err(Error::BadDimension("characteristic grid must contain ξ = 0 as a sample".into()));
    }
    Ok((r.round() as usize, i.round() as usize))
}

/// χ(ξ) = Σ W(x, p) e^{−2i(p Re ξ − x Im ξ)} dx dp, separably.
pub fn char_from_wigner(w: &WignerGrid, geom: &GridGeometry) -> Result<CharGrid> {
    geom.validate()?;
    let wg = *w.geometry();
    let area = wg.cell_area();
    // T(x, Re ξ) = Σ_p W(x, p) e^{−2ip Re ξ}
    let t: Vec<Vec<Complex64>> = (0..wg.nx)
        .into_par_iter()
        .map(|ix| {
            (0..geom.nx)
                .map(|ir| {
                    let xr = geom.x(ir);
                    (0..wg.np).map(|ip| Complex64::from_polar(w.get(ix, ip), -2.0 * wg.p(ip) * xr)).sum()
                })
                .collect()
        })
        .collect();
    let values: Vec<Complex64> = (0..geom.len())
        .into_par_iter()
        .map(|k| {
            let (ir, ii) = (k / geom.np, k % geom.np);
            let xi_im = geom.p(ii);
            let s: Complex64 = (0..wg.nx).map(|ix| t[ix][ir] * Complex64::from_polar(1.0, 2.0 * wg.x(ix) * xi_im)).sum();
            s * area
        })
        .collect();
    CharGrid::new(*geom, values)
}

/// W(x, p) = (1/π²) Σ χ(ξ) e^{2i(p Re ξ − x Im ξ)} d²ξ; the imaginary part
/// is discarded and its largest magnitude returned alongside.
pub fn wigner_from_char(chi: &CharGrid, geom: &GridGeometry) -> Result<(WignerGrid, f64)> {
    geom.validate()?;
    let cg = *chi.geometry();
    let area = cg.cell_area();
    // U(Re ξ, x) = Σ_{Im ξ} χ e^{−2ix Im ξ}
    let u: Vec<Vec<Complex64>> = (0..cg.nx)
        .into_par_iter()
        .map(|ir| {
            (0..geom.nx)
                .map(|ix| {
                    let x = geom.x(ix);
                    (0..cg.np).map(|ii| chi.get(ir, ii) * Complex64::from_polar(1.0, -2.0 * x * cg.p(ii))).sum()
                })
                .collect()
        })
        .collect();
    let full: Vec<Complex64> = (0..geom.len())
        .into_par_iter()
        .map(|k| {
            let (ix, ip) = (k / geom.np, k % geom.np);
            let p = geom.p(ip);
            let s: Complex64 = (0..cg.nx).map(|ir| u[ir][ix] * Complex64::from_polar(1.0, 2.0 * p * cg.x(ir))).sum();
            s * (area / (PI * PI))
        })
        .collect();
    let residue = full.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    Ok((WignerGrid::new(*geom, full.iter().map(|z| z.re).collect())?, residue))
}
