//! Versioned JSON state files.
//!
//! Every real number is a decimal string with 17 significant digits, so a
//! parse of an emitted file returns the same binary64 values. Complex numbers
//! are `[re, im]` pairs of such strings. Unknown fields are rejected.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use qdiscord::gaussian::{GaussianState, CONVENTION};
use qdiscord::phase_space::{CommutatorGrid, GridGeometry, WignerGrid};
use qdiscord::povm::Povm;
use qdiscord::tomo::ShotRecord;
use qdiscord::{ComplexMatrix, DensityOperator};

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: &str = "1";

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_real(s: &str) -> CliResult<f64> {
    s.trim().parse::<f64>().map_err(|_| CliError::Parse(format!("not a decimal number: {s:?}")))
}

fn fmt_complex(z: Complex64) -> [String; 2] {
    [fmt_real(z.re), fmt_real(z.im)]
}

fn parse_complex(z: &[String; 2]) -> CliResult<Complex64> {
    Ok(Complex64::new(parse_real(&z[0])?, parse_real(&z[1])?))
}

/// Lower-case hex SHA-256.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    DvDensity,
    Gaussian,
    ShotRecord,
    WignerGrid,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::DvDensity => "dv_density",
            Kind::Gaussian => "gaussian",
            Kind::ShotRecord => "shot_record",
            Kind::WignerGrid => "wigner_grid",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    #[default]
    Computational,
    /// Number basis of a single bosonic mode, |0⟩ … |n_max⟩.
    Fock,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    format_version: String,
    kind: Kind,
    payload: Value,
}

type Cx = [String; 2];

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DvPayload {
    /// `[d]` for a single system, `[d_A, d_B]` for a bipartite one.
    dims: Vec<usize>,
    #[serde(default)]
    basis: Basis,
    matrix: Vec<Vec<Cx>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussianPayload {
    convention: String,
    /// (x₁, p₁, x₂, p₂)
    mean: [String; 4],
    covariance: [[String; 4]; 4],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShotPayload {
    dims: [usize; 2],
    povm_a: Vec<Vec<Vec<Cx>>>,
    povm_b: Vec<Vec<Vec<Cx>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    povm_seed: Option<u64>,
    counts: Vec<Vec<u64>>,
    total: u64,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryPayload {
    x_min: String,
    x_max: String,
    p_min: String,
    p_max: String,
    nx: usize,
    np: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridPayload {
    geometry: GeometryPayload,
    /// `values[ix][ip]`
    values: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    uncertainty: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    imaginary_residue: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DvFile {
    pub state: DensityOperator,
    pub basis: Basis,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShotFile {
    pub record: ShotRecord,
    /// Seed of the default POVMs, when they were drawn from one.
    pub povm_seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridFile {
    pub grid: WignerGrid,
    /// Pointwise standard error of the samples, as a single sup-norm bound.
    pub uncertainty: Option<f64>,
    pub imaginary_residue: Option<f64>,
}

impl GridFile {
    pub fn plain(grid: WignerGrid) -> Self {
        Self { grid, uncertainty: None, imaginary_residue: None }
    }

    pub fn from_commutator(c: &CommutatorGrid) -> Self {
        Self { grid: c.as_wigner(), uncertainty: None, imaginary_residue: Some(c.imaginary_residue()) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateFile {
    Dv(DvFile),
    Gaussian(GaussianState),
    Shots(ShotFile),
    Grid(GridFile),
}

impl StateFile {
    pub fn kind(&self) -> Kind {
        match self {
            StateFile::Dv(_) => Kind::DvDensity,
            StateFile::Gaussian(_) => Kind::Gaussian,
            StateFile::Shots(_) => Kind::ShotRecord,
            StateFile::Grid(_) => Kind::WignerGrid,
        }
    }
}

fn emit_matrix(m: &ComplexMatrix) -> Vec<Vec<Cx>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|&z| fmt_complex(z)).collect()).collect()
}

fn parse_matrix(rows: &[Vec<Cx>]) -> CliResult<ComplexMatrix> {
    let rows: Vec<Vec<Complex64>> =
        rows.iter().map(|r| r.iter().map(parse_complex).collect::<CliResult<_>>()).collect::<CliResult<_>>()?;
    ComplexMatrix::from_rows(&rows).map_err(|e| CliError::Parse(e.to_string()))
}

fn emit_povm(p: &Povm) -> Vec<Vec<Vec<Cx>>> {
    p.effects().iter().map(emit_matrix).collect()
}

fn parse_povm(effects: &[Vec<Vec<Cx>>]) -> CliResult<Povm> {
    Ok(Povm::new(effects.iter().map(|e| parse_matrix(e)).collect::<CliResult<_>>()?)?)
}

fn from_payload<T: for<'de> Deserialize<'de>>(v: Value) -> CliResult<T> {
    Ok(serde_json::from_value(v)?)
}

pub fn parse(text: &str) -> CliResult<StateFile> {
    let env: Envelope = serde_json::from_str(text)?;
    if env.format_version != FORMAT_VERSION {
        return Err(CliError::Parse(format!("unsupported format_version {:?}", env.format_version)));
    }
    match env.kind {
        Kind::DvDensity => {
            let p: DvPayload = from_payload(env.payload)?;
            let m = parse_matrix(&p.matrix)?;
            let state = match p.dims[..] {
                [d] if d == m.rows() => DensityOperator::new(m)?,
                [a, b] => DensityOperator::bipartite(m, a, b)?,
                _ => return Err(CliError::Parse(format!("dims {:?} do not describe a {}-dimensional matrix", p.dims, m.rows()))),
            };
            if p.basis == Basis::Fock && p.dims.len() != 1 {
                return Err(CliError::Parse("a Fock-basis state must be single-mode".into()));
            }
            Ok(StateFile::Dv(DvFile { state, basis: p.basis }))
        }
        Kind::Gaussian => {
            let p: GaussianPayload = from_payload(env.payload)?;
            if p.convention != CONVENTION {
                return Err(CliError::Parse(format!("covariance convention must be {CONVENTION:?}, got {:?}", p.convention)));
            }
            let mut mean = Vector4::zeros();
            let mut cov = Matrix4::zeros();
            for i in 0..4 {
                mean[i] = parse_real(&p.mean[i])?;
                for j in 0..4 {
                    cov[(i, j)] = parse_real(&p.covariance[i][j])?;
                }
            }
            Ok(StateFile::Gaussian(GaussianState::new(mean, cov)?))
        }
        Kind::ShotRecord => {
            let p: ShotPayload = from_payload(env.payload)?;
            let (povm_a, povm_b) = (parse_povm(&p.povm_a)?, parse_povm(&p.povm_b)?);
            if [povm_a.dim(), povm_b.dim()] != p.dims {
                return Err(CliError::Parse(format!("POVM dimensions do not match dims {:?}", p.dims)));
            }
            let record = ShotRecord::new(povm_a, povm_b, p.counts, p.total, p.seed)?;
            Ok(StateFile::Shots(ShotFile { record, povm_seed: p.povm_seed }))
        }
        Kind::WignerGrid => {
            let p: GridPayload = from_payload(env.payload)?;
            let g = &p.geometry;
            let geometry = GridGeometry::new(
                parse_real(&g.x_min)?,
                parse_real(&g.x_max)?,
                parse_real(&g.p_min)?,
                parse_real(&g.p_max)?,
                g.nx,
                g.np,
            )?;
            if p.values.len() != g.nx || p.values.iter().any(|r| r.len() != g.np) {
                return Err(CliError::Parse(format!("grid values must be {}x{}", g.nx, g.np)));
            }
            let values = p.values.iter().flatten().map(|s| parse_real(s)).collect::<CliResult<_>>()?;
            let opt = |s: &Option<String>| s.as_deref().map(parse_real).transpose();
            Ok(StateFile::Grid(GridFile {
                grid: WignerGrid::new(geometry, values)?,
                uncertainty: opt(&p.uncertainty)?,
                imaginary_residue: opt(&p.imaginary_residue)?,
            }))
        }
    }
}

pub fn emit(file: &StateFile) -> String {
    let payload = match file {
        StateFile::Dv(f) => {
            let dims = match f.state.bipartition() {
                Some((a, b)) => vec![a, b],
                None => vec![f.state.dim()],
            };
            serde_json::to_value(DvPayload { dims, basis: f.basis, matrix: emit_matrix(f.state.matrix()) })
        }
        StateFile::Gaussian(g) => {
            let mean = std::array::from_fn(|i| fmt_real(g.mean()[i]));
            let covariance = std::array::from_fn(|i| std::array::from_fn(|j| fmt_real(g.cov()[(i, j)])));
            serde_json::to_value(GaussianPayload { convention: CONVENTION.to_string(), mean, covariance })
        }
        StateFile::Shots(s) => {
            let r = &s.record;
            serde_json::to_value(ShotPayload {
                dims: [r.povm_a.dim(), r.povm_b.dim()],
                povm_a: emit_povm(&r.povm_a),
                povm_b: emit_povm(&r.povm_b),
                povm_seed: s.povm_seed,
                counts: r.counts.clone(),
                total: r.total,
                seed: r.seed,
            })
        }
        StateFile::Grid(f) => {
            let g = f.grid.geometry();
            serde_json::to_value(GridPayload {
                geometry: GeometryPayload {
                    x_min: fmt_real(g.x_min),
                    x_max: fmt_real(g.x_max),
                    p_min: fmt_real(g.p_min),
                    p_max: fmt_real(g.p_max),
                    nx: g.nx,
                    np: g.np,
                },
                values: f.grid.values().chunks(g.np).map(|r| r.iter().map(|&v| fmt_real(v)).collect()).collect(),
                uncertainty: f.uncertainty.map(fmt_real),
                imaginary_residue: f.imaginary_residue.map(fmt_real),
            })
        }
    }
    .expect("payloads serialize");
    let env = Envelope { format_version: FORMAT_VERSION.to_string(), kind: file.kind(), payload };
    let mut s = serde_json::to_string_pretty(&env).expect("envelope serializes");
    s.push('\n');
    s
}
