//! The four verification pipelines. Each returns a [`Report`]; commands
//! that produce data files return them alongside.

use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde_json::Value;

use qdiscord::dv::{condition_on_povm_of, verify_commutativity_with, CommutativityOptions, DEFAULT_DEGENERACY_THRESHOLD};
use qdiscord::gaussian::{peak_coincidence_test, standard_form, zero_discord_routes, GaussianState};
use qdiscord::phase_space::{grid_max_abs, moyal_commutator, wigner_from_fock, FockOperator, GridGeometry, WignerGrid};
use qdiscord::povm::{default_ic_povm, dual_frame, random_ic_povm, sic_qubit, Povm};
use qdiscord::tomo::{estimate_conditionals, sample_joint, significant_commutativity_with, SignificanceOptions, ShotRecord};
use qdiscord::{DensityOperator, Subsystem};

use crate::error::{CliError, CliResult};
use crate::format::{self, Basis, GridFile, ShotFile, StateFile};
use crate::report::{pair, real, reals, seed, InputDigest, Pipeline, Report};

/// A parsed input together with the digest of its exact bytes.
#[derive(Clone, Debug)]
pub struct Input {
    pub file: StateFile,
    pub digest: InputDigest,
}

impl Input {
    pub fn from_bytes(bytes: &[u8]) -> CliResult<Self> {
        let text = std::str::from_utf8(bytes).map_err(|e| CliError::Parse(e.to_string()))?;
        let file = format::parse(text)?;
        let digest = InputDigest::new(file.kind(), bytes);
        Ok(Self { file, digest })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let path = crate::resolve_input(path);
        let bytes = std::fs::read(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
        Self::from_bytes(&bytes)
    }
}

fn wrong_kind(expected: &str, input: &Input) -> CliError {
    CliError::Usage(format!("expected a {expected} file, got {}", input.file.kind().as_str()))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PovmChoice {
    /// SIC on qubits, seeded random IC-POVM otherwise.
    #[default]
    Default,
    Sic,
    Random,
}

impl FromStr for PovmChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "default" => Ok(Self::Default),
            "sic" => Ok(Self::Sic),
            "random" => Ok(Self::Random),
            _ => Err(format!("unknown POVM {s:?} (expected default, sic or random)")),
        }
    }
}

fn build_povm(choice: PovmChoice, dim: usize, seed: u64) -> CliResult<(Povm, &'static str)> {
    Ok(match choice {
        PovmChoice::Sic if dim != 2 => return Err(CliError::Usage(format!("the SIC POVM is only built in for qubits, not d = {dim}"))),
        PovmChoice::Sic => (sic_qubit(), "sic"),
        PovmChoice::Default if dim == 2 => (sic_qubit(), "sic"),
        PovmChoice::Default | PovmChoice::Random => (random_ic_povm(dim, seed)?, "random"),
    })
}

#[derive(Clone, Copy, Debug)]
pub struct DvOptions {
    pub povm: PovmChoice,
    pub povm_seed: u64,
    pub threshold: f64,
    /// Subsystem carrying the IC measurement; the other one is conditioned.
    pub measured: Subsystem,
}

impl Default for DvOptions {
    fn default() -> Self {
        Self { povm: PovmChoice::Default, povm_seed: 0, threshold: qdiscord::dv::DEFAULT_COMMUTATOR_THRESHOLD, measured: Subsystem::A }
    }
}

pub fn verify_dv(input: &Input, opts: &DvOptions) -> CliResult<Report> {
    let StateFile::Dv(f) = &input.file else { return Err(wrong_kind("dv_density", input)) };
    let (da, db) = f.state.require_bipartition()?;
    let measured_dim = if opts.measured == Subsystem::A { da } else { db };
    let (povm, povm_name) = build_povm(opts.povm, measured_dim, opts.povm_seed)?;
    let e = condition_on_povm_of(&f.state, &povm, opts.measured)?;
    let copts = CommutativityOptions { threshold: opts.threshold, degeneracy_threshold: DEFAULT_DEGENERACY_THRESHOLD };
    let v = verify_commutativity_with(&e, copts);

    let mut r = Report::new(Pipeline::DvExact, vec![input.digest.clone()], v.verdict.as_str());
    let w = &mut r.witness;
    w.insert("dims".into(), Value::from(vec![da, db]));
    w.insert("measured_subsystem".into(), Value::from(if opts.measured == Subsystem::A { "A" } else { "B" }));
    w.insert("povm".into(), Value::from(povm_name));
    w.insert("outcomes".into(), Value::from(povm.len()));
    w.insert("present_outcomes".into(), Value::from(e.present().len()));
    w.insert("max_commutator_norm".into(), real(v.max_commutator_norm));
    w.insert("witness_pair".into(), v.witness_pair.map_or(Value::Null, pair));
    w.insert("anchor_index".into(), v.anchor_index.map_or(Value::Null, Value::from));
    w.insert("checked_pairs".into(), Value::from(v.checked_pairs));
    r.thresholds.insert("commutator".into(), real(v.threshold));
    r.thresholds.insert("degeneracy".into(), real(copts.degeneracy_threshold));
    r.thresholds.insert("zero_probability".into(), real(qdiscord::dv::ZERO_PROBABILITY_FLOOR));
    if povm_name == "random" {
        r.seeds.insert("povm".into(), seed(opts.povm_seed));
    }
    Ok(r)
}

/// Parses `"x1,p1;x1',p1'"` into two heterodyne outcomes x + ip.
pub fn parse_outcomes(s: &str) -> CliResult<[Complex64; 2]> {
    let bad = || CliError::Usage(format!("outcomes must look like \"x1,p1;x1',p1'\", got {s:?}"));
    let parts: Vec<&str> = s.split(';').collect();
    if parts.len() != 2 {
        return Err(bad());
    }
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (o, part) in out.iter_mut().zip(parts) {
        let xp: Vec<&str> = part.split(',').collect();
        if xp.len() != 2 {
            return Err(bad());
        }
        let x = xp[0].trim().parse::<f64>().map_err(|_| bad())?;
        let p = xp[1].trim().parse::<f64>().map_err(|_| bad())?;
        *o = Complex64::new(x, p);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GaussianDecision {
    /// Verdict from the separation of two conditional peaks.
    #[default]
    Peak,
    /// Verdict from the cross-correlation block.
    Covariance,
}

impl FromStr for GaussianDecision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "peak" => Ok(Self::Peak),
            "cov" => Ok(Self::Covariance),
            _ => Err(format!("unknown decision route {s:?} (expected peak or cov)")),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GaussianOptions {
    pub outcomes: [Complex64; 2],
    pub tol: f64,
    pub decision: GaussianDecision,
}

impl Default for GaussianOptions {
    fn default() -> Self {
        Self {
            outcomes: [Complex64::new(0.0, 0.0), Complex64::new(1.0, 1.0)],
            tol: qdiscord::gaussian::DEFAULT_DECISION_TOLERANCE,
            decision: GaussianDecision::Peak,
        }
    }
}

fn complex_value(z: Complex64) -> Value {
    reals(&[z.re, z.im])
}

pub fn verify_gaussian(input: &Input, opts: &GaussianOptions) -> CliResult<Report> {
    let StateFile::Gaussian(g) = &input.file else { return Err(wrong_kind("gaussian", input)) };
    let g: &GaussianState = g;
    let routes = zero_discord_routes(g, opts.tol)?;
    let sf = standard_form(g)?;
    let peaks = peak_coincidence_test(&sf, opts.outcomes[0], opts.outcomes[1], opts.tol)?;

    let (pipeline, verdict) = match opts.decision {
        GaussianDecision::Peak => (Pipeline::GaussianPeak, peaks.verdict),
        GaussianDecision::Covariance => (Pipeline::GaussianCov, routes.verdict()),
    };
    let mut r = Report::new(pipeline, vec![input.digest.clone()], verdict.as_str());
    let w = &mut r.witness;
    w.insert("standard_form".into(), reals(&[sf.a, sf.b, sf.c, sf.d]));
    w.insert("outcomes".into(), Value::Array(vec![complex_value(peaks.outcome_1), complex_value(peaks.outcome_2)]));
    w.insert("peaks".into(), Value::Array(vec![complex_value(peaks.peak_1), complex_value(peaks.peak_2)]));
    w.insert("peak_separation".into(), real(peaks.separation));
    w.insert("peak_verdict".into(), Value::from(peaks.verdict.as_str()));
    w.insert("cross_block_max".into(), real(routes.cross_block_max));
    w.insert("standard_form_cross_max".into(), real(routes.standard_form_max));
    w.insert("covariance_verdict".into(), Value::from(routes.verdict().as_str()));
    w.insert("routes_agree".into(), Value::from(routes.agree() && routes.verdict() == peaks.verdict));
    w.insert("min_uncertainty_eigenvalue".into(), real(g.min_uncertainty_eigenvalue()));
    r.thresholds.insert("decision".into(), real(opts.tol));
    r.thresholds.insert("physicality".into(), real(qdiscord::gaussian::PHYSICALITY_TOLERANCE));
    r.notes.push(format!("covariance convention {}", qdiscord::gaussian::CONVENTION));
    Ok(r)
}

#[derive(Clone, Copy, Debug)]
pub struct MoyalOptions {
    /// Geometry used for Fock-basis inputs.
    pub geometry: GridGeometry,
    /// Magnitude below which a grid without uncertainty counts as zero.
    pub threshold: f64,
    pub z_threshold: f64,
}

impl Default for MoyalOptions {
    fn default() -> Self {
        Self { geometry: GridGeometry::default(), threshold: 1e-6, z_threshold: qdiscord::tomo::DEFAULT_Z_THRESHOLD }
    }
}

fn wigner_input(input: &Input, geom: &GridGeometry) -> CliResult<(WignerGrid, Option<f64>)> {
    match &input.file {
        StateFile::Grid(f) => Ok((f.grid.clone(), f.uncertainty)),
        StateFile::Dv(f) if f.basis == Basis::Fock => {
            Ok((wigner_from_fock(&FockOperator::from_density(&f.state), geom)?, None))
        }
        _ => Err(wrong_kind("wigner_grid or Fock-basis dv_density", input)),
    }
}

fn l1_norm(w: &WignerGrid) -> f64 {
    w.values().iter().map(|v| v.abs()).sum::<f64>() * w.geometry().cell_area()
}

/// Commutator distribution of two single-mode states; the grid of
/// W_{kk'} is returned for emission.
pub fn moyal(a: &Input, b: &Input, opts: &MoyalOptions) -> CliResult<(Report, GridFile)> {
    let (wa, ua) = wigner_input(a, &opts.geometry)?;
    let (wb, ub) = wigner_input(b, &opts.geometry)?;
    let c = moyal_commutator(&wa, &wb)?;
    let (max_abs, loc) = grid_max_abs(&c);
    let geom = *c.geometry();

    // W_{kk'} = (8/π)∫∫ W_a W_b sin(…): a sup-norm error σ on one factor moves
    // it by at most (8/π)·σ·area·‖W_other‖₁.
    let band = match (ua, ub) {
        (None, None) => None,
        (ua, ub) => {
            let area = (geom.x_max - geom.x_min) * (geom.p_max - geom.p_min);
            let k = 8.0 / std::f64::consts::PI * area;
            Some(k * (ua.unwrap_or(0.0) * l1_norm(&wb) + ub.unwrap_or(0.0) * l1_norm(&wa)))
        }
    };
    let (verdict, z) = match band {
        Some(band) => {
            let z = if band > 0.0 { max_abs / band } else if max_abs > opts.threshold { f64::INFINITY } else { 0.0 };
            (z > opts.z_threshold, Some(z))
        }
        None => (max_abs > opts.threshold, None),
    };
    let verdict = if verdict { qdiscord::dv::Verdict::NonzeroDiscord } else { qdiscord::dv::Verdict::ConsistentWithZero };

    let mut r = Report::new(Pipeline::CvMoyal, vec![a.digest.clone(), b.digest.clone()], verdict.as_str());
    let w = &mut r.witness;
    w.insert("max_abs".into(), real(max_abs));
    w.insert("location".into(), pair(loc));
    w.insert("location_xp".into(), reals(&[geom.x(loc.0), geom.p(loc.1)]));
    w.insert("integral".into(), real(c.integral()));
    w.insert("imaginary_residue".into(), real(c.imaginary_residue()));
    w.insert("grid".into(), Value::from(vec![geom.nx, geom.np]));
    w.insert("extent".into(), reals(&[geom.x_min, geom.x_max, geom.p_min, geom.p_max]));
    if let (Some(band), Some(z)) = (band, z) {
        w.insert("uncertainty_band".into(), real(band));
        w.insert("z_score".into(), real(z));
        r.thresholds.insert("z".into(), real(opts.z_threshold));
    } else {
        r.thresholds.insert("max_abs".into(), real(opts.threshold));
    }
    Ok((r, GridFile::from_commutator(&c)))
}

#[derive(Clone, Copy, Debug)]
pub struct TomoOptions {
    pub shots: u64,
    pub seed: u64,
    pub z_threshold: f64,
    pub bootstrap_resamples: usize,
    pub povm_seed: u64,
}

impl Default for TomoOptions {
    fn default() -> Self {
        Self {
            shots: 100_000,
            seed: 0,
            z_threshold: qdiscord::tomo::DEFAULT_Z_THRESHOLD,
            bootstrap_resamples: qdiscord::tomo::DEFAULT_BOOTSTRAP_RESAMPLES,
            povm_seed: 0,
        }
    }
}

/// Simulated tomography of B conditioned on an IC measurement of A. A
/// shot-record input is replayed: its counts, POVMs and seed replace the
/// sampling step and the flags that would configure it.
pub fn tomo(input: &Input, opts: &TomoOptions) -> CliResult<(Report, ShotFile)> {
    let shots = match &input.file {
        StateFile::Dv(f) => {
            let rho: &DensityOperator = &f.state;
            let (da, db) = rho.require_bipartition()?;
            let povm_a = default_ic_povm(da, opts.povm_seed)?;
            let povm_b = default_ic_povm(db, opts.povm_seed)?;
            let seeded = da != 2 || db != 2;
            let record = sample_joint(rho, &povm_a, &povm_b, opts.shots, opts.seed)?;
            ShotFile { record, povm_seed: seeded.then_some(opts.povm_seed) }
        }
        StateFile::Shots(s) => s.clone(),
        _ => return Err(wrong_kind("dv_density or shot_record", input)),
    };
    let rec: &ShotRecord = &shots.record;
    let est = estimate_conditionals(rec, &dual_frame(&rec.povm_b)?)?;
    let sopts = SignificanceOptions {
        z_threshold: opts.z_threshold,
        bootstrap_resamples: opts.bootstrap_resamples,
        bootstrap_seed: rec.seed,
        ..Default::default()
    };
    let v = significant_commutativity_with(&est, &sopts)?;

    let mut r = Report::new(Pipeline::DvTomo, vec![input.digest.clone()], v.verdict.as_str());
    let w = &mut r.witness;
    w.insert("dims".into(), Value::from(vec![rec.povm_a.dim(), rec.povm_b.dim()]));
    w.insert("shots".into(), Value::from(rec.total));
    w.insert("present_outcomes".into(), Value::from(est.present().len()));
    w.insert("pairs".into(), Value::from(v.pairs));
    w.insert("max_norm".into(), real(v.max_norm));
    w.insert("witness_pair".into(), pair(v.witness_pair));
    w.insert("witness_norm".into(), real(v.witness_norm));
    w.insert("norm_stderr".into(), real(v.norm_stderr));
    w.insert("bootstrap_stderr".into(), v.bootstrap_stderr.map_or(Value::Null, real));
    w.insert("z_score".into(), real(v.z_score));
    r.thresholds.insert("z".into(), real(v.z_threshold));
    r.thresholds.insert("commutator".into(), real(sopts.commutator_threshold));
    r.seeds.insert("sampling".into(), seed(rec.seed));
    r.seeds.insert("bootstrap".into(), seed(sopts.bootstrap_seed));
    r.seeds.insert("bootstrap_resamples".into(), Value::from(sopts.bootstrap_resamples));
    if let Some(s) = shots.povm_seed {
        r.seeds.insert("povm".into(), seed(s));
    }
    r.notes.push(
        "z_score is the largest over outcome pairs of commutator norm divided by its first-order propagated \
         standard error; NONZERO_DISCORD exactly when z_score exceeds the z threshold"
            .into(),
    );
    Ok((r, shots))
}
