//! The commutativity criterion for discrete-variable bipartite states.
//!
//! An IC-POVM {M_k} is measured on A; the conditional states
//! ρ_{B|k} = Tr_A[(M_k ⊗ I) ρ] / p_k pairwise commute if and only if the
//! discord from B to A vanishes.

mod estimator;
mod generate;

use rayon::prelude::*;

pub use estimator::{discord_estimate_2q, discord_estimate_2q_with, DiscordEstimate, EstimatorOptions};
pub use generate::{generate_maximally_entangled, generate_zero_discord};

use crate::error::{Error, Result};
use crate::linalg::{commutator, tensor, ComplexMatrix};
use crate::povm::{DualFrame, Povm};
use crate::state::{apply_effect_trace_a, DensityOperator, Subsystem};

/// Outcomes with probability at or below this are treated as absent.
pub const ZERO_PROBABILITY_FLOOR: f64 = 1e-12;
pub const DEFAULT_DEGENERACY_THRESHOLD: f64 = 1e-8;
pub const DEFAULT_COMMUTATOR_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    NonzeroDiscord,
    ConsistentWithZero,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NonzeroDiscord => "NONZERO_DISCORD",
            Verdict::ConsistentWithZero => "CONSISTENT_WITH_ZERO",
        }
    }

    pub fn is_nonzero(self) -> bool {
        self == Verdict::NonzeroDiscord
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome probabilities of a POVM on one subsystem together with the
/// conditional states of the other.
#[derive(Clone, Debug)]
pub struct ConditionalEnsemble {
    probabilities: Vec<f64>,
    states: Vec<Option<DensityOperator>>,
    povm: Povm,
}

impl ConditionalEnsemble {
    /// Assemble an ensemble from already computed parts (e.g. tomographic
    /// estimates). `states[k]` is `None` for absent outcomes.
    pub fn from_parts(probabilities: Vec<f64>, states: Vec<Option<DensityOperator>>, povm: Povm) -> Result<Self> {
        if probabilities.len() != states.len() || states.len() != povm.len() {
            return Err(Error::DimMismatch(format!(
                "{} probabilities, {} states, {} effects",
                probabilities.len(),
                states.len(),
                povm.len()
            )));
        }
        let dims: Vec<usize> = states.iter().flatten().map(DensityOperator::dim).collect();
        if dims.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::DimMismatch("conditional states of different dimension".into()));
        }
        Ok(Self { probabilities, states, povm })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn state(&self, k: usize) -> Option<&DensityOperator> {
        self.states[k].as_ref()
    }

    pub fn states(&self) -> &[Option<DensityOperator>] {
        &self.states
    }

    pub fn source_povm(&self) -> &Povm {
        &self.povm
    }

    /// Indices of outcomes whose conditional state is defined.
    pub fn present(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.states[k].is_some()).collect()
    }
}

/// Condition the B factor on outcomes of `povm` measured on A.
pub fn condition_on_povm(rho: &DensityOperator, povm: &Povm) -> Result<ConditionalEnsemble> {
    condition_on_povm_with_floor(rho, povm, ZERO_PROBABILITY_FLOOR)
}

pub fn condition_on_povm_with_floor(rho: &DensityOperator, povm: &Povm, floor: f64) -> Result<ConditionalEnsemble> {
    let (da, db) = rho.require_bipartition()?;
    if povm.dim() != da {
        return Err(Error::DimMismatch(format!("POVM acts on dimension {} but subsystem A has {da}", povm.dim())));
    }
    let mut probabilities = Vec::with_capacity(povm.len());
    let mut states = Vec::with_capacity(povm.len());
    for m in povm.effects() {
        let unnormalised = apply_effect_trace_a(rho.matrix(), m, da, db).hermitian_part();
        let p = unnormalised.trace().re;
        probabilities.push(p);
        states.push((p > floor).then(|| DensityOperator::from_parts_unchecked(unnormalised.scale_real(1.0 / p), None)));
    }
    ConditionalEnsemble::from_parts(probabilities, states, povm.clone())
}

/// Condition on a POVM measured on `measured`; the returned ensemble holds
/// states of the other subsystem.
pub fn condition_on_povm_of(rho: &DensityOperator, povm: &Povm, measured: Subsystem) -> Result<ConditionalEnsemble> {
    match measured {
        Subsystem::A => condition_on_povm(rho, povm),
        Subsystem::B => condition_on_povm(&rho.swap_subsystems()?, povm),
    }
}

/// Index of the conditional state with the largest eigenvalue gap, if that
/// gap exceeds `degeneracy_threshold`. Gaps within 1e-12 of the best count
/// as ties and resolve to the lowest index.
pub fn select_anchor(e: &ConditionalEnsemble, degeneracy_threshold: f64) -> Option<usize> {
    let gaps: Vec<(usize, f64)> =
        e.present().into_iter().map(|k| (k, e.states[k].as_ref().unwrap().eig().degeneracy_gap())).collect();
    let best = gaps.iter().map(|&(_, g)| g).fold(f64::NEG_INFINITY, f64::max);
    if !(best > degeneracy_threshold) {
        return None;
    }
    gaps.iter().find(|&&(_, g)| g >= best - 1e-12).map(|&(k, _)| k)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommutativityVerdict {
    pub verdict: Verdict,
    pub max_commutator_norm: f64,
    pub witness_pair: Option<(usize, usize)>,
    pub anchor_index: Option<usize>,
    pub checked_pairs: usize,
    pub threshold: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutativityOptions {
    pub threshold: f64,
    pub degeneracy_threshold: f64,
}

impl Default for CommutativityOptions {
    fn default() -> Self {
        Self { threshold: DEFAULT_COMMUTATOR_THRESHOLD, degeneracy_threshold: DEFAULT_DEGENERACY_THRESHOLD }
    }
}

fn commutator_norm(a: &DensityOperator, b: &DensityOperator) -> f64 {
    commutator(a.matrix(), b.matrix()).expect("conditional states share a dimension").frobenius_norm()
}

pub fn verify_commutativity(e: &ConditionalEnsemble, threshold: f64) -> CommutativityVerdict {
    verify_commutativity_with(e, CommutativityOptions { threshold, ..Default::default() })
}

/// Anchor-first commutativity test. With a nondegenerate anchor only the
/// anchor-versus-others commutators are evaluated; otherwise every pair is.
/// Stops at the first commutator whose Frobenius norm exceeds the threshold.
pub fn verify_commutativity_with(e: &ConditionalEnsemble, opts: CommutativityOptions) -> CommutativityVerdict {
    let present = e.present();
    let anchor = select_anchor(e, opts.degeneracy_threshold);
    let mut out = CommutativityVerdict {
        verdict: Verdict::ConsistentWithZero,
        max_commutator_norm: 0.0,
        witness_pair: None,
        anchor_index: anchor,
        checked_pairs: 0,
        threshold: opts.threshold,
    };
    let state = |k: usize| e.states[k].as_ref().unwrap();

    if let Some(a) = anchor {
        for &k in present.iter().filter(|&&k| k != a) {
            let norm = commutator_norm(state(a), state(k));
            out.checked_pairs += 1;
            out.max_commutator_norm = out.max_commutator_norm.max(norm);
            if norm > opts.threshold {
                out.verdict = Verdict::NonzeroDiscord;
                out.witness_pair = Some((a, k));
                return out;
            }
        }
        // an anchor whose gap is below the commutator tolerance cannot certify
        // the remaining pairs, so only a well separated one ends the search
        if state(a).eig().degeneracy_gap() > opts.threshold {
            return out;
        }
    }

    let pairs: Vec<(usize, usize)> = present
        .iter()
        .enumerate()
        .flat_map(|(i, &j)| present[i + 1..].iter().map(move |&k| (j, k)))
        .collect();
    // evaluated in parallel, reduced in pair order so the witness is schedule independent
    let norms: Vec<f64> = pairs.par_iter().map(|&(j, k)| commutator_norm(state(j), state(k))).collect();
    for (&pair, &norm) in pairs.iter().zip(&norms) {
        out.checked_pairs += 1;
        out.max_commutator_norm = out.max_commutator_norm.max(norm);
        if norm > opts.threshold {
            out.verdict = Verdict::NonzeroDiscord;
            out.witness_pair = Some(pair);
            break;
        }
    }
    out
}

/// Σ_k p_k N_k ⊗ ρ_{B|k}: the joint state rebuilt from the ensemble and the
/// dual frame of its POVM. Absent outcomes contribute nothing.
pub fn reconstruct_joint(e: &ConditionalEnsemble, duals: &DualFrame) -> Result<DensityOperator> {
    if duals.len() != e.len() {
        return Err(Error::DimMismatch(format!("{} dual operators for {} outcomes", duals.len(), e.len())));
    }
    let da = e.povm.dim();
    if duals.operator(0).rows() != da {
        return Err(Error::DimMismatch("dual frame dimension differs from POVM".into()));
    }
    let db = e
        .states
        .iter()
        .flatten()
        .map(DensityOperator::dim)
        .next()
        .ok_or(Error::InsufficientOutcomes(0))?;
    let mut joint = ComplexMatrix::zeros(da * db, da * db);
    for k in e.present() {
        let term = tensor(duals.operator(k), e.states[k].as_ref().unwrap().matrix()).scale_real(e.probabilities[k]);
        joint += &term;
    }
    Ok(DensityOperator::from_parts_unchecked(joint.hermitian_part(), Some((da, db))))
}
