//! Trial-parallel estimation runs.
//!
//! Trial `i` draws its circuits from `trial_rng(seed, domain, i)` and its
//! measurement from the `Shots` stream, and outcomes are reduced in trial
//! order, so the worker count never changes a result.

use rayon::prelude::*;

use crate::circuit::{rotation_resources, ResourceCount};
use crate::compiler::UrccCompiler;
use crate::error::{Error, Result};
use crate::estimator::{
    compensated_sum, group_of_trial, grouped_hoeffding_eps, MeasurementGroup,
    ObservableDecomposition,
};
use crate::hamiltonian::TimeDependentHamiltonian;
use crate::pauli::{Letter, PauliString};
use crate::qdrift::QdriftCompiler;
use crate::rng::{trial_rng, Domain};
use crate::sampling::SegmentPlan;
use crate::statevector::{
    ancilla_x, hadamard_state, parity_outcome, InitialState, Mode, StateVector,
};

/// Inputs shared by every trial of a run.
#[derive(Debug, Clone, Copy)]
pub struct RunSpec<'a> {
    pub h: &'a TimeDependentHamiltonian,
    pub plan: &'a SegmentPlan,
    pub psi: &'a InitialState,
    pub observable: &'a ObservableDecomposition,
    pub groups: &'a [MeasurementGroup],
    pub mode: Mode,
    pub seed: u64,
    pub workers: usize,
}

impl RunSpec<'_> {
    pub fn shots(&self) -> u64 {
        self.groups.iter().map(|g| g.shots).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Per-trial outcomes in trial order.
    pub outcomes: Vec<f64>,
    /// LCU normalization (1 for c-qDRIFT).
    pub c: f64,
}

impl RunResult {
    /// `(C² / M) Σ o`
    pub fn estimate(&self) -> f64 {
        self.c * self.c * compensated_sum(&self.outcomes) / self.outcomes.len() as f64
    }

    /// Sample standard deviation of `C² o`.
    pub fn std_dev(&self) -> f64 {
        let m = self.outcomes.len() as f64;
        if m < 2.0 {
            return 0.0;
        }
        let c2 = self.c * self.c;
        let mean = self.estimate();
        let dev: Vec<f64> = self
            .outcomes
            .iter()
            .map(|o| (c2 * o - mean).powi(2))
            .collect();
        (compensated_sum(&dev) / (m - 1.0)).sqrt()
    }

    /// `std / √M`
    pub fn std_error(&self) -> f64 {
        self.std_dev() / (self.outcomes.len() as f64).sqrt()
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(Error::InvalidArgument(
            "worker count must be positive".into(),
        ));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

fn parallel_trials<F>(m: u64, workers: usize, trial: F) -> Result<Vec<f64>>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    pool(workers)?.install(|| (0..m).into_par_iter().map(&trial).collect())
}

/// Outcome of one shot of `group` on `state`. With `ancilla`, the register
/// carries the Hadamard-test ancilla on qubit 0 and every component is
/// measured as `X ⊗ O^(k)`.
pub fn group_outcome<R: rand::Rng + ?Sized>(
    state: &StateVector,
    obs: &ObservableDecomposition,
    group: &MeasurementGroup,
    weight: f64,
    ancilla: bool,
    mode: Mode,
    rng: &mut R,
) -> Result<f64> {
    let lift = |p: &PauliString| if ancilla { ancilla_x(p) } else { p.clone() };
    match mode {
        Mode::Exact => group
            .members
            .iter()
            .map(|&k| {
                let (a, p) = &obs.components()[k];
                Ok(a * weight * state.expectation(&lift(p))?)
            })
            .sum(),
        Mode::Shot => {
            let basis = lift(&group.basis);
            let bits = state.sample_in_basis(&basis, rng)?;
            Ok(group
                .members
                .iter()
                .map(|&k| {
                    let (a, p) = &obs.components()[k];
                    a * weight * parity_outcome(&lift(p), bits, state.width())
                })
                .sum())
        }
    }
}

fn checked_group(spec: &RunSpec, i: u64) -> Result<usize> {
    group_of_trial(spec.groups, i)
        .ok_or_else(|| Error::InvalidArgument(format!("trial {i} has no group")))
}

/// Unbiased Hadamard-test estimation over `Σ_g M_g` trials.
pub fn run_urcc(spec: &RunSpec) -> Result<RunResult> {
    let compiler = UrccCompiler::new(spec.h, spec.plan)?;
    let m = spec.shots();
    let n = spec.h.num_qubits();
    let outcomes = parallel_trials(m, spec.workers, |i| {
        let g = checked_group(spec, i)?;
        let mut rng = trial_rng(spec.seed, Domain::Urcc, i);
        let pair = compiler.compile_pair(&mut rng)?;
        let state = hadamard_state(&pair, spec.psi, n)?;
        let mut shot = trial_rng(spec.seed, Domain::Shots, i);
        let group = &spec.groups[g];
        group_outcome(
            &state,
            spec.observable,
            group,
            group.weight(m),
            true,
            spec.mode,
            &mut shot,
        )
    })?;
    Ok(RunResult {
        outcomes,
        c: compiler.normalization(),
    })
}

/// c-qDRIFT estimation: one sampled rotation sequence per trial.
pub fn run_qdrift(spec: &RunSpec) -> Result<RunResult> {
    let compiler = QdriftCompiler::new(spec.h, spec.plan);
    let m = spec.shots();
    let n = spec.h.num_qubits();
    let outcomes = parallel_trials(m, spec.workers, |i| {
        let g = checked_group(spec, i)?;
        let mut rng = trial_rng(spec.seed, Domain::Qdrift, i);
        let mut state = StateVector::prepare(spec.psi, n)?;
        for s in compiler.compile(&mut rng)? {
            state.apply_rotation(&s.signed_pauli(), s.angle, None, 0)?;
        }
        let mut shot = trial_rng(spec.seed, Domain::Shots, i);
        let group = &spec.groups[g];
        group_outcome(
            &state,
            spec.observable,
            group,
            group.weight(m),
            false,
            spec.mode,
            &mut shot,
        )
    })?;
    Ok(RunResult { outcomes, c: 1.0 })
}

/// Grouped Hoeffding half-width for a finished run.
pub fn run_eps(spec: &RunSpec, result: &RunResult, delta: f64) -> Result<f64> {
    grouped_hoeffding_eps(spec.groups, result.c, spec.shots(), delta)
}

fn fieldwise_max(a: ResourceCount, b: ResourceCount) -> ResourceCount {
    ResourceCount {
        single_qubit: a.single_qubit.max(b.single_qubit),
        two_qubit: a.two_qubit.max(b.two_qubit),
        phase_gates: a.phase_gates.max(b.phase_gates),
    }
}

/// Per-field worst case of one Hadamard-test pair: every segment of both
/// branches at the costlier of a controlled rotation or a weight-`n`
/// Pauli product (all `Y`, controlled on 0, with a phase).
pub fn urcc_worst_case(h: &TimeDependentHamiltonian, n_seg: usize) -> ResourceCount {
    let n = h.num_qubits() as u64;
    let mut seg = ResourceCount {
        single_qubit: 2 * n + 3,
        two_qubit: n,
        phase_gates: 0,
    };
    for c in h.canonical_terms() {
        seg = fieldwise_max(seg, rotation_resources(&c.pauli, true));
    }
    ResourceCount {
        single_qubit: 2 * n_seg as u64 * seg.single_qubit,
        two_qubit: 2 * n_seg as u64 * seg.two_qubit,
        phase_gates: 2 * n_seg as u64 * seg.phase_gates,
    }
}

/// Per-field worst case of a c-qDRIFT sequence.
pub fn qdrift_worst_case(h: &TimeDependentHamiltonian, n_seg: usize) -> ResourceCount {
    let mut seg = ResourceCount::default();
    for t in h.terms() {
        seg = fieldwise_max(seg, rotation_resources(&t.pauli, false));
    }
    ResourceCount {
        single_qubit: n_seg as u64 * seg.single_qubit,
        two_qubit: n_seg as u64 * seg.two_qubit,
        phase_gates: n_seg as u64 * seg.phase_gates,
    }
}

/// c-qDRIFT segment count whose worst-case two-qubit count matches a URCC
/// pair on `n_seg_urcc` segments.
pub fn matched_qdrift_segments(h: &TimeDependentHamiltonian, n_seg_urcc: usize) -> usize {
    let target = urcc_worst_case(h, n_seg_urcc).two_qubit;
    let per = qdrift_worst_case(h, 1).two_qubit.max(1);
    ((target as f64 / per as f64).round() as usize).max(1)
}

/// Unsigned `Z` on every qubit of `n`.
pub fn all_z(n: usize) -> PauliString {
    PauliString::from_letters(&vec![Letter::Z; n], 0)
}
