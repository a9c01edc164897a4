//! Experiment configurations and CSV reports behind the command-line tool.

use std::path::Path;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{count_resources, lower_pair, lower_sequence, t_count_ratio, ResourceCount};
use crate::compiler::UrccCompiler;
use crate::error::{Error, Result};
use crate::estimator::{
    group_ldf, qdrift_total_error, singleton_groups, MeasurementGroup, ObservableDecomposition,
    DEFAULT_DELTA,
};
use crate::hamiltonian::{HamiltonianFile, TimeDependentHamiltonian};
use crate::models::{adiabatic_toy, spin_chain};
use crate::oracle::{
    algorithmic_error, exact_expectation, exact_propagator, ground_energy, static_matrix,
};
use crate::pauli::{Letter, PauliString};
use crate::pipeline::{
    matched_qdrift_segments, qdrift_worst_case, run_eps, run_qdrift, run_urcc, urcc_worst_case,
    RunSpec,
};
use crate::qdrift::{self, QdriftCompiler};
use crate::rng::{trial_rng, Domain};
use crate::sampling::SegmentPlan;
use crate::statevector::{InitialState, Mode};

pub const DEFAULT_LAMBDA_TARGET: f64 = 0.2;
pub const DEFAULT_ORACLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Urcc,
    Cqdrift,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Urcc => "urcc",
            Method::Cqdrift => "cqdrift",
        }
    }
}

/// JSON experiment description. Every field has a default; `seed` must be
/// given here or on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `"spin"`, `"adiabatic-toy"` or a path to a Hamiltonian JSON file.
    pub hamiltonian: Option<String>,
    pub n: usize,
    pub j: f64,
    pub omega: f64,
    pub tau: Option<f64>,
    pub lambda_target: Option<f64>,
    pub initial_state: Option<InitialState>,
    /// Single Pauli observable such as `"XII"`.
    pub observable: Option<String>,
    /// Path to an observable decomposition JSON file.
    pub observable_file: Option<String>,
    pub m_values: Option<Vec<u64>>,
    pub delta: f64,
    pub mode: Mode,
    pub methods: Vec<Method>,
    /// c-qDRIFT segment counts; empty means "match the URCC two-qubit count".
    pub qdrift_segments: Vec<usize>,
    pub grouping: bool,
    pub seed: Option<u64>,
    pub oracle_tol: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            hamiltonian: None,
            n: 3,
            j: 0.1,
            omega: 1.0,
            tau: None,
            lambda_target: None,
            initial_state: None,
            observable: None,
            observable_file: None,
            m_values: None,
            delta: DEFAULT_DELTA,
            mode: Mode::Shot,
            methods: vec![Method::Urcc, Method::Cqdrift],
            qdrift_segments: Vec::new(),
            grouping: true,
            seed: None,
            oracle_tol: DEFAULT_ORACLE_TOL,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate_fields()?;
        Ok(cfg)
    }

    fn validate_fields(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "delta {} outside (0, 1)",
                self.delta
            )));
        }
        if let Some(ms) = &self.m_values {
            if ms.is_empty() || ms.contains(&0) {
                return Err(Error::InvalidArgument(
                    "m_values must be non-empty and positive".into(),
                ));
            }
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument("no methods selected".into()));
        }
        if self.qdrift_segments.contains(&0) {
            return Err(Error::InvalidArgument(
                "c-qDRIFT segment counts must be positive".into(),
            ));
        }
        if let Some(l) = self.lambda_target {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidArgument(format!("lambda_target {l}")));
            }
        }
        if let Some(t) = self.tau {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidArgument(format!("tau {t}")));
            }
        }
        if !(self.oracle_tol >= 1e-13) {
            return Err(Error::InvalidArgument(format!(
                "oracle_tol {}",
                self.oracle_tol
            )));
        }
        if self.n == 0 || !self.j.is_finite() || !self.omega.is_finite() {
            return Err(Error::InvalidArgument("invalid spin parameters".into()));
        }
        Ok(())
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::InvalidArgument("a seed is required (--seed or \"seed\")".into()))
    }
}

fn read(path: &str) -> Result<String> {
    Ok(std::fs::read_to_string(Path::new(path))?)
}

/// Default spin-chain start `|1010…⟩`.
fn alternating(n: usize) -> String {
    (0..n).map(|q| if q % 2 == 0 { '1' } else { '0' }).collect()
}

struct Problem {
    h: TimeDependentHamiltonian,
    file: Option<HamiltonianFile>,
}

fn load_problem(cfg: &ExperimentConfig, default: &str) -> Result<Problem> {
    let source = cfg.hamiltonian.as_deref().unwrap_or(default);
    match source {
        "spin" => Ok(Problem {
            h: spin_chain(
                cfg.n,
                cfg.j,
                cfg.omega,
                cfg.tau.unwrap_or(std::f64::consts::PI),
            )?,
            file: None,
        }),
        "adiabatic-toy" => {
            let file = adiabatic_toy(crate::models::ADIABATIC_TOY_TAU);
            Ok(Problem {
                h: file.build(cfg.tau)?,
                file: Some(file),
            })
        }
        path => {
            let file = HamiltonianFile::from_json(&read(path)?)?;
            Ok(Problem {
                h: file.build(cfg.tau)?,
                file: Some(file),
            })
        }
    }
}

fn load_observable(
    cfg: &ExperimentConfig,
    fallback: impl FnOnce() -> Result<ObservableDecomposition>,
) -> Result<ObservableDecomposition> {
    match (&cfg.observable, &cfg.observable_file) {
        (Some(_), Some(_)) => Err(Error::InvalidArgument(
            "give either observable or observable_file".into(),
        )),
        (Some(label), None) => ObservableDecomposition::single(label.parse()?),
        (None, Some(path)) => ObservableDecomposition::from_json(&read(path)?),
        (None, None) => fallback(),
    }
}

/// Default target: 0.2, lowered to `0.5 / Λ` for long evolutions so that
/// `C² = exp(2Λ²/N_seg)` stays near `e`.
pub fn default_lambda_target(h: &TimeDependentHamiltonian) -> f64 {
    let total = h.total_lambda();
    if total > 0.0 {
        DEFAULT_LAMBDA_TARGET.min(0.5 / total)
    } else {
        DEFAULT_LAMBDA_TARGET
    }
}

fn groups_for(
    cfg: &ExperimentConfig,
    obs: &ObservableDecomposition,
    m: u64,
) -> Result<Vec<MeasurementGroup>> {
    if cfg.grouping {
        group_ldf(obs, m)
    } else {
        singleton_groups(obs, m)
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: Method,
    pub m: u64,
    pub n_seg: usize,
    pub o_est: f64,
    pub eps_tot: f64,
    pub c: f64,
    pub resources: ResourceCount,
    pub t_ratio: f64,
    pub oracle_value: f64,
    pub groups: usize,
    pub nonadiabatic_error: Option<f64>,
}

impl ResultRow {
    pub fn abs_error(&self) -> f64 {
        (self.o_est - self.oracle_value).abs()
    }
}

pub const CSV_COLUMNS: [&str; 12] = [
    "method",
    "M",
    "N_seg",
    "O_est",
    "eps_tot",
    "C",
    "gates_1q",
    "gates_2q",
    "phase_gates",
    "t_ratio",
    "oracle_value",
    "abs_error",
];

fn num(x: f64) -> Result<String> {
    if !x.is_finite() {
        return Err(Error::Numerical(format!("non-finite report value {x}")));
    }
    Ok(format!("{x:?}"))
}

/// Renders rows; adiabatic runs add `groups` and `nonadiabatic_error`.
pub fn write_csv(rows: &[ResultRow], adiabatic: bool) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = CSV_COLUMNS.to_vec();
    if adiabatic {
        header.extend(["groups", "nonadiabatic_error"]);
    }
    w.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![
            r.method.label().to_string(),
            r.m.to_string(),
            r.n_seg.to_string(),
            num(r.o_est)?,
            num(r.eps_tot)?,
            num(r.c)?,
            r.resources.single_qubit.to_string(),
            r.resources.two_qubit.to_string(),
            r.resources.phase_gates.to_string(),
            num(r.t_ratio)?,
            num(r.oracle_value)?,
            num(r.abs_error())?,
        ];
        if adiabatic {
            rec.push(r.groups.to_string());
            rec.push(num(r.nonadiabatic_error.unwrap_or(0.0))?);
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    h: &'a TimeDependentHamiltonian,
    psi: InitialState,
    obs: ObservableDecomposition,
    oracle_value: f64,
    seed: u64,
    workers: usize,
    nonadiabatic_error: Option<f64>,
}

impl Context<'_> {
    fn rows(&self, m_values: &[u64]) -> Result<Vec<ResultRow>> {
        let cfg = self.cfg;
        let lambda_target = cfg
            .lambda_target
            .unwrap_or_else(|| default_lambda_target(self.h));
        let plan = SegmentPlan::plan(self.h, lambda_target)?;
        let n_urcc = plan.n_seg();
        let qd_segments = if cfg.qdrift_segments.is_empty() {
            vec![matched_qdrift_segments(self.h, n_urcc)]
        } else {
            cfg.qdrift_segments.clone()
        };
        let mut rows = Vec::new();
        for &method in &cfg.methods {
            match method {
                Method::Urcc => {
                    let worst = urcc_worst_case(self.h, n_urcc);
                    let t_ratio = t_count_ratio(qd_segments[0] as u64, n_urcc as u64)?;
                    for &m in m_values {
                        let groups = groups_for(cfg, &self.obs, m)?;
                        let spec = self.spec(&plan, &groups);
                        let result = run_urcc(&spec)?;
                        rows.push(ResultRow {
                            method,
                            m,
                            n_seg: n_urcc,
                            o_est: result.estimate(),
                            eps_tot: run_eps(&spec, &result, cfg.delta)?,
                            c: result.c,
                            resources: worst,
                            t_ratio,
                            oracle_value: self.oracle_value,
                            groups: groups.len(),
                            nonadiabatic_error: self.nonadiabatic_error,
                        });
                    }
                }
                Method::Cqdrift => {
                    for &n_qd in &qd_segments {
                        let plan_qd = SegmentPlan::with_segments(self.h, n_qd)?;
                        let psi = self.psi.amplitudes(self.h.num_qubits())?;
                        let eps_alg =
                            algorithmic_error(self.h, &plan_qd, &psi, &self.obs, cfg.oracle_tol)?;
                        let t_ratio = t_count_ratio(n_qd as u64, n_urcc as u64)?;
                        for &m in m_values {
                            let groups = groups_for(cfg, &self.obs, m)?;
                            let spec = self.spec(&plan_qd, &groups);
                            let result = run_qdrift(&spec)?;
                            rows.push(ResultRow {
                                method,
                                m,
                                n_seg: n_qd,
                                o_est: result.estimate(),
                                eps_tot: qdrift_total_error(
                                    m,
                                    cfg.delta,
                                    eps_alg,
                                    self.obs.norm_bound(),
                                )?,
                                c: 1.0,
                                resources: qdrift_worst_case(self.h, n_qd),
                                t_ratio,
                                oracle_value: self.oracle_value,
                                groups: groups.len(),
                                nonadiabatic_error: self.nonadiabatic_error,
                            });
                        }
                    }
                }
            }
        }
        Ok(rows)
    }

    fn spec<'b>(&'b self, plan: &'b SegmentPlan, groups: &'b [MeasurementGroup]) -> RunSpec<'b> {
        RunSpec {
            h: self.h,
            plan,
            psi: &self.psi,
            observable: &self.obs,
            groups,
            mode: self.cfg.mode,
            seed: self.seed,
            workers: self.workers,
        }
    }
}

fn exact_value(
    h: &TimeDependentHamiltonian,
    psi: &InitialState,
    obs: &ObservableDecomposition,
    tol: f64,
) -> Result<f64> {
    let u = exact_propagator(h, 0.0, h.duration(), tol)?;
    exact_expectation(&psi.amplitudes(h.num_qubits())?, obs, &u.matrix)
}

fn first_qubit(letter: Letter, n: usize) -> PauliString {
    PauliString::single(n, 0, letter)
}

pub const SPIN_M_VALUES: [u64; 4] = [1_000, 10_000, 100_000, 1_000_000];
pub const ADIABATIC_M_VALUES: [u64; 2] = [1_000, 10_000];

/// Both methods on the driven spin chain (or a user Hamiltonian file),
/// one row per method, segment count and `M`.
pub fn run_spin_experiment(cfg: &ExperimentConfig, workers: usize) -> Result<String> {
    cfg.validate_fields()?;
    let seed = cfg.seed()?;
    let problem = load_problem(cfg, "spin")?;
    let h = &problem.h;
    let n = h.num_qubits();
    let psi = match (&cfg.initial_state, &problem.file) {
        (Some(s), _) => s.clone(),
        (None, None) => InitialState::Basis(alternating(n)),
        (None, Some(_)) => return Err(Error::InvalidArgument("initial_state is required".into())),
    };
    let obs = load_observable(cfg, || {
        ObservableDecomposition::single(first_qubit(Letter::X, n))
    })?;
    check_width(&obs, n)?;
    let oracle_value = exact_value(h, &psi, &obs, cfg.oracle_tol)?;
    let ctx = Context {
        cfg,
        h,
        psi,
        obs,
        oracle_value,
        seed,
        workers,
        nonadiabatic_error: None,
    };
    let ms = cfg
        .m_values
        .clone()
        .unwrap_or_else(|| SPIN_M_VALUES.to_vec());
    write_csv(&ctx.rows(&ms)?, false)
}

fn check_width(obs: &ObservableDecomposition, n: usize) -> Result<()> {
    if obs.num_qubits() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: obs.num_qubits(),
        });
    }
    Ok(())
}

/// Ground state of a static Pauli sum (lowest eigenvector, dense).
pub fn ground_state(terms: &[crate::hamiltonian::StaticTerm]) -> Result<InitialState> {
    let eig = SymmetricEigen::new(static_matrix(terms)?);
    let k = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .ok_or_else(|| Error::Numerical("empty spectrum".into()))?;
    let col = eig.eigenvectors.column(k);
    // Fix the global phase so the largest entry is real and positive.
    let lead = col
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = lead.conj() / lead.norm();
    Ok(InitialState::Amplitudes(
        col.iter()
            .map(|a| {
                let z = a * phase;
                [z.re, z.im]
            })
            .collect(),
    ))
}

/// Energy estimation along an interpolated schedule; the observable is the
/// final Hamiltonian, measured in qubitwise-compatible groups.
pub fn run_adiabatic_experiment(cfg: &ExperimentConfig, workers: usize) -> Result<String> {
    cfg.validate_fields()?;
    let seed = cfg.seed()?;
    let problem = load_problem(cfg, "adiabatic-toy")?;
    let file = problem
        .file
        .as_ref()
        .filter(|f| f.schedule.is_some())
        .ok_or_else(|| Error::InvalidArgument("Hamiltonian has no adiabatic schedule".into()))?;
    let h = &problem.h;
    let final_terms = file.final_terms().expect("schedule present");
    let initial_terms = file.initial_terms().expect("schedule present");
    let obs = load_observable(cfg, || ObservableDecomposition::from_terms(final_terms))?;
    check_width(&obs, h.num_qubits())?;
    let psi = match &cfg.initial_state {
        Some(s) => s.clone(),
        None => ground_state(initial_terms)?,
    };
    let oracle_value = exact_value(h, &psi, &obs, cfg.oracle_tol)?;
    let ground = ground_energy(final_terms)?;
    let ctx = Context {
        cfg,
        h,
        psi,
        obs,
        oracle_value,
        seed,
        workers,
        nonadiabatic_error: Some(oracle_value - ground),
    };
    let ms = cfg
        .m_values
        .clone()
        .unwrap_or_else(|| ADIABATIC_M_VALUES.to_vec());
    write_csv(&ctx.rows(&ms)?, true)
}

/// URCC estimate without an oracle: `method,M,N_seg,O_est,eps_tot,C,std_error,groups`.
pub fn run_estimate(cfg: &ExperimentConfig, workers: usize) -> Result<String> {
    cfg.validate_fields()?;
    let seed = cfg.seed()?;
    let problem = load_problem(cfg, "spin")?;
    let h = &problem.h;
    let n = h.num_qubits();
    let psi = match (&cfg.initial_state, &problem.file) {
        (Some(s), _) => s.clone(),
        (None, None) => InitialState::Basis(alternating(n)),
        (None, Some(f)) => match f.initial_terms() {
            Some(t) => ground_state(t)?,
            None => return Err(Error::InvalidArgument("initial_state is required".into())),
        },
    };
    let obs = load_observable(cfg, || {
        match problem.file.as_ref().and_then(|f| f.final_terms()) {
            Some(t) => ObservableDecomposition::from_terms(t),
            None => ObservableDecomposition::single(first_qubit(Letter::X, n)),
        }
    })?;
    check_width(&obs, n)?;
    let plan = SegmentPlan::plan(
        h,
        cfg.lambda_target
            .unwrap_or_else(|| default_lambda_target(h)),
    )?;
    let ms = cfg
        .m_values
        .clone()
        .unwrap_or_else(|| vec![SPIN_M_VALUES[1]]);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "method",
        "M",
        "N_seg",
        "O_est",
        "eps_tot",
        "C",
        "std_error",
        "groups",
    ])
    .map_err(csv_err)?;
    for m in ms {
        let groups = groups_for(cfg, &obs, m)?;
        let spec = RunSpec {
            h,
            plan: &plan,
            psi: &psi,
            observable: &obs,
            groups: &groups,
            mode: cfg.mode,
            seed,
            workers,
        };
        let r = run_urcc(&spec)?;
        w.write_record([
            "urcc".to_string(),
            m.to_string(),
            plan.n_seg().to_string(),
            num(r.estimate())?,
            num(run_eps(&spec, &r, cfg.delta)?)?,
            num(r.c)?,
            num(r.std_error())?,
            groups.len().to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Sampled circuits and their gate counts, without simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct CompileArtifacts {
    pub pair_dump: String,
    pub circuit_dump: String,
    pub qdrift_dump: Option<String>,
    pub resources_csv: String,
}

pub fn run_compile_only(cfg: &ExperimentConfig) -> Result<CompileArtifacts> {
    cfg.validate_fields()?;
    let seed = cfg.seed()?;
    let problem = load_problem(cfg, "spin")?;
    let h = &problem.h;
    let n = h.num_qubits();
    let plan = SegmentPlan::plan(
        h,
        cfg.lambda_target
            .unwrap_or_else(|| default_lambda_target(h)),
    )?;
    let compiler = UrccCompiler::new(h, &plan)?;
    let pair = compiler.compile_pair(&mut trial_rng(seed, Domain::Compile, 0))?;
    let circuit = lower_pair(&pair.branch_s, &pair.branch_s_prime, n)?;
    let n_qd = cfg
        .qdrift_segments
        .first()
        .copied()
        .unwrap_or_else(|| matched_qdrift_segments(h, plan.n_seg()));

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "method",
        "kind",
        "N_seg",
        "gates_1q",
        "gates_2q",
        "phase_gates",
    ])
    .map_err(csv_err)?;
    let mut row = |method: &str, kind: &str, n_seg: usize, r: ResourceCount| {
        w.write_record([
            method.to_string(),
            kind.to_string(),
            n_seg.to_string(),
            r.single_qubit.to_string(),
            r.two_qubit.to_string(),
            r.phase_gates.to_string(),
        ])
        .map_err(csv_err)
    };
    let mut qdrift_dump = None;
    if cfg.methods.contains(&Method::Urcc) {
        row("urcc", "sampled", plan.n_seg(), count_resources(&circuit))?;
        row(
            "urcc",
            "worst_case",
            plan.n_seg(),
            urcc_worst_case(h, plan.n_seg()),
        )?;
    }
    if cfg.methods.contains(&Method::Cqdrift) {
        let plan_qd = SegmentPlan::with_segments(h, n_qd)?;
        let samples =
            QdriftCompiler::new(h, &plan_qd).compile(&mut trial_rng(seed, Domain::Compile, 1))?;
        let seq: Vec<_> = samples.iter().map(|s| s.to_unitary()).collect();
        row(
            "cqdrift",
            "sampled",
            n_qd,
            count_resources(&lower_sequence(&seq, n)?),
        )?;
        row("cqdrift", "worst_case", n_qd, qdrift_worst_case(h, n_qd))?;
        qdrift_dump = Some(qdrift::dump(&samples));
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(CompileArtifacts {
        pair_dump: pair.dump(),
        circuit_dump: circuit.dump(),
        qdrift_dump,
        resources_csv: String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))?,
    })
}
