//! End-to-end acceptance checks. Runs as a plain binary (no libtest harness)
//! and prints one PASS/FAIL line per check; exits non-zero on any failure.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

use urcc::bench::{run_spin_experiment, ExperimentConfig, Method};
use urcc::circuit::{
    count_resources, lower_pair, lower_pauli_product, lower_rotation, lower_sequence,
    t_count_ratio, Gate, QuantumCircuit, DEFAULT_C_RS,
};
use urcc::compiler::{LcuDescriptor, UrccCompiler};
use urcc::estimator::{
    group_ldf, grouped_hoeffding_eps, hoeffding_eps, singleton_groups, MeasurementGroup,
    ObservableDecomposition,
};
use urcc::hamiltonian::HamiltonianTerm;
use urcc::models::spin_chain;
use urcc::oracle::{
    constant_sequence_law, density, evolve, exact_expectation, exact_propagator,
    leading_order_deviation, qdrift_exact_state, trace_distance,
};
use urcc::pipeline::{
    matched_qdrift_segments, run_qdrift, run_urcc, urcc_worst_case, RunResult, RunSpec,
};
use urcc::qdrift::QdriftCompiler;
use urcc::rng::{trial_rng, Domain};
use urcc::sampling::{sample_order, sample_order_at_least_two, sample_segment_time};
use urcc::statevector::{InitialState, Mode};
use urcc::{Letter, PauliString, SegmentPlan, TimeDependentHamiltonian, Waveform};

type CMatrix = DMatrix<Complex64>;

const P_MIN: f64 = 0.001;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn random_pauli<R: Rng>(n: usize, rng: &mut R) -> PauliString {
    loop {
        let letters: Vec<Letter> = (0..n)
            .map(|_| Letter::ALL[rng.random_range(0..4)])
            .collect();
        if letters.iter().any(|l| *l != Letter::I) {
            return PauliString::from_letters(&letters, 0);
        }
    }
}

/// Two-qubit instance with four distinct terms mixing constant and cosine
/// coefficients, scaled so that `Λ = 0.8` over `[0, 1]`.
fn random_instance(seed: u64) -> TimeDependentHamiltonian {
    let mut rng = trial_rng(seed, Domain::Instance, 0);
    let mut paulis: Vec<PauliString> = Vec::new();
    while paulis.len() < 4 {
        let p = random_pauli(2, &mut rng);
        if !paulis.contains(&p) {
            paulis.push(p);
        }
    }
    let shapes: Vec<(f64, Option<f64>)> = paulis
        .iter()
        .enumerate()
        .map(|(k, _)| {
            let amp = rng.random_range(0.3..1.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
            let freq = if k % 2 == 0 {
                Some(rng.random_range(1.0..4.0))
            } else {
                None
            };
            (amp, freq)
        })
        .collect();
    let build = |scale: f64| {
        let terms = paulis
            .iter()
            .zip(&shapes)
            .map(|(p, &(a, f))| {
                let w = match f {
                    Some(f) => Waveform::cosine(scale * a, f),
                    None => Waveform::constant(scale * a),
                };
                HamiltonianTerm::new(p.clone(), w).unwrap()
            })
            .collect();
        TimeDependentHamiltonian::new(2, terms, 1.0).unwrap()
    };
    let unit = build(1.0).total_lambda();
    build(0.8 / unit)
}

fn spec<'a>(
    h: &'a TimeDependentHamiltonian,
    plan: &'a SegmentPlan,
    psi: &'a InitialState,
    obs: &'a ObservableDecomposition,
    groups: &'a [MeasurementGroup],
    mode: Mode,
    seed: u64,
) -> RunSpec<'a> {
    RunSpec {
        h,
        plan,
        psi,
        observable: obs,
        groups,
        mode,
        seed,
        workers: 1,
    }
}

fn oracle_value(
    h: &TimeDependentHamiltonian,
    psi: &InitialState,
    obs: &ObservableDecomposition,
) -> f64 {
    let u = exact_propagator(h, 0.0, h.duration(), 1e-12).unwrap();
    exact_expectation(&psi.amplitudes(h.num_qubits()).unwrap(), obs, &u.matrix).unwrap()
}

/// Standard error of a grouped run: `(C²/M) √(Σ_g M_g var_g)`.
fn grouped_std_error(result: &RunResult, groups: &[MeasurementGroup]) -> f64 {
    let m: u64 = groups.iter().map(|g| g.shots).sum();
    let mut start = 0usize;
    let mut acc = 0.0;
    for g in groups {
        let o = &result.outcomes[start..start + g.shots as usize];
        start += g.shots as usize;
        let mean = o.iter().sum::<f64>() / o.len() as f64;
        let var = if o.len() > 1 {
            o.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (o.len() - 1) as f64
        } else {
            0.0
        };
        acc += g.shots as f64 * var;
    }
    result.c * result.c / m as f64 * acc.sqrt()
}

/// Σ_{k≥2} λ^k / k!
fn tail_series(lambda: f64) -> f64 {
    let mut term = lambda * lambda / 2.0;
    let mut sum = 0.0f64;
    let mut k = 2.0;
    while term > 1e-20 * sum.max(1e-300) {
        sum += term;
        k += 1.0;
        term *= lambda / k;
    }
    sum
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn chi_square_p(observed: &[u64], expected_prob: &[f64]) -> f64 {
    let n: u64 = observed.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(expected_prob)
        .map(|(&o, &p)| {
            let e = n as f64 * p;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    ChiSquared::new((observed.len() - 1) as f64)
        .unwrap()
        .sf(stat)
}

/// Asymptotic Kolmogorov p-value with the usual small-sample correction.
fn ks_p(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let t = d * (n.sqrt() + 0.12 + 0.11 / n.sqrt());
    let mut p = 0.0;
    for k in 1..200 {
        let k = k as f64;
        p += 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * t * t).exp();
    }
    p.clamp(0.0, 1.0)
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.log10()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.log10()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn leading_order_identity() -> Outcome {
    let start = Instant::now();
    let mut worst_dev: f64 = 0.0;
    let mut worst_rel: f64 = 0.0;
    for i in 0..100 {
        let mut rng = trial_rng(101, Domain::Instance, i);
        let n = rng.random_range(1..=3);
        let count = rng.random_range(1..=6);
        let paulis: Vec<PauliString> = (0..count).map(|_| random_pauli(n, &mut rng)).collect();
        let total = rng.random_range(1e-3..=1.0);
        let w: Vec<f64> = (0..count).map(|_| rng.random_range(0.05..1.0)).collect();
        let ws: f64 = w.iter().sum();
        let lambda_p: Vec<f64> = w.iter().map(|x| total * x / ws).collect();
        let d = LcuDescriptor::new(&lambda_p).unwrap();
        worst_dev =
            worst_dev.max(leading_order_deviation(&paulis, &lambda_p, d.phi, &d.alpha).unwrap());
        let lambda: f64 = lambda_p.iter().sum();
        worst_rel = worst_rel
            .max(rel(d.c_l, (1.0 + lambda * lambda).sqrt()))
            .max(rel(d.c_r, tail_series(lambda)));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_dev <= 1e-12 && worst_rel <= 1e-12 && secs < 1.0,
        format!("max deviation {worst_dev:.2e}, max C_L/C_R rel error {worst_rel:.2e}, {secs:.3}s"),
    )
}

fn unbiasedness() -> Outcome {
    let h = random_instance(7);
    let plan = SegmentPlan::with_segments(&h, 4).unwrap();
    let psi = InitialState::Basis("01".into());
    let obs = ObservableDecomposition::single("ZX".parse().unwrap()).unwrap();
    let truth = oracle_value(&h, &psi, &obs);
    let m = 1_000_000;
    let groups = group_ldf(&obs, m).unwrap();
    let r = run_urcc(&spec(&h, &plan, &psi, &obs, &groups, Mode::Exact, 2024)).unwrap();
    let bias = (r.estimate() - truth).abs();
    let se = r.std_error();
    outcome(
        bias <= 5.0 * se,
        format!(
            "Λ = {:.3}, C = {:.5}, mean {:.6} vs oracle {:.6}, |diff| = {bias:.2e} <= 5·SE = {:.2e}",
            h.total_lambda(),
            r.c,
            r.estimate(),
            truth,
            5.0 * se
        ),
    )
}

fn sampler_suite() -> Outcome {
    let draws = 100_000u64;
    let mut ps = Vec::new();

    // Order l ~ Poisson(λ).
    let lambda = 0.8;
    let mut rng = trial_rng(31, Domain::Instance, 0);
    let mut counts = vec![0u64; 5];
    for _ in 0..draws {
        let l = sample_order(lambda, &mut rng).unwrap() as usize;
        counts[l.min(4)] += 1;
    }
    let pois = Poisson::new(lambda).unwrap();
    let mut probs: Vec<f64> = (0..4).map(|k| pois.pmf(k)).collect();
    probs.push(1.0 - probs.iter().sum::<f64>());
    ps.push(("order", chi_square_p(&counts, &probs)));

    // l ≥ 2 branch, both sampling paths.
    for (label, lambda, bins) in [
        ("order>=2 λ=0.2", 0.2, 4usize),
        ("order>=2 λ=0.05", 0.05, 3),
    ] {
        let mut rng = trial_rng(32, Domain::Instance, bins as u64);
        let mut counts = vec![0u64; bins];
        for _ in 0..draws {
            let l = sample_order_at_least_two(lambda, &mut rng).unwrap() as usize;
            assert!(l >= 2);
            counts[(l - 2).min(bins - 1)] += 1;
        }
        let pois = Poisson::new(lambda).unwrap();
        let z: f64 = (2..80).map(|k| pois.pmf(k)).sum();
        let mut probs: Vec<f64> = (2..bins as u64 + 1).map(|k| pois.pmf(k) / z).collect();
        probs.push(1.0 - probs.iter().sum::<f64>());
        ps.push((label, chi_square_p(&counts, &probs)));
    }

    // Time draws against |cos t| on [0, π].
    let h = TimeDependentHamiltonian::new(
        1,
        vec![HamiltonianTerm::new("X".parse().unwrap(), Waveform::cosine(1.0, 1.0)).unwrap()],
        PI,
    )
    .unwrap();
    let plan = SegmentPlan::with_segments(&h, 1).unwrap();
    let mut rng = trial_rng(33, Domain::Instance, 0);
    let mut ts: Vec<f64> = (0..draws)
        .map(|_| sample_segment_time(&h, &plan, 0, &mut rng).unwrap())
        .collect();
    ts.sort_by(f64::total_cmp);
    let cdf = |t: f64| {
        if t <= PI / 2.0 {
            0.5 * t.sin()
        } else {
            1.0 - 0.5 * t.sin()
        }
    };
    ps.push(("time KS", ks_p(&ts, cdf)));

    // Constant-coefficient index sequences against the product law.
    let h = TimeDependentHamiltonian::new(
        2,
        vec![
            HamiltonianTerm::new("XI".parse().unwrap(), Waveform::constant(0.3)).unwrap(),
            HamiltonianTerm::new("ZZ".parse().unwrap(), Waveform::constant(-0.2)).unwrap(),
            HamiltonianTerm::new("YX".parse().unwrap(), Waveform::constant(0.15)).unwrap(),
        ],
        1.0,
    )
    .unwrap();
    let plan = SegmentPlan::with_segments(&h, 1).unwrap();
    let compiler = UrccCompiler::new(&h, &plan).unwrap();
    let law = constant_sequence_law(&h, &plan, 0, 3).unwrap();
    let mut counts = vec![0u64; law.len()];
    let mut rng = trial_rng(34, Domain::Instance, 0);
    for _ in 0..draws {
        let seq = compiler.sample_pdy_indices(3, 0, &mut rng).unwrap();
        let k = law
            .iter()
            .position(|(s, _)| *s == seq)
            .expect("sequence in support");
        counts[k] += 1;
    }
    let probs: Vec<f64> = law.iter().map(|x| x.1).collect();
    ps.push(("sequences", chi_square_p(&counts, &probs)));

    let pass = ps.iter().all(|(_, p)| *p > P_MIN);
    let detail = ps
        .iter()
        .map(|(name, p)| format!("{name} p={p:.3}"))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(pass, detail)
}

fn hoeffding_coverage() -> Outcome {
    let h = random_instance(7);
    let plan = SegmentPlan::with_segments(&h, 4).unwrap();
    let psi = InitialState::Basis("01".into());
    let obs = ObservableDecomposition::single("ZX".parse().unwrap()).unwrap();
    let truth = oracle_value(&h, &psi, &obs);
    let m = 10_000;
    let groups = group_ldf(&obs, m).unwrap();
    let mut covered = 0;
    let mut eps = 0.0;
    for rep in 0..200u64 {
        let r = run_urcc(&spec(
            &h,
            &plan,
            &psi,
            &obs,
            &groups,
            Mode::Shot,
            5000 + rep,
        ))
        .unwrap();
        eps = hoeffding_eps(r.c, obs.norm_bound(), m, 0.05).unwrap();
        if (r.estimate() - truth).abs() <= eps {
            covered += 1;
        }
    }
    let rate = covered as f64 / 200.0;
    outcome(rate >= 0.95, format!("coverage {rate:.3} at ε = {eps:.4}"))
}

fn spin_signature() -> Outcome {
    let h = spin_chain(3, 0.1, 1.0, PI).unwrap();
    let plan = SegmentPlan::plan(&h, 0.2).unwrap();
    let n_qd = matched_qdrift_segments(&h, plan.n_seg());
    let plan_qd = SegmentPlan::with_segments(&h, n_qd).unwrap();
    let psi = InitialState::Basis("101".into());
    let obs = ObservableDecomposition::single("ZII".parse().unwrap()).unwrap();
    let truth = oracle_value(&h, &psi, &obs);
    let eps_alg =
        urcc::oracle::algorithmic_error(&h, &plan_qd, &psi.amplitudes(3).unwrap(), &obs, 1e-12)
            .unwrap();

    let ms = [1_000u64, 10_000, 100_000, 1_000_000];
    let reps = [100u64, 100, 20, 20];
    let mut rms = Vec::new();
    for (&m, &r) in ms.iter().zip(&reps) {
        let groups = group_ldf(&obs, m).unwrap();
        let sq: f64 = (0..r)
            .map(|rep| {
                let out = run_urcc(&spec(
                    &h,
                    &plan,
                    &psi,
                    &obs,
                    &groups,
                    Mode::Shot,
                    77_000 + rep,
                ))
                .unwrap();
                (out.estimate() - truth).powi(2)
            })
            .sum();
        rms.push((sq / r as f64).sqrt());
    }
    let xs: Vec<f64> = ms.iter().map(|&m| m as f64).collect();
    let urcc_slope = slope(&xs, &rms);

    let m = 1_000_000;
    let groups = group_ldf(&obs, m).unwrap();
    let qd_reps = 5u64;
    let sq: f64 = (0..qd_reps)
        .map(|rep| {
            let out = run_qdrift(&spec(
                &h,
                &plan_qd,
                &psi,
                &obs,
                &groups,
                Mode::Shot,
                88_000 + rep,
            ))
            .unwrap();
            (out.estimate() - truth).powi(2)
        })
        .sum();
    let qd_rms = (sq / qd_reps as f64).sqrt();
    let plateau_ok = (qd_rms - eps_alg.abs()).abs() <= 0.2 * eps_alg.abs();
    let factor = qd_rms / rms[3];
    outcome(
        (urcc_slope + 0.5).abs() <= 0.1 && plateau_ok && factor >= 3.0,
        format!(
            "URCC slope {urcc_slope:.3} (rms {}), c-qDRIFT N={n_qd} rms {qd_rms:.4} vs ε_alg {:.4}, factor {factor:.1}",
            rms.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join("/"),
            eps_alg.abs()
        ),
    )
}

fn qdrift_scaling() -> Outcome {
    let h = random_instance(7);
    let psi = InitialState::Basis("01".into()).amplitudes(2).unwrap();
    let u = exact_propagator(&h, 0.0, h.duration(), 1e-12).unwrap();
    let exact = density(&evolve(&u.matrix, &psi).unwrap());
    let ns = [8usize, 16, 32, 64];
    let d: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let plan = SegmentPlan::with_segments(&h, n).unwrap();
            trace_distance(
                &qdrift_exact_state(&h, &plan, &density(&psi)).unwrap(),
                &exact,
            )
        })
        .collect();
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let s = slope(&xs, &d);
    outcome(
        (s + 1.0).abs() <= 0.15,
        format!(
            "slope {s:.3} (trace distances {})",
            d.iter()
                .map(|x| format!("{x:.3e}"))
                .collect::<Vec<_>>()
                .join("/")
        ),
    )
}

/// Full matrix of a gate from first principles; qubit 0 is the most
/// significant bit.
fn gate_matrix(g: &Gate, width: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let x = [[o, one], [one, o]];
    let y = [[o, c(0.0, -1.0)], [c(0.0, 1.0), o]];
    let z = [[one, o], [o, -one]];
    let id = [[one, o], [o, one]];
    let had = [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]];
    let pauli = |l: Letter| match l {
        Letter::I => id,
        Letter::X => x,
        Letter::Y => y,
        Letter::Z => z,
    };
    let (ctrl, target, m) = match *g {
        Gate::BasisChange {
            letter,
            qubit,
            dagger,
        } => {
            let m = match letter {
                Letter::X => had,
                // exp(∓iπ/4 X)
                Letter::Y => {
                    let off = if dagger { c(0.0, s) } else { c(0.0, -s) };
                    [[c(s, 0.0), off], [off, c(s, 0.0)]]
                }
                _ => id,
            };
            (None, qubit, m)
        }
        Gate::Cnot { control, target } => (Some(control), target, x),
        Gate::Ph { theta, qubit } => (
            None,
            qubit,
            [
                [Complex64::from_polar(1.0, -theta), o],
                [o, Complex64::from_polar(1.0, theta)],
            ],
        ),
        Gate::ControlledPauli {
            letter,
            control,
            target,
        } => (Some(control), target, pauli(letter)),
        Gate::Pauli { letter, qubit } => (None, qubit, pauli(letter)),
        Gate::Hadamard { qubit } => (None, qubit, had),
        Gate::Phase { power, qubit } => {
            (None, qubit, [[one, o], [o, c(0.0, 1.0).powu(power as u32)]])
        }
    };
    let dim = 1usize << width;
    let tb = width - 1 - target;
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let active = ctrl.is_none_or(|q| (col >> (width - 1 - q)) & 1 == 1);
        if !active {
            out[(col, col)] = one;
            continue;
        }
        let b = (col >> tb) & 1;
        for (r, m_row) in m.iter().enumerate() {
            let row = (col & !(1 << tb)) | (r << tb);
            out[(row, col)] += m_row[b];
        }
    }
    out
}

fn circuit_matrix(circ: &QuantumCircuit) -> CMatrix {
    let dim = 1usize << circ.width();
    let mut u = CMatrix::identity(dim, dim);
    for g in circ.gates() {
        u = gate_matrix(g, circ.width()) * u;
    }
    u
}

fn controlled(u: &CMatrix, on_one: bool) -> CMatrix {
    let d = u.nrows();
    let mut out = CMatrix::zeros(2 * d, 2 * d);
    let id = CMatrix::identity(d, d);
    let (zero_block, one_block) = if on_one { (&id, u) } else { (u, &id) };
    out.view_mut((0, 0), (d, d)).copy_from(zero_block);
    out.view_mut((d, d), (d, d)).copy_from(one_block);
    out
}

fn lowering_exactness() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut products = 0;
    for i in 0..200u64 {
        let mut rng = trial_rng(707, Domain::Instance, i);
        let n = rng.random_range(1..=4);
        let mut sigma = random_pauli(n, &mut rng);
        if rng.random::<bool>() {
            sigma = sigma.negated();
        }
        let kind = i % 5;
        let (circ, target) = if kind < 3 {
            let phi = rng.random_range(-PI..PI);
            let m = sigma.to_matrix().unwrap();
            let d = m.nrows();
            let u = CMatrix::identity(d, d) * c(phi.cos(), 0.0) - m * c(0.0, phi.sin());
            match kind {
                0 => (lower_rotation(&sigma, phi, None).unwrap(), u),
                1 => (
                    lower_rotation(&sigma, phi, Some(true)).unwrap(),
                    controlled(&u, true),
                ),
                _ => (
                    lower_rotation(&sigma, phi, Some(false)).unwrap(),
                    controlled(&u, false),
                ),
            }
        } else {
            // (−i)^l phase of an order-l Dyson product.
            products += 1;
            let l = rng.random_range(2..=7u8);
            let op = sigma.times_i_pow((3 * l) % 4);
            let m = op.to_matrix().unwrap();
            let on_one = kind == 3;
            (
                lower_pauli_product(&op, on_one).unwrap(),
                controlled(&m, on_one),
            )
        };
        worst = worst.max(max_abs(&(circuit_matrix(&circ) - target)));
    }
    outcome(
        worst <= 1e-12,
        format!("200 lowerings ({products} phased products), max deviation {worst:.2e}"),
    )
}

fn resource_accounting() -> Outcome {
    let h = spin_chain(3, 0.1, 1.0, PI).unwrap();
    let plan = SegmentPlan::plan(&h, 0.2).unwrap();
    let n = plan.n_seg();
    let compiler = UrccCompiler::new(&h, &plan).unwrap();
    let mut ok = urcc_worst_case(&h, n).phase_gates == 4 * n as u64;
    let mut max_ph = 0;
    for i in 0..2000 {
        let pair = compiler
            .compile_pair(&mut trial_rng(1, Domain::Compile, i))
            .unwrap();
        let r = count_resources(&lower_pair(&pair.branch_s, &pair.branch_s_prime, 3).unwrap());
        max_ph = max_ph.max(r.phase_gates);
    }
    ok &= max_ph == 4 * n as u64;

    let mut qd_ok = true;
    for n_qd in [16usize, 20] {
        let plan_qd = SegmentPlan::with_segments(&h, n_qd).unwrap();
        let qd = QdriftCompiler::new(&h, &plan_qd);
        for i in 0..100 {
            let seq: Vec<_> = qd
                .compile(&mut trial_rng(2, Domain::Compile, i))
                .unwrap()
                .iter()
                .map(|s| s.to_unitary())
                .collect();
            let r = count_resources(&lower_sequence(&seq, 3).unwrap());
            qd_ok &= r.phase_gates == n_qd as u64;
        }
        let ratio = t_count_ratio(n_qd as u64, n as u64).unwrap();
        qd_ok &= ratio == n_qd as f64 / (4 * n) as f64;
        let worst = urcc_worst_case(&h, n);
        let t_urcc = worst.t_count(1e-3, DEFAULT_C_RS).unwrap();
        let t_qd = urcc::pipeline::qdrift_worst_case(&h, n_qd)
            .t_count(1e-3, DEFAULT_C_RS)
            .unwrap();
        qd_ok &= t_qd as f64 / t_urcc as f64 == ratio;
    }

    let lambda = plan.lambda(0);
    let c_lor = (1.0 + lambda * lambda).sqrt() + tail_series(lambda);
    let c_rel = rel(compiler.normalization(), c_lor.powi(n as i32));
    let equal = plan
        .lambda_per_segment()
        .iter()
        .all(|l| rel(*l, lambda) < 1e-10);
    outcome(
        ok && qd_ok && c_rel <= 1e-12 && equal,
        format!(
            "N_urcc={n}: worst-case phase gates {max_ph} (= 4N), c-qDRIFT counts and T ratio exact: {qd_ok}, C rel error {c_rel:.1e}"
        ),
    )
}

fn grouped_measurement() -> Outcome {
    let h = random_instance(7);
    let plan = SegmentPlan::with_segments(&h, 4).unwrap();
    let psi = InitialState::Basis("01".into());
    let obs = ObservableDecomposition::new(vec![
        (0.7, "ZI".parse().unwrap()),
        (0.4, "IZ".parse().unwrap()),
        (-0.5, "ZZ".parse().unwrap()),
        (0.3, "XX".parse().unwrap()),
    ])
    .unwrap();
    let truth = oracle_value(&h, &psi, &obs);

    let pair = ObservableDecomposition::new(vec![
        (1.0, "ZI".parse().unwrap()),
        (1.0, "IZ".parse().unwrap()),
    ])
    .unwrap();
    let g = group_ldf(&pair, 10).unwrap();
    let joined = g.len() == 1 && g[0].basis == "ZZ".parse::<PauliString>().unwrap();

    let m = 100_000;
    let grouped = group_ldf(&obs, m).unwrap();
    let single = singleton_groups(&obs, m).unwrap();
    let rg = run_urcc(&spec(&h, &plan, &psi, &obs, &grouped, Mode::Shot, 9001)).unwrap();
    let ru = run_urcc(&spec(&h, &plan, &psi, &obs, &single, Mode::Shot, 9002)).unwrap();
    let se = grouped_std_error(&rg, &grouped).hypot(grouped_std_error(&ru, &single));
    let agree = (rg.estimate() - ru.estimate()).abs() <= 5.0 * se;

    let m = 10_000;
    let grouped = group_ldf(&obs, m).unwrap();
    let mut covered = 0;
    let mut eps = 0.0;
    for rep in 0..200u64 {
        let r = run_urcc(&spec(
            &h,
            &plan,
            &psi,
            &obs,
            &grouped,
            Mode::Shot,
            12_000 + rep,
        ))
        .unwrap();
        eps = grouped_hoeffding_eps(&grouped, r.c, m, 0.05).unwrap();
        if (r.estimate() - truth).abs() <= eps {
            covered += 1;
        }
    }
    let rate = covered as f64 / 200.0;
    outcome(
        joined && agree && rate >= 0.95,
        format!(
            "{{ZI, IZ}} -> one ZZ group: {joined}; grouped {:.5} vs ungrouped {:.5} (5·SE {:.2e}, G = {} vs {}); coverage {rate:.3} at ε = {eps:.4}",
            rg.estimate(),
            ru.estimate(),
            5.0 * se,
            grouped.len(),
            obs.len()
        ),
    )
}

fn determinism() -> Outcome {
    let cfg = ExperimentConfig {
        m_values: Some(vec![3_000, 7_000]),
        methods: vec![Method::Urcc, Method::Cqdrift],
        seed: Some(424242),
        ..ExperimentConfig::default()
    };
    let a = run_spin_experiment(&cfg, 1).unwrap();
    let b = run_spin_experiment(&cfg, 8).unwrap();
    outcome(
        a == b && !a.is_empty(),
        format!("{} bytes, identical: {}", a.len(), a == b),
    )
}

type Check = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let checks: [Check; 10] = [
        ("leading-order rotation identity", leading_order_identity),
        ("unbiasedness in exact mode", unbiasedness),
        ("sampler distributions", sampler_suite),
        ("Hoeffding coverage", hoeffding_coverage),
        ("spin chain error signature", spin_signature),
        ("c-qDRIFT error scaling", qdrift_scaling),
        ("circuit lowering exactness", lowering_exactness),
        ("resource accounting", resource_accounting),
        ("grouped measurement", grouped_measurement),
        ("worker-count determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "[{}/10] {name}: {} ({}; {:.1}s)",
            i + 1,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance check(s) failed");
        ExitCode::FAILURE
    }
}
