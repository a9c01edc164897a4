//! Dense reference engines: time-ordered propagator, exact expectations and
//! the averaged c-qDRIFT channel. Independent of the samplers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::estimator::ObservableDecomposition;
use crate::hamiltonian::{StaticTerm, TimeDependentHamiltonian};
use crate::pauli::{product_chain, PauliString};
use crate::sampling::SegmentPlan;
use crate::statevector::StateVector;
use crate::waveform::Waveform;

pub const PROPAGATOR_QUBIT_LIMIT: usize = 12;
pub const CHANNEL_QUBIT_LIMIT: usize = 8;
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Step-count ceiling of the halving loop.
const MAX_STEPS: usize = 1 << 20;

type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone)]
pub struct DensePropagator {
    pub matrix: CMatrix,
    pub start: f64,
    pub end: f64,
    /// Max-norm change between the last two resolutions.
    pub tolerance: f64,
    pub steps: usize,
}

impl DensePropagator {
    /// `‖U†U − 𝕀‖_max`
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.matrix.nrows();
        let g = self.matrix.adjoint() * &self.matrix - CMatrix::identity(d, d);
        max_abs(&g)
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_limit(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::SizeLimit { qubits: n, limit });
    }
    Ok(())
}

/// `exp(−i dt G)` for Hermitian `G`.
pub fn hermitian_exp(g: &CMatrix, dt: f64) -> CMatrix {
    let eig = SymmetricEigen::new(g.clone());
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|e| Complex64::from_polar(1.0, -e * dt)),
    );
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    let u = scaled * v.adjoint();
    // One Newton–Schulz step removes the eigenvector orthogonality defect,
    // which would otherwise grow linearly with the step count.
    let d = u.nrows();
    let gram = u.adjoint() * &u;
    &u * (CMatrix::identity(d, d) * Complex64::new(1.5, 0.0) - gram * Complex64::new(0.5, 0.0))
}

struct DenseHamiltonian<'a> {
    h: &'a TimeDependentHamiltonian,
    paulis: Vec<CMatrix>,
}

impl<'a> DenseHamiltonian<'a> {
    fn new(h: &'a TimeDependentHamiltonian, limit: usize) -> Result<Self> {
        check_limit(h.num_qubits(), limit)?;
        let paulis = h
            .terms()
            .iter()
            .map(|t| t.pauli.to_matrix_limited(limit))
            .collect::<Result<_>>()?;
        Ok(DenseHamiltonian { h, paulis })
    }

    fn at(&self, t: f64) -> CMatrix {
        let d = 1usize << self.h.num_qubits();
        let mut m = CMatrix::zeros(d, d);
        for (term, p) in self.h.terms().iter().zip(&self.paulis) {
            let c = term.coeff.evaluate(t);
            if c != 0.0 {
                m += p * Complex64::new(c, 0.0);
            }
        }
        m
    }

    fn product(&self, a: f64, b: f64, steps: usize, scheme: Scheme) -> CMatrix {
        let d = 1usize << self.h.num_qubits();
        let dt = (b - a) / steps as f64;
        let mut u = CMatrix::identity(d, d);
        for k in 0..steps {
            let t = a + k as f64 * dt;
            match scheme {
                Scheme::Midpoint => {
                    u = hermitian_exp(&self.at(t + 0.5 * dt), dt) * u;
                }
                Scheme::Magnus4 => {
                    let r = 3f64.sqrt() / 6.0;
                    let h1 = self.at(t + (0.5 - r) * dt);
                    let h2 = self.at(t + (0.5 + r) * dt);
                    let (w1, w2) = (0.25 + r, 0.25 - r);
                    let early = &h1 * Complex64::new(w1, 0.0) + &h2 * Complex64::new(w2, 0.0);
                    let late = &h1 * Complex64::new(w2, 0.0) + &h2 * Complex64::new(w1, 0.0);
                    u = hermitian_exp(&late, dt) * hermitian_exp(&early, dt) * u;
                }
            }
        }
        u
    }
}

/// Step rule of the propagator. Both are products of exact exponentials of
/// Hermitian matrices, so every resolution is unitary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// `exp(−i h H(t_mid))`, second order.
    Midpoint,
    /// Two-exponential commutator-free Magnus step at the Gauss points,
    /// fourth order.
    Magnus4,
}

/// Time-ordered `U(a, b)` with step halving, fourth-order steps.
pub fn exact_propagator(
    h: &TimeDependentHamiltonian,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<DensePropagator> {
    exact_propagator_with(h, a, b, tol, Scheme::Magnus4)
}

/// Halves the step until two successive resolutions differ by at most `tol`
/// in max-norm.
pub fn exact_propagator_with(
    h: &TimeDependentHamiltonian,
    a: f64,
    b: f64,
    tol: f64,
    scheme: Scheme,
) -> Result<DensePropagator> {
    if !(tol >= 1e-13) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tol} below 1e-13"
        )));
    }
    h.check_time(a)?;
    h.check_time(b)?;
    if b < a {
        return Err(Error::InvalidArgument(format!(
            "interval [{a}, {b}] is reversed"
        )));
    }
    let dense = DenseHamiltonian::new(h, PROPAGATOR_QUBIT_LIMIT)?;
    let mut steps = 1usize;
    let mut prev = dense.product(a, b, steps, scheme);
    loop {
        if steps >= MAX_STEPS {
            return Err(Error::Numerical(format!(
                "propagator did not reach {tol} within {MAX_STEPS} steps"
            )));
        }
        steps *= 2;
        let next = dense.product(a, b, steps, scheme);
        let diff = max_abs(&(&next - &prev));
        if diff <= tol {
            return Ok(DensePropagator {
                matrix: next,
                start: a,
                end: b,
                tolerance: diff,
                steps,
            });
        }
        prev = next;
    }
}

/// Product at a fixed step count, for convergence studies.
pub fn fixed_step_propagator(
    h: &TimeDependentHamiltonian,
    a: f64,
    b: f64,
    steps: usize,
    scheme: Scheme,
) -> Result<CMatrix> {
    if steps == 0 {
        return Err(Error::InvalidArgument("zero steps".into()));
    }
    Ok(DenseHamiltonian::new(h, PROPAGATOR_QUBIT_LIMIT)?.product(a, b, steps, scheme))
}

/// `U ψ`
pub fn evolve(u: &CMatrix, psi: &[Complex64]) -> Result<Vec<Complex64>> {
    if u.ncols() != psi.len() {
        return Err(Error::DimensionMismatch {
            left: u.ncols(),
            right: psi.len(),
        });
    }
    Ok((u * DVector::from_column_slice(psi))
        .iter()
        .copied()
        .collect())
}

/// `Σ_k α_k ⟨ψ|U† O^(k) U|ψ⟩`
pub fn exact_expectation(
    psi: &[Complex64],
    obs: &ObservableDecomposition,
    u: &CMatrix,
) -> Result<f64> {
    let state = StateVector::from_amplitudes(evolve(u, psi)?)?;
    obs.components()
        .iter()
        .map(|(a, p)| Ok(a * state.expectation(p)?))
        .sum()
}

/// Dense Hermitian matrix of a static Pauli sum.
pub fn static_matrix(terms: &[StaticTerm]) -> Result<CMatrix> {
    let n = terms
        .first()
        .map(|t| t.pauli.num_qubits())
        .ok_or_else(|| Error::InvalidArgument("empty operator".into()))?;
    check_limit(n, PROPAGATOR_QUBIT_LIMIT)?;
    let d = 1usize << n;
    let mut m = CMatrix::zeros(d, d);
    for t in terms {
        m += t.pauli.to_matrix_limited(PROPAGATOR_QUBIT_LIMIT)? * Complex64::new(t.coeff, 0.0);
    }
    Ok(m)
}

pub fn observable_matrix(obs: &ObservableDecomposition) -> Result<CMatrix> {
    check_limit(obs.num_qubits(), PROPAGATOR_QUBIT_LIMIT)?;
    let d = 1usize << obs.num_qubits();
    let mut m = CMatrix::zeros(d, d);
    for (a, p) in obs.components() {
        m += p.to_matrix_limited(PROPAGATOR_QUBIT_LIMIT)? * Complex64::new(*a, 0.0);
    }
    Ok(m)
}

/// Lowest eigenvalue of a static Pauli sum.
pub fn ground_energy(terms: &[StaticTerm]) -> Result<f64> {
    let eig = SymmetricEigen::new(static_matrix(terms)?);
    Ok(eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
}

/// `|ψ⟩⟨ψ|`
pub fn density(psi: &[Complex64]) -> CMatrix {
    let v = DVector::from_column_slice(psi);
    &v * v.adjoint()
}

/// `Re tr(O ρ)`
pub fn density_expectation(rho: &CMatrix, obs: &ObservableDecomposition) -> Result<f64> {
    let o = observable_matrix(obs)?;
    if o.nrows() != rho.nrows() {
        return Err(Error::DimensionMismatch {
            left: rho.nrows(),
            right: o.nrows(),
        });
    }
    Ok((o * rho).trace().re)
}

/// `½ ‖ρ − σ‖₁`
pub fn trace_distance(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let eig = SymmetricEigen::new(rho - sigma);
    0.5 * eig.eigenvalues.iter().map(|e| e.abs()).sum::<f64>()
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    fn new() -> Self {
        let (nodes, weights) = gauss_legendre(8);
        Quadrature { nodes, weights }
    }

    fn rule<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
    }

    fn adaptive<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
        let whole = self.rule(f, a, b);
        self.refine(f, a, b, whole, tol, 0)
    }

    fn refine<F: Fn(f64) -> f64>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let mid = 0.5 * (a + b);
        let left = self.rule(f, a, mid);
        let right = self.rule(f, mid, b);
        if (left + right - whole).abs() <= tol {
            return Ok(left + right);
        }
        if depth >= 60 {
            return Err(Error::Numerical(format!(
                "quadrature on [{a}, {b}] did not converge"
            )));
        }
        Ok(self.refine(f, a, mid, left, 0.5 * tol, depth + 1)?
            + self.refine(f, mid, b, right, 0.5 * tol, depth + 1)?)
    }
}

/// Adaptive Gauss–Legendre integral of `f` over [a, b] to absolute `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    Quadrature::new().adaptive(&f, a, b, tol)
}

/// Output state of the segment-averaged c-qDRIFT channel.
pub fn qdrift_exact_state(
    h: &TimeDependentHamiltonian,
    plan: &SegmentPlan,
    rho0: &CMatrix,
) -> Result<CMatrix> {
    let n = h.num_qubits();
    check_limit(n, CHANNEL_QUBIT_LIMIT)?;
    let d = 1usize << n;
    if rho0.nrows() != d || rho0.ncols() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: rho0.nrows(),
        });
    }
    let dense = DenseHamiltonian::new(h, CHANNEL_QUBIT_LIMIT)?;
    let quad = Quadrature::new();
    let trace0 = rho0.trace();
    let mut rho = rho0.clone();
    for j in 0..plan.n_seg() {
        let (a, b) = plan.segment(j);
        let lambda = plan.lambda(j);
        // Weight of each (term, sign) pair: ∫ max(±c_q, 0) dt.
        let mut branches: Vec<(usize, f64, f64)> = Vec::new();
        for (q, term) in h.terms().iter().enumerate() {
            for sign in [1.0, -1.0] {
                let w = quad.adaptive(
                    &|t| (sign * term.coeff.evaluate(t)).max(0.0),
                    a,
                    b,
                    QUADRATURE_TOL,
                )?;
                if w > 0.0 {
                    branches.push((q, sign, w));
                }
            }
        }
        let total: f64 = branches.iter().map(|x| x.2).sum();
        if !(total > 0.0) {
            return Err(Error::Numerical(format!("segment {} has no weight", j + 1)));
        }
        if (total - lambda).abs() > 1e-8 * lambda.max(1.0) {
            return Err(Error::Numerical(format!(
                "segment {} quadrature weight {total} disagrees with λ = {lambda}",
                j + 1
            )));
        }
        let (s, c) = lambda.sin_cos();
        let mut next = CMatrix::zeros(d, d);
        for (q, sign, w) in branches {
            let p = &dense.paulis[q];
            let pr = p * &rho;
            let rp = &rho * p;
            let prp = &pr * p;
            let st = sign * s;
            // (c − i s̃ P) ρ (c + i s̃ P)
            let term = &rho * Complex64::new(c * c, 0.0)
                + (rp - pr) * Complex64::new(0.0, c * st)
                + prp * Complex64::new(st * st, 0.0);
            next += term * Complex64::new(w / total, 0.0);
        }
        rho = next;
    }
    if (rho.trace() - trace0).norm() > 1e-12 {
        return Err(Error::Numerical(
            "channel did not preserve the trace".into(),
        ));
    }
    Ok(rho)
}

/// `tr(O ρ_qd) − ⟨O⟩_exact`, signed.
pub fn algorithmic_error(
    h: &TimeDependentHamiltonian,
    plan: &SegmentPlan,
    psi: &[Complex64],
    obs: &ObservableDecomposition,
    tol: f64,
) -> Result<f64> {
    let u = exact_propagator(h, 0.0, h.duration(), tol)?;
    let exact = exact_expectation(psi, obs, &u.matrix)?;
    let rho = qdrift_exact_state(h, plan, &density(psi))?;
    Ok(density_expectation(&rho, obs)? - exact)
}

/// Law of order-`l` index sequences on segment `j` for constant
/// coefficients: i.i.d. draws with weights `h_p / h_tot`. Sequences are in
/// sampler order (latest time first); zero-probability ones are omitted.
pub fn constant_sequence_law(
    h: &TimeDependentHamiltonian,
    plan: &SegmentPlan,
    j: usize,
    l: u32,
) -> Result<Vec<(Vec<usize>, f64)>> {
    if h.terms()
        .iter()
        .any(|t| !matches!(t.coeff, Waveform::Constant { .. }))
    {
        return Err(Error::InvalidArgument(
            "coefficients are not constant".into(),
        ));
    }
    let (a, _) = plan.segment(j);
    let k = h.canonical_len();
    let strengths: Vec<f64> = (0..k).map(|p| h.strength(p, a)).collect();
    let total: f64 = strengths.iter().sum();
    let count = k
        .checked_pow(l)
        .filter(|c| *c <= 1 << 20)
        .ok_or_else(|| Error::InvalidArgument("sequence space too large".into()))?;
    let mut law = Vec::new();
    for code in 0..count {
        let mut c = code;
        let seq: Vec<usize> = (0..l)
            .map(|_| {
                let p = c % k;
                c /= k;
                p
            })
            .collect();
        let prob: f64 = seq.iter().map(|&p| strengths[p] / total).product();
        if prob > 0.0 {
            law.push((seq, prob));
        }
    }
    Ok(law)
}

/// Law of the order-`l` Dyson operator `(−i)^l σ_{p_l} ⋯ σ_{p_1}` for
/// constant coefficients, aggregated by the resulting phased string.
pub fn constant_pdy_law(
    h: &TimeDependentHamiltonian,
    plan: &SegmentPlan,
    j: usize,
    l: u32,
) -> Result<Vec<(PauliString, f64)>> {
    let canon = h.canonical_terms();
    let mut law: Vec<(PauliString, f64)> = Vec::new();
    for (seq, prob) in constant_sequence_law(h, plan, j, l)? {
        let factors: Vec<PauliString> = seq.iter().map(|&p| canon[p].pauli.clone()).collect();
        let op = product_chain(h.num_qubits(), &factors, &vec![3u8; factors.len()])?;
        match law.iter_mut().find(|(q, _)| *q == op) {
            Some(entry) => entry.1 += prob,
            None => law.push((op, prob)),
        }
    }
    Ok(law)
}

/// `‖(𝕀 − iΣλ_pσ_p) − Σ_p α_p exp(−iφσ_p)‖_max`, evaluated densely for
/// given rotation angle `φ` and weights `α_p`.
pub fn leading_order_deviation(
    paulis: &[PauliString],
    lambda_p: &[f64],
    phi: f64,
    alpha: &[f64],
) -> Result<f64> {
    if paulis.len() != lambda_p.len() || paulis.len() != alpha.len() || paulis.is_empty() {
        return Err(Error::DimensionMismatch {
            left: paulis.len(),
            right: lambda_p.len(),
        });
    }
    let n = paulis[0].num_qubits();
    let d = 1usize << n;
    let id = CMatrix::identity(d, d);
    let mut lhs = id.clone();
    let mut rhs = CMatrix::zeros(d, d);
    for ((p, &lp), &a) in paulis.iter().zip(lambda_p).zip(alpha) {
        let m = p.to_matrix_limited(PROPAGATOR_QUBIT_LIMIT)?;
        lhs -= &m * Complex64::new(0.0, lp);
        rhs += hermitian_exp(&m, phi) * Complex64::new(a, 0.0);
    }
    Ok(max_abs(&(lhs - rhs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::HamiltonianTerm;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(p: &str, w: Waveform, tau: f64) -> TimeDependentHamiltonian {
        TimeDependentHamiltonian::new(
            1,
            vec![HamiltonianTerm::new(p.parse().unwrap(), w).unwrap()],
            tau,
        )
        .unwrap()
    }

    #[test]
    fn constant_z_propagator() {
        let h = single("Z", Waveform::constant(1.0), PI / 2.0);
        let u = exact_propagator(&h, 0.0, PI / 2.0, 1e-12).unwrap();
        assert!((u.matrix[(0, 0)] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((u.matrix[(1, 1)] - c(0.0, 1.0)).norm() < 1e-12);
        assert!(u.unitarity_defect() < 1e-11);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [c(s, 0.0), c(s, 0.0)];
        let x = ObservableDecomposition::single("X".parse().unwrap()).unwrap();
        assert!((exact_expectation(&plus, &x, &u.matrix).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn commuting_generator() {
        // ∫_0^2 cos(1.3 t) dt = sin(2.6) / 1.3
        let h = single("Z", Waveform::cosine(1.0, 1.3), 2.0);
        let u = exact_propagator(&h, 0.0, 2.0, 1e-12).unwrap();
        let theta = (2.6f64).sin() / 1.3;
        assert!((u.matrix[(0, 0)] - Complex64::from_polar(1.0, -theta)).norm() < 1e-11);
        assert!((u.matrix[(1, 1)] - Complex64::from_polar(1.0, theta)).norm() < 1e-11);
    }

    #[test]
    fn identity_expectation() {
        let u = CMatrix::identity(2, 2);
        let z = ObservableDecomposition::single("Z".parse().unwrap()).unwrap();
        assert_eq!(
            exact_expectation(&[c(1.0, 0.0), c(0.0, 0.0)], &z, &u).unwrap(),
            1.0
        );
    }

    #[test]
    fn convergence_orders() {
        let h = TimeDependentHamiltonian::new(
            1,
            vec![
                HamiltonianTerm::new("X".parse().unwrap(), Waveform::cosine(1.0, 2.0)).unwrap(),
                HamiltonianTerm::new("Z".parse().unwrap(), Waveform::constant(0.7)).unwrap(),
            ],
            1.5,
        )
        .unwrap();
        let fine = exact_propagator(&h, 0.0, 1.5, 1e-13).unwrap().matrix;
        for (scheme, order, steps) in [
            (Scheme::Midpoint, 2.0, [8usize, 16, 32, 64]),
            (Scheme::Magnus4, 4.0, [4usize, 8, 16, 32]),
        ] {
            let errs: Vec<f64> = steps
                .iter()
                .map(|&m| {
                    max_abs(&(fixed_step_propagator(&h, 0.0, 1.5, m, scheme).unwrap() - &fine))
                })
                .collect();
            for w in errs.windows(2) {
                let slope = (w[1] / w[0]).log2();
                assert!((slope + order).abs() < 0.2, "{scheme:?} slope {slope}");
            }
        }
    }

    #[test]
    fn quadrature_rules() {
        let (x, w) = gauss_legendre(8);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // Exact for degree 15.
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
        let kink = integrate(|t: f64| t.cos().max(0.0), 0.0, PI, 1e-12).unwrap();
        assert!((kink - 1.0).abs() < 1e-11);
    }

    #[test]
    fn single_term_channel_is_unitary() {
        let h = single("X", Waveform::constant(0.4), 1.0);
        let plan = SegmentPlan::with_segments(&h, 1).unwrap();
        let rho0 = density(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let rho = qdrift_exact_state(&h, &plan, &rho0).unwrap();
        let u = hermitian_exp(
            &"X".parse::<PauliString>().unwrap().to_matrix().unwrap(),
            0.4,
        );
        let target = &u * &rho0 * u.adjoint();
        assert!(max_abs(&(rho - target)) < 1e-14);
        let psi = [c(1.0, 0.0), c(0.0, 0.0)];
        let z = ObservableDecomposition::single("Z".parse().unwrap()).unwrap();
        for n in [1, 3, 7] {
            let plan = SegmentPlan::with_segments(&h, n).unwrap();
            assert!(algorithmic_error(&h, &plan, &psi, &z, 1e-12).unwrap().abs() < 1e-11);
        }
    }

    #[test]
    fn channel_preserves_trace() {
        let h = crate::models::spin_chain(3, 0.1, 1.0, PI).unwrap();
        let plan = SegmentPlan::with_segments(&h, 8).unwrap();
        let mut psi = vec![c(0.0, 0.0); 8];
        psi[0b101] = c(1.0, 0.0);
        let rho = qdrift_exact_state(&h, &plan, &density(&psi)).unwrap();
        assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-12);
        let herm = max_abs(&(&rho - rho.adjoint()));
        assert!(herm < 1e-14);
    }

    #[test]
    fn leading_order_identity() {
        let ps: Vec<PauliString> = ["XZ", "YY", "IZ"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let lp = [0.1, 0.25, 0.05];
        let phi = 0.4f64.atan();
        let alpha: Vec<f64> = lp.iter().map(|l| l / phi.sin()).collect();
        assert!(leading_order_deviation(&ps, &lp, phi, &alpha).unwrap() < 1e-13);
        assert!(leading_order_deviation(&ps, &lp, phi * 1.01, &alpha).unwrap() > 1e-4);
    }

    #[test]
    fn constant_law_sums_to_one() {
        let h = TimeDependentHamiltonian::new(
            1,
            vec![
                HamiltonianTerm::new("X".parse().unwrap(), Waveform::constant(0.3)).unwrap(),
                HamiltonianTerm::new("Z".parse().unwrap(), Waveform::constant(-0.1)).unwrap(),
            ],
            1.0,
        )
        .unwrap();
        let plan = SegmentPlan::with_segments(&h, 1).unwrap();
        let law = constant_pdy_law(&h, &plan, 0, 2).unwrap();
        let total: f64 = law.iter().map(|x| x.1).sum();
        assert!((total - 1.0).abs() < 1e-15);
        // XX and (−Z)(−Z) both give −𝕀 after (−i)².
        let minus_id = PauliString::identity(1).negated();
        let p = law.iter().find(|(q, _)| *q == minus_id).unwrap().1;
        assert!((p - (0.75f64.powi(2) + 0.25f64.powi(2))).abs() < 1e-15);
        let ramp = single("X", Waveform::linear_ramp(0.0, 1.0, 0.0, 1.0), 1.0);
        let plan = SegmentPlan::with_segments(&ramp, 1).unwrap();
        assert!(constant_pdy_law(&ramp, &plan, 0, 2).is_err());
    }

    #[test]
    fn ground_energy_of_toy_target() {
        let file = crate::models::adiabatic_toy(50.0);
        let e = ground_energy(file.final_terms().unwrap()).unwrap();
        assert!((e + 1.5).abs() < 1e-12);
    }
}
