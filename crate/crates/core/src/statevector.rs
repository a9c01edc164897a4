//! Dense state-vector simulation of the one-ancilla Hadamard test.
//!
//! Bit convention: qubit `q` of a width-`w` register is bit `w − 1 − q` of
//! the amplitude index, so qubit 0 (the ancilla, when present) is the most
//! significant bit. Data qubit `j` sits on circuit qubit `j + 1`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Gate, GateAction, Mat2, QuantumCircuit};
use crate::compiler::{CompiledCircuitPair, SampledUnitary, UnitaryKind};
use crate::error::{Error, Result};
use crate::pauli::{i_pow, Letter, PauliString};

/// Default register limit of the dense engine.
pub const DEFAULT_WIDTH_LIMIT: usize = 14;

/// Allowed drift of `‖ψ‖²` from 1.
pub const NORM_TOL: f64 = 1e-12;

/// Initial data state: a computational-basis label such as `"101"` (qubit 0
/// first) or an explicit amplitude list of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Basis(String),
    Amplitudes(Vec<[f64; 2]>),
}

impl InitialState {
    /// Amplitudes on `n` qubits.
    pub fn amplitudes(&self, n: usize) -> Result<Vec<Complex64>> {
        check_width(n)?;
        let dim = 1usize << n;
        match self {
            InitialState::Basis(label) => {
                if label.len() != n {
                    return Err(Error::DimensionMismatch {
                        left: n,
                        right: label.len(),
                    });
                }
                let mut index = 0usize;
                for ch in label.chars() {
                    index = (index << 1)
                        | match ch {
                            '0' => 0,
                            '1' => 1,
                            _ => {
                                return Err(Error::Parse(format!("invalid basis label {label:?}")))
                            }
                        };
                }
                let mut amps = vec![Complex64::new(0.0, 0.0); dim];
                amps[index] = Complex64::new(1.0, 0.0);
                Ok(amps)
            }
            InitialState::Amplitudes(list) => {
                if list.len() != dim {
                    return Err(Error::InvalidArgument(format!(
                        "{} amplitudes for {n} qubits",
                        list.len()
                    )));
                }
                let amps: Vec<Complex64> =
                    list.iter().map(|[r, i]| Complex64::new(*r, *i)).collect();
                let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
                if !((norm - 1.0).abs() <= 1e-10) {
                    return Err(Error::InvalidArgument(format!(
                        "initial state has squared norm {norm}"
                    )));
                }
                Ok(amps)
            }
        }
    }
}

fn check_width(width: usize) -> Result<()> {
    if width == 0 || width > DEFAULT_WIDTH_LIMIT {
        return Err(Error::SizeLimit {
            qubits: width,
            limit: DEFAULT_WIDTH_LIMIT,
        });
    }
    Ok(())
}

/// Pauli string resolved to index bit masks of a register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliMask {
    pub x: usize,
    pub z: usize,
    /// `P|b⟩ = i^phase (−1)^{|b ∧ z|} |b ⊕ x⟩`
    pub phase: u8,
}

impl PauliMask {
    /// Data qubit `j` of `p` placed on register qubit `j + offset`.
    pub fn new(p: &PauliString, width: usize, offset: usize) -> Result<Self> {
        if p.num_qubits() + offset > width {
            return Err(Error::DimensionMismatch {
                left: width,
                right: p.num_qubits() + offset,
            });
        }
        let (mut x, mut z, mut ys) = (0usize, 0usize, 0u8);
        for q in p.support() {
            let bit = 1usize << (width - 1 - (q + offset));
            match p.letter(q) {
                Letter::X => x |= bit,
                Letter::Z => z |= bit,
                Letter::Y => {
                    x |= bit;
                    z |= bit;
                    ys += 1;
                }
                Letter::I => {}
            }
        }
        Ok(PauliMask {
            x,
            z,
            phase: (p.phase_exp() + ys) & 3,
        })
    }

    #[inline]
    fn coeff(&self, b: usize) -> Complex64 {
        let k = self.phase + 2 * ((b & self.z).count_ones() & 1) as u8;
        i_pow(k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    width: usize,
    amps: Vec<Complex64>,
}

/// Restricts an update to indices `b` with `b & mask == value`.
#[derive(Debug, Clone, Copy)]
struct Cond {
    mask: usize,
    value: usize,
}

impl Cond {
    const ALWAYS: Cond = Cond { mask: 0, value: 0 };

    #[inline]
    fn holds(&self, b: usize) -> bool {
        b & self.mask == self.value
    }
}

impl StateVector {
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("{dim} amplitudes")));
        }
        let width = dim.trailing_zeros() as usize;
        check_width(width)?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("squared norm {norm}")));
        }
        Ok(StateVector { width, amps })
    }

    /// `|index⟩` on `width` qubits.
    pub fn basis(width: usize, index: usize) -> Result<Self> {
        check_width(width)?;
        if index >> width != 0 {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} on {width} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << width];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { width, amps })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Fails when the norm has drifted; the state is never renormalized.
    pub fn check_norm(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL || !n.is_finite() {
            return Err(Error::Numerical(format!("state norm drifted to {n}")));
        }
        Ok(())
    }

    fn bit(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.width {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                width: self.width,
            });
        }
        Ok(1 << (self.width - 1 - qubit))
    }

    fn apply_mat2(&mut self, bit: usize, m: &Mat2, cond: Cond) {
        for b in 0..self.amps.len() {
            if b & bit != 0 || !cond.holds(b) {
                continue;
            }
            let b1 = b | bit;
            let (a0, a1) = (self.amps[b], self.amps[b1]);
            self.amps[b] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[b1] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        match gate.action() {
            GateAction::Single { qubit, m } => {
                let bit = self.bit(qubit)?;
                self.apply_mat2(bit, &m, Cond::ALWAYS);
            }
            GateAction::Controlled { control, target, m } => {
                let c = self.bit(control)?;
                let t = self.bit(target)?;
                if c == t {
                    return Err(Error::InvalidArgument("control equals target".into()));
                }
                self.apply_mat2(t, &m, Cond { mask: c, value: c });
            }
        }
        self.check_norm()
    }

    pub fn apply_circuit(&mut self, circ: &QuantumCircuit) -> Result<()> {
        if circ.width() != self.width {
            return Err(Error::DimensionMismatch {
                left: self.width,
                right: circ.width(),
            });
        }
        for g in circ.gates() {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    fn apply_pauli_masked(&mut self, p: PauliMask, cond: Cond) {
        if p.x == 0 {
            for b in 0..self.amps.len() {
                if cond.holds(b) {
                    self.amps[b] *= p.coeff(b);
                }
            }
            return;
        }
        let top = 1usize << (usize::BITS - 1 - p.x.leading_zeros());
        for b in 0..self.amps.len() {
            if b & top != 0 || !cond.holds(b) {
                continue;
            }
            let b1 = b ^ p.x;
            let (a0, a1) = (self.amps[b], self.amps[b1]);
            self.amps[b1] = p.coeff(b) * a0;
            self.amps[b] = p.coeff(b1) * a1;
        }
    }

    /// `exp(−iφP)` for Hermitian `P`.
    fn apply_rotation_masked(&mut self, p: PauliMask, phi: f64, cond: Cond) {
        let (s, c) = phi.sin_cos();
        let mis = Complex64::new(0.0, -s);
        if p.x == 0 {
            for b in 0..self.amps.len() {
                if cond.holds(b) {
                    // P is diagonal with real entries ±1 here.
                    let e = p.coeff(b).re;
                    self.amps[b] *= Complex64::new(c, -s * e);
                }
            }
            return;
        }
        let top = 1usize << (usize::BITS - 1 - p.x.leading_zeros());
        for b in 0..self.amps.len() {
            if b & top != 0 || !cond.holds(b) {
                continue;
            }
            let b1 = b ^ p.x;
            let (a0, a1) = (self.amps[b], self.amps[b1]);
            self.amps[b] = c * a0 + mis * p.coeff(b1) * a1;
            self.amps[b1] = c * a1 + mis * p.coeff(b) * a0;
        }
    }

    fn control_cond(&self, control: Option<bool>) -> Cond {
        match control {
            None => Cond::ALWAYS,
            Some(on_one) => {
                let bit = 1usize << (self.width - 1);
                Cond {
                    mask: bit,
                    value: if on_one { bit } else { 0 },
                }
            }
        }
    }

    /// Applies the phased Pauli `p` (data qubit `j` on `j + offset`),
    /// optionally only on one ancilla branch (ancilla = qubit 0).
    pub fn apply_pauli(
        &mut self,
        p: &PauliString,
        control: Option<bool>,
        offset: usize,
    ) -> Result<()> {
        let mask = PauliMask::new(p, self.width, offset)?;
        let cond = self.control_cond(control);
        self.apply_pauli_masked(mask, cond);
        self.check_norm()
    }

    /// Applies `exp(−iφσ)` for Hermitian `σ`.
    pub fn apply_rotation(
        &mut self,
        sigma: &PauliString,
        phi: f64,
        control: Option<bool>,
        offset: usize,
    ) -> Result<()> {
        if !sigma.is_hermitian() {
            return Err(Error::NotHermitian(sigma.to_string()));
        }
        let mask = PauliMask::new(sigma, self.width, offset)?;
        let cond = self.control_cond(control);
        self.apply_rotation_masked(mask, phi, cond);
        self.check_norm()
    }

    pub fn apply_sampled(
        &mut self,
        u: &SampledUnitary,
        control: Option<bool>,
        offset: usize,
    ) -> Result<()> {
        match &u.kind {
            UnitaryKind::Rotation { sigma, phi } => {
                self.apply_rotation(sigma, *phi, control, offset)
            }
            UnitaryKind::PauliProduct { op, .. } => self.apply_pauli(op, control, offset),
            UnitaryKind::Identity => Ok(()),
        }
    }

    /// `⟨ψ|P|ψ⟩` for Hermitian `P` on the whole register.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if !p.is_hermitian() {
            return Err(Error::NotHermitian(p.to_string()));
        }
        if p.num_qubits() != self.width {
            return Err(Error::DimensionMismatch {
                left: self.width,
                right: p.num_qubits(),
            });
        }
        let mask = PauliMask::new(p, self.width, 0)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for b in 0..self.amps.len() {
            acc += self.amps[b ^ mask.x].conj() * mask.coeff(b) * self.amps[b];
        }
        if acc.im.abs() > 1e-10 {
            return Err(Error::Numerical(format!(
                "expectation of Hermitian {p} has imaginary part {}",
                acc.im
            )));
        }
        Ok(acc.re)
    }

    /// Projective measurement of every qubit in the eigenbasis of the
    /// letters of `basis` (identity letters measure `Z`). Returns the outcome
    /// bits: bit `w − 1 − q` set means eigenvalue `−1` on qubit `q`.
    pub fn sample_in_basis<R: Rng + ?Sized>(
        &self,
        basis: &PauliString,
        rng: &mut R,
    ) -> Result<usize> {
        if basis.num_qubits() != self.width {
            return Err(Error::DimensionMismatch {
                left: self.width,
                right: basis.num_qubits(),
            });
        }
        let mut rotated = self.clone();
        for q in basis.support() {
            let l = basis.letter(q);
            if l != Letter::Z {
                let g = Gate::BasisChange {
                    letter: l,
                    qubit: q,
                    dagger: false,
                };
                if let GateAction::Single { m, .. } = g.action() {
                    let bit = rotated.bit(q)?;
                    rotated.apply_mat2(bit, &m, Cond::ALWAYS);
                }
            }
        }
        let mut u = rng.random::<f64>() * rotated.norm_sqr();
        let mut last = 0;
        for (b, a) in rotated.amps.iter().enumerate() {
            let w = a.norm_sqr();
            if w > 0.0 {
                if u < w {
                    return Ok(b);
                }
                u -= w;
                last = b;
            }
        }
        Ok(last)
    }

    /// Ancilla in `|+⟩`, data in `psi`, on `n + 1` qubits.
    pub fn prepare_hadamard_test(psi: &InitialState, n: usize) -> Result<Self> {
        check_width(n + 1)?;
        let data = psi.amplitudes(n)?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = Vec::with_capacity(2 * data.len());
        amps.extend(data.iter().map(|a| a * s));
        amps.extend(data.iter().map(|a| a * s));
        Ok(StateVector { width: n + 1, amps })
    }

    pub fn prepare(psi: &InitialState, n: usize) -> Result<Self> {
        StateVector::from_amplitudes(psi.amplitudes(n)?)
    }
}

/// `±1` eigenvalue of `Q` read off outcome bits of a compatible basis.
pub fn parity_outcome(q: &PauliString, bits: usize, width: usize) -> f64 {
    let mut mask = 0usize;
    for j in q.support() {
        mask |= 1 << (width - 1 - j);
    }
    let s = q.sign().unwrap_or(1.0);
    if (bits & mask).count_ones() % 2 == 1 {
        -s
    } else {
        s
    }
}

/// `X` on the ancilla tensored with a data observable.
pub fn ancilla_x(obs: &PauliString) -> PauliString {
    let mut letters = vec![Letter::X];
    letters.extend(obs.letters());
    PauliString::from_letters(&letters, obs.phase_exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `o = ⟨X ⊗ O⟩` of the final state.
    Exact,
    /// `o ∈ {−1, +1}` from one projective measurement.
    Shot,
}

/// Final Hadamard-test state for a compiled pair.
pub fn hadamard_state(
    pair: &CompiledCircuitPair,
    psi: &InitialState,
    n: usize,
) -> Result<StateVector> {
    if pair.branch_s.len() != pair.branch_s_prime.len() {
        return Err(Error::InvalidArgument("branches differ in length".into()));
    }
    let mut state = StateVector::prepare_hadamard_test(psi, n)?;
    for (u, v) in pair.branch_s.iter().zip(&pair.branch_s_prime) {
        state.apply_sampled(u, Some(true), 1)?;
        state.apply_sampled(v, Some(false), 1)?;
    }
    Ok(state)
}

/// Runs one Hadamard test and returns the outcome `o` for observable `obs`.
pub fn run_pair<R: Rng + ?Sized>(
    pair: &CompiledCircuitPair,
    psi: &InitialState,
    obs: &PauliString,
    mode: Mode,
    rng: &mut R,
) -> Result<f64> {
    if !obs.is_hermitian() {
        return Err(Error::NotHermitian(obs.to_string()));
    }
    let n = obs.num_qubits();
    let state = hadamard_state(pair, psi, n)?;
    let xo = ancilla_x(obs);
    match mode {
        Mode::Exact => state.expectation(&xo),
        Mode::Shot => {
            let bits = state.sample_in_basis(&xo, rng)?;
            Ok(parity_outcome(&xo, bits, n + 1))
        }
    }
}
