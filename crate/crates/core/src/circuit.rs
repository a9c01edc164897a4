//! Gate-level circuits: lowering of Pauli rotations and Pauli products,
//! resource counting and a line-oriented text form.
//!
//! `exp(−iφσ)` for a weight-`k` string is lowered as basis changes `W` on the
//! support (mapping `X`, `Y` to `Z`), a CNOT ladder folding the parity onto
//! the last support qubit, `Ph(φ) = diag(e^{−iφ}, e^{iφ})` there, and the
//! mirror image. The controlled form replaces `Ph(φ)` by
//! `Ph(φ/2) · CNOT(anc, last) · Ph(∓φ/2) · CNOT(anc, last)`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::compiler::{SampledUnitary, UnitaryKind};
use crate::error::{Error, Result};
use crate::pauli::{i_pow, Letter, PauliString};

pub type Mat2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// `W(X) = H`, `W(Y) = exp(−iπ/4 X)`; `dagger` selects `W†`.
    BasisChange {
        letter: Letter,
        qubit: usize,
        dagger: bool,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    /// `diag(e^{−iθ}, e^{iθ})`
    Ph {
        theta: f64,
        qubit: usize,
    },
    ControlledPauli {
        letter: Letter,
        control: usize,
        target: usize,
    },
    Pauli {
        letter: Letter,
        qubit: usize,
    },
    Hadamard {
        qubit: usize,
    },
    /// Clifford phase `diag(1, i^power)`.
    Phase {
        power: u8,
        qubit: usize,
    },
}

/// Action of a gate on the state vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateAction {
    Single {
        qubit: usize,
        m: Mat2,
    },
    Controlled {
        control: usize,
        target: usize,
        m: Mat2,
    },
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Gate {
    pub fn action(&self) -> GateAction {
        let o = c(0.0, 0.0);
        match *self {
            Gate::BasisChange {
                letter,
                qubit,
                dagger,
            } => {
                let s = FRAC_1_SQRT_2;
                let m = match letter {
                    Letter::X => [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]],
                    Letter::Y => {
                        let off = if dagger { c(0.0, s) } else { c(0.0, -s) };
                        [[c(s, 0.0), off], [off, c(s, 0.0)]]
                    }
                    Letter::Z | Letter::I => Letter::I.matrix(),
                };
                GateAction::Single { qubit, m }
            }
            Gate::Cnot { control, target } => GateAction::Controlled {
                control,
                target,
                m: Letter::X.matrix(),
            },
            Gate::Ph { theta, qubit } => GateAction::Single {
                qubit,
                m: [
                    [Complex64::from_polar(1.0, -theta), o],
                    [o, Complex64::from_polar(1.0, theta)],
                ],
            },
            Gate::ControlledPauli {
                letter,
                control,
                target,
            } => GateAction::Controlled {
                control,
                target,
                m: letter.matrix(),
            },
            Gate::Pauli { letter, qubit } => GateAction::Single {
                qubit,
                m: letter.matrix(),
            },
            Gate::Hadamard { qubit } => {
                let s = FRAC_1_SQRT_2;
                GateAction::Single {
                    qubit,
                    m: [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]],
                }
            }
            Gate::Phase { power, qubit } => GateAction::Single {
                qubit,
                m: [[c(1.0, 0.0), o], [o, i_pow(power)]],
            },
        }
    }

    fn qubits(&self) -> (usize, Option<usize>) {
        match self.action() {
            GateAction::Single { qubit, .. } => (qubit, None),
            GateAction::Controlled {
                control, target, ..
            } => (control, Some(target)),
        }
    }

    /// Inverse gate.
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::BasisChange {
                letter,
                qubit,
                dagger,
            } => Gate::BasisChange {
                letter,
                qubit,
                dagger: !dagger,
            },
            Gate::Ph { theta, qubit } => Gate::Ph {
                theta: -theta,
                qubit,
            },
            Gate::Phase { power, qubit } => Gate::Phase {
                power: (4 - (power & 3)) & 3,
                qubit,
            },
            ref g => g.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumCircuit {
    width: usize,
    gates: Vec<Gate>,
}

impl QuantumCircuit {
    pub fn new(width: usize) -> Self {
        QuantumCircuit {
            width,
            gates: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let (a, b) = gate.qubits();
        for q in std::iter::once(a).chain(b) {
            if q >= self.width {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    width: self.width,
                });
            }
        }
        if b == Some(a) {
            return Err(Error::InvalidArgument(format!(
                "control and target coincide in {gate:?}"
            )));
        }
        if let Gate::Ph { theta, .. } = gate {
            if !theta.is_finite() {
                return Err(Error::InvalidArgument("non-finite phase angle".into()));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn append(&mut self, other: &QuantumCircuit) -> Result<()> {
        for g in &other.gates {
            self.push(g.clone())?;
        }
        Ok(())
    }

    /// Gates reversed and inverted.
    pub fn inverse(&self) -> QuantumCircuit {
        QuantumCircuit {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Text dump: a `WIDTH n` header and one gate per line.
    pub fn dump(&self) -> String {
        let mut out = format!("WIDTH {}\n", self.width);
        for g in &self.gates {
            out.push_str(&format!("{g}\n"));
        }
        out
    }

    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty circuit dump".into()))?;
        let width: usize = header
            .strip_prefix("WIDTH ")
            .and_then(|w| w.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?;
        if width > 64 {
            return Err(Error::Parse(format!("width {width} too large")));
        }
        let mut circ = QuantumCircuit::new(width);
        for line in lines {
            circ.push(line.parse()?)?;
        }
        Ok(circ)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::BasisChange {
                letter,
                qubit,
                dagger,
            } => {
                let name = if *dagger { "WDG" } else { "W" };
                write!(f, "{name} {} {qubit}", letter.as_char())
            }
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            Gate::Ph { theta, qubit } => write!(f, "PH {theta:?} {qubit}"),
            Gate::ControlledPauli {
                letter,
                control,
                target,
            } => write!(f, "C{} {control} {target}", letter.as_char()),
            Gate::Pauli { letter, qubit } => write!(f, "{} {qubit}", letter.as_char()),
            Gate::Hadamard { qubit } => write!(f, "H {qubit}"),
            Gate::Phase { power, qubit } => write!(f, "S {power} {qubit}"),
        }
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed gate {line:?}"));
        let parts: Vec<&str> = line.split_whitespace().collect();
        let q = |s: &str| s.parse::<usize>().map_err(|_| bad());
        let letter = |s: &str| {
            let mut it = s.chars();
            match (it.next().and_then(Letter::from_char), it.next()) {
                (Some(l), None) if l != Letter::I => Ok(l),
                _ => Err(bad()),
            }
        };
        let gate = match parts.as_slice() {
            ["W", l, a] | ["WDG", l, a] => {
                let letter = letter(l)?;
                if letter == Letter::Z {
                    return Err(bad());
                }
                Gate::BasisChange {
                    letter,
                    qubit: q(a)?,
                    dagger: parts[0] == "WDG",
                }
            }
            ["CNOT", a, b] => Gate::Cnot {
                control: q(a)?,
                target: q(b)?,
            },
            ["PH", t, a] => {
                let theta: f64 = t.parse().map_err(|_| bad())?;
                Gate::Ph {
                    theta,
                    qubit: q(a)?,
                }
            }
            ["CX", a, b] | ["CY", a, b] | ["CZ", a, b] => Gate::ControlledPauli {
                letter: letter(&parts[0][1..])?,
                control: q(a)?,
                target: q(b)?,
            },
            ["X", a] | ["Y", a] | ["Z", a] => Gate::Pauli {
                letter: letter(parts[0])?,
                qubit: q(a)?,
            },
            ["H", a] => Gate::Hadamard { qubit: q(a)? },
            ["S", p, a] => {
                let power: u8 = p.parse().map_err(|_| bad())?;
                if power > 3 {
                    return Err(bad());
                }
                Gate::Phase {
                    power,
                    qubit: q(a)?,
                }
            }
            _ => return Err(bad()),
        };
        Ok(gate)
    }
}

/// Which ancilla branch a lowered operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    /// `true`: act when the ancilla is `|1⟩`.
    pub on_one: bool,
}

/// Appends `exp(−iφσ)` to `circ`; data qubit `j` maps to `j + offset`.
pub fn append_rotation(
    circ: &mut QuantumCircuit,
    sigma: &PauliString,
    phi: f64,
    control: Option<Control>,
    offset: usize,
) -> Result<()> {
    let sign = sigma
        .sign()
        .ok_or_else(|| Error::NotHermitian(sigma.to_string()))?;
    let support = sigma.support();
    let Some(&last) = support.last() else {
        return Err(Error::InvalidArgument(
            "rotation about the identity is a global phase".into(),
        ));
    };
    let phi = sign * phi;
    let at = |q: usize| q + offset;
    for &q in &support {
        let l = sigma.letter(q);
        if l != Letter::Z {
            circ.push(Gate::BasisChange {
                letter: l,
                qubit: at(q),
                dagger: false,
            })?;
        }
    }
    for w in support.windows(2) {
        circ.push(Gate::Cnot {
            control: at(w[0]),
            target: at(w[1]),
        })?;
    }
    match control {
        None => circ.push(Gate::Ph {
            theta: phi,
            qubit: at(last),
        })?,
        Some(ctl) => {
            // Ph(a) CNOT Ph(b) CNOT gives Ph(a + b) on |0⟩ and Ph(a − b) on |1⟩.
            let second = if ctl.on_one { -0.5 * phi } else { 0.5 * phi };
            let cnot = Gate::Cnot {
                control: ctl.qubit,
                target: at(last),
            };
            circ.push(Gate::Ph {
                theta: 0.5 * phi,
                qubit: at(last),
            })?;
            circ.push(cnot.clone())?;
            circ.push(Gate::Ph {
                theta: second,
                qubit: at(last),
            })?;
            circ.push(cnot)?;
        }
    }
    for w in support.windows(2).rev() {
        circ.push(Gate::Cnot {
            control: at(w[0]),
            target: at(w[1]),
        })?;
    }
    for &q in &support {
        let l = sigma.letter(q);
        if l != Letter::Z {
            circ.push(Gate::BasisChange {
                letter: l,
                qubit: at(q),
                dagger: true,
            })?;
        }
    }
    Ok(())
}

/// Appends `|b⟩⟨b| ⊗ P + |b̄⟩⟨b̄| ⊗ 𝕀` for a phased Pauli `P`, with the
/// global factor `i^m` of `P` realized on the ancilla.
pub fn append_pauli_product(
    circ: &mut QuantumCircuit,
    op: &PauliString,
    control: Control,
    offset: usize,
) -> Result<()> {
    if op.is_identity_letters() && op.phase_exp() == 0 {
        return Ok(());
    }
    let flip = Gate::Pauli {
        letter: Letter::X,
        qubit: control.qubit,
    };
    if !control.on_one {
        circ.push(flip.clone())?;
    }
    for q in op.support() {
        circ.push(Gate::ControlledPauli {
            letter: op.letter(q),
            control: control.qubit,
            target: q + offset,
        })?;
    }
    if op.phase_exp() != 0 {
        circ.push(Gate::Phase {
            power: op.phase_exp(),
            qubit: control.qubit,
        })?;
    }
    if !control.on_one {
        circ.push(flip)?;
    }
    Ok(())
}

/// Standalone `exp(−iφσ)`. Uncontrolled circuits have width `n`; controlled
/// ones put the ancilla on qubit 0 and data qubit `j` on `j + 1`.
pub fn lower_rotation(
    sigma: &PauliString,
    phi: f64,
    control: Option<bool>,
) -> Result<QuantumCircuit> {
    let n = sigma.num_qubits();
    match control {
        None => {
            let mut circ = QuantumCircuit::new(n);
            append_rotation(&mut circ, sigma, phi, None, 0)?;
            Ok(circ)
        }
        Some(on_one) => {
            let mut circ = QuantumCircuit::new(n + 1);
            append_rotation(&mut circ, sigma, phi, Some(Control { qubit: 0, on_one }), 1)?;
            Ok(circ)
        }
    }
}

/// Ancilla-controlled Pauli product on `n + 1` qubits (ancilla = qubit 0).
pub fn lower_pauli_product(op: &PauliString, on_one: bool) -> Result<QuantumCircuit> {
    let mut circ = QuantumCircuit::new(op.num_qubits() + 1);
    append_pauli_product(&mut circ, op, Control { qubit: 0, on_one }, 1)?;
    Ok(circ)
}

/// Appends one sampled segment operator acting on the chosen ancilla branch.
pub fn append_sampled(circ: &mut QuantumCircuit, u: &SampledUnitary, on_one: bool) -> Result<()> {
    let ctl = Control { qubit: 0, on_one };
    match &u.kind {
        UnitaryKind::Rotation { sigma, phi } => {
            if sigma.is_identity_letters() {
                // exp(−iφ(±𝕀)) is a relative phase between the branches.
                return append_branch_phase(circ, -sigma.sign().unwrap_or(1.0) * phi, on_one);
            }
            append_rotation(circ, sigma, *phi, Some(ctl), 1)
        }
        UnitaryKind::PauliProduct { op, .. } => append_pauli_product(circ, op, ctl, 1),
        UnitaryKind::Identity => Ok(()),
    }
}

/// `e^{iθ}` on one ancilla branch.
fn append_branch_phase(circ: &mut QuantumCircuit, theta: f64, on_one: bool) -> Result<()> {
    // Ph(θ/2) = e^{−iθ/2} diag(1, e^{iθ}); the global factor is dropped.
    let t = if on_one { 0.5 * theta } else { -0.5 * theta };
    circ.push(Gate::Ph { theta: t, qubit: 0 })
}

/// Hadamard-test body: `|0⟩⟨0| ⊗ u(s′) + |1⟩⟨1| ⊗ u(s)` on `n + 1` qubits.
pub fn lower_pair(
    branch_s: &[SampledUnitary],
    branch_s_prime: &[SampledUnitary],
    n: usize,
) -> Result<QuantumCircuit> {
    let mut circ = QuantumCircuit::new(n + 1);
    for (u, v) in branch_s.iter().zip(branch_s_prime) {
        append_sampled(&mut circ, u, true)?;
        append_sampled(&mut circ, v, false)?;
    }
    Ok(circ)
}

/// Uncontrolled product of rotations in time order.
pub fn lower_sequence(unitaries: &[SampledUnitary], n: usize) -> Result<QuantumCircuit> {
    let mut circ = QuantumCircuit::new(n);
    for u in unitaries {
        match &u.kind {
            UnitaryKind::Rotation { sigma, phi } => {
                append_rotation(&mut circ, sigma, *phi, None, 0)?
            }
            UnitaryKind::Identity => {}
            UnitaryKind::PauliProduct { .. } => {
                return Err(Error::InvalidArgument(
                    "Pauli products need an ancilla".into(),
                ))
            }
        }
    }
    Ok(circ)
}

/// Default constant in `N_ph = ceil(c_RS · log2(1/ε_ph))`.
pub const DEFAULT_C_RS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ResourceCount {
    pub single_qubit: u64,
    pub two_qubit: u64,
    pub phase_gates: u64,
}

impl ResourceCount {
    pub fn add(&mut self, other: ResourceCount) {
        self.single_qubit += other.single_qubit;
        self.two_qubit += other.two_qubit;
        self.phase_gates += other.phase_gates;
    }

    /// T gates spent on phase-gate synthesis; Cliffords cost none.
    pub fn t_count(&self, eps_ph: f64, c_rs: f64) -> Result<u64> {
        Ok(self.phase_gates * t_per_phase_gate(eps_ph, c_rs)?)
    }
}

pub fn t_per_phase_gate(eps_ph: f64, c_rs: f64) -> Result<u64> {
    if !(eps_ph > 0.0 && eps_ph < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "eps_ph {eps_ph} outside (0, 1)"
        )));
    }
    if !(c_rs > 0.0 && c_rs.is_finite()) {
        return Err(Error::InvalidArgument(format!("c_RS {c_rs}")));
    }
    Ok((c_rs * (1.0 / eps_ph).log2()).ceil() as u64)
}

/// Gate tallies; a controlled `Y` counts as one two-qubit gate plus the two
/// single-qubit Cliffords that conjugate a CNOT into it.
pub fn count_resources(circ: &QuantumCircuit) -> ResourceCount {
    let mut r = ResourceCount::default();
    for g in circ.gates() {
        match g {
            Gate::Cnot { .. } => r.two_qubit += 1,
            Gate::ControlledPauli { letter, .. } => {
                r.two_qubit += 1;
                if *letter == Letter::Y {
                    r.single_qubit += 2;
                }
            }
            Gate::Ph { .. } => {
                r.single_qubit += 1;
                r.phase_gates += 1;
            }
            _ => r.single_qubit += 1,
        }
    }
    r
}

/// Counts of [`append_rotation`] without building the gates.
pub fn rotation_resources(sigma: &PauliString, controlled: bool) -> ResourceCount {
    let k = sigma.weight() as u64;
    if k == 0 {
        return ResourceCount {
            single_qubit: 1,
            two_qubit: 0,
            phase_gates: 1,
        };
    }
    let basis = 2 * sigma
        .letters()
        .iter()
        .filter(|l| matches!(l, Letter::X | Letter::Y))
        .count() as u64;
    let (ph, extra) = if controlled { (2, 2) } else { (1, 0) };
    ResourceCount {
        single_qubit: basis + ph,
        two_qubit: 2 * (k - 1) + extra,
        phase_gates: ph,
    }
}

/// Counts of one sampled unitary lowered into a Hadamard-test branch.
pub fn sampled_resources(u: &SampledUnitary, on_one: bool) -> ResourceCount {
    match &u.kind {
        UnitaryKind::Rotation { sigma, .. } => rotation_resources(sigma, true),
        UnitaryKind::PauliProduct { op, .. } => {
            if op.is_identity_letters() && op.phase_exp() == 0 {
                return ResourceCount::default();
            }
            let ys = op.letters().iter().filter(|l| **l == Letter::Y).count() as u64;
            let flips = if on_one { 0 } else { 2 };
            let phase = u64::from(op.phase_exp() != 0);
            ResourceCount {
                single_qubit: 2 * ys + flips + phase,
                two_qubit: op.weight() as u64,
                phase_gates: 0,
            }
        }
        UnitaryKind::Identity => ResourceCount::default(),
    }
}

/// Counts for a compiled Hadamard-test pair.
pub fn pair_resources(
    branch_s: &[SampledUnitary],
    branch_s_prime: &[SampledUnitary],
) -> ResourceCount {
    let mut r = ResourceCount::default();
    for u in branch_s {
        r.add(sampled_resources(u, true));
    }
    for v in branch_s_prime {
        r.add(sampled_resources(v, false));
    }
    r
}

/// T-count ratio `N_seg,qd / (4 N_seg,urcc)` between the two compilers.
pub fn t_count_ratio(n_seg_qd: u64, n_seg_urcc: u64) -> Result<f64> {
    if n_seg_urcc == 0 {
        return Err(Error::InvalidArgument("URCC segment count is zero".into()));
    }
    Ok(n_seg_qd as f64 / (4 * n_seg_urcc) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn zz_ladder() {
        let circ = lower_rotation(&p("ZZ"), 0.3, None).unwrap();
        assert_eq!(circ.dump(), "WIDTH 2\nCNOT 0 1\nPH 0.3 1\nCNOT 0 1\n");
    }

    #[test]
    fn single_x() {
        let circ = lower_rotation(&p("X"), 0.25, None).unwrap();
        assert_eq!(circ.dump(), "WIDTH 1\nW X 0\nPH 0.25 0\nWDG X 0\n");
    }

    #[test]
    fn gate_counts_follow_weight() {
        for s in ["XYZI", "IIXI", "YYYY", "-ZIZY"] {
            let sigma = p(s);
            let k = sigma.weight() as u64;
            let un = count_resources(&lower_rotation(&sigma, 0.1, None).unwrap());
            let ctl = count_resources(&lower_rotation(&sigma, 0.1, Some(true)).unwrap());
            assert_eq!(un.two_qubit, 2 * (k - 1));
            assert_eq!(un.phase_gates, 1);
            assert_eq!(ctl.two_qubit, 2 * (k - 1) + 2);
            assert_eq!(ctl.phase_gates, 2);
            assert_eq!(un, rotation_resources(&sigma, false));
            assert_eq!(ctl, rotation_resources(&sigma, true));
        }
        assert!(lower_rotation(&p("II"), 0.1, None).is_err());
        assert!(lower_rotation(&p("iXI"), 0.1, None).is_err());
    }

    #[test]
    fn product_realization() {
        let circ = lower_pauli_product(&p("-iZ"), true).unwrap();
        assert_eq!(circ.dump(), "WIDTH 2\nCZ 0 1\nS 3 0\n");
        assert!(lower_pauli_product(&p("II"), true)
            .unwrap()
            .gates()
            .is_empty());
        let neg = lower_pauli_product(&p("-II"), true).unwrap();
        assert_eq!(neg.gates(), &[Gate::Phase { power: 2, qubit: 0 }]);
        let zero = lower_pauli_product(&p("YX"), false).unwrap();
        let u = SampledUnitary {
            segment: 0,
            kind: UnitaryKind::PauliProduct {
                op: p("YX"),
                order: 2,
            },
        };
        assert_eq!(count_resources(&zero), sampled_resources(&u, false));
    }

    #[test]
    fn t_counts() {
        let r = ResourceCount {
            single_qubit: 3,
            two_qubit: 2,
            phase_gates: 1,
        };
        assert_eq!(r.t_count(2f64.powi(-10), 4.0).unwrap(), 40);
        assert_eq!(ResourceCount::default().t_count(1e-3, 4.0).unwrap(), 0);
        assert!(r.t_count(1.0, 4.0).is_err());
        assert_eq!(t_count_ratio(400, 100).unwrap(), 1.0);
        assert_eq!(t_count_ratio(4000, 100).unwrap(), 10.0);
        assert!(t_count_ratio(1, 0).is_err());
    }

    #[test]
    fn dump_round_trip_and_rejections() {
        let mut circ = lower_rotation(&p("XYZ"), -1.25, Some(false)).unwrap();
        circ.append(&lower_pauli_product(&p("iYXZ"), false).unwrap())
            .unwrap();
        circ.push(Gate::Hadamard { qubit: 0 }).unwrap();
        let back = QuantumCircuit::parse_dump(&circ.dump()).unwrap();
        assert_eq!(back, circ);
        for bad in [
            "WIDTH 2\nCNOT 0 0\n",
            "WIDTH 2\nCNOT 0 2\n",
            "WIDTH 1\nPH nan 0\n",
            "WIDTH 1\nW Z 0\n",
            "WIDTH 1\nS 4 0\n",
            "WIDTH 1\nCI 0 1\n",
            "WIDE 1\n",
            "",
        ] {
            assert!(QuantumCircuit::parse_dump(bad).is_err(), "{bad:?}");
        }
    }
}
