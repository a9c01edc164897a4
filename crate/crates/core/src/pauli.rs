//! Phased Pauli strings in packed symplectic form.
//!
//! A [`PauliString`] represents `i^phase · P_0 ⊗ P_1 ⊗ … ⊗ P_{n-1}` with
//! `P_j ∈ {I, X, Y, Z}` (Hermitian `Y`). Letters are stored as two bit planes
//! (`x`, `z`) packed into `u64` words, so a product costs `O(n / 64)` word
//! operations plus two popcounts. The phase is an exact integer mod 4.
//!
//! Qubit `0` is the leftmost letter of the text form and the most significant
//! tensor factor of [`PauliString::to_matrix`].

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest register for which dense matrices are built.
pub const DEFAULT_ORACLE_QUBITS: usize = 12;

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    /// 2×2 matrix of the letter.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Letter::I => [[one, o], [o, one]],
            Letter::X => [[o, one], [one, o]],
            Letter::Y => [[o, -i], [i, o]],
            Letter::Z => [[one, o], [o, -one]],
        }
    }
}

/// `i^k` for `k` taken mod 4.
pub fn i_pow(k: u8) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Phased tensor product of single-qubit Paulis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

impl PauliString {
    /// Identity on `n` qubits with phase `+1`.
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString {
            n,
            x: vec![0; w],
            z: vec![0; w],
            phase: 0,
        }
    }

    pub fn from_letters(letters: &[Letter], phase: u8) -> Self {
        let mut p = PauliString::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set(q, l);
        }
        p.phase = phase & 3;
        p
    }

    /// Single letter `letter` on qubit `qubit` of an `n`-qubit register.
    pub fn single(n: usize, qubit: usize, letter: Letter) -> Self {
        let mut p = PauliString::identity(n);
        p.set(qubit, letter);
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Exponent `k` of the global factor `i^k`.
    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    /// Multiply the global factor by `i^k`.
    pub fn times_i_pow(mut self, k: u8) -> Self {
        self.phase = (self.phase + (k & 3)) & 3;
        self
    }

    pub fn negated(self) -> Self {
        self.times_i_pow(2)
    }

    /// Same letters with phase `+1`.
    pub fn unsigned(&self) -> Self {
        self.clone().with_phase(0)
    }

    pub fn letter(&self, qubit: usize) -> Letter {
        let (w, b) = (qubit / 64, qubit % 64);
        Letter::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, letter: Letter) {
        assert!(
            qubit < self.n,
            "qubit {qubit} out of range for {} qubits",
            self.n
        );
        let (w, b) = (qubit / 64, qubit % 64);
        let (xb, zb) = letter.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((xb as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((zb as u64) << b);
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n).map(|q| self.letter(q)).collect()
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, (&xw, &zw)) in self.x.iter().zip(&self.z).enumerate() {
            let mut m = xw | zw;
            while m != 0 {
                let b = m.trailing_zeros() as usize;
                out.push(w * 64 + b);
                m &= m - 1;
            }
        }
        out
    }

    /// Locality `k`: number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn is_identity_letters(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Hermitian iff the global factor is real (`±1`).
    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    /// `±1` sign of a Hermitian string.
    pub fn sign(&self) -> Option<f64> {
        match self.phase {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    /// Exact product `self · rhs`.
    pub fn multiply(&self, rhs: &PauliString) -> Result<PauliString> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: rhs.n,
            });
        }
        let mut out = PauliString::identity(self.n);
        let mut up: u32 = 0;
        let mut down: u32 = 0;
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], rhs.x[w], rhs.z[w]);
            let (is_x1, is_y1, is_z1) = (x1 & !z1, x1 & z1, !x1 & z1);
            let (is_x2, is_y2, is_z2) = (x2 & !z2, x2 & z2, !x2 & z2);
            // XY = iZ, YZ = iX, ZX = iY and the reversed orders give -i.
            up += ((is_x1 & is_y2) | (is_y1 & is_z2) | (is_z1 & is_x2)).count_ones();
            down += ((is_y1 & is_x2) | (is_z1 & is_y2) | (is_x1 & is_z2)).count_ones();
            out.x[w] = x1 ^ x2;
            out.z[w] = z1 ^ z2;
        }
        let phase = self.phase as u32 + rhs.phase as u32 + up + 3 * down;
        out.phase = (phase % 4) as u8;
        Ok(out)
    }

    /// True when every letter of `self` equals the matching letter of
    /// `other` or is the identity, i.e. `self` can be read off a measurement
    /// of `other`. Phases are ignored.
    pub fn qubitwise_compatible(&self, other: &PauliString) -> bool {
        if self.n != other.n {
            return false;
        }
        self.x
            .iter()
            .zip(&self.z)
            .zip(other.x.iter().zip(&other.z))
            .all(|((&qx, &qz), (&rx, &rz))| {
                let active = qx | qz;
                (qx ^ rx) & active == 0 && (qz ^ rz) & active == 0
            })
    }

    /// Letterwise union of two strings that agree wherever both act.
    pub fn join(&self, other: &PauliString) -> Option<PauliString> {
        if self.n != other.n {
            return None;
        }
        let mut out = PauliString::identity(self.n);
        for w in 0..self.x.len() {
            let a = self.x[w] | self.z[w];
            let b = other.x[w] | other.z[w];
            let both = a & b;
            if (self.x[w] ^ other.x[w]) & both != 0 || (self.z[w] ^ other.z[w]) & both != 0 {
                return None;
            }
            out.x[w] = self.x[w] | other.x[w];
            out.z[w] = self.z[w] | other.z[w];
        }
        Some(out)
    }

    /// Dense `2^n × 2^n` matrix, qubit 0 most significant.
    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        self.to_matrix_limited(DEFAULT_ORACLE_QUBITS)
    }

    pub fn to_matrix_limited(&self, max_qubits: usize) -> Result<DMatrix<Complex64>> {
        if self.n > max_qubits || self.n > 30 {
            return Err(Error::SizeLimit {
                qubits: self.n,
                limit: max_qubits,
            });
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        let letters = self.letters();
        let global = i_pow(self.phase);
        for col in 0..dim {
            let mut row = col;
            let mut amp = global;
            for (q, l) in letters.iter().enumerate() {
                let bit = self.n - 1 - q;
                let b = (col >> bit) & 1;
                let mat = l.matrix();
                let flipped = match l {
                    Letter::I | Letter::Z => b,
                    Letter::X | Letter::Y => b ^ 1,
                };
                amp *= mat[flipped][b];
                row = (row & !(1 << bit)) | (flipped << bit);
            }
            m[(row, col)] = amp;
        }
        Ok(m)
    }
}

/// Fold of [`PauliString::multiply`] with a per-factor `i^k` prefactor.
///
/// `factors[j]` is multiplied by `i^{prefactors[j]}` before entering the
/// left-to-right product. An empty chain is the `n`-qubit identity.
pub fn product_chain(n: usize, factors: &[PauliString], prefactors: &[u8]) -> Result<PauliString> {
    if factors.len() != prefactors.len() {
        return Err(Error::InvalidArgument(format!(
            "{} factors but {} prefactors",
            factors.len(),
            prefactors.len()
        )));
    }
    let mut acc = PauliString::identity(n);
    for (f, &k) in factors.iter().zip(prefactors) {
        acc = acc.multiply(f)?.times_i_pow(k);
    }
    Ok(acc)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (phase, rest) = if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (1, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else {
            (0, s)
        };
        if rest.is_empty() {
            return Err(Error::Parse(format!("pauli string {s:?} has no letters")));
        }
        let letters = rest
            .chars()
            .map(|c| {
                Letter::from_char(c)
                    .ok_or_else(|| Error::Parse(format!("invalid pauli letter {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_letters(&letters, phase))
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
