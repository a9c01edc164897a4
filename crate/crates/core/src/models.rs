//! Builtin model Hamiltonians.

use crate::error::{Error, Result};
use crate::hamiltonian::{
    HamiltonianFile, HamiltonianTerm, Schedule, StaticTerm, TimeDependentHamiltonian,
};
use crate::pauli::{Letter, PauliString};
use crate::waveform::Waveform;

/// Interaction-picture Heisenberg-type chain
/// `H(t) = (J/2)(cos(2ωt) G₁ + sin(2ωt) G₂)` with
/// `G₁ = Σ_k X_k X_{k+1} + Y_k Y_{k+1}` and
/// `G₂ = Σ_k (−1)^k (X_k Y_{k+1} − Y_k X_{k+1})`, `k` counted from 1.
pub fn spin_chain(n: usize, j: f64, omega: f64, tau: f64) -> Result<TimeDependentHamiltonian> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "spin chain needs at least 2 sites, got {n}"
        )));
    }
    if !(j.is_finite() && omega.is_finite()) {
        return Err(Error::InvalidArgument("non-finite J or omega".into()));
    }
    let half = 0.5 * j;
    let pair = |q: usize, a: Letter, b: Letter| {
        let mut p = PauliString::identity(n);
        p.set(q, a);
        p.set(q + 1, b);
        p
    };
    let mut terms = Vec::new();
    for q in 0..n - 1 {
        let cos = Waveform::cosine(half, 2.0 * omega);
        terms.push(HamiltonianTerm::new(
            pair(q, Letter::X, Letter::X),
            cos.clone(),
        )?);
        terms.push(HamiltonianTerm::new(pair(q, Letter::Y, Letter::Y), cos)?);
        // k = q + 1
        let s = if (q + 1) % 2 == 0 { half } else { -half };
        terms.push(HamiltonianTerm::new(
            pair(q, Letter::X, Letter::Y),
            Waveform::sine(s, 2.0 * omega),
        )?);
        terms.push(HamiltonianTerm::new(
            pair(q, Letter::Y, Letter::X),
            Waveform::sine(-s, 2.0 * omega),
        )?);
    }
    TimeDependentHamiltonian::new(n, terms, tau)
}

/// Two-qubit adiabatic toy: `H_A = −X₁ − X₂` to `H_B = −Z₁Z₂ − 0.5 Z₁`.
pub fn adiabatic_toy(tau: f64) -> HamiltonianFile {
    let t = |p: &str, c: f64| StaticTerm {
        pauli: p.parse().expect("builtin pauli"),
        coeff: c,
    };
    HamiltonianFile {
        n: 2,
        terms: Vec::new(),
        schedule: Some(Schedule::Adiabatic {
            tau,
            initial_terms: vec![t("XI", -1.0), t("IX", -1.0)],
            final_terms: vec![t("ZZ", -1.0), t("ZI", -0.5)],
        }),
    }
}

pub const ADIABATIC_TOY_TAU: f64 = 50.0;
