//! Time-dependent Pauli Hamiltonians `H(t) = Σ_q c_q(t) σ_q`.
//!
//! Input terms carry signed waveforms. On construction each term is split
//! into canonical halves `(+σ_q, max(c_q, 0))` and `(−σ_q, max(−c_q, 0))`
//! so every canonical strength `h_p(t)` is non-negative and the sign lives in
//! the Pauli string. Halves that vanish on the whole window are dropped.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::waveform::Waveform;

/// One signed input term. `pauli` always has phase `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerm {
    pub pauli: PauliString,
    pub coeff: Waveform,
}

impl HamiltonianTerm {
    /// Accepts `±σ`; a minus sign is folded into the waveform.
    pub fn new(pauli: PauliString, coeff: Waveform) -> Result<Self> {
        coeff.validate()?;
        match pauli.phase_exp() {
            0 => Ok(HamiltonianTerm { pauli, coeff }),
            2 => Ok(HamiltonianTerm {
                pauli: pauli.unsigned(),
                coeff: scaled(&coeff, -1.0),
            }),
            _ => Err(Error::NotHermitian(pauli.to_string())),
        }
    }
}

fn scaled(w: &Waveform, k: f64) -> Waveform {
    match w.clone() {
        Waveform::Constant { amplitude } => Waveform::Constant {
            amplitude: k * amplitude,
        },
        Waveform::Cosine {
            amplitude,
            frequency,
        } => Waveform::Cosine {
            amplitude: k * amplitude,
            frequency,
        },
        Waveform::Sine {
            amplitude,
            frequency,
        } => Waveform::Sine {
            amplitude: k * amplitude,
            frequency,
        },
        Waveform::LinearRamp {
            start,
            end,
            t_start,
            t_end,
        } => Waveform::LinearRamp {
            start: k * start,
            end: k * end,
            t_start,
            t_end,
        },
        Waveform::Product { ramp, base } => Waveform::Product {
            ramp,
            base: Box::new(scaled(&base, k)),
        },
    }
}

/// Non-negative half of an input term.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalTerm {
    /// `±σ_q`
    pub pauli: PauliString,
    /// Index of the input term.
    pub source: usize,
    /// `+1` for `max(c, 0)`, `-1` for `max(-c, 0)`.
    pub sign: f64,
}

#[derive(Debug, Clone)]
pub struct TimeDependentHamiltonian {
    n: usize,
    duration: f64,
    terms: Vec<HamiltonianTerm>,
    canonical: Vec<CanonicalTerm>,
}

const WINDOW_SLACK: f64 = 1e-12;

impl TimeDependentHamiltonian {
    /// Hamiltonian on the evolution window `[0, duration]`.
    pub fn new(n: usize, terms: Vec<HamiltonianTerm>, duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "evolution time must be positive, got {duration}"
            )));
        }
        if n == 0 || terms.is_empty() {
            return Err(Error::InvalidArgument("empty Hamiltonian".into()));
        }
        let mut canonical = Vec::new();
        for (i, term) in terms.iter().enumerate() {
            if term.pauli.num_qubits() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: term.pauli.num_qubits(),
                });
            }
            term.coeff.validate()?;
            if term.coeff.integrate_positive(0.0, duration) > 0.0 {
                canonical.push(CanonicalTerm {
                    pauli: term.pauli.clone(),
                    source: i,
                    sign: 1.0,
                });
            }
            if term.coeff.integrate_negative(0.0, duration) > 0.0 {
                canonical.push(CanonicalTerm {
                    pauli: term.pauli.clone().negated(),
                    source: i,
                    sign: -1.0,
                });
            }
        }
        Ok(TimeDependentHamiltonian {
            n,
            duration,
            terms,
            canonical,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    pub fn canonical_terms(&self) -> &[CanonicalTerm] {
        &self.canonical
    }

    /// Number of canonical terms `P`.
    pub fn canonical_len(&self) -> usize {
        self.canonical.len()
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        let slack = WINDOW_SLACK * self.duration.max(1.0);
        if t.is_nan() || t < -slack || t > self.duration + slack {
            return Err(Error::OutsideWindow {
                t,
                start: 0.0,
                end: self.duration,
            });
        }
        Ok(())
    }

    /// Canonical strength `h_p(t) ≥ 0`.
    pub fn strength(&self, p: usize, t: f64) -> f64 {
        let c = &self.canonical[p];
        (c.sign * self.terms[c.source].coeff.evaluate(t)).max(0.0)
    }

    /// `h_tot(t) = Σ_p h_p(t)` without the window check.
    pub fn total_strength_unchecked(&self, t: f64) -> f64 {
        (0..self.canonical.len()).map(|p| self.strength(p, t)).sum()
    }

    pub fn h_tot(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.total_strength_unchecked(t))
    }

    /// Per-canonical-term integrals `λ_p = ∫_a^b h_p`.
    pub fn lambda_p(&self, a: f64, b: f64) -> Vec<f64> {
        self.canonical
            .iter()
            .map(|c| {
                let w = &self.terms[c.source].coeff;
                if c.sign > 0.0 {
                    w.integrate_positive(a, b)
                } else {
                    w.integrate_negative(a, b)
                }
            })
            .collect()
    }

    /// `∫_a^b h_tot(t) dt`
    pub fn integrated_strength(&self, a: f64, b: f64) -> f64 {
        self.lambda_p(a, b).iter().sum()
    }

    /// `Λ` over the whole window.
    pub fn total_lambda(&self) -> f64 {
        self.integrated_strength(0.0, self.duration)
    }

    /// Upper bound on `h_tot` over `[a, b]`.
    pub fn strength_bound(&self, a: f64, b: f64) -> f64 {
        let mut seen = vec![false; self.terms.len()];
        for c in &self.canonical {
            seen[c.source] = true;
        }
        self.terms
            .iter()
            .zip(seen)
            .filter(|(_, s)| *s)
            .map(|(t, _)| t.coeff.upper_bound(a, b))
            .sum()
    }

    /// Dense-matrix form is built by the oracle; this gives the signed
    /// coefficient of every input term at `t`.
    pub fn coefficients_at(&self, t: f64) -> Vec<f64> {
        self.terms
            .iter()
            .map(|term| term.coeff.evaluate(t))
            .collect()
    }
}

/// Static term in an adiabatic schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticTerm {
    pub pauli: PauliString,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Schedule {
    /// `H(t) = (1 − t/τ) H_A + (t/τ) H_B`
    Adiabatic {
        tau: f64,
        initial_terms: Vec<StaticTerm>,
        final_terms: Vec<StaticTerm>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub pauli: PauliString,
    pub coeff: Waveform,
}

/// JSON Hamiltonian document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianFile {
    pub n: usize,
    #[serde(default)]
    pub terms: Vec<TermSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Schedule>,
}

impl HamiltonianFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: HamiltonianFile = serde_json::from_str(text)?;
        file.check()?;
        Ok(file)
    }

    fn check(&self) -> Result<()> {
        if self.n == 0 || self.n > 64 {
            return Err(Error::InvalidArgument(format!(
                "qubit count {} outside 1..=64",
                self.n
            )));
        }
        let mut paulis: Vec<&PauliString> = self.terms.iter().map(|t| &t.pauli).collect();
        if let Some(Schedule::Adiabatic {
            tau,
            initial_terms,
            final_terms,
        }) = &self.schedule
        {
            if !(tau.is_finite() && *tau > 0.0) {
                return Err(Error::InvalidArgument(format!("schedule tau {tau}")));
            }
            for t in initial_terms.iter().chain(final_terms) {
                if !t.coeff.is_finite() {
                    return Err(Error::InvalidArgument("non-finite coefficient".into()));
                }
                paulis.push(&t.pauli);
            }
        }
        for p in paulis {
            if p.num_qubits() != self.n {
                return Err(Error::DimensionMismatch {
                    left: self.n,
                    right: p.num_qubits(),
                });
            }
            if !p.is_hermitian() {
                return Err(Error::NotHermitian(p.to_string()));
            }
        }
        for t in &self.terms {
            t.coeff.validate()?;
        }
        Ok(())
    }

    /// Evolution time fixed by the schedule, if any.
    pub fn schedule_tau(&self) -> Option<f64> {
        self.schedule
            .as_ref()
            .map(|Schedule::Adiabatic { tau, .. }| *tau)
    }

    /// Builds the Hamiltonian. Schedule terms become linear ramps; a Pauli
    /// present in both endpoints becomes one ramp from `a` to `b`.
    pub fn build(&self, duration: Option<f64>) -> Result<TimeDependentHamiltonian> {
        self.check()?;
        let duration = self
            .schedule_tau()
            .or(duration)
            .ok_or_else(|| Error::InvalidArgument("evolution time not specified".into()))?;
        let mut terms = Vec::new();
        for t in &self.terms {
            terms.push(HamiltonianTerm::new(t.pauli.clone(), t.coeff.clone())?);
        }
        if let Some(Schedule::Adiabatic {
            tau,
            initial_terms,
            final_terms,
        }) = &self.schedule
        {
            for (pauli, (a, b)) in merge_endpoints(initial_terms, final_terms) {
                terms.push(HamiltonianTerm::new(
                    pauli,
                    Waveform::linear_ramp(a, b, 0.0, *tau),
                )?);
            }
        }
        TimeDependentHamiltonian::new(self.n, terms, duration)
    }

    /// Final-endpoint Hamiltonian `H_B` as a list of static terms.
    pub fn final_terms(&self) -> Option<&[StaticTerm]> {
        self.schedule
            .as_ref()
            .map(|Schedule::Adiabatic { final_terms, .. }| final_terms.as_slice())
    }

    pub fn initial_terms(&self) -> Option<&[StaticTerm]> {
        self.schedule
            .as_ref()
            .map(|Schedule::Adiabatic { initial_terms, .. }| initial_terms.as_slice())
    }
}

/// Sums duplicate Paulis on each side; returns `(σ, (coeff_A, coeff_B))`
/// ordered by the Pauli text.
fn merge_endpoints(initial: &[StaticTerm], fin: &[StaticTerm]) -> Vec<(PauliString, (f64, f64))> {
    let mut map: BTreeMap<String, (PauliString, f64, f64)> = BTreeMap::new();
    let mut add = |t: &StaticTerm, is_final: bool| {
        let sign = t.pauli.sign().unwrap_or(1.0);
        let key = t.pauli.unsigned();
        let entry = map
            .entry(key.to_string())
            .or_insert_with(|| (key, 0.0, 0.0));
        if is_final {
            entry.2 += sign * t.coeff;
        } else {
            entry.1 += sign * t.coeff;
        }
    };
    for t in initial {
        add(t, false);
    }
    for t in fin {
        add(t, true);
    }
    map.into_values()
        .filter(|(_, a, b)| *a != 0.0 || *b != 0.0)
        .map(|(p, a, b)| (p, (a, b)))
        .collect()
}
