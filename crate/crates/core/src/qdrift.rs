//! Continuous qDRIFT baseline: one fixed-angle rotation per segment.
//!
//! Each segment draws `t ∝ h_tot(t)`, then an input term `q ∝ |c_q(t)|`, and
//! applies `exp(−iλ sgn(c_q(t)) σ_q)`. The output state carries an
//! algorithmic error of order `Λ² / N_seg`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::compiler::{parse_call, split_segment_line, SampledUnitary, UnitaryKind};
use crate::error::{Error, Result};
use crate::hamiltonian::TimeDependentHamiltonian;
use crate::pauli::PauliString;
use crate::sampling::{sample_categorical, sample_segment_time, SegmentPlan};

#[derive(Debug, Clone, PartialEq)]
pub struct QdriftSample {
    /// Zero-based segment index.
    pub segment: usize,
    /// Unsigned input Pauli.
    pub sigma: PauliString,
    pub sign: f64,
    /// Segment strength `λ`.
    pub angle: f64,
}

impl QdriftSample {
    /// `sign · σ`
    pub fn signed_pauli(&self) -> PauliString {
        if self.sign < 0.0 {
            self.sigma.clone().negated()
        } else {
            self.sigma.clone()
        }
    }

    /// The emitted unitary `exp(−iλ·sign·σ)` as a rotation.
    pub fn to_unitary(&self) -> SampledUnitary {
        SampledUnitary {
            segment: self.segment,
            kind: UnitaryKind::Rotation {
                sigma: self.signed_pauli(),
                phi: self.angle,
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct QdriftCompiler<'a> {
    h: &'a TimeDependentHamiltonian,
    plan: &'a SegmentPlan,
}

impl<'a> QdriftCompiler<'a> {
    pub fn new(h: &'a TimeDependentHamiltonian, plan: &'a SegmentPlan) -> Self {
        QdriftCompiler { h, plan }
    }

    pub fn plan(&self) -> &SegmentPlan {
        self.plan
    }

    pub fn sample_segment<R: Rng + ?Sized>(&self, j: usize, rng: &mut R) -> Result<QdriftSample> {
        let lambda = self.plan.lambda(j);
        if lambda <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "segment {} has no strength",
                j + 1
            )));
        }
        let mut weights = vec![0.0; self.h.terms().len()];
        loop {
            let t = sample_segment_time(self.h, self.plan, j, rng)?;
            for (w, term) in weights.iter_mut().zip(self.h.terms()) {
                *w = term.coeff.evaluate(t).abs();
            }
            if weights.iter().all(|w| *w == 0.0) {
                continue;
            }
            let q = sample_categorical(&weights, rng)?;
            let c = self.h.terms()[q].coeff.evaluate(t);
            return Ok(QdriftSample {
                segment: j,
                sigma: self.h.terms()[q].pauli.clone(),
                sign: if c < 0.0 { -1.0 } else { 1.0 },
                angle: lambda,
            });
        }
    }

    /// One sample per segment in time order.
    pub fn compile<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<QdriftSample>> {
        (0..self.plan.n_seg())
            .map(|j| self.sample_segment(j, rng))
            .collect()
    }
}

impl fmt::Display for QdriftSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "seg {} | QD rot({}, phi={:?})",
            self.segment + 1,
            self.signed_pauli(),
            self.angle
        )
    }
}

impl FromStr for QdriftSample {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let (segment, tag, body) = split_segment_line(line)?;
        if tag != "QD" {
            return Err(Error::Parse(format!("expected a QD line, got {line:?}")));
        }
        let (pauli, phi) = parse_call(body, "rot", "phi")?;
        let sign = pauli
            .sign()
            .ok_or_else(|| Error::NotHermitian(pauli.to_string()))?;
        let angle: f64 = phi
            .parse()
            .map_err(|_| Error::Parse(format!("invalid angle {phi:?}")))?;
        if !angle.is_finite() {
            return Err(Error::Parse(format!("non-finite angle {phi:?}")));
        }
        Ok(QdriftSample {
            segment,
            sigma: pauli.unsigned(),
            sign,
            angle,
        })
    }
}

/// Text dump, one line per segment.
pub fn dump(samples: &[QdriftSample]) -> String {
    samples.iter().map(|s| format!("{s}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::HamiltonianTerm;
    use crate::waveform::Waveform;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn constant_positive_term() {
        let h = TimeDependentHamiltonian::new(
            1,
            vec![HamiltonianTerm::new("X".parse().unwrap(), Waveform::constant(0.7)).unwrap()],
            1.0,
        )
        .unwrap();
        let plan = SegmentPlan::with_segments(&h, 3).unwrap();
        let qd = QdriftCompiler::new(&h, &plan);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = qd.compile(&mut rng).unwrap();
        assert_eq!(out.len(), 3);
        for (j, s) in out.iter().enumerate() {
            assert_eq!(s.segment, j);
            assert_eq!(s.sign, 1.0);
            assert!((s.angle - 0.7 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn negative_lobe_gives_negative_sign() {
        // cos(t) on [π/2, π] is negative; the window [0, π] is split in two.
        let h = TimeDependentHamiltonian::new(
            1,
            vec![HamiltonianTerm::new("Z".parse().unwrap(), Waveform::cosine(1.0, 1.0)).unwrap()],
            PI,
        )
        .unwrap();
        let plan = SegmentPlan::with_segments(&h, 2).unwrap();
        // h_tot vanishes at π/2, so the boundary is pinned only to ~√tol.
        assert!((plan.boundaries()[1] - PI / 2.0).abs() < 1e-5);
        let qd = QdriftCompiler::new(&h, &plan);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            assert_eq!(qd.sample_segment(0, &mut rng).unwrap().sign, 1.0);
            assert_eq!(qd.sample_segment(1, &mut rng).unwrap().sign, -1.0);
        }
    }

    #[test]
    fn dump_round_trip() {
        let h = crate::models::spin_chain(3, 0.1, 1.0, PI).unwrap();
        let plan = SegmentPlan::with_segments(&h, 16).unwrap();
        let qd = QdriftCompiler::new(&h, &plan);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let out = qd.compile(&mut rng).unwrap();
        let text = dump(&out);
        let back: Vec<QdriftSample> = text.lines().map(|l| l.parse().unwrap()).collect();
        assert_eq!(back, out);
        assert!(text.starts_with("seg 1 | QD rot("));
        assert!("seg 1 | QD rot(iX, phi=0.1)"
            .parse::<QdriftSample>()
            .is_err());
    }
}
