//! Unbiased random compilation of `U(0, τ)`.
//!
//! Per segment with integrated strength `λ = Σ_p λ_p` the truncated Dyson
//! series is split into the leading part `𝕀 − iΣ_p λ_p σ_p`, rewritten as
//! `Σ_p α_p exp(−iφσ_p)` with `φ = arctan λ`, and the order `l ≥ 2` terms.
//! A segment unitary is drawn from the leading rotations with probability
//! `C_L / (C_L + C_R)` and from the higher orders otherwise.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::hamiltonian::TimeDependentHamiltonian;
use crate::pauli::{product_chain, PauliString};
use crate::sampling::{
    poisson_tail_mass, sample_categorical, sample_order_at_least_two, sample_segment_time,
    sample_term_at_time, SegmentPlan,
};

/// Normalization data of one segment.
#[derive(Debug, Clone, PartialEq)]
pub struct LcuDescriptor {
    pub lambda: f64,
    pub phi: f64,
    /// `√(1 + λ²)`
    pub c_l: f64,
    /// `e^λ − 1 − λ`
    pub c_r: f64,
    /// `C_L + C_R`
    pub c_lor: f64,
    /// `α_p = λ_p / sin φ`
    pub alpha: Vec<f64>,
}

impl LcuDescriptor {
    pub fn new(lambda_p: &[f64]) -> Result<Self> {
        if lambda_p.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::InvalidArgument(
                "per-term strengths must be finite and non-negative".into(),
            ));
        }
        let lambda: f64 = lambda_p.iter().sum();
        let phi = lambda.atan();
        let c_l = lambda.hypot(1.0);
        let c_r = poisson_tail_mass(lambda);
        let alpha = if lambda > 0.0 {
            let s = phi.sin();
            lambda_p.iter().map(|l| l / s).collect()
        } else {
            vec![0.0; lambda_p.len()]
        };
        Ok(LcuDescriptor {
            lambda,
            phi,
            c_l,
            c_r,
            c_lor: c_l + c_r,
            alpha,
        })
    }

    pub fn for_segment(plan: &SegmentPlan, j: usize) -> Result<Self> {
        Self::new(plan.lambda_p(j))
    }

    /// Probability of the leading-order branch.
    pub fn prob_leading(&self) -> f64 {
        self.c_l / self.c_lor
    }
}

/// One sampled segment operator.
#[derive(Debug, Clone, PartialEq)]
pub enum UnitaryKind {
    /// `exp(−iφσ)` with signed `σ`.
    Rotation {
        sigma: PauliString,
        phi: f64,
    },
    /// `(−i)^l σ_{p_1} ⋯ σ_{p_l}` with exact phase.
    PauliProduct {
        op: PauliString,
        order: u64,
    },
    Identity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledUnitary {
    /// Zero-based segment index.
    pub segment: usize,
    pub kind: UnitaryKind,
}

/// Two independently sampled realizations of the evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledCircuitPair {
    pub branch_s: Vec<SampledUnitary>,
    pub branch_s_prime: Vec<SampledUnitary>,
    /// `Π_j C_lor(λ_j)`
    pub c: f64,
}

/// Compiler state shared by all trials of one run.
#[derive(Debug, Clone)]
pub struct UrccCompiler<'a> {
    h: &'a TimeDependentHamiltonian,
    plan: &'a SegmentPlan,
    descriptors: Vec<LcuDescriptor>,
    c: f64,
}

impl<'a> UrccCompiler<'a> {
    pub fn new(h: &'a TimeDependentHamiltonian, plan: &'a SegmentPlan) -> Result<Self> {
        let descriptors = (0..plan.n_seg())
            .map(|j| LcuDescriptor::for_segment(plan, j))
            .collect::<Result<Vec<_>>>()?;
        let c = descriptors.iter().map(|d| d.c_lor).product();
        Ok(UrccCompiler {
            h,
            plan,
            descriptors,
            c,
        })
    }

    pub fn descriptors(&self) -> &[LcuDescriptor] {
        &self.descriptors
    }

    /// Overall normalization `C`.
    pub fn normalization(&self) -> f64 {
        self.c
    }

    pub fn plan(&self) -> &SegmentPlan {
        self.plan
    }

    pub fn hamiltonian(&self) -> &TimeDependentHamiltonian {
        self.h
    }

    /// Canonical term indices of an order-`l` Dyson draw: `l` times drawn ∝
    /// `h_tot` and sorted latest first, each index drawn ∝ `h_p(t)`.
    pub fn sample_pdy_indices<R: Rng + ?Sized>(
        &self,
        l: u64,
        j: usize,
        rng: &mut R,
    ) -> Result<Vec<usize>> {
        let mut times = Vec::with_capacity(l as usize);
        for _ in 0..l {
            times.push(sample_segment_time(self.h, self.plan, j, rng)?);
        }
        times.sort_by(|a, b| b.total_cmp(a));
        let mut indices = Vec::with_capacity(times.len());
        for t in times {
            let p = loop {
                match sample_term_at_time(self.h, t, rng) {
                    Ok(p) => break p,
                    Err(Error::ZeroStrength(_)) => {}
                    Err(e) => return Err(e),
                }
            };
            indices.push(p);
        }
        Ok(indices)
    }

    /// Order-`l` Pauli product `(−i)^l σ_{p_l} ⋯ σ_{p_1}`, latest time leftmost.
    pub fn sample_pdy<R: Rng + ?Sized>(
        &self,
        l: u64,
        j: usize,
        rng: &mut R,
    ) -> Result<PauliString> {
        let factors: Vec<PauliString> = self
            .sample_pdy_indices(l, j, rng)?
            .into_iter()
            .map(|p| self.h.canonical_terms()[p].pauli.clone())
            .collect();
        product_chain(self.h.num_qubits(), &factors, &vec![3; factors.len()])
    }

    pub fn sample_segment_unitary<R: Rng + ?Sized>(
        &self,
        j: usize,
        rng: &mut R,
    ) -> Result<SampledUnitary> {
        let d = &self.descriptors[j];
        let kind = if d.lambda == 0.0 {
            UnitaryKind::Identity
        } else if rng.random::<f64>() < d.prob_leading() {
            let p = sample_categorical(&d.alpha, rng)?;
            UnitaryKind::Rotation {
                sigma: self.h.canonical_terms()[p].pauli.clone(),
                phi: d.phi,
            }
        } else {
            let l = sample_order_at_least_two(d.lambda, rng)?;
            UnitaryKind::PauliProduct {
                op: self.sample_pdy(l, j, rng)?,
                order: l,
            }
        };
        Ok(SampledUnitary { segment: j, kind })
    }

    /// One realization `u(s_N) ⋯ u(s_1)`, stored in time order.
    pub fn sample_branch<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<SampledUnitary>> {
        (0..self.plan.n_seg())
            .map(|j| self.sample_segment_unitary(j, rng))
            .collect()
    }

    pub fn compile_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<CompiledCircuitPair> {
        let branch_s = self.sample_branch(rng)?;
        let branch_s_prime = self.sample_branch(rng)?;
        Ok(CompiledCircuitPair {
            branch_s,
            branch_s_prime,
            c: self.c,
        })
    }
}

impl fmt::Display for SampledUnitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "seg {} | ", self.segment + 1)?;
        match &self.kind {
            UnitaryKind::Rotation { sigma, phi } => write!(f, "L rot({sigma}, phi={phi:?})"),
            UnitaryKind::PauliProduct { op, order } => write!(f, "R prod({op}, l={order})"),
            UnitaryKind::Identity => write!(f, "I id"),
        }
    }
}

fn parse_float(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid number {s:?}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("non-finite number {s:?}")));
    }
    Ok(v)
}

/// Splits `"seg <j> | <TAG> <body>"` into `(j - 1, TAG, body)`.
pub(crate) fn split_segment_line(line: &str) -> Result<(usize, &str, &str)> {
    let bad = || Error::Parse(format!("malformed segment line {line:?}"));
    let rest = line.strip_prefix("seg ").ok_or_else(bad)?;
    let (idx, rest) = rest.split_once(" | ").ok_or_else(bad)?;
    let j: usize = idx.trim().parse().map_err(|_| bad())?;
    if j == 0 {
        return Err(bad());
    }
    let (tag, body) = rest.split_once(' ').ok_or_else(bad)?;
    Ok((j - 1, tag, body))
}

/// Parses `"<name>(<pauli>, <key>=<value>)"`.
pub(crate) fn parse_call<'s>(
    body: &'s str,
    name: &str,
    key: &str,
) -> Result<(PauliString, &'s str)> {
    let bad = || Error::Parse(format!("malformed operator {body:?}"));
    let inner = body
        .strip_prefix(name)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(bad)?;
    let (pauli, arg) = inner.split_once(", ").ok_or_else(bad)?;
    let value = arg
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(bad)?;
    Ok((pauli.parse()?, value))
}

impl FromStr for SampledUnitary {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let (segment, tag, body) = split_segment_line(line)?;
        let kind = match tag {
            "L" => {
                let (sigma, phi) = parse_call(body, "rot", "phi")?;
                UnitaryKind::Rotation {
                    sigma,
                    phi: parse_float(phi)?,
                }
            }
            "R" => {
                let (op, l) = parse_call(body, "prod", "l")?;
                let order = l
                    .parse()
                    .map_err(|_| Error::Parse(format!("invalid order {l:?}")))?;
                UnitaryKind::PauliProduct { op, order }
            }
            "I" if body == "id" => UnitaryKind::Identity,
            _ => return Err(Error::Parse(format!("unknown segment tag in {line:?}"))),
        };
        Ok(SampledUnitary { segment, kind })
    }
}

impl CompiledCircuitPair {
    pub fn n_seg(&self) -> usize {
        self.branch_s.len()
    }

    /// Line-oriented text dump.
    pub fn dump(&self) -> String {
        let mut out = format!("C {:?}\n# branch s\n", self.c);
        for u in &self.branch_s {
            out.push_str(&format!("{u}\n"));
        }
        out.push_str("# branch s'\n");
        for u in &self.branch_s_prime {
            out.push_str(&format!("{u}\n"));
        }
        out
    }

    /// Inverse of [`CompiledCircuitPair::dump`].
    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim_end).filter(|l| !l.is_empty());
        let c = lines
            .next()
            .and_then(|l| l.strip_prefix("C "))
            .ok_or_else(|| Error::Parse("pair dump must start with a C line".into()))?;
        let c = parse_float(c)?;
        if lines.next() != Some("# branch s") {
            return Err(Error::Parse("missing '# branch s' header".into()));
        }
        let mut branch_s = Vec::new();
        let mut branch_s_prime = Vec::new();
        let mut second = false;
        for line in lines {
            if line == "# branch s'" && !second {
                second = true;
                continue;
            }
            let u: SampledUnitary = line.parse()?;
            if second {
                branch_s_prime.push(u);
            } else {
                branch_s.push(u);
            }
        }
        if !second {
            return Err(Error::Parse("missing '# branch s'' header".into()));
        }
        let pair = CompiledCircuitPair {
            branch_s,
            branch_s_prime,
            c,
        };
        pair.validate()?;
        Ok(pair)
    }

    /// Both branches list segments `1..=N` in order on a common register.
    pub fn validate(&self) -> Result<()> {
        if self.branch_s.len() != self.branch_s_prime.len() {
            return Err(Error::Parse(format!(
                "branches have {} and {} segments",
                self.branch_s.len(),
                self.branch_s_prime.len()
            )));
        }
        let mut width = None;
        for branch in [&self.branch_s, &self.branch_s_prime] {
            for (j, u) in branch.iter().enumerate() {
                if u.segment != j {
                    return Err(Error::Parse(format!(
                        "segment {} listed at position {}",
                        u.segment + 1,
                        j + 1
                    )));
                }
                let p = match &u.kind {
                    UnitaryKind::Rotation { sigma, .. } => {
                        if !sigma.is_hermitian() {
                            return Err(Error::NotHermitian(sigma.to_string()));
                        }
                        Some(sigma)
                    }
                    UnitaryKind::PauliProduct { op, .. } => Some(op),
                    UnitaryKind::Identity => None,
                };
                if let Some(p) = p {
                    let n = p.num_qubits();
                    if *width.get_or_insert(n) != n {
                        return Err(Error::DimensionMismatch {
                            left: width.unwrap(),
                            right: n,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}
