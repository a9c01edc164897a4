//! Estimators and sampling-error bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::StaticTerm;
use crate::pauli::PauliString;

/// Default failure probability.
pub const DEFAULT_DELTA: f64 = 0.05;

/// `O = Σ_k α_k O^(k)` with distinct unsigned Pauli strings.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableDecomposition {
    components: Vec<(f64, PauliString)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableFile {
    pub terms: Vec<StaticTerm>,
}

impl ObservableDecomposition {
    /// Signs of the strings are folded into the coefficients and repeated
    /// strings are merged; zero coefficients are dropped.
    pub fn new(components: Vec<(f64, PauliString)>) -> Result<Self> {
        let n = components
            .first()
            .map(|(_, p)| p.num_qubits())
            .ok_or_else(|| Error::InvalidArgument("empty observable".into()))?;
        let mut merged: Vec<(f64, PauliString)> = Vec::new();
        for (a, p) in components {
            if !a.is_finite() {
                return Err(Error::InvalidArgument("non-finite coefficient".into()));
            }
            if p.num_qubits() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: p.num_qubits(),
                });
            }
            let sign = p.sign().ok_or_else(|| Error::NotHermitian(p.to_string()))?;
            let key = p.unsigned();
            match merged.iter_mut().find(|(_, q)| *q == key) {
                Some(entry) => entry.0 += sign * a,
                None => merged.push((sign * a, key)),
            }
        }
        merged.retain(|(a, _)| *a != 0.0);
        if merged.is_empty() {
            return Err(Error::InvalidArgument("observable is zero".into()));
        }
        Ok(ObservableDecomposition { components: merged })
    }

    pub fn single(p: PauliString) -> Result<Self> {
        Self::new(vec![(1.0, p)])
    }

    pub fn from_terms(terms: &[StaticTerm]) -> Result<Self> {
        Self::new(terms.iter().map(|t| (t.coeff, t.pauli.clone())).collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ObservableFile = serde_json::from_str(text)?;
        Self::from_terms(&file.terms)
    }

    pub fn components(&self) -> &[(f64, PauliString)] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn num_qubits(&self) -> usize {
        self.components[0].1.num_qubits()
    }

    /// Certified bound `‖O‖ ≤ Σ_k |α_k|`.
    pub fn norm_bound(&self) -> f64 {
        self.components.iter().map(|(a, _)| a.abs()).sum()
    }
}

/// Neumaier-compensated sum, evaluated in slice order.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `O_est = (C² / M) Σ_m o_m`
pub fn estimate(outcomes: &[f64], c: f64) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::InvalidArgument("no outcomes".into()));
    }
    Ok(c * c * compensated_sum(outcomes) / outcomes.len() as f64)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "delta {delta} outside (0, 1)"
        )));
    }
    Ok(())
}

/// `ε = ‖O‖ C² √(2 ln(2/δ) / M)`
pub fn hoeffding_eps(c: f64, norm_o: f64, m: u64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if m == 0 {
        return Err(Error::InvalidArgument("M must be positive".into()));
    }
    Ok(norm_o * c * c * (2.0 * (2.0 / delta).ln() / m as f64).sqrt())
}

/// Components measured together through the basis `R_g`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementGroup {
    /// Indices into the decomposition.
    pub members: Vec<usize>,
    pub basis: PauliString,
    pub shots: u64,
    /// `‖R_g‖_r`
    pub range: f64,
}

impl MeasurementGroup {
    /// `M / M_g`
    pub fn weight(&self, m: u64) -> f64 {
        m as f64 / self.shots as f64
    }
}

/// Largest-degree-first colouring of the incompatibility graph with shots
/// split ∝ the ℓ₁ norm of each group.
pub fn group_ldf(decomp: &ObservableDecomposition, m: u64) -> Result<Vec<MeasurementGroup>> {
    let comps = decomp.components();
    let k = comps.len();
    let conflicts: Vec<Vec<bool>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| a != b && comps[a].1.join(&comps[b].1).is_none())
                .collect()
        })
        .collect();
    let degree: Vec<usize> = conflicts
        .iter()
        .map(|row| row.iter().filter(|c| **c).count())
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    // Stable: ties keep decomposition order.
    order.sort_by(|a, b| degree[*b].cmp(&degree[*a]));

    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut bases: Vec<PauliString> = Vec::new();
    for v in order {
        let slot = (0..members.len()).find(|&g| {
            members[g].iter().all(|&u| !conflicts[u][v]) && bases[g].join(&comps[v].1).is_some()
        });
        match slot {
            Some(g) => {
                bases[g] = bases[g].join(&comps[v].1).expect("checked join");
                members[g].push(v);
            }
            None => {
                members.push(vec![v]);
                bases.push(comps[v].1.unsigned());
            }
        }
    }
    build_groups(decomp, members, bases, m)
}

/// One group per component.
pub fn singleton_groups(decomp: &ObservableDecomposition, m: u64) -> Result<Vec<MeasurementGroup>> {
    let members = (0..decomp.len()).map(|k| vec![k]).collect();
    let bases = decomp
        .components()
        .iter()
        .map(|(_, p)| p.unsigned())
        .collect();
    build_groups(decomp, members, bases, m)
}

fn build_groups(
    decomp: &ObservableDecomposition,
    mut members: Vec<Vec<usize>>,
    bases: Vec<PauliString>,
    m: u64,
) -> Result<Vec<MeasurementGroup>> {
    for g in &mut members {
        g.sort_unstable();
    }
    let weights: Vec<f64> = members
        .iter()
        .map(|g| g.iter().map(|&k| decomp.components()[k].0.abs()).sum())
        .collect();
    let shots = allocate_shots(&weights, m)?;
    members
        .into_iter()
        .zip(bases)
        .zip(shots)
        .map(|((members, basis), shots)| {
            let range = group_range(decomp, &members, m as f64 / shots as f64)?;
            Ok(MeasurementGroup {
                members,
                basis,
                shots,
                range,
            })
        })
        .collect()
}

/// Largest-remainder split of `m` shots ∝ `weights`, at least one each.
pub fn allocate_shots(weights: &[f64], m: u64) -> Result<Vec<u64>> {
    let g = weights.len() as u64;
    if g == 0 {
        return Err(Error::InvalidArgument("no groups".into()));
    }
    if m < g {
        return Err(Error::InvalidArgument(format!(
            "{m} shots cannot cover {g} groups"
        )));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::InvalidArgument("group weights vanish".into()));
    }
    let ideal: Vec<f64> = weights.iter().map(|w| m as f64 * w / total).collect();
    let mut shots: Vec<u64> = ideal.iter().map(|x| x.floor() as u64).collect();
    let mut rest = m - shots.iter().sum::<u64>().min(m);
    let mut order: Vec<usize> = (0..shots.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = ideal[a] - ideal[a].floor();
        let rb = ideal[b] - ideal[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if rest == 0 {
            break;
        }
        shots[i] += 1;
        rest -= 1;
    }
    // Empty groups borrow from the largest allocation.
    while let Some(i) = shots.iter().position(|&s| s == 0) {
        let donor = (0..shots.len())
            .max_by_key(|&j| (shots[j], usize::MAX - j))
            .unwrap();
        shots[donor] -= 1;
        shots[i] = 1;
    }
    Ok(shots)
}

/// Largest enumerable group support.
pub const MAX_RANGE_SUPPORT: usize = 20;

/// Spread of the per-shot group outcome
/// `z_anc · Σ_k α_k (M/M_g) Π_{j ∈ supp O^(k)} z_j` over all sign
/// assignments, including the ancilla sign `z_anc` of the Hadamard test.
pub fn group_range(
    decomp: &ObservableDecomposition,
    members: &[usize],
    weight: f64,
) -> Result<f64> {
    let mut support: Vec<usize> = members
        .iter()
        .flat_map(|&k| decomp.components()[k].1.support())
        .collect();
    support.sort_unstable();
    support.dedup();
    if support.len() > MAX_RANGE_SUPPORT {
        return Err(Error::InvalidArgument(format!(
            "group support {} exceeds {MAX_RANGE_SUPPORT}",
            support.len()
        )));
    }
    let masks: Vec<(f64, u32)> = members
        .iter()
        .map(|&k| {
            let (a, p) = &decomp.components()[k];
            let mut mask = 0u32;
            for q in p.support() {
                let pos = support.binary_search(&q).expect("member support");
                mask |= 1 << pos;
            }
            (a * weight, mask)
        })
        .collect();
    let mut peak = 0.0f64;
    for z in 0u32..(1u32 << support.len()) {
        let v: f64 = masks
            .iter()
            .map(|&(a, mask)| {
                if (z & mask).count_ones() % 2 == 1 {
                    -a
                } else {
                    a
                }
            })
            .sum();
        peak = peak.max(v.abs());
    }
    Ok(2.0 * peak)
}

/// `ε = (C² / M) √(½ ln(2/δ) Σ_g M_g ‖R_g‖²)`
pub fn grouped_hoeffding_eps(
    groups: &[MeasurementGroup],
    c: f64,
    m: u64,
    delta: f64,
) -> Result<f64> {
    check_delta(delta)?;
    let total: u64 = groups.iter().map(|g| g.shots).sum();
    if total != m || m == 0 {
        return Err(Error::InvalidArgument(format!(
            "group shots sum to {total}, expected {m}"
        )));
    }
    let s: f64 = groups
        .iter()
        .map(|g| g.shots as f64 * g.range * g.range)
        .sum();
    Ok(c * c / m as f64 * (0.5 * (2.0 / delta).ln() * s).sqrt())
}

/// Index of the group serving trial `i` when trials are laid out group
/// after group.
pub fn group_of_trial(groups: &[MeasurementGroup], i: u64) -> Option<usize> {
    let mut end = 0;
    for (g, grp) in groups.iter().enumerate() {
        end += grp.shots;
        if i < end {
            return Some(g);
        }
    }
    None
}

/// Total error `ε ≥ |ε_alg|` of a biased estimator: the smallest `ε` with
/// `exp(−M(ε−ε_alg)²/2‖O‖²) + exp(−M(ε+ε_alg)²/2‖O‖²) ≤ δ`.
pub fn qdrift_total_error(m: u64, delta: f64, eps_alg: f64, norm_o: f64) -> Result<f64> {
    check_delta(delta)?;
    if m == 0 || !(norm_o > 0.0) || !eps_alg.is_finite() {
        return Err(Error::InvalidArgument("invalid total-error inputs".into()));
    }
    let a = eps_alg.abs();
    let k = m as f64 / (2.0 * norm_o * norm_o);
    let f = |e: f64| (-k * (e - a).powi(2)).exp() + (-k * (e + a).powi(2)).exp();
    let mut lo = a;
    let mut hi = a + norm_o * (2.0 * (2.0 / delta).ln() / m as f64).sqrt();
    if f(hi) > delta {
        return Err(Error::Numerical("total-error bracket does not hold".into()));
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= delta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// One estimate with its error bar.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub o_est: f64,
    pub m: u64,
    pub delta: f64,
    pub c: f64,
    pub eps: f64,
    pub groups: usize,
}
