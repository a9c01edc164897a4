//! Segment planning and the exact samplers shared by both compilers.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::hamiltonian::TimeDependentHamiltonian;

/// Relative tolerance of the per-segment strength equalization.
pub const SEGMENT_TOL: f64 = 1e-10;

/// Partition of `[0, τ]` into segments of equal integrated strength.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPlan {
    boundaries: Vec<f64>,
    lambda: Vec<f64>,
    lambda_p: Vec<Vec<f64>>,
    bounds: Vec<f64>,
    total: f64,
}

impl SegmentPlan {
    /// `N_seg = ceil(Λ / λ_target)` segments.
    pub fn plan(h: &TimeDependentHamiltonian, lambda_target: f64) -> Result<Self> {
        if !(lambda_target.is_finite() && lambda_target > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lambda target must be positive, got {lambda_target}"
            )));
        }
        let total = h.total_lambda();
        if !total.is_finite() {
            return Err(Error::Numerical(format!("total strength {total}")));
        }
        // Guard against Λ/λ landing a rounding error above an integer.
        let ratio = total / lambda_target;
        let n = ((ratio * (1.0 - 1e-12)).ceil() as usize).max(1);
        Self::with_segments(h, n)
    }

    /// Fixed segment count, boundaries solved so every segment carries `Λ / n`.
    pub fn with_segments(h: &TimeDependentHamiltonian, n_seg: usize) -> Result<Self> {
        if n_seg == 0 {
            return Err(Error::InvalidArgument(
                "segment count must be positive".into(),
            ));
        }
        let tau = h.duration();
        let total = h.total_lambda();
        if !total.is_finite() {
            return Err(Error::Numerical(format!("total strength {total}")));
        }
        if total == 0.0 {
            return Ok(SegmentPlan {
                boundaries: vec![0.0, tau],
                lambda: vec![0.0],
                lambda_p: vec![vec![0.0; h.canonical_len()]],
                bounds: vec![0.0],
                total,
            });
        }
        let target = total / n_seg as f64;
        let mut boundaries = Vec::with_capacity(n_seg + 1);
        boundaries.push(0.0);
        for _ in 1..n_seg {
            let a = *boundaries.last().unwrap();
            boundaries.push(solve_boundary(h, a, tau, target)?);
        }
        boundaries.push(tau);

        let mut lambda = Vec::with_capacity(n_seg);
        let mut lambda_p = Vec::with_capacity(n_seg);
        let mut bounds = Vec::with_capacity(n_seg);
        for w in boundaries.windows(2) {
            let lp = h.lambda_p(w[0], w[1]);
            let l: f64 = lp.iter().sum();
            if (l - target).abs() > SEGMENT_TOL * target {
                return Err(Error::Numerical(format!(
                    "segment [{}, {}] carries {l}, expected {target}",
                    w[0], w[1]
                )));
            }
            lambda.push(l);
            lambda_p.push(lp);
            bounds.push(h.strength_bound(w[0], w[1]));
        }
        Ok(SegmentPlan {
            boundaries,
            lambda,
            lambda_p,
            bounds,
            total,
        })
    }

    pub fn n_seg(&self) -> usize {
        self.lambda.len()
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// `[τ_{j-1}, τ_j]` for zero-based `j`.
    pub fn segment(&self, j: usize) -> (f64, f64) {
        (self.boundaries[j], self.boundaries[j + 1])
    }

    /// Integrated strength `λ` of segment `j`.
    pub fn lambda(&self, j: usize) -> f64 {
        self.lambda[j]
    }

    pub fn lambda_per_segment(&self) -> &[f64] {
        &self.lambda
    }

    /// Per-canonical-term integrals over segment `j`.
    pub fn lambda_p(&self, j: usize) -> &[f64] {
        &self.lambda_p[j]
    }

    /// Upper bound on `h_tot` over segment `j`.
    pub fn strength_bound(&self, j: usize) -> f64 {
        self.bounds[j]
    }

    /// `Λ`
    pub fn total(&self) -> f64 {
        self.total
    }
}

/// Finds `t ∈ (a, hi]` with `∫_a^t h_tot = target` by Newton steps
/// safeguarded with bisection.
fn solve_boundary(h: &TimeDependentHamiltonian, a: f64, hi: f64, target: f64) -> Result<f64> {
    let g = |t: f64| h.integrated_strength(a, t) - target;
    let (mut lo, mut up) = (a, hi);
    let g_up = g(up);
    if g_up < 0.0 {
        // The remaining window holds slightly less than target from rounding.
        if -g_up <= SEGMENT_TOL * target {
            return Ok(hi);
        }
        return Err(Error::Numerical(format!(
            "cannot place boundary after {a}: remaining strength short by {}",
            -g_up
        )));
    }
    let mut t = {
        let rate = h.total_strength_unchecked(a);
        if rate > 0.0 {
            (a + target / rate).min(hi)
        } else {
            0.5 * (a + hi)
        }
    };
    for _ in 0..200 {
        let gt = g(t);
        if gt.abs() <= 1e-3 * SEGMENT_TOL * target {
            return Ok(t);
        }
        if gt > 0.0 {
            up = t;
        } else {
            lo = t;
        }
        if up - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            return Ok(t);
        }
        let rate = h.total_strength_unchecked(t);
        let newton = t - gt / rate;
        t = if rate > 0.0 && newton > lo && newton < up {
            newton
        } else {
            0.5 * (lo + up)
        };
    }
    Err(Error::Numerical(format!(
        "segment boundary after {a} did not converge"
    )))
}

const MAX_REJECTIONS: usize = 10_000_000;

/// Draws `t ∈ [a, b]` with density `h_tot(t) / ∫_a^b h_tot` by rejection
/// from the uniform proposal with envelope `bound`.
pub fn sample_time<R: Rng + ?Sized>(
    h: &TimeDependentHamiltonian,
    a: f64,
    b: f64,
    bound: f64,
    rng: &mut R,
) -> Result<f64> {
    h.check_time(a)?;
    h.check_time(b)?;
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(Error::Numerical(format!(
            "strength bound {bound} on [{a}, {b}] is not positive"
        )));
    }
    for _ in 0..MAX_REJECTIONS {
        let t = a + (b - a) * rng.random::<f64>();
        let v = bound * rng.random::<f64>();
        let ht = h.total_strength_unchecked(t);
        if ht > bound * (1.0 + 1e-9) {
            return Err(Error::Numerical(format!(
                "h_tot({t}) = {ht} exceeds its bound {bound}"
            )));
        }
        if v < ht {
            return Ok(t);
        }
    }
    Err(Error::Numerical(format!(
        "time rejection sampler on [{a}, {b}] accepted nothing"
    )))
}

/// Time draw for segment `j` of a plan.
pub fn sample_segment_time<R: Rng + ?Sized>(
    h: &TimeDependentHamiltonian,
    plan: &SegmentPlan,
    j: usize,
    rng: &mut R,
) -> Result<f64> {
    let (a, b) = plan.segment(j);
    sample_time(h, a, b, plan.strength_bound(j), rng)
}

/// Categorical draw of a canonical term with weights `h_p(t)`.
pub fn sample_term_at_time<R: Rng + ?Sized>(
    h: &TimeDependentHamiltonian,
    t: f64,
    rng: &mut R,
) -> Result<usize> {
    h.check_time(t)?;
    let total = h.total_strength_unchecked(t);
    if total <= 0.0 {
        return Err(Error::ZeroStrength(t));
    }
    let mut u = total * rng.random::<f64>();
    let mut last = 0;
    for p in 0..h.canonical_len() {
        let w = h.strength(p, t);
        if w > 0.0 {
            if u < w {
                return Ok(p);
            }
            u -= w;
            last = p;
        }
    }
    // Rounding left u marginally above the final weight.
    Ok(last)
}

/// Categorical draw with non-negative weights.
pub fn sample_categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<usize> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "categorical weights sum to {total}"
        )));
    }
    let mut u = total * rng.random::<f64>();
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            if u < w {
                return Ok(i);
            }
            u -= w;
            last = i;
        }
    }
    Ok(last)
}

/// Largest mean handled by sequential search; above it the rand_distr
/// sampler is used.
pub const POISSON_SEARCH_LIMIT: f64 = 10.0;

/// `l ~ Poisson(λ)`.
pub fn sample_order<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<u64> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("Poisson mean {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(0);
    }
    if lambda > POISSON_SEARCH_LIMIT {
        let d = Poisson::new(lambda).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        return Ok(d.sample(rng) as u64);
    }
    loop {
        let u: f64 = rng.random();
        let mut k = 0u64;
        let mut p = (-lambda).exp();
        let mut cdf = p;
        while u >= cdf && k < 1000 {
            k += 1;
            p *= lambda / k as f64;
            cdf += p;
        }
        if u < cdf {
            return Ok(k);
        }
        // u fell in the rounding gap above the summed pmf: redraw.
    }
}

/// `l ~ Poisson(λ)` conditioned on `l ≥ 2`.
///
/// For `λ ≥ 0.1` this is the literal redraw loop. Smaller means would need
/// `~2/λ²` redraws, so the truncated law is inverted directly instead.
pub fn sample_order_at_least_two<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<u64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "truncated Poisson needs a positive mean, got {lambda}"
        )));
    }
    if lambda >= 0.1 {
        loop {
            let l = sample_order(lambda, rng)?;
            if l >= 2 {
                return Ok(l);
            }
        }
    }
    let z = poisson_tail_mass(lambda);
    loop {
        let u = z * rng.random::<f64>();
        let mut k = 2u64;
        let mut p = 0.5 * lambda * lambda;
        let mut cdf = p;
        while u >= cdf && k < 1000 {
            k += 1;
            p *= lambda / k as f64;
            cdf += p;
        }
        if u < cdf {
            return Ok(k);
        }
    }
}

/// `e^λ − 1 − λ`, accurate for small `λ`.
pub fn poisson_tail_mass(lambda: f64) -> f64 {
    if lambda.abs() < 1e-2 {
        // Σ_{k≥2} λ^k / k!
        let mut term = 0.5 * lambda * lambda;
        let mut sum = 0.0f64;
        let mut k = 2.0;
        while term.abs() > 1e-18 * sum.abs() {
            sum += term;
            k += 1.0;
            term *= lambda / k;
        }
        sum
    } else {
        lambda.exp_m1() - lambda
    }
}
