//! Coefficient waveforms with closed-form integrals of `|f|`, `max(f, 0)`
//! and `max(-f, 0)`.
//!
//! Every supported kind has the shape `f(t) = (α + β t) · g(t)` with
//! `g ∈ {1, cos ωt, sin ωt}`. Zeros of both factors are located
//! analytically, so the interval is cut into sign-constant pieces and each
//! piece is integrated with the exact antiderivative.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear interpolation from `start` at `t_start` to `end` at `t_end`
/// (extrapolated outside that interval).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ramp {
    pub start: f64,
    pub end: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl Ramp {
    fn affine(&self) -> (f64, f64) {
        let slope = (self.end - self.start) / (self.t_end - self.t_start);
        (self.start - slope * self.t_start, slope)
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.start, self.end, self.t_start, self.t_end]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.t_end <= self.t_start {
            return Err(Error::InvalidArgument(format!("invalid ramp {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Waveform {
    Constant {
        amplitude: f64,
    },
    /// `amplitude · cos(frequency · t)`
    Cosine {
        amplitude: f64,
        frequency: f64,
    },
    /// `amplitude · sin(frequency · t)`
    Sine {
        amplitude: f64,
        frequency: f64,
    },
    LinearRamp {
        start: f64,
        end: f64,
        t_start: f64,
        t_end: f64,
    },
    /// Pointwise product of a ramp with a constant, cosine or sine base.
    Product {
        ramp: Ramp,
        base: Box<Waveform>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Trig {
    One,
    Cos(f64),
    Sin(f64),
}

/// `(alpha + beta t) * trig(t)` with non-negative frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Shape {
    alpha: f64,
    beta: f64,
    trig: Trig,
}

impl Shape {
    fn eval(&self, t: f64) -> f64 {
        let a = self.alpha + self.beta * t;
        match self.trig {
            Trig::One => a,
            Trig::Cos(w) => a * (w * t).cos(),
            Trig::Sin(w) => a * (w * t).sin(),
        }
    }

    fn antiderivative(&self, t: f64) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        match self.trig {
            Trig::One => a * t + 0.5 * b * t * t,
            Trig::Cos(w) => {
                let (s, c) = (w * t).sin_cos();
                (a + b * t) * s / w + b * c / (w * w)
            }
            Trig::Sin(w) => {
                let (s, c) = (w * t).sin_cos();
                -(a + b * t) * c / w + b * s / (w * w)
            }
        }
    }

    /// Sorted cut points `lo = t_0 < … < t_m = hi` such that the shape has
    /// constant sign on every piece.
    fn pieces(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut cuts = vec![lo];
        if self.beta != 0.0 {
            let root = -self.alpha / self.beta;
            if root > lo && root < hi {
                cuts.push(root);
            }
        }
        // cos zeros at ωt = π/2 + kπ, sin zeros at ωt = kπ
        let offset = match self.trig {
            Trig::One => None,
            Trig::Cos(w) => Some((w, FRAC_PI_2)),
            Trig::Sin(w) => Some((w, 0.0)),
        };
        if let Some((w, off)) = offset {
            let k_lo = ((w * lo - off) / PI).floor() as i64;
            let k_hi = ((w * hi - off) / PI).ceil() as i64;
            for k in k_lo..=k_hi {
                let root = (off + k as f64 * PI) / w;
                if root > lo && root < hi {
                    cuts.push(root);
                }
            }
        }
        cuts.push(hi);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        cuts
    }

    /// Signed integrals over sign-constant pieces.
    fn piece_integrals(&self, lo: f64, hi: f64) -> impl Iterator<Item = f64> + '_ {
        let cuts = self.pieces(lo, hi);
        let vals: Vec<f64> = cuts.iter().map(|&t| self.antiderivative(t)).collect();
        (0..cuts.len() - 1).map(move |i| vals[i + 1] - vals[i])
    }

    /// `sup |g|` on `[lo, hi]` for the trig factor alone.
    fn trig_sup(&self, lo: f64, hi: f64) -> f64 {
        let (w, peak_offset) = match self.trig {
            Trig::One => return 1.0,
            Trig::Cos(w) => (w, 0.0),
            Trig::Sin(w) => (w, FRAC_PI_2),
        };
        let g = |t: f64| match self.trig {
            Trig::Cos(_) => (w * t).cos().abs(),
            _ => (w * t).sin().abs(),
        };
        // |g| = 1 at ωt = offset + kπ
        let k = ((w * lo - peak_offset) / PI).ceil();
        if (peak_offset + k * PI) / w <= hi {
            1.0
        } else {
            g(lo).max(g(hi))
        }
    }

    fn affine_sup(&self, lo: f64, hi: f64) -> f64 {
        (self.alpha + self.beta * lo)
            .abs()
            .max((self.alpha + self.beta * hi).abs())
    }

    fn upper_bound(&self, lo: f64, hi: f64) -> f64 {
        if self.beta == 0.0 || self.trig == Trig::One {
            return self.affine_sup(lo, hi) * self.trig_sup(lo, hi);
        }
        // Product of a ramp with an oscillation: refine piecewise bounds
        // until they sit within 1.5x of the largest sampled value.
        let mut pieces = 64usize;
        loop {
            let h = (hi - lo) / pieces as f64;
            let mut bound = 0.0f64;
            let mut seen = 0.0f64;
            for i in 0..pieces {
                let a = lo + i as f64 * h;
                let b = if i + 1 == pieces { hi } else { a + h };
                bound = bound.max(self.affine_sup(a, b) * self.trig_sup(a, b));
                seen = seen
                    .max(self.eval(a).abs())
                    .max(self.eval(0.5 * (a + b)).abs());
            }
            seen = seen.max(self.eval(hi).abs());
            if bound <= 1.5 * seen || pieces >= 1 << 14 {
                return bound;
            }
            pieces *= 4;
        }
    }
}

impl Waveform {
    pub fn constant(amplitude: f64) -> Self {
        Waveform::Constant { amplitude }
    }

    pub fn cosine(amplitude: f64, frequency: f64) -> Self {
        Waveform::Cosine {
            amplitude,
            frequency,
        }
    }

    pub fn sine(amplitude: f64, frequency: f64) -> Self {
        Waveform::Sine {
            amplitude,
            frequency,
        }
    }

    pub fn linear_ramp(start: f64, end: f64, t_start: f64, t_end: f64) -> Self {
        Waveform::LinearRamp {
            start,
            end,
            t_start,
            t_end,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite();
        match self {
            Waveform::Constant { amplitude } if ok(*amplitude) => Ok(()),
            Waveform::Cosine {
                amplitude,
                frequency,
            }
            | Waveform::Sine {
                amplitude,
                frequency,
            } if ok(*amplitude) && ok(*frequency) => Ok(()),
            Waveform::LinearRamp {
                start,
                end,
                t_start,
                t_end,
            } => Ramp {
                start: *start,
                end: *end,
                t_start: *t_start,
                t_end: *t_end,
            }
            .validate(),
            Waveform::Product { ramp, base } => {
                ramp.validate()?;
                match **base {
                    Waveform::Constant { .. } | Waveform::Cosine { .. } | Waveform::Sine { .. } => {
                        base.validate()
                    }
                    _ => Err(Error::InvalidArgument(
                        "product base must be constant, cosine or sine".into(),
                    )),
                }
            }
            _ => Err(Error::InvalidArgument(format!(
                "non-finite waveform {self:?}"
            ))),
        }
    }

    fn shape(&self) -> Shape {
        match *self {
            Waveform::Constant { amplitude } => Shape {
                alpha: amplitude,
                beta: 0.0,
                trig: Trig::One,
            },
            Waveform::Cosine {
                amplitude,
                frequency,
            } => {
                if frequency == 0.0 {
                    Shape {
                        alpha: amplitude,
                        beta: 0.0,
                        trig: Trig::One,
                    }
                } else {
                    Shape {
                        alpha: amplitude,
                        beta: 0.0,
                        trig: Trig::Cos(frequency.abs()),
                    }
                }
            }
            Waveform::Sine {
                amplitude,
                frequency,
            } => {
                if frequency == 0.0 {
                    Shape {
                        alpha: 0.0,
                        beta: 0.0,
                        trig: Trig::One,
                    }
                } else {
                    Shape {
                        alpha: amplitude * frequency.signum(),
                        beta: 0.0,
                        trig: Trig::Sin(frequency.abs()),
                    }
                }
            }
            Waveform::LinearRamp {
                start,
                end,
                t_start,
                t_end,
            } => {
                let (alpha, beta) = Ramp {
                    start,
                    end,
                    t_start,
                    t_end,
                }
                .affine();
                Shape {
                    alpha,
                    beta,
                    trig: Trig::One,
                }
            }
            Waveform::Product { ref ramp, ref base } => {
                let (ra, rb) = ramp.affine();
                let b = base.shape();
                // base is constant/cosine/sine, so b.beta == 0
                Shape {
                    alpha: ra * b.alpha,
                    beta: rb * b.alpha,
                    trig: b.trig,
                }
            }
        }
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        match *self {
            Waveform::Constant { amplitude } => amplitude,
            Waveform::Cosine {
                amplitude,
                frequency,
            } => amplitude * (frequency * t).cos(),
            Waveform::Sine {
                amplitude,
                frequency,
            } => amplitude * (frequency * t).sin(),
            _ => self.shape().eval(t),
        }
    }

    /// `∫_a^b f(t) dt`
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        let s = self.shape();
        s.antiderivative(b) - s.antiderivative(a)
    }

    /// `∫_a^b |f(t)| dt`
    pub fn integrate_abs(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        self.shape().piece_integrals(a, b).map(f64::abs).sum()
    }

    /// `∫_a^b max(f(t), 0) dt`
    pub fn integrate_positive(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        self.shape()
            .piece_integrals(a, b)
            .filter(|v| *v > 0.0)
            .sum()
    }

    /// `∫_a^b max(-f(t), 0) dt`
    pub fn integrate_negative(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        -self
            .shape()
            .piece_integrals(a, b)
            .filter(|v| *v < 0.0)
            .sum::<f64>()
    }

    /// Bound `B` with `sup_{[a,b]} |f| ≤ B`; within a factor 1.5 of the
    /// supremum for every kind.
    pub fn upper_bound(&self, a: f64, b: f64) -> f64 {
        self.shape().upper_bound(a.min(b), a.max(b))
    }

    /// Points in `(a, b)` where the waveform can change sign.
    pub fn sign_changes(&self, a: f64, b: f64) -> Vec<f64> {
        let cuts = self.shape().pieces(a, b);
        cuts[1..cuts.len() - 1].to_vec()
    }
}
