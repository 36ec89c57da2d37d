//! Legendre polynomials by the three-term recurrence, the bridge from them
//! to the return amplitudes a1(0, 2n+2), and the oscillatory large-n form.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};

/// Default half-width of the mass window accepted by the asymptotic form.
pub const DEFAULT_DELTA: f64 = 0.05;

/// Yields P_0(x), P_1(x), P_2(x), ... by the three-term recurrence
/// (n+1) P_{n+1}(x) = (2n+1) x P_n(x) - n P_{n-1}(x).
pub fn legendre_seq(x: f64) -> LegendreSeq {
    LegendreSeq {
        x,
        n: 0,
        p0: 1.0,
        p1: x,
    }
}

pub struct LegendreSeq {
    x: f64,
    n: u64,
    p0: f64,
    p1: f64,
}

impl Iterator for LegendreSeq {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = match self.n {
            0 => self.p0,
            1 => self.p1,
            _ => {
                let k = (self.n - 1) as f64;
                let next = ((2.0 * k + 1.0) * self.x * self.p1 - k * self.p0) / (k + 1.0);
                self.p0 = self.p1;
                self.p1 = next;
                next
            }
        };
        self.n += 1;
        Some(out)
    }
}

/// P_n(x). |P_n(x)| <= 1 for |x| <= 1; stable for n well beyond 10^5.
pub fn legendre(n: u32, x: f64) -> f64 {
    debug_assert!(x.is_finite());
    legendre_seq(x)
        .nth(n as usize)
        .expect("legendre_seq is infinite")
}

/// Return amplitude via the Legendre bridge:
/// a1(0, 2n+2) = mu / sqrt(1 + mu^2) * P_n((1 - mu^2) / (1 + mu^2)).
pub fn a1_zero_via_legendre(n: u32, mu: f64) -> f64 {
    debug_assert!(mu.is_finite() && mu >= 0.0);
    let den = 1.0 + mu * mu;
    mu / den.sqrt() * legendre(n, (1.0 - mu * mu) / den)
}

/// Closed form of the (Abel-regularized) series sum_{n>=0} P_n(x) on
/// 0 < x < 1: 1 / sqrt(2 - 2x).
pub fn legendre_sum_closed(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "legendre_sum_closed needs 0 < x < 1, got {x}"
        )));
    }
    Ok(1.0 / (2.0 - 2.0 * x).sqrt())
}

/// Generating function sum_{n>=0} P_n(x) r^n = 1 / sqrt(1 - 2xr + r^2)
/// for |r| < 1.
pub fn legendre_generating(x: f64, r: f64) -> f64 {
    1.0 / (1.0 - 2.0 * x * r + r * r).sqrt()
}

/// Truncated Abel sum: sum_{n < terms} P_n(x) r^n.
pub fn legendre_sum_abel(x: f64, r: f64, terms: usize) -> f64 {
    let mut rn = 1.0;
    let mut sum = 0.0;
    for p in legendre_seq(x).take(terms) {
        sum += p * rn;
        rn *= r;
    }
    sum
}

/// Inputs of the oscillatory large-n form, restricted to the mass window
/// delta <= mu <= 1 - delta on which the form carries a uniform remainder.
///
/// theta = 2 arctan(mu) is the rotation angle of the oscillation:
/// cos theta = (1 - mu^2)/(1 + mu^2) and sin theta = 2 mu/(1 + mu^2).
#[derive(Debug, Clone, Copy)]
pub struct AsymptoteParams {
    pub n: u32,
    pub mu: f64,
    pub delta: f64,
    pub theta: f64,
}

impl AsymptoteParams {
    pub fn new(n: u32, mu: f64, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0 && delta <= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 0.5], got {delta}"
            )));
        }
        if !(mu.is_finite() && mu >= delta && mu <= 1.0 - delta) {
            return Err(Error::InvalidParameter(format!(
                "asymptotic form needs delta <= mu <= 1 - delta, got mu={mu}, delta={delta}"
            )));
        }
        if n < 1 {
            return Err(Error::InvalidParameter(
                "asymptotic form needs n >= 1".into(),
            ));
        }
        Ok(AsymptoteParams {
            n,
            mu,
            delta,
            theta: 2.0 * mu.atan(),
        })
    }

    /// Main term of a1(0, 2n+2) for large n:
    ///   sqrt(mu / (pi n)) * cos((2n + 1) arctan(mu) - pi / 4),
    /// with remainder O(n^{-3/2}) uniformly on the mass window.
    ///
    /// The envelope follows from the classical estimate
    /// P_n(cos theta) = sqrt(2 / (pi n sin theta)) cos((n + 1/2) theta - pi/4)
    /// + O(n^{-3/2}) at cos theta = (1 - mu^2)/(1 + mu^2).
    pub fn main_term(&self) -> f64 {
        let n = self.n as f64;
        (self.mu / (PI * n)).sqrt() * ((2.0 * n + 1.0) * self.mu.atan() - FRAC_PI_4).cos()
    }
}

/// Main term of a1(0, 2n+2); errors when (n, mu, delta) leave the window.
pub fn asymptotic_a1_zero(n: u32, mu: f64, delta: f64) -> Result<f64> {
    Ok(AsymptoteParams::new(n, mu, delta)?.main_term())
}
