//! Direction-reversal statistics. S1(t) = sum_x a1(x, t)^2 is the
//! probability that the move into time t goes left; S2 is the right-move
//! complement and S12 the cross term. S1 admits a series form through the
//! return amplitudes,
//!   S1(t) = mu / sqrt(1 + mu^2) * sum_{k=1}^{t-1} a1(0, 2k),
//! and converges (without a limit of the summands) to mu / (2 sqrt(1 + mu^2)).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::pow_big;
use crate::lattice::{AmplitudeRow, LatticeParams};
use crate::special::legendre_seq;

/// Large-t limit of S1: mu / (2 sqrt(1 + mu^2)), for 0 <= mu <= 1.
pub fn reversal_limit(mu: f64) -> Result<f64> {
    if !(mu.is_finite() && (0.0..=1.0).contains(&mu)) {
        return Err(Error::InvalidParameter(format!(
            "reversal limit needs 0 <= mu <= 1, got {mu}"
        )));
    }
    Ok(mu / (2.0 * (1.0 + mu * mu).sqrt()))
}

/// S1(t) from the time-t slice. O(t^2).
pub fn reversal_probability_direct(t: i64, params: &LatticeParams) -> Result<f64> {
    let row = AmplitudeRow::evolve_to(params, t)?;
    Ok(row.component_sums().0)
}

/// S1(t) as an exact rational; params must be in exact mode.
pub fn reversal_probability_direct_exact(t: i64, params: &LatticeParams) -> Result<BigRational> {
    let mu = params.exact_mu().ok_or(Error::ModeMismatch)?;
    let row = AmplitudeRow::evolve_to(params, t)?;
    let (c1, _, _) = row.exact_component_sums().expect("exact row");
    Ok(BigRational::new(c1, pow_big(mu.base(), (t - 1) as u32)))
}

/// S1(t) from the series over return amplitudes.
///
/// In float mode the terms come from the Legendre bridge; in exact mode
/// they come from the slice evolution, and the result equals the direct
/// sum exactly (see `check_reversal_identities_exact`).
pub fn reversal_probability_series(t: i64, params: &LatticeParams) -> Result<f64> {
    if params.is_exact() {
        let s = reversal_probability_series_exact(t, params)?;
        return Ok(crate::exact::big_ratio_to_f64(s.numer(), s.denom()));
    }
    if t < 1 {
        return Err(Error::TimeOutOfRange { t });
    }
    let mu = params.mu();
    let f = mu / (1.0 + mu * mu).sqrt();
    let xi = (1.0 - mu * mu) / (1.0 + mu * mu);
    // a1(0, 2k) = f * P_{k-1}(xi) for k = 1 .. t-1.
    let sum: f64 = legendre_seq(xi).take((t - 1) as usize).map(|p| f * p).sum();
    Ok(f * sum)
}

/// Exact series form: mu / sqrt(1 + mu^2) * sum_k a1(0, 2k) stays rational
/// because each term carries an integer power of the base.
pub fn reversal_probability_series_exact(t: i64, params: &LatticeParams) -> Result<BigRational> {
    let mu = params.exact_mu().ok_or(Error::ModeMismatch)?;
    if t < 1 {
        return Err(Error::TimeOutOfRange { t });
    }
    let p = BigInt::from(mu.numer());
    let base = BigInt::from(mu.base());
    // One sweep to 2(t-1) collecting the even-time center values, then
    // accumulate p * sum_{k<t} base^{t-1-k} d1(0, 2k).
    let mut acc = BigInt::zero();
    if t > 1 {
        let mut centers = Vec::with_capacity((t - 1) as usize);
        let mut row = AmplitudeRow::initial(params);
        while row.t() < 2 * (t - 1) {
            row = row.evolve(params)?;
            if row.t() % 2 == 0 {
                let (d1, _) = row.exact_d_at(0).expect("exact row");
                centers.push(d1);
            }
        }
        for d1 in &centers {
            acc = &acc * &base + &p * d1;
        }
    }
    Ok(BigRational::new(acc, pow_big(mu.base(), (t - 1) as u32)))
}

/// Per-slice reversal sums from direct evolution.
#[derive(Debug, Clone)]
pub struct ReversalSweep {
    pub mu: f64,
    /// s1[t-1] = S1(t) = sum_x a1(x, t)^2.
    pub s1: Vec<f64>,
    /// s2[t-1] = S2(t) = sum_x a2(x, t)^2; S1 + S2 = 1.
    pub s2: Vec<f64>,
    /// s12[t-1] = S12(t) = sum_x a1(x, t) a2(x, t).
    pub s12: Vec<f64>,
}

/// Evolves to t_max recording (S1, S2, S12) on every slice. O(t_max^2).
pub fn direct_sweep(t_max: i64, params: &LatticeParams) -> Result<ReversalSweep> {
    if t_max < 1 {
        return Err(Error::TimeOutOfRange { t: t_max });
    }
    let mut sweep = ReversalSweep {
        mu: params.mu(),
        s1: Vec::with_capacity(t_max as usize),
        s2: Vec::with_capacity(t_max as usize),
        s12: Vec::with_capacity(t_max as usize),
    };
    let mut row = AmplitudeRow::initial(params);
    loop {
        let (s1, s2, s12) = row.component_sums();
        sweep.s1.push(s1);
        sweep.s2.push(s2);
        sweep.s12.push(s12);
        if row.t() == t_max {
            break;
        }
        row = row.evolve(params)?;
    }
    Ok(sweep)
}

/// Return-amplitude terms and series partial sums, via the Legendre bridge.
#[derive(Debug, Clone)]
pub struct ReversalSeries {
    pub mu: f64,
    /// terms[k-1] = a1(0, 2k), k = 1 .. t_max-1.
    pub terms: Vec<f64>,
    /// s1[t-1] = series value of S1(t), t = 1 .. t_max.
    pub s1: Vec<f64>,
}

/// O(t_max) series sweep; the Legendre recurrence is advanced once.
pub fn series_sweep(t_max: i64, mu: f64) -> Result<ReversalSeries> {
    if t_max < 1 {
        return Err(Error::TimeOutOfRange { t: t_max });
    }
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "series sweep needs finite mu >= 0, got {mu}"
        )));
    }
    let f = mu / (1.0 + mu * mu).sqrt();
    let xi = (1.0 - mu * mu) / (1.0 + mu * mu);
    let terms: Vec<f64> = legendre_seq(xi)
        .take((t_max - 1) as usize)
        .map(|p| f * p)
        .collect();
    let mut s1 = Vec::with_capacity(t_max as usize);
    let mut acc = 0.0;
    s1.push(0.0);
    for term in &terms {
        acc += term;
        s1.push(f * acc);
    }
    Ok(ReversalSeries { mu, terms, s1 })
}

/// Outcome of the exact reversal identities over 1 <= t <= t_max.
#[derive(Debug, Clone, Copy)]
pub struct ReversalIdentityCheck {
    pub t_max: i64,
    /// S1(t) = mu / sqrt(1+mu^2) * sum_{k<t} a1(0, 2k).
    pub series_matches_direct: bool,
    /// S1(t+1) - S1(t) = mu / sqrt(1+mu^2) * a1(0, 2t).
    pub telescoping_holds: bool,
    /// 2 S12(t) + mu S2(t) = sqrt(1+mu^2) a1(0, 2t) + mu S1(t).
    pub mixed_relation_holds: bool,
    /// S1(t) + S2(t) = 1.
    pub total_probability_one: bool,
}

impl ReversalIdentityCheck {
    pub fn all_hold(&self) -> bool {
        self.series_matches_direct
            && self.telescoping_holds
            && self.mixed_relation_holds
            && self.total_probability_one
    }
}

/// Verifies the reversal identities exactly for rational mu, clearing the
/// base powers so every comparison is between big integers:
///   series:       C1(t)            = p sum_{k<t} base^{t-1-k} d1(0, 2k)
///   telescoping:  C1(t+1) - N C1(t) = p d1(0, 2t)
///   mixed:        2 q C12(t) + p C2(t) = d1(0, 2t) + p C1(t)
///   total:        C1(t) + C2(t)     = base^{t-1}
/// where C are scaled component sums on slice t and N = base.
pub fn check_reversal_identities_exact(
    t_max: i64,
    params: &LatticeParams,
) -> Result<ReversalIdentityCheck> {
    let mu = params.exact_mu().ok_or(Error::ModeMismatch)?;
    if t_max < 1 {
        return Err(Error::TimeOutOfRange { t: t_max });
    }
    let p = BigInt::from(mu.numer());
    let q = BigInt::from(mu.denom());
    let base = BigInt::from(mu.base());

    // One sweep to 2 t_max: component sums for t <= t_max + 1 and the
    // center value d1(0, 2k) for k <= t_max.
    let mut sums = Vec::new();
    let mut centers = Vec::new();
    let mut row = AmplitudeRow::initial(params);
    loop {
        let t = row.t();
        if t <= t_max + 1 {
            sums.push(row.exact_component_sums().expect("exact row"));
        }
        if t % 2 == 0 {
            let (d1, _) = row.exact_d_at(0).expect("exact row");
            centers.push(d1);
        }
        if t >= 2 * t_max.max(1) {
            break;
        }
        row = row.evolve(params)?;
    }

    let mut check = ReversalIdentityCheck {
        t_max,
        series_matches_direct: true,
        telescoping_holds: true,
        mixed_relation_holds: true,
        total_probability_one: true,
    };
    let mut series_acc = BigInt::zero();
    for t in 1..=t_max {
        let (c1, c2, c12) = &sums[(t - 1) as usize];
        if &series_acc != c1 {
            check.series_matches_direct = false;
        }
        let d1_2t = &centers[(t - 1) as usize]; // d1(0, 2t)
        let (c1_next, _, _) = &sums[t as usize];
        if c1_next - &base * c1 != &p * d1_2t {
            check.telescoping_holds = false;
        }
        if BigInt::from(2) * &q * c12 + &p * c2 != d1_2t + &p * c1 {
            check.mixed_relation_holds = false;
        }
        if c1 + c2 != pow_big(mu.base(), (t - 1) as u32) {
            check.total_probability_one = false;
        }
        series_acc = &series_acc * &base + &p * d1_2t;
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn limit_values_and_range() {
        assert_eq!(reversal_limit(0.0).unwrap(), 0.0);
        assert!((reversal_limit(1.0).unwrap() - 0.35355339059327373).abs() < 1e-16);
        assert!((reversal_limit(0.5).unwrap() - 0.22360679774997896).abs() < 1e-16);
        assert!(reversal_limit(-0.1).is_err());
        assert!(reversal_limit(1.0001).is_err());
    }

    #[test]
    fn first_slices_have_closed_values() {
        // S1(1) = 0 and S1(2) = mu^2 / (1 + mu^2).
        let params = LatticeParams::exact(1, 2).unwrap();
        assert_eq!(reversal_probability_direct(1, &params).unwrap(), 0.0);
        let s1 = reversal_probability_direct_exact(2, &params).unwrap();
        assert_eq!(s1, BigRational::new(1.into(), 5.into()));
    }

    #[test]
    fn series_agrees_with_direct_in_float_mode() {
        for mu in [0.3, 1.0] {
            let params = LatticeParams::float(mu).unwrap();
            for t in [1, 2, 13, 60] {
                let direct = reversal_probability_direct(t, &params).unwrap();
                let series = reversal_probability_series(t, &params).unwrap();
                assert!((direct - series).abs() < 1e-12, "mu={mu} t={t}");
            }
        }
    }

    #[test]
    fn exact_series_equals_exact_direct() {
        let params = LatticeParams::exact(3, 4).unwrap();
        for t in [1, 2, 7, 20] {
            let series = reversal_probability_series_exact(t, &params).unwrap();
            let direct = reversal_probability_direct_exact(t, &params).unwrap();
            assert_eq!(series, direct, "t={t}");
        }
    }

    #[test]
    fn identities_hold_exactly() {
        for (p, q) in [(1, 4), (1, 2), (3, 4), (1, 1)] {
            let params = LatticeParams::exact(p, q).unwrap();
            let check = check_reversal_identities_exact(40, &params).unwrap();
            assert!(check.all_hold(), "p={p} q={q}: {check:?}");
        }
    }

    #[test]
    fn sweeps_have_consistent_shapes_and_values() {
        let params = LatticeParams::float(0.5).unwrap();
        let direct = direct_sweep(80, &params).unwrap();
        assert_eq!(direct.s1.len(), 80);
        let series = series_sweep(80, 0.5).unwrap();
        assert_eq!(series.s1.len(), 80);
        assert_eq!(series.terms.len(), 79);
        for t in [1usize, 2, 40, 80] {
            assert!((direct.s1[t - 1] - series.s1[t - 1]).abs() < 1e-12, "t={t}");
            // S1 + S2 = 1 on every slice.
            assert!((direct.s1[t - 1] + direct.s2[t - 1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn deviation_from_the_limit_shrinks_and_oscillates() {
        let limit = reversal_limit(1.0).unwrap();
        let series = series_sweep(2000, 1.0).unwrap();
        let scaled: Vec<f64> = series
            .s1
            .iter()
            .enumerate()
            .map(|(i, s)| (s - limit) * ((i + 1) as f64).sqrt())
            .collect();
        let max = scaled.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(max < 2.0, "scaled deviation unexpectedly large: {max}");
        let sign_changes = series
            .s1
            .windows(2)
            .filter(|w| (w[0] - limit).signum() != (w[1] - limit).signum())
            .count();
        assert!(sign_changes >= 10, "only {sign_changes} sign changes");
    }

    #[test]
    fn validation_errors() {
        let params = LatticeParams::float(0.5).unwrap();
        assert!(reversal_probability_direct(0, &params).is_err());
        assert!(series_sweep(0, 0.5).is_err());
        assert!(reversal_probability_series_exact(5, &params).is_err());
    }
}
