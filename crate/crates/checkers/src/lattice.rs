//! Time-slice dynamics of the walk: evolution of amplitude rows, the
//! path-sum definition as an enumeration oracle, the closed-form slice
//! formula, slice composition, and the mirror symmetries.
//!
//! Coordinates are lattice units: x and t are integers, t >= 1, and a slice
//! at time t is supported on |x| <= t with x + t even. Only the product
//! mu = mass * lattice_step enters the dynamics. The two amplitude
//! components are the real and imaginary parts of the path sum.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{big_ratio_to_f64, pow_big, scaled_to_f64, ExactAmplitude, ExactMu};

/// Default ceiling for evolve-based queries; O(t^2) work makes larger
/// requests a denial-of-service hazard rather than a use case.
pub const DEFAULT_T_CAP: i64 = 100_000;

/// Path enumeration visits 2^{t-1} paths; above this it is hopeless.
pub const BRUTE_FORCE_T_CAP: i64 = 24;

/// Arithmetic mode: f64 slices, or integer-scaled exact slices for
/// rational mu.
#[derive(Debug, Clone, PartialEq)]
enum MassMode {
    Float { mu: f64 },
    Exact { mu: ExactMu },
}

/// Mass parameter and arithmetic mode for the walk.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeParams {
    mode: MassMode,
    t_cap: i64,
}

impl LatticeParams {
    /// Float-mode parameters; mu must be finite and >= 0.
    ///
    /// Values mu > 1 are accepted: the dynamics stay well defined, only the
    /// reversal-limit and asymptote helpers restrict their own ranges.
    pub fn float(mu: f64) -> Result<Self> {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mu must be finite and >= 0, got {mu}"
            )));
        }
        Ok(LatticeParams {
            mode: MassMode::Float { mu },
            t_cap: DEFAULT_T_CAP,
        })
    }

    /// Exact-mode parameters with mu = p/q.
    pub fn exact(p: u64, q: u64) -> Result<Self> {
        Ok(Self::exact_from(ExactMu::new(p, q)?))
    }

    pub fn exact_from(mu: ExactMu) -> Self {
        LatticeParams {
            mode: MassMode::Exact { mu },
            t_cap: DEFAULT_T_CAP,
        }
    }

    /// Overrides the evolve-depth cap.
    pub fn with_t_cap(mut self, t_cap: i64) -> Self {
        self.t_cap = t_cap;
        self
    }

    pub fn mu(&self) -> f64 {
        match &self.mode {
            MassMode::Float { mu } => *mu,
            MassMode::Exact { mu } => mu.to_f64(),
        }
    }

    pub fn exact_mu(&self) -> Option<&ExactMu> {
        match &self.mode {
            MassMode::Float { .. } => None,
            MassMode::Exact { mu } => Some(mu),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.mode, MassMode::Exact { .. })
    }

    pub fn t_cap(&self) -> i64 {
        self.t_cap
    }

    fn check_t(&self, t: i64) -> Result<()> {
        if t < 1 {
            return Err(Error::TimeOutOfRange { t });
        }
        if t > self.t_cap {
            return Err(Error::ResourceExceeded {
                what: "slice evolution",
                t,
                cap: self.t_cap,
            });
        }
        Ok(())
    }
}

/// Two-component amplitude; the components are the real and imaginary
/// parts of the path sum. |a1|, |a2| <= 1 on every slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude {
    pub a1: f64,
    pub a2: f64,
}

impl Amplitude {
    pub const ZERO: Amplitude = Amplitude { a1: 0.0, a2: 0.0 };

    pub fn probability(&self) -> f64 {
        self.a1 * self.a1 + self.a2 * self.a2
    }
}

#[derive(Debug, Clone, PartialEq)]
enum RowInner {
    Float {
        t: i64,
        mu: f64,
        pairs: Vec<(f64, f64)>,
    },
    Exact {
        t: i64,
        mu: ExactMu,
        pairs: Vec<(BigInt, BigInt)>,
    },
}

/// One time slice, stored densely over x in [-t, t] with stride 2.
///
/// Exact rows hold the integer pairs d with amplitude
/// a(x, t) = base^{-(t-1)/2} * d(x, t), base = p^2 + q^2; that scaling
/// absorbs the per-step normalization, so evolution is integer-exact.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeRow {
    inner: RowInner,
}

impl AmplitudeRow {
    /// The t = 1 slice: a(1, 1) = (0, 1), zero elsewhere.
    pub fn initial(params: &LatticeParams) -> AmplitudeRow {
        let inner = match &params.mode {
            MassMode::Float { mu } => RowInner::Float {
                t: 1,
                mu: *mu,
                pairs: vec![(0.0, 0.0), (0.0, 1.0)],
            },
            MassMode::Exact { mu } => RowInner::Exact {
                t: 1,
                mu: mu.clone(),
                pairs: vec![
                    (BigInt::zero(), BigInt::zero()),
                    (BigInt::zero(), BigInt::from(1)),
                ],
            },
        };
        AmplitudeRow { inner }
    }

    pub fn t(&self) -> i64 {
        match &self.inner {
            RowInner::Float { t, .. } | RowInner::Exact { t, .. } => *t,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.inner, RowInner::Exact { .. })
    }

    fn check_params(&self, params: &LatticeParams) -> Result<()> {
        let ok = match (&self.inner, &params.mode) {
            (RowInner::Float { mu, .. }, MassMode::Float { mu: pm }) => mu == pm,
            (RowInner::Exact { mu, .. }, MassMode::Exact { mu: pm }) => mu == pm,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ModeMismatch)
        }
    }

    /// The slice at t + 1. One step of
    ///   a1(x, t+1) = (a1(x+1, t) + mu a2(x+1, t)) / sqrt(1 + mu^2)
    ///   a2(x, t+1) = (a2(x-1, t) - mu a1(x-1, t)) / sqrt(1 + mu^2)
    /// in float mode, or the same step without the normalization on the
    /// scaled integer pairs in exact mode.
    pub fn evolve(&self, params: &LatticeParams) -> Result<AmplitudeRow> {
        self.check_params(params)?;
        params.check_t(self.t() + 1)?;
        let inner = match &self.inner {
            RowInner::Float { t, mu, pairs } => {
                let inv = (1.0 + mu * mu).sqrt().recip();
                let tn = t + 1;
                let n = (tn + 1) as usize;
                let mut next = vec![(0.0, 0.0); n];
                for (i, slot) in next.iter_mut().enumerate() {
                    // x = -tn + 2i; source x+1 is old index i, x-1 is i-1.
                    if i < pairs.len() {
                        let (a1, a2) = pairs[i];
                        slot.0 = inv * (a1 + mu * a2);
                    }
                    if i >= 1 && i - 1 < pairs.len() {
                        let (a1, a2) = pairs[i - 1];
                        slot.1 = inv * (a2 - mu * a1);
                    }
                }
                RowInner::Float {
                    t: tn,
                    mu: *mu,
                    pairs: next,
                }
            }
            RowInner::Exact { t, mu, pairs } => {
                let p = BigInt::from(mu.numer());
                let q = BigInt::from(mu.denom());
                let tn = t + 1;
                let n = (tn + 1) as usize;
                let mut next = vec![(BigInt::zero(), BigInt::zero()); n];
                for (i, slot) in next.iter_mut().enumerate() {
                    if i < pairs.len() {
                        let (d1, d2) = &pairs[i];
                        slot.0 = &q * d1 + &p * d2;
                    }
                    if i >= 1 && i - 1 < pairs.len() {
                        let (d1, d2) = &pairs[i - 1];
                        slot.1 = &q * d2 - &p * d1;
                    }
                }
                RowInner::Exact {
                    t: tn,
                    mu: mu.clone(),
                    pairs: next,
                }
            }
        };
        Ok(AmplitudeRow { inner })
    }

    /// Evolves the initial slice up to time t.
    pub fn evolve_to(params: &LatticeParams, t: i64) -> Result<AmplitudeRow> {
        params.check_t(t)?;
        let mut row = AmplitudeRow::initial(params);
        while row.t() < t {
            row = row.evolve(params)?;
        }
        Ok(row)
    }

    fn index_of(&self, x: i64) -> Option<usize> {
        let t = self.t();
        if x.abs() > t || (x + t) % 2 != 0 {
            None
        } else {
            Some(((x + t) / 2) as usize)
        }
    }

    /// Amplitude at x; zero off the slice support.
    pub fn amplitude_at(&self, x: i64) -> Amplitude {
        match (&self.inner, self.index_of(x)) {
            (_, None) => Amplitude::ZERO,
            (RowInner::Float { pairs, .. }, Some(i)) => Amplitude {
                a1: pairs[i].0,
                a2: pairs[i].1,
            },
            (RowInner::Exact { t, mu, pairs }, Some(i)) => {
                let k = (*t - 1) as u32;
                Amplitude {
                    a1: scaled_to_f64(&pairs[i].0, mu.base(), k),
                    a2: scaled_to_f64(&pairs[i].1, mu.base(), k),
                }
            }
        }
    }

    /// Exact amplitude at x; `None` in float mode.
    pub fn exact_at(&self, x: i64) -> Option<ExactAmplitude> {
        match &self.inner {
            RowInner::Float { .. } => None,
            RowInner::Exact { t, mu, pairs } => {
                let k = (*t - 1) as u32;
                Some(match self.index_of(x) {
                    None => ExactAmplitude::zero(mu.base(), k),
                    Some(i) => ExactAmplitude {
                        d1: pairs[i].0.clone(),
                        d2: pairs[i].1.clone(),
                        base: mu.base(),
                        half_exp: k,
                    },
                })
            }
        }
    }

    pub fn probability_at(&self, x: i64) -> f64 {
        match &self.inner {
            RowInner::Float { .. } => self.amplitude_at(x).probability(),
            RowInner::Exact { .. } => self.exact_at(x).expect("exact row").probability_f64(),
        }
    }

    /// Sum of probabilities over the slice; 1 up to rounding.
    pub fn probability_sum(&self) -> f64 {
        match &self.inner {
            RowInner::Float { pairs, .. } => pairs.iter().map(|(a1, a2)| a1 * a1 + a2 * a2).sum(),
            RowInner::Exact { t, mu, pairs } => {
                let sum: BigInt = pairs.iter().map(|(d1, d2)| d1 * d1 + d2 * d2).sum();
                big_ratio_to_f64(&sum, &pow_big(mu.base(), (*t - 1) as u32))
            }
        }
    }

    /// Exact probability sum; `None` in float mode. Equals 1 exactly.
    pub fn probability_sum_exact(&self) -> Option<BigRational> {
        match &self.inner {
            RowInner::Float { .. } => None,
            RowInner::Exact { t, mu, pairs } => {
                let sum: BigInt = pairs.iter().map(|(d1, d2)| d1 * d1 + d2 * d2).sum();
                Some(BigRational::new(sum, pow_big(mu.base(), (*t - 1) as u32)))
            }
        }
    }

    /// (sum a1^2, sum a2^2, sum a1 a2) over the slice.
    pub fn component_sums(&self) -> (f64, f64, f64) {
        match &self.inner {
            RowInner::Float { pairs, .. } => pairs.iter().fold((0.0, 0.0, 0.0), |acc, (a1, a2)| {
                (acc.0 + a1 * a1, acc.1 + a2 * a2, acc.2 + a1 * a2)
            }),
            RowInner::Exact { t, mu, .. } => {
                let (s1, s2, s12) = self.exact_component_sums().expect("exact row");
                let den = pow_big(mu.base(), (*t - 1) as u32);
                (
                    big_ratio_to_f64(&s1, &den),
                    big_ratio_to_f64(&s2, &den),
                    big_ratio_to_f64(&s12, &den),
                )
            }
        }
    }

    /// (sum d1^2, sum d2^2, sum d1 d2) of the scaled integer pairs.
    pub(crate) fn exact_component_sums(&self) -> Option<(BigInt, BigInt, BigInt)> {
        match &self.inner {
            RowInner::Float { .. } => None,
            RowInner::Exact { pairs, .. } => {
                let mut s1 = BigInt::zero();
                let mut s2 = BigInt::zero();
                let mut s12 = BigInt::zero();
                for (d1, d2) in pairs {
                    s1 += d1 * d1;
                    s2 += d2 * d2;
                    s12 += d1 * d2;
                }
                Some((s1, s2, s12))
            }
        }
    }

    /// Scaled integer pair at x (zeros off support); `None` in float mode.
    pub(crate) fn exact_d_at(&self, x: i64) -> Option<(BigInt, BigInt)> {
        match &self.inner {
            RowInner::Float { .. } => None,
            RowInner::Exact { pairs, .. } => Some(match self.index_of(x) {
                None => (BigInt::zero(), BigInt::zero()),
                Some(i) => pairs[i].clone(),
            }),
        }
    }

    /// Support points of the slice, left to right.
    pub fn support(&self) -> impl Iterator<Item = i64> {
        let t = self.t();
        (0..=t).map(move |i| -t + 2 * i)
    }
}

/// Amplitude at (x, t) by slice evolution. O(t^2).
pub fn amplitude(x: i64, t: i64, params: &LatticeParams) -> Result<Amplitude> {
    params.check_t(t)?;
    if off_support(x, t) {
        return Ok(Amplitude::ZERO);
    }
    Ok(AmplitudeRow::evolve_to(params, t)?.amplitude_at(x))
}

/// Exact amplitude at (x, t); params must be in exact mode.
pub fn amplitude_exact(x: i64, t: i64, params: &LatticeParams) -> Result<ExactAmplitude> {
    params.check_t(t)?;
    let mu = params.exact_mu().ok_or(Error::ModeMismatch)?;
    if off_support(x, t) {
        return Ok(ExactAmplitude::zero(mu.base(), (t - 1) as u32));
    }
    Ok(AmplitudeRow::evolve_to(params, t)?
        .exact_at(x)
        .expect("exact row"))
}

/// P(x, t) = a1^2 + a2^2.
pub fn probability(x: i64, t: i64, params: &LatticeParams) -> Result<f64> {
    params.check_t(t)?;
    if off_support(x, t) {
        return Ok(0.0);
    }
    Ok(AmplitudeRow::evolve_to(params, t)?.probability_at(x))
}

/// P(x, t) as an exact rational; params must be in exact mode.
pub fn probability_exact(x: i64, t: i64, params: &LatticeParams) -> Result<BigRational> {
    Ok(amplitude_exact(x, t, params)?.probability())
}

fn off_support(x: i64, t: i64) -> bool {
    x.abs() > t || (x + t) % 2 != 0
}

/// One move of a checker path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    UpRight,
    UpLeft,
}

/// A checker path from the origin: moves (+-1, +1), the first move fixed
/// to (+1, +1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckerPath {
    moves: Vec<Move>,
}

impl CheckerPath {
    /// Path consisting of the fixed first move followed by `free`.
    pub fn new(free: &[Move]) -> CheckerPath {
        let mut moves = Vec::with_capacity(free.len() + 1);
        moves.push(Move::UpRight);
        moves.extend_from_slice(free);
        CheckerPath { moves }
    }

    pub fn t(&self) -> i64 {
        self.moves.len() as i64
    }

    pub fn endpoint(&self) -> (i64, i64) {
        let lefts = self.moves.iter().filter(|m| **m == Move::UpLeft).count() as i64;
        (self.t() - 2 * lefts, self.t())
    }

    /// Number of interior vertices where the move direction changes.
    /// Always <= t - 1.
    pub fn turns(&self) -> usize {
        self.moves.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// All 2^{t-1} paths of duration t.
    pub fn enumerate(t: i64) -> Result<Vec<CheckerPath>> {
        check_brute_force_t(t)?;
        let free = (t - 1) as u32;
        let mut out = Vec::with_capacity(1 << free);
        for mask in 0u32..(1u32 << free) {
            let moves: Vec<Move> = (0..free)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        Move::UpLeft
                    } else {
                        Move::UpRight
                    }
                })
                .collect();
            out.push(CheckerPath::new(&moves));
        }
        Ok(out)
    }
}

fn check_brute_force_t(t: i64) -> Result<()> {
    if t < 1 {
        return Err(Error::TimeOutOfRange { t });
    }
    if t > BRUTE_FORCE_T_CAP {
        return Err(Error::ResourceExceeded {
            what: "path enumeration",
            t,
            cap: BRUTE_FORCE_T_CAP,
        });
    }
    Ok(())
}

/// Path counts to (x, t), grouped by turn number (index = turns).
fn turn_tally(x: i64, t: i64) -> Vec<u64> {
    let free = (t - 1) as u32;
    let pair_mask = (1u64 << free) - 1;
    let mut tally = vec![0u64; t as usize];
    for mask in 0u64..(1u64 << free) {
        if t - 2 * (mask.count_ones() as i64) != x {
            continue;
        }
        // Bit i of seq is move i+1; bit 0 is the fixed first move (right).
        let seq = mask << 1;
        let turns = ((seq ^ (seq >> 1)) & pair_mask).count_ones() as usize;
        tally[turns] += 1;
    }
    tally
}

/// Amplitude at (x, t) by explicit path enumeration: each path contributes
/// i * (-i mu)^turns times the overall (1 + mu^2)^{(1-t)/2} normalization.
/// Exponential in t; the evolution oracle for small slices.
pub fn amplitude_bruteforce(x: i64, t: i64, params: &LatticeParams) -> Result<Amplitude> {
    check_brute_force_t(t)?;
    if off_support(x, t) {
        return Ok(Amplitude::ZERO);
    }
    if let Some(mu) = params.exact_mu() {
        let (d1, d2) = bruteforce_scaled(x, t, mu);
        let k = (t - 1) as u32;
        return Ok(Amplitude {
            a1: scaled_to_f64(&d1, mu.base(), k),
            a2: scaled_to_f64(&d2, mu.base(), k),
        });
    }
    let mu = params.mu();
    let tally = turn_tally(x, t);
    let mut a1 = 0.0;
    let mut a2 = 0.0;
    for (turns, count) in tally.iter().enumerate() {
        if *count == 0 {
            continue;
        }
        let w = *count as f64 * mu.powi(turns as i32);
        // i * (-i)^turns cycles (0,1), (1,0), (0,-1), (-1,0).
        match turns % 4 {
            0 => a2 += w,
            1 => a1 += w,
            2 => a2 -= w,
            _ => a1 -= w,
        }
    }
    let norm = (1.0 + mu * mu).powf(0.5 * (1.0 - t as f64));
    Ok(Amplitude {
        a1: a1 * norm,
        a2: a2 * norm,
    })
}

/// Exact path-sum amplitude; params must be in exact mode. Produces the
/// same scaled integers as slice evolution, bit for bit.
pub fn amplitude_bruteforce_exact(
    x: i64,
    t: i64,
    params: &LatticeParams,
) -> Result<ExactAmplitude> {
    check_brute_force_t(t)?;
    let mu = params.exact_mu().ok_or(Error::ModeMismatch)?;
    let k = (t - 1) as u32;
    if off_support(x, t) {
        return Ok(ExactAmplitude::zero(mu.base(), k));
    }
    let (d1, d2) = bruteforce_scaled(x, t, mu);
    Ok(ExactAmplitude {
        d1,
        d2,
        base: mu.base(),
        half_exp: k,
    })
}

fn bruteforce_scaled(x: i64, t: i64, mu: &ExactMu) -> (BigInt, BigInt) {
    let tally = turn_tally(x, t);
    let p = BigInt::from(mu.numer());
    let q = BigInt::from(mu.denom());
    let mut d1 = BigInt::zero();
    let mut d2 = BigInt::zero();
    for (turns, count) in tally.iter().enumerate() {
        if *count == 0 {
            continue;
        }
        let w = BigInt::from(*count) * p.pow(turns as u32) * q.pow((t as u32 - 1) - turns as u32);
        match turns % 4 {
            0 => d2 += w,
            1 => d1 += w,
            2 => d2 -= w,
            _ => d1 -= w,
        }
    }
    (d1, d2)
}

/// Cached Pascal triangle.
pub(crate) struct BinomTable {
    rows: Vec<Vec<BigInt>>,
}

impl BinomTable {
    pub(crate) fn new(n_max: usize) -> BinomTable {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut row = vec![BigInt::from(1); n + 1];
            for r in 1..n {
                row[r] = &rows[n - 1][r - 1] + &rows[n - 1][r];
            }
            rows.push(row);
        }
        BinomTable { rows }
    }

    fn get(&self, n: usize, r: usize) -> &BigInt {
        &self.rows[n][r]
    }
}

/// Interior closed form for the scaled pair at (x, t), t > |x|:
///   d1 = sum_r (-1)^r C(A, r) C(B, r)   p^{2r+1} q^{t-2-2r}
///   d2 = sum_r (-1)^r C(A, r) C(B, r-1) p^{2r}   q^{t-1-2r}
/// with A = (x+t-2)/2, B = (t-x-2)/2.
fn explicit_scaled(table: &BinomTable, x: i64, t: i64, mu: &ExactMu) -> (BigInt, BigInt) {
    let a = ((x + t - 2) / 2) as usize;
    let b = ((t - x - 2) / 2) as usize;
    let p = BigInt::from(mu.numer());
    let q = BigInt::from(mu.denom());
    let mut d1 = BigInt::zero();
    for r in 0..=a.min(b) {
        let term = table.get(a, r)
            * table.get(b, r)
            * p.pow(2 * r as u32 + 1)
            * q.pow(t as u32 - 2 - 2 * r as u32);
        if r % 2 == 0 {
            d1 += term;
        } else {
            d1 -= term;
        }
    }
    let mut d2 = BigInt::zero();
    for r in 1..=a.min(b + 1) {
        let term = table.get(a, r)
            * table.get(b, r - 1)
            * p.pow(2 * r as u32)
            * q.pow(t as u32 - 1 - 2 * r as u32);
        if r % 2 == 0 {
            d2 += term;
        } else {
            d2 -= term;
        }
    }
    (d1, d2)
}

pub(crate) fn amplitude_explicit_exact_with(
    table: &BinomTable,
    x: i64,
    t: i64,
    mu: &ExactMu,
) -> ExactAmplitude {
    let k = (t - 1) as u32;
    if off_support(x, t) || x == -t {
        return ExactAmplitude::zero(mu.base(), k);
    }
    if x == t {
        // The single turn-free path.
        return ExactAmplitude {
            d1: BigInt::zero(),
            d2: pow_big(mu.denom(), k),
            base: mu.base(),
            half_exp: k,
        };
    }
    let (d1, d2) = explicit_scaled(table, x, t, mu);
    ExactAmplitude {
        d1,
        d2,
        base: mu.base(),
        half_exp: k,
    }
}

/// Amplitude at (x, t) from the closed-form slice formula, O(t) per point.
/// Off the interior t > |x| it returns the boundary values directly.
pub fn amplitude_explicit(x: i64, t: i64, params: &LatticeParams) -> Result<Amplitude> {
    if t < 1 {
        return Err(Error::TimeOutOfRange { t });
    }
    if let Some(mu) = params.exact_mu() {
        let table = BinomTable::new(if t > x.abs() {
            ((t + x.abs()) / 2) as usize
        } else {
            0
        });
        let exact = amplitude_explicit_exact_with(&table, x, t, mu);
        let (a1, a2) = exact.to_f64_pair();
        return Ok(Amplitude { a1, a2 });
    }
    let mu = params.mu();
    if off_support(x, t) || x == -t {
        return Ok(Amplitude::ZERO);
    }
    let norm = (1.0 + mu * mu).powf(0.5 * (1.0 - t as f64));
    if x == t {
        return Ok(Amplitude { a1: 0.0, a2: norm });
    }
    let a = ((x + t - 2) / 2) as f64;
    let b = ((t - x - 2) / 2) as f64;
    // Alternating sums with term ratios; avoids overflowing binomials.
    let r_max = a.min(b) as usize;
    let mut term = mu;
    let mut a1 = term;
    for r in 0..r_max {
        let rf = r as f64;
        term *= -mu * mu * (a - rf) * (b - rf) / ((rf + 1.0) * (rf + 1.0));
        a1 += term;
    }
    let mut a2 = 0.0;
    let r_max = (a.min(b + 1.0)) as usize;
    if r_max >= 1 {
        let mut term = -a * mu * mu;
        a2 = term;
        for r in 1..r_max {
            let rf = r as f64;
            term *= -mu * mu * (a - rf) * (b - rf + 1.0) / ((rf + 1.0) * rf);
            a2 += term;
        }
    }
    Ok(Amplitude {
        a1: a1 * norm,
        a2: a2 * norm,
    })
}

/// Exact closed-form amplitude; params must be in exact mode.
pub fn amplitude_explicit_exact(x: i64, t: i64, params: &LatticeParams) -> Result<ExactAmplitude> {
    if t < 1 {
        return Err(Error::TimeOutOfRange { t });
    }
    let mu = params.exact_mu().ok_or(Error::ModeMismatch)?;
    let table = BinomTable::new(if t > x.abs() {
        ((t + x.abs()) / 2) as usize
    } else {
        0
    });
    Ok(amplitude_explicit_exact_with(&table, x, t, mu))
}

/// The whole time-t slice from the closed form, sharing one binomial table
/// across sites. Params must be in exact mode.
pub fn explicit_slice_exact(t: i64, params: &LatticeParams) -> Result<AmplitudeRow> {
    if t < 1 {
        return Err(Error::TimeOutOfRange { t });
    }
    let mu = params.exact_mu().ok_or(Error::ModeMismatch)?.clone();
    let table = BinomTable::new(t as usize);
    let mut pairs = Vec::with_capacity((t + 1) as usize);
    for i in 0..=t {
        let x = -t + 2 * i;
        let e = amplitude_explicit_exact_with(&table, x, t, &mu);
        pairs.push((e.d1, e.d2));
    }
    Ok(AmplitudeRow {
        inner: RowInner::Exact { t, mu, pairs },
    })
}

/// Rebuilds the time-t slice from the time-t_prime slice:
///   a1(x, t) = sum_y [ a2(y, t') a1(x-y+1, s) + a1(y, t') a2(y-x+1, s) ]
///   a2(x, t) = sum_y [ a2(y, t') a2(x-y+1, s) - a1(y, t') a1(y-x+1, s) ]
/// with s = t - t' + 1. Equals direct evolution to t.
pub fn huygens_compose(t_prime: i64, t: i64, params: &LatticeParams) -> Result<AmplitudeRow> {
    if t_prime < 1 {
        return Err(Error::TimeOutOfRange { t: t_prime });
    }
    if t <= t_prime {
        return Err(Error::InvalidParameter(format!(
            "huygens composition needs t > t_prime, got t={t}, t_prime={t_prime}"
        )));
    }
    params.check_t(t)?;
    let first = AmplitudeRow::evolve_to(params, t_prime)?;
    let second = AmplitudeRow::evolve_to(params, t - t_prime + 1)?;
    let inner = match (&first.inner, &second.inner) {
        (RowInner::Float { .. }, RowInner::Float { .. }) => {
            let mut pairs = vec![(0.0, 0.0); (t + 1) as usize];
            for (i, slot) in pairs.iter_mut().enumerate() {
                let x = -t + 2 * i as i64;
                for y in first.support() {
                    let fy = first.amplitude_at(y);
                    let fwd = second.amplitude_at(x - y + 1);
                    let bwd = second.amplitude_at(y - x + 1);
                    slot.0 += fy.a2 * fwd.a1 + fy.a1 * bwd.a2;
                    slot.1 += fy.a2 * fwd.a2 - fy.a1 * bwd.a1;
                }
            }
            RowInner::Float {
                t,
                mu: params.mu(),
                pairs,
            }
        }
        (RowInner::Exact { mu, .. }, RowInner::Exact { .. }) => {
            // Scale exponents add: (t'-1) + (s-1) = t - 1.
            let mut pairs = vec![(BigInt::zero(), BigInt::zero()); (t + 1) as usize];
            for (i, slot) in pairs.iter_mut().enumerate() {
                let x = -t + 2 * i as i64;
                for y in first.support() {
                    let (f1, f2) = first.exact_d_at(y).expect("exact row");
                    let (g1, g2) = second.exact_d_at(x - y + 1).expect("exact row");
                    let (h1, h2) = second.exact_d_at(y - x + 1).expect("exact row");
                    slot.0 += &f2 * &g1 + &f1 * &h2;
                    slot.1 += &f2 * &g2 - &f1 * &h1;
                }
            }
            RowInner::Exact {
                t,
                mu: mu.clone(),
                pairs,
            }
        }
        _ => unreachable!("both rows come from the same params"),
    };
    Ok(AmplitudeRow { inner })
}

/// Residuals of the three mirror identities on the time-t slice:
///   a1(x, t) = a1(-x, t)
///   (t - x) a2(x, t) = (t + x - 2) a2(2 - x, t)
///   a1(x, t) + mu a2(x, t) = a1(2 - x, t) + mu a2(2 - x, t)
#[derive(Debug, Clone)]
pub struct SymmetryReport {
    pub t: i64,
    /// max |a1(x) - a1(-x)|
    pub max_mirror: f64,
    /// max |(t - x) a2(x) - (t + x - 2) a2(2 - x)|
    pub max_weighted_mirror: f64,
    /// max |a1(x) + mu a2(x) - a1(2-x) - mu a2(2-x)|
    pub max_mixed_mirror: f64,
    /// True when every residual is an exact zero.
    pub exact: bool,
}

impl SymmetryReport {
    pub fn max_violation(&self) -> f64 {
        self.max_mirror
            .max(self.max_weighted_mirror)
            .max(self.max_mixed_mirror)
    }
}

/// Checks the mirror identities on slice t, over x in [-t-2, t+2].
pub fn check_symmetry(t: i64, params: &LatticeParams) -> Result<SymmetryReport> {
    let row = AmplitudeRow::evolve_to(params, t)?;
    let mut report = SymmetryReport {
        t,
        max_mirror: 0.0,
        max_weighted_mirror: 0.0,
        max_mixed_mirror: 0.0,
        exact: row.is_exact(),
    };
    match &row.inner {
        RowInner::Float { mu, .. } => {
            for x in -t - 2..=t + 2 {
                let here = row.amplitude_at(x);
                let mirrored = row.amplitude_at(-x);
                let shifted = row.amplitude_at(2 - x);
                let v1 = (here.a1 - mirrored.a1).abs();
                let v2 = ((t - x) as f64 * here.a2 - (t + x - 2) as f64 * shifted.a2).abs();
                let v3 = (here.a1 + mu * here.a2 - shifted.a1 - mu * shifted.a2).abs();
                report.max_mirror = report.max_mirror.max(v1);
                report.max_weighted_mirror = report.max_weighted_mirror.max(v2);
                report.max_mixed_mirror = report.max_mixed_mirror.max(v3);
            }
        }
        RowInner::Exact { mu, .. } => {
            let p = BigInt::from(mu.numer());
            let q = BigInt::from(mu.denom());
            let k = (t - 1) as u32;
            for x in -t - 2..=t + 2 {
                let (h1, h2) = row.exact_d_at(x).expect("exact row");
                let (m1, _) = row.exact_d_at(-x).expect("exact row");
                let (s1, s2) = row.exact_d_at(2 - x).expect("exact row");
                let r1 = &h1 - &m1;
                let r2 = BigInt::from(t - x) * &h2 - BigInt::from(t + x - 2) * &s2;
                // Identity 3 multiplied through by q to stay integral.
                let r3 = &q * (&h1 - &s1) + &p * (&h2 - &s2);
                if !r1.is_zero() || !r2.is_zero() || !r3.is_zero() {
                    report.exact = false;
                }
                report.max_mirror = report
                    .max_mirror
                    .max(scaled_to_f64(&r1, mu.base(), k).abs());
                report.max_weighted_mirror = report
                    .max_weighted_mirror
                    .max(scaled_to_f64(&r2, mu.base(), k).abs());
                report.max_mixed_mirror = report
                    .max_mixed_mirror
                    .max(scaled_to_f64(&r3, mu.base(), k).abs());
            }
        }
    }
    Ok(report)
}
