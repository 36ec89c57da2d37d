//! Evolution in an external edge field. Each lattice edge carries a sign
//! u = ±1; a path's vector picks up the product of the signs it traverses,
//! so the slice update becomes
//!   a1(x, t+1, u) = u(x+1/2, t+1/2) (a1 + a2)(x+1, t, u) / sqrt(2)
//!   a2(x, t+1, u) = u(x-1/2, t+1/2) (a2 - a1)(x-1, t, u) / sqrt(2)
//! with the mass fixed at 1. The homogeneous magnetic field (sign -1 exactly
//! when both midpoint offsets sit at even lattice coordinates) produces the
//! diamond equalities checked by `diamond_check`, and the coarse sublattice
//! b(x, t) = a(2x-1, 2t-1, u) evolves by an autonomous two-term recurrence.
//!
//! Exact rows store the integer pairs c = 2^{(t-1)/2} a(x, t, u); every
//! identity in this module is then an integer equality.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::scaled_to_f64;
use crate::lattice::{Amplitude, DEFAULT_T_CAP};

/// Sign of the homogeneous magnetic field on the edge with midpoint
/// (x + 1/2, t + 1/2): -1 iff x and t are both even, equivalently
/// (-1)^((x-1)(t-1)).
pub fn homogeneous_sign(x: i64, t: i64) -> i8 {
    if x % 2 == 0 && t % 2 == 0 {
        -1
    } else {
        1
    }
}

/// A sparse edge-sign assignment keyed by doubled midpoint coordinates:
/// the edge with midpoint (1/2, 3/2) is keyed (1, 3). A map may carry a
/// default for unlisted edges; without one, reading an unlisted edge is an
/// error.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdgeMap {
    signs: HashMap<(i64, i64), i8>,
    default: Option<i8>,
}

fn check_sign(sign: i8) -> Result<()> {
    if sign == 1 || sign == -1 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "edge signs must be +1 or -1, got {sign}"
        )))
    }
}

fn check_midpoint(x2: i64, t2: i64) -> Result<()> {
    if x2 % 2 == 0 || t2 % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "edge midpoints have half-integer coordinates; doubled \
             coordinates ({x2}, {t2}) must both be odd"
        )));
    }
    Ok(())
}

impl EdgeMap {
    /// An empty strict map: every edge must be set explicitly.
    pub fn new() -> EdgeMap {
        EdgeMap {
            signs: HashMap::new(),
            default: None,
        }
    }

    /// An empty map where unlisted edges read as `sign`.
    pub fn with_default(sign: i8) -> Result<EdgeMap> {
        check_sign(sign)?;
        Ok(EdgeMap {
            signs: HashMap::new(),
            default: Some(sign),
        })
    }

    /// Sets the sign on the edge keyed by doubled midpoint coordinates.
    pub fn set(&mut self, x2: i64, t2: i64, sign: i8) -> Result<()> {
        check_midpoint(x2, t2)?;
        check_sign(sign)?;
        self.signs.insert((x2, t2), sign);
        Ok(())
    }

    /// Reads the sign at doubled midpoint coordinates.
    pub fn sign_at(&self, x2: i64, t2: i64) -> Result<i8> {
        match self.signs.get(&(x2, t2)).copied().or(self.default) {
            Some(s) => Ok(s),
            None => Err(Error::MissingEdge { x2, t2 }),
        }
    }

    /// Negates the sign of one edge; the edge must resolve to a value.
    pub fn flip(&mut self, x2: i64, t2: i64) -> Result<()> {
        check_midpoint(x2, t2)?;
        let s = self.sign_at(x2, t2)?;
        self.signs.insert((x2, t2), -s);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// Parses the text format: one edge per line as
    /// `x_half t_half sign`, e.g. `0.5 1.5 -1`, with half-integer
    /// coordinates. `#` starts a comment; blank lines are skipped.
    /// Unlisted edges default to +1.
    pub fn from_reader(reader: impl BufRead) -> Result<EdgeMap> {
        let mut map = EdgeMap::with_default(1)?;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::FieldFile {
                    line: lineno,
                    message: format!("expected `x_half t_half sign`, got {} fields", fields.len()),
                });
            }
            let x2 = parse_half(fields[0], lineno)?;
            let t2 = parse_half(fields[1], lineno)?;
            let sign: i8 = fields[2].parse().map_err(|_| Error::FieldFile {
                line: lineno,
                message: format!("sign must be +1 or -1, got `{}`", fields[2]),
            })?;
            map.set(x2, t2, sign).map_err(|e| Error::FieldFile {
                line: lineno,
                message: e.to_string(),
            })?;
        }
        Ok(map)
    }

    /// Loads the text format from a file.
    pub fn from_file(path: impl AsRef<Path>) -> Result<EdgeMap> {
        EdgeMap::from_reader(BufReader::new(File::open(path)?))
    }
}

/// Parses a half-integer coordinate ("0.5", "-1.5") to its doubled value.
fn parse_half(s: &str, line: usize) -> Result<i64> {
    let bad = || Error::FieldFile {
        line,
        message: format!("coordinate `{s}` is not a half-integer"),
    };
    let v: f64 = s.parse().map_err(|_| bad())?;
    let doubled = v * 2.0;
    if !v.is_finite() || doubled.fract() != 0.0 || doubled.abs() > 1e15 {
        return Err(bad());
    }
    let d = doubled as i64;
    if d % 2 == 0 {
        return Err(bad());
    }
    Ok(d)
}

/// An edge-sign assignment u.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeField {
    /// u identically +1; reproduces the free evolution at mass 1.
    Identity,
    /// The homogeneous magnetic field, see `homogeneous_sign`.
    HomogeneousMagnetic,
    /// An explicit assignment.
    Custom(EdgeMap),
}

impl EdgeField {
    /// Sign at doubled midpoint coordinates (both odd).
    pub fn sign(&self, x2: i64, t2: i64) -> Result<i8> {
        check_midpoint(x2, t2)?;
        match self {
            EdgeField::Identity => Ok(1),
            EdgeField::HomogeneousMagnetic => Ok(homogeneous_sign((x2 - 1) / 2, (t2 - 1) / 2)),
            EdgeField::Custom(map) => map.sign_at(x2, t2),
        }
    }
}

/// Materializes `u` as a strict explicit map covering every edge read when
/// evolving from t = 1 to t_max.
pub fn materialize_field(u: &EdgeField, t_max: i64) -> Result<EdgeMap> {
    if t_max < 1 {
        return Err(Error::TimeOutOfRange { t: t_max });
    }
    let mut map = EdgeMap::new();
    for t in 1..t_max {
        for x in -t - 1..=t + 1 {
            let (x2, t2) = (2 * x + 1, 2 * t + 1);
            map.set(x2, t2, u.sign(x2, t2)?)?;
        }
    }
    Ok(map)
}

/// Negates u on the four edges around the vertex (x0, t0). Every path
/// through the vertex crosses exactly two of them, so all probabilities
/// and all later amplitudes are unchanged.
pub fn flip_around_vertex(map: &mut EdgeMap, x0: i64, t0: i64) -> Result<()> {
    if t0 < 2 || (x0 + t0) % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "vertex ({x0}, {t0}) must have x0 + t0 even and t0 >= 2"
        )));
    }
    for (dx, dt) in [(-1, -1), (1, -1), (-1, 1), (1, 1)] {
        map.flip(2 * x0 + dx, 2 * t0 + dt)?;
    }
    Ok(())
}

/// Arithmetic representation for field rows; the mass is fixed at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldMode {
    Float,
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
enum FieldInner {
    Float {
        t: i64,
        pairs: Vec<(f64, f64)>,
    },
    Exact {
        t: i64,
        pairs: Vec<(BigInt, BigInt)>,
    },
}

/// One time slice of the field evolution, dense over x in [-t, t] with
/// stride 2. Exact rows hold c(x, t) = 2^{(t-1)/2} a(x, t, u).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRow {
    inner: FieldInner,
}

impl FieldRow {
    /// The t = 1 slice: a(1, 1, u) = (0, 1), zero elsewhere. The fixed
    /// first move carries no edge sign.
    pub fn initial(mode: FieldMode) -> FieldRow {
        let inner = match mode {
            FieldMode::Float => FieldInner::Float {
                t: 1,
                pairs: vec![(0.0, 0.0), (0.0, 1.0)],
            },
            FieldMode::Exact => FieldInner::Exact {
                t: 1,
                pairs: vec![
                    (BigInt::zero(), BigInt::zero()),
                    (BigInt::zero(), BigInt::from(1)),
                ],
            },
        };
        FieldRow { inner }
    }

    pub fn t(&self) -> i64 {
        match &self.inner {
            FieldInner::Float { t, .. } | FieldInner::Exact { t, .. } => *t,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.inner, FieldInner::Exact { .. })
    }

    /// The slice at t + 1 under the field `u`. Only edges whose source
    /// cell lies on the current support are read, so a strict map must
    /// cover exactly the evolution cone.
    pub fn evolve(&self, u: &EdgeField) -> Result<FieldRow> {
        let t = self.t();
        if t + 1 > DEFAULT_T_CAP {
            return Err(Error::ResourceExceeded {
                what: "field evolution",
                t: t + 1,
                cap: DEFAULT_T_CAP,
            });
        }
        let tn = t + 1;
        let n = (tn + 1) as usize;
        let t2 = 2 * t + 1;
        let inner = match &self.inner {
            FieldInner::Float { pairs, .. } => {
                let inv = std::f64::consts::FRAC_1_SQRT_2;
                let mut next = vec![(0.0, 0.0); n];
                for (i, slot) in next.iter_mut().enumerate() {
                    let x = -tn + 2 * i as i64;
                    // Source x+1 is old index i, source x-1 is old i-1.
                    if i < pairs.len() {
                        let s = u.sign(2 * x + 1, t2)? as f64;
                        let (a1, a2) = pairs[i];
                        slot.0 = s * inv * (a1 + a2);
                    }
                    if i >= 1 && i - 1 < pairs.len() {
                        let s = u.sign(2 * x - 1, t2)? as f64;
                        let (a1, a2) = pairs[i - 1];
                        slot.1 = s * inv * (a2 - a1);
                    }
                }
                FieldInner::Float { t: tn, pairs: next }
            }
            FieldInner::Exact { pairs, .. } => {
                let mut next = vec![(BigInt::zero(), BigInt::zero()); n];
                for (i, slot) in next.iter_mut().enumerate() {
                    let x = -tn + 2 * i as i64;
                    if i < pairs.len() {
                        let s = u.sign(2 * x + 1, t2)?;
                        let (c1, c2) = &pairs[i];
                        let v = c1 + c2;
                        slot.0 = if s < 0 { -v } else { v };
                    }
                    if i >= 1 && i - 1 < pairs.len() {
                        let s = u.sign(2 * x - 1, t2)?;
                        let (c1, c2) = &pairs[i - 1];
                        let v = c2 - c1;
                        slot.1 = if s < 0 { -v } else { v };
                    }
                }
                FieldInner::Exact { t: tn, pairs: next }
            }
        };
        Ok(FieldRow { inner })
    }

    /// Evolves the initial slice up to time t.
    pub fn evolve_to(mode: FieldMode, t: i64, u: &EdgeField) -> Result<FieldRow> {
        if t < 1 {
            return Err(Error::TimeOutOfRange { t });
        }
        let mut row = FieldRow::initial(mode);
        while row.t() < t {
            row = row.evolve(u)?;
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
            (FieldInner::Float { pairs, .. }, Some(i)) => Amplitude {
                a1: pairs[i].0,
                a2: pairs[i].1,
            },
            (FieldInner::Exact { t, pairs }, Some(i)) => {
                let k = (*t - 1) as u32;
                Amplitude {
                    a1: scaled_to_f64(&pairs[i].0, 2, k),
                    a2: scaled_to_f64(&pairs[i].1, 2, k),
                }
            }
        }
    }

    /// Scaled integer pair c(x, t) for exact rows; zero off support.
    pub fn exact_c_at(&self, x: i64) -> Option<(BigInt, BigInt)> {
        match &self.inner {
            FieldInner::Float { .. } => None,
            FieldInner::Exact { pairs, .. } => Some(match self.index_of(x) {
                Some(i) => pairs[i].clone(),
                None => (BigInt::zero(), BigInt::zero()),
            }),
        }
    }

    pub fn probability_at(&self, x: i64) -> f64 {
        self.amplitude_at(x).probability()
    }

    /// (sum a1^2, sum a2^2) over the slice.
    pub fn component_sums(&self) -> (f64, f64) {
        match &self.inner {
            FieldInner::Float { pairs, .. } => pairs.iter().fold((0.0, 0.0), |acc, (a1, a2)| {
                (acc.0 + a1 * a1, acc.1 + a2 * a2)
            }),
            FieldInner::Exact { t, .. } => {
                let (c1sq, c2sq) = self.exact_component_sums().expect("exact row");
                let k = 2 * (*t - 1) as u32;
                (scaled_to_f64(&c1sq, 2, k), scaled_to_f64(&c2sq, 2, k))
            }
        }
    }

    pub fn probability_sum(&self) -> f64 {
        let (s1, s2) = self.component_sums();
        s1 + s2
    }

    /// (sum c1^2, sum c2^2); conservation says they add to 2^{t-1}.
    pub fn exact_component_sums(&self) -> Option<(BigInt, BigInt)> {
        match &self.inner {
            FieldInner::Float { .. } => None,
            FieldInner::Exact { pairs, .. } => {
                let mut s1 = BigInt::zero();
                let mut s2 = BigInt::zero();
                for (c1, c2) in pairs {
                    s1 += c1 * c1;
                    s2 += c2 * c2;
                }
                Some((s1, s2))
            }
        }
    }

    /// x values carried by this slice, in increasing order.
    pub fn support(&self) -> impl Iterator<Item = i64> {
        let t = self.t();
        (0..=t).map(move |i| -t + 2 * i)
    }
}

/// p_left(t) = sum_x a1(x, t, u)^2 for t = 1..t_max, index t-1.
pub fn p_left_field_series(t_max: i64, u: &EdgeField) -> Result<Vec<f64>> {
    if t_max < 1 {
        return Err(Error::TimeOutOfRange { t: t_max });
    }
    let mut out = Vec::with_capacity(t_max as usize);
    let mut row = FieldRow::initial(FieldMode::Float);
    loop {
        out.push(row.component_sums().0);
        if row.t() == t_max {
            break;
        }
        row = row.evolve(u)?;
    }
    Ok(out)
}

/// Conjectured limit of p_left on even times: sqrt(3)/3.
pub const P_LEFT_EVEN_LIMIT: f64 = 0.5773502691896257;
/// Conjectured limit of p_left on odd times: sqrt(3)/6.
pub const P_LEFT_ODD_LIMIT: f64 = 0.28867513459481287;
/// Conjectured limit of q_left: sqrt(3)/6.
pub const Q_LEFT_LIMIT: f64 = P_LEFT_ODD_LIMIT;

/// Whether (x, t) is a diamond center: (x, t) = (2, 1) or (0, 3) mod 4.
pub fn is_diamond_center(x: i64, t: i64) -> bool {
    matches!((x.rem_euclid(4), t.rem_euclid(4)), (2, 1) | (0, 3))
}

/// Residuals of the diamond equalities at one center, under the
/// homogeneous magnetic field.
#[derive(Debug, Clone)]
pub struct DiamondReport {
    pub x: i64,
    pub t: i64,
    /// The value all six chain members share.
    pub common_value: f64,
    /// Six deviations of the chain members from their mean, then
    /// |a2(x, t-1, u)|; all zero when the equalities hold.
    pub residuals: [f64; 7],
    /// Whether every equality held exactly in integer arithmetic.
    pub exact: bool,
}

impl DiamondReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0f64, |m, r| m.max(*r))
    }
}

/// Members of the diamond chain at (x, t), each scaled by 2^{t/2} so all
/// six are integers: [sqrt2 a1(x+1,t), a1(x,t-1), sqrt2 a1(x-1,t),
/// a1(x,t+1), sqrt2 a2(x+1,t), sqrt2 a2(x-1,t) - 2 a2(x,t+1)], plus the
/// scaled a2(x, t-1) that equality (2) says vanishes.
fn diamond_members(
    x: i64,
    prev: Option<&FieldRow>,
    curr: &FieldRow,
    next: &FieldRow,
) -> ([BigInt; 6], BigInt) {
    let at = |row: Option<&FieldRow>, x: i64| -> (BigInt, BigInt) {
        match row {
            Some(r) => r.exact_c_at(x).expect("exact row"),
            None => (BigInt::zero(), BigInt::zero()),
        }
    };
    let two = BigInt::from(2);
    let (p1, p2) = at(prev, x);
    let (r1, r2) = at(Some(curr), x + 1);
    let (l1, l2) = at(Some(curr), x - 1);
    let (n1, n2) = at(Some(next), x);
    let members = [
        &two * &r1,
        &two * &p1,
        &two * &l1,
        n1,
        &two * &r2,
        &two * &l2 - &two * &n2,
    ];
    (members, &two * &p2)
}

/// Checks the diamond equalities at one center (x, t); the field is the
/// homogeneous magnetic one. O(t^2); use `diamond_sweep` to scan a range.
pub fn diamond_check(x: i64, t: i64) -> Result<DiamondReport> {
    if t < 1 {
        return Err(Error::TimeOutOfRange { t });
    }
    if !is_diamond_center(x, t) {
        return Err(Error::CongruenceViolation { x, t });
    }
    let u = EdgeField::HomogeneousMagnetic;
    let mut prev = None;
    let mut curr = FieldRow::initial(FieldMode::Exact);
    while curr.t() < t {
        let n = curr.evolve(&u)?;
        prev = Some(curr);
        curr = n;
    }
    let next = curr.evolve(&u)?;
    Ok(report_from_members(
        x,
        t,
        diamond_members(x, prev.as_ref(), &curr, &next),
    ))
}

fn report_from_members(
    x: i64,
    t: i64,
    (members, vanishing): ([BigInt; 6], BigInt),
) -> DiamondReport {
    let exact = members.iter().all(|m| *m == members[0]) && vanishing == BigInt::zero();
    // Unscale by 2^{t/2} for the float readout.
    let k = t as u32;
    let floats: Vec<f64> = members.iter().map(|m| scaled_to_f64(m, 2, k)).collect();
    let mean = floats.iter().sum::<f64>() / 6.0;
    let mut residuals = [0.0; 7];
    if !exact {
        for (r, f) in residuals.iter_mut().zip(&floats) {
            *r = (f - mean).abs();
        }
        residuals[6] = scaled_to_f64(&vanishing, 2, k).abs();
    }
    let common_value = if exact { floats[0] } else { mean };
    DiamondReport {
        x,
        t,
        common_value,
        residuals,
        exact,
    }
}

/// Summary of diamond checks over every center with t <= t_max and
/// |x| <= t + 2.
#[derive(Debug, Clone)]
pub struct DiamondSweep {
    pub t_max: i64,
    pub checked: usize,
    pub all_exact: bool,
    pub max_residual: f64,
}

/// Scans all diamond centers up to t_max with one evolution pass.
pub fn diamond_sweep(t_max: i64) -> Result<DiamondSweep> {
    if t_max < 1 {
        return Err(Error::TimeOutOfRange { t: t_max });
    }
    let u = EdgeField::HomogeneousMagnetic;
    let mut sweep = DiamondSweep {
        t_max,
        checked: 0,
        all_exact: true,
        max_residual: 0.0,
    };
    let mut prev: Option<FieldRow> = None;
    let mut curr = FieldRow::initial(FieldMode::Exact);
    let mut next = curr.evolve(&u)?;
    loop {
        let t = curr.t();
        for x in -t - 2..=t + 2 {
            if !is_diamond_center(x, t) {
                continue;
            }
            let report = report_from_members(x, t, diamond_members(x, prev.as_ref(), &curr, &next));
            sweep.checked += 1;
            sweep.all_exact &= report.exact;
            sweep.max_residual = sweep.max_residual.max(report.max_residual());
        }
        if t == t_max {
            break;
        }
        let n = next.evolve(&u)?;
        prev = Some(std::mem::replace(&mut curr, next));
        next = n;
    }
    Ok(sweep)
}

#[derive(Debug, Clone, PartialEq)]
enum BInner {
    Float {
        t: i64,
        pairs: Vec<(f64, f64)>,
    },
    Exact {
        t: i64,
        pairs: Vec<(BigInt, BigInt)>,
    },
}

/// One slice of the coarse sublattice b(x, t) = a(2x-1, 2t-1, u) under the
/// homogeneous magnetic field, stored over its support x in [2-t, t] with
/// stride 2 (x + t even). Exact rows hold e(x, t) = 2^{t-1} b(x, t).
#[derive(Debug, Clone, PartialEq)]
pub struct BRow {
    inner: BInner,
}

impl BRow {
    /// The t = 1 slice: b(1, 1) = a(1, 1, u) = (0, 1).
    pub fn initial(mode: FieldMode) -> BRow {
        let inner = match mode {
            FieldMode::Float => BInner::Float {
                t: 1,
                pairs: vec![(0.0, 1.0)],
            },
            FieldMode::Exact => BInner::Exact {
                t: 1,
                pairs: vec![(BigInt::zero(), BigInt::from(1))],
            },
        };
        BRow { inner }
    }

    pub fn t(&self) -> i64 {
        match &self.inner {
            BInner::Float { t, .. } | BInner::Exact { t, .. } => *t,
        }
    }

    /// One step of the autonomous recurrence
    ///   b1(x, t) = [b1(x+1, t-1) + b2(x+1, t-1)] / 2
    ///   b2(x, t) = [3 b1(x-1, t-1) - b2(x-1, t-1)] / 2.
    pub fn evolve(&self) -> Result<BRow> {
        let t = self.t();
        if t + 1 > DEFAULT_T_CAP {
            return Err(Error::ResourceExceeded {
                what: "sublattice evolution",
                t: t + 1,
                cap: DEFAULT_T_CAP,
            });
        }
        let tn = t + 1;
        let n = tn as usize;
        let inner = match &self.inner {
            BInner::Float { pairs, .. } => {
                let mut next = vec![(0.0, 0.0); n];
                for (i, slot) in next.iter_mut().enumerate() {
                    // x = 2 - tn + 2i; source x+1 is old index i, x-1 is i-1.
                    if i < pairs.len() {
                        let (b1, b2) = pairs[i];
                        slot.0 = 0.5 * (b1 + b2);
                    }
                    if i >= 1 && i - 1 < pairs.len() {
                        let (b1, b2) = pairs[i - 1];
                        slot.1 = 0.5 * (3.0 * b1 - b2);
                    }
                }
                BInner::Float { t: tn, pairs: next }
            }
            BInner::Exact { pairs, .. } => {
                let mut next = vec![(BigInt::zero(), BigInt::zero()); n];
                for (i, slot) in next.iter_mut().enumerate() {
                    if i < pairs.len() {
                        let (e1, e2) = &pairs[i];
                        slot.0 = e1 + e2;
                    }
                    if i >= 1 && i - 1 < pairs.len() {
                        let (e1, e2) = &pairs[i - 1];
                        slot.1 = BigInt::from(3) * e1 - e2;
                    }
                }
                BInner::Exact { t: tn, pairs: next }
            }
        };
        Ok(BRow { inner })
    }

    pub fn evolve_to(mode: FieldMode, t: i64) -> Result<BRow> {
        if t < 1 {
            return Err(Error::TimeOutOfRange { t });
        }
        let mut row = BRow::initial(mode);
        while row.t() < t {
            row = row.evolve()?;
        }
        Ok(row)
    }

    fn index_of(&self, x: i64) -> Option<usize> {
        let t = self.t();
        if x < 2 - t || x > t || (x + t) % 2 != 0 {
            None
        } else {
            Some(((x + t - 2) / 2) as usize)
        }
    }

    /// (b1, b2) at x; zero off support (including all x + t odd).
    pub fn value_at(&self, x: i64) -> (f64, f64) {
        match (&self.inner, self.index_of(x)) {
            (_, None) => (0.0, 0.0),
            (BInner::Float { pairs, .. }, Some(i)) => pairs[i],
            (BInner::Exact { t, pairs }, Some(i)) => {
                let k = 2 * (*t - 1) as u32;
                (
                    scaled_to_f64(&pairs[i].0, 2, k),
                    scaled_to_f64(&pairs[i].1, 2, k),
                )
            }
        }
    }

    /// Scaled integer pair e(x, t) = 2^{t-1} b(x, t) for exact rows.
    pub fn exact_e_at(&self, x: i64) -> Option<(BigInt, BigInt)> {
        match &self.inner {
            BInner::Float { .. } => None,
            BInner::Exact { pairs, .. } => Some(match self.index_of(x) {
                Some(i) => pairs[i].clone(),
                None => (BigInt::zero(), BigInt::zero()),
            }),
        }
    }

    /// sum_x b1(x, t)^2 over this slice; exactly half of q_left(t).
    pub fn b1_square_sum(&self) -> f64 {
        match &self.inner {
            BInner::Float { pairs, .. } => pairs.iter().map(|(b1, _)| b1 * b1).sum(),
            BInner::Exact { t, pairs } => {
                let mut s = BigInt::zero();
                for (e1, _) in pairs {
                    s += e1 * e1;
                }
                scaled_to_f64(&s, 2, 4 * (*t - 1) as u32)
            }
        }
    }

    /// x values carried by this slice, in increasing order.
    pub fn support(&self) -> impl Iterator<Item = i64> {
        let t = self.t();
        (0..t).map(move |i| 2 - t + 2 * i)
    }
}

/// b(x, t) read off the field evolution at (2x-1, 2t-1); (0, 0) when
/// x + t is odd.
pub fn b_lattice_direct(x: i64, t: i64) -> Result<(f64, f64)> {
    if t < 1 {
        return Err(Error::TimeOutOfRange { t });
    }
    if (x + t) % 2 != 0 {
        return Ok((0.0, 0.0));
    }
    let row = FieldRow::evolve_to(FieldMode::Float, 2 * t - 1, &EdgeField::HomogeneousMagnetic)?;
    let a = row.amplitude_at(2 * x - 1);
    Ok((a.a1, a.a2))
}

/// Scaled integer pair e(x, t) = 2^{t-1} b(x, t) read off the exact field
/// evolution; (0, 0) when x + t is odd.
pub fn b_lattice_direct_exact(x: i64, t: i64) -> Result<(BigInt, BigInt)> {
    if t < 1 {
        return Err(Error::TimeOutOfRange { t });
    }
    if (x + t) % 2 != 0 {
        return Ok((BigInt::zero(), BigInt::zero()));
    }
    let row = FieldRow::evolve_to(FieldMode::Exact, 2 * t - 1, &EdgeField::HomogeneousMagnetic)?;
    Ok(row.exact_c_at(2 * x - 1).expect("exact row"))
}

/// b(x, t) from the autonomous recurrence evolution.
pub fn b_lattice_recurrence(x: i64, t: i64) -> Result<(f64, f64)> {
    if t < 1 {
        return Err(Error::TimeOutOfRange { t });
    }
    if (x + t) % 2 != 0 {
        return Ok((0.0, 0.0));
    }
    Ok(BRow::evolve_to(FieldMode::Float, t)?.value_at(x))
}

/// q_left(t) = sum over all sites y of a1(y, 2t-1)^2 under the homogeneous
/// field, for t = 1..t_max, index t-1. The sites y = 2x-1 with x + t even
/// carry exactly half of this mass (the b-slice sum), the remaining sites
/// the other half.
pub fn q_left_series(t_max: i64) -> Result<Vec<f64>> {
    if t_max < 1 {
        return Err(Error::TimeOutOfRange { t: t_max });
    }
    let u = EdgeField::HomogeneousMagnetic;
    let mut out = Vec::with_capacity(t_max as usize);
    let mut row = FieldRow::initial(FieldMode::Float);
    loop {
        if row.t() % 2 == 1 {
            out.push(row.component_sums().0);
            if (row.t() + 1) / 2 == t_max {
                break;
            }
        }
        row = row.evolve(&u)?;
    }
    Ok(out)
}
