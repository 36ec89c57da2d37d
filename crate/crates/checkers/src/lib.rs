//! A discrete one-dimensional quantum walk on the integer lattice.
//!
//! The model assigns to every lattice site (x, t) a two-component amplitude
//! a(x, t) built from monotone paths with steps (±1, +1): each path
//! contributes i (-i mu)^turns, normalized by (1 + mu^2)^((t-1)/2), where mu
//! is the dimensionless mass parameter. The squared length P = a1^2 + a2^2
//! behaves as a probability: it sums to 1 on every time slice.
//!
//! The crate covers:
//!
//! - [`lattice`]: slice evolution in float or exact integer arithmetic,
//!   brute-force path enumeration, the alternating-binomial closed form,
//!   slice recomposition from an intermediate time, and slice symmetries.
//! - [`special`]: Legendre polynomials via the three-term recurrence, the
//!   bridge from P_n to the return amplitude a1(0, 2n+2), and the large-n
//!   asymptotic form of that amplitude.
//! - [`reversal`]: the direction-reversal probability S1(t), its series
//!   form over return amplitudes, the limit mu/(2 sqrt(1+mu^2)), and the
//!   exact identities tying them together.
//! - [`field`]: evolution with ±1 edge signs (an external field), the
//!   diamond equalities of the homogeneous magnetic field, the coarse
//!   sublattice b(x, t) with its autonomous recurrence, and the two
//!   conjectured limit points of p_left.
//! - [`verify`]: every implemented identity bundled as a pass/fail suite.
//!
//! Exact mode requires rational mu = p/q and represents amplitudes as
//! integer pairs scaled by powers of p^2 + q^2, so conservation laws and
//! cross-checks are integer equalities rather than float comparisons.

pub mod error;
pub mod exact;
pub mod field;
pub mod lattice;
pub mod reversal;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use exact::{ExactAmplitude, ExactMu, MAX_MU_PART};
pub use lattice::{
    amplitude, amplitude_bruteforce, amplitude_exact, amplitude_explicit, explicit_slice_exact,
    probability, probability_exact, Amplitude, AmplitudeRow, LatticeParams, DEFAULT_T_CAP,
};
pub use reversal::{reversal_limit, reversal_probability_direct};
pub use special::{a1_zero_via_legendre, legendre};
pub use verify::{run_all, CheckClass, CheckResult, VerifyConfig, VerifyReport};
