//! Phase-valued generalization of the Liouville function.
//!
//! Classical lambda(n) = (−1)^Omega(n) takes values ±1, i.e. angles 0 and pi.
//! Here each prime power p^k additionally contributes a small positive phase
//!
//! ```text
//! psi(p^k) = (pi / (p^2 G)) * (1 − ((p−1)/p)^k),      G = sum_p 1/p^2,
//! ```
//!
//! and the level-m angle of n = prod p_j^{k_j} is
//!
//! ```text
//! theta_m(n) = pi * [Omega(n) odd] + (1/m) * sum_j psi(p_j^{k_j}),
//! w_m(n) = exp(i theta_m(n)).
//! ```
//!
//! The kernel is exactly rational once pi/G is factored out:
//! psi(p^k) = (pi/G) * (p^k − (p−1)^k) / p^{k+2}, and those fractions sum to
//! strictly less than G over any factorization. [`ExactAngle`] carries the
//! parity bit together with that rational sum r in lowest terms, so equality
//! of angles is decidable exactly; all float evaluations scale r by the single
//! canonical pi/(m G) at the very end.
//!
//! Three evaluation routes, in decreasing exactness and increasing speed:
//! [`exact_theta`] (big rationals, used to settle ties and collisions),
//! [`theta_certified`] (2^-120 fixed point with an explicit error bound, cheap
//! even for factorizations with 10^5+ distinct primes), and [`theta_float`]
//! (plain f64 kernel for bulk scans).

use std::collections::HashMap;

use num::bigint::Sign;
use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::{ToPrimitive, Zero};
use num::{BigInt, BigUint};
use thiserror::Error;

use crate::prime_zeta::{canonical_g, phase_scale};
use crate::sieve::{Factorization, SieveTable};

#[derive(Debug, Error)]
pub enum AngleError {
    #[error("prime-power exponent must be >= 1")]
    ZeroExponent,
    #[error("{0} is not a valid prime argument")]
    BadPrime(u64),
    #[error("level m must be >= 1")]
    ZeroLevel,
    #[error("injectivity scan limited to n <= {max}, requested {requested}")]
    ScanTooLarge { requested: u64, max: u64 },
    #[error(transparent)]
    Sieve(#[from] crate::sieve::SieveError),
}

/// Which member of the function family: a finite level m, or the lambda
/// limit m -> infinity where every psi contribution vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Finite(u64),
    Lambda,
}

impl Level {
    pub fn finite(m: u64) -> Result<Self, AngleError> {
        if m == 0 {
            return Err(AngleError::ZeroLevel);
        }
        Ok(Level::Finite(m))
    }

    /// 1/m as a float; 0 for the lambda limit.
    pub fn inverse(self) -> f64 {
        match self {
            Level::Finite(m) => 1.0 / m as f64,
            Level::Lambda => 0.0,
        }
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Level::Finite(m) => write!(f, "{m}"),
            Level::Lambda => write!(f, "lambda"),
        }
    }
}

/// Exact angle data: the parity bit (is Omega odd) and the rational
/// r = sum_j (p_j^{k_j} − (p_j−1)^{k_j}) / p_j^{k_j+2} in lowest terms.
///
/// theta_m = parity * pi + (pi / (m G)) * r. Two integers get the same angle
/// at every level exactly when their `ExactAngle`s are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactAngle {
    parity: bool,
    r: BigRational,
}

impl ExactAngle {
    pub fn zero() -> Self {
        Self { parity: false, r: BigRational::zero() }
    }

    pub fn parity_odd(&self) -> bool {
        self.parity
    }

    pub fn r(&self) -> &BigRational {
        &self.r
    }

    /// Angle sum for coprime arguments: parities xor, fractions add.
    pub fn combined_with(&self, other: &ExactAngle) -> ExactAngle {
        ExactAngle {
            parity: self.parity ^ other.parity,
            r: &self.r + &other.r,
        }
    }

    /// Float angle at `level`, scaling the exact r by pi/(m g) at the end.
    pub fn to_float(&self, level: Level, g: f64) -> f64 {
        let base = if self.parity { std::f64::consts::PI } else { 0.0 };
        match level {
            Level::Lambda => base,
            Level::Finite(m) => {
                base + std::f64::consts::PI / (m as f64 * g) * ratio_to_f64(&self.r)
            }
        }
    }
}

/// (p^k − (p−1)^k) / p^{k+2} as an exact rational; this times pi/G is
/// psi(p^k). Errors on k = 0 or p < 2.
pub fn psi_fraction(p: u64, k: u32) -> Result<BigRational, AngleError> {
    validate_prime_power(p, k)?;
    Ok(psi_fraction_raw(p, k))
}

fn validate_prime_power(p: u64, k: u32) -> Result<(), AngleError> {
    if k == 0 {
        return Err(AngleError::ZeroExponent);
    }
    if p < 2 {
        return Err(AngleError::BadPrime(p));
    }
    Ok(())
}

fn psi_fraction_raw(p: u64, k: u32) -> BigRational {
    let pb = BigUint::from(p);
    let num = pb.pow(k) - BigUint::from(p - 1).pow(k);
    let den = pb.pow(k + 2);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Float kernel: (1 − ((p−1)/p)^k) / p^2, i.e. psi_fraction in f64.
#[inline]
pub fn psi_fraction_f64(p: u64, k: u32) -> f64 {
    let pf = p as f64;
    if k == 1 {
        // 1 − (p−1)/p = 1/p exactly
        return 1.0 / (pf * pf * pf);
    }
    // 1 − ((p−1)/p)^k = −expm1(k ln1p(−1/p)): a few ulp even where the
    // direct subtraction would cancel (large p, small k)
    -(f64::from(k) * (-1.0 / pf).ln_1p()).exp_m1() / (pf * pf)
}

/// psi(p^k)/m in floating point, against an explicit G value.
pub fn psi_m(p: u64, k: u32, m: u64, g: f64) -> Result<f64, AngleError> {
    validate_prime_power(p, k)?;
    if m == 0 {
        return Err(AngleError::ZeroLevel);
    }
    Ok(std::f64::consts::PI / (m as f64 * g) * psi_fraction_f64(p, k))
}

/// lambda(n) from a factorization: +1 for even Omega, −1 for odd.
pub fn liouville(f: &Factorization) -> i8 {
    if f.omega_total().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Exact angle of a factorization. Cost grows with the least common
/// denominator, i.e. with the product of the distinct p^{k+2}; intended for
/// n-by-n scans and spot checks, not for 10^5-prime witness factorizations
/// (use [`theta_certified`] there).
pub fn exact_theta(f: &Factorization) -> ExactAngle {
    let mut r = BigRational::zero();
    for &(p, k) in f.factors() {
        r += psi_fraction_raw(p, k);
    }
    ExactAngle { parity: f.omega_total() % 2 == 1, r }
}

/// Float angle via the f64 kernel; lands in [0, pi/m) u (pi, pi + pi/m) up to
/// float rounding at the sector edge.
pub fn theta_float(f: &Factorization, level: Level, g: f64) -> f64 {
    let base = if f.omega_total() % 2 == 1 { std::f64::consts::PI } else { 0.0 };
    let m_inv = level.inverse();
    if m_inv == 0.0 {
        return base;
    }
    let mut r = 0.0f64;
    for &(p, k) in f.factors() {
        r += psi_fraction_f64(p, k);
    }
    base + std::f64::consts::PI / g * m_inv * r
}

/// w_m(n) on the unit circle, using the canonical G.
pub fn w_value(f: &Factorization, level: Level) -> Complex64 {
    match level {
        Level::Lambda => Complex64::new(f64::from(liouville(f)), 0.0),
        Level::Finite(_) => Complex64::from_polar(1.0, theta_float(f, level, canonical_g())),
    }
}

// ---------------------------------------------------------------------------
// Certified fixed-point route
// ---------------------------------------------------------------------------

/// Fixed-point scale: angles fractions are summed in units of 2^-120.
pub(crate) const FP_SHIFT: u32 = 120;

/// floor(2^120 * (p^k − (p−1)^k) / p^{k+2}), exactly.
pub(crate) fn psi_fraction_units(p: u64, k: u32) -> u128 {
    let pb = BigUint::from(p);
    let num = (pb.pow(k) - BigUint::from(p - 1).pow(k)) << FP_SHIFT;
    let den = pb.pow(k + 2);
    (num / den).to_u128().expect("psi fraction < 1 fits in 2^120 units")
}

/// floor(2^120 / p^2), exactly.
#[inline]
pub(crate) fn inv_p2_units(p: u64) -> u128 {
    (1u128 << FP_SHIFT) / (p as u128 * p as u128)
}

pub(crate) fn units_to_f64(units: u128) -> f64 {
    units as f64 / (1u128 << FP_SHIFT) as f64
}

/// Angle via exact integer summation in 2^-120 units.
///
/// Every term is floored exactly (big-integer division), so the returned
/// error bound — final float rounding plus one unit per term — is a real
/// enclosure no matter how many factors are involved.
pub fn theta_certified(f: &Factorization, level: Level) -> (f64, f64) {
    let base = if f.omega_total() % 2 == 1 { std::f64::consts::PI } else { 0.0 };
    let m_inv = level.inverse();
    if m_inv == 0.0 {
        return (base, 0.0);
    }
    let mut units: u128 = 0;
    for &(p, k) in f.factors() {
        units += psi_fraction_units(p, k);
    }
    let scale = phase_scale() * m_inv;
    let value = base + scale * units_to_f64(units);
    // one floored unit per term, then ~2 ulp from the three float operations
    let err = scale
        * (f.factors().len() as f64 + 1.0)
        * (1.0 / (1u128 << FP_SHIFT) as f64)
        + 4e-16 * (base + 1.0);
    (value, err)
}

// ---------------------------------------------------------------------------
// Sector location
// ---------------------------------------------------------------------------

/// How a float sector test was settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorStatus {
    /// Comfortably inside [0, pi/m) u (pi, pi + pi/m).
    Inside,
    /// Float value within the guard band of the sector edge; the exact
    /// certificate r < sum_{p|n} 1/p^2 (a strict under-sum of G) settled it.
    CertifiedAtEdge,
    /// Outside the sector beyond the guard band — a genuine finding.
    Violation,
}

/// Relative guard band around the sector edge for float tests.
pub const SECTOR_GUARD: f64 = 1e-9;

/// Sector membership of theta_m(n), resolved exactly at the boundary.
///
/// The test reduces to r < G: theta_m = parity*pi + (pi/m)(r/G). The float
/// fast path compares the f64 kernel sum against g with a relative guard
/// band; anything inside the band is settled by the exact rational
/// certificate r < sum over the distinct primes of 1/p^2, which is itself a
/// strict partial sum of G.
pub fn sector_check(f: &Factorization, g: f64) -> SectorStatus {
    let mut r = 0.0f64;
    for &(p, k) in f.factors() {
        r += psi_fraction_f64(p, k);
    }
    if r < g * (1.0 - SECTOR_GUARD) {
        return SectorStatus::Inside;
    }
    if certify_r_below_prime_sum(f) {
        SectorStatus::CertifiedAtEdge
    } else {
        SectorStatus::Violation
    }
}

/// Exact certificate: r(f) < sum_{p | n} 1/p^2 as big rationals.
/// The right side is a finite sub-sum of G, so success proves r < G.
pub fn certify_r_below_prime_sum(f: &Factorization) -> bool {
    let mut r = BigRational::zero();
    let mut bound = BigRational::zero();
    for &(p, k) in f.factors() {
        r += psi_fraction_raw(p, k);
        let p2 = BigInt::from(p) * BigInt::from(p);
        bound += BigRational::new(BigInt::from(1), p2);
    }
    if f.factors().is_empty() {
        return true; // r = 0 < G
    }
    r < bound
}

// ---------------------------------------------------------------------------
// Injectivity scan
// ---------------------------------------------------------------------------

/// n-values sharing one exact angle (never expected to occur).
#[derive(Debug, Clone)]
pub struct DuplicateGroup {
    pub angle: ExactAngle,
    pub ns: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct DuplicateReport {
    pub scanned: u64,
    pub groups: Vec<DuplicateGroup>,
}

impl DuplicateReport {
    pub fn is_injective(&self) -> bool {
        self.groups.is_empty()
    }
}

/// Upper limit accepted by [`injectivity_scan`] (exact arithmetic per n).
pub const SCAN_MAX: u64 = 1_000_000;

/// Groups all n <= limit by exact angle and reports collisions.
///
/// A collision is a *finding*, not an error — the caller decides what it
/// means. The empty report doubles as a machine check that float-close angles
/// (e.g. theta(8) against its neighbors) are exactly distinct.
pub fn injectivity_scan(limit: u64, sieve: &SieveTable) -> Result<DuplicateReport, AngleError> {
    if limit > SCAN_MAX {
        return Err(AngleError::ScanTooLarge { requested: limit, max: SCAN_MAX });
    }
    let mut seen: HashMap<ExactAngle, Vec<u64>> = HashMap::new();
    for n in 1..=limit {
        let f = sieve.factorize(n)?;
        seen.entry(exact_theta(&f)).or_default().push(n);
    }
    let mut groups: Vec<DuplicateGroup> = seen
        .into_iter()
        .filter(|(_, ns)| ns.len() > 1)
        .map(|(angle, ns)| DuplicateGroup { angle, ns })
        .collect();
    groups.sort_by_key(|grp| grp.ns[0]);
    Ok(DuplicateReport { scanned: limit, groups })
}

// ---------------------------------------------------------------------------
// Rational -> f64 conversion that survives huge numerators/denominators
// ---------------------------------------------------------------------------

/// Correct-to-~2ulp conversion of a big rational to f64. The naive
/// numerator/denominator conversion overflows to inf/inf for the witness
/// angles whose parts exceed 2^1024; this scales by powers of two instead.
pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.numer().is_zero() {
        return 0.0;
    }
    let negative = r.numer().sign() == Sign::Minus;
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    const PREC: i64 = 96;
    let shift = den.bits() as i64 - num.bits() as i64 + PREC;
    let q: BigUint = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        num / (den << (-shift) as usize)
    };
    let q = q.to_f64().expect("quotient is ~2^96 by construction");
    let magnitude = q * (-shift as f64).exp2();
    if negative {
        -magnitude
    } else {
        magnitude
    }
}
