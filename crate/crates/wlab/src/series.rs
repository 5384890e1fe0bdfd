//! Dirichlet series of the angle family and their diagnostics.
//!
//! F_{m,N}(s) = sum_{n<=N} w_m(n) n^{-s} with w_m(n) = e^{i theta_m(n)},
//! plus the classical signed case (level lambda, w = ±1). Everything here is
//! bit-for-bit deterministic: terms are generated in a fixed order and summed
//! through a pairwise (binary-counter) tree accumulator, never through data-
//! dependent or parallel reductions.
//!
//! The module also provides:
//! * truncated Euler products over sigma > 1 with a truncation estimate,
//! * summatory sums W(N) = sum_{n<=N} w_m(n) recorded on a geometric
//!   checkpoint schedule, and a log-log growth-exponent fit over them,
//! * a spacing-grid diagnostic (sorted angles arranged into J groups of K)
//!   probing how column sums compare with the scaled summatory bound,
//! * the level-uniformity bound |F_{m,N} - F_{q,N}| <= (pi/min(m,q))
//!   sum_{n<=N} n^{-sigma}, from |e^{ia} - e^{ib}| <= |a - b| and the
//!   normalized remainder being below its full mass at every level,
//! * a zeta-ratio reference zeta(2s)/zeta(s), the limit of the signed series
//!   on sigma > 1, with automatic fallback away from the alternating
//!   resummation's degenerate line.

use num::complex::Complex64;
use thiserror::Error;

use crate::angle::{theta_float, Level};
use crate::prime_zeta::canonical_g;
use crate::primes::primes_up_to;
use crate::sieve::SieveTable;
use crate::zeta::{eta_denominator_magnitude, zeta_em, zeta_eta};

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("series cutoff {n_max} exceeds sieve limit {limit}")]
    CutoffBeyondSieve { n_max: u64, limit: u64 },
    #[error("Euler product needs absolute convergence: Re(s) = {0} is not > 1")]
    NotAbsolutelyConvergent(f64),
    #[error("prime cutoff {0} too small (need >= 2)")]
    PrimeCutoffTooSmall(u64),
    #[error("local factor depth {0} too small (need >= 1)")]
    DepthTooSmall(u32),
    #[error("grid exponent alpha = {0} must lie strictly between 0 and 1")]
    BadGridExponent(f64),
    #[error("grid cutoff {0} too small to form at least one row and column")]
    GridTooSmall(u64),
    #[error(transparent)]
    Sieve(#[from] crate::sieve::SieveError),
}

/// Pairwise summation with a binary-counter forest: push is O(1) amortized,
/// the final fold is over at most 64 partials, and the result depends only on
/// the push order — same inputs, same bits, every run.
#[derive(Debug, Clone, Default)]
pub struct TreeAccumulator {
    levels: Vec<Option<Complex64>>,
}

impl TreeAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, term: Complex64) {
        let mut carry = term;
        let mut i = 0;
        loop {
            if i == self.levels.len() {
                self.levels.push(Some(carry));
                return;
            }
            match self.levels[i].take() {
                None => {
                    self.levels[i] = Some(carry);
                    return;
                }
                Some(held) => {
                    carry += held;
                    i += 1;
                }
            }
        }
    }

    /// Folds the outstanding partials from the smallest scale up.
    pub fn total(&self) -> Complex64 {
        self.levels
            .iter()
            .flatten()
            .fold(Complex64::new(0.0, 0.0), |acc, &x| acc + x)
    }
}

/// Unit-modulus series weight at level `level` (±1 on the signed level).
fn unit_weight(n: u64, level: Level, g: f64, sieve: &SieveTable) -> Result<Complex64, SeriesError> {
    let f = sieve.factorize(n)?;
    match level {
        Level::Lambda => Ok(Complex64::new(
            if f.omega_total() % 2 == 1 { -1.0 } else { 1.0 },
            0.0,
        )),
        Level::Finite(_) => Ok(Complex64::from_polar(1.0, theta_float(&f, level, g))),
    }
}

/// F_{m,N}(s): terms pushed in increasing n through the tree accumulator.
pub fn partial_sum(
    s: Complex64,
    n_max: u64,
    level: Level,
    sieve: &SieveTable,
) -> Result<Complex64, SeriesError> {
    if n_max > sieve.limit() {
        return Err(SeriesError::CutoffBeyondSieve { n_max, limit: sieve.limit() });
    }
    let g = canonical_g();
    let mut acc = TreeAccumulator::new();
    for n in 1..=n_max {
        let w = unit_weight(n, level, g, sieve)?;
        let n_pow = (-s * (n as f64).ln()).exp();
        acc.push(w * n_pow);
    }
    Ok(acc.total())
}

/// Truncated Euler product with an a-posteriori truncation estimate.
#[derive(Debug, Clone, Copy)]
pub struct EulerProduct {
    pub value: Complex64,
    /// Sum over retained primes of the neglected local-factor mass
    /// p^{-(depth+1) sigma} / (1 - p^{-sigma}); an estimate of the relative
    /// depth-truncation error, not a certificate (omitted primes add
    /// O(sum_{p > cutoff} p^{-sigma}) more).
    pub depth_truncation: f64,
    pub prime_cutoff: u64,
    pub depth: u32,
}

/// prod_{p <= cutoff} sum_{k=0}^{depth} w_m(p^k) p^{-ks} on sigma > 1.
pub fn euler_product(
    s: Complex64,
    level: Level,
    prime_cutoff: u64,
    depth: u32,
) -> Result<EulerProduct, SeriesError> {
    if s.re <= 1.0 {
        return Err(SeriesError::NotAbsolutelyConvergent(s.re));
    }
    if prime_cutoff < 2 {
        return Err(SeriesError::PrimeCutoffTooSmall(prime_cutoff));
    }
    if depth == 0 {
        return Err(SeriesError::DepthTooSmall(depth));
    }
    let g = canonical_g();
    let mut value = Complex64::new(1.0, 0.0);
    let mut truncation = 0.0f64;
    for p in primes_up_to(prime_cutoff) {
        let p_pow_s = (-s * (p as f64).ln()).exp(); // p^{-s}
        let mut local = Complex64::new(1.0, 0.0); // k = 0 term
        let mut p_ks = Complex64::new(1.0, 0.0);
        for k in 1..=depth {
            p_ks *= p_pow_s;
            let w = match level {
                Level::Lambda => {
                    Complex64::new(if k % 2 == 1 { -1.0 } else { 1.0 }, 0.0)
                }
                Level::Finite(_) => {
                    let f = crate::sieve::Factorization::from_parts(vec![(p, k)])
                        .expect("prime power parts are valid");
                    Complex64::from_polar(1.0, theta_float(&f, level, g))
                }
            };
            local += w * p_ks;
        }
        value *= local;
        let mag = (p as f64).powf(-s.re);
        truncation += mag.powi(depth as i32 + 1) / (1.0 - mag);
    }
    Ok(EulerProduct { value, depth_truncation: truncation, prime_cutoff, depth })
}

/// Geometric checkpoint schedule: about four checkpoints per octave
/// (ratio 2^{1/4}) from 10 up, always ending exactly at `n_max`.
pub fn checkpoint_schedule(n_max: u64) -> Vec<u64> {
    let mut points = Vec::new();
    let ratio = std::f64::consts::SQRT_2.sqrt();
    let mut v = 10.0f64;
    while (v.round() as u64) < n_max {
        let p = v.round() as u64;
        if points.last() != Some(&p) {
            points.push(p);
        }
        v *= ratio;
    }
    if points.last() != Some(&n_max) {
        points.push(n_max);
    }
    points
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub n: u64,
    pub sum: Complex64,
}

/// Summatory function W(N) = sum_{n<=N} w_m(n) sampled on the geometric
/// schedule, in one deterministic pass.
pub fn summatory_checkpoints(
    n_max: u64,
    level: Level,
    sieve: &SieveTable,
) -> Result<Vec<Checkpoint>, SeriesError> {
    if n_max > sieve.limit() {
        return Err(SeriesError::CutoffBeyondSieve { n_max, limit: sieve.limit() });
    }
    let schedule = checkpoint_schedule(n_max);
    let g = canonical_g();
    let mut acc = TreeAccumulator::new();
    let mut out = Vec::with_capacity(schedule.len());
    let mut next = 0usize;
    for n in 1..=n_max {
        acc.push(unit_weight(n, level, g, sieve)?);
        while next < schedule.len() && schedule[next] == n {
            out.push(Checkpoint { n, sum: acc.total() });
            next += 1;
        }
    }
    Ok(out)
}

/// Least-squares fit of ln|W| = ln c + alpha ln N over the checkpoints.
#[derive(Debug, Clone, Copy)]
pub struct GrowthFit {
    pub alpha: f64,
    pub ln_c: f64,
    pub points_used: usize,
}

const GROWTH_MIN_POINTS: usize = 8;

/// Fits the growth exponent from checkpoints with |W| >= 1 (smaller sums
/// carry no scale information and would blow up the logarithm). Returns
/// `None` when fewer than 8 checkpoints qualify.
pub fn growth_fit(points: &[Checkpoint]) -> Option<GrowthFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|c| c.sum.norm() >= 1.0)
        .map(|c| ((c.n as f64).ln(), c.sum.norm().ln()))
        .collect();
    if usable.len() < GROWTH_MIN_POINTS {
        return None;
    }
    let n = usable.len() as f64;
    let sx: f64 = usable.iter().map(|p| p.0).sum();
    let sy: f64 = usable.iter().map(|p| p.1).sum();
    let sxx: f64 = usable.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = usable.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom <= 0.0 {
        return None;
    }
    let alpha = (n * sxy - sx * sy) / denom;
    let ln_c = (sy - alpha * sx) / n;
    Some(GrowthFit { alpha, ln_c, points_used: usable.len() })
}

/// Spacing-grid diagnostic over the first J*K angles.
#[derive(Debug, Clone)]
pub struct GridReport {
    pub n_max: u64,
    pub alpha: f64,
    /// Rows J = floor(N^alpha).
    pub rows: u64,
    /// Columns K: floor(N^{1-alpha}), rounded up instead when the remainder
    /// N - J*K would reach J.
    pub cols: u64,
    /// Integers left out of the J x K grid.
    pub residual: u64,
    pub column_moduli: Vec<f64>,
    pub max_column_modulus: f64,
    /// (2 pi / N^alpha) |sum_{n <= JK} w_m(n)|, the summatory-driven scale
    /// the column sums are compared against.
    pub scaled_summatory: f64,
}

/// Sorts the angles of n = 1..=J*K ascending, splits them into J consecutive
/// groups of K, and measures each column's exponential sum
/// |sum_j e^{i theta_(j,k)}|.
pub fn grid_diagnostic(
    n_max: u64,
    alpha: f64,
    level: Level,
    sieve: &SieveTable,
) -> Result<GridReport, SeriesError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(SeriesError::BadGridExponent(alpha));
    }
    let rows = (n_max as f64).powf(alpha).floor() as u64;
    let mut cols = (n_max as f64).powf(1.0 - alpha).floor() as u64;
    // a 1-row or 1-column grid has no column sums worth measuring
    if rows < 2 || cols < 2 || rows.checked_mul(cols).is_none() {
        return Err(SeriesError::GridTooSmall(n_max));
    }
    if n_max - rows * cols >= rows {
        cols = (n_max as f64).powf(1.0 - alpha).ceil() as u64;
    }
    let cells = rows * cols;
    if cells > n_max || cells == 0 {
        return Err(SeriesError::GridTooSmall(n_max));
    }
    let residual = n_max - cells;
    if cells > sieve.limit() {
        return Err(SeriesError::CutoffBeyondSieve { n_max: cells, limit: sieve.limit() });
    }

    let g = canonical_g();
    let mut angles = Vec::with_capacity(cells as usize);
    let mut summatory = TreeAccumulator::new();
    for n in 1..=cells {
        let f = sieve.factorize(n)?;
        let theta = match level {
            Level::Lambda => {
                if f.omega_total() % 2 == 1 {
                    std::f64::consts::PI
                } else {
                    0.0
                }
            }
            Level::Finite(_) => theta_float(&f, level, g),
        };
        angles.push(theta);
        summatory.push(Complex64::from_polar(1.0, theta));
    }
    angles.sort_unstable_by(f64::total_cmp);

    let (rows_u, cols_u) = (rows as usize, cols as usize);
    let mut column_moduli = Vec::with_capacity(cols_u);
    for k in 0..cols_u {
        let mut acc = TreeAccumulator::new();
        for j in 0..rows_u {
            acc.push(Complex64::from_polar(1.0, angles[j * cols_u + k]));
        }
        column_moduli.push(acc.total().norm());
    }
    let max_column_modulus = column_moduli.iter().copied().fold(0.0, f64::max);
    let scaled_summatory =
        2.0 * std::f64::consts::PI / (n_max as f64).powf(alpha) * summatory.total().norm();

    Ok(GridReport {
        n_max,
        alpha,
        rows,
        cols,
        residual,
        column_moduli,
        max_column_modulus,
        scaled_summatory,
    })
}

/// Analytic bound on |F_{m,N}(s) - F_{q,N}(s)|: each term differs by at most
/// the arc |theta_m - theta_q| <= pi/min(m, q), so the gap is bounded by
/// (pi/min(m, q)) sum_{n<=N} n^{-sigma}. The signed level acts as m = infinity
/// (its arc gap from level m is pi r(n)/(m G) < pi/m).
pub fn uniformity_bound(a: Level, b: Level, sigma: f64, n_max: u64) -> f64 {
    let min_level = match (a, b) {
        (Level::Lambda, Level::Lambda) => return 0.0,
        (Level::Finite(m), Level::Lambda) | (Level::Lambda, Level::Finite(m)) => m,
        (Level::Finite(m), Level::Finite(q)) => m.min(q),
    };
    let mut zeta_partial = 0.0f64;
    let mut comp = 0.0f64;
    for n in 1..=n_max {
        let term = (n as f64).powf(-sigma);
        let y = term - comp;
        let t = zeta_partial + y;
        comp = (t - zeta_partial) - y;
        zeta_partial = t;
    }
    std::f64::consts::PI / min_level as f64 * zeta_partial
}

const ETA_DEGENERATE_MARGIN: f64 = 1e-3;

/// Reference value zeta(2s)/zeta(s), the limit of the signed series on
/// sigma > 1. Uses the accelerated alternating route except within the
/// degenerate margin of its denominator line, where the Euler–Maclaurin
/// route takes over.
pub fn zeta_ratio_ref(s: Complex64) -> Complex64 {
    let s2 = 2.0 * s;
    if eta_denominator_magnitude(s) < ETA_DEGENERATE_MARGIN
        || eta_denominator_magnitude(s2) < ETA_DEGENERATE_MARGIN
    {
        zeta_em(s2) / zeta_em(s)
    } else {
        zeta_eta(s2) / zeta_eta(s)
    }
}
