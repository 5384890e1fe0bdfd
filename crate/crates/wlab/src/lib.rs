//! Numerical laboratory for a phase-valued refinement of the Liouville
//! function.
//!
//! For n = prod p_j^{k_j} define the normalized remainder
//!
//! ```text
//! r(n) = sum_j (p_j^{k_j} - (p_j - 1)^{k_j}) / p_j^{k_j + 2},
//! ```
//!
//! an exact rational confined to [0, G) where G = sum_p 1/p^2. At level m the
//! angle theta_m(n) = pi·[Omega(n) odd] + (pi / (m G)) r(n) splits the
//! integers into two parity sectors of width pi/m, and w_m(n) =
//! e^{i theta_m(n)} interpolates between the classical signed function
//! (m -> infinity, the `lambda` level) and a genuinely complex-valued unit
//! weight whose angle still determines the factorization type.
//!
//! The crate provides:
//!
//! * [`primes`] — segmented prime generation without a stored table;
//! * [`sieve`] — a smallest-prime-factor table with exact factorizations and
//!   a binary on-disk cache;
//! * [`zeta`] — two independent complex zeta evaluators (accelerated
//!   alternating series and Euler–Maclaurin);
//! * [`prime_zeta`] — the constant G by two independent routes with explicit
//!   error bounds, and the canonical scale pi/G used everywhere;
//! * [`angle`] — exact rational, certified fixed-point, and fast float
//!   evaluations of r and theta, sector membership with exact escalation,
//!   and an injectivity scan over exact angles;
//! * [`density`] — the greedy tail construction proving angles are dense:
//!   converging runs with full logs, an independent fixed-point verifier,
//!   and explicit integer witnesses with both parities;
//! * [`series`] — deterministic Dirichlet partial sums, Euler products,
//!   summatory checkpoints with growth fits, a spacing-grid diagnostic, and
//!   the level-uniformity bound.
//!
//! Numerical policy: every headline quantity is computable by two
//! independent routes (G, zeta, angles, summatory functions), exact
//! arithmetic backs every float claim near a boundary, and all series
//! summation is bit-for-bit deterministic (fixed order, pairwise trees, no
//! parallel reduction).

pub mod angle;
pub mod density;
pub mod prime_zeta;
pub mod primes;
pub mod series;
pub mod sieve;
pub mod zeta;

pub use angle::{
    exact_theta, injectivity_scan, liouville, psi_fraction, psi_m, sector_check, theta_certified,
    theta_float, w_value, DuplicateReport, ExactAngle, Level, SectorStatus,
};
pub use density::{
    approximate_angle, sector_density, verify_construction, witness_factorization,
    witness_tail_deficit, Construction, ConstructionStatus, DensityError, SectorDensityReport,
    StageChoice, TailTable, VerifyReport, Witness,
};
pub use prime_zeta::{canonical_g, compute_g, phase_scale, GMethod, PrimeZetaValue};
pub use primes::{for_each_prime, primes_up_to};
pub use series::{
    checkpoint_schedule, euler_product, grid_diagnostic, growth_fit, partial_sum,
    summatory_checkpoints, uniformity_bound, zeta_ratio_ref, Checkpoint, EulerProduct, GridReport,
    GrowthFit, SeriesError, TreeAccumulator,
};
pub use sieve::{Factorization, SieveTable};
pub use zeta::{eta_denominator_magnitude, zeta_em, zeta_eta};
