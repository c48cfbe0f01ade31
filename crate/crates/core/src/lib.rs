//! anticonc: concentration functions of weighted sums of i.i.d. random
//! variables, computed exactly at desk scale, compared against symmetric
//! infinitely divisible laws, and verified against independent oracles.
//!
//! The concentration function of a d-dimensional law `F` is
//! `Q(F, λ) = sup_x P(Y ∈ x + λB)` with `B` the closed Euclidean ball of
//! radius 1/2. For a weighted sum `S_a = Σ X_k a_k` this crate can:
//!
//! - enumerate the law of `S_a` exactly and take the supremum by sweep
//!   (d = 1) or disk-coverage search (d = 2), with Monte Carlo fallbacks
//!   ([`exact`]);
//! - evaluate the Esséen integral and the symmetric nonnegative-cf proxy
//!   for `Q` by cube quadrature ([`charfn`]);
//! - evaluate comparison bounds driven by a compound-Poisson law whose
//!   Lévy measure sits on the ±weights, including tail-mixture and
//!   floor-weighted variants ([`bounds`]);
//! - run property suites for the underlying inequality chain and estimate
//!   the implied dimension constants empirically ([`verify`]).
//!
//! Everything is deterministic given inputs and seeds; parallel reductions
//! run in fixed order.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod charfn;
pub mod dist;
pub mod error;
pub mod exact;
pub mod scenario;
pub mod verify;

pub use bounds::{
    build_report, corollary1_rhs, corollary2_lambda, corollary2_rhs, regularity_check,
    theorem1_rhs, validate_v_le_g, BoundReport, BoundValue, ReportOptions, VChoice, Which,
    CSV_HEADER,
};
pub use charfn::{
    cf_fa, cf_h, cf_x, cube_integral, esseen_upper, q_h, q_proxy_symmetric, CfHandle, QhValue,
    QuadRule, QuadratureSpec,
};
pub use dist::{strict_floor, strict_floor_f64, DiscreteDist1D, DiscreteDistD, WeightMatrix};
pub use error::{Error, Result};
pub use exact::{
    q_exact_1d, q_exact_2d, q_monte_carlo, sample_h, sample_weighted_sum, weighted_sum_dist,
    McEstimate, SampleBatch,
};
pub use scenario::{RawDist, Scenario};
pub use verify::{
    check_cf_inequality, check_holder, check_jensen_chain, estimate_constant, generate_family,
    ConstantEstimate, FamilySpec, HolderCheck, JensenChain, SuiteOutcome,
};
