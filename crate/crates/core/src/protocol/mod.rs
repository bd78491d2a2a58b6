//! The key-distillation protocol: type counting, threshold rules, the
//! finite-`m` rate bound and a dense model of its idealized output.

mod oracle;
mod rate;
mod sorting;
mod types;

pub use oracle::{
    build_rho_m_prime, build_rho_m_prime_with_budget, cdw_exact, CdwReport, CdwTerms, RhoMPrime,
    SubprotocolDims,
};
pub use rate::{
    delta_default, lemma1_lower_bound, pb_bound, rate_asymptote, t_min, type_entropy_term, Delta,
    ProtocolParams, RateReport,
};
pub use sorting::{sort_permutation, sort_shield_factors};
pub use types::{
    good_set, total_prob, type_count, type_enumerate, type_enumerate_with_budget, TypeHistogram,
    DEFAULT_TYPE_BUDGET,
};

use crate::ccq::{dw_rate, CcqState};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Smallest Devetak-Winter rate over the `(A, B_j)` ccq states.
pub fn multipartite_rate<T: Real>(ccq_per_pair: &[CcqState<T>]) -> Result<T> {
    ccq_per_pair
        .iter()
        .map(dw_rate)
        .reduce(T::min)
        .ok_or_else(|| Error::domain("need at least one pair"))
}
