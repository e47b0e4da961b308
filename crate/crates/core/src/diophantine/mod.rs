//! Resonance counting for `j n_k - j' n_l = c` and exact moments of weighted sums.

mod count;
pub(crate) mod keys;
mod moments;

pub use count::{count_dioph, semitriv_check, DiophantineReport, PairSup, SemitrivReport, MAX_PRODUCTS, TIE_TOL};
pub use moments::{
    exact_variance, exact_variance_on, fourth_moment_exact, kac_variance, variance_lower_bound_holds,
    MAX_FOURTH_TUPLES, MAX_VARIANCE_PRODUCTS,
};
