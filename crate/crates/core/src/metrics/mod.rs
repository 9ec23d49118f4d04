//! Quality indicators and the rank-sum significance test.

mod hv;
mod igd;
mod wilcoxon;

pub use hv::{hypervolume, normalized_hypervolume, HV_REFERENCE};
pub use igd::igd_plus;
pub use wilcoxon::{rank_sum_exact_p, wilcoxon_rank_sum, RankSum, Verdict};
