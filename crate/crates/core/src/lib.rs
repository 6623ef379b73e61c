//! Tests of zero Spearman rank correlation, centred on a studentized
//! permutation test that stays valid when the two variables are uncorrelated
//! but dependent, plus the machinery to measure Type I error by simulation.
//!
//! ```
//! use stuperm_core::{studentized_permutation_test, Alternative, PairedSample};
//!
//! let sample = PairedSample::new(
//!     vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
//!     vec![2.0, 1.0, 4.0, 3.0, 6.0, 5.0],
//! )
//! .unwrap();
//! let res = studentized_permutation_test(&sample, Alternative::Greater, 1_000, 42).unwrap();
//! assert!(res.estimate > 0.8);
//! assert!(res.p_value < 0.05);
//! ```

pub mod correlation;
pub mod error;
pub mod harness;
pub mod hypothesis;
pub mod io;
pub mod rank;
pub mod rng;
pub mod sample;
pub mod scenario;

pub use correlation::{
    central_moment_pq, moran_expected_rs, pearson_r, spearman_rs, studentized_spearman, tau_hat, MomentEstimate,
    RankPairing,
};
pub use error::{Error, Result};
pub use harness::{estimate_type1_error, run_grid, GridConfig, Preset, SimulationSummary};
pub use hypothesis::{
    asymptotic_normal_test, exact_permutation_null, exact_permutation_pvalue, fisher_yates_test, fisher_z_test,
    naive_permutation_test, permutation_null, permutation_test, run_method, studentized_permutation_test, t_test,
    Alternative, Method, PValueConvention, PermutationNull, PermutationStatistic, TestConfig, TestResult,
};
pub use io::{read_paired, read_paired_csv, ColumnRef, ColumnSelector, MissingPolicy};
pub use rank::{average_ranks, RankVector};
pub use rng::{derive_stream, RngState};
pub use sample::PairedSample;
pub use scenario::{null_spearman_check, sample_scenario, ScenarioSpec};
