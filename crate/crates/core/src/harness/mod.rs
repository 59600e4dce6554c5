//! Target functions, error measurement and the verification suite.

mod catalog;
mod measure;
mod suite;

pub use catalog::{
    bump_family, catalog, lookup, CatalogEntry, BUMP_CELLS, CATALOG_NAMES, HOLDER_ALPHA,
};
pub use measure::{
    estimate_modulus, measure_lp_error, measure_sup_error, LpEstimate, QuadratureConfig,
    SamplerConfig, SupError,
};
pub use suite::{
    evaluate_approximator, run_verification_suite, size_limits, write_csv, ErrorReport, RowConfig,
    SuiteConfig, SuiteOutcome, CSV_COLUMNS,
};

/// Seed used when neither `--seed` nor `RELUNET_SEED` is given.
pub const DEFAULT_SEED: u64 = 1729;
