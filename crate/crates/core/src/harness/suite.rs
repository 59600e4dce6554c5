use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    lookup, measure_lp_error, measure_sup_error, CatalogEntry, QuadratureConfig, SamplerConfig,
};
use crate::approx::{
    build_approximator, error_bound, BoundVariant, ConstructedApproximator, DeltaPolicy,
};
use crate::error::{Error, Result};
use crate::intmath::floor_root;
use crate::network::NetworkStats;

/// One suite row: a catalog target and the network parameters to try.
#[derive(Debug, Clone, PartialEq)]
pub struct RowConfig {
    pub target: String,
    pub d: u32,
    pub n_width: u64,
    pub l_depth: u64,
    pub delta: DeltaPolicy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub rows: Vec<RowConfig>,
    pub seed: u64,
    pub sup_samples: usize,
    pub lp_samples: usize,
    /// Multiplier on the bound a row must stay under. `1.0` checks the bound
    /// as stated.
    pub tolerance: f64,
}

impl SuiteConfig {
    /// All combinations of `targets × ns × ls` in dimension `d`.
    pub fn grid(targets: &[&str], d: u32, ns: &[u64], ls: &[u64], seed: u64) -> Self {
        let mut rows = Vec::new();
        for t in targets {
            for &n in ns {
                for &l in ls {
                    rows.push(RowConfig {
                        target: (*t).to_string(),
                        d,
                        n_width: n,
                        l_depth: l,
                        delta: DeltaPolicy::Max,
                    });
                }
            }
        }
        Self {
            rows,
            seed,
            sup_samples: 10_000,
            lp_samples: 10_000,
            tolerance: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub target: String,
    pub d: u32,
    pub n_width: u64,
    pub l_depth: u64,
    pub k: u64,
    pub delta: f64,
    pub epsilon: f64,
    pub stats: NetworkStats,
    pub sup_err_outside: f64,
    /// Largest `|φ - f(x_β)|` at corners and centres of the cubes.
    pub plateau_err: f64,
    pub l1_err: f64,
    pub l1_se: f64,
    pub l2_err: f64,
    pub l2_se: f64,
    pub bound_maingap: f64,
    pub bound_main: f64,
    pub ratio: f64,
    pub accepted: usize,
    pub attempted: usize,
    /// Set when the bounds use an empirical modulus, which may be too small.
    pub modulus_lower_estimate: bool,
    pub seed: u64,
    pub wall_ms: u64,
    pub passed: bool,
    pub failures: Vec<String>,
}

impl ErrorReport {
    fn failed_build(row: &RowConfig, seed: u64, err: &Error) -> Self {
        Self {
            target: row.target.clone(),
            d: row.d,
            n_width: row.n_width,
            l_depth: row.l_depth,
            k: 0,
            delta: f64::NAN,
            epsilon: f64::NAN,
            stats: NetworkStats {
                width: 0,
                depth: 0,
                param_count: 0,
                width_vec: Vec::new(),
            },
            sup_err_outside: f64::NAN,
            plateau_err: f64::NAN,
            l1_err: f64::NAN,
            l1_se: f64::NAN,
            l2_err: f64::NAN,
            l2_se: f64::NAN,
            bound_maingap: f64::NAN,
            bound_main: f64::NAN,
            ratio: f64::NAN,
            accepted: 0,
            attempted: 0,
            modulus_lower_estimate: false,
            seed,
            wall_ms: 0,
            passed: false,
            failures: vec![format!("build failed: {err}")],
        }
    }
}

/// Width and depth limits `(max{8d⌊N^{1/d}⌋ + 3d, 16N + 30}, 11L + 18)`.
pub fn size_limits(n_width: u64, l_depth: u64, d: u32) -> (usize, usize) {
    let a = floor_root(n_width, d);
    let dd = u64::from(d);
    (
        (8 * dd * a + 3 * dd).max(16 * n_width + 30) as usize,
        (11 * l_depth + 18) as usize,
    )
}

/// Measures one built approximator and checks it against the bounds.
pub fn evaluate_approximator(
    entry: &CatalogEntry,
    a: &ConstructedApproximator,
    cfg: &SuiteConfig,
    seed: u64,
) -> Result<ErrorReport> {
    let start = Instant::now();
    let f = &entry.target;
    let d = a.spec.d;
    let sup = measure_sup_error(
        f,
        a,
        &SamplerConfig {
            samples: cfg.sup_samples,
            seed,
            ..SamplerConfig::default()
        },
    )?;
    let quad = QuadratureConfig {
        samples: cfg.lp_samples,
        seed: seed ^ 0x9e37_79b9,
        grid: false,
    };
    let l1 = measure_lp_error(f, a, 1.0, &quad)?;
    let l2 = measure_lp_error(f, a, 2.0, &quad)?;
    let bound_maingap = error_bound(&f.modulus, a.n_width, a.l_depth, d, BoundVariant::MainGap);
    let bound_main = error_bound(&f.modulus, a.n_width, a.l_depth, d, BoundVariant::Main);
    let ratio = if bound_maingap > 0.0 {
        sup.sup / bound_maingap
    } else if sup.sup <= 1e-8 {
        0.0
    } else {
        f64::INFINITY
    };

    let mut failures = Vec::new();
    if sup.sup.is_nan() || sup.sup > cfg.tolerance * bound_maingap + 1e-8 {
        failures.push(format!(
            "sup error {} exceeds bound {}",
            sup.sup,
            cfg.tolerance * bound_maingap
        ));
    }
    if sup.plateau.is_nan() || sup.plateau > 2.0 * a.epsilon_used + 1e-8 {
        failures.push(format!(
            "plateau error {} exceeds 2 eps = {}",
            sup.plateau,
            2.0 * a.epsilon_used
        ));
    }
    let stats = a.net.stats();
    let (wmax, dmax) = size_limits(a.n_width, a.l_depth, d);
    if stats.width > wmax {
        failures.push(format!("width {} exceeds {wmax}", stats.width));
    }
    if stats.depth > dmax {
        failures.push(format!("depth {} exceeds {dmax}", stats.depth));
    }
    if stats != a.stats {
        failures.push("recorded stats do not match the network".into());
    }
    Ok(ErrorReport {
        target: entry.name.to_string(),
        d,
        n_width: a.n_width,
        l_depth: a.l_depth,
        k: a.spec.k,
        delta: a.spec.delta,
        epsilon: a.epsilon_used,
        stats,
        sup_err_outside: sup.sup,
        plateau_err: sup.plateau,
        l1_err: l1.value,
        l1_se: l1.std_err,
        l2_err: l2.value,
        l2_se: l2.std_err,
        bound_maingap,
        bound_main,
        ratio,
        accepted: sup.accepted,
        attempted: sup.attempted,
        modulus_lower_estimate: !f.modulus.is_analytic(),
        seed,
        wall_ms: start.elapsed().as_millis() as u64,
        passed: failures.is_empty(),
        failures,
    })
}

fn run_row(row: &RowConfig, cfg: &SuiteConfig) -> ErrorReport {
    let start = Instant::now();
    let seed = cfg.seed;
    let built = lookup(&row.target, row.d, seed).and_then(|entry| {
        Ok((
            build_approximator(&entry.target, row.n_width, row.l_depth, row.d, row.delta)?,
            entry,
        ))
    });
    let mut report = match built.and_then(|(a, entry)| evaluate_approximator(&entry, &a, cfg, seed))
    {
        Ok(r) => r,
        Err(e) => ErrorReport::failed_build(row, seed, &e),
    };
    report.wall_ms = start.elapsed().as_millis() as u64;
    report
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub reports: Vec<ErrorReport>,
    pub passed: bool,
}

/// Runs every row (in parallel) and reports in row order.
pub fn run_verification_suite(cfg: &SuiteConfig) -> SuiteOutcome {
    let reports: Vec<ErrorReport> = cfg.rows.par_iter().map(|row| run_row(row, cfg)).collect();
    let passed = reports.iter().all(|r| r.passed);
    SuiteOutcome { reports, passed }
}

pub const CSV_COLUMNS: [&str; 18] = [
    "target",
    "d",
    "N",
    "L",
    "K",
    "delta",
    "epsilon",
    "width",
    "depth",
    "params",
    "sup_err_outside",
    "l1_err",
    "l2_err",
    "bound_maingap",
    "bound_main",
    "ratio",
    "seed",
    "wall_ms",
];

#[derive(Serialize)]
struct CsvRow<'a> {
    target: &'a str,
    d: u32,
    #[serde(rename = "N")]
    n: u64,
    #[serde(rename = "L")]
    l: u64,
    #[serde(rename = "K")]
    k: u64,
    delta: f64,
    epsilon: f64,
    width: usize,
    depth: usize,
    params: usize,
    sup_err_outside: f64,
    l1_err: f64,
    l2_err: f64,
    bound_maingap: f64,
    bound_main: f64,
    ratio: f64,
    seed: u64,
    wall_ms: u64,
}

pub fn write_csv<W: Write>(reports: &[ErrorReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(CsvRow {
            target: &r.target,
            d: r.d,
            n: r.n_width,
            l: r.l_depth,
            k: r.k,
            delta: r.delta,
            epsilon: r.epsilon,
            width: r.stats.width,
            depth: r.stats.depth,
            params: r.stats.param_count,
            sup_err_outside: r.sup_err_outside,
            l1_err: r.l1_err,
            l2_err: r.l2_err,
            bound_maingap: r.bound_maingap,
            bound_main: r.bound_main,
            ratio: r.ratio,
            seed: r.seed,
            wall_ms: r.wall_ms,
        })
        .map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(targets: &[&str]) -> SuiteConfig {
        let mut cfg = SuiteConfig::grid(targets, 1, &[1, 2], &[1], 5);
        cfg.sup_samples = 2000;
        cfg.lp_samples = 2000;
        cfg
    }

    #[test]
    fn default_rows_pass() {
        let out = run_verification_suite(&small(&["abs_pi", "constant", "sin_osc"]));
        for r in &out.reports {
            assert!(r.passed, "{r:?}");
            assert!(r.ratio <= 1.0);
        }
        assert!(out.passed);
    }

    #[test]
    fn tight_tolerance_fails() {
        let mut cfg = small(&["abs_pi"]);
        cfg.tolerance = 1e-6;
        let out = run_verification_suite(&cfg);
        assert!(!out.passed);
        assert!(out.reports.iter().all(|r| !r.failures.is_empty()));
    }

    #[test]
    fn bad_row_recorded() {
        let mut cfg = small(&["abs_pi"]);
        cfg.rows.push(RowConfig {
            target: "missing".into(),
            d: 1,
            n_width: 1,
            l_depth: 1,
            delta: DeltaPolicy::Max,
        });
        let out = run_verification_suite(&cfg);
        assert_eq!(out.reports.len(), 3);
        assert!(out.reports[0].passed);
        assert!(!out.reports[2].passed);
    }

    #[test]
    fn csv_header_order() {
        let out = run_verification_suite(&small(&["constant"]));
        let mut buf = Vec::new();
        write_csv(&out.reports, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(text.lines().count(), 3);
    }
}
