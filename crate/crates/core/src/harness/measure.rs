use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::approx::{ConstructedApproximator, EmpiricalModulus, TargetFunction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    /// Accepted samples to collect outside the trifling region.
    pub samples: usize,
    /// Draws allowed per requested sample before giving up.
    pub attempts_per_sample: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            samples: 10_000,
            attempts_per_sample: 50,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupError {
    /// Largest `|f - φ|` over the accepted samples and all corners `x_β`.
    pub sup: f64,
    /// Largest `|f(x_β) - φ(x)|` over the cube corners and centres.
    pub plateau: f64,
    pub accepted: usize,
    pub attempted: usize,
}

/// Maps a point of the unit cube to the approximator's input domain.
fn to_domain(a: &ConstructedApproximator, t: &[f64]) -> Vec<f64> {
    match a.radius {
        Some(r) => t.iter().map(|v| 2.0 * r * v - r).collect(),
        None => t.to_vec(),
    }
}

fn eval_err(f: &TargetFunction, a: &ConstructedApproximator, t: &[f64]) -> f64 {
    let x = to_domain(a, t);
    (f.eval(&x) - a.eval(&x)).abs()
}

/// Sup error over uniform samples of `[0,1]^d ∖ Ω` plus every corner `x_β`.
/// `f` is evaluated in the approximator's own coordinates.
pub fn measure_sup_error(
    f: &TargetFunction,
    a: &ConstructedApproximator,
    cfg: &SamplerConfig,
) -> Result<SupError> {
    let spec = &a.spec;
    let d = spec.d as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let limit = cfg
        .samples
        .saturating_mul(cfg.attempts_per_sample)
        .max(cfg.samples);
    let mut points = Vec::with_capacity(cfg.samples);
    let mut attempted = 0;
    while points.len() < cfg.samples {
        if attempted >= limit {
            return Err(Error::SamplerStarvation {
                accepted: points.len(),
                attempted,
            });
        }
        attempted += 1;
        let t: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
        if !spec.in_trifling_region(&t) {
            points.push(t);
        }
    }
    let sampled = points
        .par_iter()
        .map(|t| eval_err(f, a, t))
        .reduce(|| 0.0, f64::max);

    let cubes = spec.cube_count()?;
    let plateau = (0..cubes)
        .into_par_iter()
        .map(|idx| {
            let beta = spec.beta(idx);
            let corner = spec.representative(&beta);
            let centre: Vec<f64> = spec
                .cube(&beta)
                .iter()
                .map(|(lo, hi)| 0.5 * (lo + hi))
                .collect();
            let want = a.sample(idx);
            let x0 = to_domain(a, &corner);
            let x1 = to_domain(a, &centre);
            let e0 = (a.eval(&x0) - want).abs();
            let e1 = (a.eval(&x1) - want).abs();
            (e0.max(e1), (f.eval(&x0) - a.eval(&x0)).abs())
        })
        .reduce(|| (0.0, 0.0), |p, q| (p.0.max(q.0), p.1.max(q.1)));
    Ok(SupError {
        sup: sampled.max(plateau.1),
        plateau: plateau.0,
        accepted: points.len(),
        attempted,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub samples: usize,
    pub seed: u64,
    /// Midpoint rule instead of Monte Carlo; only for `d = 1`.
    pub grid: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            samples: 10_000,
            seed: 0,
            grid: false,
        }
    }
}

/// `(∫|f - φ|^p)^{1/p}` over the whole cube with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpEstimate {
    pub value: f64,
    pub std_err: f64,
}

pub fn measure_lp_error(
    f: &TargetFunction,
    a: &ConstructedApproximator,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<LpEstimate> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::invalid("p", format!("{p} is not in [1, inf)")));
    }
    if cfg.samples == 0 {
        return Err(Error::invalid("samples", "must be positive"));
    }
    let d = a.spec.d as usize;
    if cfg.grid {
        if d != 1 {
            return Err(Error::invalid(
                "grid",
                "grid quadrature is only available for d = 1",
            ));
        }
        let n = cfg.samples;
        let sum: f64 = (0..n)
            .into_par_iter()
            .map(|i| eval_err(f, a, &[(i as f64 + 0.5) / n as f64]).powf(p))
            .sum();
        return Ok(LpEstimate {
            value: (sum / n as f64).powf(1.0 / p),
            std_err: 0.0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points: Vec<Vec<f64>> = (0..cfg.samples)
        .map(|_| (0..d).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let vals: Vec<f64> = points
        .par_iter()
        .map(|t| eval_err(f, a, t).powf(p))
        .collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = if vals.len() > 1 {
        vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let se_mean = (var / n).sqrt();
    let value = mean.powf(1.0 / p);
    // delta method for m^{1/p}
    let std_err = if mean > 0.0 {
        se_mean * value / (p * mean)
    } else {
        0.0
    };
    Ok(LpEstimate { value, std_err })
}

/// `ω̂(r)`: largest `|f(x) - f(y)|` over sampled pairs with `‖x - y‖₂ <= r`.
///
/// Pairs drawn for smaller radii also count for larger ones, so the table
/// is nondecreasing. It is a lower estimate of the true modulus.
pub fn estimate_modulus(
    f: &TargetFunction,
    d: u32,
    radii: &[f64],
    pairs: usize,
    seed: u64,
) -> Result<EmpiricalModulus> {
    if pairs < 1000 {
        return Err(Error::invalid(
            "pairs",
            format!("{pairs} is below the minimum of 1000"),
        ));
    }
    let mut sorted = radii.to_vec();
    if sorted.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::invalid("radii", "must be finite and positive"));
    }
    sorted.sort_by(f64::total_cmp);
    let d = d as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(sorted.len());
    let mut best: f64 = 0.0;
    for &r in &sorted {
        let batch: Vec<(Vec<f64>, Vec<f64>)> = (0..pairs)
            .map(|_| {
                let x: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
                let dir: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
                let norm = dir
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt()
                    .max(f64::MIN_POSITIVE);
                let len = r * rng.gen::<f64>().powf(0.25);
                // clamping only shortens the step
                let y = x
                    .iter()
                    .zip(&dir)
                    .map(|(xi, di)| (xi + len * di / norm).clamp(0.0, 1.0))
                    .collect();
                (x, y)
            })
            .collect();
        let m = batch
            .par_iter()
            .map(|(x, y)| (f.eval(x) - f.eval(y)).abs())
            .reduce(|| 0.0, f64::max);
        best = best.max(m);
        values.push(best);
    }
    Ok(EmpiricalModulus {
        radii: sorted,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{build_approximator, DeltaPolicy, Modulus};

    #[test]
    fn constant_is_exact() {
        let f = TargetFunction::new("c", 1, Modulus::lipschitz(0.0), |_| 0.3);
        let a = build_approximator(&f, 2, 1, 1, DeltaPolicy::Max).unwrap();
        let s = measure_sup_error(&f, &a, &SamplerConfig::default()).unwrap();
        assert!(s.sup <= 1e-8);
        let l = measure_lp_error(&f, &a, 1.0, &QuadratureConfig::default()).unwrap();
        assert!(l.value <= 1e-8);
    }

    #[test]
    fn identity_sup_error() {
        let f = TargetFunction::new("x", 1, Modulus::lipschitz(1.0), |x| x[0]);
        let a = build_approximator(&f, 2, 1, 1, DeltaPolicy::Max).unwrap();
        let s = measure_sup_error(&f, &a, &SamplerConfig::default()).unwrap();
        assert!(s.sup <= 0.5);
        assert!(s.plateau <= 2.0 * a.epsilon_used + 1e-8);
        assert_eq!(s.accepted, 10_000);
    }

    #[test]
    fn l1_decomposition() {
        let f = TargetFunction::new("x", 1, Modulus::lipschitz(1.0), |x| x[0]);
        let a = build_approximator(&f, 2, 1, 1, DeltaPolicy::Fixed(1.0 / 12.0)).unwrap();
        let sup = measure_sup_error(&f, &a, &SamplerConfig::default())
            .unwrap()
            .sup;
        let l1 = measure_lp_error(
            &f,
            &a,
            1.0,
            &QuadratureConfig {
                samples: 20_000,
                seed: 3,
                grid: true,
            },
        )
        .unwrap();
        // f and φ both stay in [0, 1], so |f - φ| <= 1 on Ω
        let bound = sup + a.spec.trifling_measure_bound() * 1.0;
        assert!(l1.value <= bound);
    }

    #[test]
    fn starvation_reported() {
        let f = TargetFunction::new("x", 1, Modulus::lipschitz(1.0), |x| x[0]);
        let a = build_approximator(&f, 2, 1, 1, DeltaPolicy::Max).unwrap();
        let cfg = SamplerConfig {
            samples: 100,
            attempts_per_sample: 1,
            seed: 1,
        };
        // a quarter of the draws land in Ω, and no retries are allowed
        assert!(matches!(
            measure_sup_error(&f, &a, &cfg),
            Err(Error::SamplerStarvation { attempted: 100, .. })
        ));
    }

    #[test]
    fn modulus_of_affine() {
        let f = TargetFunction::new("2x", 1, Modulus::lipschitz(2.0), |x| 2.0 * x[0]);
        let radii = [0.05, 0.1, 0.25, 0.5];
        let m = estimate_modulus(&f, 1, &radii, 2000, 9).unwrap();
        for (r, v) in m.radii.iter().zip(&m.values) {
            assert!(*v <= 2.0 * r + 1e-12);
            assert!(*v >= 0.95 * 2.0 * r, "r={r} v={v}");
        }
        assert!(m.values.windows(2).all(|w| w[0] <= w[1]));
        let c = TargetFunction::new("c", 2, Modulus::lipschitz(0.0), |_| 1.0);
        let m = estimate_modulus(&c, 2, &radii, 1000, 9).unwrap();
        assert!(m.values.iter().all(|v| *v == 0.0));
        assert!(estimate_modulus(&c, 2, &radii, 10, 9).is_err());
    }
}
