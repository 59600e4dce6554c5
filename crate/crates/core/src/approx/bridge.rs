use rayon::prelude::*;

use super::{PartitionSpec, TargetFunction};
use crate::cpwl::PiecewiseLinear;
use crate::error::Result;

/// Smallest `ε` handed to the point fitter, used when all gaps vanish.
pub const EPSILON_FLOOR: f64 = 8.673_617_379_884_035e-19; // 2^-60

/// Where the constant added back after fitting comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftPolicy {
    /// Minimum of `f` over the sampled points, so `f - shift >= 0` there.
    #[default]
    EmpiricalMin,
    /// `f(0) - ω(√d)`, nonnegative offset guaranteed by the declared modulus.
    Analytic,
}

/// The one-dimensional function `g` on the grid `j / (2K^d)`,
/// `j = 0..=2K^d`.
///
/// `g` takes the shifted sample `f(x_β) - shift` at `j(β) = β_d + 2Σ_{i<d}
/// β_i K^{d-i}` and interpolates linearly across each gap of `K + 1` unused
/// indices between consecutive blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeFunction {
    pub k: u64,
    pub d: u32,
    /// `g(j / (2K^d))`.
    pub values: Vec<f64>,
    /// `f(x_β)` in the row-major order of [`PartitionSpec::beta`].
    pub samples: Vec<f64>,
    /// `f(1, …, 1)`.
    pub corner: f64,
}

impl BridgeFunction {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_pwl(&self) -> PiecewiseLinear {
        let scale = (self.values.len() - 1) as f64;
        let pts: Vec<(f64, f64)> = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| (j as f64 / scale, v))
            .collect();
        PiecewiseLinear::from_points(&pts, 0.0, 0.0).expect("grid is increasing")
    }

    pub fn max_gap(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max)
    }
}

/// Index of `β` on the bridge grid.
pub fn bridge_index(beta: &[u64], k: u64) -> u64 {
    let d = beta.len();
    let mut j = beta[d - 1];
    for (i, &b) in beta[..d - 1].iter().enumerate() {
        j += 2 * b * k.pow((d - 1 - i) as u32);
    }
    j
}

/// Samples `f` at every `x_β` and at the far corner, builds `g` and returns
/// `(g, ε, shift)` with `ε = max(max adjacent gap of g, 2^-60)`.
pub fn build_bridge(
    f: &TargetFunction,
    spec: &PartitionSpec,
    policy: ShiftPolicy,
) -> Result<(BridgeFunction, f64, f64)> {
    let count = spec.cube_count()?;
    let samples: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|idx| f.eval(&spec.representative(&spec.beta(idx))))
        .collect();
    let corner = f.eval(&vec![1.0; spec.d as usize]);
    let shift = match policy {
        ShiftPolicy::EmpiricalMin => samples.iter().copied().fold(corner, f64::min),
        ShiftPolicy::Analytic => {
            f.eval(&vec![0.0; spec.d as usize]) - f.omega(f64::from(spec.d).sqrt())
        }
    };

    let k = spec.k as usize;
    let total = 2 * count;
    let mut values = vec![f64::NAN; total + 1];
    for (idx, s) in samples.iter().enumerate() {
        values[bridge_index(&spec.beta(idx), spec.k) as usize] = (s - shift).max(0.0);
    }
    values[total] = (corner - shift).max(0.0);
    for block in 1..=count / k {
        let (lo, hi) = (2 * k * block - k - 1, 2 * k * block);
        let (a, b) = (values[lo], values[hi]);
        let span = (hi - lo) as f64;
        for (off, v) in values[lo + 1..hi].iter_mut().enumerate() {
            let t = (off + 1) as f64 / span;
            *v = a + (b - a) * t;
        }
    }
    let g = BridgeFunction {
        k: spec.k,
        d: spec.d,
        values,
        samples,
        corner,
    };
    let eps = g.max_gap().max(EPSILON_FLOOR);
    Ok((g, eps, shift))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{index_map_psi1, make_partition, DeltaPolicy, Modulus};

    fn identity_1d() -> TargetFunction {
        TargetFunction::new("x", 1, Modulus::lipschitz(1.0), |x| x[0])
    }

    #[test]
    fn floor_constant() {
        assert_eq!(EPSILON_FLOOR, 2f64.powi(-60));
    }

    #[test]
    fn one_dimensional_example() {
        // N = 1, L = 1 gives K = 1; N = 2 keeps n = 1 so K = 4.
        let spec = make_partition(2, 1, 1, DeltaPolicy::Max).unwrap();
        assert_eq!(spec.k, 4);
        let f = TargetFunction::new("x+1", 1, Modulus::lipschitz(1.0), |x| x[0] + 1.0);
        let (g, eps, shift) = build_bridge(&f, &spec, ShiftPolicy::EmpiricalMin).unwrap();
        assert_eq!(shift, 1.0);
        assert_eq!(g.len(), 9);
        for b in 0..4 {
            assert_eq!(g.values[b], b as f64 / 4.0);
        }
        // g is linear from j = 3 (value 3/4) to j = 8 (value 1)
        for j in 3..=8 {
            let want = 0.75 + 0.25 * (j - 3) as f64 / 5.0;
            assert!((g.values[j] - want).abs() < 1e-15);
        }
        assert_eq!(eps, 0.25);
        assert!(eps <= f.omega(1.0 / 4.0));
    }

    #[test]
    fn two_by_two_example() {
        // K = 2 is not reachable from (N, L, d); build the spec by hand.
        let mut spec = make_partition(4, 1, 1, DeltaPolicy::Max).unwrap();
        spec.k = 2;
        spec.delta = 1.0 / 6.0;
        let (g, _, _) = build_bridge(&identity_1d(), &spec, ShiftPolicy::EmpiricalMin).unwrap();
        assert_eq!(g.values.len(), 5);
        assert_eq!(g.values[0], 0.0);
        assert_eq!(g.values[1], 0.5);
        assert_eq!(g.values[4], 1.0);
        assert!((g.values[2] - 2.0 / 3.0).abs() < 1e-15);
        assert!((g.values[3] - 5.0 / 6.0).abs() < 1e-15);
        let c = index_map_psi1(1, 2);
        assert_eq!(g.to_pwl().eval(c[0]), 0.5);
    }

    #[test]
    fn index_matches_psi1() {
        let spec = make_partition(4, 1, 2, DeltaPolicy::Max).unwrap();
        let c = index_map_psi1(2, spec.k);
        let scale = 2.0 * (spec.k * spec.k) as f64;
        for idx in 0..spec.cube_count().unwrap() {
            let beta = spec.beta(idx);
            let t: f64 = beta.iter().zip(&c).map(|(b, c)| *b as f64 * c).sum();
            assert_eq!(bridge_index(&beta, spec.k) as f64, t * scale);
        }
    }

    #[test]
    fn constant_gets_floor() {
        let spec = make_partition(2, 1, 1, DeltaPolicy::Max).unwrap();
        let f = TargetFunction::new("c", 1, Modulus::lipschitz(0.0), |_| 3.5);
        let (g, eps, shift) = build_bridge(&f, &spec, ShiftPolicy::EmpiricalMin).unwrap();
        assert_eq!(shift, 3.5);
        assert!(g.values.iter().all(|&v| v == 0.0));
        assert_eq!(eps, EPSILON_FLOOR);
    }

    #[test]
    fn gap_within_modulus_2d() {
        let spec = make_partition(4, 1, 2, DeltaPolicy::Max).unwrap();
        let f = TargetFunction::new("sum", 2, Modulus::lipschitz(2f64.sqrt()), |x| x[0] + x[1]);
        let (g, eps, _) = build_bridge(&f, &spec, ShiftPolicy::Analytic).unwrap();
        assert!(eps <= f.omega(2f64.sqrt() / spec.k as f64) + 1e-15);
        assert!(g
            .values
            .iter()
            .all(|&v| v >= 0.0 && v <= 2.0 * f.omega(2f64.sqrt())));
    }
}
