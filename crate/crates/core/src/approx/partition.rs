use crate::error::{Error, Result};
use crate::step::StepEncoderParams;

/// How `δ` is chosen for a partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaPolicy {
    /// `δ = 1/(3K)`.
    Max,
    /// A caller-chosen `δ`, which must lie in `(0, 1/(3K)]`.
    Fixed(f64),
}

/// The cubes `Q_β`, their corners `x_β = β/K`, and the trifling region `Ω`
/// left between them.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSpec {
    pub k: u64,
    pub delta: f64,
    pub d: u32,
    pub n: u64,
    pub step: StepEncoderParams,
}

pub fn make_partition(
    n_width: u64,
    l_depth: u64,
    d: u32,
    policy: DeltaPolicy,
) -> Result<PartitionSpec> {
    let step = match policy {
        DeltaPolicy::Max => StepEncoderParams::with_max_delta(n_width, l_depth, d)?,
        DeltaPolicy::Fixed(delta) => StepEncoderParams::new(n_width, l_depth, d, delta)?,
    };
    Ok(PartitionSpec {
        k: step.k,
        delta: step.delta,
        d,
        n: step.n,
        step,
    })
}

impl PartitionSpec {
    /// `K^d`, or a capacity error if it does not fit in a `usize`.
    pub fn cube_count(&self) -> Result<usize> {
        self.k
            .checked_pow(self.d)
            .and_then(|v| usize::try_from(v).ok())
            .ok_or_else(|| Error::Capacity {
                limit: "cube count K^d",
                detail: format!("K = {} and d = {} overflow", self.k, self.d),
            })
    }

    /// Multi-index of the `idx`-th cube, first coordinate most significant.
    pub fn beta(&self, mut idx: usize) -> Vec<u64> {
        let mut beta = vec![0; self.d as usize];
        for b in beta.iter_mut().rev() {
            *b = idx as u64 % self.k;
            idx /= self.k as usize;
        }
        beta
    }

    pub fn representative(&self, beta: &[u64]) -> Vec<f64> {
        beta.iter().map(|&b| b as f64 / self.k as f64).collect()
    }

    /// Per-coordinate closed intervals making up `Q_β`.
    pub fn cube(&self, beta: &[u64]) -> Vec<(f64, f64)> {
        beta.iter()
            .map(|&b| crate::step::step_plateau(b, &self.step).expect("index below K"))
            .collect()
    }

    pub fn in_trifling_region(&self, x: &[f64]) -> bool {
        in_trifling_region(x, self)
    }

    /// `K d δ`, an upper bound on the volume of `Ω`. Vacuous for `K = 1`,
    /// where `Ω` is empty.
    pub fn trifling_measure_bound(&self) -> f64 {
        self.k as f64 * f64::from(self.d) * self.delta
    }
}

/// Whether some coordinate lies in an open slab `(k/K - δ, k/K)`,
/// `1 <= k <= K - 1`.
pub fn in_trifling_region(x: &[f64], spec: &PartitionSpec) -> bool {
    let kk = spec.k as f64;
    x.iter().any(|&xi| {
        let base = (xi * kk).floor();
        [base, base + 1.0]
            .into_iter()
            .any(|k| k >= 1.0 && k <= kk - 1.0 && xi > k / kk - spec.delta && xi < k / kk)
    })
}

pub fn trifling_measure_bound(spec: &PartitionSpec) -> f64 {
    spec.trifling_measure_bound()
}

/// Coefficients of `ψ₁(x) = x_d/(2K^d) + Σ_{i<d} x_i/K^i`.
pub fn index_map_psi1(d: u32, k: u64) -> Vec<f64> {
    let kk = k as f64;
    (1..=d)
        .map(|i| {
            if i == d {
                1.0 / (2.0 * kk.powi(d as i32))
            } else {
                1.0 / kk.powi(i as i32)
            }
        })
        .collect()
}
