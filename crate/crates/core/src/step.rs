//! Step-function networks: `φ(x) = k` on `[k/K, (k+1)/K - δ]` for `k < K - 1`
//! and on `[(K-1)/K, 1]` for the last step.
//!
//! The `K = M̃ L̃` steps are produced in two rounds. A coarse network `φ₁`
//! resolves `m = ⌊M̃ x⌋`, a fine network `φ₂` resolves the position of
//! `x - m/M̃` among the `L̃` sub-steps, and `φ(x) = L̃ φ₁(x) + φ₂(x - φ₁(x)/M̃)`.

use crate::cpwl::{fit_samples, wide_to_deep, SampleSet};
use crate::error::{Error, Result};
use crate::intmath::{floor_log3, floor_root};
use crate::network::{compose_serial, widen_with_passthrough, AffineLayer, ReluNetwork};

#[derive(Debug, Clone, PartialEq)]
pub struct StepEncoderParams {
    pub n_width: u64,
    pub l_depth: u64,
    pub d: u32,
    pub delta: f64,
    /// `⌊log₃(N + 2)⌋`
    pub n: u64,
    /// `⌊N^{1/d}⌋`
    pub a: u64,
    /// `⌊L^{1/d}⌋`
    pub b: u64,
    /// `⌊n^{1/d}⌋`
    pub c: u64,
    pub m_tilde: u64,
    pub l_tilde: u64,
    pub k: u64,
}

impl StepEncoderParams {
    /// Derives the step counts from `(N, L, d)` with an explicit `δ`.
    pub fn new(n_width: u64, l_depth: u64, d: u32, delta: f64) -> Result<Self> {
        let mut p = Self::with_max_delta(n_width, l_depth, d)?;
        let max = p.max_delta();
        if !(delta > 0.0 && delta <= max) {
            return Err(Error::invalid(
                "delta",
                format!("{delta} is outside (0, 1/(3K)] = (0, {max}]"),
            ));
        }
        p.delta = delta;
        p.check_resolution()?;
        Ok(p)
    }

    /// Same as [`new`](Self::new) with `δ = 1/(3K)`.
    pub fn with_max_delta(n_width: u64, l_depth: u64, d: u32) -> Result<Self> {
        if n_width == 0 || l_depth == 0 || d == 0 {
            return Err(Error::invalid("N/L/d", "all must be positive"));
        }
        let n = u64::from(floor_log3(n_width + 2));
        let (a, b, c) = (
            floor_root(n_width, d),
            floor_root(l_depth, d),
            floor_root(n, d),
        );
        let m_tilde = a * a * b;
        let l_tilde = b * c;
        let k = m_tilde * l_tilde;
        let mut p = Self {
            n_width,
            l_depth,
            d,
            delta: 0.0,
            n,
            a,
            b,
            c,
            m_tilde,
            l_tilde,
            k,
        };
        p.delta = p.max_delta();
        p.check_resolution()?;
        Ok(p)
    }

    pub fn max_delta(&self) -> f64 {
        1.0 / (3.0 * self.k as f64)
    }

    fn check_resolution(&self) -> Result<()> {
        let narrowest = 1.0 / self.k as f64 - self.delta;
        let ulp = f64::EPSILON;
        if narrowest < 4.0 * ulp || self.delta < 4.0 * ulp {
            return Err(Error::Capacity {
                limit: "step resolution",
                detail: format!(
                    "K = {} with delta = {} leaves features of {:e}, below 4 ulps of 1.0",
                    self.k,
                    self.delta,
                    narrowest.min(self.delta)
                ),
            });
        }
        Ok(())
    }

    pub fn width_bound(&self) -> usize {
        (8 * self.a + 3) as usize
    }

    pub fn depth_bound(&self) -> usize {
        (2 * self.b + 5) as usize
    }
}

/// Closed interval on which the step network equals `k`.
pub fn step_plateau(k: u64, p: &StepEncoderParams) -> Result<(f64, f64)> {
    if k >= p.k {
        return Err(Error::invalid("k", format!("{k} is not below K = {}", p.k)));
    }
    let kk = p.k as f64;
    let lo = k as f64 / kk;
    let hi = if k + 2 <= p.k {
        (k + 1) as f64 / kk - p.delta
    } else {
        1.0
    };
    Ok((lo, hi))
}

/// Samples `(i/S, i)` and `((i+1)/S - δ, i)` for `i < count`, closing with
/// `(end, count - 1)` and `(2, 0)`.
fn staircase(count: u64, scale: f64, delta: f64, end: f64) -> Result<SampleSet> {
    let mut pts = Vec::with_capacity(2 * count as usize + 1);
    for i in 0..count {
        let v = i as f64;
        pts.push((v / scale, v));
        if i + 2 <= count {
            pts.push(((v + 1.0) / scale - delta, v));
        }
    }
    pts.push((end, (count - 1) as f64));
    pts.push((2.0, 0.0));
    SampleSet::from_points(&pts)
}

pub fn build_step_network(p: &StepEncoderParams) -> Result<ReluNetwork> {
    let (a, b, c) = (p.a as usize, p.b as usize, p.c as usize);
    let mt = p.m_tilde as f64;
    let lt = p.l_tilde as f64;

    let coarse = staircase(p.m_tilde, mt, p.delta, 1.0)?;
    let phi1 = wide_to_deep(&fit_samples(&coarse, a, 2 * a * b - 1)?, b)?;
    let fine = staircase(p.l_tilde, p.k as f64, p.delta, 1.0 / mt)?;
    let phi2 = wide_to_deep(&fit_samples(&fine, c, 2 * b - 1)?, b)?;

    let dup = ReluNetwork::affine(AffineLayer::new(2, 1, vec![1.0, 1.0], vec![0.0; 2])?)?;
    let split = ReluNetwork::affine(AffineLayer::new(
        2,
        2,
        vec![-1.0 / mt, 1.0, lt, 0.0],
        vec![0.0; 2],
    )?)?;
    let sum = ReluNetwork::affine(AffineLayer::new(1, 2, vec![1.0, 1.0], vec![0.0])?)?;

    let net = compose_serial(&dup, &widen_with_passthrough(&phi1, 1, 2.0)?)?;
    let net = compose_serial(&net, &split)?;
    let net = compose_serial(&net, &widen_with_passthrough(&phi2, 1, p.k as f64)?)?;
    compose_serial(&net, &sum)
}
