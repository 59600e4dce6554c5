//! The full approximator `φ(x) = ψ̃₂(j(Φ₁(x))) + shift` on `[0, 1]^d`.
//!
//! `Φ₁` applies a step network to each coordinate, so on the cube `Q_β` it
//! returns `β`. The affine map `j` packs `β` into one integer index, and the
//! point fitter `ψ̃₂` returns the (quantized) value of `f(x_β) - shift` stored
//! at that index.

mod bounds;
mod bridge;
mod partition;
mod target;

pub use bounds::{error_bound, lp_delta, rate_radius, BoundVariant};
pub use bridge::{bridge_index, build_bridge, BridgeFunction, ShiftPolicy, EPSILON_FLOOR};
pub use partition::{
    in_trifling_region, index_map_psi1, make_partition, trifling_measure_bound, DeltaPolicy,
    PartitionSpec,
};
pub use target::{EmpiricalModulus, Evaluator, Modulus, TargetFunction};

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::bits::build_point_fitter;
use crate::error::{Error, Result};
use crate::intmath::ceil_sqrt2_times;
use crate::network::{
    before_affine, compose_serial, stack_parallel, then_affine, AffineLayer, NetworkStats,
    ReluNetwork,
};
use crate::step::build_step_network;

/// Default limit on the number of cubes `K^d`.
pub const DEFAULT_MAX_CUBES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxConfig {
    pub delta: DeltaPolicy,
    pub shift: ShiftPolicy,
    pub max_cubes: usize,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        Self {
            delta: DeltaPolicy::Max,
            shift: ShiftPolicy::EmpiricalMin,
            max_cubes: DEFAULT_MAX_CUBES,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConstructedApproximator {
    pub net: ReluNetwork,
    pub spec: PartitionSpec,
    pub epsilon_used: f64,
    pub shift: f64,
    pub stats: NetworkStats,
    pub bridge: BridgeFunction,
    pub n_width: u64,
    pub l_depth: u64,
    /// `L' = ⌈√2 L⌉`, the depth parameter handed to the point fitter.
    pub inner_depth: u64,
    /// Half-width `R` when the network was built for `[-R, R]^d`.
    pub radius: Option<f64>,
}

impl ConstructedApproximator {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.net.eval1(x)
    }

    /// Sampled `f(x_β)` for the `idx`-th cube.
    pub fn sample(&self, idx: usize) -> f64 {
        self.bridge.samples[idx]
    }

    /// Value the network is designed to take on the `idx`-th cube.
    pub fn plateau_value(&self, idx: usize) -> f64 {
        let j = bridge_index(&self.spec.beta(idx), self.spec.k) as usize;
        (self.bridge.values[j] / self.epsilon_used).floor() * self.epsilon_used + self.shift
    }

    /// Largest `|φ|` any input can produce: `|shift| + max g`.
    pub fn output_bound(&self) -> f64 {
        let top = self.bridge.values.iter().copied().fold(0.0, f64::max);
        self.shift.abs().max((self.shift + top).abs())
    }

    pub fn metadata(&self) -> BTreeMap<String, Value> {
        let mut m = BTreeMap::new();
        m.insert("N".into(), json!(self.n_width));
        m.insert("L".into(), json!(self.l_depth));
        m.insert("d".into(), json!(self.spec.d));
        m.insert("K".into(), json!(self.spec.k));
        m.insert("delta".into(), json!(self.spec.delta));
        m.insert("epsilon".into(), json!(self.epsilon_used));
        m.insert("shift".into(), json!(self.shift));
        if let Some(r) = self.radius {
            m.insert("R".into(), json!(r));
        }
        m
    }
}

/// Builds `φ` for `f` on `[0, 1]^d` with the default shift and cube cap.
pub fn build_approximator(
    f: &TargetFunction,
    n_width: u64,
    l_depth: u64,
    d: u32,
    delta: DeltaPolicy,
) -> Result<ConstructedApproximator> {
    build_approximator_with(
        f,
        n_width,
        l_depth,
        d,
        &ApproxConfig {
            delta,
            ..ApproxConfig::default()
        },
    )
}

pub fn build_approximator_with(
    f: &TargetFunction,
    n_width: u64,
    l_depth: u64,
    d: u32,
    cfg: &ApproxConfig,
) -> Result<ConstructedApproximator> {
    if f.d != d {
        return Err(Error::DimensionMismatch {
            context: "target dimension",
            expected: d as usize,
            actual: f.d as usize,
        });
    }
    let spec = make_partition(n_width, l_depth, d, cfg.delta)?;
    let cubes = spec.cube_count()?;
    if cubes > cfg.max_cubes {
        return Err(Error::Capacity {
            limit: "cube count K^d",
            detail: format!("K^d = {cubes} exceeds the cap of {}", cfg.max_cubes),
        });
    }
    let inner_depth = ceil_sqrt2_times(l_depth);
    let bits = inner_depth * spec.n;
    if bits > crate::bits::MAX_BITS as u64 {
        return Err(Error::Capacity {
            limit: "bit budget ceil(sqrt(2) L) * floor(log3(N+2))",
            detail: format!("{bits} bits exceed {}", crate::bits::MAX_BITS),
        });
    }
    let slots = n_width * n_width * inner_depth * inner_depth * spec.n;
    if 2 * cubes as u64 > slots {
        return Err(Error::Capacity {
            limit: "point count 2K^d <= N^2 L'^2 n",
            detail: format!("2K^d = {} exceeds {slots}", 2 * cubes),
        });
    }

    let (bridge, epsilon_used, shift) = build_bridge(f, &spec, cfg.shift)?;

    let step = build_step_network(&spec.step)?;
    let phi1 = stack_parallel(&vec![step; d as usize], false)?;
    let k = spec.k as f64;
    let coeffs: Vec<f64> = (0..d)
        .map(|i| {
            if i + 1 == d {
                1.0
            } else {
                2.0 * k.powi((d - 1 - i) as i32)
            }
        })
        .collect();
    let index = then_affine(&phi1, AffineLayer::new(1, d as usize, coeffs, vec![0.0])?)?;
    let fitter = build_point_fitter(
        n_width as usize,
        inner_depth as usize,
        &bridge.values[..2 * cubes],
        epsilon_used,
    )?;
    let net = then_affine(
        &compose_serial(&index, &fitter)?,
        AffineLayer::new(1, 1, vec![1.0], vec![shift])?,
    )?;
    let stats = net.stats();
    Ok(ConstructedApproximator {
        net,
        spec,
        epsilon_used,
        shift,
        stats,
        bridge,
        n_width,
        l_depth,
        inner_depth,
        radius: None,
    })
}

/// Builds `φ` for `f` on `[-R, R]^d` as `φ̃((x + R) / (2R))`, where `φ̃`
/// approximates `t ↦ f(2R t - R)` on the unit cube.
///
/// The caller supplies `f` on the whole box. Its modulus is taken in the
/// original coordinates and rescaled.
pub fn rescale_to_box(
    f: &TargetFunction,
    radius: f64,
    n_width: u64,
    l_depth: u64,
    d: u32,
    cfg: &ApproxConfig,
) -> Result<ConstructedApproximator> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::invalid(
            "R",
            format!("{radius} is not a positive number"),
        ));
    }
    let scale = 2.0 * radius;
    let modulus = match &f.modulus {
        Modulus::Holder { lambda, alpha } => Modulus::Holder {
            lambda: lambda * scale.powf(*alpha),
            alpha: *alpha,
        },
        Modulus::Empirical(t) => Modulus::Empirical(EmpiricalModulus {
            radii: t.radii.iter().map(|r| r / scale).collect(),
            values: t.values.clone(),
        }),
    };
    let inner = f.evaluator();
    let unit = TargetFunction::new(
        format!("{}@unit", f.name),
        f.d,
        modulus,
        move |t: &[f64]| {
            let x: Vec<f64> = t.iter().map(|ti| scale * ti - radius).collect();
            inner(&x)
        },
    );
    let mut out = build_approximator_with(&unit, n_width, l_depth, d, cfg)?;
    let dd = d as usize;
    let mut w = vec![0.0; dd * dd];
    for i in 0..dd {
        w[i * dd + i] = 1.0 / scale;
    }
    out.net = before_affine(AffineLayer::new(dd, dd, w, vec![0.5; dd])?, &out.net)?;
    out.stats = out.net.stats();
    out.radius = Some(radius);
    Ok(out)
}
