use super::SampleSet;
use crate::error::{Error, Result};
use crate::network::{AffineLayer, ReluNetwork};

/// Per-unit target on one group: value at the group's first sample and slope.
#[derive(Clone, Copy)]
struct Piece {
    value: f64,
    slope: f64,
}

const PARKED: Piece = Piece {
    value: -1.0,
    slope: 0.0,
};

/// Interpolates `N1 (N2 + 1) + 1` samples with a network of width vector
/// `[2 N1, 2 N2 + 1]`.
///
/// Samples are split into `N1` groups of `N2 + 1` consecutive points. The
/// network is linear between consecutive samples of a group; the `N1` spans
/// from the end of one group to the start of the next (and from the last group
/// to the final sample) are free transition intervals.
///
/// The first hidden layer holds hinges `σ(x - t)` at the group entry and exit
/// samples, so every second-layer pre-activation is an arbitrary continuous
/// function that is affine on each group. On a group the second layer carries
///
/// * `U+ = A + C` and `U- = C`, where `A` is the line through the group's first
///   segment and `C >= 0` keeps both nonnegative;
/// * a pair of units per interior sample, one of which crosses zero there with
///   slope `|κ|` (the slope change) while the other is parked at `-1`;
/// * one idle unit.
///
/// With `N2 = 0` every group is a single sample and only `U+` remains.
/// A one-point sample set yields a constant network of the same shape.
pub fn fit_samples(s: &SampleSet, n1: usize, n2: usize) -> Result<ReluNetwork> {
    if n1 == 0 {
        return Err(Error::invalid("N1", "group count must be positive"));
    }
    let units = 2 * n2 + 1;
    if s.len() == 1 {
        let mut out = vec![0.0; units];
        out[0] = 1.0;
        let mut bias = vec![0.0; units];
        bias[0] = s.ys()[0];
        return ReluNetwork::new(vec![
            AffineLayer::new(2 * n1, 1, vec![0.0; 2 * n1], vec![0.0; 2 * n1])?,
            AffineLayer::new(units, 2 * n1, vec![0.0; units * 2 * n1], bias)?,
            AffineLayer::new(1, units, out, vec![0.0])?,
        ]);
    }
    let expected = n1
        .checked_mul(n2 + 1)
        .and_then(|v| v.checked_add(1))
        .ok_or_else(|| Error::invalid("N1/N2", "sample count overflows"))?;
    if s.len() != expected {
        return Err(Error::DimensionMismatch {
            context: "fit_samples sample count N1*(N2+1)+1",
            expected,
            actual: s.len(),
        });
    }
    let (xs, ys) = (s.xs(), s.ys());
    let begin = |g: usize| g * (n2 + 1);
    let end = |g: usize| g * (n2 + 1) + n2;

    // pieces[g][u]
    let pieces: Vec<Vec<Piece>> = (0..n1)
        .map(|g| {
            let (b, e) = (begin(g), end(g));
            let seg = |t: usize| (ys[b + t + 1] - ys[b + t]) / (xs[b + t + 1] - xs[b + t]);
            let s0 = if n2 == 0 { 0.0 } else { seg(0) };
            let a_end = ys[b] + s0 * (xs[e] - xs[b]);
            let c = (-ys[b].min(a_end)).max(0.0);
            let mut p = Vec::with_capacity(units);
            p.push(Piece {
                value: ys[b] + c,
                slope: s0,
            });
            p.push(Piece {
                value: c,
                slope: 0.0,
            });
            p.push(Piece {
                value: 0.0,
                slope: 0.0,
            });
            let mut prev = s0;
            for t in 1..n2 {
                let cur = seg(t);
                let kappa = cur - prev;
                prev = cur;
                let active = Piece {
                    value: kappa.abs() * (xs[b] - xs[b + t]),
                    slope: kappa.abs(),
                };
                if kappa > 0.0 {
                    p.extend([active, PARKED]);
                } else if kappa < 0.0 {
                    p.extend([PARKED, active]);
                } else {
                    p.extend([PARKED, PARKED]);
                }
            }
            p.truncate(units);
            p
        })
        .collect();

    let mut thresholds = Vec::with_capacity(2 * n1);
    thresholds.push(xs[0]);
    for g in 0..n1 {
        thresholds.push(xs[end(g)]);
        if g + 1 < n1 {
            thresholds.push(xs[begin(g + 1)]);
        }
    }
    debug_assert_eq!(thresholds.len(), 2 * n1);

    let cols = 2 * n1;
    let mut w1 = vec![0.0; units * cols];
    let mut b1 = vec![0.0; units];
    let last_x = xs[xs.len() - 1];
    let last_y = ys[ys.len() - 1];
    for u in 0..units {
        let row = &mut w1[u * cols..(u + 1) * cols];
        b1[u] = pieces[0][u].value;
        row[0] = pieces[0][u].slope;
        for g in 0..n1 {
            let here = pieces[g][u];
            let (xb, xe) = (xs[begin(g)], xs[end(g)]);
            let at_exit = here.value + here.slope * (xe - xb);
            let (next_x, next_value, next_slope) = if g + 1 < n1 {
                let nx = pieces[g + 1][u];
                (xs[begin(g + 1)], nx.value, Some(nx.slope))
            } else {
                let target = match u {
                    0 => last_y,
                    1 | 2 => 0.0,
                    _ => -1.0,
                };
                (last_x, target, None)
            };
            let mid = (next_value - at_exit) / (next_x - xe);
            row[2 * g + 1] = mid - here.slope;
            if let Some(ns) = next_slope {
                row[2 * g + 2] = ns - mid;
            }
        }
    }

    let mut out = Vec::with_capacity(units);
    out.extend([1.0, -1.0, 0.0]);
    for _ in 1..n2 {
        out.extend([1.0, -1.0]);
    }
    out.truncate(units);
    let w0 = vec![1.0; cols];
    let b0 = thresholds.iter().map(|t| -t).collect();
    ReluNetwork::new(vec![
        AffineLayer::new(cols, 1, w0, b0)?,
        AffineLayer::new(units, cols, w1, b1)?,
        AffineLayer::new(1, units, out, vec![0.0])?,
    ])
}
