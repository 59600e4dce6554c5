//! Continuous piecewise-linear functions of one variable and their network forms.

mod deep;
mod fit;

pub use deep::wide_to_deep;
pub use fit::fit_samples;

use crate::error::{Error, Result};
use crate::network::{shallow_net, AffineLayer, ReluNetwork};

/// A CPwL function given by its breakpoints, the values there and the slopes
/// of the two unbounded pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    left_slope: f64,
    right_slope: f64,
}

impl PiecewiseLinear {
    pub fn new(
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        left_slope: f64,
        right_slope: f64,
    ) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::invalid(
                "breakpoints",
                "at least one breakpoint is required",
            ));
        }
        if breakpoints.len() != values.len() {
            return Err(Error::DimensionMismatch {
                context: "breakpoint values",
                expected: breakpoints.len(),
                actual: values.len(),
            });
        }
        check_increasing("breakpoints", &breakpoints)?;
        if values
            .iter()
            .chain([&left_slope, &right_slope])
            .any(|v| !v.is_finite())
        {
            return Err(Error::invalid(
                "values",
                "all values and slopes must be finite",
            ));
        }
        Ok(Self {
            breakpoints,
            values,
            left_slope,
            right_slope,
        })
    }

    /// Linear interpolation through `points` with the given outer slopes.
    pub fn from_points(points: &[(f64, f64)], left_slope: f64, right_slope: f64) -> Result<Self> {
        let (xs, ys) = points.iter().copied().unzip();
        Self::new(xs, ys, left_slope, right_slope)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn left_slope(&self) -> f64 {
        self.left_slope
    }

    pub fn right_slope(&self) -> f64 {
        self.right_slope
    }

    /// Slopes `s_0` (left ray), the interior pieces, then `s_n` (right ray).
    pub fn slopes(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(self.breakpoints.len() + 1);
        s.push(self.left_slope);
        for i in 1..self.breakpoints.len() {
            s.push(
                (self.values[i] - self.values[i - 1])
                    / (self.breakpoints[i] - self.breakpoints[i - 1]),
            );
        }
        s.push(self.right_slope);
        s
    }

    pub fn eval(&self, x: f64) -> f64 {
        eval_pwl(self, x)
    }
}

pub fn eval_pwl(f: &PiecewiseLinear, x: f64) -> f64 {
    let (b, v) = (&f.breakpoints, &f.values);
    let n = b.len();
    if x <= b[0] {
        return v[0] + f.left_slope * (x - b[0]);
    }
    if x >= b[n - 1] {
        return v[n - 1] + f.right_slope * (x - b[n - 1]);
    }
    let i = b.partition_point(|&t| t <= x);
    let t = (x - b[i - 1]) / (b[i] - b[i - 1]);
    v[i - 1] + t * (v[i] - v[i - 1])
}

/// One-hidden-layer network of width `n + 1` for a CPwL with `n` breakpoints.
///
/// `f(x) = f(b_1) - s_0 σ(b_1 - x) + s_1 σ(x - b_1) + Σ_{k≥2} (s_k - s_{k-1}) σ(x - b_k)`.
pub fn to_shallow_net(f: &PiecewiseLinear) -> ReluNetwork {
    let b = &f.breakpoints;
    let s = f.slopes();
    let n = b.len();
    let mut w0 = Vec::with_capacity(n + 1);
    let mut b0 = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(n + 1);
    w0.push(-1.0);
    b0.push(b[0]);
    out.push(-s[0]);
    for k in 0..n {
        w0.push(1.0);
        b0.push(-b[k]);
        out.push(if k == 0 { s[1] } else { s[k + 1] - s[k] });
    }
    shallow_net(
        AffineLayer::new(n + 1, 1, w0, b0).expect("finite breakpoints"),
        AffineLayer::new(1, n + 1, out, vec![f.values[0]]).expect("finite slopes"),
    )
    .expect("consistent shapes")
}

/// Sample points for [`fit_samples`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl SampleSet {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::invalid("xs", "sample set is empty"));
        }
        if xs.len() != ys.len() {
            return Err(Error::DimensionMismatch {
                context: "sample ys",
                expected: xs.len(),
                actual: ys.len(),
            });
        }
        check_increasing("xs", &xs)?;
        if let Some((i, y)) = ys
            .iter()
            .enumerate()
            .find(|(_, y)| !(y.is_finite() && **y >= 0.0))
        {
            return Err(Error::invalid(
                "ys",
                format!("ys[{i}] = {y} is not a finite nonnegative number"),
            ));
        }
        Ok(Self { xs, ys })
    }

    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        let (xs, ys) = points.iter().copied().unzip();
        Self::new(xs, ys)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

fn check_increasing(name: &'static str, xs: &[f64]) -> Result<()> {
    if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
        return Err(Error::invalid(name, format!("non-finite entry {x}")));
    }
    if let Some(i) = xs.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            name,
            format!(
                "not strictly increasing at index {}: {} then {}",
                i + 1,
                xs[i],
                xs[i + 1]
            ),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hat() -> PiecewiseLinear {
        PiecewiseLinear::from_points(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)], 0.0, 0.0).unwrap()
    }

    #[test]
    fn eval_hat() {
        assert_eq!(hat().eval(0.5), 0.5);
        assert_eq!(hat().eval(3.0), 0.0);
        assert_eq!(hat().eval(-1.0), 0.0);
        assert_eq!(hat().eval(1.5), 0.5);
    }

    #[test]
    fn floor_gadget_plateau() {
        let delta = 0.125;
        let mut pts = Vec::new();
        for k in 0..4 {
            pts.push((k as f64, k as f64));
            pts.push((k as f64 + 1.0 - delta, k as f64));
        }
        let g = PiecewiseLinear::from_points(&pts, 0.0, 0.0).unwrap();
        assert_eq!(g.eval(1.5), 1.0);
        assert_eq!(g.eval(1.875), 1.0);
    }

    #[test]
    fn shallow_hat_on_unit_interval() {
        let f =
            PiecewiseLinear::from_points(&[(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)], 0.0, 0.0).unwrap();
        let net = to_shallow_net(&f);
        assert_eq!(net.eval1(&[0.25]), 0.5);
        assert_eq!(net.width_vec(), vec![4]);
    }

    #[test]
    fn single_breakpoint_form() {
        let f = PiecewiseLinear::new(vec![0.5], vec![2.0], -3.0, 4.0).unwrap();
        let net = to_shallow_net(&f);
        assert_eq!(net.width(), 2);
        for x in [-2.0, 0.0, 0.5, 1.0, 3.0] {
            let oracle = 4.0 * (x - 0.5f64).max(0.0) + 3.0 * (0.5 - x).max(0.0) + 2.0;
            assert_eq!(net.eval1(&[x]), oracle);
        }
    }

    #[test]
    fn four_breakpoints_give_width_five() {
        let f = PiecewiseLinear::new(
            vec![0.0, 1.0, 2.0, 3.0],
            vec![0.0, 1.0, 0.0, 1.0],
            1.0,
            -1.0,
        )
        .unwrap();
        assert_eq!(to_shallow_net(&f).width_vec(), vec![5]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PiecewiseLinear::new(vec![], vec![], 0.0, 0.0).is_err());
        assert!(PiecewiseLinear::new(vec![1.0, 1.0], vec![0.0, 0.0], 0.0, 0.0).is_err());
        assert!(SampleSet::new(vec![0.0, 1.0], vec![0.0, -1.0]).is_err());
        assert!(SampleSet::new(vec![1.0, 0.0], vec![0.0, 1.0]).is_err());
    }
}
