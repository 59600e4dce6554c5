use super::{build_bit_extraction_multi, BitTable};
use crate::cpwl::{fit_samples, wide_to_deep, SampleSet};
use crate::error::{Error, Result};
use crate::network::{
    before_affine, compose_serial, stack_parallel, widen_with_passthrough, AffineLayer, ReluNetwork,
};

/// A sequence `y_0 … y_{J-1}` to be matched at integer indices up to `ε`,
/// laid out as an `M × L̂` table (`M = N²L`, `L̂ = Ln`) after padding with
/// copies of the last value.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFitProblem {
    pub n_width: usize,
    pub l_depth: usize,
    pub rows: usize,
    pub cols: usize,
    pub epsilon: f64,
    pub y: Vec<f64>,
    pub y_max: f64,
    /// Quantized levels `a_j`, row-major over the padded table.
    pub levels: Vec<i64>,
    /// `c_{m,k} = 1` where the level steps up between columns `k - 1` and `k`.
    pub up: Vec<Vec<u8>>,
    /// `d_{m,k} = 1` where the level steps down.
    pub down: Vec<Vec<u8>>,
}

impl PointFitProblem {
    pub fn new(n_width: usize, l_depth: usize, y: &[f64], epsilon: f64) -> Result<Self> {
        let (rows, cols, _) = BitTable::shape(n_width, l_depth)?;
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::invalid(
                "epsilon",
                format!("{epsilon} is not a positive number"),
            ));
        }
        if y.is_empty() {
            return Err(Error::invalid("y", "no values to fit"));
        }
        if cols == 0 {
            return Err(Error::invalid("N/L", "no bit columns"));
        }
        if let Some((i, v)) = y
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::invalid(
                "y",
                format!("y[{i}] = {v} is not a finite nonnegative number"),
            ));
        }
        for i in 1..y.len() {
            let gap = (y[i] - y[i - 1]).abs();
            if gap > epsilon {
                return Err(Error::GapViolation {
                    index: i,
                    gap,
                    epsilon,
                });
            }
        }
        let capacity = rows * cols;
        if y.len() > capacity {
            return Err(Error::Capacity {
                limit: "point count N^2 L^2 floor(log3(N+2))",
                detail: format!("{} values exceed {capacity}", y.len()),
            });
        }
        let last = y[y.len() - 1];
        let mut levels = Vec::with_capacity(capacity);
        for j in 0..capacity {
            let v = if j < y.len() { y[j] } else { last };
            let mut a = (v / epsilon).floor() as i64;
            // Rounding in v / ε can push neighbours two levels apart; pull back.
            if j % cols != 0 {
                let prev: i64 = levels[j - 1];
                a = a.clamp(prev - 1, prev + 1);
            }
            levels.push(a);
        }
        let mut up = vec![vec![0u8; cols]; rows];
        let mut down = vec![vec![0u8; cols]; rows];
        for m in 0..rows {
            for k in 1..cols {
                match levels[m * cols + k] - levels[m * cols + k - 1] {
                    1 => up[m][k] = 1,
                    -1 => down[m][k] = 1,
                    _ => {}
                }
            }
        }
        Ok(Self {
            n_width,
            l_depth,
            rows,
            cols,
            epsilon,
            y: y.to_vec(),
            y_max: y.iter().copied().fold(0.0, f64::max),
            levels,
            up,
            down,
        })
    }

    /// `a_j ε`, the value the fitted network takes at index `j`.
    pub fn quantized(&self, j: usize) -> f64 {
        self.levels[j] as f64 * self.epsilon
    }
}

/// Network of inputs `(m, k)` returning `a_{m,k} ε` on the index grid and a
/// value in `[0, y_max]` everywhere.
///
/// `a_{m,k} = a_{m,0} + Σ_{j ≤ k} c_{m,j} - Σ_{j ≤ k} d_{m,j}`: one fitted
/// network supplies `a_{m,0}`, two bit extractors the cumulative up and down
/// steps. The result passes through `y_max - σ(y_max - σ(s))`.
pub fn build_point_fitter_2d(prob: &PointFitProblem) -> Result<ReluNetwork> {
    let (n_width, l_depth) = (prob.n_width, prob.l_depth);
    let mut pts: Vec<(f64, f64)> = (0..prob.rows)
        .map(|m| (m as f64, prob.levels[m * prob.cols] as f64))
        .collect();
    pts.push((prob.rows as f64, 0.0));
    let fit = fit_samples(
        &SampleSet::from_points(&pts)?,
        n_width,
        n_width * l_depth - 1,
    )?;
    let first = before_affine(
        AffineLayer::new(1, 2, vec![1.0, 0.0], vec![0.0])?,
        &wide_to_deep(&fit, l_depth)?,
    )?;
    let up = build_bit_extraction_multi(&BitTable::new(n_width, l_depth, prob.up.clone())?)?;
    let down = build_bit_extraction_multi(&BitTable::new(n_width, l_depth, prob.down.clone())?)?;
    let parts = stack_parallel(&[first, up, down], true)?;

    let e = prob.epsilon;
    let clamp = ReluNetwork::new(vec![
        AffineLayer::new(1, 3, vec![e, e, -e], vec![0.0])?,
        AffineLayer::new(1, 1, vec![-1.0], vec![prob.y_max])?,
        AffineLayer::new(1, 1, vec![-1.0], vec![prob.y_max])?,
    ])?;
    compose_serial(&parts, &clamp)
}

/// Network of one input `j` with `φ(j) = ⌊y_j/ε⌋ ε` for `j < J` and
/// `0 <= φ <= max y` on all of ℝ.
///
/// A staircase network splits `j` into row `m = ⌊j / L̂⌋` and column
/// `k = j - L̂ m`, which feed [`build_point_fitter_2d`].
pub fn build_point_fitter(
    n_width: usize,
    l_depth: usize,
    y: &[f64],
    epsilon: f64,
) -> Result<ReluNetwork> {
    let prob = PointFitProblem::new(n_width, l_depth, y, epsilon)?;
    let fitter = build_point_fitter_2d(&prob)?;
    let (rows, cols) = (prob.rows, prob.cols as f64);
    let split = if prob.cols == 1 {
        ReluNetwork::affine(AffineLayer::new(2, 1, vec![1.0, 0.0], vec![0.0; 2])?)?
    } else {
        let mut pts = Vec::with_capacity(2 * rows + 1);
        for m in 0..rows {
            let start = m as f64 * cols;
            pts.push((start, m as f64));
            pts.push((start + cols - 1.0, m as f64));
        }
        pts.push((rows as f64 * cols, rows as f64));
        let fit = fit_samples(
            &SampleSet::from_points(&pts)?,
            n_width,
            2 * n_width * l_depth - 1,
        )?;
        let row = widen_with_passthrough(&wide_to_deep(&fit, l_depth)?, 1, 1.0)?;
        let row = before_affine(AffineLayer::new(2, 1, vec![1.0, 1.0], vec![0.0; 2])?, &row)?;
        let column = ReluNetwork::affine(AffineLayer::new(
            2,
            2,
            vec![1.0, 0.0, -cols, 1.0],
            vec![0.0; 2],
        )?)?;
        compose_serial(&row, &column)?
    };
    compose_serial(&split, &fitter)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_by_one_example() {
        let y = [0.0, 0.4, 0.8, 0.6];
        let prob = PointFitProblem::new(2, 1, &y, 0.5).unwrap();
        assert_eq!((prob.rows, prob.cols), (4, 1));
        assert_eq!(prob.levels, vec![0, 0, 1, 1]);
        let net = build_point_fitter_2d(&prob).unwrap();
        for (m, want) in [0.0, 0.0, 0.5, 0.5].into_iter().enumerate() {
            assert!((net.eval1(&[m as f64, 0.0]) - want).abs() <= 1e-12);
        }
        let v = net.eval1(&[-5.0, -5.0]);
        assert!((0.0..=0.8).contains(&v));
        let net = build_point_fitter(2, 1, &y, 0.5).unwrap();
        assert!((net.eval1(&[2.0]) - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn single_value() {
        let net = build_point_fitter(1, 1, &[0.7], 0.1).unwrap();
        let oracle = (0.7f64 / 0.1).floor() * 0.1;
        assert!((net.eval1(&[0.0]) - oracle).abs() <= 1e-9);
    }

    #[test]
    fn zeros_stay_zero() {
        let net = build_point_fitter(2, 2, &[0.0; 9], 0.25).unwrap();
        for i in -40..=80 {
            assert_eq!(net.eval1(&[i as f64 * 0.25]), 0.0);
        }
    }

    #[test]
    fn multi_column_rows() {
        // N = 7 gives n = 2, so rows have 2L columns.
        let y: Vec<f64> = (0..60)
            .map(|j| ((j as f64) * 0.37).sin().abs() * 0.9)
            .collect();
        let eps = y
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max);
        let prob = PointFitProblem::new(7, 1, &y, eps).unwrap();
        assert_eq!(prob.cols, 2);
        let net = build_point_fitter(7, 1, &y, eps).unwrap();
        assert!(net.width() <= 16 * 7 + 30);
        assert!(net.depth() <= 6 + 10);
        for (j, yj) in y.iter().enumerate() {
            let v = net.eval1(&[j as f64]);
            assert!((v - prob.quantized(j)).abs() <= 1e-9, "j={j}");
            assert!((v - yj).abs() <= eps + 1e-9);
        }
    }

    #[test]
    fn rejects_bad_problems() {
        assert!(matches!(
            PointFitProblem::new(2, 1, &[0.0, 1.0], 0.5),
            Err(Error::GapViolation { index: 1, .. })
        ));
        assert!(PointFitProblem::new(1, 1, &[0.0, 0.0], 0.5).is_err());
        assert!(PointFitProblem::new(2, 1, &[-0.1], 0.5).is_err());
    }
}
