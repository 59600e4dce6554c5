//! Feed-forward ReLU networks: dense affine layers with `max(0, ·)` between them.
//!
//! A network with `L + 1` affine layers has `L` hidden layers (its depth). The
//! activation is applied after every affine layer except the last, so a single
//! layer is a pure affine map of depth 0.
//!
//! Evaluation order is fixed: matrix-vector products are row-major and each row
//! is accumulated left to right starting from zero, then the bias is added. Two
//! networks with identical weights therefore produce identical bits.

mod algebra;
pub mod hexfloat;
mod serialize;

pub(crate) use algebra::{before_affine, then_affine};
pub use algebra::{compose_serial, pad_depth, shallow_net, stack_parallel, widen_with_passthrough};
pub use serialize::{deserialize, serialize, NetworkFile, FORMAT_VERSION};

use serde::Serialize;

use crate::error::{Error, Result};

/// One affine map `x -> W x + b` with `W` stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineLayer {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl AffineLayer {
    pub fn new(rows: usize, cols: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if weights.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "affine layer weights",
                expected: rows * cols,
                actual: weights.len(),
            });
        }
        if bias.len() != rows {
            return Err(Error::DimensionMismatch {
                context: "affine layer bias",
                expected: rows,
                actual: bias.len(),
            });
        }
        if let Some(v) = weights.iter().chain(&bias).find(|v| !v.is_finite()) {
            return Err(Error::invalid("weights", format!("non-finite entry {v}")));
        }
        Ok(Self {
            rows,
            cols,
            weights,
            bias,
        })
    }

    /// Builds a layer from dense rows; every row must have `cols` entries.
    pub fn from_rows(cols: usize, rows: &[(Vec<f64>, f64)]) -> Result<Self> {
        let mut weights = Vec::with_capacity(rows.len() * cols);
        let mut bias = Vec::with_capacity(rows.len());
        for (w, b) in rows {
            if w.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "affine layer row",
                    expected: cols,
                    actual: w.len(),
                });
            }
            weights.extend_from_slice(w);
            bias.push(*b);
        }
        Self::new(rows.len(), cols, weights, bias)
    }

    pub fn identity(dim: usize) -> Self {
        let mut weights = vec![0.0; dim * dim];
        for i in 0..dim {
            weights[i * dim + i] = 1.0;
        }
        Self {
            rows: dim,
            cols: dim,
            weights,
            bias: vec![0.0; dim],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.weights[row * self.cols..(row + 1) * self.cols]
    }

    pub fn param_count(&self) -> usize {
        self.rows * (self.cols + 1)
    }

    pub fn apply_into(&self, x: &[f64], out: &mut Vec<f64>) {
        debug_assert_eq!(x.len(), self.cols);
        out.clear();
        for r in 0..self.rows {
            let mut acc = 0.0;
            for (w, v) in self.row(r).iter().zip(x) {
                acc += w * v;
            }
            out.push(acc + self.bias[r]);
        }
    }

    /// Returns the single affine map `next ∘ self`.
    pub fn then(&self, next: &AffineLayer) -> AffineLayer {
        debug_assert_eq!(next.cols, self.rows);
        let mut weights = vec![0.0; next.rows * self.cols];
        let mut bias = Vec::with_capacity(next.rows);
        for r in 0..next.rows {
            let nrow = next.row(r);
            for c in 0..self.cols {
                let mut acc = 0.0;
                for (k, w) in nrow.iter().enumerate() {
                    acc += w * self.weight(k, c);
                }
                weights[r * self.cols + c] = acc;
            }
            let mut acc = 0.0;
            for (w, b) in nrow.iter().zip(&self.bias) {
                acc += w * b;
            }
            bias.push(acc + next.bias[r]);
        }
        AffineLayer {
            rows: next.rows,
            cols: self.cols,
            weights,
            bias,
        }
    }
}

/// Width/depth/parameter accounting of a network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct NetworkStats {
    pub width: usize,
    pub depth: usize,
    pub param_count: usize,
    pub width_vec: Vec<usize>,
}

/// A ReLU feed-forward network `L_D ∘ σ ∘ L_{D-1} ∘ ... ∘ σ ∘ L_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReluNetwork {
    input_dim: usize,
    layers: Vec<AffineLayer>,
}

impl ReluNetwork {
    pub fn new(layers: Vec<AffineLayer>) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| Error::invalid("layers", "a network needs at least one layer"))?;
        let input_dim = first.cols;
        if input_dim == 0 {
            return Err(Error::invalid("input_dim", "must be positive"));
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[1].cols != pair[0].rows {
                return Err(Error::DimensionMismatch {
                    context: if i == 0 {
                        "layer 1 input"
                    } else {
                        "hidden layer input"
                    },
                    expected: pair[0].rows,
                    actual: pair[1].cols,
                });
            }
        }
        if layers.last().map_or(0, |l| l.rows) == 0 {
            return Err(Error::invalid("output_dim", "must be positive"));
        }
        Ok(Self { input_dim, layers })
    }

    /// A depth-0 network computing `W x + b`.
    pub fn affine(layer: AffineLayer) -> Result<Self> {
        Self::new(vec![layer])
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            input_dim: dim,
            layers: vec![AffineLayer::identity(dim)],
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.rows)
    }

    pub fn layers(&self) -> &[AffineLayer] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn width_vec(&self) -> Vec<usize> {
        self.layers[..self.layers.len() - 1]
            .iter()
            .map(|l| l.rows)
            .collect()
    }

    pub fn width(&self) -> usize {
        self.width_vec().into_iter().max().unwrap_or(0)
    }

    pub fn stats(&self) -> NetworkStats {
        NetworkStats {
            width: self.width(),
            depth: self.depth(),
            param_count: self.layers.iter().map(AffineLayer::param_count).sum(),
            width_vec: self.width_vec(),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                context: "network input",
                expected: self.input_dim,
                actual: x.len(),
            });
        }
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.apply_into(&cur, &mut next);
            if i < last {
                for v in next.iter_mut() {
                    *v = v.max(0.0);
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }

    /// Evaluates a scalar-output network.
    ///
    /// Panics if `x` has the wrong length or the network is not scalar-valued.
    pub fn eval1(&self, x: &[f64]) -> f64 {
        assert_eq!(self.output_dim(), 1, "eval1 requires a scalar output");
        self.evaluate(x).expect("input dimension")[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn relu_net() -> ReluNetwork {
        ReluNetwork::new(vec![
            AffineLayer::new(1, 1, vec![1.0], vec![0.0]).unwrap(),
            AffineLayer::new(1, 1, vec![1.0], vec![0.0]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn single_affine_layer_is_identity() {
        let net =
            ReluNetwork::affine(AffineLayer::new(1, 1, vec![1.0], vec![0.0]).unwrap()).unwrap();
        assert_eq!(net.evaluate(&[3.5]).unwrap(), vec![3.5]);
        assert_eq!(net.depth(), 0);
        assert_eq!(net.width(), 0);
    }

    #[test]
    fn relu_kills_negatives() {
        assert_eq!(relu_net().evaluate(&[-2.0]).unwrap(), vec![0.0]);
        assert_eq!(relu_net().evaluate(&[2.0]).unwrap(), vec![2.0]);
    }

    #[test]
    fn wrong_input_length_is_rejected() {
        assert!(matches!(
            relu_net().evaluate(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn layer_shape_checks() {
        assert!(AffineLayer::new(2, 2, vec![1.0; 3], vec![0.0; 2]).is_err());
        assert!(AffineLayer::new(2, 2, vec![1.0; 4], vec![0.0; 1]).is_err());
        assert!(AffineLayer::new(1, 1, vec![f64::NAN], vec![0.0]).is_err());
        let a = AffineLayer::identity(2);
        let b = AffineLayer::identity(3);
        assert!(ReluNetwork::new(vec![a, b]).is_err());
    }

    #[test]
    fn stats_of_width5_depth2_shape() {
        let net = ReluNetwork::new(vec![
            AffineLayer::new(5, 1, vec![1.0; 5], vec![0.0; 5]).unwrap(),
            AffineLayer::new(5, 5, vec![1.0; 25], vec![0.0; 5]).unwrap(),
            AffineLayer::new(1, 5, vec![1.0; 5], vec![0.0]).unwrap(),
        ])
        .unwrap();
        let s = net.stats();
        assert_eq!(s.param_count, 10 + 30 + 6);
        assert_eq!(s.width, 5);
        assert_eq!(s.depth, 2);
        assert_eq!(s.width_vec, vec![5, 5]);
    }
}
