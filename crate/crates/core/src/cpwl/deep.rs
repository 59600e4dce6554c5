use crate::error::{Error, Result};
use crate::network::{AffineLayer, ReluNetwork};

/// Rewrites a two-hidden-layer scalar network of width vector `[N, M]` into
/// `stages` sequential stages of `ceil(M / stages)` second-layer units each.
///
/// Each hidden layer after the first carries the `N` first-layer activations
/// (already nonnegative, so ReLU leaves them alone), the units of the current
/// stage, and two nonnegative running sums holding the positively and the
/// negatively weighted contributions of the finished stages. The result has
/// depth at most `stages + 1`, width at most `N + ceil(M / stages) + 2`, and
/// computes the same function on all of ℝ^d up to summation order.
///
/// With `stages == 1` the network is returned unchanged.
pub fn wide_to_deep(net: &ReluNetwork, stages: usize) -> Result<ReluNetwork> {
    if net.depth() != 2 || net.output_dim() != 1 {
        return Err(Error::invalid(
            "net",
            format!(
                "expected two hidden layers and a scalar output, got depth {} and output dim {}",
                net.depth(),
                net.output_dim()
            ),
        ));
    }
    if stages == 0 {
        return Err(Error::invalid("stages", "must be positive"));
    }
    let [first, second, out] = net.layers() else {
        unreachable!("depth checked above")
    };
    let n = first.rows();
    let m = second.rows();
    let per = m.div_ceil(stages);
    let count = m.div_ceil(per);
    if count <= 1 {
        return Ok(net.clone());
    }
    let stage_rows = |s: usize| s * per..((s + 1) * per).min(m);
    let v = out.weights();

    let mut layers = vec![first.clone()];
    // hidden layer s + 2 holds: y (n), stage s units, acc+, acc-
    for s in 0..count {
        let prev_cols = if s == 0 {
            n
        } else {
            n + stage_rows(s - 1).len() + 2
        };
        let rows = stage_rows(s);
        let width = n + rows.len() + 2;
        let mut w = vec![0.0; width * prev_cols];
        let mut b = vec![0.0; width];
        for i in 0..n {
            w[i * prev_cols + i] = 1.0;
        }
        for (k, r) in rows.clone().enumerate() {
            let dst = (n + k) * prev_cols;
            w[dst..dst + n].copy_from_slice(second.row(r));
            b[n + k] = second.bias()[r];
        }
        if s > 0 {
            let (pos, neg) = (n + rows.len(), n + rows.len() + 1);
            for (k, r) in stage_rows(s - 1).enumerate() {
                let (row, val) = if v[r] >= 0.0 {
                    (pos, v[r])
                } else {
                    (neg, -v[r])
                };
                w[row * prev_cols + n + k] = val;
            }
            let prev_acc = n + stage_rows(s - 1).len();
            w[pos * prev_cols + prev_acc] = 1.0;
            w[neg * prev_cols + prev_acc + 1] = 1.0;
        }
        layers.push(AffineLayer::new(width, prev_cols, w, b)?);
    }
    let last = stage_rows(count - 1);
    let cols = n + last.len() + 2;
    let mut w = vec![0.0; cols];
    for (k, r) in last.enumerate() {
        w[n + k] = v[r];
    }
    w[cols - 2] = 1.0;
    w[cols - 1] = -1.0;
    layers.push(AffineLayer::new(1, cols, w, out.bias().to_vec())?);
    ReluNetwork::new(layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpwl::{fit_samples, SampleSet};

    fn wide() -> ReluNetwork {
        let pts = [
            (0.0, 0.0),
            (1.0, 3.0),
            (2.0, 1.0),
            (3.0, 1.0),
            (3.5, 5.0),
            (4.0, 0.0),
            (5.0, 2.0),
        ];
        fit_samples(&SampleSet::from_points(&pts).unwrap(), 2, 2).unwrap()
    }

    #[test]
    fn preserves_function() {
        let net = wide();
        for stages in 1..=5 {
            let deep = wide_to_deep(&net, stages).unwrap();
            assert!(deep.depth() <= stages + 1);
            assert!(deep.width() <= 4 + 5usize.div_ceil(stages) + 2);
            for i in -20..=120 {
                let x = i as f64 * 0.05;
                let (a, b) = (net.eval1(&[x]), deep.eval1(&[x]));
                assert!(
                    (a - b).abs() <= 1e-12 * a.abs().max(1.0),
                    "stages={stages} x={x}"
                );
            }
        }
    }

    #[test]
    fn single_stage_is_unchanged() {
        assert_eq!(wide_to_deep(&wide(), 1).unwrap(), wide());
    }

    #[test]
    fn rejects_wrong_shape() {
        assert!(wide_to_deep(&ReluNetwork::identity(1), 2).is_err());
    }
}
