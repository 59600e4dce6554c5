use super::{AffineLayer, ReluNetwork};
use crate::error::{Error, Result};

/// Places layers on the diagonal of one larger layer.
pub(crate) fn block_diag(blocks: &[&AffineLayer]) -> AffineLayer {
    let rows: usize = blocks.iter().map(|b| b.rows()).sum();
    let cols: usize = blocks.iter().map(|b| b.cols()).sum();
    let mut weights = vec![0.0; rows * cols];
    let mut bias = Vec::with_capacity(rows);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for r in 0..b.rows() {
            weights[(r0 + r) * cols + c0..(r0 + r) * cols + c0 + b.cols()]
                .copy_from_slice(b.row(r));
        }
        bias.extend_from_slice(b.bias());
        r0 += b.rows();
        c0 += b.cols();
    }
    AffineLayer {
        rows,
        cols,
        weights,
        bias,
    }
}

/// Stacks layers that read the same input vector.
pub(crate) fn vstack(blocks: &[&AffineLayer]) -> AffineLayer {
    let cols = blocks[0].cols();
    let mut weights = Vec::new();
    let mut bias = Vec::new();
    for b in blocks {
        debug_assert_eq!(b.cols(), cols);
        weights.extend_from_slice(b.weights());
        bias.extend_from_slice(b.bias());
    }
    AffineLayer {
        rows: bias.len(),
        cols,
        weights,
        bias,
    }
}

/// Serial composition `second ∘ first`.
///
/// The last affine layer of `first` is multiplied into the first layer of
/// `second`, so depths add. The merged product is not bitwise identical to
/// sequential evaluation unless the products involved are exact.
pub fn compose_serial(first: &ReluNetwork, second: &ReluNetwork) -> Result<ReluNetwork> {
    if first.output_dim() != second.input_dim() {
        return Err(Error::DimensionMismatch {
            context: "compose_serial",
            expected: first.output_dim(),
            actual: second.input_dim(),
        });
    }
    let (a, b) = (first.layers(), second.layers());
    let mut layers = Vec::with_capacity(a.len() + b.len() - 1);
    layers.extend_from_slice(&a[..a.len() - 1]);
    layers.push(a[a.len() - 1].then(&b[0]));
    layers.extend_from_slice(&b[1..]);
    ReluNetwork::new(layers)
}

/// Extends `net` to exactly `depth` hidden layers without changing its output.
///
/// Each output `o` is carried as the pair `σ(o), σ(-o)` and recombined at the
/// end, which is exact for every real `o`.
pub fn pad_depth(net: &ReluNetwork, depth: usize) -> Result<ReluNetwork> {
    let extra = depth.checked_sub(net.depth()).ok_or_else(|| {
        Error::invalid(
            "depth",
            format!("cannot shrink depth {} to {depth}", net.depth()),
        )
    })?;
    if extra == 0 {
        return Ok(net.clone());
    }
    let o = net.output_dim();
    let mut layers = net.layers().to_vec();
    let last = layers.pop().expect("non-empty");
    let mut neg = last.clone();
    for w in neg.weights.iter_mut().chain(neg.bias.iter_mut()) {
        *w = -*w;
    }
    layers.push(vstack(&[&last, &neg]));
    for _ in 1..extra {
        layers.push(AffineLayer::identity(2 * o));
    }
    let mut weights = vec![0.0; o * 2 * o];
    for i in 0..o {
        weights[i * 2 * o + i] = 1.0;
        weights[i * 2 * o + o + i] = -1.0;
    }
    layers.push(AffineLayer::new(o, 2 * o, weights, vec![0.0; o])?);
    ReluNetwork::new(layers)
}

/// Runs several networks side by side and concatenates their outputs.
///
/// With `shared_input` every component reads the same input vector; otherwise
/// the input is the concatenation of the component inputs. Shallower components
/// are padded with [`pad_depth`].
pub fn stack_parallel(nets: &[ReluNetwork], shared_input: bool) -> Result<ReluNetwork> {
    let first = nets
        .first()
        .ok_or_else(|| Error::invalid("nets", "nothing to stack"))?;
    if shared_input {
        if let Some(bad) = nets.iter().find(|n| n.input_dim() != first.input_dim()) {
            return Err(Error::DimensionMismatch {
                context: "stack_parallel shared input",
                expected: first.input_dim(),
                actual: bad.input_dim(),
            });
        }
    }
    let depth = nets.iter().map(ReluNetwork::depth).max().unwrap_or(0);
    let padded = nets
        .iter()
        .map(|n| pad_depth(n, depth))
        .collect::<Result<Vec<_>>>()?;
    let mut layers = Vec::with_capacity(depth + 1);
    for i in 0..=depth {
        let blocks: Vec<&AffineLayer> = padded.iter().map(|n| &n.layers()[i]).collect();
        layers.push(if i == 0 && shared_input {
            vstack(&blocks)
        } else {
            block_diag(&blocks)
        });
    }
    ReluNetwork::new(layers)
}

/// Appends `extra` inputs that are carried unchanged to `extra` extra outputs.
///
/// Each carried value `v` travels through the hidden layers as `σ(v + bound)`
/// and leaves as `σ(v + bound) - bound`, so it is reproduced for `v >= -bound`
/// and clamped to `-bound` below that.
pub fn widen_with_passthrough(net: &ReluNetwork, extra: usize, bound: f64) -> Result<ReluNetwork> {
    if !(bound.is_finite() && bound >= 0.0) {
        return Err(Error::invalid(
            "bound",
            format!("{bound} is not a finite nonnegative number"),
        ));
    }
    if extra == 0 {
        return Ok(net.clone());
    }
    let eye = AffineLayer::identity(extra);
    let depth = net.depth();
    let layers = net
        .layers()
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let mut carry = eye.clone();
            if depth > 0 {
                if i == 0 {
                    carry.bias.iter_mut().for_each(|b| *b = bound);
                } else if i == depth {
                    carry.bias.iter_mut().for_each(|b| *b = -bound);
                }
            }
            block_diag(&[l, &carry])
        })
        .collect();
    ReluNetwork::new(layers)
}

/// One-hidden-layer network `x -> out(σ(hidden(x)))`.
pub fn shallow_net(hidden: AffineLayer, out: AffineLayer) -> Result<ReluNetwork> {
    ReluNetwork::new(vec![hidden, out])
}

/// Applies an affine map to the outputs of `net`.
pub(crate) fn then_affine(net: &ReluNetwork, layer: AffineLayer) -> Result<ReluNetwork> {
    compose_serial(net, &ReluNetwork::affine(layer)?)
}

/// Precomposes `net` with an affine map of its inputs.
pub(crate) fn before_affine(layer: AffineLayer, net: &ReluNetwork) -> Result<ReluNetwork> {
    compose_serial(&ReluNetwork::affine(layer)?, net)
}
