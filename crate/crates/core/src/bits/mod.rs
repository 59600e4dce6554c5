//! Bit extraction: bit strings stored as one binary fraction, and networks
//! that recover partial sums of those bits.
//!
//! All gadgets here are arranged so that on their intended inputs every
//! intermediate value is a dyadic rational short enough to be represented
//! exactly in an `f64`. The length guards below enforce that.

mod multi;
mod point;
mod width;

pub use multi::{build_bit_extraction_multi, BitTable};
pub use point::{build_point_fitter, build_point_fitter_2d, PointFitProblem};
pub use width::{build_bits_width, build_bits_width_depth};

use crate::cpwl::{to_shallow_net, PiecewiseLinear};
use crate::error::{Error, Result};

/// Longest bit string that is stored in a single `f64` fraction.
pub const MAX_BITS: usize = 50;

/// A bit string `θ_1 … θ_ℓ` read as the fraction `0.θ_1θ_2…θ_ℓ` in base 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.len() > MAX_BITS {
            return Err(Error::Capacity {
                limit: "bit string length",
                detail: format!("{} bits exceed the limit of {MAX_BITS}", bits.len()),
            });
        }
        if let Some(i) = bits.iter().position(|b| *b > 1) {
            return Err(Error::invalid(
                "bits",
                format!("entry {i} is {} (expected 0 or 1)", bits[i]),
            ));
        }
        Ok(Self(bits))
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn value(&self) -> f64 {
        let mut v = 0.0;
        let mut scale = 0.5;
        for b in &self.0 {
            if *b == 1 {
                v += scale;
            }
            scale *= 0.5;
        }
        v
    }

    /// `Σ_{j ≤ i} θ_j` with 1-based `j`; zero for `i = 0`.
    pub fn partial_sum(&self, i: usize) -> u32 {
        self.0[..i.min(self.0.len())]
            .iter()
            .map(|&b| u32::from(b))
            .sum()
    }
}

/// Exact value of `0.θ_1θ_2…` for at most [`MAX_BITS`] bits.
pub fn encode_bits(bits: &[u8]) -> Result<f64> {
    Ok(BitString::new(bits.to_vec())?.value())
}

/// One hidden unit `out · σ(w · v + bias)` of a scalar CPwL gadget.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Unit {
    pub w: f64,
    pub bias: f64,
    pub out: f64,
}

/// Rounds down to the nearest integer: `k` on `[k, k + 1 - δ]` for
/// `k < levels`, rising linearly on `(k + 1 - δ, k + 1)`, flat outside.
pub(crate) fn floor_gadget(levels: u64, delta: f64) -> PiecewiseLinear {
    assert!(levels >= 2);
    let mut pts = Vec::with_capacity(2 * levels as usize);
    for k in 0..levels - 1 {
        let k = k as f64;
        pts.push((k + 1.0 - delta, k));
        pts.push((k + 1.0, k + 1.0));
    }
    PiecewiseLinear::from_points(&pts, 0.0, 0.0).expect("increasing breakpoints")
}

/// Hidden units of the one-layer form of `f`, with zero-weight units removed.
/// The returned constant is the output bias.
pub(crate) fn gadget_units(f: &PiecewiseLinear) -> (Vec<Unit>, f64) {
    let net = to_shallow_net(f);
    let (hidden, out) = (&net.layers()[0], &net.layers()[1]);
    let units = (0..hidden.rows())
        .filter(|&r| out.weights()[r] != 0.0)
        .map(|r| Unit {
            w: hidden.weights()[r],
            bias: hidden.bias()[r],
            out: out.weights()[r],
        })
        .collect();
    (units, out.bias()[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_examples() {
        assert_eq!(encode_bits(&[1, 0, 1]).unwrap(), 0.625);
        assert_eq!(encode_bits(&[]).unwrap(), 0.0);
        assert_eq!(encode_bits(&[1; 50]).unwrap(), 1.0 - 2f64.powi(-50));
        assert!(encode_bits(&[0; 51]).is_err());
        assert!(encode_bits(&[2]).is_err());
    }

    #[test]
    fn floor_gadget_levels() {
        let g = floor_gadget(4, 0.125);
        assert_eq!(g.breakpoints().len(), 6);
        for k in 0..4 {
            let k = k as f64;
            assert_eq!(g.eval(k), k);
            assert_eq!(g.eval(k + 0.875), k);
        }
        assert_eq!(g.eval(-3.0), 0.0);
        assert_eq!(g.eval(9.0), 3.0);
        let (units, c) = gadget_units(&g);
        assert_eq!(units.len(), 6);
        assert_eq!(c, 0.0);
    }
}
