use super::{floor_gadget, gadget_units, MAX_BITS};
use crate::error::{Error, Result};
use crate::network::{
    compose_serial, shallow_net, widen_with_passthrough, AffineLayer, ReluNetwork,
};

pub(crate) const MAX_WIDTH_BITS: u32 = 12;

fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

/// Network of inputs `(θ, i)` returning `Σ_{j ≤ i} θ_j` for `θ = 0.θ_1…θ_n`
/// and integer `0 <= i <= n`.
///
/// The first hidden layer evaluates a floor gadget on each `2^j θ̂`,
/// `j = 1..n`, where `θ̂ = θ + 2^{-(n+1)}` keeps every argument at least
/// `2^{-(n+1)}` away from the jumps, along with `σ(i - j)` for `j = 0..n`.
/// The second layer forms `σ(θ_j + 1{i ≥ j} - 1)` with
/// `θ_j = ⌊2^j θ⌋ - 2⌊2^{j-1} θ⌋` and `1{i ≥ j} = σ(i - j + 1) - σ(i - j)`.
pub fn build_bits_width(n: u32) -> Result<ReluNetwork> {
    if !(1..=MAX_WIDTH_BITS).contains(&n) {
        return Err(Error::invalid(
            "n",
            format!("{n} is outside 1..={MAX_WIDTH_BITS}"),
        ));
    }
    let ni = n as i32;
    let (units, _) = gadget_units(&floor_gadget(1 << n, pow2(-(ni + 1))));
    let per = units.len();
    let nu = n as usize;
    let hidden_rows = nu * per + nu + 1;

    let mut w1 = Vec::with_capacity(hidden_rows * 2);
    let mut b1 = Vec::with_capacity(hidden_rows);
    for j in 1..=ni {
        for u in &units {
            w1.extend([u.w * pow2(j), 0.0]);
            b1.push(u.w * pow2(j - ni - 1) + u.bias);
        }
    }
    for j in 0..=n {
        w1.extend([0.0, 1.0]);
        b1.push(-f64::from(j));
    }
    let step_col = nu * per;

    let mut w2 = vec![0.0; nu * hidden_rows];
    for j in 1..=nu {
        let row = &mut w2[(j - 1) * hidden_rows..j * hidden_rows];
        for (k, u) in units.iter().enumerate() {
            row[(j - 1) * per + k] = u.out;
            if j >= 2 {
                row[(j - 2) * per + k] = -2.0 * u.out;
            }
        }
        row[step_col + j - 1] = 1.0;
        row[step_col + j] = -1.0;
    }
    let hidden = AffineLayer::new(hidden_rows, 2, w1, b1)?;
    let second = AffineLayer::new(nu, hidden_rows, w2, vec![-1.0; nu])?;
    let out = AffineLayer::new(1, nu, vec![1.0; nu], vec![0.0])?;
    ReluNetwork::new(vec![hidden, second, out])
}

/// Network of inputs `(θ, k)` returning `Σ_{j ≤ k} θ_j` for
/// `θ = 0.θ_1…θ_{Ln}` and integer `0 <= k <= Ln`.
///
/// The bits are peeled off `n` at a time. Block `ℓ` holds the remainder
/// `r` (initially `θ + 2^{-(Ln+1)}`), splits off `G = ⌊2^n r⌋`, feeds
/// `(G / 2^n, min(σ(k - (ℓ-1) n), n))` to [`build_bits_width`] and adds the
/// result to a running total. Every block is three hidden layers deep.
pub fn build_bits_width_depth(n: u32, l: u32) -> Result<ReluNetwork> {
    if n == 0 || l == 0 {
        return Err(Error::invalid("n/L", "both must be positive"));
    }
    if n > MAX_WIDTH_BITS {
        return Err(Error::invalid("n", format!("{n} exceeds {MAX_WIDTH_BITS}")));
    }
    let total = n as usize * l as usize;
    if total > MAX_BITS || n as usize + total + 1 > 53 {
        return Err(Error::Capacity {
            limit: "bit budget",
            detail: format!("L*n = {total} bits cannot be extracted exactly (limit {MAX_BITS})"),
        });
    }
    let ni = n as i32;
    let tail = pow2(-(total as i32 + 1));
    let (units, _) = gadget_units(&floor_gadget(1 << n, tail));
    let bits = widen_with_passthrough(&build_bits_width(n)?, 3, 0.0)?;
    // (s, r', k, acc) -> (r', k, acc + s)
    let gather = ReluNetwork::affine(AffineLayer::new(
        3,
        4,
        vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0],
        vec![0.0; 3],
    )?)?;

    let mut net = ReluNetwork::affine(AffineLayer::new(
        3,
        2,
        vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        vec![tail, 0.0, 0.0],
    )?)?;
    for block in 0..l {
        let per = units.len();
        let rows = per + 5;
        let mut w = Vec::with_capacity(rows * 3);
        let mut b = Vec::with_capacity(rows);
        for u in &units {
            w.extend([u.w * pow2(ni), 0.0, 0.0]);
            b.push(u.bias);
        }
        let lo = f64::from(block * n);
        w.extend([
            1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0,
        ]);
        b.extend([0.0, 0.0, 0.0, -lo, -(lo + f64::from(n))]);
        // outputs: ξ, i, r', k, acc
        let mut o = vec![0.0; 5 * rows];
        for (c, u) in units.iter().enumerate() {
            o[c] = u.out * pow2(-ni);
            o[2 * rows + c] = -u.out;
        }
        o[rows + per + 3] = 1.0;
        o[rows + per + 4] = -1.0;
        o[2 * rows + per] = pow2(ni);
        o[3 * rows + per + 1] = 1.0;
        o[4 * rows + per + 2] = 1.0;
        let split = shallow_net(
            AffineLayer::new(rows, 3, w, b)?,
            AffineLayer::new(5, rows, o, vec![0.0; 5])?,
        )?;
        net = compose_serial(&net, &split)?;
        net = compose_serial(&net, &bits)?;
        net = compose_serial(&net, &gather)?;
    }
    let pick = ReluNetwork::affine(AffineLayer::new(1, 3, vec![0.0, 0.0, 1.0], vec![0.0])?)?;
    compose_serial(&net, &pick)
}
