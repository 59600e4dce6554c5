use super::{build_bits_width_depth, encode_bits};
use crate::cpwl::{fit_samples, wide_to_deep, SampleSet};
use crate::error::{Error, Result};
use crate::intmath::floor_log3;
use crate::network::{compose_serial, widen_with_passthrough, AffineLayer, ReluNetwork};

/// `M = N²L` rows of `L·n` bits each, `n = ⌊log₃(N + 2)⌋`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitTable {
    n_width: usize,
    l_depth: usize,
    n: usize,
    rows: Vec<Vec<u8>>,
}

impl BitTable {
    pub fn new(n_width: usize, l_depth: usize, rows: Vec<Vec<u8>>) -> Result<Self> {
        let (m, cols, n) = Self::shape(n_width, l_depth)?;
        if rows.len() != m {
            return Err(Error::DimensionMismatch {
                context: "bit table rows (N^2 L)",
                expected: m,
                actual: rows.len(),
            });
        }
        for row in &rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "bit table columns (L n)",
                    expected: cols,
                    actual: row.len(),
                });
            }
            if row.iter().any(|b| *b > 1) {
                return Err(Error::invalid("table", "entries must be 0 or 1"));
            }
        }
        Ok(Self {
            n_width,
            l_depth,
            n,
            rows,
        })
    }

    /// `(rows, columns, n)` for the given `N` and `L`.
    pub fn shape(n_width: usize, l_depth: usize) -> Result<(usize, usize, usize)> {
        if n_width == 0 || l_depth == 0 {
            return Err(Error::invalid("N/L", "both must be positive"));
        }
        let n = floor_log3(n_width as u64 + 2) as usize;
        let m = n_width
            .checked_mul(n_width)
            .and_then(|v| v.checked_mul(l_depth))
            .ok_or_else(|| Error::invalid("N/L", "row count overflows"))?;
        Ok((m, l_depth * n, n))
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `Σ_{j=0}^{k} θ_{m,j}`.
    pub fn partial_sum(&self, m: usize, k: usize) -> u32 {
        self.rows[m][..=k].iter().map(|&b| u32::from(b)).sum()
    }
}

/// Network of inputs `(m, k)` returning `Σ_{j=0}^{k} θ_{m,j}` for integer
/// `0 <= m < N²L` and `0 <= k < Ln`.
///
/// A sample-fitting network maps `m` to the fraction encoding row `m`; the
/// bit extractor then reads its first `k + 1` bits.
pub fn build_bit_extraction_multi(table: &BitTable) -> Result<ReluNetwork> {
    let (n_width, l_depth) = (table.n_width, table.l_depth);
    let m = table.rows.len();
    let mut pts = Vec::with_capacity(m + 1);
    for (i, row) in table.rows.iter().enumerate() {
        pts.push((i as f64, encode_bits(row)?));
    }
    pts.push((m as f64, 0.0));
    let fit = fit_samples(
        &SampleSet::from_points(&pts)?,
        n_width,
        n_width * l_depth - 1,
    )?;
    let encode = widen_with_passthrough(&wide_to_deep(&fit, l_depth)?, 1, 1.0)?;
    let shift = ReluNetwork::affine(AffineLayer::new(
        2,
        2,
        vec![1.0, 0.0, 0.0, 1.0],
        vec![0.0, 1.0],
    )?)?;
    let extract = build_bits_width_depth(table.n as u32, l_depth as u32)?;
    compose_serial(&compose_serial(&encode, &shift)?, &extract)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one() {
        let t = BitTable::new(1, 1, vec![vec![1]]).unwrap();
        let net = build_bit_extraction_multi(&t).unwrap();
        assert_eq!(net.eval1(&[0.0, 0.0]), 1.0);
    }

    #[test]
    fn zero_row_is_zero() {
        let t = BitTable::new(
            2,
            2,
            vec![
                vec![0, 0],
                vec![1, 1],
                vec![0, 1],
                vec![1, 0],
                vec![0, 0],
                vec![1, 1],
                vec![0, 0],
                vec![1, 0],
            ],
        )
        .unwrap();
        let net = build_bit_extraction_multi(&t).unwrap();
        for m in 0..8 {
            for k in 0..2 {
                assert_eq!(
                    net.eval1(&[m as f64, k as f64]),
                    f64::from(t.partial_sum(m, k))
                );
            }
        }
    }

    #[test]
    fn shape_checks() {
        assert_eq!(BitTable::shape(2, 1).unwrap(), (4, 1, 1));
        assert_eq!(BitTable::shape(7, 2).unwrap(), (98, 4, 2));
        assert!(BitTable::new(2, 1, vec![vec![1]; 3]).is_err());
        assert!(BitTable::new(2, 1, vec![vec![1, 0]; 4]).is_err());
    }
}
