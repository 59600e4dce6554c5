use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::approx::{Modulus, TargetFunction};
use crate::error::{Error, Result};

pub const CATALOG_NAMES: [&str; 6] = [
    "constant",
    "affine",
    "abs_pi",
    "holder_sum",
    "sin_osc",
    "bump",
];

/// Exponent used by `holder_sum`.
pub const HOLDER_ALPHA: f64 = 0.5;
/// Cubes per axis of the `bump` family.
pub const BUMP_CELLS: u64 = 3;

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub d: u32,
    pub description: String,
    pub target: TargetFunction,
}

impl CatalogEntry {
    fn new(name: &'static str, description: String, target: TargetFunction) -> Self {
        Self {
            name,
            d: target.d,
            description,
            target,
        }
    }

    /// `(λ, α)` of the declared modulus.
    pub fn holder(&self) -> Option<(f64, f64)> {
        match self.target.modulus {
            Modulus::Holder { lambda, alpha } => Some((lambda, alpha)),
            Modulus::Empirical(_) => None,
        }
    }
}

/// Every catalog target in dimension `d`. `seed` fixes the signs of the
/// bump family.
pub fn catalog(d: u32, seed: u64) -> Vec<CatalogEntry> {
    CATALOG_NAMES
        .iter()
        .map(|n| lookup(n, d, seed).expect("catalog names are valid"))
        .collect()
}

pub fn lookup(name: &str, d: u32, seed: u64) -> Result<CatalogEntry> {
    if d == 0 {
        return Err(Error::invalid("d", "must be positive"));
    }
    let dd = f64::from(d);
    let entry = match name {
        "constant" => CatalogEntry::new(
            "constant",
            "f(x) = 0.5".into(),
            TargetFunction::new(
                name,
                d,
                Modulus::Holder {
                    lambda: 0.0,
                    alpha: 1.0,
                },
                |_| 0.5,
            ),
        ),
        "affine" => {
            // f(x) = 0.2 + Σ x_i / (i + 1)
            let lambda = (1..=d)
                .map(|i| 1.0 / f64::from(i + 1).powi(2))
                .sum::<f64>()
                .sqrt();
            CatalogEntry::new(
                "affine",
                "f(x) = 0.2 + sum_i x_i / (i + 1)".into(),
                TargetFunction::new(name, d, Modulus::lipschitz(lambda), |x| {
                    0.2 + x
                        .iter()
                        .enumerate()
                        .map(|(i, v)| v / (i + 2) as f64)
                        .sum::<f64>()
                }),
            )
        }
        "abs_pi" => CatalogEntry::new(
            "abs_pi",
            "f(x) = |x - (1/pi, ..., 1/pi)|, Lipschitz with lambda = 1".into(),
            TargetFunction::new(name, d, Modulus::lipschitz(1.0), |x| {
                x.iter().map(|v| (v - 1.0 / PI).powi(2)).sum::<f64>().sqrt()
            }),
        ),
        "holder_sum" => {
            // Σ t_i^α <= d^{1-α/2} (Σ t_i²)^{α/2}
            let lambda = dd.powf(1.0 - HOLDER_ALPHA / 2.0);
            CatalogEntry::new(
                "holder_sum",
                format!("f(x) = sum_i |x_i - c_i|^{HOLDER_ALPHA}, c_i = 1/(i + 2), lambda = d^(1 - alpha/2)"),
                TargetFunction::new(
                    name,
                    d,
                    Modulus::Holder {
                        lambda,
                        alpha: HOLDER_ALPHA,
                    },
                    |x| {
                        x.iter()
                            .enumerate()
                            .map(|(i, v)| (v - 1.0 / (i + 2) as f64).abs().powf(HOLDER_ALPHA))
                            .sum()
                    },
                ),
            )
        }
        "sin_osc" => {
            // s = Σ x_i has gradient norm √d
            let lambda = (0.5 * 5.0 + 0.25 * 13.0) * dd.sqrt();
            CatalogEntry::new(
                "sin_osc",
                "f(x) = sin(5 s)/2 + sin(13 s)/4 with s = sum_i x_i".into(),
                TargetFunction::new(name, d, Modulus::lipschitz(lambda), |x| {
                    let s: f64 = x.iter().sum();
                    0.5 * (5.0 * s).sin() + 0.25 * (13.0 * s).sin()
                }),
            )
        }
        "bump" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let count = (BUMP_CELLS as usize).pow(d);
            let signs: Vec<f64> = (0..count)
                .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                .collect();
            let f = bump_family(d, BUMP_CELLS, 1.0, signs);
            CatalogEntry::new(
                "bump",
                format!("signed pyramid bumps on a {BUMP_CELLS}^d grid, alpha = 1, lambda = 1/2"),
                f,
            )
        }
        _ => {
            return Err(Error::invalid(
                "target",
                format!(
                    "unknown target `{name}` (expected one of {})",
                    CATALOG_NAMES.join(", ")
                ),
            ))
        }
    };
    Ok(entry)
}

/// `f_χ = Σ_β χ(β) ζ_{Q_β}` over the `cells^d` cubes of side `η = 1/cells`.
///
/// `ζ_Q` peaks at `(η/2)^α / 2` at the centre of `Q`, vanishes on `∂Q` and is
/// linear along every ray from the centre. Its Hölder constant is `2^{-α}`.
pub fn bump_family(d: u32, cells: u64, alpha: f64, signs: Vec<f64>) -> TargetFunction {
    assert_eq!(signs.len(), (cells as usize).pow(d));
    let eta = 1.0 / cells as f64;
    let half = eta / 2.0;
    let peak = half.powf(alpha) / 2.0;
    let modulus = Modulus::Holder {
        lambda: 2f64.powf(-alpha),
        alpha,
    };
    TargetFunction::new("bump", d, modulus, move |x| {
        let mut idx = 0usize;
        let mut dist: f64 = 0.0;
        for &xi in x {
            let cell = ((xi * cells as f64).floor() as i64).clamp(0, cells as i64 - 1) as usize;
            let centre = (cell as f64 + 0.5) * eta;
            dist = dist.max((xi - centre).abs());
            idx = idx * cells as usize + cell;
        }
        signs[idx] * peak * (1.0 - dist / half).max(0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_peak() {
        let f = bump_family(1, 2, 1.0, vec![1.0, 1.0]);
        assert_eq!(f.eval(&[0.25]), 0.125);
        assert_eq!(f.eval(&[0.75]), 0.125);
        assert_eq!(f.eval(&[0.5]), 0.0);
        assert_eq!(f.eval(&[0.0]), 0.0);
        assert_eq!(f.eval(&[0.125]), 0.0625);
    }

    #[test]
    fn all_names_resolve() {
        for d in 1..=3 {
            let c = catalog(d, 7);
            assert_eq!(c.len(), CATALOG_NAMES.len());
            assert!(c.iter().all(|e| e.d == d));
        }
        assert!(lookup("nope", 1, 0).is_err());
        assert!(lookup("affine", 0, 0).is_err());
    }

    #[test]
    fn bump_signs_follow_seed() {
        let a = lookup("bump", 2, 1).unwrap();
        let b = lookup("bump", 2, 1).unwrap();
        for i in 0..9 {
            let x = [
                (i / 3) as f64 / 3.0 + 1.0 / 6.0,
                (i % 3) as f64 / 3.0 + 1.0 / 6.0,
            ];
            assert_eq!(a.target.eval(&x), b.target.eval(&x));
            assert!((a.target.eval(&x).abs() - 1.0 / 12.0).abs() < 1e-15);
        }
    }
}
