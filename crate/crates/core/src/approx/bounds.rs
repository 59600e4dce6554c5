use super::Modulus;

/// Which closed-form error bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundVariant {
    /// `131 √d ω(r)` with `r = (N²L² log₃(N+2))^{-1/d}`.
    Main,
    /// `130 √d ω(r)`, valid outside the trifling region.
    MainGap,
    /// `131 λ √d (N²L² log₃(N+2))^{-α/d}` for a Hölder modulus.
    Holder,
    /// The main bound rewritten for a network of actual width `Ñ = N` and
    /// depth `L̃ = L`.
    Tilde,
}

/// `(N²L² log₃(N+2))^{-1/d}`.
pub fn rate_radius(n_width: f64, l_depth: f64, d: u32) -> f64 {
    let log3 = (n_width + 2.0).ln() / 3f64.ln();
    (n_width * n_width * l_depth * l_depth * log3).powf(-1.0 / f64::from(d))
}

/// Closed-form bound on the approximation error for width and depth
/// parameters `N`, `L`.
///
/// `Holder` falls back to `Main` for an empirical modulus. `Tilde` returns
/// infinity when `Ñ < 3^{d+4} d` or `L̃ < 29 + 2d`, where the bound does not
/// apply.
pub fn error_bound(
    omega: &Modulus,
    n_width: u64,
    l_depth: u64,
    d: u32,
    variant: BoundVariant,
) -> f64 {
    let sd = f64::from(d).sqrt();
    let (nw, ld) = (n_width as f64, l_depth as f64);
    match variant {
        BoundVariant::Main => 131.0 * sd * omega.eval(rate_radius(nw, ld, d), d),
        BoundVariant::MainGap => 130.0 * sd * omega.eval(rate_radius(nw, ld, d), d),
        BoundVariant::Holder => match omega {
            Modulus::Holder { lambda, alpha } => {
                let log3 = (nw + 2.0).ln() / 3f64.ln();
                131.0 * lambda * sd * (nw * nw * ld * ld * log3).powf(-alpha / f64::from(d))
            }
            Modulus::Empirical(_) => error_bound(omega, n_width, l_depth, d, BoundVariant::Main),
        },
        BoundVariant::Tilde => {
            let scale = 3f64.powi(d as i32 + 5) * f64::from(d);
            if nw < scale / 3.0 || ld < 29.0 + 2.0 * f64::from(d) {
                return f64::INFINITY;
            }
            let n_eff = nw / scale;
            let l_eff = (ld - 18.0 - 2.0 * f64::from(d)) / 22.0;
            131.0 * sd * omega.eval(rate_radius(n_eff, l_eff, d), d)
        }
    }
}

/// Largest `δ <= 1/(3K)` with `K d δ (2|f(0)| + 2ω(√d))^p <= ω(r)^p`, so the
/// trifling region costs no more than the main term in `L^p`.
///
/// Returns `1/(3K)` when `ω(r) = 0` or the right side is unconstrained.
pub fn lp_delta(
    k: u64,
    d: u32,
    f0: f64,
    omega: &Modulus,
    n_width: u64,
    l_depth: u64,
    p: f64,
) -> f64 {
    let max = 1.0 / (3.0 * k as f64);
    let w_r = omega.eval(rate_radius(n_width as f64, l_depth as f64, d), d);
    let big = 2.0 * f0.abs() + 2.0 * omega.eval(f64::from(d).sqrt(), d);
    if w_r <= 0.0 || big <= 0.0 {
        return max;
    }
    let delta = (w_r / big).powf(p) / (k as f64 * f64::from(d));
    delta.min(max)
}
